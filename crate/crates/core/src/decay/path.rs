use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

use super::setting::{check_admissible, fmt_ratio, minimal_slope_n, Move, Setting, SettingKind};
use crate::error::{Error, Result};
use crate::symplectic::CartanPair;

/// Asymptotic direction of the zig-zag: the path hugs the line dj*i = di*j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub di: u32,
    pub dj: u32,
}

impl Direction {
    pub fn new(di: u32, dj: u32) -> Result<Direction> {
        if dj == 0 || di <= dj || gcd(di, dj) != 1 {
            return Err(Error::Domain(format!("direction ({di},{dj}) needs di > dj >= 1 coprime")));
        }
        Ok(Direction { di, dj })
    }

    /// The line i = (1 + 1/n) j.
    pub fn from_slope_n(n: u32) -> Result<Direction> {
        if n == 0 {
            return Err(Error::Domain("slope parameter n must be positive".into()));
        }
        Direction::new(n + 1, n)
    }

    /// Line i = 3j for the group and Schur settings; i = (1+1/n)j with minimal n for L^p.
    pub fn default_for(setting: &Setting) -> Result<Direction> {
        match setting.kind {
            SettingKind::LatticeLp => Direction::from_slope_n(minimal_slope_n(setting.p)?),
            _ => Direction::new(3, 1),
        }
    }

    /// Signed offset from the line, i*dj - j*di.
    pub fn offset(&self, i: i64, j: i64) -> i64 {
        i * self.dj as i64 - j * self.di as i64
    }
}

/// Checks exactly that every move type has geometric ratio below one along `dir`.
pub fn check_direction(setting: &Setting, dir: Direction) -> Result<()> {
    check_admissible(setting.kind, setting.p)?;
    if setting.kind == SettingKind::LatticeLp {
        // Move2 exponent per unit of translation: (2/p)(di+dj) - dj < 0.
        let lhs = Ratio::from_integer(2 * (dir.di + dir.dj) as i64) * setting.p.inverse_exact();
        if lhs >= Ratio::from_integer(dir.dj as i64) {
            return Err(Error::Admissibility(format!(
                "2(di+dj)/p < dj fails along ({},{}) at p = {} ({} >= {})",
                dir.di,
                dir.dj,
                setting.p,
                fmt_ratio(lhs),
                dir.dj
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    #[serde(rename = "move")]
    pub mv: Move,
    pub from: CartanPair,
    pub to: CartanPair,
    /// Point where the move's hypotheses are checked and its bound evaluated.
    pub base: CartanPair,
    pub reversed: bool,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleInfo {
    /// Index of the first step of the repeating block.
    pub start: usize,
    pub len: usize,
    pub translation: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZigzagPath {
    pub start: CartanPair,
    pub direction: Direction,
    pub steps: Vec<PathStep>,
    pub cycle: Option<CycleInfo>,
    /// Number of steps taken while rerouting around points with no forward move.
    pub detour_steps: usize,
}

impl ZigzagPath {
    pub fn points(&self) -> Vec<CartanPair> {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.to)).collect()
    }

    pub fn total(&self) -> f64 {
        self.steps.iter().map(|s| s.bound).sum()
    }
}

/// Steps generated without a detour in one row of the cycle search are capped here.
pub const MAX_PATH_STEPS: usize = 100_000;
const DETOUR_SEARCH_LIMIT: usize = 20_000;

fn pt(i: i64, j: i64) -> CartanPair {
    CartanPair { i: i as u32, j: j as u32 }
}

fn key(c: CartanPair) -> (i64, i64) {
    (c.i as i64, c.j as i64)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The forward step for `mv` at `x`, if its hypotheses hold there.
fn forward_step(setting: &Setting, mv: Move, x: (i64, i64)) -> Option<PathStep> {
    if setting.hypothesis_failure(mv, x.0, x.1).is_some() {
        return None;
    }
    let (di, dj) = setting.displacement(mv);
    let y = (x.0 + di, x.1 + dj);
    Some(PathStep {
        mv,
        from: pt(x.0, x.1),
        to: pt(y.0, y.1),
        base: pt(x.0, x.1),
        reversed: false,
        bound: setting.formula(mv).eval(setting.q, x.0, x.1),
    })
}

/// The step entering `x` backwards along `mv`, if the base point is valid.
fn reverse_step(setting: &Setting, mv: Move, x: (i64, i64)) -> Option<PathStep> {
    let (di, dj) = setting.displacement(mv);
    let b = (x.0 - di, x.1 - dj);
    if b.1 < 0 || b.0 < b.1 {
        return None;
    }
    let mut s = forward_step(setting, mv, b)?;
    s.from = pt(x.0, x.1);
    s.to = pt(b.0, b.1);
    s.reversed = true;
    Some(s)
}

fn neighbours(setting: &Setting, x: (i64, i64)) -> impl Iterator<Item = PathStep> + '_ {
    [Move::Move2, Move::Move1]
        .into_iter()
        .flat_map(move |mv| [forward_step(setting, mv, x), reverse_step(setting, mv, x)])
        .flatten()
}

struct Walker<'a> {
    setting: &'a Setting,
    dir: Direction,
    x: (i64, i64),
    visited: HashSet<(i64, i64)>,
    detour_steps: usize,
}

enum Greedy {
    /// Chosen step and whether the visited set removed an alternative.
    Step(PathStep, bool),
    Stuck,
}

impl<'a> Walker<'a> {
    fn new(setting: &'a Setting, dir: Direction, start: CartanPair) -> Self {
        let x = key(start);
        Walker { setting, dir, x, visited: HashSet::from([x]), detour_steps: 0 }
    }

    fn greedy_from(&self, x: (i64, i64), extra: &HashSet<(i64, i64)>) -> Greedy {
        let mut best: Option<(i64, PathStep)> = None;
        let mut constrained = false;
        // Move2 first so that it wins ties.
        for mv in [Move::Move2, Move::Move1] {
            let Some(s) = forward_step(self.setting, mv, x) else { continue };
            let y = key(s.to);
            if self.visited.contains(&y) || extra.contains(&y) {
                constrained = true;
                continue;
            }
            let d = self.dir.offset(y.0, y.1).abs();
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, s));
            }
        }
        match best {
            Some((_, s)) => Greedy::Step(s, constrained),
            None => Greedy::Stuck,
        }
    }

    /// Breadth-first search for the nearest point with an unexplored forward move.
    fn detour(&self) -> Result<Vec<PathStep>> {
        let mut parent: HashMap<(i64, i64), PathStep> = HashMap::new();
        let mut queue = VecDeque::from([self.x]);
        let mut seen = HashSet::from([self.x]);
        let empty = HashSet::new();
        while let Some(y) = queue.pop_front() {
            if y != self.x {
                if let Greedy::Step(..) = self.greedy_from(y, &empty) {
                    let mut route = Vec::new();
                    let mut z = y;
                    while z != self.x {
                        let s = parent[&z].clone();
                        z = key(s.from);
                        route.push(s);
                    }
                    route.reverse();
                    return Ok(route);
                }
            }
            if seen.len() > DETOUR_SEARCH_LIMIT {
                break;
            }
            for s in neighbours(self.setting, y) {
                let z = key(s.to);
                if seen.insert(z) {
                    parent.insert(z, s);
                    queue.push_back(z);
                }
            }
        }
        Err(Error::Path(format!(
            "({},{}) in {} (no hypothesis-valid move leads anywhere new)",
            self.x.0, self.x.1, self.setting.kind
        )))
    }

    /// Appends the next step or detour and reports whether it was a plain greedy step.
    fn advance(&mut self, out: &mut Vec<PathStep>) -> Result<Option<bool>> {
        match self.greedy_from(self.x, &HashSet::new()) {
            Greedy::Step(s, constrained) => {
                self.x = key(s.to);
                self.visited.insert(self.x);
                out.push(s);
                Ok(Some(constrained))
            }
            Greedy::Stuck => {
                let route = self.detour()?;
                for s in route {
                    self.x = key(s.to);
                    self.visited.insert(self.x);
                    self.detour_steps += 1;
                    out.push(s);
                }
                Ok(None)
            }
        }
    }
}

/// Deterministic zig-zag from `from`: greedy forward moves minimising the distance to the
/// line (ties go to Move2), detours where no forward move exists, stopping once the
/// walk becomes periodic.
pub fn zigzag_path(setting: &Setting, from: CartanPair, dir: Direction) -> Result<ZigzagPath> {
    let mut w = Walker::new(setting, dir, from);
    let mut steps = Vec::new();
    // offset -> index of the step leaving a point with that offset
    let mut seen: HashMap<i64, usize> = HashMap::new();
    let both_valid = |x: (i64, i64)| {
        setting.hypothesis_failure(Move::Move1, x.0, x.1).is_none()
            && setting.hypothesis_failure(Move::Move2, x.0, x.1).is_none()
    };
    while steps.len() < MAX_PATH_STEPS {
        let x = w.x;
        let idx = steps.len();
        let interior = both_valid(x);
        match w.advance(&mut steps)? {
            Some(false) if interior => {
                let d = dir.offset(x.0, x.1);
                if let Some(&k) = seen.get(&d) {
                    let p0 = key(steps[k].from);
                    let t = (x.0 - p0.0, x.1 - p0.1);
                    if t.1 > 0 && t.0 > t.1 {
                        steps.truncate(idx);
                        return Ok(ZigzagPath {
                            start: from,
                            direction: dir,
                            steps,
                            cycle: Some(CycleInfo { start: k, len: idx - k, translation: t }),
                            detour_steps: w.detour_steps,
                        });
                    }
                }
                seen.insert(d, idx);
            }
            _ => seen.clear(),
        }
    }
    Err(Error::Path(format!("({},{}): no periodic regime within {MAX_PATH_STEPS} steps", from.i, from.j)))
}

/// The first `n` steps of the same walk, generated one by one with no cycle shortcut.
pub fn zigzag_walk(setting: &Setting, from: CartanPair, dir: Direction, n: usize) -> Result<Vec<PathStep>> {
    let mut w = Walker::new(setting, dir, from);
    let mut steps = Vec::with_capacity(n);
    while steps.len() < n {
        w.advance(&mut steps)?;
    }
    steps.truncate(n);
    Ok(steps)
}
