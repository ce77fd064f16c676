use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::localfield::is_prime;
use crate::symplectic::CartanPair;

/// Exact Schatten or L^p exponent in [1, inf].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PExponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl PExponent {
    pub fn finite(num: i64, den: i64) -> Self {
        PExponent::Finite(Ratio::new(num, den))
    }

    /// 1/p as a float; zero at infinity.
    pub fn inverse(&self) -> f64 {
        match self {
            PExponent::Finite(r) => r.recip().to_f64().unwrap_or(0.0),
            PExponent::Infinity => 0.0,
        }
    }

    /// 1/p exactly.
    pub fn inverse_exact(&self) -> Ratio<i64> {
        match self {
            PExponent::Finite(r) => r.recip(),
            PExponent::Infinity => Ratio::zero(),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Infinity => write!(f, "inf"),
            PExponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            PExponent::Finite(r) => {
                let mut d = *r.denom();
                while d % 2 == 0 {
                    d /= 2;
                }
                while d % 5 == 0 {
                    d /= 5;
                }
                match r.to_f64() {
                    Some(x) if d == 1 => write!(f, "{x}"),
                    _ => write!(f, "{}/{}", r.numer(), r.denom()),
                }
            }
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    /// Accepts `inf`, integers, exact decimals such as `4.000001`, and fractions `a/b`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "\u{221e}") {
            return Ok(PExponent::Infinity);
        }
        let bad = || Error::Parse(format!("not an exponent: {s:?}"));
        let r = if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ratio::new(a, b)
        } else if let Some((whole, frac)) = t.split_once('.') {
            if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10i64.pow(frac.len() as u32);
            let w: i64 = whole.parse().map_err(|_| bad())?;
            let fpart: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            Ratio::new(w * den + fpart, den)
        } else {
            Ratio::from_integer(t.parse().map_err(|_| bad())?)
        };
        if r < Ratio::from_integer(1) {
            return Err(Error::Domain(format!("exponent must be >= 1, got {s}")));
        }
        Ok(PExponent::Finite(r))
    }
}

impl Serialize for PExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Infinity => s.serialize_str("inf"),
            PExponent::Finite(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which family of estimates feeds the zig-zag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingKind {
    /// Schur multipliers on S^p(L^2(G)) for the local group.
    GroupSchatten,
    /// Fourier multipliers on L^p(L Gamma) for the lattice.
    LatticeLp,
    /// Schur multipliers on S^p(l^2 Gamma) for the lattice.
    LatticeSchatten,
}

impl SettingKind {
    pub const ALL: [SettingKind; 3] = [SettingKind::GroupSchatten, SettingKind::LatticeLp, SettingKind::LatticeSchatten];
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SettingKind::GroupSchatten => "group-schatten",
            SettingKind::LatticeLp => "lattice-lp",
            SettingKind::LatticeSchatten => "lattice-schatten",
        })
    }
}

impl FromStr for SettingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "group-schatten" => Ok(SettingKind::GroupSchatten),
            "lattice-lp" => Ok(SettingKind::LatticeLp),
            "lattice-schatten" => Ok(SettingKind::LatticeSchatten),
            _ => Err(Error::Parse(format!("unknown setting {s:?}"))),
        }
    }
}

/// Move1 goes (i,j) -> (i,j+1), or (i,j+2) in characteristic 2; Move2 goes (i,j) -> (i+1,j-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Move {
    Move1,
    Move2,
}

/// A fully specified setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub kind: SettingKind,
    pub q: u32,
    pub char2: bool,
    /// Valuation of 2 in the local field.
    pub v0: u32,
    pub p: PExponent,
}

/// bound(i,j) = coeff * q^(a i + b j + c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFormula {
    pub coeff: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub formula_id: &'static str,
}

impl StepFormula {
    pub fn exponent(&self, i: i64, j: i64) -> f64 {
        self.a * i as f64 + self.b * j as f64 + self.c
    }

    pub fn eval(&self, q: u32, i: i64, j: i64) -> f64 {
        self.coeff * (q as f64).powf(self.exponent(i, j))
    }

    /// Factor by which the bound changes under the translation (di, dj).
    pub fn ratio(&self, q: u32, di: i64, dj: i64) -> f64 {
        (q as f64).powf(self.a * di as f64 + self.b * dj as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBound {
    #[serde(rename = "move")]
    pub mv: Move,
    pub at: CartanPair,
    pub value: f64,
    pub formula_id: String,
}

impl Setting {
    pub fn new(kind: SettingKind, q: u32, char2: bool, v0: u32, p: PExponent) -> Result<Setting> {
        if !is_prime(q) {
            return Err(Error::Domain(format!("q = {q} is not prime")));
        }
        if char2 && (kind != SettingKind::GroupSchatten || q != 2) {
            return Err(Error::Domain("characteristic 2 applies to the local group over F_2((t))".into()));
        }
        if kind != SettingKind::GroupSchatten && q == 2 {
            return Err(Error::WrongCharacteristic("lattice estimates need q odd".into()));
        }
        if kind != SettingKind::GroupSchatten && v0 != 0 {
            return Err(Error::Domain("lattice settings live in equal characteristic, v0 = 0".into()));
        }
        Ok(Setting { kind, q, char2, v0, p })
    }

    pub fn group(q: u32, v0: u32, p: PExponent) -> Result<Setting> {
        Setting::new(SettingKind::GroupSchatten, q, false, v0, p)
    }

    pub fn group_char2(p: PExponent) -> Result<Setting> {
        Setting::new(SettingKind::GroupSchatten, 2, true, 0, p)
    }

    pub fn lattice_lp(q: u32, p: PExponent) -> Result<Setting> {
        Setting::new(SettingKind::LatticeLp, q, false, 0, p)
    }

    pub fn lattice_schatten(q: u32, p: PExponent) -> Result<Setting> {
        Setting::new(SettingKind::LatticeSchatten, q, false, 0, p)
    }

    pub fn move1_step(&self) -> i64 {
        if self.char2 {
            2
        } else {
            1
        }
    }

    /// Displacement of a move.
    pub fn displacement(&self, mv: Move) -> (i64, i64) {
        match mv {
            Move::Move1 => (0, self.move1_step()),
            Move::Move2 => (1, -1),
        }
    }

    /// The hypothesis a move needs at (i,j), or `None` when it holds.
    pub fn hypothesis_failure(&self, mv: Move, i: i64, j: i64) -> Option<String> {
        let cond: (bool, String) = match (self.kind, mv) {
            (SettingKind::GroupSchatten, Move::Move1) if self.char2 => (i >= j + 2, "i >= j+2".into()),
            (SettingKind::GroupSchatten, Move::Move1) => {
                (i >= 1 && i - j > self.v0 as i64, format!("i >= 1 and i-j >= v0+1 = {}", self.v0 + 1))
            }
            (SettingKind::LatticeLp, Move::Move1) | (SettingKind::LatticeSchatten, Move::Move1) => {
                (i > j, "i >= j+1".into())
            }
            (SettingKind::LatticeLp, Move::Move2) => (j >= 1, "j >= 1".into()),
            (_, Move::Move2) => (j >= 3, "j >= 3".into()),
        };
        let in_chamber = i >= j && j >= 0;
        if !in_chamber {
            Some("(i,j) in the chamber i >= j >= 0".into())
        } else if cond.0 {
            None
        } else {
            Some(cond.1)
        }
    }

    pub fn formula(&self, mv: Move) -> StepFormula {
        let inv = self.p.inverse();
        let s4 = 1.0 - 4.0 * inv;
        let s3 = 1.0 - 3.0 * inv;
        let t = 0.5 - 2.0 * inv;
        match (self.kind, mv) {
            (SettingKind::GroupSchatten, Move::Move1) if self.char2 => StepFormula {
                coeff: 2.0,
                a: -s4 / 2.0,
                b: s4 / 2.0,
                c: s4,
                formula_id: "group-move1-char2: 2 q^(-(i-j-2)(1-4/p)/2)",
            },
            (SettingKind::GroupSchatten, Move::Move1) => StepFormula {
                coeff: 2.0,
                a: -s4 / 2.0,
                b: s4 / 2.0,
                c: s4 * (self.v0 as f64 + 1.0) / 2.0,
                formula_id: "group-move1: 2 q^(-(i-j-v0-1)(1-4/p)/2)",
            },
            (SettingKind::GroupSchatten, Move::Move2) => StepFormula {
                coeff: 2.0,
                a: 0.0,
                b: -s3,
                c: 2.0 + 2.0 * s3,
                formula_id: "group-move2: 2 q^2 q^(-(j-2)(1-3/p))",
            },
            (SettingKind::LatticeLp, Move::Move1) => StepFormula {
                coeff: 2.0,
                a: -t,
                b: t,
                c: 3.0 * inv,
                formula_id: "lattice-lp-move1: |H1|^(1/p) 2 q^(-(i-j)/2) = 2 q^(3/p) q^(-(1/2-2/p)(i-j))",
            },
            (SettingKind::LatticeLp, Move::Move2) => StepFormula {
                coeff: 2.0,
                a: 2.0 * inv,
                b: 2.0 * inv - 1.0,
                c: 2.0 + 3.0 * inv,
                formula_id: "lattice-lp-move2: q^((2(i+j)+3)/p) 2 q^2 q^(-j) = 2 q^(2+3/p) q^(2(i+j)/p-j)",
            },
            (SettingKind::LatticeSchatten, Move::Move1) => StepFormula {
                coeff: 2.0,
                a: -s4 / 2.0,
                b: s4 / 2.0,
                c: s4,
                formula_id: "lattice-schatten-move1: 2 q^(-(i-j-2)(1-4/p)/2)",
            },
            (SettingKind::LatticeSchatten, Move::Move2) => StepFormula {
                coeff: 2.0,
                a: 0.0,
                b: -s3,
                c: 2.0 * s3,
                formula_id: "lattice-schatten-move2: 2 q^(-(j-2)(1-3/p))",
            },
        }
    }

    /// Bound on |f(D(i,j)) - f(D(target))| for the move, in units of the multiplier norm.
    pub fn step_value(&self, mv: Move, i: i64, j: i64) -> Result<f64> {
        if let Some(condition) = self.hypothesis_failure(mv, i, j) {
            return Err(Error::Hypothesis { at: format!("({i},{j})"), condition });
        }
        Ok(self.formula(mv).eval(self.q, i, j))
    }
}

pub fn step_bound(setting: &Setting, mv: Move, at: CartanPair) -> Result<StepBound> {
    let value = setting.step_value(mv, at.i as i64, at.j as i64)?;
    Ok(StepBound { mv, at, value, formula_id: setting.formula(mv).formula_id.to_string() })
}

/// An exact sign condition on the exponent p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// The condition holds exactly when p is strictly above this threshold.
    pub threshold: Ratio<i64>,
}

pub fn constraints(kind: SettingKind) -> Vec<Constraint> {
    let c = |name: &str, t: i64| Constraint { name: name.into(), threshold: Ratio::from_integer(t) };
    match kind {
        SettingKind::GroupSchatten | SettingKind::LatticeSchatten => vec![c("1 - 4/p > 0", 4), c("1 - 3/p > 0", 3)],
        SettingKind::LatticeLp => vec![c("1/2 - 2/p > 0", 4), c("exists n >= 1 with 2(2+1/n)/p < 1", 4)],
    }
}

/// The admissible range (lower, inf] with the lower endpoint excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRange {
    pub lower_exclusive: Ratio<i64>,
    pub upper_inclusive_infinity: bool,
    pub binding: String,
}

impl fmt::Display for PRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, inf]", PExponent::Finite(self.lower_exclusive))
    }
}

pub fn admissible_p_range(kind: SettingKind) -> PRange {
    let cs = constraints(kind);
    let binding = cs.iter().max_by(|a, b| a.threshold.cmp(&b.threshold)).expect("nonempty");
    PRange { lower_exclusive: binding.threshold, upper_inclusive_infinity: true, binding: binding.name.clone() }
}

/// Checks p against every sign condition, naming the first one that fails.
pub fn check_admissible(kind: SettingKind, p: PExponent) -> Result<()> {
    let PExponent::Finite(r) = p else { return Ok(()) };
    for c in constraints(kind) {
        if r <= c.threshold {
            let value = match kind {
                SettingKind::LatticeLp => Ratio::new(1, 2) - Ratio::from_integer(2) / r,
                _ => Ratio::from_integer(1) - Ratio::from_integer(4) / r,
            };
            let detail = if c.name.starts_with("exists") {
                String::new()
            } else {
                format!(" (value {})", fmt_ratio(value))
            };
            return Err(Error::Admissibility(format!("p = {p} violates {}{detail}", c.name)));
        }
    }
    Ok(())
}

/// Smallest n with 2(2 + 1/n) < p, decided exactly.
pub fn minimal_slope_n(p: PExponent) -> Result<u32> {
    match p {
        PExponent::Infinity => Ok(1),
        PExponent::Finite(r) => {
            check_admissible(SettingKind::LatticeLp, p)?;
            // 2(2 + 1/n) < p  <=>  n > 2/(p - 4)
            let bound = Ratio::from_integer(2) / (r - Ratio::from_integer(4));
            let n = bound.floor().to_integer() + 1;
            Ok(n.max(1) as u32)
        }
    }
}

pub(crate) fn fmt_ratio(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PExponent {
        s.parse().unwrap()
    }

    #[test]
    fn printed_examples() {
        let s = Setting::group(3, 0, PExponent::Infinity).unwrap();
        let v = step_bound(&s, Move::Move1, CartanPair { i: 6, j: 2 }).unwrap().value;
        assert!((v - 2.0 * 3f64.powf(-1.5)).abs() < 1e-12);
        let v = step_bound(&s, Move::Move2, CartanPair { i: 5, j: 4 }).unwrap().value;
        assert!((v - 2.0).abs() < 1e-12);
        assert!(matches!(
            step_bound(&s, Move::Move2, CartanPair { i: 5, j: 2 }),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn exponent_parsing_is_exact() {
        assert_eq!(p("4.5"), PExponent::finite(9, 2));
        assert_eq!(p("4.000001"), PExponent::finite(4_000_001, 1_000_000));
        assert_eq!(p("inf"), PExponent::Infinity);
        assert_eq!(p("10/3"), PExponent::finite(10, 3));
        assert!("0.5".parse::<PExponent>().is_err());
        assert_eq!(p("4.5").to_string(), "4.5");
    }

    #[test]
    fn admissibility() {
        for kind in SettingKind::ALL {
            assert_eq!(admissible_p_range(kind).to_string(), "(4, inf]");
            let err = check_admissible(kind, p("4")).unwrap_err();
            let Error::Admissibility(msg) = err else { panic!() };
            match kind {
                SettingKind::LatticeLp => assert!(msg.contains("1/2 - 2/p > 0 (value 0)"), "{msg}"),
                _ => assert!(msg.contains("1 - 4/p > 0 (value 0)"), "{msg}"),
            }
            assert!(check_admissible(kind, p("4.000001")).is_ok());
        }
        assert_eq!(minimal_slope_n(p("5")).unwrap(), 3);
        assert_eq!(minimal_slope_n(p("4.5")).unwrap(), 5);
        assert_eq!(minimal_slope_n(p("8")).unwrap(), 1);
        assert_eq!(minimal_slope_n(p("6")).unwrap(), 2);
        assert_eq!(minimal_slope_n(PExponent::Infinity).unwrap(), 1);
    }

    #[test]
    fn decay_sign_at_the_boundary() {
        let s = Setting::group(3, 0, p("4.000001")).unwrap();
        let f = s.formula(Move::Move1);
        assert!(f.a < 0.0 && f.ratio(3, 1, 0) < 1.0);
    }
}
