use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::family::{MoveFamily, MoveKind, OddCorrection};
use crate::error::{Error, Result};
use crate::localfield::{Backend, CanonicalSection, RandomSection, ResidueElement, Section};
use crate::symplectic::{cartan, CartanPair, Mat4};

/// Default ceiling on exhaustive sweeps.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Number of counterexamples kept in full.
pub const MAX_STORED_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SectionChoice {
    Canonical,
    Random { seed: u64, extra_digits: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub budget: u128,
    pub section: SectionChoice,
    /// How many leading tuples also get every offset t^0 .. t^modulus classified.
    pub strata_samples: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: DEFAULT_BUDGET, section: SectionChoice::Canonical, strata_samples: 2000 }
    }
}

/// Serializable summary of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kind: MoveKind,
    pub backend: Backend,
    pub p: u32,
    pub base: CartanPair,
    pub k: u32,
    pub n: usize,
    pub modulus: u32,
    pub on_offset_exponent: u32,
    pub off_offset_exponent: u32,
    pub target_on: CartanPair,
    pub target_off: CartanPair,
    pub lattice_required: bool,
    pub odd_correction: Option<OddCorrection>,
}

impl From<&MoveFamily> for FamilyDescriptor {
    fn from(f: &MoveFamily) -> Self {
        FamilyDescriptor {
            kind: f.kind,
            backend: f.field.backend,
            p: f.field.p,
            base: f.base,
            k: f.k,
            n: f.n,
            modulus: f.modulus,
            on_offset_exponent: f.on_offset_exponent,
            off_offset_exponent: f.off_offset_exponent,
            target_on: f.target_on,
            target_off: f.target_off,
            lattice_required: f.lattice_required,
            odd_correction: f.odd_correction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fiber {
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleParams {
    pub a: Vec<String>,
    pub b: String,
    pub x: Vec<String>,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub params: TupleParams,
    pub fiber: Fiber,
    pub computed: Option<CartanPair>,
    pub expected: CartanPair,
    pub reason: String,
    pub matrix: [[String; 4]; 4],
}

/// Count of tuples whose offset t^l produced a given coset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRecord {
    /// Offset exponent; equal to the modulus for the zero offset.
    pub offset_exponent: u32,
    pub class: Option<CartanPair>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: FamilyDescriptor,
    pub mode: Mode,
    pub section: SectionChoice,
    pub tuples_checked: u64,
    pub evaluations: u64,
    /// Fraction of the parameter space visited (with repetition in sampled mode).
    pub coverage: f64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub all_symplectic: bool,
    pub all_in_lattice: Option<bool>,
    pub within_hypotheses: bool,
    pub k_meets_stated_bound: Option<bool>,
    pub strata: Vec<StratumRecord>,
    pub pass: bool,
}

/// Read-only state shared by every tuple of a sweep.
struct Sweep<'a> {
    fam: &'a MoveFamily,
    section: &'a dyn Section,
    on_offset: ResidueElement,
    off_offset: ResidueElement,
    /// beta(x, y) with its symplectic and lattice flags, indexed by (x, y) in mixed radix.
    beta_table: Option<Vec<(Mat4, bool, bool)>>,
    strata_samples: u64,
}

#[derive(Default)]
struct Tally {
    tuples: u64,
    evaluations: u64,
    violation_count: u64,
    violations: Vec<Violation>,
    non_symplectic: bool,
    outside_lattice: bool,
    strata: BTreeMap<(u32, Option<CartanPair>), u64>,
}

impl Tally {
    fn record(&mut self, params: impl FnOnce() -> TupleParams, fiber: Fiber, g: &Mat4, expected: CartanPair, computed: Option<CartanPair>, reason: &str) {
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(Violation {
                params: params(),
                fiber,
                computed,
                expected,
                reason: reason.to_string(),
                matrix: g.to_strings(),
            });
        }
    }
}

/// Largest (x, y) space for which all betas are tabulated up front.
const BETA_TABLE_LIMIT: u128 = 1 << 17;

fn beta_table(fam: &MoveFamily, section: &dyn Section) -> Option<Vec<(Mat4, bool, bool)>> {
    let ring = fam.ring();
    let count = ring.size().checked_pow(fam.n as u32 + 1)?;
    if count > BETA_TABLE_LIMIT {
        return None;
    }
    Some(
        (0..count)
            .map(|idx| {
                let mut xy = decode(&ring, idx, fam.n + 1);
                let y = xy.pop().expect("n + 1 entries");
                let m = fam.beta(&xy, &y, section);
                let symp = m.is_symplectic();
                let lat = !fam.lattice_required || m.in_lattice();
                (m, symp, lat)
            })
            .collect(),
    )
}

impl Sweep<'_> {
    fn beta(&self, x: &[ResidueElement], y: &ResidueElement) -> (std::borrow::Cow<'_, Mat4>, bool, bool) {
        match &self.beta_table {
            Some(table) => {
                let ring = self.fam.ring();
                let size = ring.size() as usize;
                let mut idx = ring.index(y) as usize;
                for xr in x.iter().rev() {
                    idx = idx * size + ring.index(xr) as usize;
                }
                let (m, symp, lat) = &table[idx];
                (std::borrow::Cow::Borrowed(m), *symp, *lat)
            }
            None => {
                let m = self.fam.beta(x, y, self.section);
                let symp = m.is_symplectic();
                let lat = !self.fam.lattice_required || m.in_lattice();
                (std::borrow::Cow::Owned(m), symp, lat)
            }
        }
    }

    fn check_tuple(&self, tally: &mut Tally, alpha: &Mat4, alpha_ok: (bool, bool), a: &[ResidueElement], b: &ResidueElement, x: &[ResidueElement]) {
        let fam = self.fam;
        tally.tuples += 1;
        for (fiber, offset, expected) in [
            (Fiber::On, &self.on_offset, fam.target_on),
            (Fiber::Off, &self.off_offset, fam.target_off),
        ] {
            let y = fam.fiber_y(a, b, x, offset);
            let (beta, beta_symp, beta_lat) = self.beta(x, &y);
            let g = alpha.mul(&beta);
            tally.evaluations += 1;
            let params = || TupleParams {
                a: a.iter().map(|r| r.to_string()).collect(),
                b: b.to_string(),
                x: x.iter().map(|r| r.to_string()).collect(),
                y: y.to_string(),
            };
            if !(alpha_ok.0 && beta_symp && g.is_symplectic()) {
                tally.non_symplectic = true;
                tally.record(params, fiber, &g, expected, None, "product is not symplectic");
                continue;
            }
            if fam.lattice_required && !(alpha_ok.1 && beta_lat && g.in_lattice()) {
                tally.outside_lattice = true;
                tally.record(params, fiber, &g, expected, None, "entry outside F_p[1/t]");
                continue;
            }
            match cartan(&g) {
                Ok(c) if c == expected => {}
                Ok(c) => tally.record(params, fiber, &g, expected, Some(c), "wrong double coset"),
                Err(err) => tally.record(params, fiber, &g, expected, None, &err.to_string()),
            }
        }
        if tally.tuples <= self.strata_samples {
            for l in 0..=fam.modulus {
                let y = fam.fiber_y(a, b, x, &fam.offset(l));
                let g = alpha.mul(&fam.beta(x, &y, self.section));
                let class = cartan(&g).ok();
                *tally.strata.entry((l, class)).or_insert(0) += 1;
            }
        }
    }
}

/// Decodes `count` residues from the mixed-radix index.
fn decode(ring: &crate::localfield::ResidueRing, mut idx: u128, count: usize) -> Vec<ResidueElement> {
    let size = ring.size();
    (0..count)
        .map(|_| {
            let e = ring.element((idx % size) as u64);
            idx /= size;
            e
        })
        .collect()
}

/// Classifies alpha * beta on both fibers for every (or a sample of)
/// parameter tuple, checking symplecticity and, where required, that all
/// entries lie in F_p[1/t].
pub fn verify_family(fam: &MoveFamily, mode: Mode, opts: &VerifyOptions) -> Result<VerificationReport> {
    let random_section;
    let section: &dyn Section = match opts.section {
        SectionChoice::Canonical => &CanonicalSection,
        SectionChoice::Random { seed, extra_digits } => {
            random_section = RandomSection { seed, extra_digits };
            &random_section
        }
    };
    let total = fam.tuple_count();
    let mut sweep = Sweep {
        fam,
        section,
        on_offset: fam.offset(fam.on_offset_exponent),
        off_offset: fam.offset(fam.off_offset_exponent),
        beta_table: None,
        strata_samples: opts.strata_samples,
    };
    let mut tally = Tally::default();
    let alpha_status = |alpha: &Mat4| (alpha.is_symplectic(), !fam.lattice_required || alpha.in_lattice());
    let ring = fam.ring();
    match mode {
        Mode::Exhaustive => {
            if total > opts.budget {
                return Err(Error::Budget {
                    needed: total,
                    budget: opts.budget,
                    hint: "use sampled mode".into(),
                });
            }
            sweep.beta_table = beta_table(fam, section);
            let ab_count = ring.size().pow(fam.n as u32 + 1);
            let x_count = ring.size().pow(fam.n as u32);
            let xs: Vec<Vec<ResidueElement>> = (0..x_count).map(|xi| decode(&ring, xi, fam.n)).collect();
            for ab in 0..ab_count {
                let mut ab_params = decode(&ring, ab, fam.n + 1);
                let b = ab_params.pop().expect("n + 1 entries");
                let a = ab_params;
                let alpha = fam.alpha(&a, &b, section);
                let status = alpha_status(&alpha);
                for x in &xs {
                    sweep.check_tuple(&mut tally, &alpha, status, &a, &b, x);
                }
            }
        }
        Mode::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let a: Vec<ResidueElement> = (0..fam.n).map(|_| ring.random(&mut rng)).collect();
                let b = ring.random(&mut rng);
                let x: Vec<ResidueElement> = (0..fam.n).map(|_| ring.random(&mut rng)).collect();
                let alpha = fam.alpha(&a, &b, section);
                let status = alpha_status(&alpha);
                sweep.check_tuple(&mut tally, &alpha, status, &a, &b, &x);
            }
        }
    }
    let strata = tally
        .strata
        .iter()
        .map(|(&(offset_exponent, class), &count)| StratumRecord { offset_exponent, class, count })
        .collect();
    Ok(VerificationReport {
        family: FamilyDescriptor::from(fam),
        mode,
        section: opts.section,
        tuples_checked: tally.tuples,
        evaluations: tally.evaluations,
        coverage: tally.tuples as f64 / total as f64,
        violation_count: tally.violation_count,
        pass: tally.violation_count == 0,
        violations: tally.violations,
        all_symplectic: !tally.non_symplectic,
        all_in_lattice: fam.lattice_required.then_some(!tally.outside_lattice),
        within_hypotheses: fam.within_hypotheses,
        k_meets_stated_bound: fam.k_meets_stated_bound(),
        strata,
    })
}
