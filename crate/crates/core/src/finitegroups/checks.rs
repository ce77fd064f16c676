use serde::{Deserialize, Serialize};

use super::algebra::AlgebraElement;
use super::group::{FiniteGroup, GroupLaw};
use super::h1::{build_h1_pair, H1Pair};
use super::h2::{build_h2_pair_with, BLift, OrderCertificate, DEFAULT_H2_BUDGET};
use super::spectral::{
    character_stats_sampled, character_value, cstar_norm, heisenberg_spectrum, power_iteration_norm, spectrum, PowerIteration,
    PowerIterationResult, Spectrum,
};
use crate::error::Result;
use crate::localfield::FieldConfig;
use crate::symplectic::CartanPair;

/// Slack for comparing a computed norm with a stated bound.
pub const BOUND_TOL: f64 = 1e-9;
/// Agreement required between independent norm computations.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Slack for norms certified by power iteration.
pub const POWER_TOL: f64 = 1e-6;
/// Default cap on |supp| * |H| for power-iteration cross-checks.
pub const DEFAULT_POWER_CELLS: u64 = 4_000_000;
/// Characters with |f^| above this count toward the spectral support.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussCheck {
    pub p: u32,
    pub i: u32,
    pub j: u32,
    pub group_order: u64,
    pub max_abs: f64,
    pub bound: f64,
    pub margin: f64,
    pub cstar_norm: f64,
    /// Largest singular value from power iteration on the regular representation.
    pub power_iteration: Option<PowerIterationResult>,
    pub norms_agree: bool,
    /// Characters re-evaluated directly from the definition, including the maximiser.
    pub spot_checks: u32,
    /// Largest disagreement between the sweep and the direct evaluations.
    pub spot_max_error: f64,
    /// Number of characters where the difference does not vanish.
    pub spectrum_support: u64,
    pub pass: bool,
}

/// Characters re-evaluated directly in every Gauss check.
pub const GAUSS_SPOT_CHECKS: u32 = 256;

/// Max over all characters of |(h_{i,j} - h_{i,j+1})^|, against 2 p^(-(i-j)/2).
pub fn check_gauss_bound(field: FieldConfig, i: u32, j: u32) -> Result<GaussCheck> {
    check_gauss_pair(&build_h1_pair(field, i, j)?, DEFAULT_POWER_CELLS)
}

/// Gauss check for an explicit pair. Power iteration cross-checks the
/// C*-norm when |supp| * |H| is at most `power_cells`.
pub fn check_gauss_pair(pair: &H1Pair, power_cells: u64) -> Result<GaussCheck> {
    let delta = pair.difference();
    let samples = spot_codes(pair.group.order());
    let (stats, swept) = character_stats_sampled(&delta, &pair.group, SUPPORT_TOL, &samples);
    // the sweep against the definition, at the maximiser and at seeded random characters
    let mut spot_max_error = (character_value(&delta, &pair.group, &pair.group.coords(stats.argmax)).norm() - stats.max_abs).abs();
    for (&code, &v) in samples.iter().zip(&swept) {
        let direct = character_value(&delta, &pair.group, &pair.group.coords(code)).norm();
        spot_max_error = spot_max_error.max((direct - v).abs());
    }
    let group = FiniteGroup::Abelian(pair.group.clone());
    let cstar = cstar_norm(&delta, &group)?;
    let power_iteration = if (delta.support_len() as u64) * pair.group.order() <= power_cells {
        Some(power_iteration_norm(&delta, &pair.group, &PowerIteration::default())?)
    } else {
        None
    };
    let norms_agree = (cstar - stats.max_abs).abs() <= AGREEMENT_TOL
        && spot_max_error <= AGREEMENT_TOL
        && power_iteration.is_none_or(|r| (r.norm - stats.max_abs).abs() <= AGREEMENT_TOL);
    let n = pair.i - pair.j;
    let bound = 2.0 * (pair.field.p as f64).powf(-(n as f64) / 2.0);
    Ok(GaussCheck {
        p: pair.field.p,
        i: pair.i,
        j: pair.j,
        group_order: pair.group.order(),
        max_abs: stats.max_abs,
        bound,
        margin: bound - stats.max_abs,
        cstar_norm: cstar,
        power_iteration,
        norms_agree,
        spot_checks: samples.len() as u32 + 1,
        spot_max_error,
        spectrum_support: stats.support,
        pass: stats.max_abs <= bound + BOUND_TOL && norms_agree,
    })
}

fn spot_codes(order: u64) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    (0..GAUSS_SPOT_CHECKS).map(|_| rng.gen_range(0..order)).collect()
}

/// Options for the Heisenberg bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Options {
    /// Largest group order accepted.
    pub budget: u64,
    /// Power iteration runs when |supp| * |H| is at most this.
    pub power_cells: u64,
    pub power: PowerIteration,
    pub lift: BLift,
}

impl Default for H2Options {
    fn default() -> Self {
        H2Options {
            budget: DEFAULT_H2_BUDGET,
            power_cells: DEFAULT_POWER_CELLS,
            power: PowerIteration::default(),
            lift: BLift::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Check {
    pub p: u32,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub measured_order: u64,
    pub measured_order_exponent: u32,
    pub stated_order_exponent: u32,
    pub certificate: OrderCertificate,
    /// Cartan classes of the supports of h_{i,j} and h_{i+1,j-1}, with counts.
    pub support_classes: [Vec<(CartanPair, u64)>; 2],
    /// Whether the supports lie in KD(i,j)K and KD(i+1,j-1)K.
    pub supports_in_named_cosets: bool,
    /// Largest singular value from the block decomposition.
    pub norm: f64,
    pub power_iteration: Option<PowerIterationResult>,
    pub norms_agree: bool,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// ||h_{i,j} - h_{i+1,j-1}|| in the reduced C*-algebra against 2 p^2 p^(-j).
pub fn check_h2_bound(field: FieldConfig, i: u32, j: u32, opts: &H2Options) -> Result<H2Check> {
    let pair = build_h2_pair_with(field, i, j, opts.budget, opts.lift)?;
    let [c0, c1] = pair.support_classes()?;
    let named = |c: &std::collections::BTreeMap<CartanPair, u64>, i: u32, j: u32| {
        c.len() == 1 && c.contains_key(&CartanPair { i, j })
    };
    let supports_in_named_cosets = named(&c0, i, j) && named(&c1, i + 1, j - 1);
    let support_classes = [c0.into_iter().collect(), c1.into_iter().collect()];
    let delta = pair.difference();
    let norm = heisenberg_spectrum(&delta, &pair.group)?.max();
    let power_iteration = if (delta.support_len() as u64) * pair.group.order() <= opts.power_cells {
        Some(power_iteration_norm(&delta, &pair.group, &opts.power)?)
    } else {
        None
    };
    let norms_agree = power_iteration.is_none_or(|r| (r.norm - norm).abs() <= POWER_TOL);
    let p = field.p as f64;
    let bound = 2.0 * p * p * p.powi(-(j as i32));
    Ok(H2Check {
        p: field.p,
        i,
        j,
        m: pair.m,
        measured_order: pair.measured_order(),
        measured_order_exponent: pair.measured_order_exponent(),
        stated_order_exponent: pair.stated_order_exponent(),
        certificate: pair.certificate,
        support_classes,
        supports_in_named_cosets,
        norm,
        power_iteration,
        norms_agree,
        bound,
        margin: bound - norm,
        pass: norm <= bound + POWER_TOL && norms_agree,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgIntegralCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// |sum_h f(h)| <= |H|^(1/p) ||f||_{L^p(LH)}.
pub fn check_fg_integral(f: &AlgebraElement, group: &FiniteGroup, p_exp: f64) -> Result<FgIntegralCheck> {
    check_fg_integral_spectrum(f, &spectrum(f, group)?, p_exp)
}

pub fn check_fg_integral_spectrum(f: &AlgebraElement, spec: &Spectrum, p_exp: f64) -> Result<FgIntegralCheck> {
    let lhs = f.total().norm();
    let rhs = (spec.order as f64).powf(1.0 / p_exp) * spec.lp(p_exp)?;
    Ok(FgIntegralCheck { lhs, rhs, pass: lhs <= rhs + BOUND_TOL })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpLimitCheck {
    pub exponents: Vec<f64>,
    pub sequence: Vec<f64>,
    pub limit: f64,
    pub nondecreasing: bool,
    /// (1/|H|)^(1/p) ||f||_inf <= ||f||_p <= ||f||_inf at every exponent.
    pub sandwich_holds: bool,
    pub final_gap: f64,
    pub allowed_gap: f64,
    pub pass: bool,
}

/// ||f||_p for p = 2, 4, ..., 2^10 against the C*-norm.
pub fn check_lp_limit(f: &AlgebraElement, group: &FiniteGroup) -> Result<LpLimitCheck> {
    let spec = spectrum(f, group)?;
    let limit = cstar_norm(f, group)?;
    check_lp_limit_spectrum(&spec, limit)
}

pub fn check_lp_limit_spectrum(spec: &Spectrum, limit: f64) -> Result<LpLimitCheck> {
    let exponents: Vec<f64> = (1..=10).map(|k| 2f64.powi(k)).collect();
    let sequence = exponents.iter().map(|&p| spec.lp(p)).collect::<Result<Vec<_>>>()?;
    let tol = BOUND_TOL * limit.max(1.0);
    let nondecreasing = sequence.windows(2).all(|w| w[1] + tol >= w[0]);
    let order = spec.order as f64;
    let sandwich_holds = exponents
        .iter()
        .zip(&sequence)
        .all(|(&p, &v)| order.powf(-1.0 / p) * limit <= v + tol && v <= limit + tol);
    let last_p = *exponents.last().unwrap_or(&1.0);
    let final_gap = limit - sequence.last().copied().unwrap_or(0.0);
    let allowed_gap = (1.0 - order.powf(-1.0 / last_p)).max(1e-3) * limit + tol;
    Ok(LpLimitCheck {
        pass: nondecreasing && sandwich_holds && final_gap <= allowed_gap,
        exponents,
        sequence,
        limit,
        nondecreasing,
        sandwich_holds,
        final_gap,
        allowed_gap,
    })
}

/// Exponents used by the randomized L^p suite.
pub const LP_SUITE_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 4.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpPropertyCheck {
    pub group: String,
    pub order: u64,
    pub support: usize,
    /// Worst violation of ||f||_p <= ||f||_q over consecutive exponents, up to infinity.
    pub monotonicity_defect: f64,
    pub monotone: bool,
    pub plancherel_error: f64,
    pub plancherel: bool,
    pub limit: bool,
    pub integral: bool,
    pub pass: bool,
}

/// Monotonicity in p, Plancherel at p = 2, convergence to the C*-norm and the
/// trace inequality for one element.
pub fn check_lp_properties(label: &str, f: &AlgebraElement, group: &FiniteGroup) -> Result<LpPropertyCheck> {
    let spec = spectrum(f, group)?;
    let scale = spec.max().max(1.0);
    let mut ps: Vec<f64> = LP_SUITE_EXPONENTS.to_vec();
    ps.push(f64::INFINITY);
    let norms = ps.iter().map(|&p| spec.lp(p)).collect::<Result<Vec<_>>>()?;
    let monotonicity_defect = norms.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    let monotone = monotonicity_defect <= BOUND_TOL * scale;
    let l2 = f.l2_norm();
    let plancherel_error = (spec.lp(2.0)? - l2).abs();
    let plancherel = plancherel_error <= BOUND_TOL * l2.max(1.0);
    let limit = check_lp_limit_spectrum(&spec, spec.max())?.pass;
    let mut integral = true;
    for &p in &LP_SUITE_EXPONENTS {
        integral &= check_fg_integral_spectrum(f, &spec, p)?.pass;
    }
    Ok(LpPropertyCheck {
        group: label.to_string(),
        order: group.order(),
        support: f.support_len(),
        monotonicity_defect,
        monotone,
        plancherel_error,
        plancherel,
        limit,
        integral,
        pass: monotone && plancherel && limit && integral,
    })
}

/// Small groups of order at most `max_order`: elementary abelian groups, the
/// unit Heisenberg groups over F_3, F_5, F_7, a wider Heisenberg group and an
/// H1 group.
pub fn lp_suite_groups(max_order: u64) -> Result<Vec<(String, FiniteGroup)>> {
    let mut out = vec![
        ("abelian 3^5".to_string(), FiniteGroup::Abelian(super::group::ElementaryAbelian::new(3, 5))),
        ("abelian 3^6".to_string(), FiniteGroup::Abelian(super::group::ElementaryAbelian::new(3, 6))),
        ("abelian 5^4".to_string(), FiniteGroup::Abelian(super::group::ElementaryAbelian::new(5, 4))),
        ("abelian 2^9".to_string(), FiniteGroup::Abelian(super::group::ElementaryAbelian::new(2, 9))),
    ];
    for p in [3, 5, 7] {
        let f = FieldConfig::equal_char(p)?;
        out.push((format!("heisenberg p={p} m=0"), FiniteGroup::Heisenberg(super::group::HeisenbergGroup::new(f, 0, 0)?)));
    }
    out.push(("heisenberg p=3 m=0 c<=2".into(), FiniteGroup::Heisenberg(super::group::HeisenbergGroup::new(FieldConfig::equal_char(3)?, 0, 2)?)));
    out.push(("h1 p=3 (2,1)".into(), FiniteGroup::Abelian(build_h1_pair(FieldConfig::equal_char(3)?, 2, 1)?.group)));
    out.retain(|(_, g)| g.order() <= max_order);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSuiteReport {
    pub seed: u64,
    pub elements: usize,
    pub failures: usize,
    pub checks: Vec<LpPropertyCheck>,
    pub pass: bool,
}

/// `count` seeded random elements spread round-robin over the groups; every
/// fourth element is made self-adjoint.
pub fn run_lp_suite(groups: &[(String, FiniteGroup)], count: usize, seed: u64) -> Result<LpSuiteReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::with_capacity(count);
    for k in 0..count {
        let (label, g) = &groups[k % groups.len()];
        let support = rng.gen_range(1..=(g.order() as usize).min(64));
        let mut f = AlgebraElement::random(g, support, &mut rng);
        if k % 4 == 3 {
            f = f.add(&f.adjoint(g)).scale(num_complex::Complex64::new(0.5, 0.0));
        }
        checks.push(check_lp_properties(label, &f, g)?);
    }
    let failures = checks.iter().filter(|c| !c.pass).count();
    Ok(LpSuiteReport { seed, elements: count, failures, checks, pass: failures == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitegroups::h1::build_h1_wide_pair;

    fn f3() -> FieldConfig {
        FieldConfig::equal_char(3).unwrap()
    }

    #[test]
    fn lp_suite_small_run() {
        let groups = lp_suite_groups(729).unwrap();
        assert_eq!(groups.len(), 9);
        let r = run_lp_suite(&groups, 36, 1).unwrap();
        assert!(r.pass, "{:?}", r.checks.iter().find(|c| !c.pass));
    }

    #[test]
    fn gauss_small_instances() {
        for (i, j) in [(2, 2), (3, 2), (3, 1), (4, 1)] {
            let c = check_gauss_bound(f3(), i, j).unwrap();
            assert!(c.pass, "{c:?}");
            assert!(c.power_iteration.is_some());
        }
        let c = check_gauss_bound(f3(), 3, 1).unwrap();
        assert!((c.bound - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn wide_variant_support() {
        // The support grows like q^(2(i-j)) with a fixed constant factor.
        let mut ratios = Vec::new();
        for (i, j) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
            let pair = build_h1_wide_pair(f3(), i, j).unwrap();
            let c = check_gauss_pair(&pair, 0).unwrap();
            assert!(c.pass, "{c:?}");
            ratios.push(c.spectrum_support as f64 / 9f64.powi((i - j) as i32));
        }
        assert!(ratios.iter().all(|&r| r == ratios[0]), "{ratios:?}");
    }

    #[test]
    fn h2_smallest() {
        let c = check_h2_bound(f3(), 1, 1, &H2Options::default()).unwrap();
        assert!(c.pass, "{c:?}");
        assert!((c.bound - 6.0).abs() < 1e-12);
        assert!(c.power_iteration.is_some());
        assert!(c.norm <= 2.0 + 1e-9);
    }

    #[test]
    fn point_mass_limits() {
        let g = FiniteGroup::Heisenberg(crate::finitegroups::HeisenbergGroup::new(f3(), 0, 0).unwrap());
        let e = AlgebraElement::point(5);
        let lim = check_lp_limit(&e, &g).unwrap();
        assert!(lim.pass);
        assert!(lim.sequence.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let fg = check_fg_integral(&e, &g, 2.0).unwrap();
        assert!(fg.pass && (fg.lhs - 1.0).abs() < 1e-12);
    }
}
