use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Instant;

use sp4_core::constructions::*;
use sp4_core::decay::*;
use sp4_core::finitegroups::*;
use sp4_core::localfield::Backend;
use sp4_core::symplectic::CartanPair;
use sp4_core::Error;

use crate::config::RunConfig;
use crate::report::{Record, Skipped, SuiteReport};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cosets,
    Gauss,
    H2norm,
    Lp,
    Decay,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Cosets, Suite::Gauss, Suite::H2norm, Suite::Lp, Suite::Decay];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Cosets => "cosets",
            Suite::Gauss => "gauss",
            Suite::H2norm => "h2norm",
            Suite::Lp => "lp",
            Suite::Decay => "decay",
        }
    }
}

/// One row of an exported decay table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub setting: String,
    pub q: u32,
    pub p: String,
    pub i: u32,
    pub j: u32,
    pub phi: f64,
    pub source: PhiSource,
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn value<T: Serialize>(x: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(x).map_err(internal)
}

/// Errors that mean "this instance does not exist here" rather than a failure.
fn is_inapplicable(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::WrongCharacteristic(_) | Error::UnsupportedBackend { .. })
}

struct CosetPlan {
    families: Vec<MoveFamily>,
    skipped: Vec<Skipped>,
}

fn coset_plan(cfg: &RunConfig) -> Result<CosetPlan, CliError> {
    let mut families = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |label: &str, p: u32, i: u32, j: u32, r: sp4_core::Result<MoveFamily>| match r {
        Ok(f) => {
            families.push(f);
            Ok(())
        }
        Err(e) if is_inapplicable(&e) => {
            skipped.push(Skipped { suite: "cosets".into(), instance: format!("{label} p={p} ({i},{j})"), reason: e.to_string() });
            Ok(())
        }
        Err(e) => Err(internal(e)),
    };
    for &p in &cfg.p {
        let field = cfg.field(p)?;
        let char2 = p == 2 && field.backend == Backend::EqualChar;
        for i in 1..=cfg.imax {
            for j in 0..=cfg.jmax.min(i) {
                if char2 {
                    if i >= j + 4 {
                        push("move1-char2", p, i, j, build_move1_char2(field, i, j))?;
                    }
                } else if j >= 1 && j < i {
                    push("move1", p, i, j, build_move1_charneq2(field, i, j))?;
                }
                if j >= 3 {
                    push("move2", p, i, j, build_move2(field, i, j))?;
                }
                if !char2 && field.backend == Backend::EqualChar && j < i && i <= cfg.lattice_imax {
                    push("lattice", p, i, j, build_lattice_move1(field, i, j))?;
                }
            }
        }
    }
    if cfg.negative_control {
        families = families.into_iter().map(|f| {
            let e = f.on_offset_exponent;
            f.with_off_offset(e)
        }).collect();
    }
    let sampled = families.iter().any(|f| f.tuple_count() > cfg.budget as u128);
    if sampled && cfg.seed.is_none() {
        return Err(CliError::Config("some coset families exceed the budget and will be sampled; a seed is required".into()));
    }
    if sampled && cfg.samples == 0 {
        return Err(CliError::Config("samples must be positive when families exceed the budget".into()));
    }
    Ok(CosetPlan { families, skipped })
}

fn kind_label(k: MoveKind) -> &'static str {
    match k {
        MoveKind::Move1CharNeq2 => "move1",
        MoveKind::Move1Char2 => "move1-char2",
        MoveKind::Move2 => "move2",
        MoveKind::LatticeMove1 => "lattice",
    }
}

fn run_cosets(cfg: &RunConfig, plan: CosetPlan, out: &mut SuiteReport) -> Result<(), CliError> {
    out.skipped.extend(plan.skipped);
    for (idx, fam) in plan.families.iter().enumerate() {
        let exhaustive = fam.tuple_count() <= cfg.budget as u128;
        let mode = if exhaustive {
            Mode::Exhaustive
        } else {
            let seed = cfg.seed.expect("checked in plan") ^ ((idx as u64) << 32);
            Mode::Sampled { seed, count: cfg.samples }
        };
        let opts = VerifyOptions { budget: cfg.budget as u128, ..Default::default() };
        let r = verify_family(fam, mode, &opts).map_err(internal)?;
        let label = kind_label(fam.kind);
        out.records.push(Record {
            suite: "cosets".into(),
            instance: format!("{label} p={} ({},{})", fam.field.p, fam.base.i, fam.base.j),
            p: Some(fam.field.p),
            i: Some(fam.base.i),
            j: Some(fam.base.j),
            order: u64::try_from(fam.tuple_count()).ok(),
            quantity: "violations".into(),
            measured: r.violation_count as f64,
            bound: Some(0.0),
            margin: Some(0.0 - r.violation_count as f64),
            mode: if exhaustive { "exhaustive".into() } else { format!("sampled({})", cfg.samples) },
            pass: r.pass,
            detail: value(&r)?,
        });
    }
    Ok(())
}

fn require_equal_char(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    if cfg.backend != Backend::EqualChar {
        return Err(CliError::Config(format!("the {} suite needs the equal-char backend", suite.name())));
    }
    Ok(())
}

fn run_gauss(cfg: &RunConfig, out: &mut SuiteReport) -> Result<(), CliError> {
    for &p in &cfg.p {
        let field = cfg.field(p)?;
        for n in 0..=cfg.gap_max {
            let (i, j) = (n + 1, 1);
            let instance = format!("p={p} ({i},{j})");
            let pair = match build_h1_pair(field, i, j) {
                Ok(pair) => pair,
                Err(e) if is_inapplicable(&e) => {
                    out.skipped.push(Skipped { suite: "gauss".into(), instance, reason: e.to_string() });
                    continue;
                }
                Err(e) => return Err(internal(e)),
            };
            let rec = match check_gauss_pair(&pair, cfg.power_cells) {
                Ok(c) => Record {
                    suite: "gauss".into(),
                    instance,
                    p: Some(p),
                    i: Some(i),
                    j: Some(j),
                    order: Some(c.group_order),
                    quantity: "max_abs".into(),
                    measured: c.max_abs,
                    bound: Some(c.bound),
                    margin: Some(c.margin),
                    mode: if c.power_iteration.is_some() { "characters+power".into() } else { "characters".into() },
                    pass: c.max_abs <= c.bound + cfg.bound_tolerance && c.norms_agree,
                    detail: value(&c)?,
                },
                Err(e) => failed("gauss", instance, Some(p), Some(i), Some(j), "max_abs", e),
            };
            out.records.push(rec);
        }
    }
    Ok(())
}

fn failed(suite: &str, instance: String, p: Option<u32>, i: Option<u32>, j: Option<u32>, quantity: &str, e: Error) -> Record {
    Record {
        suite: suite.into(),
        instance,
        p,
        i,
        j,
        order: None,
        quantity: quantity.into(),
        measured: 0.0,
        bound: None,
        margin: None,
        mode: "error".into(),
        pass: false,
        detail: json!({ "error": e.to_string() }),
    }
}

fn run_h2(cfg: &RunConfig, out: &mut SuiteReport) -> Result<(), CliError> {
    let opts = H2Options { budget: cfg.h2_budget, power_cells: cfg.power_cells, ..Default::default() };
    for &p in &cfg.p {
        let field = cfg.field(p)?;
        for &[i, j] in &cfg.h2_pairs {
            let instance = format!("p={p} ({i},{j})");
            let rec = match check_h2_bound(field, i, j, &opts) {
                Ok(c) => Record {
                    suite: "h2norm".into(),
                    instance,
                    p: Some(p),
                    i: Some(i),
                    j: Some(j),
                    order: Some(c.measured_order),
                    quantity: "norm".into(),
                    measured: c.norm,
                    bound: Some(c.bound),
                    margin: Some(c.margin),
                    mode: if c.power_iteration.is_some() { "blocks+power".into() } else { "blocks".into() },
                    pass: c.pass,
                    detail: value(&c)?,
                },
                Err(e) if is_inapplicable(&e) => {
                    out.skipped.push(Skipped { suite: "h2norm".into(), instance, reason: e.to_string() });
                    continue;
                }
                Err(e) => failed("h2norm", instance, Some(p), Some(i), Some(j), "norm", e),
            };
            out.records.push(rec);
        }
    }
    Ok(())
}

fn run_lp(cfg: &RunConfig, out: &mut SuiteReport) -> Result<(), CliError> {
    let groups = lp_suite_groups(cfg.lp_max_order).map_err(internal)?;
    if groups.is_empty() || cfg.lp_elements == 0 {
        return Ok(());
    }
    let seed = cfg.seed.ok_or_else(|| CliError::Config("seed is required for the randomized L^p suite".into()))?;
    let r = run_lp_suite(&groups, cfg.lp_elements, seed).map_err(internal)?;
    for (label, g) in &groups {
        let checks: Vec<&LpPropertyCheck> = r.checks.iter().filter(|c| &c.group == label).collect();
        let failures = checks.iter().filter(|c| !c.pass).count();
        let worst = |f: fn(&LpPropertyCheck) -> f64| checks.iter().map(|c| f(c)).fold(0.0f64, f64::max);
        let first_failure = checks.iter().find(|c| !c.pass).map(|c| value(c)).transpose()?;
        out.records.push(Record {
            suite: "lp".into(),
            instance: label.clone(),
            p: None,
            i: None,
            j: None,
            order: Some(g.order()),
            quantity: "failures".into(),
            measured: failures as f64,
            bound: Some(0.0),
            margin: Some(0.0 - failures as f64),
            mode: format!("random({})", checks.len()),
            pass: failures == 0,
            detail: json!({
                "elements": checks.len(),
                "seed": seed,
                "worst_monotonicity_defect": worst(|c| c.monotonicity_defect.max(0.0)),
                "worst_plancherel_error": worst(|c| c.plancherel_error),
                "first_failure": first_failure,
            }),
        });
    }
    Ok(())
}

fn decay_settings(cfg: &RunConfig) -> Result<Vec<(String, Setting)>, CliError> {
    let mut out = Vec::new();
    let exps = cfg.exponents()?;
    for (name, kind, char2) in cfg.decay_kinds()? {
        let qs: Vec<u32> = if char2 { vec![2] } else { cfg.p.clone() };
        for q in qs {
            let v0 = if char2 { 0 } else { cfg.field(q)?.v0().unwrap_or(0) };
            let v0 = if kind == SettingKind::GroupSchatten { v0 } else { 0 };
            for &pe in &exps {
                match Setting::new(kind, q, char2, v0, pe) {
                    Ok(s) => out.push((name.clone(), s)),
                    Err(_) => continue,
                }
            }
        }
    }
    Ok(out)
}

fn decay_record(cfg: &RunConfig, name: &str, s: &Setting, tables: &mut Vec<TableRow>) -> Result<Record, CliError> {
    let instance = format!("{name} q={} p={}", s.q, s.p);
    let err = |e: Error| failed("decay", instance.clone(), Some(s.q), None, None, "tail_error", e);
    let dir = match Direction::default_for(s) {
        Ok(d) => d,
        Err(e) => return Ok(err(e)),
    };
    let prof = match decay_profile(s, dir, cfg.decay_imax) {
        Ok(p) => p,
        Err(e) => return Ok(err(e)),
    };
    let mut worst = 0.0f64;
    let mut tails_ok = true;
    let mut trivial = Vec::new();
    let mut detours = 0;
    for e in &prof.entries {
        tables.push(TableRow { setting: name.into(), q: s.q, p: s.p.to_string(), i: e.i, j: e.j, phi: e.phi, source: e.source });
        match e.source {
            PhiSource::Trivial => {
                trivial.push([e.i, e.j]);
                continue;
            }
            PhiSource::Detour => detours += 1,
            PhiSource::Zigzag => {}
        }
        let c = check_tail(s, CartanPair { i: e.i, j: e.j }, dir, cfg.tail_cycles).map_err(internal)?;
        let rel = c.error / c.closed_form.abs().max(1.0);
        worst = worst.max(rel);
        tails_ok &= rel <= cfg.tail_tolerance;
    }
    let start = CartanPair { i: 3 * 4, j: 4 };
    let band = check_band_decay(s, start, dir, 10).map_err(internal)?;
    let ratios_ok = prof.tails.iter().all(|t| t.ratio_per_cycle < 1.0);
    Ok(Record {
        suite: "decay".into(),
        instance,
        p: Some(s.q),
        i: None,
        j: None,
        order: Some(prof.entries.len() as u64),
        quantity: "tail_error".into(),
        measured: worst,
        bound: Some(cfg.tail_tolerance),
        margin: Some(cfg.tail_tolerance - worst),
        mode: format!("closed-form vs {} cycles", cfg.tail_cycles),
        pass: tails_ok && ratios_ok && band.pass && prof.all_finite(),
        detail: json!({
            "exponent": s.p.to_string(),
            "direction": [dir.di, dir.dj],
            "translation": [prof.translation.0, prof.translation.1],
            "tails": value(&prof.tails)?,
            "band_ratio": band.r,
            "band_decay_holds": band.pass,
            "trivial_points": trivial,
            "detour_points": detours,
            "all_finite": prof.all_finite(),
            "phi_samples": prof.entries.iter().filter(|e| e.j * 3 == e.i && e.i % 12 == 0).map(|e| json!([e.i, e.j, e.phi])).collect::<Vec<_>>(),
        }),
    })
}

fn admissibility_record(cfg: &RunConfig, kind: SettingKind) -> Result<Record, CliError> {
    let range = admissible_p_range(kind);
    let rejection = match check_admissible(kind, PExponent::finite(4, 1)) {
        Err(Error::Admissibility(m)) => Some(m),
        _ => None,
    };
    let minimal_n: Vec<serde_json::Value> = if kind == SettingKind::LatticeLp {
        cfg.exponents()?
            .iter()
            .map(|&p| json!({ "p": p.to_string(), "n": minimal_slope_n(p).ok() }))
            .collect()
    } else {
        Vec::new()
    };
    let ok = range.to_string() == "(4, inf]" && rejection.is_some();
    Ok(Record {
        suite: "decay".into(),
        instance: format!("{kind} admissibility"),
        p: None,
        i: None,
        j: None,
        order: None,
        quantity: "p4_rejected".into(),
        measured: if rejection.is_some() { 1.0 } else { 0.0 },
        bound: None,
        margin: None,
        mode: "exact".into(),
        pass: ok,
        detail: json!({
            "range": range.to_string(),
            "binding": range.binding,
            "constraints": constraints(kind).iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            "p4_rejection": rejection,
            "minimal_n": minimal_n,
        }),
    })
}

fn run_decay(cfg: &RunConfig, settings: Vec<(String, Setting)>, out: &mut SuiteReport, tables: &mut Vec<TableRow>) -> Result<(), CliError> {
    for (name, s) in &settings {
        out.records.push(decay_record(cfg, name, s, tables)?);
    }
    let mut kinds: Vec<SettingKind> = cfg.decay_kinds()?.into_iter().map(|(_, k, _)| k).collect();
    kinds.sort();
    kinds.dedup();
    for kind in kinds {
        out.records.push(admissibility_record(cfg, kind)?);
    }
    Ok(())
}

/// Validates every requested suite, then runs them in canonical order.
pub fn run_suites(cfg: &RunConfig, suites: &[Suite]) -> Result<(SuiteReport, Vec<TableRow>), CliError> {
    cfg.validate()?;
    let mut suites = suites.to_vec();
    suites.sort();
    suites.dedup();
    let coset_plan = if suites.contains(&Suite::Cosets) { Some(coset_plan(cfg)?) } else { None };
    for s in &suites {
        match s {
            Suite::Gauss | Suite::H2norm => require_equal_char(cfg, *s)?,
            Suite::Lp if cfg.lp_elements > 0 && cfg.seed.is_none() => {
                return Err(CliError::Config("seed is required for the randomized L^p suite".into()))
            }
            _ => {}
        }
    }
    let decay = if suites.contains(&Suite::Decay) { decay_settings(cfg)? } else { Vec::new() };

    let mut report = SuiteReport::new(cfg.clone());
    let mut tables = Vec::new();
    let mut plan = coset_plan;
    let t_all = Instant::now();
    for s in &suites {
        let t0 = Instant::now();
        report.suites.push(s.name().to_string());
        match s {
            Suite::Cosets => run_cosets(cfg, plan.take().expect("planned"), &mut report)?,
            Suite::Gauss => run_gauss(cfg, &mut report)?,
            Suite::H2norm => run_h2(cfg, &mut report)?,
            Suite::Lp => run_lp(cfg, &mut report)?,
            Suite::Decay => run_decay(cfg, decay.clone(), &mut report, &mut tables)?,
        }
        report.timing.per_suite_ms.insert(s.name().to_string(), t0.elapsed().as_millis() as u64);
    }
    report.timing.total_ms = t_all.elapsed().as_millis() as u64;
    report.finish();
    Ok((report, tables))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_requires_seed_only_when_sampling() {
        let mut cfg = RunConfig { imax: 3, jmax: 2, ..RunConfig::default() };
        assert!(coset_plan(&cfg).is_ok());
        cfg.budget = 10;
        assert!(matches!(coset_plan(&cfg), Err(CliError::Config(_))));
        cfg.seed = Some(3);
        assert!(coset_plan(&cfg).is_ok());
    }

    #[test]
    fn char2_families_only_at_p2() {
        let cfg = RunConfig { p: vec![2], imax: 5, jmax: 1, ..RunConfig::default() };
        let plan = coset_plan(&cfg).unwrap();
        assert!(plan.families.iter().all(|f| f.kind != MoveKind::Move1CharNeq2 && f.kind != MoveKind::LatticeMove1));
        assert!(plan.families.iter().any(|f| f.kind == MoveKind::Move1Char2));
    }

    #[test]
    fn suites_run_in_canonical_order() {
        let cfg = RunConfig { seed: Some(1), lp_max_order: 27, ..RunConfig::default() };
        let (r, _) = run_suites(&cfg, &[Suite::Lp, Suite::Gauss, Suite::Lp]).unwrap();
        assert_eq!(r.suites, vec!["gauss".to_string(), "lp".to_string()]);
    }
}
