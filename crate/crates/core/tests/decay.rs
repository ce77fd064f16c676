use proptest::prelude::*;
use sp4_core::decay::*;
use sp4_core::finitegroups::{build_h1_pair, build_h2_pair, GroupLaw, DEFAULT_H2_BUDGET};
use sp4_core::localfield::FieldConfig;
use sp4_core::symplectic::CartanPair;

fn p(s: &str) -> PExponent {
    s.parse().unwrap()
}

#[test]
fn lattice_lp_move1_is_the_h1_chain() {
    let field = FieldConfig::equal_char(3).unwrap();
    for pe in ["4.5", "5", "8", "inf"] {
        let s = Setting::lattice_lp(3, p(pe)).unwrap();
        for (i, j) in [(1, 0), (2, 0), (3, 1), (4, 1), (5, 2)] {
            let pair = build_h1_pair(field, i, j).unwrap();
            let order = pair.group.order() as f64;
            let gauss = 2.0 * 3f64.powf(-((i - j) as f64) / 2.0);
            let chain = order.powf(s.p.inverse()) * gauss;
            let step = step_bound(&s, Move::Move1, CartanPair { i, j }).unwrap().value;
            assert!((chain - step).abs() <= 1e-12 * step, "p={pe} ({i},{j}): {chain} vs {step}");
        }
    }
}

#[test]
fn lattice_lp_move2_dominates_the_h2_chain() {
    let field = FieldConfig::equal_char(3).unwrap();
    let s = Setting::lattice_lp(3, p("5")).unwrap();
    for (i, j) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
        let pair = build_h2_pair(field, i, j, DEFAULT_H2_BUDGET).unwrap();
        let e = pair.measured_order_exponent() as f64;
        assert!(e <= (2 * (i + j) + 3) as f64);
        let chain = 3f64.powf(e * s.p.inverse()) * 2.0 * 9.0 * 3f64.powi(-(j as i32));
        let step = step_bound(&s, Move::Move2, CartanPair { i, j }).unwrap().value;
        assert!(chain <= step * (1.0 + 1e-12), "({i},{j}): {chain} vs {step}");
    }
}

#[test]
fn exponent_serde_round_trip() {
    for pe in ["4.5", "5", "4.000001", "inf", "22/5"] {
        let x = p(pe);
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<PExponent>(&js).unwrap(), x);
    }
}

fn settings() -> impl Strategy<Value = Setting> {
    let pe = prop_oneof![Just("4.5"), Just("5"), Just("8"), Just("inf"), Just("4.000001")];
    (0usize..4, pe, 0u32..2).prop_map(|(k, pe, v0)| match k {
        0 => Setting::group(3, v0, p(pe)).unwrap(),
        1 => Setting::group_char2(p(pe)).unwrap(),
        2 => Setting::lattice_lp(5, p(pe)).unwrap(),
        _ => Setting::lattice_schatten(3, p(pe)).unwrap(),
    })
}

proptest! {
    #[test]
    fn step_bounds_positive_and_decaying(s in settings(), i in 0u32..40, j in 0u32..40) {
        prop_assume!(i >= j);
        for mv in [Move::Move1, Move::Move2] {
            let Ok(b) = step_bound(&s, mv, CartanPair { i, j }) else { continue };
            prop_assert!(b.value > 0.0);
            // decay coordinate: i-j for Move1, j for Move2
            let next = match mv {
                Move::Move1 => CartanPair { i: i + 1, j },
                Move::Move2 => CartanPair { i: i + 1, j: j + 1 },
            };
            let nb = step_bound(&s, mv, next).unwrap();
            prop_assert!(nb.value < b.value, "{mv:?} {:?}: {} !< {}", next, nb.value, b.value);
        }
    }

    #[test]
    fn pair_bound_splits_additively(s in settings(), i in 6u32..14, j in 2u32..5) {
        let dir = Direction::default_for(&s).unwrap();
        let a = CartanPair { i, j };
        let Ok(path) = zigzag_path(&s, a, dir) else { return Ok(()) };
        let pts = path.points();
        let cut = pts.len() / 2;
        let whole: f64 = path.steps.iter().map(|s| s.bound).sum();
        let left: f64 = path.steps[..cut].iter().map(|s| s.bound).sum();
        let right: f64 = path.steps[cut..].iter().map(|s| s.bound).sum();
        prop_assert!((whole - left - right).abs() <= 1e-12 * whole.max(1.0));
        // the optimal telescoping sum is never worse than the zig-zag
        let pb = pair_bound(&s, a, *pts.last().unwrap()).unwrap().value;
        prop_assert!(pb <= whole + 1e-12);
    }

    #[test]
    fn phi_dominates_every_pair_bound_along_its_path(s in settings(), i in 5u32..20, j in 0u32..6) {
        prop_assume!(i >= j);
        let dir = Direction::default_for(&s).unwrap();
        let Ok(ph) = phi(&s, CartanPair { i, j }, dir) else { return Ok(()) };
        let steps = zigzag_walk(&s, CartanPair { i, j }, dir, ph.cycle.start + 3 * ph.cycle.len).unwrap();
        let partial: f64 = steps.iter().map(|s| s.bound).sum();
        prop_assert!(partial <= ph.value * (1.0 + 1e-12));
    }
}
