use sp4_core::constructions::*;
use sp4_core::localfield::{CanonicalSection, FieldConfig, Scalar};
use sp4_core::symplectic::{cartan, CartanPair};

fn f3() -> FieldConfig {
    FieldConfig::equal_char(3).unwrap()
}

fn cp(i: u32, j: u32) -> CartanPair {
    CartanPair { i, j }
}

fn exhaustive(fam: &MoveFamily) -> VerificationReport {
    verify_family(fam, Mode::Exhaustive, &VerifyOptions::default()).unwrap()
}

#[test]
fn move1_at_4_1() {
    let fam = build_move1_charneq2(f3(), 4, 1).unwrap();
    assert_eq!(fam.k, 2);
    assert_eq!((fam.target_on, fam.target_off), (cp(4, 1), cp(4, 2)));
    let r = exhaustive(&fam);
    assert!(r.pass && r.violation_count == 0 && r.all_symplectic);
    assert_eq!(r.tuples_checked as u128, fam.tuple_count());
}

#[test]
fn move1_char2_examples() {
    let f2 = FieldConfig::equal_char(2).unwrap();
    let fam = build_move1_char2(f2, 6, 1).unwrap();
    assert_eq!((fam.m, fam.k), (3, 1));
    let fam = build_move1_char2(f2, 8, 1).unwrap();
    assert_eq!((fam.target_on, fam.target_off), (cp(8, 1), cp(8, 3)));
    assert!(exhaustive(&fam).pass);
}

#[test]
fn move2_both_parities() {
    let fam = build_move2(f3(), 4, 3).unwrap();
    assert_eq!((fam.target_on, fam.target_off), (cp(4, 3), cp(5, 2)));
    // 27^5 tuples; the full sweep runs in the acceptance suite
    let r = verify_family(&fam, Mode::Sampled { seed: 3, count: 20_000 }, &VerifyOptions::default()).unwrap();
    assert!(r.pass);
    let fam = build_move2(f3(), 6, 3).unwrap();
    assert_eq!((fam.target_on, fam.target_off), (cp(6, 3), cp(7, 2)));
    assert_eq!(fam.odd_correction, Some(OddCorrection::LowerCorner));
    let r = verify_family(&fam, Mode::Sampled { seed: 7, count: 20_000 }, &VerifyOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.violations.first());
}

#[test]
fn lattice_move1_stays_in_gamma() {
    let fam = build_lattice_move1(f3(), 3, 1).unwrap();
    assert_eq!((fam.target_on, fam.target_off), (cp(3, 1), cp(3, 2)));
    let r = exhaustive(&fam);
    assert!(r.pass);
    assert_eq!(r.all_in_lattice, Some(true));
}

#[test]
fn corrupted_family_is_caught() {
    let fam = build_move1_charneq2(f3(), 4, 1).unwrap();
    let bad = fam.clone().with_off_offset(fam.k);
    let r = exhaustive(&bad);
    assert!(!r.pass && r.violation_count > 0);
    let v = &r.violations[0];
    assert_eq!(v.expected, cp(4, 2));
    // the serialized counterexample replays
    let js = serde_json::to_string(v).unwrap();
    let back: Violation = serde_json::from_str(&js).unwrap();
    assert_eq!(&back, v);
    let m = sp4_core::symplectic::Mat4::from_strings(f3(), &back.matrix).unwrap();
    assert_ne!(cartan(&m).ok(), Some(cp(4, 2)));
}

#[test]
fn verdict_does_not_depend_on_the_section() {
    let fam = build_move1_charneq2(f3(), 5, 2).unwrap();
    let canon = exhaustive(&fam);
    for seed in [1, 2, 3] {
        let opts = VerifyOptions { section: SectionChoice::Random { seed, extra_digits: 4 }, ..Default::default() };
        let r = verify_family(&fam, Mode::Exhaustive, &opts).unwrap();
        assert_eq!((r.pass, r.violation_count), (canon.pass, canon.violation_count));
    }
}

#[test]
fn k_invariance_of_products() {
    use rand::SeedableRng;
    let fam = build_move1_charneq2(f3(), 4, 1).unwrap();
    let ring = fam.ring();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let a = vec![ring.random(&mut rng)];
        let b = ring.random(&mut rng);
        let x = vec![ring.random(&mut rng)];
        let y = fam.fiber_y(&a, &b, &x, &fam.offset(fam.on_offset_exponent));
        let g = fam.alpha(&a, &b, &CanonicalSection).mul(&fam.beta(&x, &y, &CanonicalSection));
        let k1 = sp4_core::symplectic::random_k_element(f3(), &mut rng, 6, 3);
        let k2 = sp4_core::symplectic::random_k_element(f3(), &mut rng, 6, 3);
        assert_eq!(cartan(&k1.mul(&g).mul(&k2)).unwrap(), cp(4, 1));
    }
}

#[test]
fn budget_is_enforced() {
    let fam = build_lattice_move1(f3(), 4, 1).unwrap();
    let opts = VerifyOptions { budget: 1000, ..Default::default() };
    assert!(matches!(verify_family(&fam, Mode::Exhaustive, &opts), Err(sp4_core::Error::Budget { .. })));
}

#[test]
fn heisenberg_elements_are_symplectic() {
    let f = f3();
    let s = |c, e| Scalar::monomial(f, c, e);
    let h = heisenberg(f, [s(1, -2), s(2, 0)], [s(2, 0), s(-1, -2)], s(2, -3));
    assert!(h.is_symplectic());
    let h = heisenberg(f, [s(1, -2), s(2, 0)], [s(1, 1), s(1, -1)], s(2, -3));
    assert!(!h.is_symplectic());
}
