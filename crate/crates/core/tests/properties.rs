use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sp4_core::finitegroups::*;
use sp4_core::localfield::*;
use sp4_core::symplectic::*;

fn fields() -> impl Strategy<Value = FieldConfig> {
    prop_oneof![
        Just(FieldConfig::equal_char(2).unwrap()),
        Just(FieldConfig::equal_char(3).unwrap()),
        Just(FieldConfig::equal_char(5).unwrap()),
        Just(FieldConfig::mixed_char(2, 24).unwrap()),
        Just(FieldConfig::mixed_char(3, 16).unwrap()),
    ]
}

fn scalar(f: FieldConfig) -> impl Strategy<Value = Scalar> {
    let p = f.p;
    (-3i32..3, prop::collection::vec(0..p, 0..6)).prop_map(move |(v, d)| Scalar::from_digits(f, v, &d))
}

fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    fields().prop_flat_map(|f| (scalar(f), scalar(f), scalar(f)))
}

fn same(a: &Scalar, b: &Scalar) -> bool {
    if a.field().is_exact() {
        a == b
    } else {
        a.agrees_with(b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws((x, y, z) in triple()) {
        prop_assert!(same(&(&x + &y), &(&y + &x)));
        prop_assert!(same(&(&x * &y), &(&y * &x)));
        prop_assert!(same(&(&(&x + &y) + &z), &(&x + &(&y + &z))));
        prop_assert!(same(&(&(&x * &y) * &z), &(&x * &(&y * &z))));
        prop_assert!(same(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn valuation_is_additive((x, y, _z) in triple()) {
        if let (Some(a), Some(b)) = (x.valuation(), y.valuation()) {
            prop_assert_eq!((&x * &y).valuation(), Some(a + b));
        }
        if let (Some(a), Some(b)) = (x.valuation(), y.valuation()) {
            if a != b {
                prop_assert_eq!((&x + &y).valuation(), Some(a.min(b)));
            }
        }
    }

    #[test]
    fn text_round_trip(x in fields().prop_flat_map(scalar)) {
        let back = Scalar::parse(*x.field(), &x.to_string()).unwrap();
        prop_assert!(same(&back, &x));
    }

    #[test]
    fn section_then_reduce_is_identity(f in fields(), k in 1u32..4, seed in any::<u64>()) {
        let ring = ResidueRing::new(f, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring.random(&mut rng);
        let sec = RandomSection { seed, extra_digits: 3 };
        prop_assert_eq!(reduce(&sec.lift(&r), k).unwrap(), r.clone());
        prop_assert_eq!(reduce(&CanonicalSection.lift(&r), k).unwrap(), r);
    }
}

fn k_elem(f: FieldConfig, seed: u64) -> Mat4 {
    random_k_element(f, &mut ChaCha8Rng::seed_from_u64(seed), 6, 3)
}

fn mat6_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    (0..6)
        .map(|r| {
            (0..6)
                .map(|c| (0..6).fold(Scalar::zero(*a[0][0].field()), |acc, t| &acc + &(&a[r][t] * &b[t][c])))
                .collect()
        })
        .collect()
}

fn exact_fields() -> impl Strategy<Value = FieldConfig> {
    prop_oneof![
        Just(FieldConfig::equal_char(2).unwrap()),
        Just(FieldConfig::equal_char(3).unwrap()),
        Just(FieldConfig::equal_char(5).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cartan_is_k_biinvariant(f in exact_fields(), i in 0u32..6, dj in 0u32..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let j = dj.min(i);
        let g = k_elem(f, s1).mul(&Mat4::cartan_diag(f, i as i32, j as i32)).mul(&k_elem(f, s2));
        prop_assert!(g.is_symplectic());
        prop_assert_eq!(cartan(&g).unwrap(), CartanPair { i, j });
    }

    #[test]
    fn products_wedges_and_lengths(f in exact_fields(), a in (0u32..4, 0u32..4), b in (0u32..4, 0u32..4), s in any::<u64>()) {
        let d = |(x, y): (u32, u32)| Mat4::cartan_diag(f, x.max(y) as i32, x.min(y) as i32);
        let g = k_elem(f, s).mul(&d(a)).mul(&k_elem(f, s ^ 1));
        let h = k_elem(f, s ^ 2).mul(&d(b)).mul(&k_elem(f, s ^ 3));
        let gh = g.mul(&h);
        prop_assert!(gh.is_symplectic());
        let lhs = gh.wedge_square();
        let rhs = mat6_mul(&g.wedge_square(), &h.wedge_square());
        prop_assert_eq!(lhs, rhs);
        let gi = inv(&g).unwrap();
        prop_assert!(gi.mul(&g).agrees_with(&Mat4::identity(f)));
        prop_assert_eq!(length(&gi).unwrap(), length(&g).unwrap());
        prop_assert!(length(&gh).unwrap() <= length(&g).unwrap() + length(&h).unwrap());
    }
}

fn small_groups() -> Vec<FiniteGroup> {
    let f3 = FieldConfig::equal_char(3).unwrap();
    vec![
        FiniteGroup::Abelian(ElementaryAbelian::new(3, 5)),
        FiniteGroup::Abelian(ElementaryAbelian::new(5, 3)),
        FiniteGroup::Heisenberg(HeisenbergGroup::new(f3, 0, 0).unwrap()),
        FiniteGroup::Heisenberg(HeisenbergGroup::new(FieldConfig::equal_char(5).unwrap(), 0, 0).unwrap()),
        FiniteGroup::Heisenberg(HeisenbergGroup::new(f3, 0, 2).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn group_axioms(gi in 0usize..5, seed in any::<u64>()) {
        use rand::Rng;
        let g = &small_groups()[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.order();
        for _ in 0..20 {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            prop_assert!(g.mul(a, b) < n);
            prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
            prop_assert_eq!(g.mul(g.identity(), a), a);
        }
    }

    #[test]
    fn lp_norm_laws(gi in 0usize..5, support in 1usize..12, seed in any::<u64>()) {
        let g = &small_groups()[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = AlgebraElement::random(g, support, &mut rng);
        let spec = spectrum(&f, g).unwrap();
        let two = spec.lp(2.0).unwrap();
        prop_assert!((two - f.l2_norm()).abs() <= 1e-9 * f.l2_norm().max(1.0));
        let ps = [1.0, 1.5, 2.0, 4.0, 10.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| spec.lp(p).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-9 * w[1].max(1.0));
        }
        for &p in &ps[..5] {
            prop_assert!(check_fg_integral_spectrum(&f, &spec, p).unwrap().pass);
        }
        // the matrix path agrees with the structured one
        let dense = dense_spectrum(&f, g).unwrap().max();
        prop_assert!((dense - spec.max()).abs() <= 1e-8 * dense.max(1.0));
    }
}
