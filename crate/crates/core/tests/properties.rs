use leibniz_core::algebroid::{section_add, section_scale, section_sub, Section};
use leibniz_core::connection::{check_admissible, torsion, BracketKind};
use leibniz_core::fixtures::{
    anticommutable_fixture, random_form, random_frame_matrix, random_poly, random_section, rng,
    torsion_free_constructible,
};
use leibniz_core::frame::{change_frame, FrameChange};
use leibniz_core::EForm;
use leibniz_scalar::{Budget, Scalar};
use proptest::prelude::*;

fn budget() -> Budget {
    Budget::default()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn sign(p: usize) -> Scalar {
    Scalar::from_int(if p.is_multiple_of(2) { 1 } else { -1 })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn right_leibniz_rule(seed in 0u64..10_000) {
        let fx = anticommutable_fixture(seed, &budget()).unwrap();
        let alg = &fx.algebroid;
        let (r, n) = (alg.rank(), alg.dim());
        let mut g = rng(seed);
        let (u, v) = (random_section(&mut g, r, n, 2), random_section(&mut g, r, n, 2));
        let f = random_poly(&mut g, n, 2, 3);
        let lhs = alg.bracket(&u, &section_scale(&f, &v)).unwrap();
        let rhs = section_add(&section_scale(&alg.rho_section(&u, &f), &v), &section_scale(&f, &alg.bracket(&u, &v).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn left_leibniz_rule(seed in 0u64..10_000) {
        let fx = anticommutable_fixture(seed, &budget()).unwrap();
        let alg = &fx.algebroid;
        let (r, n) = (alg.rank(), alg.dim());
        let mut g = rng(seed ^ 1);
        let (u, v) = (random_section(&mut g, r, n, 2), random_section(&mut g, r, n, 2));
        let f = random_poly(&mut g, n, 2, 3);
        let df: Section = (0..r).map(|a| alg.coboundary(&f).at(&[a])).collect();
        let lhs = alg.bracket(&section_scale(&f, &u), &v).unwrap();
        let rhs = section_add(
            &section_sub(&section_scale(&f, &alg.bracket(&u, &v).unwrap()), &section_scale(&alg.rho_section(&v, &f), &u)),
            &alg.loc_apply(&df, &u, &v),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn interior_product_is_an_antiderivation(seed in 0u64..10_000, p in 1usize..3, q in 0usize..2) {
        let r = 4;
        let mut g = rng(seed);
        let alpha = random_form(&mut g, r, p, 2, 2);
        let beta = random_form(&mut g, r, q, 2, 2);
        let v = random_section(&mut g, r, 2, 1);
        let lhs = alpha.wedge(&beta).interior(&v).unwrap();
        let mut rhs = alpha.interior(&v).unwrap().wedge(&beta);
        if q > 0 {
            rhs = rhs.add(&alpha.wedge(&beta.interior(&v).unwrap()).mul_scalar(&sign(p)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_graded_commutative(seed in 0u64..10_000, p in 0usize..3, q in 0usize..3) {
        let mut g = rng(seed);
        let alpha: EForm = random_form(&mut g, 4, p, 2, 1);
        let beta: EForm = random_form(&mut g, 4, q, 2, 1);
        prop_assert_eq!(alpha.wedge(&beta), beta.wedge(&alpha).mul_scalar(&sign(p * q)));
    }

    #[test]
    fn frame_change_round_trip(seed in 0u64..10_000) {
        let fx = anticommutable_fixture(seed, &budget()).unwrap();
        let alg = &fx.algebroid;
        let mut g = rng(seed ^ 7);
        let fc = FrameChange::new(random_frame_matrix(&mut g, alg.rank(), alg.dim(), 1), &budget()).unwrap();
        let there = change_frame(alg, &fc, Some(&fx.connection), Some(&fx.metric), &budget()).unwrap();
        let back = change_frame(
            &there.algebroid,
            &fc.inverse(),
            there.connection.as_ref(),
            there.metric.as_ref(),
            &budget(),
        )
        .unwrap();
        prop_assert_eq!(back.algebroid.gamma(), alg.gamma());
        prop_assert_eq!(back.algebroid.anchor(), alg.anchor());
        prop_assert_eq!(back.algebroid.loc(), alg.loc());
        prop_assert_eq!(back.algebroid.proj(), alg.proj());
        prop_assert_eq!(back.connection.as_ref(), Some(&fx.connection));
        prop_assert_eq!(back.metric.as_ref().unwrap().g(), fx.metric.g());
    }

    #[test]
    fn bracket_built_from_connection_makes_it_admissible(seed in 0u64..10_000) {
        let (alg, conn) = torsion_free_constructible(seed).unwrap();
        prop_assert!(check_admissible(&alg, &conn).pass);
        prop_assert!(torsion(&alg, &conn, BracketKind::Modified).unwrap().is_zero());
    }
}
