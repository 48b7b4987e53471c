//! Property tests for sequence and operator invariants.

use proptest::prelude::*;
use rankone_core::operators::OperatorExpr;
use rankone_core::seq::{Complex, DiagonalSymbol, GeomTail, GeomTailSeq};

const TOL: f64 = 1e-12;

fn complex(bound: f64) -> impl Strategy<Value = Complex> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex::new(re, im))
}

fn ratio() -> impl Strategy<Value = Complex> {
    (0.0..0.9f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex::from_polar(r, t))
}

fn seq() -> impl Strategy<Value = GeomTailSeq> {
    (
        prop::collection::vec(complex(2.0), 0..6),
        prop::collection::vec((complex(2.0), ratio()), 0..3),
    )
        .prop_map(|(prefix, tails)| {
            let tails = tails.into_iter().map(|(s, q)| GeomTail::new(s, q)).collect();
            GeomTailSeq::new(prefix, tails).unwrap()
        })
}

fn close(a: Complex, b: Complex, scale: f64) -> bool {
    (a - b).norm() <= TOL * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inner_product_is_conjugate_symmetric(x in seq(), y in seq()) {
        let xy = x.inner_product(&y).unwrap();
        let yx = y.inner_product(&x).unwrap();
        let scale = x.norm().unwrap() * y.norm().unwrap();
        prop_assert!(close(xy, yx.conj(), scale), "<x,y> = {xy}, <y,x> = {yx}");
    }

    #[test]
    fn norm_matches_partial_sums(x in seq()) {
        let head: f64 = x.head(2000).iter().map(|z| z.norm_sqr()).sum();
        let n2 = x.norm_sq().unwrap();
        prop_assert!((head - n2).abs() <= TOL * n2.max(1.0), "{head} vs {n2}");
    }

    #[test]
    fn shift_is_isometric(x in seq(), p in 0usize..5) {
        let s = OperatorExpr::shift(p);
        let sx = s.apply(&x).unwrap();
        let (a, b) = (sx.norm_sq().unwrap(), x.norm_sq().unwrap());
        prop_assert!((a - b).abs() <= TOL * b.max(1.0));
        let back = s.apply_adjoint(&sx).unwrap();
        prop_assert!(back.distance(&x).unwrap() <= TOL * b.sqrt().max(1.0));
    }

    #[test]
    fn operators_are_linear(x in seq(), y in seq(), lambda in complex(2.0), f in seq(), g in seq(), p in 1usize..4) {
        let t = OperatorExpr::sum(vec![OperatorExpr::shift(p), OperatorExpr::rank_one(f, g)]);
        let lhs = t.apply(&x.scale(lambda).add(&y).unwrap()).unwrap();
        let rhs = t.apply(&x).unwrap().scale(lambda).add(&t.apply(&y).unwrap()).unwrap();
        let scale = lhs.norm().unwrap().max(rhs.norm().unwrap());
        prop_assert!(lhs.distance(&rhs).unwrap() <= TOL * scale.max(1.0));
    }

    #[test]
    fn adjoint_pairs_inner_products(x in seq(), y in seq(), f in seq(), g in seq(), d0 in complex(2.0), dc in complex(2.0)) {
        let d = DiagonalSymbol::new(vec![d0], rankone_core::seq::DiagonalTail::Constant(dc)).unwrap();
        let t = OperatorExpr::compose(
            OperatorExpr::sum(vec![OperatorExpr::shift(2), OperatorExpr::rank_one(f, g)]),
            OperatorExpr::diagonal(d),
        );
        let lhs = t.apply(&x).unwrap().inner_product(&y).unwrap();
        let rhs = x.inner_product(&t.apply_adjoint(&y).unwrap()).unwrap();
        let scale = t.apply(&x).unwrap().norm().unwrap() * y.norm().unwrap()
            + x.norm().unwrap() * t.apply_adjoint(&y).unwrap().norm().unwrap();
        prop_assert!(close(lhs, rhs, scale), "{lhs} vs {rhs}");
    }

    #[test]
    fn canonical_form_is_idempotent(x in seq()) {
        let again = GeomTailSeq::new(x.prefix().to_vec(), x.tails().to_vec()).unwrap();
        prop_assert_eq!(&again, &x);
        let json = serde_json::to_string(&x).unwrap();
        let parsed: GeomTailSeq = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(parsed, x);
    }

    #[test]
    fn canonicalization_preserves_coordinates(
        prefix in prop::collection::vec(complex(2.0), 0..4),
        scale in complex(2.0),
        q in ratio(),
    ) {
        // Two tails sharing a ratio merge into one.
        let split = GeomTailSeq::new(prefix.clone(), vec![GeomTail::new(scale, q), GeomTail::new(scale, q)]).unwrap();
        let merged = GeomTailSeq::new(prefix, vec![GeomTail::new(scale * 2.0, q)]).unwrap();
        prop_assert!(split.tails().len() <= 1);
        for n in 0..16 {
            prop_assert!(close(split.coordinate(n), merged.coordinate(n), 1.0));
        }
    }
}
