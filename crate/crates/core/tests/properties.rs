//! Algebraic identities among the invariants and the classification, on
//! reports built from arbitrary `Q, W, A, B, C`.

use bdr_core::classify::{
    classify_point, delta_p_det, surface_predicates, violations, NegativeKHypothesis, ParabolicSubtype, PointTag,
};
use bdr_core::invariants::InvariantReport;
use proptest::prelude::*;

type R = InvariantReport<f64>;

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
}

fn report() -> impl Strategy<Value = R> {
    (0.1f64..3.0, 0.2f64..3.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(q, w, a, b, c)| R::synthetic(q, w, a, b, c))
}

/// Zero or clearly away from zero.
fn offset() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 1e-3f64..1.0, -1.0f64..-1e-3]
}

proptest! {
    #[test]
    fn k_is_four_delta(r in report()) {
        prop_assert!(rel(r.k_inv, 4.0 * r.delta_p) <= 1e-9);
    }

    #[test]
    fn h_is_normal_curvature(r in report()) {
        prop_assert!(rel(r.h_inv, r.torsion) <= 1e-9);
    }

    #[test]
    fn h_squared_minus_k(r in report()) {
        let (q, w, a, b, c) = (r.q, r.tangent.w, r.a, r.b, r.c);
        let expect = (b * b * w * w + c * c * (a + q * q * w * w).powi(2)) / w.powi(8);
        prop_assert!(rel(r.h_inv * r.h_inv - r.k_inv, expect) <= 1e-8);
    }

    #[test]
    fn wintgen_inequality(r in report()) {
        prop_assert!(r.wintgen_gap >= -1e-9, "gap {}", r.wintgen_gap);
    }

    #[test]
    fn closed_forms_match_shape_operators(r in report()) {
        prop_assert!(rel(r.gaussian, r.checks.gaussian_from_shape) <= 1e-9);
        prop_assert!(rel(r.delta_p, delta_p_det(&r)) <= 1e-9);
        prop_assert!(rel(r.k_inv, r.checks.k_from_gamma) <= 1e-9);
        prop_assert!(rel(r.h_inv, r.checks.h_from_gamma) <= 1e-9);
        prop_assert!(rel(r.torsion, r.checks.torsion_general) <= 1e-9);
        prop_assert!((r.mean - r.checks.mean_from_traces).norm() <= 1e-9 * 1f64.max(r.mean_norm()));
    }

    #[test]
    fn flatness_is_the_gaussian_numerator(r in report()) {
        prop_assert!(rel(r.gaussian.abs(), violations(&r)[0]) <= 1e-12);
    }

    #[test]
    fn minimal_iff_b_and_qa_vanish(q in 0.1f64..3.0, w in 0.2f64..3.0, c in -2.0f64..2.0, da in offset(), b in offset()) {
        let r = R::synthetic(q, w, -q * q * w * w + da, b, c);
        let zero_h = r.mean_norm() <= 1e-8;
        let pred = surface_predicates([&r], 1e-8).minimal.holds;
        prop_assert_eq!(zero_h, da == 0.0 && b == 0.0);
        prop_assert_eq!(pred, zero_h);
    }

    #[test]
    fn semi_umbilic_factorizes(q in 0.1f64..3.0, w in 0.2f64..3.0, b in -2.0f64..2.0, da in offset(), c in offset()) {
        let r = R::synthetic(q, w, q * q * w * w + da, b, c);
        prop_assert!(rel(r.torsion.abs(), violations(&r)[2]) <= 1e-12);
        let zero = r.torsion.abs() <= 1e-8;
        prop_assert_eq!(zero, da == 0.0 || c == 0.0);
        prop_assert_eq!(surface_predicates([&r], 1e-8).semi_umbilic.holds, zero);
    }

    #[test]
    fn classification_is_exhaustive(r in report(), tol in prop_oneof![Just(1e-8), 1e-6f64..1e-2]) {
        let class = classify_point(&r, tol);
        let band = tol * r.tangent.w.powi(6);
        let expect = if r.delta_p < -band {
            PointTag::Hyperbolic
        } else if r.delta_p > band {
            PointTag::Elliptic
        } else {
            PointTag::Parabolic
        };
        prop_assert_eq!(class.tag, expect);
        prop_assert_eq!(class.subtype.is_some(), class.tag == PointTag::Parabolic);
        if class.hypothesis.is_some() {
            prop_assert!(class.gaussian < -tol * r.tangent.w.powi(4));
        }
    }

    #[test]
    fn flipping_the_second_normal(r in report()) {
        // N2 -> -N2 negates B and C
        let f = R::synthetic(r.q, r.tangent.w, r.a, -r.b, -r.c);
        prop_assert!(rel(f.torsion, -r.torsion) <= 1e-12);
        prop_assert!(rel(f.gaussian, r.gaussian) <= 1e-12);
        prop_assert!(rel(f.delta_p, r.delta_p) <= 1e-12);
        prop_assert!(rel(f.mean_norm2, r.mean_norm2) <= 1e-12);
        let (x, y) = (classify_point(&r, 1e-8), classify_point(&f, 1e-8));
        prop_assert_eq!(x.tag, y.tag);
        prop_assert_eq!(x.subtype, y.subtype);
    }

    #[test]
    fn parabolic_with_a_b_zero_and_c_nonzero(q in 0.1f64..3.0, w in 0.2f64..3.0, c in prop_oneof![0.01f64..2.0, -2.0f64..-0.01]) {
        // Delta = 0, K = -Q^2 C^2 / W^4 < 0, rows (Q, 0, 0) and (0, QC/W^2, 0)
        let class = classify_point(&R::synthetic(q, w, 0.0, 0.0, c), 1e-8);
        prop_assert_eq!(class.tag, PointTag::Parabolic);
        prop_assert_eq!(class.rank_a, 2);
        prop_assert_eq!(class.subtype, Some(ParabolicSubtype::NonDegenerate));
        prop_assert_eq!(class.hypothesis, Some(NegativeKHypothesis::VanishingAB));
    }
}
