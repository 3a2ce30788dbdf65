//! Property tests for the structural invariants.

use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use tribox::sampling::{random_ket, random_settings, seeded_rng, BornKernel};
use tribox::{
    lro_apply, mermin_family, mermin_steering_model, partial_trace, reconstruct,
    svetlichny_family, svetlichny_steering_model, svetlichny_value, tensor, CMatrix, Complex,
    Relabeling,
};

fn small_int_matrix() -> impl Strategy<Value = CMatrix> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-3i8..=3, -3i8..=3), r * c).prop_map(move |vals| {
            CMatrix::new(
                r,
                c,
                vals.into_iter()
                    .map(|(re, im)| Complex::new(re as f64, im as f64))
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_associativity_exact(a in small_int_matrix(), b in small_int_matrix(), c in small_int_matrix()) {
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert!(left.approx_eq(&right, 0.0));
    }

    #[test]
    fn partial_trace_totals_to_scalar_trace(seed in 0u64..1000) {
        let mut rng = seeded_rng(seed);
        let ket = random_ket(&mut rng, 8);
        let rho = ket.outer();
        let s = partial_trace(&rho, &[2, 2, 2], &[0, 1, 2]).unwrap();
        prop_assert!((s.get(0, 0) - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn born_boxes_are_valid(seed in 0u64..1000) {
        let mut rng = seeded_rng(seed);
        let settings = random_settings(&mut rng);
        let b = BornKernel::new(&settings).box_for_ket(&random_ket(&mut rng, 8));
        prop_assert!(b.validate(1e-10).is_ok());
        prop_assert!(b.no_signaling_report(1e-10).max <= 1e-12);
    }

    #[test]
    fn svetlichny_family_correlators_closed_form(v in 0.0f64..=1.0) {
        let b = svetlichny_family(v).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let sign = if ((x & y) ^ (y & z) ^ (x & z)) == 0 { 1.0 } else { -1.0 };
                    prop_assert!((b.correlator(x, y, z) - sign * v / SQRT_2).abs() < 1e-13);
                }
            }
        }
        prop_assert!((svetlichny_value(&b) - 4.0 * SQRT_2 * v).abs() < 1e-12);
    }

    #[test]
    fn lro_preserves_normalization_and_no_signaling(v in 0.01f64..=1.0, idx in 0usize..64) {
        let b = tribox::chsh_family(v).unwrap();
        let rel = Relabeling::enumerate()[idx];
        let q = lro_apply(&b, &rel);
        prop_assert!(q.validate(1e-12).is_ok());
        prop_assert!(q.no_signaling_max() < 1e-15);
    }

    #[test]
    fn reconstruction_identity_over_range(t in 0.01f64..=1.0) {
        let v = t * FRAC_1_SQRT_2;
        let m = svetlichny_steering_model(v).unwrap();
        prop_assert!(reconstruct(&m).max_abs_diff(&svetlichny_family(v).unwrap()) <= 1e-12);
        let m = mermin_steering_model(v).unwrap();
        prop_assert!(reconstruct(&m).max_abs_diff(&mermin_family(v).unwrap()) <= 1e-12);
    }

    #[test]
    fn family_boxes_validate(v in 0.0f64..=1.0) {
        prop_assert!(svetlichny_family(v).unwrap().validate(1e-10).is_ok());
        prop_assert!(mermin_family(v).unwrap().validate(1e-10).is_ok());
    }

    #[test]
    fn projector_completeness_for_random_observables(seed in 0u64..1000) {
        use tribox::projector;
        let mut rng = seeded_rng(seed);
        let obs = tribox::sampling::random_observable(&mut rng);
        let sum = projector(&obs, 0).add(&projector(&obs, 1));
        prop_assert!(sum.approx_eq(&CMatrix::identity(2), 1e-14));
    }
}
