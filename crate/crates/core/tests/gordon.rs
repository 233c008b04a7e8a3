use proptest::prelude::*;
use qpcocycle::arithmetic::make_liouville;
use qpcocycle::cocycle::product;
use qpcocycle::gordon::{
    approximant_gap, cayley_hamilton_quantity, criterion, gordon_report, PRODUCT_BUDGET,
};
use qpcocycle::{Frequency, Mat2, ModelParams};

fn golden(k: f64) -> ModelParams {
    ModelParams::cos_based(k, Frequency::golden()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_hamilton_on_products(k in 0.0..3.0f64, e in -1.0..6.0f64, theta in 0.0..1.0f64, n in 1usize..60) {
        let prod = product(&golden(k), theta, e, n).unwrap();
        // beyond this the unscaled entries lose the determinant to rounding
        prop_assume!(prod.log_norm() < 12.0);
        let b = prod.to_sl2().unwrap().mat();
        prop_assert!(b.cayley_hamilton_residual() < 1e-10);
    }

    #[test]
    fn free_case_has_no_approximant_gap(e in -1.0..5.0f64, theta in 0.0..1.0f64, n in 1usize..6) {
        let g = approximant_gap(&golden(0.0), e, theta, n).unwrap();
        prop_assert_eq!(g.log_gap, f64::NEG_INFINITY);
    }

    #[test]
    fn envelope_bounds_the_gap(e in 0.0..4.0f64, theta in 0.0..1.0f64, n in 1usize..4) {
        let g = approximant_gap(&golden(2.0), e, theta, n).unwrap();
        prop_assert!(g.within_envelope(), "{:?}", g);
        prop_assert!(g.relative() <= 2.0 + 1e-12);
    }
}

#[test]
fn algebraic_residual_catches_non_unimodular_input() {
    assert!(Mat2::new(2.0, 0.0, 0.0, 2.0).cayley_hamilton_residual() > 0.1);
}

#[test]
fn gap_shrinks_as_omega_approaches_its_first_convergent() {
    // ω = [2, a] → 1/2 as a grows; at stage 1 the approximant is 1/2
    let mut last = f64::INFINITY;
    for a in [3u64, 10, 30, 100, 300] {
        let w = Frequency::from_cf(&[2, a]).unwrap();
        let p = ModelParams::cos_based(1.0, w).unwrap();
        let g = approximant_gap(&p, 1.5, 0.3, 1).unwrap();
        assert_eq!(g.stage.q, 2);
        assert!(g.log_gap < last, "a={a}: {} after {last}", g.log_gap);
        last = g.log_gap;
    }
}

#[test]
fn liouville_scales_do_not_let_solutions_decay() {
    let w = make_liouville(45.0, 12).unwrap();
    let p = ModelParams::cos_based(0.5, w).unwrap();
    assert!(criterion(&p).unwrap().met);
    let ch = cayley_hamilton_quantity(&p, 1.0, 0.0, 11).unwrap();
    assert!(ch.stage.q <= PRODUCT_BUDGET);
    assert!(ch.solution_bound >= 0.5, "{ch:?}");
    assert!(ch.gordon_residual < 1e-10);
}

#[test]
fn report_lists_stages_in_order_and_skips_oversized_ones() {
    let w = make_liouville(45.0, 12).unwrap();
    let p = ModelParams::cos_based(0.5, w).unwrap();
    let r = gordon_report(&p, 1.0, 0.0, &[11, 9, 12, 10]).unwrap();
    let qs: Vec<u64> = r.per_scale.iter().map(|s| s.q).collect();
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(r.skipped_stages, vec![12]);
    assert!(r.criterion_met && !r.degenerate);
    // the only oversized stage requested: nothing to report
    assert!(gordon_report(&p, 1.0, 0.0, &[12])
        .unwrap_err()
        .is_resource());
}

#[test]
fn criterion_threshold() {
    let c = criterion(&golden(0.5)).unwrap();
    assert_eq!(c.threshold, 20.0);
    assert!(!c.met && c.margin < 0.0);
    assert!(criterion(&golden(0.0)).unwrap().degenerate);
}
