use nalgebra::DMatrix;
use proptest::collection::vec;
use proptest::prelude::*;
use qpcocycle::cocycle::{finite_lyapunov, phase_grid};
use qpcocycle::spectrum::{
    decay_rate, edge_slack, gap_profile, gap_profile_of, spectral_edges, FiniteOperator,
};
use qpcocycle::{Frequency, ModelParams};

fn golden(k: f64) -> ModelParams {
    ModelParams::cos_based(k, Frequency::golden()).unwrap()
}

fn dense_eigenvalues(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            d[i]
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        }
    });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn bisection_matches_dense_solver(d in vec(-20.0..20.0f64, 2..40)) {
        let op = FiniteOperator::from_diagonal(d.clone()).unwrap();
        let (lo, hi) = op.gershgorin();
        let ours = op.eigenvalues_in(lo, hi + 1e-9, 1e-13).unwrap();
        let dense = dense_eigenvalues(&d);
        prop_assert_eq!(ours.len(), dense.len());
        for (a, b) in ours.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn sturm_count_agrees_with_eigenvalues(d in vec(-5.0..5.0f64, 2..60), e in -8.0..8.0f64) {
        let op = FiniteOperator::from_diagonal(d.clone()).unwrap();
        let below = dense_eigenvalues(&d).iter().filter(|&&x| x < e).count();
        // an eigenvalue within rounding of e may land on either side
        let close = dense_eigenvalues(&d).iter().any(|x| (x - e).abs() < 1e-10);
        prop_assume!(!close);
        prop_assert_eq!(op.count_below(e), below);
        let (lo, _) = op.gershgorin();
        prop_assert_eq!(op.eigenvalues_in(lo.min(e) - 1.0, e, 1e-12).unwrap().len(), below);
    }

    #[test]
    fn cauchy_interlacing(d in vec(-6.0..6.0f64, 3..50)) {
        let big = FiniteOperator::from_diagonal(d.clone()).unwrap();
        let small = big.truncated(d.len() - 1).unwrap();
        let outer = dense_eigenvalues(&d);
        let inner: Vec<f64> = {
            let (lo, hi) = small.gershgorin();
            small.eigenvalues_in(lo, hi + 1e-9, 1e-13).unwrap()
        };
        for (i, mu) in inner.iter().enumerate() {
            prop_assert!(outer[i] <= mu + 1e-10 && *mu <= outer[i + 1] + 1e-10);
        }
    }

    #[test]
    fn eigenpairs_have_small_residuals(theta in 0.0..1.0f64, j in 0usize..200) {
        let op = FiniteOperator::build(&golden(2.0), theta, 200).unwrap();
        let e = op.eigenvalue(j, 1e-13).unwrap();
        let pair = op.eigenpair(e).unwrap();
        prop_assert!(pair.residual_at(&op, e) < 1e-8);
        let norm: f64 = pair.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn free_chain_eigenvalues() {
    let n = 300;
    let op = FiniteOperator::from_diagonal(vec![2.0; n]).unwrap();
    for j in [0, 1, 150, 299] {
        let exact = 2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
        assert!((op.eigenvalue(j, 1e-14).unwrap() - exact).abs() < 1e-12);
    }
    assert!((op.eigenvalue(0, 1e-14).unwrap() - edge_slack(n) / 2.0).abs() < 1e-12);
}

#[test]
fn edges_for_moderate_coupling() {
    let p = golden(3.0);
    let edges = spectral_edges(&p, &phase_grid(8), 2000).unwrap();
    assert!(
        edges.min >= -1e-8 && edges.min <= edge_slack(2000),
        "{edges:?}"
    );
    let ratio = edges.max / (3.0 * p.sup_f()).exp();
    assert!((0.25..=4.0).contains(&ratio), "{ratio}");
    assert!(spectral_edges(&p, &[0.1], 50).is_err());
}

#[test]
fn eigenvectors_decay_at_the_lyapunov_rate() {
    // the upper part of the K = 8 spectrum has L between 0.4 and 0.6
    let p = golden(8.0);
    let op = FiniteOperator::build(&p, 0.21, 1500).unwrap();
    let (_, hi) = op.gershgorin();
    let res = op.analyze(4.3, hi, 1e-12).unwrap();
    assert!(res.eigenvalues.len() > 20);
    let mut checked = 0;
    for (e, fit) in res.eigenvalues.iter().zip(&res.decay).step_by(7) {
        if fit.quality < 0.9 || fit.points < 100 {
            continue;
        }
        let l = finite_lyapunov(&p, *e, 50_000, 8).unwrap().value;
        assert!(l > 0.3);
        assert!(
            (fit.rate - l).abs() < 0.25 * l,
            "E={e}: rate {} vs L {l}",
            fit.rate
        );
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} eigenvectors fit well");
}

#[test]
fn interior_localized_state_at_intermediate_coupling() {
    // for the normalized cosine almost all of the K = 4 spectrum has L ≈ 0;
    // positive exponents only appear near the top, so check the eigenvalue
    // there with the largest exponent
    let p = golden(4.0);
    let op = FiniteOperator::build(&p, 0.13, 3000).unwrap();
    let values = op.eigenvalues_in(3.9, 5.0, 1e-12).unwrap();
    let (e, l) = values
        .iter()
        .map(|&e| (e, finite_lyapunov(&p, e, 20_000, 8).unwrap().value))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(l > 0.03, "largest sampled L {l} at {e}");
    let fit = decay_rate(&op.eigenpair(e).unwrap().vector).unwrap();
    assert!(
        (fit.rate - l).abs() < 0.3 * l,
        "rate {} vs L {l} at E={e}",
        fit.rate
    );
}

#[test]
fn decay_fit_recovers_exponential_profile() {
    let v: Vec<f64> = (0..400)
        .map(|i| (-0.3 * (i as f64 - 170.0).abs()).exp())
        .collect();
    let fit = decay_rate(&v).unwrap();
    assert!((fit.rate - 0.3).abs() < 1e-9 && fit.quality > 0.999);
    assert!(decay_rate(&v[..40]).is_err());
}

#[test]
fn wide_gaps_are_stable_in_volume() {
    let p = golden(4.0);
    let thetas = phase_grid(4);
    let wide = |n| -> Vec<(f64, f64)> {
        gap_profile(&p, &thetas, n, 0.0, 8.0, 0.02)
            .unwrap()
            .into_iter()
            .filter(|g| g.width > 0.3)
            .map(|g| (g.center, g.width))
            .collect()
    };
    let (a, b) = (wide(1000), wide(2000));
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    for ((c1, w1), (c2, w2)) in a.iter().zip(&b) {
        assert!((c1 - c2).abs() < 0.1 && (w1 - w2).abs() < 0.15 * w1);
    }
}

#[test]
fn gap_profile_of_a_two_level_system() {
    let op = FiniteOperator::from_diagonal(vec![0.0, 0.0]).unwrap();
    // eigenvalues ±1
    let gaps = gap_profile_of(&[op], -3.1, 2.9, 0.25).unwrap();
    let widths: Vec<f64> = gaps.iter().map(|g| g.width).collect();
    assert_eq!(widths.len(), 3);
    for (w, expected) in widths.iter().zip([2.0, 1.75, 1.75]) {
        assert!((w - expected).abs() < 1e-12, "{widths:?}");
    }
    assert!(gap_profile_of(&[], 1.0, 0.0, 0.1).is_err());
}

#[test]
fn near_degenerate_pairs_are_flagged() {
    // two identical free chains of 100 sites behind a wall
    let mut d = vec![0.0; 201];
    d[100] = 1e9;
    let op = FiniteOperator::from_diagonal(d).unwrap();
    let e = op.eigenvalue(0, 1e-14).unwrap();
    assert!(op.eigenpair(e).unwrap().near_degenerate);
}
