//! The Schrödinger cocycle `A(θ,E) = [[V(θ)−E, −1], [1, 0]]` over the
//! rotation `θ ↦ θ + ω`, its products, and Lyapunov/rotation diagnostics.
//!
//! Products follow the descending order
//! `A^n(θ,E) = A(θ+(n−1)ω,E) ⋯ A(θ+ω,E) A(θ,E)`: each new factor
//! multiplies from the left. Products are renormalized by their Frobenius
//! norm after every factor, the logarithms of the scale factors being
//! accumulated separately.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sl2::{Mat2, SL2Matrix, ScaledProduct};

/// Offset of the phase grid, in units of one grid cell.
pub const PHASE_OFFSET: f64 = std::f64::consts::SQRT_2 - 1.0;
/// Default number of phases for [`finite_lyapunov`].
pub const DEFAULT_PHASES: usize = 64;
/// Default product length for [`finite_lyapunov`].
pub const DEFAULT_STEPS: usize = 100_000;

const PIVOT_FLOOR: f64 = 1e-300;

#[inline]
fn step_mat(v: f64, energy: f64) -> Mat2 {
    Mat2::new(v - energy, -1.0, 1.0, 0.0)
}

/// `A(θ,E)`.
pub fn step_matrix(params: &ModelParams, theta: f64, energy: f64) -> SL2Matrix {
    SL2Matrix::from_mat(step_mat(params.potential(theta), energy)).expect("det is exactly 1")
}

/// `A^n(θ,E)` in renormalized form.
pub fn product(params: &ModelParams, theta: f64, energy: f64, n: usize) -> Result<ScaledProduct> {
    if n == 0 {
        return Err(Error::Precondition(
            "product length must be at least 1".into(),
        ));
    }
    Ok(product_from_potential(
        params.potential_orbit(theta).take(n),
        energy,
    ))
}

pub(crate) fn product_from_potential(
    orbit: impl Iterator<Item = f64>,
    energy: f64,
) -> ScaledProduct {
    let mut acc = ScaledProduct::identity();
    for v in orbit {
        acc.push_left(&step_mat(v, energy));
    }
    acc
}

/// Phase-averaged finite-scale Lyapunov exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub value: f64,
    pub n_steps: usize,
    pub n_phases: usize,
    /// Sample standard deviation across phases over `sqrt(n_phases)`.
    pub stderr: f64,
}

/// `θ_j = (j + PHASE_OFFSET)/count`, `j = 0..count`.
pub fn phase_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| (j as f64 + PHASE_OFFSET) / count as f64)
        .collect()
}

/// `(1/n) log‖A^n(θ,E)‖` at one phase.
pub fn finite_exponent(params: &ModelParams, theta: f64, energy: f64, n: usize) -> Result<f64> {
    Ok(product(params, theta, energy, n)?.log_norm().max(0.0) / n as f64)
}

/// Averages `(1/n) log‖A^n(θ_j,E)‖` over [`phase_grid`]`(phase_grid)`.
pub fn finite_lyapunov(
    params: &ModelParams,
    energy: f64,
    n: usize,
    phase_grid_size: usize,
) -> Result<LyapunovEstimate> {
    if n == 0 || phase_grid_size == 0 {
        return Err(Error::Precondition(
            "finite_lyapunov needs n ≥ 1 and at least one phase".into(),
        ));
    }
    let samples: Vec<f64> = phase_grid(phase_grid_size)
        .into_par_iter()
        .map(|theta| {
            product_from_potential(params.potential_orbit(theta).take(n), energy)
                .log_norm()
                .max(0.0)
                / n as f64
        })
        .collect();
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let stderr = if samples.len() > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    Ok(LyapunovEstimate {
        energy,
        value: mean.max(0.0),
        n_steps: n,
        n_phases: phase_grid_size,
        stderr,
    })
}

/// Largest observed finite-scale exponent over a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub max_exponent: f64,
    pub at_energy: f64,
    pub at_theta: f64,
    pub at_n: usize,
    /// `10K + 1`, or for `K = 0` the one-step envelope `log(2 + max|V−E|)`.
    pub bound: f64,
    pub violated: bool,
    /// `K = 0`: the `10K` constant is vacuous and the one-step envelope is used.
    pub degenerate_coupling: bool,
}

/// Maximum of `(1/n) log‖A^n(θ,E)‖` over all sample triples, compared with
/// the growth envelope `10K` (plus one unit of slack).
pub fn growth_bound_check(
    params: &ModelParams,
    energies: &[f64],
    thetas: &[f64],
    lengths: &[usize],
) -> Result<GrowthReport> {
    if energies.is_empty() || thetas.is_empty() || lengths.is_empty() {
        return Err(Error::Precondition(
            "growth check needs non-empty samples".into(),
        ));
    }
    if lengths.contains(&0) {
        return Err(Error::Precondition(
            "product lengths must be positive".into(),
        ));
    }
    let (_, top) = params.positive_lyapunov_window(0.0);
    if let Some(e) = energies.iter().find(|&&e| !(e > 0.0 && e <= top)) {
        return Err(Error::Precondition(format!(
            "energy {e} outside I_(eps,K) = (0, {top}]"
        )));
    }
    let mut jobs = Vec::with_capacity(energies.len() * thetas.len() * lengths.len());
    for &e in energies {
        for &t in thetas {
            for &n in lengths {
                jobs.push((e, t, n));
            }
        }
    }
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(e, t, n)| {
            product_from_potential(params.potential_orbit(t).take(n), e)
                .log_norm()
                .max(0.0)
                / n as f64
        })
        .collect();
    let (best, &max_exponent) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty");
    let k = params.coupling();
    let degenerate = k == 0.0;
    let bound = if degenerate {
        let worst = energies.iter().map(|e| (2.0 - e).abs()).fold(0.0, f64::max);
        (2.0 + worst).ln()
    } else {
        10.0 * k.abs() + 1.0
    };
    let (at_energy, at_theta, at_n) = jobs[best];
    Ok(GrowthReport {
        max_exponent,
        at_energy,
        at_theta,
        at_n,
        bound,
        violated: max_exponent > bound,
        degenerate_coupling: degenerate,
    })
}

/// Fibered rotation number in `[0, 1/2]`.
///
/// Follows the projective action of `A^n(θ,E)` on `e₁ = (1, 0)` through the
/// Riccati variable `r_k = u_{k+1}/u_k` of the solution with `u_{-1} = 0`,
/// `u_0 = 1`. Every sign change of `u` is a half-turn of the projective
/// line; the count divided by `2n` is the rotation number.
pub fn rotation_number(params: &ModelParams, energy: f64, n: usize, theta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("rotation number needs n ≥ 1".into()));
    }
    Ok(half_turns(params.potential_orbit(theta).take(n), energy) as f64 / (2.0 * n as f64))
}

pub(crate) fn half_turns(orbit: impl Iterator<Item = f64>, energy: f64) -> usize {
    let mut r = f64::INFINITY;
    let mut count = 0;
    for v in orbit {
        r = (v - energy) - 1.0 / r;
        if r == 0.0 {
            r = PIVOT_FLOOR;
        }
        if r < 0.0 {
            count += 1;
        }
    }
    count
}
