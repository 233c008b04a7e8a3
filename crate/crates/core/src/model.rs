//! The operator family: a zero-mean analytic `f`, a coupling `K` and a
//! frequency `ω`, with potential `V(θ) = e^{K f(θ+ω)} + e^{-K f(θ)}`.

use std::f64::consts::PI;

use crate::arithmetic::Frequency;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

/// Strip half-width attached to the built-in `f`.
pub const DEFAULT_STRIP: f64 = 0.25;

const MEAN_TOL: f64 = 1e-14;
const C1_TOL: f64 = 1e-10;

/// `(f, K, ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    f: FourierSeries,
    coupling: f64,
    omega: Frequency,
    omega_value: f64,
}

/// Built-in `f(θ) = cos(2πθ)/(1+2π)`, which has `‖f‖_{C¹} = 1`.
pub fn default_f() -> FourierSeries {
    FourierSeries::cosine(DEFAULT_STRIP)
        .expect("valid strip")
        .scaled(1.0 / (1.0 + 2.0 * PI))
}

/// Rescales `f` to unit `C¹` norm.
pub fn normalize_c1(f: &FourierSeries) -> Result<FourierSeries> {
    let n = f.c1_norm();
    if n == 0.0 {
        return Err(Error::Precondition(
            "cannot normalize a zero function".into(),
        ));
    }
    Ok(f.scaled(1.0 / n))
}

impl ModelParams {
    /// Validated constructor: `f` must have zero mean and `‖f‖_{C¹} = 1`.
    pub fn new(f: FourierSeries, coupling: f64, omega: Frequency) -> Result<ModelParams> {
        let c1 = f.c1_norm();
        if (c1 - 1.0).abs() > C1_TOL {
            return Err(Error::Precondition(format!(
                "f must satisfy ‖f‖_C1 = 1 (got {c1}); see normalize_c1"
            )));
        }
        ModelParams::unnormalized(f, coupling, omega)
    }

    /// Skips the `C¹` normalization check (zero mean is still required).
    pub fn unnormalized(f: FourierSeries, coupling: f64, omega: Frequency) -> Result<ModelParams> {
        if f.mean().abs() > MEAN_TOL {
            return Err(Error::Precondition(format!(
                "f must have zero mean, got ĉ_0 = {:e}",
                f.mean()
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::Domain(format!(
                "coupling must be finite, got {coupling}"
            )));
        }
        let omega_value = omega.value();
        Ok(ModelParams {
            f,
            coupling,
            omega,
            omega_value,
        })
    }

    /// The built-in `f` with the given coupling and frequency.
    pub fn cos_based(coupling: f64, omega: Frequency) -> Result<ModelParams> {
        ModelParams::new(default_f(), coupling, omega)
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<ModelParams> {
        ModelParams::unnormalized(self.f.clone(), coupling, self.omega.clone())
    }

    pub fn with_omega(&self, omega: Frequency) -> ModelParams {
        let omega_value = omega.value();
        ModelParams {
            omega,
            omega_value,
            ..self.clone()
        }
    }

    pub fn f(&self) -> &FourierSeries {
        &self.f
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega(&self) -> &Frequency {
        &self.omega
    }

    pub fn omega_value(&self) -> f64 {
        self.omega_value
    }

    /// `V(θ) = e^{K f(θ+ω)} + e^{-K f(θ)}`.
    pub fn potential(&self, theta: f64) -> f64 {
        let k = self.coupling;
        (k * self.f.value(theta + self.omega_value)).exp() + (-k * self.f.value(theta)).exp()
    }

    /// `V` along the orbit `θ, θ+ω, θ+2ω, …`, sharing one evaluation of `f`
    /// per site.
    pub fn potential_orbit(&self, theta: f64) -> PotentialOrbit<'_> {
        PotentialOrbit {
            params: self,
            theta,
            k: 0,
            f_here: self.f.value(theta),
        }
    }

    /// `‖f‖_∞` on the real torus.
    pub fn sup_f(&self) -> f64 {
        self.f.sup_norm()
    }

    /// `I_{ε,K} = [ε, 4e^{K‖f‖_∞}]`.
    pub fn positive_lyapunov_window(&self, eps: f64) -> (f64, f64) {
        (eps, 4.0 * (self.coupling.abs() * self.sup_f()).exp())
    }
}

/// Iterator over `V(θ + kω)`, `k = 0, 1, …`.
pub struct PotentialOrbit<'a> {
    params: &'a ModelParams,
    theta: f64,
    k: u64,
    f_here: f64,
}

impl Iterator for PotentialOrbit<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let p = self.params;
        let x_next = (self.theta + (self.k + 1) as f64 * p.omega_value).rem_euclid(1.0);
        let f_next = p.f.value(x_next);
        let v = (p.coupling * f_next).exp() + (-p.coupling * self.f_here).exp();
        self.f_here = f_next;
        self.k += 1;
        Some(v)
    }
}
