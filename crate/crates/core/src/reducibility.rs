//! Explicit reduction of the cocycle at `E = 0` to a constant parabolic
//! matrix.
//!
//! With `g` solving `g(θ+ω) − g(θ) = f(θ+ω)`, put
//! `k(θ) = −e^{−Kg(θ−ω) − Kg(θ)}`, `k̂` its mean, and `h` the solution of
//! `h(θ+ω) − h(θ) = k̂ − k(θ)`. Then
//!
//! ```text
//! C(θ) = [[1, h(θ)], [0, 1]] · [[0, e^{−Kg(θ−ω)}], [−e^{Kg(θ−ω)}, e^{Kg(θ)}]]
//! ```
//!
//! satisfies `C(θ+ω) A(θ,0) C(θ)^{−1} = A₀ = [[1, k̂], [0, 1]]`, and for
//! `E ≠ 0` the conjugated cocycle is `A₀ + E·F(θ)` with
//! `F(θ) = C(θ+ω) diag(−1, 0) C(θ)^{−1}`.
//!
//! Both homological equations are solved by dividing Fourier coefficients by
//! `e^{2πikω} − 1`. Each solve loses `β` of strip width in the analysis; the
//! declared widths here subtract the finite-stage proxy for `β`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arithmetic::Frequency;
use crate::cocycle::{finite_lyapunov, rotation_number, LyapunovEstimate};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::model::ModelParams;
use crate::sl2::{Mat2, SL2Matrix};

/// Default floor for `|e^{2πikω} − 1|`.
pub const DEFAULT_DIVISOR_FLOOR: f64 = 1e-10;
/// Grid used for residual checks and strip norms.
pub const CHECK_GRID: usize = 4096;
/// Lyapunov estimates above this are flagged by [`subcritical_probe`].
pub const SUBCRITICAL_FLAG: f64 = 0.05;

const MEAN_TOL: f64 = 1e-12;

/// How the right-hand side enters the cohomological equation
/// `u(θ+ω) − u(θ) = ·`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsForm {
    /// `r(θ + ω)`: `û_k = r̂_k e^{2πikω} / (e^{2πikω} − 1)`.
    Shifted,
    /// `r(θ)`: `û_k = r̂_k / (e^{2πikω} − 1)`.
    Plain,
}

/// `e^{2πikω}` and `e^{2πikω} − 1`, with the small difference computed from
/// the exact distance of `kω` to the integers.
fn mode_factors(omega: &Frequency, omega_value: f64, k: i64) -> (Complex64, Complex64, f64) {
    let x = (k as f64 * omega_value).rem_euclid(1.0);
    let signed = if x > 0.5 { x - 1.0 } else { x };
    let exact = omega.dist_to_int(k.unsigned_abs());
    let s = if signed < 0.0 { -exact } else { exact };
    let rot = Complex64::from_polar(1.0, 2.0 * PI * s);
    // e^{2πis} − 1 = 2i sin(πs) e^{iπs}
    let diff = Complex64::new(0.0, 2.0 * (PI * s).sin()) * Complex64::from_polar(1.0, PI * s);
    (rot, diff, 2.0 * (PI * exact).sin())
}

/// Solves `u(θ+ω) − u(θ) = r(θ+ω)` or `= r(θ)` with `û_0 = 0`.
///
/// The output strip is the input strip minus the finite-stage `β` proxy of
/// `ω`, and the Cauchy decay bound is re-checked at that width.
pub fn solve_homological(
    rhs: &FourierSeries,
    omega: &Frequency,
    form: RhsForm,
    divisor_floor: f64,
) -> Result<FourierSeries> {
    if !(divisor_floor > 0.0) {
        return Err(Error::Precondition(format!(
            "divisor floor must be positive, got {divisor_floor}"
        )));
    }
    let scale = rhs.max_coeff().max(1.0);
    if rhs.mean().abs() > MEAN_TOL * scale {
        return Err(Error::Precondition(format!(
            "right-hand side has mean {:e}; the equation is not solvable",
            rhs.mean()
        )));
    }
    let omega_value = omega.value();
    let mut modes = Vec::with_capacity(rhs.order() + 1);
    for (k, r) in rhs.modes().filter(|&(k, _)| k > 0) {
        if r.norm() == 0.0 {
            modes.push((k, Complex64::new(0.0, 0.0)));
            continue;
        }
        let (rot, diff, size) = mode_factors(omega, omega_value, k);
        if !(size >= divisor_floor) {
            return Err(Error::SmallDivisor {
                k,
                divisor: size,
                floor: divisor_floor,
                nearest_q: omega.nearest_convergent_q(k),
            });
        }
        let u = match form {
            RhsForm::Shifted => r * rot / diff,
            RhsForm::Plain => r / diff,
        };
        modes.push((k, u));
    }
    let beta = omega.beta_proxy()?.value;
    let width = rhs.strip_h() - beta;
    if !(width > 0.0) {
        return Err(Error::Domain(format!(
            "strip {} does not cover the loss β ≈ {beta}",
            rhs.strip_h()
        )));
    }
    let out = FourierSeries::from_modes(&modes, width)?;
    let cert = out.decay_certificate(0.0f64.max(width * (1.0 - 1e-9)))?;
    if !cert.holds {
        return Err(Error::Resolution(format!(
            "solution fails the decay bound at width {width} (ratio {})",
            cert.worst_ratio
        )));
    }
    Ok(out)
}

/// `sup_θ |u(θ+ω) − u(θ) − rhs(θ)|` over [`CHECK_GRID`] points, relative
/// to `sup|u|` (zero when both vanish).
pub fn homological_residual(u: &FourierSeries, rhs: impl Fn(f64) -> f64, omega: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..CHECK_GRID {
        let t = j as f64 / CHECK_GRID as f64;
        worst = worst.max((u.value(t + omega) - u.value(t) - rhs(t)).abs());
    }
    let norm = u.sup_norm();
    if worst == 0.0 {
        0.0
    } else if norm == 0.0 {
        f64::INFINITY
    } else {
        worst / norm
    }
}

/// Sup-norms of `C` and `F` on the narrowest strip of the budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjugationNorms {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjugationResiduals {
    /// Relative residual of the equation for `g`.
    pub hom1: f64,
    /// Relative residual of the equation for `h`.
    pub hom2: f64,
    /// `sup_θ ‖C(θ+ω)A(θ,0)C(θ)^{−1} − A₀‖_F`.
    pub conj: f64,
}

/// JSON summary of a [`Conjugation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugationReport {
    pub k_hat: f64,
    pub strip_budget: [f64; 3],
    pub beta_proxy: f64,
    pub norms: ConjugationNorms,
    pub residuals: ConjugationResiduals,
}

/// The reducing conjugacy at `E = 0` and its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Conjugation {
    g: FourierSeries,
    h: FourierSeries,
    k: FourierSeries,
    k_hat: f64,
    coupling: f64,
    omega: f64,
    beta_proxy: f64,
    strip_budget: [f64; 3],
    norms: ConjugationNorms,
    residuals: ConjugationResiduals,
}

/// Runs the chain `g → k → k̂ → h` and assembles `C`.
pub fn build_conjugation(params: &ModelParams, divisor_floor: f64) -> Result<Conjugation> {
    let f = params.f();
    let omega = params.omega();
    let w = params.omega_value();
    let kk = params.coupling();

    let beta_proxy = omega.beta_proxy().map_err(|e| e.in_stage("beta"))?.value;
    let h0 = f.strip_h();
    let strip_budget = [h0, h0 - beta_proxy, h0 - 2.0 * beta_proxy];

    let g = solve_homological(f, omega, RhsForm::Shifted, divisor_floor)
        .map_err(|e| e.in_stage("g"))?;

    // exponent −K(g(θ−ω) + g(θ)) assembled coefficient-wise
    let exponent = g.shifted(-w).plus(&g).scaled(-kk);
    let k = exponent
        .exp_of_series(1.0, exponent.min_grid())
        .map_err(|e| e.in_stage("k"))?
        .scaled(-1.0);
    let k_hat = k.mean();
    let rhs = k.scaled(-1.0).plus_constant(k_hat);
    let h = solve_homological(&rhs, omega, RhsForm::Plain, divisor_floor)
        .map_err(|e| e.in_stage("h"))?;

    let hom1 = homological_residual(&g, |t| f.value(t + w), w);
    let hom2 = homological_residual(&h, |t| k_hat - k.value(t), w);

    let mut conj = Conjugation {
        g,
        h,
        k,
        k_hat,
        coupling: kk,
        omega: w,
        beta_proxy,
        strip_budget,
        norms: ConjugationNorms { c: 0.0, f: 0.0 },
        residuals: ConjugationResiduals {
            hom1,
            hom2,
            conj: 0.0,
        },
    };
    let a0 = conj.a0();
    let mut worst: f64 = 0.0;
    for j in 0..CHECK_GRID {
        let t = j as f64 / CHECK_GRID as f64;
        worst = worst.max((conj.conjugated(params, t, 0.0) - a0).frobenius());
    }
    conj.residuals.conj = worst;
    if strip_budget[2] <= 0.0 {
        return Err(Error::Domain(format!(
            "strip {h0} does not cover the double loss 2β ≈ {}",
            2.0 * beta_proxy
        ))
        .in_stage("norms"));
    }
    conj.norms = conj.strip_norms(strip_budget[2]);
    Ok(conj)
}

impl Conjugation {
    pub fn g(&self) -> &FourierSeries {
        &self.g
    }

    pub fn h(&self) -> &FourierSeries {
        &self.h
    }

    pub fn k(&self) -> &FourierSeries {
        &self.k
    }

    pub fn k_hat(&self) -> f64 {
        self.k_hat
    }

    pub fn beta_proxy(&self) -> f64 {
        self.beta_proxy
    }

    /// `[h, h − β, h − 2β]`.
    pub fn strip_budget(&self) -> [f64; 3] {
        self.strip_budget
    }

    pub fn norms(&self) -> ConjugationNorms {
        self.norms
    }

    pub fn residuals(&self) -> ConjugationResiduals {
        self.residuals
    }

    /// `A₀ = [[1, k̂], [0, 1]]`.
    pub fn a0(&self) -> Mat2 {
        Mat2::new(1.0, self.k_hat, 0.0, 1.0)
    }

    fn parts(&self, theta: f64) -> (f64, f64, f64) {
        let a = (self.coupling * self.g.value(theta - self.omega)).exp();
        let b = (self.coupling * self.g.value(theta)).exp();
        (a, b, self.h.value(theta))
    }

    /// `C(θ)`.
    pub fn c_at(&self, theta: f64) -> Mat2 {
        let (a, b, h) = self.parts(theta);
        Mat2::new(-h * a, 1.0 / a + h * b, -a, b)
    }

    /// `C(θ)^{−1}`, from the same factors.
    pub fn c_inv_at(&self, theta: f64) -> Mat2 {
        let (a, b, h) = self.parts(theta);
        Mat2::new(b, -h * b - 1.0 / a, a, -h * a)
    }

    /// `F(θ) = C(θ+ω) diag(−1, 0) C(θ)^{−1}`.
    pub fn f_at(&self, theta: f64) -> Mat2 {
        let c = self.c_at(theta + self.omega);
        let ci = self.c_inv_at(theta);
        // rank one: −(first column of C(θ+ω)) ⊗ (first row of C(θ)^{−1})
        Mat2::new(-c.a * ci.a, -c.a * ci.b, -c.c * ci.a, -c.c * ci.b)
    }

    /// `C(θ+ω) A(θ,E) C(θ)^{−1}`, computed by direct multiplication.
    pub fn conjugated(&self, params: &ModelParams, theta: f64, energy: f64) -> Mat2 {
        let v = params.potential(theta);
        let a = Mat2::new(v - energy, -1.0, 1.0, 0.0);
        self.c_at(theta + self.omega) * a * self.c_inv_at(theta)
    }

    /// `A₀ + E·F(θ)`.
    pub fn perturbed(&self, energy: f64, theta: f64) -> Mat2 {
        self.a0() + self.f_at(theta).scale(energy)
    }

    fn complex_parts(&self, theta: f64, width: f64) -> (Complex64, Complex64, Complex64) {
        let a = (self.g.eval_complex(theta - self.omega, width) * self.coupling).exp();
        let b = (self.g.eval_complex(theta, width) * self.coupling).exp();
        (a, b, self.h.eval_complex(theta, width))
    }

    /// `sup_θ ‖C(θ + i·w)‖_F` and `sup_θ ‖F(θ + i·w)‖_F`.
    pub fn strip_norms(&self, width: f64) -> ConjugationNorms {
        let mut c_sup: f64 = 0.0;
        let mut f_sup: f64 = 0.0;
        for j in 0..CHECK_GRID {
            let t = j as f64 / CHECK_GRID as f64;
            let (a, b, h) = self.complex_parts(t, width);
            let c = [-h * a, a.inv() + h * b, -a, b];
            c_sup = c_sup.max(c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
            let (a1, _, h1) = self.complex_parts(t + self.omega, width);
            let col = (h1 * a1).norm_sqr() + a1.norm_sqr();
            let row = b.norm_sqr() + (h * b + a.inv()).norm_sqr();
            f_sup = f_sup.max((col * row).sqrt());
        }
        ConjugationNorms { c: c_sup, f: f_sup }
    }

    pub fn report(&self) -> ConjugationReport {
        ConjugationReport {
            k_hat: self.k_hat,
            strip_budget: self.strip_budget,
            beta_proxy: self.beta_proxy,
            norms: self.norms,
            residuals: self.residuals,
        }
    }
}

/// `A₀ + E·F(θ)` as an `SL(2,R)` element.
pub fn perturbed_cocycle(conj: &Conjugation, energy: f64, theta: f64) -> Result<SL2Matrix> {
    SL2Matrix::from_mat(conj.perturbed(energy, theta))
}

/// Size of the perturbation `E·F` relative to `A₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub norm_a0: f64,
    /// `‖F‖` on the strip `h − 2β`.
    pub norm_f: f64,
    /// Heuristic `0.1/(‖A₀‖·‖F‖)`; not the non-constructive `ε₀`.
    pub heuristic_threshold: f64,
    pub e_max: f64,
    /// `e_max` is below the heuristic threshold.
    pub within_threshold: bool,
}

pub fn perturbation_report(conj: &Conjugation, e_max: f64) -> PerturbationReport {
    let norm_a0 = conj.a0().op_norm();
    let norm_f = conj.norms.f;
    let heuristic_threshold = 0.1 / (norm_a0 * norm_f);
    PerturbationReport {
        norm_a0,
        norm_f,
        heuristic_threshold,
        e_max,
        within_threshold: e_max.abs() < heuristic_threshold,
    }
}

/// One row of [`subcritical_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub energy: f64,
    pub lyapunov: LyapunovEstimate,
    pub rotation: f64,
    /// Lyapunov estimate above [`SUBCRITICAL_FLAG`].
    pub flagged: bool,
}

/// Lyapunov estimate and rotation number along an energy grid near the
/// bottom of the spectrum.
pub fn subcritical_probe(
    params: &ModelParams,
    energies: &[f64],
    n: usize,
    phases: usize,
) -> Result<Vec<ProbeRow>> {
    energies
        .iter()
        .map(|&e| {
            let lyapunov = finite_lyapunov(params, e, n, phases)?;
            let rotation = rotation_number(params, e, n, crate::cocycle::PHASE_OFFSET)?;
            Ok(ProbeRow {
                energy: e,
                lyapunov,
                rotation,
                flagged: lyapunov.value > SUBCRITICAL_FLAG,
            })
        })
        .collect()
}
