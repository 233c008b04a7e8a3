//! Gordon-type probes at Liouville frequencies: the `β(ω) > 40K`
//! criterion, the distance between the true cocycle and its periodic
//! approximant, and the Cayley–Hamilton three-block quantity.
//!
//! For a period-`q` cocycle, `B = A^q(θ)` satisfies `B² − tr(B)B + I = 0`,
//! which forces every unit initial vector `v` to have
//! `max(‖A^{−q}v‖, ‖A^q v‖, ‖A^{2q}v‖) ≥ 1/2`. When `ω` is extremely close to
//! `p/q` the same holds approximately, and solutions cannot decay.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::product;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sl2::{Mat2, ScaledProduct};

/// Longest product an approximant comparison may build.
pub const PRODUCT_BUDGET: u64 = 10_000_000;
/// The criterion compares `β` against `GORDON_FACTOR · K`.
pub const GORDON_FACTOR: f64 = 40.0;

/// Outcome of the `β > 40K` test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub beta_proxy: f64,
    pub threshold: f64,
    pub met: bool,
    /// `beta_proxy − 40K`.
    pub margin: f64,
    /// `K = 0`: the test reduces to `β > 0` and says nothing useful.
    pub degenerate: bool,
}

impl Criterion {
    /// The proxy is a finite-stage running max, so it can only under-report
    /// the limsup: `met` is trustworthy, `!met` is not conclusive.
    pub const CAVEAT: &'static str =
        "beta_proxy is a finite-stage lower proxy for limsup log(q_{n+1})/q_n";
}

pub fn criterion(params: &ModelParams) -> Result<Criterion> {
    let beta = params.omega().beta_proxy()?.value;
    let k = params.coupling().abs();
    let threshold = GORDON_FACTOR * k;
    Ok(Criterion {
        beta_proxy: beta,
        threshold,
        met: beta > threshold,
        margin: beta - threshold,
        degenerate: k == 0.0,
    })
}

/// Stage-`n` data: the convergent `p/q` and `|ω − p/q|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub n: usize,
    pub p: u64,
    pub q: u64,
    pub distance: f64,
}

fn stage(params: &ModelParams, n_stage: usize) -> Result<(Stage, ModelParams)> {
    if n_stage == 0 {
        return Err(Error::Precondition("stages are numbered from 1".into()));
    }
    let omega = params.omega();
    let conv = omega.convergents(n_stage)?;
    let c = &conv[n_stage - 1];
    let q =
        c.q.to_u64()
            .filter(|&q| q <= PRODUCT_BUDGET)
            .ok_or_else(|| {
                Error::Resource(format!(
            "q_{n_stage} has {} bits; products beyond length {PRODUCT_BUDGET} are not built",
            c.q.bits()
        ))
            })?;
    let p = c.p.to_u64().expect("p ≤ q");
    let approx = params.with_omega(omega.truncated(n_stage)?);
    Ok((
        Stage {
            n: n_stage,
            p,
            q,
            distance: omega.dist_to_int(q) / q as f64,
        },
        approx,
    ))
}

/// `A_ω^q(θ,E)` against `A_{p/q}^q(θ,E)`, all in log form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproximantGap {
    pub stage: Stage,
    /// `log ‖A_ω^q − A_{p/q}^q‖` (−∞ when the products coincide).
    pub log_gap: f64,
    /// `log_gap − log max(‖A_ω^q‖, ‖A_{p/q}^q‖)`.
    pub log_relative: f64,
    /// `log(q · e^{10Kq} · |ω − p/q|)`.
    pub log_envelope: f64,
}

impl ApproximantGap {
    /// Relative gap `e^{log_relative}`, in `[0, 2]`.
    pub fn relative(&self) -> f64 {
        self.log_relative.exp()
    }

    pub fn within_envelope(&self) -> bool {
        self.log_gap <= self.log_envelope
    }
}

fn log_difference(x: &ScaledProduct, y: &ScaledProduct) -> f64 {
    let s = x.log_scale.max(y.log_scale);
    let d = x.matrix.scale((x.log_scale - s).exp()) - y.matrix.scale((y.log_scale - s).exp());
    s + d.op_norm().ln()
}

pub fn approximant_gap(
    params: &ModelParams,
    energy: f64,
    theta: f64,
    n_stage: usize,
) -> Result<ApproximantGap> {
    let (st, approx) = stage(params, n_stage)?;
    let q = st.q as usize;
    let true_prod = product(params, theta, energy, q)?;
    let periodic = product(&approx, theta, energy, q)?;
    let log_gap = log_difference(&true_prod, &periodic);
    let scale = true_prod.log_norm().max(periodic.log_norm());
    let k = params.coupling().abs();
    Ok(ApproximantGap {
        stage: st,
        log_gap,
        log_relative: log_gap - scale,
        log_envelope: (st.q as f64).ln() + 10.0 * k * st.q as f64 + st.distance.ln(),
    })
}

/// The Cayley–Hamilton quantities at one stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChQuantity {
    pub stage: Stage,
    /// `‖B² − tr(B)B + I‖/(1 + ‖B‖²)` for `B = A^q(θ)`: pure algebra.
    pub algebraic_residual: f64,
    /// `‖A^{2q}(θ) − tr(B)B + I‖/(1 + ‖B‖²)`: zero for exactly periodic input.
    pub gordon_residual: f64,
    /// `min_{v ∈ {e₁, e₂}} max(‖A^{−q}v‖, ‖A^q v‖, ‖A^{2q}v‖)`.
    pub solution_bound: f64,
}

fn mat(p: ScaledProduct) -> Result<Mat2> {
    Ok(p.to_sl2()?.mat())
}

pub fn cayley_hamilton_quantity(
    params: &ModelParams,
    energy: f64,
    theta: f64,
    n_stage: usize,
) -> Result<ChQuantity> {
    let (st, _) = stage(params, n_stage)?;
    let q = st.q as usize;
    let w = params.omega_value();
    let b = mat(product(params, theta, energy, q)?)?;
    let b2 = mat(product(params, theta, energy, 2 * q)?)?;
    let back = mat(product(params, theta - q as f64 * w, energy, q)?)?.adjugate();
    let scale = 1.0 + b.frobenius().powi(2);
    let gordon = (b2 - b.scale(b.trace()) + Mat2::IDENTITY).frobenius() / scale;
    let norm = |m: &Mat2, v: [f64; 2]| {
        let x = m.apply(v);
        x[0].hypot(x[1])
    };
    let bound = [[1.0, 0.0], [0.0, 1.0]]
        .iter()
        .map(|&v| norm(&back, v).max(norm(&b, v)).max(norm(&b2, v)))
        .fold(f64::INFINITY, f64::min);
    Ok(ChQuantity {
        stage: st,
        algebraic_residual: b.cayley_hamilton_residual(),
        gordon_residual: gordon,
        solution_bound: bound,
    })
}

/// One row of [`GordonReport::per_scale`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleEntry {
    pub q: u64,
    /// Relative approximant gap, `≥ 0`.
    pub approximant_error: f64,
    /// Three-block solution lower bound.
    pub ch_quantity: f64,
    pub gordon_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GordonReport {
    #[serde(rename = "K")]
    pub coupling: f64,
    pub beta_proxy: f64,
    pub criterion_met: bool,
    pub degenerate: bool,
    pub energy: f64,
    pub theta: f64,
    /// Ordered by increasing `q`.
    pub per_scale: Vec<ScaleEntry>,
    /// Requested stages whose `q` exceeds [`PRODUCT_BUDGET`].
    pub skipped_stages: Vec<usize>,
}

/// Criterion plus per-stage probes. Stages beyond the product budget are
/// listed in `skipped_stages` as long as at least one stage was computed.
pub fn gordon_report(
    params: &ModelParams,
    energy: f64,
    theta: f64,
    stages: &[usize],
) -> Result<GordonReport> {
    let crit = criterion(params)?;
    let mut sorted = stages.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let rows: Vec<Result<ScaleEntry>> = sorted
        .par_iter()
        .map(|&n| {
            let gap = approximant_gap(params, energy, theta, n)?;
            let ch = cayley_hamilton_quantity(params, energy, theta, n)?;
            Ok(ScaleEntry {
                q: gap.stage.q,
                approximant_error: gap.relative(),
                ch_quantity: ch.solution_bound,
                gordon_residual: ch.gordon_residual,
            })
        })
        .collect();
    let mut per_scale = Vec::with_capacity(rows.len());
    let mut skipped_stages = Vec::new();
    for (&n, r) in sorted.iter().zip(rows) {
        match r {
            Ok(e) => per_scale.push(e),
            Err(e) if e.is_resource() && !per_scale.is_empty() => skipped_stages.push(n),
            Err(e) => return Err(e),
        }
    }
    Ok(GordonReport {
        coupling: params.coupling(),
        beta_proxy: crit.beta_proxy,
        criterion_met: crit.met,
        degenerate: crit.degenerate,
        energy,
        theta,
        per_scale,
        skipped_stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::Frequency;

    #[test]
    fn golden_fails_criterion() {
        let p = ModelParams::cos_based(1.0, Frequency::golden()).unwrap();
        let c = criterion(&p).unwrap();
        assert!(!c.met && !c.degenerate);
        let z = criterion(&p.with_coupling(0.0).unwrap()).unwrap();
        assert!(z.degenerate);
    }

    #[test]
    fn rational_equal_to_approximant_has_no_gap() {
        let w = Frequency::from_cf(&[2, 3, 1]).unwrap();
        let p = ModelParams::cos_based(1.5, w).unwrap();
        let g = approximant_gap(&p, 0.4, 0.2, 3).unwrap();
        assert_eq!(g.log_gap, f64::NEG_INFINITY);
        assert_eq!(g.relative(), 0.0);
    }

    #[test]
    fn periodic_input_satisfies_cayley_hamilton() {
        let w = Frequency::from_cf(&[2, 3]).unwrap();
        let p = ModelParams::cos_based(2.0, w).unwrap();
        let c = cayley_hamilton_quantity(&p, 1.3, 0.1, 2).unwrap();
        assert!(c.gordon_residual < 1e-10, "{c:?}");
        assert!(c.solution_bound >= 0.5 - 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let w = crate::arithmetic::make_liouville(45.0, 12).unwrap();
        let p = ModelParams::cos_based(1.0, w).unwrap();
        assert!(approximant_gap(&p, 1.0, 0.0, 12).unwrap_err().is_resource());
    }
}
