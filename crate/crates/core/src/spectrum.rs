//! Finite-volume spectral analysis of `H` restricted to `{0, …, N−1}` with
//! Dirichlet boundary conditions: Sturm counts, bisection, inverse
//! iteration, decay-rate fits, spectral edges and gap profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Pivots smaller than this are replaced by `−PIVMIN` in Sturm recurrences.
const PIVMIN: f64 = 1e-290;
/// Amplitudes at or below this are ignored by [`decay_rate`].
pub const DECAY_FLOOR: f64 = 1e-12;
/// Residual above which inverse iteration is reported as stagnated.
pub const MAX_RESIDUAL: f64 = 1e-6;
/// Two eigenvalues closer than this are flagged as near-degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Multiple of the free bottom eigenvalue `2 − 2cos(π/(N+1))` allowed for
/// the finite-volume spectral minimum.
pub const EDGE_SLACK_FACTOR: f64 = 2.0;

const INVERSE_ITERATIONS: usize = 12;

/// Symmetric tridiagonal matrix with diagonal `V(θ + nω)` and constant
/// off-diagonal `−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteOperator {
    diagonal: Vec<f64>,
    theta: Option<f64>,
}

impl FiniteOperator {
    /// `H_{K,θ,ω}` truncated to `N` sites.
    pub fn build(params: &ModelParams, theta: f64, n: usize) -> Result<FiniteOperator> {
        if n < 2 {
            return Err(Error::Precondition(format!("need N ≥ 2, got {n}")));
        }
        let diagonal: Vec<f64> = params.potential_orbit(theta).take(n).collect();
        Ok(FiniteOperator {
            diagonal,
            theta: Some(theta),
        })
    }

    /// An arbitrary diagonal with the same `−1` off-diagonal.
    pub fn from_diagonal(diagonal: Vec<f64>) -> Result<FiniteOperator> {
        if diagonal.len() < 2 {
            return Err(Error::Precondition("need at least two sites".into()));
        }
        if diagonal.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("non-finite diagonal entry".into()));
        }
        Ok(FiniteOperator {
            diagonal,
            theta: None,
        })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// Leading `m × m` principal block.
    pub fn truncated(&self, m: usize) -> Result<FiniteOperator> {
        if m < 2 || m > self.len() {
            return Err(Error::Precondition(format!(
                "truncation {m} not in 2..={}",
                self.len()
            )));
        }
        Ok(FiniteOperator {
            diagonal: self.diagonal[..m].to_vec(),
            theta: self.theta,
        })
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let lo = self.diagonal.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self
            .diagonal
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo - 2.0, hi + 2.0)
    }

    /// `Hv`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s -= v[i - 1];
                }
                if i + 1 < n {
                    s -= v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `e`.
    pub fn count_below(&self, e: f64) -> usize {
        let mut q = 1.0;
        let mut count = 0;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = if i == 0 { d - e } else { (d - e) - 1.0 / q };
            if q.abs() < PIVMIN {
                q = -PIVMIN;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `(1/N) log|det(H − e)|` from the pivots of the `LDLᵀ` factorization.
    pub fn log_det_per_site(&self, e: f64) -> f64 {
        let mut q = 1.0;
        let mut acc = 0.0;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = if i == 0 { d - e } else { (d - e) - 1.0 / q };
            if q.abs() < PIVMIN {
                q = -PIVMIN;
            }
            acc += q.abs().ln();
        }
        acc / self.len() as f64
    }

    /// The `j`-th eigenvalue (0-based) inside `[lo, hi]`, which must bracket it.
    fn bisect_index(&self, j: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `j`-th eigenvalue (0-based, ascending) to width `tol`.
    pub fn eigenvalue(&self, j: usize, tol: f64) -> Result<f64> {
        if j >= self.len() {
            return Err(Error::Precondition(format!(
                "index {j} out of range for N = {}",
                self.len()
            )));
        }
        let (lo, hi) = self.gershgorin();
        Ok(self.bisect_index(j, lo, hi, tol))
    }

    /// All eigenvalues in `[a, b)`, ascending, to width `tol`.
    pub fn eigenvalues_in(&self, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
        if !(a < b) || !(tol > 0.0) {
            return Err(Error::Precondition(format!(
                "need a < b and tol > 0 (got [{a}, {b}], tol {tol})"
            )));
        }
        let (ca, cb) = (self.count_below(a), self.count_below(b));
        Ok((ca..cb)
            .into_par_iter()
            .map(|j| self.bisect_index(j, a, b, tol))
            .collect())
    }

    /// Eigenvector for an eigenvalue approximated by `e`, by inverse
    /// iteration with shift `e`.
    pub fn eigenpair(&self, e: f64) -> Result<EigenPair> {
        let n = self.len();
        let lu = ShiftedLu::new(self, e);
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin())
            .collect();
        normalize(&mut v);
        let mut residual = f64::INFINITY;
        let mut value = e;
        for _ in 0..INVERSE_ITERATIONS {
            let mut w = lu.solve(&v);
            if !normalize(&mut w) {
                return Err(Error::Convergence(
                    "inverse iteration produced a null vector".into(),
                ));
            }
            v = w;
            let hv = self.apply(&v);
            value = dot(&v, &hv);
            residual = hv
                .iter()
                .zip(&v)
                .map(|(h, x)| (h - value * x).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < 1e-13 * (1.0 + value.abs()) {
                break;
            }
        }
        if !(residual <= MAX_RESIDUAL) {
            return Err(Error::Convergence(format!(
                "inverse iteration at E = {e} stagnated with residual {residual:e}"
            )));
        }
        let near_degenerate = self.count_below(value + DEGENERACY_GAP)
            - self.count_below(value - DEGENERACY_GAP)
            >= 2;
        Ok(EigenPair {
            value,
            vector: v,
            residual,
            near_degenerate,
        })
    }

    /// Eigenvalues in `[a, b)` with residuals and decay fits.
    pub fn analyze(&self, a: f64, b: f64, tol: f64) -> Result<SpectrumResult> {
        let values = self.eigenvalues_in(a, b, tol)?;
        let pairs: Vec<Result<EigenPair>> = values.par_iter().map(|&e| self.eigenpair(e)).collect();
        let mut out = SpectrumResult {
            eigenvalues: Vec::with_capacity(values.len()),
            residuals: Vec::with_capacity(values.len()),
            decay: Vec::with_capacity(values.len()),
        };
        for (e, pair) in values.into_iter().zip(pairs) {
            let pair = pair?;
            out.eigenvalues.push(e);
            out.residuals.push(pair.residual_at(self, e));
            out.decay.push(decay_rate(&pair.vector)?);
        }
        Ok(out)
    }
}

/// Result of [`FiniteOperator::eigenpair`].
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    /// Rayleigh quotient of the returned vector.
    pub value: f64,
    /// Unit vector.
    pub vector: Vec<f64>,
    /// `‖Hv − value·v‖`.
    pub residual: f64,
    pub near_degenerate: bool,
}

impl EigenPair {
    /// `‖Hv − e·v‖` for a different reference energy.
    pub fn residual_at(&self, op: &FiniteOperator, e: f64) -> f64 {
        op.apply(&self.vector)
            .iter()
            .zip(&self.vector)
            .map(|(h, x)| (h - e * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Eigenvalues with per-pair diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub decay: Vec<DecayFit>,
}

/// Exponential fit `|v_n| ≈ C e^{−rate·|n − argmax|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit.
    pub quality: f64,
    pub points: usize,
}

/// Least-squares slope of `log|v_n|` against `|n − argmax|` over the sites
/// with `|v_n| > DECAY_FLOOR`, leaving out 10% of the vector at each end.
pub fn decay_rate(v: &[f64]) -> Result<DecayFit> {
    let n = v.len();
    if n < 50 {
        return Err(Error::Precondition(format!(
            "decay fit needs at least 50 entries, got {n}"
        )));
    }
    let peak = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .expect("non-empty");
    let buffer = n / 10;
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0, 0usize);
    for (i, &x) in v.iter().enumerate().take(n - buffer).skip(buffer) {
        let a = x.abs();
        if a <= DECAY_FLOOR {
            continue;
        }
        let d = i.abs_diff(peak) as f64;
        let y = a.ln();
        sx += d;
        sy += y;
        sxx += d * d;
        sxy += d * y;
        syy += y * y;
        m += 1;
    }
    if m < 3 {
        return Ok(DecayFit {
            rate: 0.0,
            quality: 0.0,
            points: m,
        });
    }
    let mf = m as f64;
    let cov = sxy - sx * sy / mf;
    let varx = sxx - sx * sx / mf;
    let vary = syy - sy * sy / mf;
    if varx <= 0.0 {
        return Ok(DecayFit {
            rate: 0.0,
            quality: 0.0,
            points: m,
        });
    }
    let slope = cov / varx;
    let quality = if vary > 0.0 {
        (cov * cov / (varx * vary)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        rate: (-slope).max(0.0),
        quality,
        points: m,
    })
}

/// Extreme finite-volume eigenvalues over a family of phases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEdges {
    pub min: f64,
    pub max: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    pub n: usize,
}

/// `EDGE_SLACK_FACTOR · (2 − 2cos(π/(N+1)))`: allowed excess of the
/// finite-volume minimum over the infinite-volume bottom `0`.
pub fn edge_slack(n: usize) -> f64 {
    EDGE_SLACK_FACTOR * 2.0 * (1.0 - (std::f64::consts::PI / (n as f64 + 1.0)).cos())
}

/// Lowest and highest eigenvalue of `H` truncated to `N` sites, over the
/// given phases.
pub fn spectral_edges(params: &ModelParams, thetas: &[f64], n: usize) -> Result<SpectralEdges> {
    if n < 100 {
        return Err(Error::Precondition(format!(
            "spectral edges need N ≥ 100, got {n}"
        )));
    }
    if thetas.is_empty() {
        return Err(Error::Precondition("no phases given".into()));
    }
    let per: Vec<Result<(f64, f64)>> = thetas
        .par_iter()
        .map(|&t| {
            let op = FiniteOperator::build(params, t, n)?;
            let tol = 1e-13;
            Ok((op.eigenvalue(0, tol)?, op.eigenvalue(n - 1, tol)?))
        })
        .collect();
    let mut edges = SpectralEdges {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        min_theta: thetas[0],
        max_theta: thetas[0],
        n,
    };
    for (&t, r) in thetas.iter().zip(per) {
        let (lo, hi) = r?;
        if lo < edges.min {
            edges.min = lo;
            edges.min_theta = t;
        }
        if hi > edges.max {
            edges.max = hi;
            edges.max_theta = t;
        }
    }
    Ok(edges)
}

/// A maximal eigenvalue-free run of resolution cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gap {
    pub center: f64,
    pub width: f64,
}

/// Maximal subintervals of `[a, b]`, on a grid of cells of width
/// `resolution`, that contain no eigenvalue of any of the operators.
pub fn gap_profile_of(ops: &[FiniteOperator], a: f64, b: f64, resolution: f64) -> Result<Vec<Gap>> {
    if !(resolution > 0.0) || !(a < b) {
        return Err(Error::Precondition(format!(
            "need resolution > 0 and a < b (got {resolution}, [{a}, {b}])"
        )));
    }
    let cells = ((b - a) / resolution).ceil() as usize;
    let edges: Vec<f64> = (0..=cells)
        .map(|i| {
            if i == cells {
                b
            } else {
                a + i as f64 * resolution
            }
        })
        .collect();
    let occupied: Vec<bool> = (0..cells)
        .into_par_iter()
        .map(|i| {
            ops.iter()
                .any(|op| op.count_below(edges[i + 1]) > op.count_below(edges[i]))
        })
        .collect();
    let mut gaps = Vec::new();
    let mut start = None;
    for (i, &occ) in occupied.iter().chain(std::iter::once(&true)).enumerate() {
        match (occ, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                let (lo, hi) = (edges[s], edges[i.min(cells)]);
                gaps.push(Gap {
                    center: 0.5 * (lo + hi),
                    width: hi - lo,
                });
                start = None;
            }
            _ => {}
        }
    }
    Ok(gaps)
}

/// [`gap_profile_of`] for `H` truncated to `N` sites at each phase.
pub fn gap_profile(
    params: &ModelParams,
    thetas: &[f64],
    n: usize,
    a: f64,
    b: f64,
    resolution: f64,
) -> Result<Vec<Gap>> {
    let ops = thetas
        .iter()
        .map(|&t| FiniteOperator::build(params, t, n))
        .collect::<Result<Vec<_>>>()?;
    gap_profile_of(&ops, a, b, resolution)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> bool {
    let n = dot(v, v).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// `H − e` factored as `PLU` with partial pivoting; `U` has two
/// superdiagonals.
struct ShiftedLu {
    l: Vec<f64>,
    swap: Vec<bool>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl ShiftedLu {
    fn new(op: &FiniteOperator, e: f64) -> ShiftedLu {
        let n = op.len();
        let scale = op
            .diagonal
            .iter()
            .map(|d| (d - e).abs())
            .fold(2.0, f64::max);
        let tiny = scale * f64::EPSILON;
        let mut l = vec![0.0; n];
        let mut swap = vec![false; n];
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        // current row i: (diag, super); pending sub-diagonal of row i+1 is −1
        let mut d = op.diagonal[0] - e;
        let mut s = if n > 1 { -1.0 } else { 0.0 };
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if d.abs() < tiny { tiny } else { d };
                break;
            }
            let below_sub: f64 = -1.0;
            let below_diag = op.diagonal[i + 1] - e;
            let below_sup = if i + 2 < n { -1.0 } else { 0.0 };
            if below_sub.abs() > d.abs() {
                swap[i] = true;
                u0[i] = below_sub;
                u1[i] = below_diag;
                u2[i] = below_sup;
                let m = d / below_sub;
                l[i] = m;
                d = s - m * below_diag;
                s = -m * below_sup;
            } else {
                let piv = if d.abs() < tiny { tiny } else { d };
                u0[i] = piv;
                u1[i] = s;
                u2[i] = 0.0;
                let m = below_sub / piv;
                l[i] = m;
                d = below_diag - m * s;
                s = below_sup;
            }
        }
        ShiftedLu {
            l,
            swap,
            u0,
            u1,
            u2,
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut y = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.l[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut r = y[i];
            if i + 1 < n {
                r -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                r -= self.u2[i] * x[i + 2];
            }
            x[i] = r / self.u0[i];
        }
        x
    }
}
