//! Truncated Fourier series of real-analytic functions on the torus `T = R/Z`.
//!
//! A [`FourierSeries`] stores coefficients `ĉ_k` for `|k| ≤ M` of
//! `f(θ) = Σ ĉ_k e^{2πikθ}` together with the half-width `h` of the strip
//! `|Im θ| < h` on which the function is declared analytic. Strip widths are
//! measured in the same units as `θ`, so the Cauchy estimate reads
//!
//! ```text
//! |ĉ_k| ≤ ‖f‖_w · e^{-2π w |k|},   0 ≤ w < h,
//! ```
//!
//! where `‖f‖_w = sup_{|Im θ| = w} |f(θ)|`.
//!
//! Coefficients are the primary representation. Grids are derived views,
//! used for nonlinear maps ([`FourierSeries::exp_of_series`]) and strip norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative size of the dropped tail after a grid operation.
pub const TAIL_TOL: f64 = 1e-12;
/// Largest grid a nonlinear map may grow to before giving up.
pub const MAX_GRID: usize = 1 << 20;
/// Largest imaginary part tolerated in `ĉ_0` before it is an error.
const MEAN_IMAG_TOL: f64 = 1e-12;
/// Largest Hermitian mismatch tolerated when both `ĉ_k` and `ĉ_{-k}` are given.
const HERMITIAN_TOL: f64 = 1e-12;
/// Aliasing tolerance between a grid and its doubling.
const ALIAS_TOL: f64 = 1e-12;
/// Target coefficient floor for the default truncation order.
const DEFAULT_TRUNCATION_FLOOR: f64 = 1e-14;

/// Real-valued analytic function on the torus, as a truncated Fourier series.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    /// `coeffs[i]` holds `ĉ_{i - order}`.
    coeffs: Vec<Complex64>,
    order: usize,
    strip_h: f64,
    declared_norm: Option<f64>,
}

/// Diagnostics reported by grid-based nonlinear maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDiagnostics {
    /// Grid size at which the map was accepted.
    pub grid_size: usize,
    /// Largest coefficient change between the accepted grid and its half.
    pub alias_estimate: f64,
    /// Sum of dropped coefficient magnitudes, relative to the largest one.
    pub dropped_tail: f64,
}

/// Outcome of checking `|ĉ_k| ≤ 1.01 ‖f‖_w e^{-2πw|k|}` at one width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub width: f64,
    pub strip_norm: f64,
    /// `max_k |ĉ_k| / (‖f‖_w e^{-2πw|k|})`; at most 1.01 when the certificate holds.
    pub worst_ratio: f64,
    pub holds: bool,
}

fn check_strip(strip_h: f64) -> Result<()> {
    if strip_h.is_finite() && strip_h > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "strip half-width must be positive and finite, got {strip_h}"
        )))
    }
}

/// Smallest `M` with `norm · e^{-2πhM} < 1e-14`.
pub fn default_order(declared_norm: f64, strip_h: f64) -> usize {
    if declared_norm <= DEFAULT_TRUNCATION_FLOOR {
        return 0;
    }
    let m = ((declared_norm / DEFAULT_TRUNCATION_FLOOR).ln() / (2.0 * PI * strip_h)).floor();
    m.max(0.0) as usize + 1
}

impl FourierSeries {
    fn from_parts(coeffs: Vec<Complex64>, strip_h: f64) -> FourierSeries {
        debug_assert!(coeffs.len() % 2 == 1);
        let order = coeffs.len() / 2;
        FourierSeries {
            coeffs,
            order,
            strip_h,
            declared_norm: None,
        }
    }

    /// Builds a series from `(k, ĉ_k)` pairs.
    ///
    /// Missing negative (or positive) partners are filled in by Hermitian
    /// symmetry. Partners given explicitly must agree with `ĉ_{-k} = conj(ĉ_k)`.
    pub fn from_modes(modes: &[(i64, Complex64)], strip_h: f64) -> Result<FourierSeries> {
        check_strip(strip_h)?;
        let order = modes
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let scale = 1.0 + modes.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        let mut slots: Vec<Option<Complex64>> = vec![None; 2 * order + 1];
        for &(k, c) in modes {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite coefficient at k={k}")));
            }
            let idx = (k + order as i64) as usize;
            if slots[idx].is_some() {
                return Err(Error::Parse(format!("mode k={k} given twice")));
            }
            slots[idx] = Some(c);
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        for k in 0..=order {
            let pos = slots[order + k];
            let neg = slots[order - k];
            let c = match (pos, neg) {
                (Some(p), Some(n)) => {
                    if (p - n.conj()).norm() > HERMITIAN_TOL * scale {
                        return Err(Error::Precondition(format!(
                            "coefficients at k=±{k} are not Hermitian (series would not be real)"
                        )));
                    }
                    0.5 * (p + n.conj())
                }
                (Some(p), None) => p,
                (None, Some(n)) => n.conj(),
                (None, None) => Complex64::new(0.0, 0.0),
            };
            coeffs[order + k] = c;
            coeffs[order - k] = c.conj();
        }
        project_mean(&mut coeffs, order, scale)?;
        Ok(FourierSeries::from_parts(coeffs, strip_h))
    }

    /// Builds a series from `ĉ_0, ĉ_1, …, ĉ_M`; negative modes by symmetry.
    pub fn from_nonnegative(coeffs: &[Complex64], strip_h: f64) -> Result<FourierSeries> {
        let modes: Vec<(i64, Complex64)> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as i64, c))
            .collect();
        FourierSeries::from_modes(&modes, strip_h)
    }

    /// Builds a series from a coefficient generator `k ↦ ĉ_k` (`k ≥ 0`),
    /// truncated at [`default_order`] for the declared norm.
    pub fn from_generator(
        strip_h: f64,
        declared_norm: f64,
        mut coeff: impl FnMut(usize) -> Complex64,
    ) -> Result<FourierSeries> {
        check_strip(strip_h)?;
        let order = default_order(declared_norm, strip_h);
        let cs: Vec<Complex64> = (0..=order).map(&mut coeff).collect();
        FourierSeries::from_nonnegative(&cs, strip_h)?.with_declared_norm(declared_norm)
    }

    pub fn zero(strip_h: f64) -> Result<FourierSeries> {
        FourierSeries::constant(0.0, strip_h)
    }

    pub fn constant(value: f64, strip_h: f64) -> Result<FourierSeries> {
        check_strip(strip_h)?;
        Ok(FourierSeries::from_parts(
            vec![Complex64::new(value, 0.0)],
            strip_h,
        ))
    }

    /// `cos(2πθ)`, i.e. `ĉ_{±1} = 1/2`.
    pub fn cosine(strip_h: f64) -> Result<FourierSeries> {
        FourierSeries::from_modes(&[(1, Complex64::new(0.5, 0.0))], strip_h)
    }

    /// Attaches a strip-norm bound, verifying `|ĉ_k| ≤ norm · e^{-2πh|k|}`.
    pub fn with_declared_norm(mut self, norm: f64) -> Result<FourierSeries> {
        if !(norm.is_finite() && norm >= 0.0) {
            return Err(Error::Domain(format!(
                "declared norm must be finite and ≥ 0, got {norm}"
            )));
        }
        for (k, c) in self.modes() {
            let bound = norm * (-2.0 * PI * self.strip_h * k.unsigned_abs() as f64).exp();
            if c.norm() > bound * (1.0 + 1e-12) + f64::MIN_POSITIVE {
                return Err(Error::Precondition(format!(
                    "|ĉ_{k}| = {:e} exceeds declared bound {:e}",
                    c.norm(),
                    bound
                )));
            }
        }
        self.declared_norm = Some(norm);
        Ok(self)
    }

    /// Same coefficients, new strip width. Drops the declared norm, which
    /// referred to the old width.
    pub fn with_strip(mut self, strip_h: f64) -> Result<FourierSeries> {
        check_strip(strip_h)?;
        self.strip_h = strip_h;
        self.declared_norm = None;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn strip_h(&self) -> f64 {
        self.strip_h
    }

    pub fn declared_norm(&self) -> Option<f64> {
        self.declared_norm
    }

    /// `ĉ_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.order as i64) as usize]
        }
    }

    /// Iterator over `(k, ĉ_k)` for `k = -M..=M`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.order as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - m, c))
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.order].re
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `Σ ĉ_k e^{2πik(θ + i·s)}`.
    pub fn evaluate(&self, theta: f64, imag_shift: f64) -> Result<Complex64> {
        if !(imag_shift.abs() < self.strip_h) {
            return Err(Error::Domain(format!(
                "imaginary shift {imag_shift} outside strip |Im| < {}",
                self.strip_h
            )));
        }
        Ok(self.eval_complex(theta, imag_shift))
    }

    pub(crate) fn eval_complex(&self, theta: f64, imag_shift: f64) -> Complex64 {
        let mut acc = self.coeffs[self.order];
        if self.order == 0 {
            return acc;
        }
        let (s, c) = (2.0 * PI * theta).sin_cos();
        let damp = (-2.0 * PI * imag_shift).exp();
        // e^{2πi(θ+is)} and e^{-2πi(θ+is)}
        let z = Complex64::new(c, s) * damp;
        let w = Complex64::new(c, -s) / damp;
        let mut zp = Complex64::new(1.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for k in 1..=self.order {
            zp *= z;
            wp *= w;
            acc += self.coeffs[self.order + k] * zp + self.coeffs[self.order - k] * wp;
        }
        acc
    }

    /// Real value on the real torus.
    pub fn value(&self, theta: f64) -> f64 {
        let mut acc = self.coeffs[self.order].re;
        if self.order == 0 {
            return acc;
        }
        let (s, c) = (2.0 * PI * theta).sin_cos();
        let z = Complex64::new(c, s);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=self.order {
            zp *= z;
            sum += self.coeffs[self.order + k] * zp;
        }
        acc += 2.0 * sum.re;
        acc
    }

    /// `f(θ + α)`: multiplies `ĉ_k` by `e^{2πikα}`. Exact at coefficient level.
    pub fn shifted(&self, alpha: f64) -> FourierSeries {
        let coeffs = self
            .modes()
            .map(|(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * alpha))
            .collect();
        FourierSeries::from_parts(coeffs, self.strip_h)
    }

    pub fn scaled(&self, factor: f64) -> FourierSeries {
        let coeffs = self.coeffs.iter().map(|&c| c * factor).collect();
        FourierSeries::from_parts(coeffs, self.strip_h)
    }

    /// Sum; the strip is the narrower of the two.
    pub fn plus(&self, other: &FourierSeries) -> FourierSeries {
        let order = self.order.max(other.order);
        let coeffs = (-(order as i64)..=order as i64)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        FourierSeries::from_parts(coeffs, self.strip_h.min(other.strip_h))
    }

    /// Adds a constant to `ĉ_0`.
    pub fn plus_constant(&self, value: f64) -> FourierSeries {
        let mut out = self.clone();
        out.coeffs[out.order].re += value;
        out.declared_norm = None;
        out
    }

    pub fn derivative(&self) -> FourierSeries {
        let coeffs = self
            .modes()
            .map(|(k, c)| c * Complex64::new(0.0, 2.0 * PI * k as f64))
            .collect();
        FourierSeries::from_parts(coeffs, self.strip_h)
    }

    /// Samples `f(j/n + i·s)` for `j = 0..n`. Any `n ≥ 1` works: modes beyond
    /// the grid are folded, which leaves grid values exact.
    pub fn samples(&self, n: usize, imag_shift: f64) -> Result<Vec<Complex64>> {
        if n == 0 {
            return Err(Error::Precondition("grid size must be positive".into()));
        }
        if !(imag_shift.abs() < self.strip_h) {
            return Err(Error::Domain(format!(
                "imaginary shift {imag_shift} outside strip |Im| < {}",
                self.strip_h
            )));
        }
        Ok(self.grid_values(n, imag_shift))
    }

    fn grid_values(&self, n: usize, imag_shift: f64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.modes() {
            let weight = (-2.0 * PI * k as f64 * imag_shift).exp();
            buf[k.rem_euclid(n as i64) as usize] += c * weight;
        }
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Coefficients of a real grid function, `|k| < n/2`, Hermitian-projected.
    fn grid_coefficients(values: &[f64]) -> Vec<Complex64> {
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let order = half.saturating_sub(1);
        let inv = 1.0 / n as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        for k in 0..=order {
            let pos = buf[k] * inv;
            let neg = buf[(n - k) % n] * inv;
            let c = 0.5 * (pos + neg.conj());
            coeffs[order + k] = c;
            coeffs[order - k] = c.conj();
        }
        coeffs[order].im = 0.0;
        coeffs
    }

    /// Applies a real function pointwise through a uniform grid.
    ///
    /// Starts at `grid_size` and doubles until the upper quarter-band of the
    /// grid spectrum is below [`TAIL_TOL`] and the retained coefficients agree
    /// with the previous grid to [`ALIAS_TOL`]. The result is truncated so the
    /// dropped tail sums to less than `TAIL_TOL` of the largest coefficient.
    pub fn map_on_grid(
        &self,
        func: impl Fn(f64) -> f64,
        grid_size: usize,
        out_strip: f64,
    ) -> Result<(FourierSeries, GridDiagnostics)> {
        check_strip(out_strip)?;
        if !grid_size.is_power_of_two() {
            return Err(Error::Precondition(format!(
                "grid size {grid_size} is not a power of two"
            )));
        }
        if grid_size < 4 * self.order.max(1) {
            return Err(Error::Precondition(format!(
                "grid size {grid_size} below 4x truncation order {}",
                self.order
            )));
        }
        let mut n = grid_size;
        let mut prev: Option<Vec<Complex64>> = None;
        loop {
            if n > MAX_GRID {
                return Err(Error::Resolution(format!(
                    "grid map did not resolve below tail tolerance {TAIL_TOL:e} at grid {MAX_GRID}"
                )));
            }
            let values: Vec<f64> = self
                .grid_values(n, 0.0)
                .into_iter()
                .map(|z| func(z.re))
                .collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Resolution(
                    "grid map produced non-finite values".into(),
                ));
            }
            let coeffs = FourierSeries::grid_coefficients(&values);
            let order = coeffs.len() / 2;
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let tail = (order / 2..=order)
                .map(|k| coeffs[order + k].norm())
                .fold(0.0, f64::max);
            let tail_ok = scale == 0.0 || tail <= TAIL_TOL * scale;
            let alias = prev.as_ref().map(|p| {
                let po = p.len() / 2;
                (0..=po)
                    .map(|k| (p[po + k] - coeffs[order + k]).norm())
                    .fold(0.0, f64::max)
            });
            if tail_ok {
                if let Some(alias) = alias {
                    if alias <= ALIAS_TOL * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
                        let (series, dropped) = truncate(coeffs, out_strip);
                        return Ok((
                            series,
                            GridDiagnostics {
                                grid_size: n,
                                alias_estimate: alias,
                                dropped_tail: dropped,
                            },
                        ));
                    }
                }
            }
            prev = Some(coeffs);
            n *= 2;
        }
    }

    /// Coefficients of `e^{scale·f(θ)}`; the output keeps the input strip.
    pub fn exp_of_series(&self, scale: f64, grid_size: usize) -> Result<FourierSeries> {
        self.map_on_grid(|x| (scale * x).exp(), grid_size, self.strip_h)
            .map(|(s, _)| s)
    }

    /// Smallest power-of-two grid admissible for [`Self::exp_of_series`].
    pub fn min_grid(&self) -> usize {
        (4 * self.order.max(1)).next_power_of_two().max(16)
    }

    /// `sup_θ |f(θ ± i·w)|` over a dense grid with local refinement.
    ///
    /// Hermitian symmetry gives `|f(θ - iw)| = |f(θ + iw)|`, so one side suffices.
    pub fn strip_norm(&self, at_width: f64) -> Result<f64> {
        if !(at_width >= 0.0 && at_width < self.strip_h) {
            return Err(Error::Domain(format!(
                "width {at_width} outside [0, {})",
                self.strip_h
            )));
        }
        Ok(self.sup_abs_at(at_width))
    }

    fn sup_abs_at(&self, width: f64) -> f64 {
        if self.order == 0 {
            return self.coeffs[0].norm();
        }
        let g = (64 * (self.order + 1)).next_power_of_two().max(4096);
        let vals = self.grid_values(g, width);
        sup_with_refinement(&vals, |t| self.eval_complex(t, width).norm())
    }

    /// `sup_θ |f(θ)|` on the real torus.
    pub fn sup_norm(&self) -> f64 {
        self.sup_abs_at(0.0)
    }

    /// `‖f‖_{C¹} = sup|f| + sup|f'|`.
    pub fn c1_norm(&self) -> f64 {
        self.sup_norm() + self.derivative().sup_norm()
    }

    /// Checks the Cauchy decay bound at one width against a recomputed strip norm.
    pub fn decay_certificate(&self, width: f64) -> Result<DecayCertificate> {
        let norm = self.strip_norm(width)?;
        let mut worst: f64 = 0.0;
        for (k, c) in self.modes() {
            let bound = norm * (-2.0 * PI * width * k.unsigned_abs() as f64).exp();
            let ratio = if c.norm() == 0.0 {
                0.0
            } else if bound == 0.0 {
                f64::INFINITY
            } else {
                c.norm() / bound
            };
            worst = worst.max(ratio);
        }
        Ok(DecayCertificate {
            width,
            strip_norm: norm,
            worst_ratio: worst,
            holds: worst <= 1.01,
        })
    }

    /// Largest width on an even `steps`-point ladder in `[0, h)` at which the
    /// decay certificate holds (0 if it fails everywhere).
    pub fn certified_width(&self, steps: usize) -> f64 {
        let steps = steps.max(1);
        (0..steps)
            .rev()
            .map(|i| self.strip_h * i as f64 / steps as f64)
            .find(|&w| self.decay_certificate(w).map(|c| c.holds).unwrap_or(false))
            .unwrap_or(0.0)
    }
}

fn project_mean(coeffs: &mut [Complex64], order: usize, scale: f64) -> Result<()> {
    let im = coeffs[order].im;
    if im.abs() > MEAN_IMAG_TOL * scale {
        return Err(Error::Precondition(format!(
            "mean coefficient has imaginary part {im:e}; series would not be real"
        )));
    }
    coeffs[order].im = 0.0;
    Ok(())
}

/// Drops the largest tail whose magnitudes sum below `TAIL_TOL · max|ĉ|`.
fn truncate(coeffs: Vec<Complex64>, strip_h: f64) -> (FourierSeries, f64) {
    let order = coeffs.len() / 2;
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (
            FourierSeries::from_parts(vec![Complex64::new(0.0, 0.0)], strip_h),
            0.0,
        );
    }
    let mut dropped = 0.0;
    let mut keep = order;
    for k in (1..=order).rev() {
        let pair = 2.0 * coeffs[order + k].norm();
        if dropped + pair >= TAIL_TOL * scale {
            break;
        }
        dropped += pair;
        keep = k - 1;
    }
    let kept = coeffs[order - keep..=order + keep].to_vec();
    (FourierSeries::from_parts(kept, strip_h), dropped / scale)
}

/// Max of `|vals|` over the grid, refined by golden-section search around the
/// best few samples. `eval` gives `|f|` at arbitrary θ.
pub(crate) fn sup_with_refinement(vals: &[Complex64], eval: impl Fn(f64) -> f64) -> f64 {
    let n = vals.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| vals[b].norm().total_cmp(&vals[a].norm()).then(a.cmp(&b)));
    let h = 1.0 / n as f64;
    let mut best = vals[idx[0]].norm();
    for &i in idx.iter().take(4) {
        let center = i as f64 * h;
        best = best.max(golden_max(&eval, center - h, center + h));
    }
    best
}

fn golden_max(eval: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = eval(x1);
        }
    }
    f1.max(f2)
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    h: f64,
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for FourierSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            h: self.strip_h,
            coeffs: self.modes().map(|(k, c)| (k, c.re, c.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FourierSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(deserializer)?;
        let modes: Vec<(i64, Complex64)> = raw
            .coeffs
            .iter()
            .map(|&(k, re, im)| (k, Complex64::new(re, im)))
            .collect();
        FourierSeries::from_modes(&modes, raw.h).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_series_evaluates_to_zero() {
        let z = FourierSeries::zero(0.5).unwrap();
        assert_eq!(z.evaluate(0.3, 0.1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn cosine_values() {
        let f = FourierSeries::cosine(0.5).unwrap();
        assert_abs_diff_eq!(f.evaluate(0.0, 0.0).unwrap().re, 1.0, epsilon = 1e-15);
        let quarter = f.evaluate(0.25, 0.0).unwrap();
        assert!(quarter.norm() < 1e-12);
        assert_abs_diff_eq!(f.value(0.25), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn shift_outside_strip_is_domain_error() {
        let f = FourierSeries::cosine(0.5).unwrap();
        assert!(matches!(f.evaluate(0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(f.strip_norm(0.6), Err(Error::Domain(_))));
    }

    #[test]
    fn hermitian_fill_and_mismatch() {
        let f = FourierSeries::from_modes(&[(2, c(0.1, 0.3))], 1.0).unwrap();
        assert_eq!(f.coeff(-2), c(0.1, -0.3));
        let bad = FourierSeries::from_modes(&[(1, c(1.0, 0.0)), (-1, c(0.5, 0.0))], 1.0);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn complex_mean_is_rejected_small_part_projected() {
        assert!(FourierSeries::from_modes(&[(0, c(1.0, 1e-6))], 1.0).is_err());
        let f = FourierSeries::from_modes(&[(0, c(1.0, 1e-14))], 1.0).unwrap();
        assert_eq!(f.coeff(0).im, 0.0);
    }

    #[test]
    fn strip_norm_of_constant_and_cosine() {
        let k = FourierSeries::constant(-3.0, 1.0).unwrap();
        assert_abs_diff_eq!(k.strip_norm(0.7).unwrap(), 3.0, epsilon = 1e-15);
        let f = FourierSeries::cosine(0.5).unwrap();
        for w in [0.0, 0.05, 0.2, 0.45] {
            let expect = (2.0 * PI * w).cosh();
            assert_abs_diff_eq!(f.strip_norm(w).unwrap(), expect, epsilon = 1e-8 * expect);
        }
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = FourierSeries::zero(1.0).unwrap();
        let e = z.exp_of_series(1.0, 16).unwrap();
        assert_eq!(e.order(), 0);
        assert_abs_diff_eq!(e.coeff(0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_grid_preconditions() {
        let f = FourierSeries::from_modes(&[(8, c(0.1, 0.0))], 1.0).unwrap();
        assert!(matches!(
            f.exp_of_series(1.0, 24),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            f.exp_of_series(1.0, 16),
            Err(Error::Precondition(_))
        ));
        assert!(f.exp_of_series(1.0, 32).is_ok());
    }

    #[test]
    fn exp_of_huge_amplitude_is_resolution_error() {
        let f = FourierSeries::cosine(1.0).unwrap();
        // e^{800 cos} overflows
        assert!(matches!(
            f.exp_of_series(800.0, 16),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn derivative_and_shift() {
        let f = FourierSeries::cosine(1.0).unwrap();
        let d = f.derivative();
        assert_abs_diff_eq!(d.value(0.25), -2.0 * PI, epsilon = 1e-12);
        let s = f.shifted(0.25);
        assert_abs_diff_eq!(s.value(0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.value(0.75), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn c1_norm_of_cosine() {
        let f = FourierSeries::cosine(1.0).unwrap();
        assert_abs_diff_eq!(f.c1_norm(), 1.0 + 2.0 * PI, epsilon = 1e-10);
    }

    #[test]
    fn declared_norm_is_verified() {
        let f = FourierSeries::cosine(0.1).unwrap();
        let bound = (2.0 * PI * 0.1f64).cosh();
        assert!(f.clone().with_declared_norm(bound).is_ok());
        assert!(f.with_declared_norm(0.5).is_err());
    }

    #[test]
    fn default_truncation_order() {
        // 1 · e^{-2π·0.5·M} < 1e-14  ⇔  M > 10.26
        assert_eq!(default_order(1.0, 0.5), 11);
        assert_eq!(default_order(0.0, 0.5), 0);
    }

    #[test]
    fn json_layout() {
        let f = FourierSeries::cosine(0.5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"h":0.5,"coeffs":[[-1,0.5,-0.0],[0,0.0,0.0],[1,0.5,0.0]]}"#
        );
        let back: FourierSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
