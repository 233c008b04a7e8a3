//! 2×2 real matrices, `SL(2,R)` elements, and renormalized long products.

use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative determinant tolerance for [`SL2Matrix`].
pub const DET_TOL: f64 = 1e-10;

/// Plain 2×2 real matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        let f2 = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0);
        ((f2 + disc.sqrt()) / 2.0).sqrt()
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Adjugate; the inverse when `det = 1`.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    /// `‖B² − tr(B)·B + I‖_F / (1 + ‖B‖_F²)`: zero for `det B = 1`.
    pub fn cayley_hamilton_residual(&self) -> f64 {
        let r = *self * *self - self.scale(self.trace()) + Mat2::IDENTITY;
        r.frobenius() / (1.0 + self.frobenius().powi(2))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

/// Element of `SL(2,R)`: `ad − bc = 1` within [`DET_TOL`] relative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SL2Matrix(Mat2);

impl SL2Matrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<SL2Matrix> {
        SL2Matrix::from_mat(Mat2::new(a, b, c, d))
    }

    pub fn from_mat(m: Mat2) -> Result<SL2Matrix> {
        let drift = (m.det() - 1.0).abs();
        let scale = 1.0f64.max(m.frobenius().powi(2));
        if !(drift <= DET_TOL * scale) {
            return Err(Error::Domain(format!(
                "determinant {} is not 1 (drift {drift:e})",
                m.det()
            )));
        }
        Ok(SL2Matrix(m))
    }

    /// Rescales by `1/sqrt(det)` to remove accumulated determinant drift.
    pub fn renormalized(m: Mat2) -> Result<SL2Matrix> {
        let det = m.det();
        if !(det > 0.0) {
            return Err(Error::Domain(format!(
                "cannot renormalize determinant {det}"
            )));
        }
        SL2Matrix::from_mat(m.scale(1.0 / det.sqrt()))
    }

    pub fn identity() -> SL2Matrix {
        SL2Matrix(Mat2::IDENTITY)
    }

    pub fn mat(&self) -> Mat2 {
        self.0
    }

    pub fn inverse(&self) -> SL2Matrix {
        SL2Matrix(self.0.adjugate())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }

    pub fn norm(&self) -> f64 {
        self.0.op_norm()
    }
}

impl Mul for SL2Matrix {
    type Output = SL2Matrix;

    fn mul(self, o: SL2Matrix) -> SL2Matrix {
        SL2Matrix(self.0 * o.0)
    }
}

/// A long product stored as `e^{log_scale} · matrix`, with `‖matrix‖_F = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledProduct {
    pub matrix: Mat2,
    pub log_scale: f64,
}

impl ScaledProduct {
    pub fn identity() -> ScaledProduct {
        ScaledProduct {
            matrix: Mat2::IDENTITY,
            log_scale: 0.0,
        }
    }

    /// Left-multiplies by `m` and renormalizes.
    #[inline]
    pub fn push_left(&mut self, m: &Mat2) {
        let next = *m * self.matrix;
        let s = next.frobenius();
        self.matrix = next.scale(1.0 / s);
        self.log_scale += s.ln();
    }

    /// `self · other` (self on the left).
    pub fn then_after(&self, other: &ScaledProduct) -> ScaledProduct {
        let m = self.matrix * other.matrix;
        let s = m.frobenius();
        ScaledProduct {
            matrix: m.scale(1.0 / s),
            log_scale: self.log_scale + other.log_scale + s.ln(),
        }
    }

    /// `log ‖product‖` (operator norm).
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.matrix.op_norm().ln()
    }

    /// Determinant of the true product, `det(matrix) · e^{2 log_scale}`.
    /// Only meaningful while `det(matrix)` does not underflow.
    pub fn det(&self) -> f64 {
        self.matrix.det() * (2.0 * self.log_scale).exp()
    }

    /// The unscaled product, if it fits in floating point.
    pub fn to_mat(&self) -> Result<Mat2> {
        if self.log_scale > 300.0 {
            return Err(Error::Resource(format!(
                "product norm e^{:.1} does not fit in f64",
                self.log_scale
            )));
        }
        Ok(self.matrix.scale(self.log_scale.exp()))
    }

    /// The unscaled product as an `SL(2,R)` element with determinant drift removed.
    pub fn to_sl2(&self) -> Result<SL2Matrix> {
        SL2Matrix::renormalized(self.to_mat()?)
    }
}
