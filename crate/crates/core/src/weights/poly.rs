//! Polynomials with square matrix coefficients.
//!
//! Coefficients are stored in the monomial basis of a local variable
//! `t = (x − center) / scale`. The frame is chosen per weight so that `t`
//! ranges over `[−1, 1]` on finite intervals; the plain monomial basis in `x`
//! loses about seven digits at degree twelve on `[0, 1]`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Affine change of variable `t = (x − center) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub center: f64,
    pub scale: f64,
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        center: 0.0,
        scale: 1.0,
    };

    pub fn new(center: f64, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "frame scale must be positive");
        Self { center, scale }
    }

    /// Frame mapping `[a, b]` onto `[−1, 1]`.
    pub fn for_interval(a: f64, b: f64) -> Self {
        Self::new(0.5 * (a + b), 0.5 * (b - a))
    }

    #[inline]
    pub fn local(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }
}

impl Default for Frame {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// `P(x) = Σ Cₖ tᵏ` with `t` the frame variable; coefficients multiply on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    dim: usize,
    frame: Frame,
    coeffs: Vec<Matrix>,
}

impl MatrixPolynomial {
    /// Builds from local-frame coefficients, trimming exactly-zero leading terms.
    pub fn new(dim: usize, frame: Frame, coeffs: Vec<Matrix>) -> Self {
        for c in &coeffs {
            assert_eq!(c.shape(), (dim, dim), "coefficient shape");
        }
        let mut p = Self { dim, frame, coeffs };
        p.trim();
        p
    }

    pub fn zero(dim: usize, frame: Frame) -> Self {
        Self::new(dim, frame, Vec::new())
    }

    pub fn constant(c: Matrix, frame: Frame) -> Self {
        let dim = c.nrows();
        Self::new(dim, frame, vec![c])
    }

    pub fn identity(dim: usize, frame: Frame) -> Self {
        Self::constant(Matrix::identity(dim, dim), frame)
    }

    /// The polynomial `x·C`.
    pub fn x_times(c: &Matrix, frame: Frame) -> Self {
        Self::constant(c.clone(), frame).mul_x()
    }

    /// Builds from coefficients of plain powers of `x`, re-expanded in `frame`.
    pub fn from_x_coeffs(dim: usize, coeffs: Vec<Matrix>, frame: Frame) -> Self {
        Self::new(dim, Frame::IDENTITY, coeffs).to_frame(frame)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.iter().all(|v| *v == 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Local-frame coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    /// Local-frame coefficient of `tᵏ` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Matrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    /// Coefficient of `xᵏ` in the plain monomial basis.
    pub fn x_coeff(&self, k: usize) -> Matrix {
        self.to_frame(Frame::IDENTITY).coeff(k)
    }

    pub fn x_coeffs(&self) -> Vec<Matrix> {
        self.to_frame(Frame::IDENTITY).coeffs
    }

    /// Leading local coefficient times `scale^{-deg}`, i.e. the coefficient of `x^deg`.
    pub fn leading_x_coeff(&self) -> Matrix {
        let d = self.degree();
        self.coeff(d) / self.frame.scale.powi(d as i32)
    }

    pub fn eval(&self, x: f64) -> Matrix {
        let t = self.frame.local(x);
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for c in self.coeffs.iter().rev() {
            acc *= t;
            acc += c;
        }
        acc
    }

    /// `d/dx`.
    pub fn derivative(&self) -> Self {
        let inv = 1.0 / self.frame.scale;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * (k as f64 * inv))
            .collect();
        Self::new(self.dim, self.frame, coeffs)
    }

    /// `x·P`.
    pub fn mul_x(&self) -> Self {
        let mut coeffs = vec![Matrix::zeros(self.dim, self.dim); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c * self.frame.center;
            coeffs[k + 1] += c * self.frame.scale;
        }
        Self::new(self.dim, self.frame, coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.dim, self.frame, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `C·P(x)`.
    pub fn left_mul(&self, c: &Matrix) -> Self {
        Self::new(self.dim, self.frame, self.coeffs.iter().map(|k| c * k).collect())
    }

    /// `P(x)·C`.
    pub fn right_mul(&self, c: &Matrix) -> Self {
        Self::new(self.dim, self.frame, self.coeffs.iter().map(|k| k * c).collect())
    }

    /// Coefficientwise transpose, so `Pᵀ(x) = P(x)ᵀ`.
    pub fn transpose(&self) -> Self {
        Self::new(
            self.dim,
            self.frame,
            self.coeffs.iter().map(|c| c.transpose()).collect(),
        )
    }

    /// Product `P(x)·Q(x)`; frames must agree.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.dim, self.frame));
        }
        let mut coeffs = vec![Matrix::zeros(self.dim, self.dim); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Self::new(self.dim, self.frame, coeffs))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(Self::new(self.dim, self.frame, coeffs))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(())
    }

    /// Re-expands the coefficients in another frame.
    pub fn to_frame(&self, frame: Frame) -> Self {
        if frame == self.frame {
            return self.clone();
        }
        // t_old = alpha + beta * t_new
        let alpha = (frame.center - self.frame.center) / self.frame.scale;
        let beta = frame.scale / self.frame.scale;
        let n = self.coeffs.len();
        let mut acc: Vec<Matrix> = Vec::with_capacity(n);
        for c in self.coeffs.iter().rev() {
            let mut next = vec![Matrix::zeros(self.dim, self.dim); acc.len() + 1];
            for (k, a) in acc.iter().enumerate() {
                next[k] += a * alpha;
                next[k + 1] += a * beta;
            }
            next[0] += c;
            acc = next;
        }
        Self::new(self.dim, frame, acc)
    }

    /// Frobenius norm of the local coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest absolute local coefficient entry.
    pub fn coeff_max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Flattened local coefficients padded to `degree`, column-major per block.
    pub fn to_vec(&self, degree: usize) -> Vec<f64> {
        (0..=degree)
            .flat_map(|k| self.coeff(k).iter().copied().collect::<Vec<_>>())
            .collect()
    }
}

impl Add for &MatrixPolynomial {
    type Output = MatrixPolynomial;
    fn add(self, rhs: Self) -> MatrixPolynomial {
        self.try_add(rhs).expect("incompatible polynomials")
    }
}

impl Sub for &MatrixPolynomial {
    type Output = MatrixPolynomial;
    fn sub(self, rhs: Self) -> MatrixPolynomial {
        self.try_add(&rhs.scale(-1.0)).expect("incompatible polynomials")
    }
}

impl Neg for &MatrixPolynomial {
    type Output = MatrixPolynomial;
    fn neg(self) -> MatrixPolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &MatrixPolynomial {
    type Output = MatrixPolynomial;
    fn mul(self, rhs: Self) -> MatrixPolynomial {
        self.try_mul(rhs).expect("incompatible polynomials")
    }
}

impl Mul<f64> for &MatrixPolynomial {
    type Output = MatrixPolynomial;
    fn mul(self, rhs: f64) -> MatrixPolynomial {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: [f64; 4]) -> Matrix {
        Matrix::from_row_slice(2, 2, &v)
    }

    #[test]
    fn eval_uses_left_coefficients() {
        let p = MatrixPolynomial::new(
            2,
            Frame::IDENTITY,
            vec![m([1.0, 0.0, 0.0, 1.0]), m([0.0, 1.0, 2.0, 0.0])],
        );
        assert_eq!(p.eval(2.0), m([1.0, 2.0, 4.0, 1.0]));
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn frame_conversion_preserves_values() {
        let f = Frame::for_interval(0.0, 1.0);
        let p = MatrixPolynomial::from_x_coeffs(
            2,
            vec![
                m([1.0, 2.0, 3.0, 4.0]),
                m([0.5, 0.0, -1.0, 2.0]),
                m([3.0, 1.0, 0.0, -2.0]),
            ],
            f,
        );
        for &x in &[0.0, 0.3, 1.7, -2.0] {
            let expect = m([1.0, 2.0, 3.0, 4.0]) + m([0.5, 0.0, -1.0, 2.0]) * x + m([3.0, 1.0, 0.0, -2.0]) * (x * x);
            assert!((p.eval(x) - expect).abs().max() < 1e-13);
        }
        let back = p.x_coeffs();
        assert!((&back[2] - m([3.0, 1.0, 0.0, -2.0])).abs().max() < 1e-13);
        assert!((p.leading_x_coeff() - m([3.0, 1.0, 0.0, -2.0])).abs().max() < 1e-13);
    }

    #[test]
    fn derivative_and_mul_x_in_frame() {
        let f = Frame::new(0.5, 0.5);
        let p = MatrixPolynomial::from_x_coeffs(1, vec![m1(1.0), m1(-3.0), m1(2.0)], f);
        // p = 1 - 3x + 2x², p' = -3 + 4x, x p = x - 3x² + 2x³
        let d = p.derivative();
        assert!((d.eval(0.7)[(0, 0)] - (-3.0 + 2.8)).abs() < 1e-14);
        let xp = p.mul_x();
        let x: f64 = 1.3;
        assert!((xp.eval(x)[(0, 0)] - (x - 3.0 * x * x + 2.0 * x.powi(3))).abs() < 1e-13);
    }

    fn m1(v: f64) -> Matrix {
        Matrix::from_element(1, 1, v)
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let p = MatrixPolynomial::identity(1, Frame::IDENTITY);
        let q = MatrixPolynomial::identity(1, Frame::new(1.0, 2.0));
        assert_eq!(p.try_mul(&q), Err(Error::FrameMismatch));
    }

    #[test]
    fn zero_polynomial_trims() {
        let p = MatrixPolynomial::new(2, Frame::IDENTITY, vec![Matrix::zeros(2, 2); 3]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
        assert_eq!(p.eval(3.0), Matrix::zeros(2, 2));
    }
}
