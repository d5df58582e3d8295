//! Matrix weights as sums of classical scalar factors times matrix polynomials.

pub mod catalog;
pub mod gauss;
pub mod poly;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, sym_eig, symmetry_defect, Matrix};

pub use catalog::{catalog_get, catalog_names, CatalogEntry, CatalogOperator, EigenvalueFn};
pub use poly::{Frame, MatrixPolynomial};
pub use quadrature::{quad_full, quad_truncated, QuadRule};

/// Classical scalar prefactor of a weight term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFactor {
    /// `(b − x)^α (x − a)^β` on `[a, b]`.
    Jacobi { alpha: f64, beta: f64, a: f64, b: f64 },
    /// `(1 − x²)^γ` on `[−1, 1]`.
    Gegenbauer { gamma: f64 },
    /// `s·e^{−(x − c)²}` on the real line.
    ShiftedGaussian { c: f64, s: f64 },
    /// The constant 1.
    Unit,
}

impl ScalarFactor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarFactor::Jacobi { alpha, beta, a, b } => {
                if !(alpha > -1.0 && beta > -1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Jacobi exponents must exceed −1 (α = {alpha}, β = {beta})"
                    )));
                }
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidParameter(format!(
                        "Jacobi factor needs a finite interval, got [{a}, {b}]"
                    )));
                }
            }
            ScalarFactor::Gegenbauer { gamma } => {
                if gamma <= -1.0 || gamma.is_nan() {
                    return Err(Error::InvalidParameter(format!(
                        "Gegenbauer exponent must exceed −1, got {gamma}"
                    )));
                }
            }
            ScalarFactor::ShiftedGaussian { c, s } => {
                if !(s > 0.0 && c.is_finite() && s.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "Gaussian factor needs finite centre and s > 0 (c = {c}, s = {s})"
                    )));
                }
            }
            ScalarFactor::Unit => {}
        }
        Ok(())
    }

    /// Jacobi form `(b − x)^α (x − a)^β` when the factor is of beta type.
    pub fn as_jacobi(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            ScalarFactor::Jacobi { alpha, beta, a, b } => Some((alpha, beta, a, b)),
            ScalarFactor::Gegenbauer { gamma } => Some((gamma, gamma, -1.0, 1.0)),
            _ => None,
        }
    }

    /// Natural support; `None` for the unit factor, which takes the weight's interval.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            ScalarFactor::ShiftedGaussian { .. } => Some((f64::NEG_INFINITY, f64::INFINITY)),
            ScalarFactor::Unit => None,
            _ => self.as_jacobi().map(|(_, _, a, b)| (a, b)),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            ScalarFactor::ShiftedGaussian { c, s } => s * (-(x - c) * (x - c)).exp(),
            ScalarFactor::Unit => 1.0,
            _ => {
                let (alpha, beta, a, b) = self.as_jacobi().unwrap();
                (b - x).powf(alpha) * (x - a).powf(beta)
            }
        }
    }

    /// First and second derivatives of `ln f`.
    pub fn log_derivatives(&self, x: f64) -> (f64, f64) {
        match *self {
            ScalarFactor::ShiftedGaussian { c, .. } => (-2.0 * (x - c), -2.0),
            ScalarFactor::Unit => (0.0, 0.0),
            _ => {
                let (alpha, beta, a, b) = self.as_jacobi().unwrap();
                let (u, v) = (b - x, x - a);
                (-alpha / u + beta / v, -alpha / (u * u) - beta / (v * v))
            }
        }
    }

    /// `(f, f′, f″)` at `x`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        let f = self.value(x);
        let (l1, l2) = self.log_derivatives(x);
        (f, f * l1, f * (l2 + l1 * l1))
    }

    /// Exponent of the power behaviour at an endpoint of a finite interval:
    /// `f(x) ≈ const·|x − e|^ν`. Zero when the factor is regular and nonzero there.
    pub fn endpoint_exponent(&self, e: f64) -> f64 {
        match self.as_jacobi() {
            Some((alpha, beta, a, b)) => {
                if e == a {
                    beta
                } else if e == b {
                    alpha
                } else {
                    0.0
                }
            }
            None => 0.0,
        }
    }
}

/// One summand `factor(x)·polypart(x)` of a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTerm {
    pub factor: ScalarFactor,
    pub polypart: MatrixPolynomial,
}

/// `W(x) = Σ factorᵢ(x)·Pᵢ(x)` on `(a, b)`, endpoints possibly infinite.
#[derive(Debug, Clone)]
pub struct MatrixWeight {
    dim: usize,
    a: f64,
    b: f64,
    frame: Frame,
    terms: Vec<WeightTerm>,
}

pub const POSITIVITY_SAMPLES: usize = 50;

impl MatrixWeight {
    /// Validates the terms, re-expands the polynomial parts in the weight's
    /// frame, and checks symmetry and positive definiteness at interior samples.
    pub fn new(dim: usize, a: f64, b: f64, terms: Vec<WeightTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("weight has no terms".into()));
        }
        if !(a < b) {
            return Err(Error::InvalidParameter(format!("empty interval ({a}, {b})")));
        }
        let mut centres = Vec::new();
        for t in &terms {
            t.factor.validate()?;
            if t.polypart.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.polypart.dim(),
                });
            }
            match t.factor.support() {
                Some((sa, sb)) if sa != a || sb != b => {
                    return Err(Error::InvalidParameter(format!(
                        "factor support [{sa}, {sb}] differs from weight interval [{a}, {b}]"
                    )))
                }
                None if !(a.is_finite() && b.is_finite()) => {
                    return Err(Error::InvalidParameter("unit factor needs a finite interval".into()))
                }
                _ => {}
            }
            if let ScalarFactor::ShiftedGaussian { c, .. } = t.factor {
                centres.push(c);
            }
        }
        let frame = if a.is_finite() && b.is_finite() {
            Frame::for_interval(a, b)
        } else {
            let c = centres.iter().sum::<f64>() / centres.len().max(1) as f64;
            Frame::new(c, 1.0)
        };
        let terms = terms
            .into_iter()
            .map(|t| WeightTerm {
                factor: t.factor,
                polypart: t.polypart.to_frame(frame),
            })
            .collect();
        let w = Self {
            dim,
            a,
            b,
            frame,
            terms,
        };
        w.check_positivity()?;
        Ok(w)
    }

    fn check_positivity(&self) -> Result<()> {
        for x in self.chebyshev_samples(POSITIVITY_SAMPLES) {
            let wx = self.eval_unchecked(x);
            let scale = max_abs(&wx).max(f64::MIN_POSITIVE);
            let defect = symmetry_defect(&wx) / scale;
            if defect > 1e-12 {
                return Err(Error::NotSymmetric { defect });
            }
            let eig = sym_eig(&wx)?;
            let lo = eig.values[0];
            let hi = eig.values[eig.values.len() - 1];
            if lo <= 0.0 {
                return Err(Error::NotPositiveDefinite {
                    min_eigenvalue: lo,
                    max_eigenvalue: hi,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn terms(&self) -> &[WeightTerm] {
        &self.terms
    }

    /// Finite window carrying essentially all the mass: the interval itself
    /// when finite, otherwise a band of half-width 6 around the Gaussian centres.
    pub fn window(&self) -> (f64, f64) {
        let centres: Vec<f64> = self
            .terms
            .iter()
            .filter_map(|t| match t.factor {
                ScalarFactor::ShiftedGaussian { c, .. } => Some(c),
                _ => None,
            })
            .collect();
        let lo = if self.a.is_finite() {
            self.a
        } else {
            centres.iter().copied().fold(f64::INFINITY, f64::min) - 6.0
        };
        let hi = if self.b.is_finite() {
            self.b
        } else {
            centres.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 6.0
        };
        (lo, hi)
    }

    /// `n` Chebyshev points of the first kind strictly inside the window.
    pub fn chebyshev_samples(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.window();
        chebyshev_points(lo, hi, n)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    /// Evaluation is allowed on the closed interval; at an endpoint where a
    /// factor has a negative exponent the value is infinite.
    fn check_inside(&self, x: f64) -> Result<()> {
        if x >= self.a && x <= self.b && x.is_finite() {
            Ok(())
        } else {
            Err(Error::OutsideInterval {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }

    pub fn eval(&self, x: f64) -> Result<Matrix> {
        self.check_inside(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            acc += t.polypart.eval(x) * t.factor.value(x);
        }
        acc
    }

    /// `W`, `W′` or `W″` at `x`.
    pub fn deriv(&self, x: f64, order: usize) -> Result<Matrix> {
        if order > 2 {
            return Err(Error::InvalidParameter(format!(
                "weight derivatives are available up to order 2, not {order}"
            )));
        }
        Ok(self.jet(x)?[order].clone())
    }

    /// `[W, W′, W″]` at `x`.
    pub fn jet(&self, x: f64) -> Result<[Matrix; 3]> {
        self.check_inside(x)?;
        let z = Matrix::zeros(self.dim, self.dim);
        let mut out = [z.clone(), z.clone(), z];
        for t in &self.terms {
            let (f, f1, f2) = t.factor.jet(x);
            let p = t.polypart.eval(x);
            let dp = t.polypart.derivative();
            let p1 = dp.eval(x);
            let p2 = dp.derivative().eval(x);
            out[0] += &p * f;
            out[1] += &p * f1 + &p1 * f;
            out[2] += &p * f2 + &p1 * (2.0 * f1) + &p2 * f;
        }
        Ok(out)
    }

    /// Largest polynomial degree among the terms.
    pub fn polypart_degree(&self) -> usize {
        self.terms.iter().map(|t| t.polypart.degree()).max().unwrap_or(0)
    }

    /// Terms grouped by identical scalar factor, polynomial parts summed.
    pub fn term_classes(&self) -> Vec<WeightTerm> {
        let mut out: Vec<WeightTerm> = Vec::new();
        for t in &self.terms {
            if let Some(c) = out.iter_mut().find(|c| c.factor == t.factor) {
                c.polypart = &c.polypart + &t.polypart;
            } else {
                out.push(t.clone());
            }
        }
        out
    }
}

/// Chebyshev points of the first kind mapped to `(lo, hi)`, ascending.
pub fn chebyshev_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    (0..n)
        .map(|j| {
            let theta = std::f64::consts::PI * (2 * (n - j) - 1) as f64 / (2 * n) as f64;
            c + h * theta.cos()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_jet_matches_finite_differences() {
        let factors = [
            ScalarFactor::Jacobi {
                alpha: 0.7,
                beta: 1.3,
                a: 0.0,
                b: 1.0,
            },
            ScalarFactor::Gegenbauer { gamma: 0.5 },
            ScalarFactor::ShiftedGaussian { c: -1.0, s: 2.0 },
        ];
        for f in factors {
            let x = 0.31;
            let h = 1e-5;
            let (_, d1, d2) = f.jet(x);
            let fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            let fd2 = (f.value(x + h) - 2.0 * f.value(x) + f.value(x - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * d1.abs().max(1.0), "{f:?}");
            assert!((d2 - fd2).abs() < 1e-4 * d2.abs().max(1.0), "{f:?}");
        }
    }

    #[test]
    fn chebyshev_points_are_interior_and_sorted() {
        let p = chebyshev_points(-1.0, 1.0, 7);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!(p[0] > -1.0 && p[6] < 1.0);
        assert!(p[3].abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_support() {
        let t = WeightTerm {
            factor: ScalarFactor::Gegenbauer { gamma: 0.0 },
            polypart: MatrixPolynomial::identity(1, Frame::IDENTITY),
        };
        assert!(MatrixWeight::new(1, 0.0, 1.0, vec![t]).is_err());
    }

    #[test]
    fn rejects_indefinite_weight() {
        let t = WeightTerm {
            factor: ScalarFactor::Unit,
            polypart: MatrixPolynomial::constant(Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]), Frame::IDENTITY),
        };
        let err = MatrixWeight::new(2, 0.0, 1.0, vec![t]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn eval_outside_interval_is_an_error() {
        let t = WeightTerm {
            factor: ScalarFactor::Unit,
            polypart: MatrixPolynomial::identity(1, Frame::IDENTITY),
        };
        let w = MatrixWeight::new(1, 0.0, 1.0, vec![t]).unwrap();
        assert!(matches!(w.eval(1.5), Err(Error::OutsideInterval { .. })));
        assert!(matches!(w.eval(-0.1), Err(Error::OutsideInterval { .. })));
        assert!(w.eval(0.5).is_ok());
    }
}
