//! Second-order differential operators acting on matrix polynomials from the right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix};
use crate::orthopoly::inner_product;
use crate::weights::{chebyshev_points, Frame, MatrixPolynomial, MatrixWeight, QuadRule};

/// `PD = P″F₂ + P′F₁ + PF₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightDiffOp {
    f: [MatrixPolynomial; 3],
}

impl RightDiffOp {
    /// Coefficients are re-expanded in the frame of `f0`.
    pub fn new(f2: MatrixPolynomial, f1: MatrixPolynomial, f0: MatrixPolynomial) -> Result<Self> {
        let dim = f0.dim();
        for p in [&f2, &f1] {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        let frame = f0.frame();
        Ok(Self {
            f: [f0, f1.to_frame(frame), f2.to_frame(frame)],
        })
    }

    /// From coefficients of plain powers of `x`: `F₂ = Σ f2[k] xᵏ`, and so on.
    pub fn from_x_coeffs(dim: usize, f2: Vec<Matrix>, f1: Vec<Matrix>, f0: Vec<Matrix>, frame: Frame) -> Self {
        let mk = |c: Vec<Matrix>| MatrixPolynomial::from_x_coeffs(dim, c, frame);
        Self {
            f: [mk(f0), mk(f1), mk(f2)],
        }
    }

    /// Multiplication by a constant matrix on the right.
    pub fn constant(c: Matrix, frame: Frame) -> Self {
        let dim = c.nrows();
        Self {
            f: [
                MatrixPolynomial::constant(c, frame),
                MatrixPolynomial::zero(dim, frame),
                MatrixPolynomial::zero(dim, frame),
            ],
        }
    }

    pub fn identity(dim: usize, frame: Frame) -> Self {
        Self::constant(Matrix::identity(dim, dim), frame)
    }

    pub fn dim(&self) -> usize {
        self.f[0].dim()
    }

    pub fn frame(&self) -> Frame {
        self.f[0].frame()
    }

    /// Coefficient `Fⱼ`, `j ∈ {0, 1, 2}`.
    pub fn coeff(&self, j: usize) -> &MatrixPolynomial {
        &self.f[j]
    }

    pub fn f2(&self) -> &MatrixPolynomial {
        &self.f[2]
    }

    pub fn f1(&self) -> &MatrixPolynomial {
        &self.f[1]
    }

    pub fn f0(&self) -> &MatrixPolynomial {
        &self.f[0]
    }

    pub fn to_frame(&self, frame: Frame) -> Self {
        Self {
            f: self.f.clone().map(|p| p.to_frame(frame)),
        }
    }

    /// `PD`, computed by exact coefficient arithmetic in the frame of `P`.
    pub fn apply_right(&self, p: &MatrixPolynomial) -> MatrixPolynomial {
        let d = self.to_frame(p.frame());
        let p1 = p.derivative();
        let p2 = p1.derivative();
        let a = &p2 * &d.f[2];
        let b = &p1 * &d.f[1];
        let c = p * &d.f[0];
        &(&a + &b) + &c
    }

    /// `deg F₂ ≤ 2`, `deg F₁ ≤ 1`, `deg F₀ = 0`.
    pub fn is_classical_shape(&self) -> bool {
        self.f[2].degree() <= 2 && self.f[1].degree() <= 1 && self.f[0].degree() == 0
    }

    /// `Λₙ = n(n − 1)F₂₂ + nF₁₁ + F₀`, the eigenvalue on the monic polynomial of degree `n`.
    pub fn monic_eigenvalue(&self, n: usize) -> Result<Matrix> {
        if !self.is_classical_shape() {
            return Err(Error::NotClassicalShape);
        }
        let nf = n as f64;
        Ok(self.f[2].x_coeff(2) * (nf * (nf - 1.0)) + self.f[1].x_coeff(1) * nf + self.f[0].x_coeff(0))
    }

    /// Multiplication by `x` followed by `D`: coefficients `(xF₂, xF₁ + 2F₂, xF₀ + F₁)`.
    pub fn mul_x_left(&self) -> Self {
        let [f0, f1, f2] = &self.f;
        Self {
            f: [&f0.mul_x() + f1, &f1.mul_x() + &f2.scale(2.0), f2.mul_x()],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            f: self.f.clone().map(|p| p.scale(s)),
        }
    }

    /// Coefficientwise sum; `other` is re-expanded in this operator's frame.
    pub fn add(&self, other: &Self) -> Self {
        let o = other.to_frame(self.frame());
        Self {
            f: [&self.f[0] + &o.f[0], &self.f[1] + &o.f[1], &self.f[2] + &o.f[2]],
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// `Σ cᵢ Dᵢ`; panics on an empty list.
    pub fn combination(terms: &[(f64, &RightDiffOp)]) -> Self {
        let (c0, d0) = terms[0];
        terms[1..]
            .iter()
            .fold(d0.scale(c0), |acc, (c, d)| acc.add(&d.scale(*c)))
    }

    /// `[F₀(x), F₁(x), F₂(x)]`.
    pub fn eval(&self, x: f64) -> [Matrix; 3] {
        [self.f[0].eval(x), self.f[1].eval(x), self.f[2].eval(x)]
    }

    /// `(PD)(x)` from the jet `[P(x), P′(x), P″(x)]`.
    pub fn apply_at(&self, x: f64, jet: &[Matrix; 3]) -> Matrix {
        let [f0, f1, f2] = self.eval(x);
        &jet[2] * f2 + &jet[1] * f1 + &jet[0] * f0
    }

    /// `[F₀(x), F₁(x), F₂(x)]` and their first two derivatives, indexed `[j][order]`.
    fn jets(&self, x: f64) -> [[Matrix; 3]; 3] {
        self.f.clone().map(|p| {
            let d1 = p.derivative();
            let d2 = d1.derivative();
            [p.eval(x), d1.eval(x), d2.eval(x)]
        })
    }

    /// Largest coefficient entry over all three `Fⱼ` (local frame).
    pub fn coeff_max_abs(&self) -> f64 {
        self.f.iter().map(|p| p.coeff_max_abs()).fold(0.0, f64::max)
    }

    /// Flattened local coefficients of `F₂, F₁, F₀`, each padded to `degree`.
    pub fn to_vec(&self, degree: usize) -> Vec<f64> {
        let mut v = self.f[2].to_vec(degree);
        v.extend(self.f[1].to_vec(degree));
        v.extend(self.f[0].to_vec(degree));
        v
    }
}

/// Integration range for symmetry checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Full,
    Truncated { omega: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDefect {
    pub point: f64,
    /// Relative size of `lim F₂W`.
    pub f2w: f64,
    /// Relative size of `lim (F₁W − WF₁ᵀ)`.
    pub f1w_antisym: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Relative sup residuals of `F₂W = WF₂ᵀ`, `2(F₂W)′ − F₁W = WF₁ᵀ`,
    /// `(F₂W)″ − (F₁W)′ + F₀W = WF₀ᵀ`.
    pub residuals: [f64; 3],
    pub boundary: Vec<BoundaryDefect>,
    pub tolerance: f64,
    pub boundary_tolerance: f64,
    pub verdict: bool,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_boundary_defect(&self) -> f64 {
        self.boundary
            .iter()
            .map(|b| b.f2w.max(b.f1w_antisym))
            .fold(0.0, f64::max)
    }
}

pub const SYMMETRY_SAMPLES: usize = 64;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const BOUNDARY_TOL: f64 = 1e-7;

fn rel(res: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        res / scale
    } else {
        0.0
    }
}

/// Residuals of the three pointwise symmetry identities at `x`, each relative
/// to the sum of `‖F‖·‖W‖` products entering it (the roundoff scale).
pub fn symmetry_residuals_at(d: &RightDiffOp, w: &MatrixWeight, x: f64) -> Result<[f64; 3]> {
    let [w0, w1, w2] = w.jet(x)?;
    let [f0, f1, f2] = d.jets(x);
    let nw = [max_abs(&w0), max_abs(&w1), max_abs(&w2)];
    let n = |f: &[Matrix; 3], k: usize| max_abs(&f[k]);

    let f2w = &f2[0] * &w0;
    let r1 = rel(max_abs(&(&f2w - &w0 * f2[0].transpose())), 2.0 * n(&f2, 0) * nw[0]);

    let f2w_d = &f2[1] * &w0 + &f2[0] * &w1;
    let f1w = &f1[0] * &w0;
    let wf1t = &w0 * f1[0].transpose();
    let r2 = rel(
        max_abs(&(&f2w_d * 2.0 - &f1w - &wf1t)),
        2.0 * (n(&f2, 1) * nw[0] + n(&f2, 0) * nw[1]) + 2.0 * n(&f1, 0) * nw[0],
    );

    let f2w_dd = &f2[2] * &w0 + &f2[1] * &w1 * 2.0 + &f2[0] * &w2;
    let f1w_d = &f1[1] * &w0 + &f1[0] * &w1;
    let f0w = &f0[0] * &w0;
    let wf0t = &w0 * f0[0].transpose();
    let r3 = rel(
        max_abs(&(&f2w_dd - &f1w_d + &f0w - &wf0t)),
        n(&f2, 2) * nw[0]
            + 2.0 * n(&f2, 1) * nw[1]
            + n(&f2, 0) * nw[2]
            + n(&f1, 1) * nw[0]
            + n(&f1, 0) * nw[1]
            + 2.0 * n(&f0, 0) * nw[0],
    );
    Ok([r1, r2, r3])
}

/// `(F₂W, F₁W − WF₁ᵀ)` at `x`.
fn boundary_quantities(d: &RightDiffOp, w: &MatrixWeight, x: f64) -> Result<(Matrix, Matrix)> {
    let wx = w.eval(x)?;
    let f2 = d.f2().eval(x);
    let f1 = d.f1().eval(x);
    let g1 = &f2 * &wx;
    let g2 = &f1 * &wx - &wx * f1.transpose();
    Ok((g1, g2))
}

/// Entrywise Aitken Δ² extrapolation of the last three terms of a sequence.
/// A sequence whose magnitude keeps growing is reported by its last magnitude.
pub fn aitken_limit(seq: &[Matrix]) -> f64 {
    let n = seq.len();
    let (g1, g2, g3) = (&seq[n - 3], &seq[n - 2], &seq[n - 1]);
    let mut out = 0.0_f64;
    for i in 0..g3.len() {
        let (a, b, c) = (g1[i], g2[i], g3[i]);
        let growing = c.abs() > b.abs() * 1.01 && b.abs() > a.abs() * 1.01;
        let lim = if growing {
            c.abs()
        } else {
            let den = c - 2.0 * b + a;
            if den.abs() <= 1e-14 * (a.abs() + b.abs() + c.abs()) {
                c
            } else {
                c - (c - b) * (c - b) / den
            }
        };
        out = out.max(lim.abs());
    }
    out
}

fn endpoint_limit(d: &RightDiffOp, w: &MatrixWeight, e: f64, inward: f64) -> Result<(f64, f64)> {
    if e.is_infinite() {
        let (lo, hi) = w.window();
        let x = if e < 0.0 { lo - 30.0 } else { hi + 30.0 };
        let (g1, g2) = boundary_quantities(d, w, x)?;
        return Ok((max_abs(&g1), max_abs(&g2)));
    }
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for k in 10..=30 {
        let x = e + inward * 2f64.powi(-k);
        let (g1, g2) = boundary_quantities(d, w, x)?;
        s1.push(g1);
        s2.push(g2);
    }
    Ok((aitken_limit(&s1), aitken_limit(&s2)))
}

/// Pointwise symmetry identities at Chebyshev points and boundary limits.
///
/// Boundary defects are scaled by `‖Fⱼ‖·‖W‖` at the midpoint of the range.
/// On a truncated range the right end `Ω` is an interior point of the
/// weight, so its limits are plain evaluations.
pub fn check_symmetry(d: &RightDiffOp, w: &MatrixWeight, domain: Domain) -> SymmetryReport {
    check_symmetry_with(d, w, domain, SYMMETRY_TOL)
}

pub fn check_symmetry_with(d: &RightDiffOp, w: &MatrixWeight, domain: Domain, tolerance: f64) -> SymmetryReport {
    let (a, b) = w.interval();
    let (lo, hi) = w.window();
    let domain = match domain {
        Domain::Truncated { omega } if omega >= b => Domain::Full,
        d => d,
    };
    let upper = match domain {
        Domain::Full => hi,
        Domain::Truncated { omega } => omega.min(hi),
    };
    let mut residuals = [0.0_f64; 3];
    for x in chebyshev_points(lo, upper, SYMMETRY_SAMPLES) {
        match symmetry_residuals_at(d, w, x) {
            Ok(r) => {
                for j in 0..3 {
                    residuals[j] = residuals[j].max(r[j]);
                }
            }
            Err(_) => residuals = [f64::INFINITY; 3],
        }
    }

    let mid = 0.5 * (lo + upper);
    let wm = w.eval(mid).map(|m| max_abs(&m)).unwrap_or(1.0);
    let s2 = max_abs(&d.f2().eval(mid)) * wm;
    let s1 = max_abs(&d.f1().eval(mid)) * wm;
    let scale = s2.max(s1).max(f64::MIN_POSITIVE);

    let mut ends = vec![(a, 1.0)];
    match domain {
        Domain::Full => ends.push((b, -1.0)),
        Domain::Truncated { omega } => ends.push((omega, 0.0)),
    }
    let mut boundary = Vec::new();
    for (e, inward) in ends {
        let lim = if inward == 0.0 {
            boundary_quantities(d, w, e).map(|(g1, g2)| (max_abs(&g1), max_abs(&g2)))
        } else {
            endpoint_limit(d, w, e, inward)
        };
        let (l1, l2) = lim.unwrap_or((f64::INFINITY, f64::INFINITY));
        boundary.push(BoundaryDefect {
            point: e,
            f2w: l1 / scale,
            f1w_antisym: l2 / scale,
        });
    }

    let mut report = SymmetryReport {
        residuals,
        boundary,
        tolerance,
        boundary_tolerance: BOUNDARY_TOL,
        verdict: false,
    };
    report.verdict = report.max_residual() < tolerance && report.max_boundary_defect() < BOUNDARY_TOL;
    report
}

/// `‖⟨PD, Q⟩ − ⟨P, QD⟩‖ / max(‖⟨PD, Q⟩‖, ‖⟨P, QD⟩‖)` under `rule`.
pub fn weak_symmetry_defect(
    d: &RightDiffOp,
    p: &MatrixPolynomial,
    q: &MatrixPolynomial,
    rule: &QuadRule,
) -> Result<f64> {
    let lhs = inner_product(&d.apply_right(p), q, rule)?;
    let rhs = inner_product(p, &d.apply_right(q), rule)?;
    let scale = max_abs(&lhs).max(max_abs(&rhs));
    Ok(rel(max_abs(&(lhs - rhs)), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut impl Rng, dim: usize, deg: usize, frame: Frame) -> MatrixPolynomial {
        let coeffs = (0..=deg)
            .map(|_| Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        MatrixPolynomial::new(dim, frame, coeffs)
    }

    #[test]
    fn constants_only_see_f0() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Frame::new(0.3, 0.7);
        let d = RightDiffOp::new(
            random_poly(&mut rng, 2, 2, f),
            random_poly(&mut rng, 2, 1, f),
            random_poly(&mut rng, 2, 0, f),
        )
        .unwrap();
        let out = d.apply_right(&MatrixPolynomial::identity(2, f));
        let diff = &out - d.f0();
        assert!(diff.coeff_max_abs() < 1e-15);
    }

    #[test]
    fn first_derivative_term() {
        let f = Frame::IDENTITY;
        let i = Matrix::identity(2, 2);
        let z = Matrix::zeros(2, 2);
        let d = RightDiffOp::from_x_coeffs(2, vec![i.clone() * 5.0], vec![z.clone(), i.clone()], vec![], f);
        let p = MatrixPolynomial::x_times(&i, f);
        let out = d.apply_right(&p);
        assert!((&out - &p).coeff_max_abs() < 1e-15);
    }

    #[test]
    fn second_derivative_times_x() {
        let f = Frame::IDENTITY;
        let one = Matrix::identity(1, 1);
        let d = RightDiffOp::from_x_coeffs(1, vec![one.clone()], vec![], vec![], f).mul_x_left();
        assert_eq!(d.f2().x_coeffs(), vec![Matrix::zeros(1, 1), one.clone()]);
        assert_eq!(d.f1().x_coeffs(), vec![one.clone() * 2.0]);
        assert!(d.f0().is_zero());
    }

    #[test]
    fn mul_x_left_is_multiply_then_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Frame::new(0.5, 0.5);
        for _ in 0..100 {
            let d = RightDiffOp::new(
                random_poly(&mut rng, 2, 2, f),
                random_poly(&mut rng, 2, 1, f),
                random_poly(&mut rng, 2, 0, f),
            )
            .unwrap();
            let p = random_poly(&mut rng, 2, 4, f);
            let lhs = d.mul_x_left().apply_right(&p);
            let rhs = d.apply_right(&p.mul_x());
            assert!((&lhs - &rhs).coeff_max_abs() < 1e-13);
        }
    }

    #[test]
    fn constant_operator_times_x() {
        let f = Frame::IDENTITY;
        let c = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let d = RightDiffOp::constant(c.clone(), f).mul_x_left();
        assert!(d.f2().is_zero() && d.f1().is_zero());
        assert_eq!(d.f0().x_coeffs(), vec![Matrix::zeros(2, 2), c]);
    }

    #[test]
    fn eigenvalue_at_zero_is_f0() {
        let f = Frame::new(0.5, 0.5);
        let i = Matrix::identity(2, 2);
        let c = Matrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let d = RightDiffOp::from_x_coeffs(
            2,
            vec![i.clone(), i.clone(), i.clone()],
            vec![i.clone(), i],
            vec![c.clone()],
            f,
        );
        assert!((d.monic_eigenvalue(0).unwrap() - c).abs().max() < 1e-15);
    }

    #[test]
    fn cubic_f2_is_not_classical() {
        let f = Frame::IDENTITY;
        let one = Matrix::identity(1, 1);
        let d = RightDiffOp::from_x_coeffs(1, vec![one.clone(); 4], vec![], vec![one], f);
        assert!(matches!(d.monic_eigenvalue(2), Err(Error::NotClassicalShape)));
    }

    #[test]
    fn aitken_recovers_power_law_limit() {
        let seq: Vec<Matrix> = (10..=30)
            .map(|k| Matrix::from_element(1, 1, 0.25 + 3.0 * 2f64.powi(-k).powf(0.5)))
            .collect();
        assert!((aitken_limit(&seq) - 0.25).abs() < 1e-9);
        let growing: Vec<Matrix> = (10..=30)
            .map(|k| Matrix::from_element(1, 1, 2f64.powi(k).sqrt()))
            .collect();
        assert!(aitken_limit(&growing) > 1e4);
    }
}
