//! Discrete matrix measures approximating `W(x) dx` on `(a, b)` or `(a, Ω]`.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, symmetrize, Matrix};

use super::gauss::{gauss_hermite, gauss_jacobi, gauss_legendre, nodes_for_degree, GaussRule};
use super::{MatrixWeight, ScalarFactor, WeightTerm};

/// Default relative tolerance for truncated rules.
pub const TRUNCATED_TOL: f64 = 1e-12;

/// Gaussian tails are cut this far below the centre.
pub const GAUSSIAN_CUTOFF: f64 = 9.0;

const MAX_JACOBI_NODES: usize = 512;
const PANEL_ORDER: usize = 16;
const MAX_PANELS: usize = 2048;

/// Points `xᵢ` with matrix masses `Gᵢ`, so `∫ F W Gᵀ ≈ Σ F(xᵢ) Gᵢ G(xᵢ)ᵀ`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<f64>,
    pub masses: Vec<Matrix>,
    /// Integrals of `P W Qᵀ` are exact (or converged) for `deg P + deg Q` up to this.
    pub exact_degree: usize,
    /// Self-reported relative error; zero for exact Gauss rules.
    pub error_estimate: f64,
    /// Right end of the integration range.
    pub upper: f64,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ F(xᵢ) Gᵢ G(xᵢ)ᵀ` for arbitrary matrix functions.
    pub fn integrate(&self, left: impl Fn(f64) -> Matrix, right: impl Fn(f64) -> Matrix) -> Matrix {
        let dim = self.masses.first().map_or(0, |m| m.nrows());
        let mut acc = Matrix::zeros(dim, dim);
        for (x, g) in self.points.iter().zip(&self.masses) {
            acc += left(*x) * g * right(*x).transpose();
        }
        acc
    }

    /// Factors `Lᵢ` with `Gᵢ = LᵢLᵢᵀ`, one column per positive eigenvalue.
    ///
    /// Sums of the form `Σ (F(xᵢ)Lᵢ)(G(xᵢ)Lᵢ)ᵀ` avoid the cancellation in
    /// `F(xᵢ)GᵢG(xᵢ)ᵀ` when `F(xᵢ)` is large in a direction the mass does
    /// not see.
    pub fn mass_factors(&self) -> Vec<Matrix> {
        self.masses
            .iter()
            .map(|g| {
                let e = symmetrize(g).symmetric_eigen();
                let top = e.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
                let keep: Vec<usize> = (0..g.nrows())
                    .filter(|&j| e.eigenvalues[j] > top * f64::EPSILON)
                    .collect();
                let mut l = Matrix::zeros(g.nrows(), keep.len());
                for (c, &j) in keep.iter().enumerate() {
                    l.set_column(c, &(e.eigenvectors.column(j) * e.eigenvalues[j].sqrt()));
                }
                l
            })
            .collect()
    }

    /// `Σ Gᵢ tᵢᵏ` for `k = 0..=degree`, with `t` the local variable of the weight frame.
    fn moments(&self, w: &MatrixWeight, degree: usize) -> Vec<Matrix> {
        let frame = w.frame();
        let mut out = vec![Matrix::zeros(w.dim(), w.dim()); degree + 1];
        for (x, g) in self.points.iter().zip(&self.masses) {
            let t = frame.local(*x);
            let mut p = 1.0;
            for m in out.iter_mut() {
                *m += g * p;
                p *= t;
            }
        }
        out
    }

    fn extend(&mut self, other: QuadRule) {
        self.points.extend(other.points);
        self.masses.extend(other.masses);
        self.error_estimate = self.error_estimate.max(other.error_estimate);
    }
}

fn masses_for(term: &WeightTerm, rule: &GaussRule, extra: impl Fn(f64) -> f64) -> QuadRule {
    let masses = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| term.polypart.eval(*x) * (w * extra(*x)))
        .collect();
    QuadRule {
        points: rule.nodes.clone(),
        masses,
        exact_degree: usize::MAX,
        error_estimate: 0.0,
        upper: f64::NAN,
    }
}

/// Gauss rule for `(b − x)^α (x − a)^β` on `[a, b]`.
pub fn jacobi_on(n: usize, alpha: f64, beta: f64, a: f64, b: f64) -> GaussRule {
    let h = 0.5 * (b - a);
    let mut r = gauss_jacobi(n, alpha, beta).mapped(a, b);
    let mult = h.powf(alpha + beta);
    for w in r.weights.iter_mut() {
        *w *= mult;
    }
    r
}

/// Exact rule for `∫ P W Qᵀ` with `deg P + deg Q ≤ poly_degree`.
pub fn quad_full(w: &MatrixWeight, poly_degree: usize) -> QuadRule {
    let (a, b) = w.interval();
    let mut out = QuadRule {
        points: Vec::new(),
        masses: Vec::new(),
        exact_degree: poly_degree,
        error_estimate: 0.0,
        upper: b,
    };
    for term in w.terms() {
        let n = nodes_for_degree(poly_degree + term.polypart.degree());
        let rule = match term.factor {
            ScalarFactor::ShiftedGaussian { c, s } => {
                let mut r = gauss_hermite(n);
                for x in r.nodes.iter_mut() {
                    *x += c;
                }
                for v in r.weights.iter_mut() {
                    *v *= s;
                }
                r
            }
            ScalarFactor::Unit => gauss_legendre(n).mapped(a, b),
            f => {
                let (alpha, beta, fa, fb) = f.as_jacobi().unwrap();
                jacobi_on(n, alpha, beta, fa, fb)
            }
        };
        out.extend(masses_for(term, &rule, |_| 1.0));
    }
    out
}

/// Rule on `(a, Ω]` for `deg P + deg Q ≤ poly_degree`, refined until the
/// weight moments in the local frame change by less than `tol` (relative).
///
/// `Ω = b` returns the exact full rule.
pub fn quad_truncated(w: &MatrixWeight, omega: f64, poly_degree: usize, tol: f64) -> Result<QuadRule> {
    let (a, b) = w.interval();
    if omega == b {
        return Ok(quad_full(w, poly_degree));
    }
    if !(omega > a && omega < b) {
        return Err(Error::OutsideInterval { x: omega, a, b });
    }
    let mut out = QuadRule {
        points: Vec::new(),
        masses: Vec::new(),
        exact_degree: poly_degree,
        error_estimate: 0.0,
        upper: omega,
    };
    for term in w.terms() {
        let base = nodes_for_degree(poly_degree + term.polypart.degree());
        let part = match term.factor {
            ScalarFactor::Unit => masses_for(term, &gauss_legendre(base).mapped(a, omega), |_| 1.0),
            ScalarFactor::ShiftedGaussian { c, s } => {
                let lo = c - GAUSSIAN_CUTOFF;
                if omega <= lo {
                    continue;
                }
                let panels0 = ((omega - lo).ceil() as usize).max(1);
                refine(w, poly_degree, tol, panels0, MAX_PANELS, |p| {
                    let r = composite_legendre(lo, omega, p);
                    masses_for(term, &r, |x| s * (-(x - c) * (x - c)).exp())
                })?
            }
            f => {
                let (alpha, beta, _, fb) = f.as_jacobi().unwrap();
                refine(w, poly_degree, tol, base.max(8), MAX_JACOBI_NODES, |n| {
                    let r = jacobi_on(n, 0.0, beta, a, omega);
                    masses_for(term, &r, |x| (fb - x).powf(alpha))
                })?
            }
        };
        out.extend(part);
    }
    Ok(out)
}

fn refine(
    w: &MatrixWeight,
    degree: usize,
    tol: f64,
    start: usize,
    cap: usize,
    build: impl Fn(usize) -> QuadRule,
) -> Result<QuadRule> {
    let mut n = start;
    let mut prev_m = build(n).moments(w, degree);
    loop {
        let next_n = n * 2;
        if next_n > cap {
            return Err(Error::QuadratureFailure(format!(
                "no convergence to {tol:.1e} with {n} nodes/panels"
            )));
        }
        let next = build(next_n);
        let next_m = next.moments(w, degree);
        let scale = next_m.iter().map(max_abs).fold(0.0, f64::max);
        let diff = next_m
            .iter()
            .zip(&prev_m)
            .map(|(x, y)| max_abs(&(x - y)))
            .fold(0.0, f64::max);
        let rel = if scale > 0.0 { diff / scale } else { 0.0 };
        if rel < tol {
            let mut r = next;
            r.error_estimate = rel;
            return Ok(r);
        }
        n = next_n;
        prev_m = next_m;
    }
}

/// Composite Gauss–Legendre with `panels` equal panels on `[lo, hi]`.
pub fn composite_legendre(lo: f64, hi: f64, panels: usize) -> GaussRule {
    let base = gauss_legendre(PANEL_ORDER);
    let h = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
    let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let r = base.mapped(lo + p as f64 * h, lo + (p + 1) as f64 * h);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    GaussRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Frame, MatrixPolynomial};
    use std::f64::consts::PI;

    fn scalar(factor: ScalarFactor, a: f64, b: f64) -> MatrixWeight {
        MatrixWeight::new(
            1,
            a,
            b,
            vec![WeightTerm {
                factor,
                polypart: MatrixPolynomial::identity(1, Frame::IDENTITY),
            }],
        )
        .unwrap()
    }

    fn one(_: f64) -> Matrix {
        Matrix::identity(1, 1)
    }

    #[test]
    fn unit_weight_degree_three_uses_two_nodes() {
        let w = scalar(ScalarFactor::Unit, -1.0, 1.0);
        let r = quad_full(&w, 3);
        assert_eq!(r.len(), 2);
        let s = 1.0 / 3f64.sqrt();
        assert!((r.points[0] + s).abs() < 1e-15 && (r.points[1] - s).abs() < 1e-15);
    }

    #[test]
    fn semicircle_integral() {
        let w = scalar(ScalarFactor::Gegenbauer { gamma: 0.5 }, -1.0, 1.0);
        let v = quad_full(&w, 0).integrate(one, one)[(0, 0)];
        assert!((v - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn shifted_gaussian_mass() {
        let w = scalar(
            ScalarFactor::ShiftedGaussian { c: -1.0, s: 1.0 },
            f64::NEG_INFINITY,
            f64::INFINITY,
        );
        let v = quad_full(&w, 0).integrate(one, one)[(0, 0)];
        assert!((v - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn truncated_unit_half_interval() {
        let w = scalar(ScalarFactor::Unit, -1.0, 1.0);
        let r = quad_truncated(&w, 0.0, 4, TRUNCATED_TOL).unwrap();
        assert!((r.integrate(one, one)[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_gaussian_half_mass() {
        let w = scalar(
            ScalarFactor::ShiftedGaussian { c: 0.5, s: 1.0 },
            f64::NEG_INFINITY,
            f64::INFINITY,
        );
        let r = quad_truncated(&w, 0.5, 6, TRUNCATED_TOL).unwrap();
        assert!((r.integrate(one, one)[(0, 0)] - 0.5 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn truncated_rejects_exterior_omega() {
        let w = scalar(ScalarFactor::Unit, 0.0, 1.0);
        assert!(quad_truncated(&w, 1.5, 2, TRUNCATED_TOL).is_err());
        assert!(quad_truncated(&w, 0.0, 2, TRUNCATED_TOL).is_err());
    }
}
