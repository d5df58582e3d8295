//! The constant-matrix condition: find `M` with `(M − xΛ̄)W(x)` symmetric,
//! `Λ̄ = Λ_{N+1} + Λ_N`.

use serde::{Deserialize, Serialize};

use crate::diffop::RightDiffOp;
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, lstsq_affine, Matrix, Vector};
use crate::weights::{chebyshev_points, MatrixWeight};

/// Normalized residual below which a solution is declared to exist.
pub const EXISTS_TOL: f64 = 1e-8;

/// Normalized residual above which non-existence is declared.
pub const NOT_EXISTS_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypSolution {
    /// `Λ_{N+1} + Λ_N`.
    pub lambda_bar: Matrix,
    /// Affine set of `vec(M)` (row-major) minimizing the collocation residual.
    pub solutions: crate::linalg::AffineSolutionSet,
    pub exists: bool,
    /// Least-squares residual over the norm of the `x`-dependent right-hand side.
    pub normalized_min_residual: f64,
}

impl HypSolution {
    fn dim(&self) -> usize {
        self.lambda_bar.nrows()
    }

    /// Minimum-Frobenius-norm element of the solution set.
    pub fn canonical_m(&self) -> Matrix {
        unvec(&self.solutions.particular, self.dim())
    }

    /// Nullspace directions as matrices.
    pub fn nullspace_matrices(&self) -> Vec<Matrix> {
        self.solutions.nullspace.iter().map(|v| unvec(v, self.dim())).collect()
    }

    /// Euclidean distance from `m` to the affine solution set.
    pub fn distance(&self, m: &Matrix) -> f64 {
        self.solutions.distance(&vec_of(m))
    }
}

/// Row-major flattening.
pub fn vec_of(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.transpose().iter().copied())
}

fn unvec(v: &Vector, dim: usize) -> Matrix {
    Matrix::from_row_slice(dim, dim, v.as_slice())
}

/// `G(x) = (M − xΛ̄)W(x) − W(x)(M − xΛ̄)ᵀ`.
pub fn hyp_defect(w: &MatrixWeight, lambda_bar: &Matrix, m: &Matrix, x: f64) -> Result<Matrix> {
    let wx = w.eval(x)?;
    let a = m - lambda_bar * x;
    Ok(&a * &wx - &wx * a.transpose())
}

/// `max ‖G(x)‖∞ / ‖W(x)‖∞` over `points`.
pub fn hyp_pointwise_residual(w: &MatrixWeight, lambda_bar: &Matrix, m: &Matrix, points: &[f64]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &x in points {
        let g = hyp_defect(w, lambda_bar, m, x)?;
        worst = worst.max(inf_norm(&g) / inf_norm(&w.eval(x)?).max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Solve for `M` by collocation.
///
/// Scalar factors of distinct term classes are linearly independent
/// functions, so the identity must hold for every class separately:
/// `(M − xΛ̄)P_c − P_c(M − xΛ̄)ᵀ = 0` with `P_c` the polynomial part. Each
/// class contributes its `i < k` entries at `d + 3` Chebyshev points of the
/// weight frame, `d = deg P_c + 1`.
///
/// Fails with [`Error::HypInconclusive`] when the normalized residual falls
/// between [`EXISTS_TOL`] and [`NOT_EXISTS_TOL`].
pub fn solve_hyp(w: &MatrixWeight, d: &RightDiffOp, n: usize) -> Result<HypSolution> {
    let lambda_bar = d.monic_eigenvalue(n + 1)? + d.monic_eigenvalue(n)?;
    let r = w.dim();
    let frame = w.frame();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for class in w.term_classes() {
        let deg = class.polypart.degree() + 1;
        let pts = chebyshev_points(frame.center - frame.scale, frame.center + frame.scale, deg + 3);
        for x in pts {
            let p = class.polypart.eval(x);
            let known = (&lambda_bar * &p - &p * lambda_bar.transpose()) * x;
            for i in 0..r {
                for k in i + 1..r {
                    let mut row = vec![0.0; r * r];
                    for a in 0..r {
                        for b in 0..r {
                            let mut c = 0.0;
                            if i == a {
                                c += p[(b, k)];
                            }
                            if k == a {
                                c -= p[(i, b)];
                            }
                            row[a * r + b] = c;
                        }
                    }
                    rows.push(row);
                    rhs.push(known[(i, k)]);
                }
            }
        }
    }
    let a = Matrix::from_fn(rows.len(), r * r, |i, j| rows[i][j]);
    let b = Vector::from_vec(rhs);
    let solutions = lstsq_affine(&a, &b);
    let scale = b.norm();
    let normalized = if scale > 0.0 {
        solutions.residual / scale
    } else {
        solutions.residual
    };
    let exists = if normalized < EXISTS_TOL {
        true
    } else if normalized > NOT_EXISTS_TOL {
        false
    } else {
        return Err(Error::HypInconclusive { residual: normalized });
    };
    Ok(HypSolution {
        lambda_bar,
        solutions,
        exists,
        normalized_min_residual: normalized,
    })
}
