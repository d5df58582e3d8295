//! Dense real linear algebra at small dimension.
//!
//! Everything here works on `nalgebra` dynamic matrices. The block sizes in
//! this crate are tiny (R <= 4, a few hundred unknowns at most), so the
//! routines favour robustness over speed: symmetric eigendecompositions for
//! square roots, and an SVD with a relative cutoff for every rank decision.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative singular-value cutoff used for all rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Symmetry precondition for [`sym_eig`], relative to `‖A‖∞`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Smallest admissible `λ_min / λ_max` for [`spd_sqrt`].
pub const SPD_COND_TOL: f64 = 1e-13;

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖A − Aᵀ‖∞ / ‖A‖∞`, zero for the zero matrix.
pub fn symmetry_defect(a: &Matrix) -> f64 {
    let scale = inf_norm(a);
    if scale == 0.0 {
        return 0.0;
    }
    inf_norm(&(a - a.transpose())) / scale
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix,
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eig(a: &Matrix) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let defect = symmetry_defect(a);
    if defect > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { defect });
    }
    let eig = symmetrize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

fn spd_power(a: &Matrix, power: f64) -> Result<Matrix> {
    let eig = sym_eig(a)?;
    let max = eig.values.last().copied().unwrap_or(0.0);
    let min = eig.values.first().copied().unwrap_or(0.0);
    if !(max > 0.0) || min <= SPD_COND_TOL * max {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    let d = Matrix::from_diagonal(&Vector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|l| l.powf(power)),
    ));
    Ok(symmetrize(&(&eig.vectors * d * eig.vectors.transpose())))
}

/// Symmetric positive definite square root.
pub fn spd_sqrt(a: &Matrix) -> Result<Matrix> {
    spd_power(a, 0.5)
}

/// Inverse of [`spd_sqrt`].
pub fn spd_inv_sqrt(a: &Matrix) -> Result<Matrix> {
    spd_power(a, -0.5)
}

/// Affine solution set `{particular + span(nullspace)}` of a linear system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineSolutionSet {
    /// Minimum-norm least-squares solution.
    pub particular: Vector,
    /// Orthonormal basis of the numerical nullspace.
    pub nullspace: Vec<Vector>,
    /// `‖A·particular − b‖₂`.
    pub residual: f64,
}

impl AffineSolutionSet {
    pub fn dimension(&self) -> usize {
        self.nullspace.len()
    }

    /// Euclidean distance from `v` to the affine set.
    pub fn distance(&self, v: &Vector) -> f64 {
        let mut d = v - &self.particular;
        for n in &self.nullspace {
            let c = n.dot(&d);
            d -= n * c;
        }
        d.norm()
    }
}

/// Minimum-norm least squares for `A x = b` together with the numerical
/// nullspace of `A` (relative cutoff [`RANK_TOL`]).
///
/// Tall systems are first reduced by a QR factorization so the SVD is always
/// taken of a square matrix and yields a complete right singular basis.
pub fn lstsq_affine(a: &Matrix, b: &Vector) -> AffineSolutionSet {
    let (m, k) = a.shape();
    assert_eq!(m, b.len(), "right-hand side length must match row count");
    if k == 0 {
        return AffineSolutionSet {
            particular: Vector::zeros(0),
            nullspace: Vec::new(),
            residual: b.norm(),
        };
    }
    let (square, rhs) = if m >= k {
        let qr = a.clone().qr();
        let q = qr.q();
        (qr.r(), q.transpose() * b)
    } else {
        let mut sq = Matrix::zeros(k, k);
        sq.view_mut((0, 0), (m, k)).copy_from(a);
        let mut rhs = Vector::zeros(k);
        rhs.rows_mut(0, m).copy_from(b);
        (sq, rhs)
    };
    let svd = square.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |s, v| s.max(*v));
    let cutoff = RANK_TOL * sigma_max;

    let mut particular = Vector::zeros(k);
    let mut nullspace = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let v = v_t.row(i).transpose();
        if sigma_max > 0.0 && s > cutoff {
            let coef = u.column(i).dot(&rhs) / s;
            particular += v * coef;
        } else {
            nullspace.push(v);
        }
    }
    let residual = (a * &particular - b).norm();
    AffineSolutionSet {
        particular,
        nullspace,
        residual,
    }
}

/// Orthonormal basis of the numerical nullspace of `a`.
pub fn nullspace(a: &Matrix) -> Vec<Vector> {
    lstsq_affine(a, &Vector::zeros(a.nrows())).nullspace
}

/// Orthonormalize a list of vectors (modified Gram–Schmidt with one
/// reorthogonalization pass), dropping numerically dependent ones.
pub fn orthonormalize(vs: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for o in &out {
                let c = o.dot(&w);
                w -= o * c;
            }
        }
        let n = w.norm();
        if n > 1e-10 * norm0 {
            out.push(w / n);
        }
    }
    out
}

/// Relative distance of `v` to the span of an orthonormal basis.
pub fn distance_to_span(basis: &[Vector], v: &Vector) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut w = v.clone();
    for b in basis {
        let c = b.dot(&w);
        w -= b * c;
    }
    w.norm() / norm
}

/// Square matrix made of `blocks × blocks` square blocks of size `block_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix {
    pub blocks: usize,
    pub block_dim: usize,
    pub data: Matrix,
}

impl BlockMatrix {
    pub fn zeros(blocks: usize, block_dim: usize) -> Self {
        let n = blocks * block_dim;
        Self {
            blocks,
            block_dim,
            data: Matrix::zeros(n, n),
        }
    }

    pub fn identity(blocks: usize, block_dim: usize) -> Self {
        let n = blocks * block_dim;
        Self {
            blocks,
            block_dim,
            data: Matrix::identity(n, n),
        }
    }

    pub fn block(&self, i: usize, j: usize) -> Matrix {
        let r = self.block_dim;
        self.data.view((i * r, j * r), (r, r)).into_owned()
    }

    pub fn set_block(&mut self, i: usize, j: usize, m: &Matrix) {
        let r = self.block_dim;
        self.data.view_mut((i * r, j * r), (r, r)).copy_from(m);
    }

    pub fn dim(&self) -> usize {
        self.blocks * self.block_dim
    }

    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.data)
    }
}

/// Row-major nested vectors, the report encoding of a matrix.
pub fn to_rows(a: &Matrix) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(n, m, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> Matrix {
        let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        symmetrize(&a)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = sym_eig(&Matrix::identity(2, 2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let d = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, -1.0]));
        let e = sym_eig(&d).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
        // eigenvectors are the swapped axes
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstructs_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_symmetric(6, &mut rng);
        let e = sym_eig(&a).unwrap();
        let lam = Matrix::from_diagonal(&Vector::from_vec(e.values.clone()));
        let rec = &e.vectors * lam * e.vectors.transpose();
        assert!(max_abs(&(rec - &a)) < 1e-12);
        let ortho = e.vectors.transpose() * &e.vectors - Matrix::identity(6, 6);
        assert!(max_abs(&ortho) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_nonsymmetric() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        match sym_eig(&a) {
            Err(Error::NotSymmetric { defect }) => assert!(defect > 0.5),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn sqrt_examples() {
        let i = Matrix::identity(3, 3);
        assert!(max_abs(&(spd_sqrt(&i).unwrap() - &i)) < 1e-15);

        let d = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]));
        let s = spd_sqrt(&d).unwrap();
        let expected = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 3.0]));
        assert!(max_abs(&(s - expected)) < 1e-14);

        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let s = spd_sqrt(&a).unwrap();
        assert!(max_abs(&(&s * &s - &a)) < 1e-12);
        let si = spd_inv_sqrt(&a).unwrap();
        assert!(max_abs(&(&s * &si - Matrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match spd_sqrt(&a) {
            Err(Error::NotPositiveDefinite { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        let near_singular = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 1e-15]));
        assert!(spd_inv_sqrt(&near_singular).is_err());
    }

    #[test]
    fn lstsq_square_consistent() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let b = Vector::from_vec(vec![2.0, 0.0]);
        let s = lstsq_affine(&a, &b);
        assert!((s.particular[0] - 1.0).abs() < 1e-14);
        assert!((s.particular[1] - 1.0).abs() < 1e-14);
        assert_eq!(s.dimension(), 0);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn lstsq_underdetermined() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let b = Vector::from_vec(vec![1.0]);
        let s = lstsq_affine(&a, &b);
        assert!((s.particular[0] - 1.0).abs() < 1e-14);
        assert!(s.particular[1].abs() < 1e-14);
        assert_eq!(s.dimension(), 1);
        assert!((s.nullspace[0][1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lstsq_inconsistent() {
        // x = 0 and x = 1: least squares x = 1/2, residual 1/√2
        let a = Matrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = Vector::from_vec(vec![0.0, 1.0]);
        let s = lstsq_affine(&a, &b);
        assert!((s.particular[0] - 0.5).abs() < 1e-14);
        assert!((s.residual - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lstsq_degenerate_returns_full_space() {
        let a = Matrix::zeros(3, 2);
        let s = lstsq_affine(&a, &Vector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.particular.norm(), 0.0);
        assert!((s.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn affine_distance() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let s = lstsq_affine(&a, &Vector::from_vec(vec![1.0]));
        assert!(s.distance(&Vector::from_vec(vec![1.0, 7.0])) < 1e-14);
        assert!((s.distance(&Vector::from_vec(vec![3.0, 7.0])) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn block_matrix_roundtrip() {
        let mut b = BlockMatrix::zeros(3, 2);
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        b.set_block(1, 2, &m);
        assert_eq!(b.block(1, 2), m);
        assert_eq!(b.data[(2, 4)], 1.0);
        assert_eq!(b.data[(3, 5)], 4.0);
    }
}
