//! Linear searches for operators commuting with the time-and-band limiting
//! operators: symmetric block-tridiagonal matrices commuting with `E*E`, and
//! second-order differential operators with polynomial coefficients of
//! bounded degree commuting with the kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffop::RightDiffOp;
use crate::error::{Error, Result};
use crate::linalg::{distance_to_span, inf_norm, lstsq_affine, orthonormalize, BlockMatrix, Matrix, Vector};
use crate::orthopoly::MonicSequence;
use crate::weights::{quad_full, Frame, MatrixPolynomial, MatrixWeight};

/// Symmetric block-tridiagonal matrices commuting with a given block matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TridiagonalCommutant {
    /// Number of free parameters of a symmetric block-tridiagonal matrix of this shape.
    pub parameters: usize,
    pub dimension: usize,
    /// Orthonormal basis (Frobenius inner product) of the commutant.
    pub basis: Vec<Matrix>,
    /// Relative distance of the identity to the span of `basis`.
    pub identity_distance: f64,
}

/// Frobenius-orthonormal basis of the symmetric block-tridiagonal matrices
/// with `blocks` blocks of size `r`.
pub fn symmetric_tridiagonal_basis(blocks: usize, r: usize) -> Vec<Matrix> {
    let n = blocks * r;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for b in 0..blocks {
        for i in 0..r {
            for j in i..r {
                let (p, q) = (b * r + i, b * r + j);
                let mut m = Matrix::zeros(n, n);
                if p == q {
                    m[(p, p)] = 1.0;
                } else {
                    m[(p, q)] = s;
                    m[(q, p)] = s;
                }
                out.push(m);
            }
        }
        if b + 1 < blocks {
            for i in 0..r {
                for j in 0..r {
                    let (p, q) = (b * r + i, (b + 1) * r + j);
                    let mut m = Matrix::zeros(n, n);
                    m[(p, q)] = s;
                    m[(q, p)] = s;
                    out.push(m);
                }
            }
        }
    }
    out
}

fn flatten(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

/// Nullspace of `B ↦ [B, E]` over symmetric block-tridiagonal `B`.
///
/// For symmetric `B` and `E` the commutator is antisymmetric, so only its
/// strict upper triangle is imposed.
pub fn tridiagonal_commutant(e: &BlockMatrix) -> TridiagonalCommutant {
    let basis = symmetric_tridiagonal_basis(e.blocks, e.block_dim);
    let n = e.dim();
    let rows = n * (n - 1) / 2;
    let mut a = Matrix::zeros(rows.max(1), basis.len());
    for (k, b) in basis.iter().enumerate() {
        let c = b * &e.data - &e.data * b;
        let mut row = 0;
        for i in 0..n {
            for j in i + 1..n {
                a[(row, k)] = c[(i, j)];
                row += 1;
            }
        }
    }
    let null = lstsq_affine(&a, &Vector::zeros(a.nrows())).nullspace;
    let mats: Vec<Matrix> = null
        .iter()
        .map(|v| {
            basis
                .iter()
                .zip(v.iter())
                .fold(Matrix::zeros(n, n), |acc, (b, c)| acc + b * *c)
        })
        .collect();
    let flat: Vec<Vector> = mats.iter().map(flatten).collect();
    let identity_distance = distance_to_span(&flat, &flatten(&Matrix::identity(n, n)));
    TridiagonalCommutant {
        parameters: basis.len(),
        dimension: mats.len(),
        basis: mats,
        identity_distance,
    }
}

/// `‖[B, E]‖∞ / (‖B‖∞‖E‖∞)`.
pub fn commutator_residual(b: &Matrix, e: &Matrix) -> f64 {
    inf_norm(&(b * e - e * b)) / (inf_norm(b) * inf_norm(e)).max(f64::MIN_POSITIVE)
}

/// `I + 0.1·B` with `B` a seeded random element of the symmetric
/// block-tridiagonal basis span, normalized to `‖B‖∞ = 1`.
pub fn perturbed_identity(blocks: usize, r: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks * r;
    let b = symmetric_tridiagonal_basis(blocks, r)
        .iter()
        .fold(Matrix::zeros(n, n), |acc, m| acc + m * rng.gen_range(-1.0..1.0));
    Matrix::identity(n, n) + &b * (0.1 / inf_norm(&b).max(f64::MIN_POSITIVE))
}

/// Operator with coefficients `F₂, F₁, F₀` of local-frame degree `degree`
/// read from the layout of [`RightDiffOp::to_vec`].
pub fn op_from_vec(v: &[f64], dim: usize, degree: usize, frame: Frame) -> RightDiffOp {
    let per = (degree + 1) * dim * dim;
    assert_eq!(v.len(), 3 * per, "coefficient vector length");
    let poly = |chunk: &[f64]| {
        let coeffs = chunk
            .chunks(dim * dim)
            .map(|c| Matrix::from_column_slice(dim, dim, c))
            .collect();
        MatrixPolynomial::new(dim, frame, coeffs)
    };
    RightDiffOp::new(poly(&v[..per]), poly(&v[per..2 * per]), poly(&v[2 * per..])).expect("same dimension")
}

/// One stage of the differential-operator search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchStage {
    pub constraints: usize,
    pub dimension: usize,
    /// Smallest retained singular value over the largest discarded one
    /// (absent when nothing is discarded): how cleanly the rank was decided.
    pub rank_gap: Option<f64>,
    /// Orthonormal basis in the layout of [`RightDiffOp::to_vec`].
    pub basis: Vec<Vec<f64>>,
}

/// Result of [`diffop_commutant_search`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffopSearch {
    pub dim: usize,
    pub deg_max: usize,
    pub frame: Frame,
    pub unknowns: usize,
    /// Kernel commutation only.
    pub kernel: SearchStage,
    /// Kernel commutation and weak symmetry on the whole interval.
    pub symmetric: SearchStage,
    /// All of the above plus the boundary conditions at the finite endpoints and at `Ω`.
    pub bounded: SearchStage,
}

impl DiffopSearch {
    /// Largest relative distance of the given operators to the span of a stage.
    pub fn subspace_distance(&self, stage: &SearchStage, ops: &[RightDiffOp]) -> f64 {
        let basis: Vec<Vector> = stage.basis.iter().map(|v| Vector::from_column_slice(v)).collect();
        ops.iter()
            .map(|op| distance_to_span(&basis, &Vector::from_vec(op.to_frame(self.frame).to_vec(self.deg_max))))
            .fold(0.0, f64::max)
    }

    pub fn operators(&self, stage: &SearchStage) -> Vec<RightDiffOp> {
        stage
            .basis
            .iter()
            .map(|v| op_from_vec(v, self.dim, self.deg_max, self.frame))
            .collect()
    }
}

/// Highest coefficient degree allowed in [`diffop_commutant_search`].
pub const MAX_SEARCH_DEGREE: usize = 6;

struct Rows {
    unknowns: usize,
    rows: Vec<Vec<f64>>,
}

impl Rows {
    fn new(unknowns: usize) -> Self {
        Self {
            unknowns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            self.rows.push(row.into_iter().map(|v| v / norm).collect());
        }
    }

    fn stage(&self) -> SearchStage {
        let a = Matrix::from_fn(self.rows.len().max(1), self.unknowns, |i, j| {
            self.rows.get(i).map_or(0.0, |r| r[j])
        });
        let null = lstsq_affine(&a, &Vector::zeros(a.nrows())).nullspace;
        let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
        sv.resize(self.unknowns, 0.0);
        sv.sort_by(|x, y| y.total_cmp(x));
        let kept = self.unknowns - null.len();
        let rank_gap = match (null.len(), kept) {
            (0, _) => None,
            (_, 0) => Some(0.0),
            _ => Some(sv[kept - 1] / sv[kept].max(f64::MIN_POSITIVE)),
        };
        SearchStage {
            constraints: self.rows.len(),
            dimension: null.len(),
            rank_gap,
            basis: null.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

/// Unknown index of entry `(a, b)` of the `tˢ` coefficient of `F_j`.
fn index(j: usize, s: usize, a: usize, b: usize, dim: usize, deg: usize) -> usize {
    let block = 2 - j;
    ((block * (deg + 1) + s) * dim + b) * dim + a
}

/// Second-order operators `∂²F₂ + ∂F₁ + F₀`, `Fⱼ` of degree `≤ deg_max` in
/// the local frame of `w`, that (i) commute with the kernel
/// `k(x,y) = Σ_{n ≤ N} Qₙ(x)ᵀQₙ(y)`, (ii) are weakly symmetric on the whole
/// interval against `tᵏI, tˡI` for `k ≤ l ≤ N + 2`, and (iii) satisfy the
/// boundary conditions `F₂W = 0`, `F₁W − WF₁ᵀ = 0` at `Ω` and at finite
/// endpoints where `W` is regular and nonzero.
///
/// Kernel probes are seeded pairs in the frame image of `(−1, 1)²`, enough
/// for at least three rows per unknown. Every row is normalized.
pub fn diffop_commutant_search(
    seq: &MonicSequence,
    w: &MatrixWeight,
    n: usize,
    omega: f64,
    deg_max: usize,
    seed: u64,
) -> Result<DiffopSearch> {
    if deg_max > MAX_SEARCH_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "coefficient degree {deg_max} exceeds the search limit {MAX_SEARCH_DEGREE}"
        )));
    }
    if seq.n_max < n {
        return Err(Error::InvalidParameter(format!(
            "kernel of order {n} needs the sequence through degree {n}"
        )));
    }
    let r = w.dim();
    let frame = w.frame();
    let unknowns = 3 * (deg_max + 1) * r * r;
    let mut rows = Rows::new(unknowns);
    let tpow = |x: f64| -> Vec<f64> {
        let t = frame.local(x);
        (0..=deg_max)
            .scan(1.0, |acc, _| {
                let v = *acc;
                *acc *= t;
                Some(v)
            })
            .collect()
    };

    // (i) kernel commutation: Σⱼ Kⱼ(x;y)Fⱼ(x) − Fⱼ(y)ᵀKⱼ(y;x)ᵀ = 0,
    // Kⱼ(x;y) = Σₙ Qₙ(y)ᵀQₙ⁽ʲ⁾(x).
    let kernel_jets = |x: f64, y: f64| -> [Matrix; 3] {
        let jx = seq.q_jet(x);
        let qy = seq.q_values(y);
        let mut k = [Matrix::zeros(r, r), Matrix::zeros(r, r), Matrix::zeros(r, r)];
        for m in 0..=n {
            for (j, kj) in k.iter_mut().enumerate() {
                *kj += qy[m].transpose() * &jx[m][j];
            }
        }
        k
    };
    let pairs = (3 * unknowns).div_ceil(r * r) + 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = w.interval();
    for _ in 0..pairs {
        let x = frame.center + frame.scale * rng.gen_range(-1.0..1.0);
        let y = frame.center + frame.scale * rng.gen_range(-1.0..1.0);
        if !(x > lo && x < hi && y > lo && y < hi) {
            continue;
        }
        let (kx, ky) = (kernel_jets(x, y), kernel_jets(y, x));
        let (tx, ty) = (tpow(x), tpow(y));
        for al in 0..r {
            for be in 0..r {
                let mut row = vec![0.0; unknowns];
                for j in 0..3 {
                    for s in 0..=deg_max {
                        for a in 0..r {
                            for b in 0..r {
                                let mut c = 0.0;
                                if b == be {
                                    c += tx[s] * kx[j][(al, a)];
                                }
                                if al == b {
                                    c -= ty[s] * ky[j][(be, a)];
                                }
                                row[index(j, s, a, b, r, deg_max)] += c;
                            }
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    let kernel = rows.stage();

    // (ii) weak symmetry ⟨pI·D, qI⟩ = ⟨pI, qI·D⟩ with p = tᵏ, q = tˡ.
    let top = n + 2;
    let rule = quad_full(w, 2 * top + deg_max);
    let h = frame.scale;
    let mono = |t: f64, k: usize, j: usize| -> f64 {
        // j-th x-derivative of tᵏ
        let fall = (0..j).fold(1.0, |acc, i| acc * (k as f64 - i as f64));
        if j > k {
            0.0
        } else {
            fall * t.powi((k - j) as i32) / h.powi(j as i32)
        }
    };
    for k in 0..=top {
        for l in k..=top {
            let mut block = vec![vec![0.0; unknowns]; r * r];
            for (x, g) in rule.points.iter().zip(&rule.masses) {
                let t = frame.local(*x);
                let ts = tpow(*x);
                for j in 0..3 {
                    let (pj, q) = (mono(t, k, j), mono(t, l, 0));
                    let (p, qj) = (mono(t, k, 0), mono(t, l, j));
                    for s in 0..=deg_max {
                        for a in 0..r {
                            for b in 0..r {
                                let idx = index(j, s, a, b, r, deg_max);
                                for al in 0..r {
                                    for be in 0..r {
                                        let mut c = 0.0;
                                        if al == a {
                                            c += pj * q * g[(b, be)];
                                        }
                                        if a == be {
                                            c -= p * qj * g[(al, b)];
                                        }
                                        block[al * r + be][idx] += c * ts[s];
                                    }
                                }
                            }
                        }
                    }
                }
            }
            for row in block {
                rows.push(row);
            }
        }
    }
    let symmetric = rows.stage();

    // (iii) boundary conditions.
    let mut ends = vec![omega];
    for e in [lo, hi] {
        if e.is_finite() {
            let exps: Vec<f64> = w.terms().iter().map(|t| t.factor.endpoint_exponent(e)).collect();
            if exps.iter().all(|v| *v == 0.0) {
                ends.push(e);
            }
        }
    }
    for e in ends {
        let we = w.eval(e)?;
        let ts = tpow(e);
        // F₂(e)W(e) = 0
        for al in 0..r {
            for be in 0..r {
                let mut row = vec![0.0; unknowns];
                for s in 0..=deg_max {
                    for b in 0..r {
                        row[index(2, s, al, b, r, deg_max)] += ts[s] * we[(b, be)];
                    }
                }
                rows.push(row);
            }
        }
        // F₁(e)W(e) − W(e)F₁(e)ᵀ = 0, antisymmetric: strict upper triangle
        for al in 0..r {
            for be in al + 1..r {
                let mut row = vec![0.0; unknowns];
                for s in 0..=deg_max {
                    for b in 0..r {
                        row[index(1, s, al, b, r, deg_max)] += ts[s] * we[(b, be)];
                        row[index(1, s, be, b, r, deg_max)] -= ts[s] * we[(al, b)];
                    }
                }
                rows.push(row);
            }
        }
    }
    let bounded = rows.stage();

    Ok(DiffopSearch {
        dim: r,
        deg_max,
        frame,
        unknowns,
        kernel,
        symmetric,
        bounded,
    })
}

/// Orthonormal coefficient basis of a list of operators, in the layout of
/// [`RightDiffOp::to_vec`] for the given frame and degree.
pub fn operator_span(ops: &[RightDiffOp], frame: Frame, degree: usize) -> Vec<Vector> {
    let vs: Vec<Vector> = ops
        .iter()
        .map(|op| Vector::from_vec(op.to_frame(frame).to_vec(degree)))
        .collect();
    orthonormalize(&vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::BlockMatrix;
    use crate::weights::catalog_get;
    use serde_json::json;

    #[test]
    fn basis_is_orthonormal_and_complete() {
        let b = symmetric_tridiagonal_basis(3, 2);
        assert_eq!(b.len(), 3 * 3 + 2 * 4);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = x.component_mul(y).sum();
                assert!((ip - f64::from(u8::from(i == j))).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_commutes_with_everything() {
        let e = BlockMatrix::identity(3, 2);
        let c = tridiagonal_commutant(&e);
        assert_eq!(c.dimension, c.parameters);
        assert!(c.identity_distance < 1e-12);
    }

    #[test]
    fn generic_symmetric_matrix_has_trivial_commutant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // 4 blocks of size 2: 24 unknowns against 28 equations
        let m = Matrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
        let mut e = BlockMatrix::zeros(4, 2);
        e.data = &m + m.transpose();
        let c = tridiagonal_commutant(&e);
        assert_eq!(c.dimension, 1);
        assert!(c.identity_distance < 1e-12);
    }

    #[test]
    fn vec_layout_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v: Vec<f64> = (0..3 * 3 * 4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Frame::new(0.5, 0.5);
        let op = op_from_vec(&v, 2, 2, f);
        assert_eq!(op.to_vec(2), v);
        assert_eq!(index(1, 2, 1, 0, 2, 2), 3 * 4 + 2 * 4 + 1);
    }

    #[test]
    fn scalar_legendre_search_finds_identity_and_t() {
        let e = catalog_get("scalar_jacobi", &json!({})).unwrap();
        let seq = crate::orthopoly::monic_sequence(&e.weight, 6).unwrap();
        let s = diffop_commutant_search(&seq, &e.weight, 3, 0.4, 3, 2).unwrap();
        assert!(s.bounded.dimension >= 2);
        let setup = crate::commuting::TimeBandSetup::new(&e.weight, &e.operators[0].op, 3, 0.4, 6, 1e-12).unwrap();
        let id = RightDiffOp::identity(1, e.weight.frame());
        assert!(s.subspace_distance(&s.bounded, &[id, setup.t.clone()]) < 1e-8);
    }
}
