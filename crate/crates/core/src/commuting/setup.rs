//! The time-and-band limiting setup for a fixed `N` and `Ω`: the commuting
//! operator `T`, its block-tridiagonal matrix `L`, the block matrix `E*E`,
//! the kernel, and the commutation checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffop::{check_symmetry, Domain, RightDiffOp};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, max_abs, sym_eig, symmetrize, BlockMatrix, Matrix};
use crate::orthopoly::{monic_sequence, MonicSequence, MAX_DEGREE};
use crate::weights::{quad_truncated, MatrixPolynomial, MatrixWeight};

use super::hyp::{hyp_pointwise_residual, solve_hyp, HypSolution};

/// Agreement required between closed-form and quadrature `Xₙ`, relative to `max(1, ‖Xₙ‖∞)`.
pub const X_CROSS_TOL: f64 = 1e-9;
/// `X_N = 0` tolerance.
pub const DECOUPLING_TOL: f64 = 1e-10;
/// Symmetry of `Yₙ`, relative to `max(1, ‖Yₙ‖∞)`.
pub const Y_SYMMETRY_TOL: f64 = 1e-9;
/// Slack on the spectrum of `E*E` outside `[0, 1]`.
pub const SPECTRUM_SLACK: f64 = 1e-8;
/// Relative gap below which eigenvalues of `L̂` are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

/// `(T_{n,n−1}, T_{n,n}, T_{n,n+1}) = (Zₙ, Yₙ, Xₙ)` with `Zₙ₊₁ = Xₙᵀ`; row `n`
/// holds the coefficients of `QₙT = XₙQₙ₊₁ + YₙQₙ + ZₙQₙ₋₁`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockTridiagonal {
    pub block_dim: usize,
    /// `Y₀ … Y_{n_max}`.
    pub diagonal: Vec<Matrix>,
    /// `X₀ … X_{n_max−1}`.
    pub upper: Vec<Matrix>,
}

impl BlockTridiagonal {
    pub fn blocks(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense symmetric expansion of the leading `blocks × blocks` part.
    pub fn leading(&self, blocks: usize) -> BlockMatrix {
        let blocks = blocks.min(self.blocks());
        let mut out = BlockMatrix::zeros(blocks, self.block_dim);
        for n in 0..blocks {
            out.set_block(n, n, &self.diagonal[n]);
            if n + 1 < blocks {
                out.set_block(n, n + 1, &self.upper[n]);
                out.set_block(n + 1, n, &self.upper[n].transpose());
            }
        }
        out
    }

    pub fn to_block_matrix(&self) -> BlockMatrix {
        self.leading(self.blocks())
    }
}

/// `½T`: coefficients `((x−Ω)F₂, (x−Ω)F₁ + F₂, (x−Ω)F₀ + ½(F₁ − xΛ̄ + M))`,
/// without checking that `M` is admissible.
pub fn build_t_unchecked(d: &RightDiffOp, m: &Matrix, lambda_bar: &Matrix, omega: f64) -> RightDiffOp {
    let frame = d.frame();
    let shift = |p: &MatrixPolynomial| &p.mul_x() - &p.scale(omega);
    let t2 = shift(d.f2());
    let t1 = &shift(d.f1()) + d.f2();
    let extra =
        &(d.f1() - &MatrixPolynomial::x_times(lambda_bar, frame)) + &MatrixPolynomial::constant(m.clone(), frame);
    let t0 = &shift(d.f0()) + &extra.scale(0.5);
    RightDiffOp::new(t2, t1, t0).expect("coefficients share the dimension of D")
}

/// `½T` for an admissible `M`, verified symmetric on `(a, b)` and on `(a, Ω)`.
pub fn build_t(w: &MatrixWeight, d: &RightDiffOp, m: &Matrix, n: usize, omega: f64) -> Result<RightDiffOp> {
    let lambda_bar = d.monic_eigenvalue(n + 1)? + d.monic_eigenvalue(n)?;
    let samples = w.chebyshev_samples(50);
    let residual = hyp_pointwise_residual(w, &lambda_bar, m, &samples)?;
    let reach = samples.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    let scale = 1.0 + inf_norm(m) + reach * inf_norm(&lambda_bar);
    if residual > 1e-9 * scale {
        return Err(Error::HypNotSatisfied { residual });
    }
    let t = build_t_unchecked(d, m, &lambda_bar, omega);
    for (label, domain) in [("full", Domain::Full), ("truncated", Domain::Truncated { omega })] {
        let rep = check_symmetry(&t, w, domain);
        if !rep.verdict {
            return Err(Error::CrossCheck {
                check: format!("T symmetric ({label})"),
                defect: rep.max_residual().max(rep.max_boundary_defect()),
                tolerance: rep.tolerance,
            });
        }
    }
    Ok(t)
}

/// Block matrix `(⟨QₘT, Qₙ⟩)` for `m, n ≤ upto` over the full interval,
/// with `QₘT` evaluated pointwise from recursion jets.
pub fn operator_gram(seq: &MonicSequence, t: &RightDiffOp, upto: usize) -> Result<BlockMatrix> {
    if upto > seq.n_max {
        return Err(Error::InvalidParameter(format!(
            "operator matrix up to {upto} needs a sequence of that length (have {})",
            seq.n_max
        )));
    }
    let rule = &seq.rule;
    let mut g = BlockMatrix::zeros(upto + 1, seq.dim());
    for (x, mass) in rule.points.iter().zip(&rule.masses) {
        let jets = seq.q_jet(*x);
        let [f0, f1, f2] = t.eval(*x);
        let right: Vec<Matrix> = jets[..=upto].iter().map(|j| mass * j[0].transpose()).collect();
        for (m, jet) in jets[..=upto].iter().enumerate() {
            let qt = &jet[2] * &f2 + &jet[1] * &f1 + &jet[0] * &f0;
            for (n, r) in right.iter().enumerate() {
                let cur = g.block(m, n) + &qt * r;
                g.set_block(m, n, &cur);
            }
        }
    }
    Ok(g)
}

/// `L` with closed-form `Xₙ = ½‖Rₙ‖⁻¹(Λₙ₊₁ + Λₙ − Λ̄)‖Rₙ₊₁‖` and quadrature
/// `Yₙ = ⟨QₙT, Qₙ⟩`, cross-checked against quadrature `Xₙ = ⟨QₙT, Qₙ₊₁⟩`.
/// The factor ½ matches the normalization of [`build_t`].
pub fn build_l(
    seq: &MonicSequence,
    d: &RightDiffOp,
    t: &RightDiffOp,
    lambda_bar: &Matrix,
    n: usize,
    n_max: usize,
) -> Result<BlockTridiagonal> {
    if seq.n_max < n_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "L up to block {n_max} needs the sequence through degree {}",
            n_max + 1
        )));
    }
    let g = operator_gram(seq, t, n_max + 1)?;
    let mut diagonal = Vec::with_capacity(n_max + 1);
    let mut upper = Vec::with_capacity(n_max);
    for k in 0..=n_max {
        let y = g.block(k, k);
        let scale = inf_norm(&y).max(1.0);
        let asym = max_abs(&(&y - y.transpose())) / scale;
        if asym > Y_SYMMETRY_TOL {
            return Err(Error::CrossCheck {
                check: format!("Y_{k} symmetric"),
                defect: asym,
                tolerance: Y_SYMMETRY_TOL,
            });
        }
        diagonal.push(y);
        if k < n_max {
            let lam = d.monic_eigenvalue(k + 1)? + d.monic_eigenvalue(k)? - lambda_bar;
            let x = (&seq.s[k] * lam * &seq.norms[k + 1]) * 0.5;
            let quad = g.block(k, k + 1);
            let defect = max_abs(&(&x - &quad)) / inf_norm(&x).max(1.0);
            if defect > X_CROSS_TOL {
                return Err(Error::CrossCheck {
                    check: format!("closed-form X_{k} against quadrature"),
                    defect,
                    tolerance: X_CROSS_TOL,
                });
            }
            if k == n && max_abs(&x) > DECOUPLING_TOL {
                return Err(Error::CrossCheck {
                    check: format!("X_{n} = 0"),
                    defect: max_abs(&x),
                    tolerance: DECOUPLING_TOL,
                });
            }
            upper.push(x);
        }
    }
    Ok(BlockTridiagonal {
        block_dim: seq.dim(),
        diagonal,
        upper,
    })
}

/// `(E*E)ₘₙ = ∫ₐ^Ω QₘWQₙᵀ` for `m, n ≤ N`, with its spectrum checked to lie in `[0, 1]`.
pub fn build_estar_e(seq: &MonicSequence, w: &MatrixWeight, n: usize, omega: f64, tol: f64) -> Result<BlockMatrix> {
    let rule = quad_truncated(w, omega, 2 * n, tol)?;
    let mut e = seq.gram(n, &rule)?;
    e.data = symmetrize(&e.data);
    let eig = sym_eig(&e.data)?;
    let lo = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let excess = (-lo).max(hi - 1.0);
    if excess > SPECTRUM_SLACK {
        return Err(Error::CrossCheck {
            check: "spectrum of E*E within [0, 1]".into(),
            defect: excess,
            tolerance: SPECTRUM_SLACK,
        });
    }
    Ok(e)
}

/// `k(x, y) = Σ_{n ≤ N} Qₙ(x)ᵀQₙ(y)`.
pub fn kernel_eval(seq: &MonicSequence, n: usize, x: f64, y: f64) -> Matrix {
    let qx = seq.q_values(x);
    let qy = seq.q_values(y);
    (0..=n).map(|k| qx[k].transpose() * &qy[k]).sum()
}

/// `count` seeded pairs drawn uniformly from `(lo, hi)²`.
pub fn probe_pairs(lo: f64, hi: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.gen_range(lo..hi), rng.gen_range(lo..hi)))
        .collect()
}

/// Seeded random matrix polynomial of the given degree in the weight frame,
/// coefficients uniform in `[−1, 1]`.
pub fn random_polynomial(w: &MatrixWeight, degree: usize, rng: &mut impl Rng) -> MatrixPolynomial {
    let r = w.dim();
    let coeffs = (0..=degree)
        .map(|_| Matrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0)))
        .collect();
    MatrixPolynomial::new(r, w.frame(), coeffs)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelCheck {
    /// Sup relative residual of `k(x,y)*T_x = (k(x,y)T_y)*` over the probes.
    pub kernel_residual: f64,
    /// Sup relative coefficient residual of `(fT)S = (fS)T` over random `f`.
    pub operator_residual: f64,
    pub probes: usize,
    pub polynomials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointDiagonalization {
    /// Eigenvalues of `L̂`, ascending.
    pub spectrum: Vec<f64>,
    /// Smallest gap between consecutive eigenvalues of `L̂`.
    pub min_gap: f64,
    /// Number of eigenvalue clusters (gaps below [`CLUSTER_TOL`] merged).
    pub clusters: usize,
    /// Sup of `|VᵀE*EV|` between different clusters, `V` the eigenvectors of `L̂`.
    pub offdiag: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutationReport {
    /// `‖L̂·E*E − E*E·L̂‖∞ / ‖E*E‖∞`.
    pub comm_residual: f64,
    pub joint: JointDiagonalization,
    /// Eigenvalues of `E*E`, ascending.
    pub estar_e_spectrum: Vec<f64>,
    /// Largest over smallest gap between consecutive eigenvalues of `E*E`.
    pub estar_e_gap_ratio: f64,
}

/// `‖L̂E − EL̂‖∞ / ‖E‖∞`.
pub fn commutation_residual(l_hat: &Matrix, e: &Matrix) -> f64 {
    inf_norm(&(l_hat * e - e * l_hat)) / inf_norm(e).max(f64::MIN_POSITIVE)
}

/// Eigenvectors of `L̂` applied to `E`: how far `VᵀEV` is from block diagonal
/// with respect to the eigenvalue clusters of `L̂`.
pub fn joint_diagonalization(l_hat: &Matrix, e: &Matrix) -> Result<JointDiagonalization> {
    let eig = sym_eig(&symmetrize(l_hat))?;
    let v = &eig.vectors;
    let c = v.transpose() * e * v;
    let vals = &eig.values;
    let n = vals.len();
    let scale = vals.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    let mut cluster = vec![0usize; n];
    let mut min_gap = f64::INFINITY;
    for i in 1..n {
        let gap = vals[i] - vals[i - 1];
        min_gap = min_gap.min(gap);
        cluster[i] = cluster[i - 1] + usize::from(gap >= CLUSTER_TOL * scale);
    }
    let mut offdiag = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if cluster[i] != cluster[j] {
                offdiag = offdiag.max(c[(i, j)].abs());
            }
        }
    }
    Ok(JointDiagonalization {
        spectrum: vals.to_vec(),
        min_gap: if n > 1 { min_gap } else { 0.0 },
        clusters: cluster.last().map_or(0, |c| c + 1),
        offdiag,
    })
}

/// Seeded symmetric matrix with entries of `A + Aᵀ`, `A` uniform in `[−1, 1]`.
pub fn random_symmetric(dim: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    &a + a.transpose()
}

/// Largest over smallest gap between consecutive sorted values.
pub fn gap_ratio(sorted: &[f64]) -> f64 {
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let max = gaps.iter().cloned().fold(0.0, f64::max);
    let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    if gaps.is_empty() {
        1.0
    } else {
        max / min.max(f64::MIN_POSITIVE)
    }
}

/// Everything attached to a weight, an operator `D`, a time cutoff `N` and a band cutoff `Ω`.
#[derive(Debug, Clone)]
pub struct TimeBandSetup {
    pub weight: MatrixWeight,
    pub d: RightDiffOp,
    pub n: usize,
    pub omega: f64,
    pub n_max: usize,
    /// Truncated-quadrature tolerance.
    pub tol: f64,
    pub sequence: MonicSequence,
    pub hyp: HypSolution,
    pub m: Matrix,
    /// `½T`.
    pub t: RightDiffOp,
    pub l: BlockTridiagonal,
    pub estar_e: BlockMatrix,
}

impl TimeBandSetup {
    /// Setup with the canonical (minimum-norm) `M`.
    pub fn new(w: &MatrixWeight, d: &RightDiffOp, n: usize, omega: f64, n_max: usize, tol: f64) -> Result<Self> {
        Self::with_m(w, d, n, omega, n_max, tol, None)
    }

    /// Setup with a caller-chosen `M` (still required to be admissible).
    pub fn with_m(
        w: &MatrixWeight,
        d: &RightDiffOp,
        n: usize,
        omega: f64,
        n_max: usize,
        tol: f64,
        m: Option<Matrix>,
    ) -> Result<Self> {
        let (a, b) = w.interval();
        if !(omega > a && omega < b) {
            return Err(Error::OutsideInterval { x: omega, a, b });
        }
        if n_max < n + 2 {
            return Err(Error::InvalidParameter(format!(
                "n_max = {n_max} must be at least N + 2 = {}",
                n + 2
            )));
        }
        if n_max + 1 > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "n_max = {n_max} exceeds the supported maximum {}",
                MAX_DEGREE - 1
            )));
        }
        let d = d.to_frame(w.frame());
        let sequence = monic_sequence(w, n_max + 1)?;
        let hyp = solve_hyp(w, &d, n)?;
        let m = match m {
            Some(m) => m,
            None if hyp.exists => hyp.canonical_m(),
            None => {
                return Err(Error::HypNotSatisfied {
                    residual: hyp.normalized_min_residual,
                })
            }
        };
        let t = build_t(w, &d, &m, n, omega)?;
        let l = build_l(&sequence, &d, &t, &hyp.lambda_bar, n, n_max)?;
        let estar_e = build_estar_e(&sequence, w, n, omega, tol)?;
        Ok(Self {
            weight: w.clone(),
            d,
            n,
            omega,
            n_max,
            tol,
            sequence,
            hyp,
            m,
            t,
            l,
            estar_e,
        })
    }

    /// Largest gap between the closed-form `Xₙ` and the quadrature value
    /// `⟨QₙT, Qₙ₊₁⟩`, relative to `max(1, ‖Xₙ‖∞)`, over `n < n_max`.
    pub fn x_cross_check(&self) -> Result<f64> {
        let g = operator_gram(&self.sequence, &self.t, self.n_max)?;
        Ok(self
            .l
            .upper
            .iter()
            .enumerate()
            .map(|(k, x)| max_abs(&(x - g.block(k, k + 1))) / inf_norm(x).max(1.0))
            .fold(0.0, f64::max))
    }

    /// Upper-left `(N+1) × (N+1)` block part of `L`.
    pub fn l_hat(&self) -> Matrix {
        self.l.leading(self.n + 1).data
    }

    /// `Σ_{n ≤ N} ⟨f, Qₙ⟩_Ω Qₙ`, the action of the time-and-band limiting
    /// integral operator on a polynomial.
    pub fn apply_s(&self, f: &MatrixPolynomial) -> Result<MatrixPolynomial> {
        let seq = &self.sequence;
        let rule = quad_truncated(&self.weight, self.omega, f.degree() + self.n, self.tol)?;
        let mut coeffs = vec![Matrix::zeros(seq.dim(), seq.dim()); self.n + 1];
        for (x, l) in rule.points.iter().zip(rule.mass_factors()) {
            let fl = f.eval(*x) * &l;
            let ql = seq.q_values_times(*x, &l);
            for (c, q) in coeffs.iter_mut().zip(&ql) {
                *c += &fl * q.transpose();
            }
        }
        let frame = self.weight.frame();
        Ok(coeffs
            .iter()
            .zip(&seq.q)
            .fold(MatrixPolynomial::zero(seq.dim(), frame), |acc, (c, q)| {
                &acc + &q.left_mul(c)
            }))
    }

    /// Probe region for the kernel identity: the interval, or its window when infinite.
    fn probe_range(&self) -> (f64, f64) {
        let (a, b) = self.weight.interval();
        let (lo, hi) = self.weight.window();
        (a.max(lo), b.min(hi))
    }

    /// Kernel identity at `probes` seeded pairs and the operator identity on
    /// `polynomials` seeded random `f` of degree `N + 2`.
    pub fn check_kernel_commutation(&self, probes: usize, polynomials: usize, seed: u64) -> Result<KernelCheck> {
        self.check_kernel_commutation_for(&self.t, probes, polynomials, seed)
    }

    /// [`Self::check_kernel_commutation`] for an arbitrary operator in place of `½T`.
    pub fn check_kernel_commutation_for(
        &self,
        t: &RightDiffOp,
        probes: usize,
        polynomials: usize,
        seed: u64,
    ) -> Result<KernelCheck> {
        let q = &self.sequence.q[..=self.n];
        let qt: Vec<MatrixPolynomial> = q.iter().map(|p| t.apply_right(p)).collect();
        let (lo, hi) = self.probe_range();
        let mut kernel_residual = 0.0_f64;
        for (x, y) in probe_pairs(lo, hi, probes, seed) {
            let mut lhs = Matrix::zeros(self.sequence.dim(), self.sequence.dim());
            let mut rhs = lhs.clone();
            for (p, pt) in q.iter().zip(&qt) {
                lhs += p.eval(y).transpose() * pt.eval(x);
                rhs += pt.eval(y).transpose() * p.eval(x);
            }
            let scale = inf_norm(&lhs).max(inf_norm(&rhs)).max(f64::MIN_POSITIVE);
            kernel_residual = kernel_residual.max(inf_norm(&(lhs - rhs)) / scale);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut operator_residual = 0.0_f64;
        for _ in 0..polynomials {
            let f = random_polynomial(&self.weight, self.n + 2, &mut rng);
            let lhs = self.apply_s(&t.apply_right(&f))?;
            let rhs = t.apply_right(&self.apply_s(&f)?);
            let scale = lhs.coeff_max_abs().max(rhs.coeff_max_abs()).max(f64::MIN_POSITIVE);
            operator_residual = operator_residual.max((&lhs - &rhs).coeff_max_abs() / scale);
        }
        Ok(KernelCheck {
            kernel_residual,
            operator_residual,
            probes,
            polynomials,
        })
    }

    /// `½T` built from a corrupted `M`: `M + 0.1·max(1, ‖M‖∞)·E₁₂` when `R ≥ 2`.
    /// A scalar `M` commutes with everything, so for `R = 1` the zeroth-order
    /// coefficient gets `+0.1·max(1, ‖F̃₀‖)·x` instead (coefficient max norm).
    pub fn corrupted_t(&self) -> RightDiffOp {
        let r = self.sequence.dim();
        if r >= 2 {
            let mut m = self.m.clone();
            m[(0, 1)] += 0.1 * inf_norm(&m).max(1.0);
            build_t_unchecked(&self.d, &m, &self.hyp.lambda_bar, self.omega)
        } else {
            let frame = self.weight.frame();
            let size = 0.1 * self.t.f0().coeff_max_abs().max(1.0);
            let x = MatrixPolynomial::x_times(&Matrix::from_element(1, 1, size), frame);
            let zero = MatrixPolynomial::zero(1, frame);
            self.t
                .add(&RightDiffOp::new(zero.clone(), zero, x).expect("scalar coefficients"))
        }
    }

    /// Commutator of `L̂` with `E*E` and the joint-diagonalization diagnostics.
    pub fn verify_commutation(&self) -> Result<CommutationReport> {
        let l_hat = self.l_hat();
        let e = &self.estar_e.data;
        let joint = joint_diagonalization(&l_hat, e)?;
        let spectrum = sym_eig(e)?.values.as_slice().to_vec();
        Ok(CommutationReport {
            comm_residual: commutation_residual(&l_hat, e),
            joint,
            estar_e_gap_ratio: gap_ratio(&spectrum),
            estar_e_spectrum: spectrum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::catalog_get;
    use serde_json::json;

    fn legendre_setup(n: usize, omega: f64) -> TimeBandSetup {
        let e = catalog_get("scalar_jacobi", &json!({})).unwrap();
        TimeBandSetup::new(&e.weight, &e.operators[0].op, n, omega, n + 3, 1e-12).unwrap()
    }

    #[test]
    fn full_band_gives_identity() {
        let e = catalog_get("scalar_jacobi", &json!({})).unwrap();
        let s = TimeBandSetup::new(&e.weight, &e.operators[0].op, 3, 0.5, 5, 1e-12).unwrap();
        let rule = crate::weights::quad_full(&e.weight, 6);
        let g = s.sequence.gram(3, &rule).unwrap();
        assert!(max_abs(&(g.data - Matrix::identity(4, 4))) < 1e-13);
    }

    #[test]
    fn scalar_n0_commutes() {
        let s = legendre_setup(0, 0.6);
        let k = s.check_kernel_commutation(100, 5, 1).unwrap();
        assert!(k.kernel_residual < 1e-10, "{}", k.kernel_residual);
        assert!(k.operator_residual < 1e-10, "{}", k.operator_residual);
    }

    #[test]
    fn kernel_is_hermitian() {
        let s = legendre_setup(4, 0.3);
        for (x, y) in probe_pairs(0.0, 1.0, 100, 3) {
            let a = kernel_eval(&s.sequence, 4, x, y);
            let b = kernel_eval(&s.sequence, 4, y, x).transpose();
            assert!(max_abs(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn gap_ratio_of_even_spacing_is_one() {
        assert!((gap_ratio(&[0.0, 1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_exterior_omega_and_short_nmax() {
        let e = catalog_get("scalar_jacobi", &json!({})).unwrap();
        let d = &e.operators[0].op;
        assert!(matches!(
            TimeBandSetup::new(&e.weight, d, 2, 1.5, 5, 1e-12),
            Err(Error::OutsideInterval { .. })
        ));
        assert!(matches!(
            TimeBandSetup::new(&e.weight, d, 4, 0.5, 5, 1e-12),
            Err(Error::InvalidParameter(_))
        ));
    }
}
