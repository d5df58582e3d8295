//! Monic and orthonormal matrix orthogonal polynomials by the Stieltjes procedure.

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, max_abs, spd_inv_sqrt, spd_sqrt, symmetrize, BlockMatrix, Matrix};
use crate::weights::{quad_full, quad_truncated, MatrixPolynomial, MatrixWeight, QuadRule};

/// Largest supported degree in double precision.
pub const MAX_DEGREE: usize = 20;

/// `⟨P, Q⟩ = Σ P(xᵢ) Gᵢ Q(xᵢ)ᵀ`, refusing degrees beyond the rule's exactness.
pub fn inner_product(p: &MatrixPolynomial, q: &MatrixPolynomial, rule: &QuadRule) -> Result<Matrix> {
    let needed = p.degree() + q.degree();
    if needed > rule.exact_degree {
        return Err(Error::QuadratureDegree {
            needed,
            available: rule.exact_degree,
        });
    }
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(rule.integrate(|x| p.eval(x), |x| q.eval(x)))
}

/// `⟨P, Q⟩` over `(a, b)` (`omega = None`) or `(a, Ω]`, building a rule of the right degree.
pub fn inner_product_on(
    p: &MatrixPolynomial,
    q: &MatrixPolynomial,
    w: &MatrixWeight,
    omega: Option<f64>,
    tol: f64,
) -> Result<Matrix> {
    let deg = p.degree() + q.degree();
    let rule = match omega {
        None => quad_full(w, deg),
        Some(o) => quad_truncated(w, o, deg, tol)?,
    };
    inner_product(p, q, &rule)
}

/// Monic sequence `R₀ … R_{n_max}` with recursion data and the orthonormal `Qₙ = SₙRₙ`.
#[derive(Debug, Clone)]
pub struct MonicSequence {
    weight: MatrixWeight,
    pub n_max: usize,
    pub r: Vec<MatrixPolynomial>,
    /// `Bₙ = ⟨xRₙ, Rₙ⟩Hₙ⁻¹`.
    pub b: Vec<Matrix>,
    /// `Aₙ = ⟨xRₙ, Rₙ₋₁⟩Hₙ₋₁⁻¹`; `A₀ = 0`.
    pub a: Vec<Matrix>,
    /// `Hₙ = ⟨Rₙ, Rₙ⟩`.
    pub h: Vec<Matrix>,
    /// `‖Rₙ‖ = Hₙ^{1/2}`.
    pub norms: Vec<Matrix>,
    /// `Sₙ = ‖Rₙ‖⁻¹`.
    pub s: Vec<Matrix>,
    pub q: Vec<MatrixPolynomial>,
    /// `Ãₙ = SₙAₙSₙ₋₁⁻¹`; `Ã₀ = 0`.
    pub a_tilde: Vec<Matrix>,
    /// `B̃ₙ = SₙBₙSₙ⁻¹`.
    pub b_tilde: Vec<Matrix>,
    /// `S_{n+1}‖Rₙ‖` as computed, the factor in `Q_{n+1} = S_{n+1}‖Rₙ‖(xQₙ − B̃ₙQₙ − ÃₙQₙ₋₁)`.
    lift: Vec<Matrix>,
    /// Full rule exact through degree `2·n_max + 4`.
    pub rule: QuadRule,
}

/// Stieltjes recursion `R_{n+1} = xRₙ − BₙRₙ − AₙR_{n−1}`, carried out in
/// orthonormal form.
///
/// The procedure works on node values (discretized Stieltjes):
/// `Z = xQₙ − B̃ₙQₙ − ÃₙQₙ₋₁` with `B̃ₙ = ⟨xQₙ, Qₙ⟩`, `Ãₙ = ⟨xQₙ, Qₙ₋₁⟩`,
/// and `Q_{n+1} = S_{n+1}‖Rₙ‖Z`, the last factor taken as a polar factor so
/// its accuracy does not depend on the conditioning of `Hₙ`. Values are
/// stored as `Qₙ(xᵢ)Lᵢ` with `Gᵢ = LᵢLᵢᵀ`: where the weight is nearly
/// singular (the Gaussian tails of a rank-one term) `Qₙ(xᵢ)` is huge in the
/// direction the mass cannot see, and forming `Qₙ(xᵢ)GᵢQₙ(xᵢ)ᵀ` costs six
/// digits by degree twelve. Each step is orthogonalized twice against
/// `Qₙ, Qₙ₋₁`, which refines `B̃ₙ, Ãₙ` inside the three-term form. `Bₙ`, `Aₙ`
/// and the coefficient forms of `Rₙ` are derived afterwards.
///
/// Fails with [`Error::Positivity`] when some `Hₙ` is numerically singular.
pub fn monic_sequence(w: &MatrixWeight, n_max: usize) -> Result<MonicSequence> {
    if n_max > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    let dim = w.dim();
    let frame = w.frame();
    let rule = quad_full(w, 2 * n_max + 4);
    let zero = Matrix::zeros(dim, dim);
    let pts = &rule.points;
    let factors = rule.mass_factors();
    // Node values are carried as Qₙ(xᵢ)Lᵢ with Gᵢ = LᵢLᵢᵀ.
    let gram = |u: &[Matrix], v: &[Matrix], weight: &dyn Fn(f64) -> f64| {
        let mut acc = Matrix::zeros(dim, dim);
        for i in 0..pts.len() {
            acc += &u[i] * v[i].transpose() * weight(pts[i]);
        }
        acc
    };
    let positivity = |index: usize| {
        move |e| Error::Positivity {
            index,
            source: Box::new(e),
        }
    };

    let h0 = symmetrize(&gram(&factors, &factors, &|_| 1.0));
    let s0 = spd_inv_sqrt(&h0).map_err(positivity(0))?;
    let mut h = vec![h0.clone()];
    let mut norms = vec![spd_sqrt(&h0).map_err(positivity(0))?];
    let mut s = vec![s0.clone()];
    let mut lift = vec![s0.clone()];
    let mut vals: Vec<Vec<Matrix>> = vec![factors.iter().map(|l| &s0 * l).collect()];
    let mut b_tilde: Vec<Matrix> = Vec::new();
    let mut a_tilde = vec![zero.clone()];

    for n in 0..=n_max {
        let mut bt = gram(&vals[n], &vals[n], &|x| x);
        if n >= 1 {
            a_tilde.push(gram(&vals[n], &vals[n - 1], &|x| x));
        }
        if n < n_max {
            let step = |bt: &Matrix, at: &Matrix| -> Vec<Matrix> {
                (0..pts.len())
                    .map(|i| {
                        let mut z = &vals[n][i] * pts[i] - bt * &vals[n][i];
                        if n >= 1 {
                            z -= at * &vals[n - 1][i];
                        }
                        z
                    })
                    .collect()
            };
            let mut z = step(&bt, &a_tilde[n]);
            bt += gram(&z, &vals[n], &|_| 1.0);
            if n >= 1 {
                let corr = gram(&z, &vals[n - 1], &|_| 1.0);
                a_tilde[n] += corr;
            }
            z = step(&bt, &a_tilde[n]);
            // M = ⟨Z, Z⟩ is well conditioned; Hₙ is not. With
            // K = ‖Rₙ‖M^{1/2} = UΣWᵀ we have R_{n+1} = K·M^{-1/2}Z,
            // ‖R_{n+1}‖ = UΣUᵀ and Q_{n+1} = UWᵀ·M^{-1/2}Z.
            let m = symmetrize(&gram(&z, &z, &|_| 1.0));
            let m_inv_sqrt = spd_inv_sqrt(&m).map_err(positivity(n + 1))?;
            let k = &norms[n] * spd_sqrt(&m).map_err(positivity(n + 1))?;
            let svd = k.svd(true, true);
            let (u, wt) = (svd.u.unwrap(), svd.v_t.unwrap());
            let sigma = &svd.singular_values;
            let norm_next = symmetrize(&(&u * Matrix::from_diagonal(sigma) * u.transpose()));
            let s_next = symmetrize(&(&u * Matrix::from_diagonal(&sigma.map(|v| 1.0 / v)) * u.transpose()));
            let c = &u * &wt * m_inv_sqrt;
            vals.push(z.iter().map(|v| &c * v).collect());
            h.push(symmetrize(&(&norm_next * &norm_next)));
            norms.push(norm_next);
            s.push(s_next);
            lift.push(c);
        }
        b_tilde.push(bt);
    }

    // Bₙ = ‖Rₙ‖B̃ₙSₙ, Aₙ = ‖Rₙ‖ÃₙSₙ₋₁
    let b: Vec<Matrix> = (0..=n_max).map(|n| &norms[n] * &b_tilde[n] * &s[n]).collect();
    let a: Vec<Matrix> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                zero.clone()
            } else {
                &norms[n] * &a_tilde[n] * &s[n - 1]
            }
        })
        .collect();
    let mut r = vec![MatrixPolynomial::identity(dim, frame)];
    for n in 0..n_max {
        let mut next = &r[n].mul_x() - &r[n].left_mul(&b[n]);
        if n >= 1 {
            next = &next - &r[n - 1].left_mul(&a[n]);
        }
        r.push(next);
    }
    let q: Vec<MatrixPolynomial> = r.iter().zip(&s).map(|(p, sn)| p.left_mul(sn)).collect();

    Ok(MonicSequence {
        weight: w.clone(),
        n_max,
        r,
        b,
        a,
        h,
        norms,
        s,
        q,
        a_tilde,
        b_tilde,
        lift,
        rule,
    })
}

/// The orthonormal polynomials `Qₙ = SₙRₙ` of a sequence.
pub fn orthonormal(seq: &MonicSequence) -> &[MatrixPolynomial] {
    &seq.q
}

impl MonicSequence {
    pub fn weight(&self) -> &MatrixWeight {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.weight.dim()
    }

    /// `[Qₙ(x), Qₙ′(x), Qₙ″(x)]` for `n = 0..=n_max`, by the orthonormal recursion.
    pub fn q_jet(&self, x: f64) -> Vec<[Matrix; 3]> {
        let dim = self.dim();
        let z = Matrix::zeros(dim, dim);
        let mut out: Vec<[Matrix; 3]> = Vec::with_capacity(self.n_max + 1);
        out.push([self.s[0].clone(), z.clone(), z.clone()]);
        let prev0 = [z.clone(), z.clone(), z];
        for n in 0..self.n_max {
            let cur = &out[n];
            let prev = if n == 0 { &prev0 } else { &out[n - 1] };
            let (bt, at, c) = (&self.b_tilde[n], &self.a_tilde[n], &self.lift[n + 1]);
            let next = [
                c * (&cur[0] * x - bt * &cur[0] - at * &prev[0]),
                c * (&cur[0] + &cur[1] * x - bt * &cur[1] - at * &prev[1]),
                c * (&cur[1] * 2.0 + &cur[2] * x - bt * &cur[2] - at * &prev[2]),
            ];
            out.push(next);
        }
        out
    }

    /// `Qₙ(x)` for `n = 0..=n_max`, by the orthonormal recursion.
    pub fn q_values(&self, x: f64) -> Vec<Matrix> {
        self.q_values_times(x, &Matrix::identity(self.dim(), self.dim()))
    }

    /// `Qₙ(x)·L` for `n = 0..=n_max`. The recursion acts on the left, so
    /// this never forms components of `Qₙ(x)` annihilated by `L`.
    pub fn q_values_times(&self, x: f64, l: &Matrix) -> Vec<Matrix> {
        let mut out: Vec<Matrix> = Vec::with_capacity(self.n_max + 1);
        out.push(&self.s[0] * l);
        for n in 0..self.n_max {
            let mut z = &out[n] * x - &self.b_tilde[n] * &out[n];
            if n >= 1 {
                z -= &self.a_tilde[n] * &out[n - 1];
            }
            out.push(&self.lift[n + 1] * z);
        }
        out
    }

    /// Block Gram matrix `(⟨Qₘ, Qₙ⟩)` for `m, n ≤ upto` under `rule`, with
    /// the polynomials evaluated by the recursion.
    pub fn gram(&self, upto: usize, rule: &QuadRule) -> Result<BlockMatrix> {
        let upto = upto.min(self.n_max);
        if 2 * upto > rule.exact_degree {
            return Err(Error::QuadratureDegree {
                needed: 2 * upto,
                available: rule.exact_degree,
            });
        }
        let dim = self.dim();
        let mut g = BlockMatrix::zeros(upto + 1, dim);
        for (x, l) in rule.points.iter().zip(rule.mass_factors()) {
            let v = self.q_values_times(*x, &l);
            for m in 0..=upto {
                for n in m..=upto {
                    let blk = &v[m] * v[n].transpose();
                    let cur = g.block(m, n) + blk;
                    g.set_block(m, n, &cur);
                }
            }
        }
        for m in 0..=upto {
            for n in 0..m {
                let t = g.block(n, m).transpose();
                g.set_block(m, n, &t);
            }
        }
        Ok(g)
    }

    /// `max |⟨Qₘ, Qₙ⟩ − δₘₙI|` over `m, n ≤ upto`.
    pub fn orthonormality_defect(&self, upto: usize) -> Result<f64> {
        let g = self.gram(upto, &self.rule)?;
        let id = Matrix::identity(g.dim(), g.dim());
        Ok(max_abs(&(g.data - id)))
    }

    /// Relative gap between `Aₙ` from the Stieltjes step and `HₙHₙ₋₁⁻¹`.
    pub fn a_consistency_defect(&self) -> f64 {
        (1..=self.n_max)
            .map(|n| {
                let alt = &self.h[n] * (&self.s[n - 1] * &self.s[n - 1]);
                max_abs(&(&self.a[n] - &alt)) / max_abs(&alt).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Relative gap between `Ãₙ` and `‖Rₙ‖‖Rₙ₋₁‖⁻¹`.
    pub fn a_tilde_consistency_defect(&self) -> f64 {
        (1..=self.n_max)
            .map(|n| {
                let alt = &self.norms[n] * &self.s[n - 1];
                max_abs(&(&self.a_tilde[n] - &alt)) / max_abs(&alt).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Relative asymmetry of `BₙHₙ = ⟨xRₙ, Rₙ⟩` and of `B̃ₙ`, the two
    /// symmetric forms of the diagonal recursion coefficient.
    pub fn b_symmetry_defect(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| {
                let bh = &self.b[n] * &self.h[n];
                let bt = &self.b_tilde[n];
                let d1 = max_abs(&(&bh - bh.transpose())) / inf_norm(&bh).max(f64::MIN_POSITIVE);
                let d2 = max_abs(&(bt - bt.transpose())) / inf_norm(bt).max(f64::MIN_POSITIVE);
                d1.max(d2)
            })
            .fold(0.0, f64::max)
    }

    /// Coefficient residual of `xQₙ = Ãₙ₊₁ᵀQₙ₊₁ + B̃ₙQₙ + ÃₙQₙ₋₁` for `n < n_max`,
    /// relative to `‖xQₙ‖`.
    pub fn recursion_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for n in 0..self.n_max {
            let lhs = self.q[n].mul_x();
            let mut rhs =
                &self.q[n + 1].left_mul(&self.a_tilde[n + 1].transpose()) + &self.q[n].left_mul(&self.b_tilde[n]);
            if n >= 1 {
                rhs = &rhs + &self.q[n - 1].left_mul(&self.a_tilde[n]);
            }
            let d = (&lhs - &rhs).coeff_max_abs() / lhs.coeff_max_abs().max(f64::MIN_POSITIVE);
            worst = worst.max(d);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Frame, ScalarFactor, WeightTerm};

    fn legendre01() -> MatrixWeight {
        MatrixWeight::new(
            1,
            0.0,
            1.0,
            vec![WeightTerm {
                factor: ScalarFactor::Unit,
                polypart: MatrixPolynomial::identity(1, Frame::IDENTITY),
            }],
        )
        .unwrap()
    }

    #[test]
    fn shifted_legendre_recursion() {
        let seq = monic_sequence(&legendre01(), 4).unwrap();
        assert!((seq.b[0][(0, 0)] - 0.5).abs() < 1e-15);
        assert!((seq.a[1][(0, 0)] - 1.0 / 12.0).abs() < 1e-15);
        // Q₁ = √12 (x − 1/2)
        let q1 = &seq.q[1];
        for x in [0.0, 0.3, 1.0] {
            assert!((q1.eval(x)[(0, 0)] - 12f64.sqrt() * (x - 0.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn insufficient_rule_degree_is_reported() {
        let w = legendre01();
        let rule = quad_full(&w, 3);
        let p = MatrixPolynomial::identity(1, w.frame()).mul_x().mul_x();
        let err = inner_product(&p, &p, &rule).unwrap_err();
        assert_eq!(
            err,
            Error::QuadratureDegree {
                needed: 4,
                available: 3
            }
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            monic_sequence(&legendre01(), MAX_DEGREE + 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn monic_with_identity_leading_coefficient() {
        let seq = monic_sequence(&legendre01(), 8).unwrap();
        for (n, r) in seq.r.iter().enumerate() {
            assert_eq!(r.degree(), n);
            assert!((r.leading_x_coeff()[(0, 0)] - 1.0).abs() < 1e-12);
        }
    }
}
