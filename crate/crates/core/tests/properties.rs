use proptest::prelude::*;
use serde_json::{json, Value};

use bispectral::commuting::setup::{build_estar_e, operator_gram};
use bispectral::commuting::{solve_hyp, TimeBandSetup};
use bispectral::linalg::{inf_norm, lstsq_affine, max_abs, spd_inv_sqrt, spd_sqrt, Matrix, Vector};
use bispectral::orthopoly::monic_sequence;
use bispectral::weights::{catalog_get, CatalogEntry, MatrixPolynomial};

fn entry(name: &str, params: Value) -> CatalogEntry {
    catalog_get(name, &params).unwrap()
}

/// `QΛQᵀ` with `Q` orthogonal from the QR factor of `raw` and eigenvalues
/// `10^{6t}`, so the condition number stays at or below `1e6`.
fn spd(dim: usize, raw: &[f64], exps: &[f64]) -> Matrix {
    let q = Matrix::from_column_slice(dim, dim, &raw[..dim * dim]).qr().q();
    let d = Matrix::from_diagonal(&Vector::from_iterator(
        dim,
        exps[..dim].iter().map(|t| 10f64.powf(6.0 * t)),
    ));
    let a = &q * d * q.transpose();
    (&a + a.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spd_square_roots(
        dim in 1usize..=6,
        raw in prop::collection::vec(-1.0f64..1.0, 36),
        exps in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        prop_assume!(Matrix::from_column_slice(dim, dim, &raw[..dim * dim]).determinant().abs() > 1e-6);
        let a = spd(dim, &raw, &exps);
        let s = spd_sqrt(&a).unwrap();
        prop_assert!(max_abs(&(&s * &s - &a)) < 1e-10 * inf_norm(&a));
        prop_assert!(max_abs(&(&s - s.transpose())) < 1e-10 * inf_norm(&s));
        let r = spd_inv_sqrt(&a).unwrap();
        let id = Matrix::identity(dim, dim);
        prop_assert!(max_abs(&(&r * &a * &r - id)) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn consistent_systems_contain_their_solution(
        rows in 2usize..8,
        cols in 1usize..6,
        raw in prop::collection::vec(-1.0f64..1.0, 48),
        x in prop::collection::vec(-3.0f64..3.0, 6),
    ) {
        let a = Matrix::from_column_slice(rows, cols, &raw[..rows * cols]);
        let x = Vector::from_column_slice(&x[..cols]);
        let set = lstsq_affine(&a, &(&a * &x));
        prop_assert!(set.distance(&x) < 1e-8 * (1.0 + x.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn t_is_block_tridiagonal(omega in -0.9f64..0.9, n in 0usize..6, which in 0usize..2) {
        let e = entry("gegenbauer", Value::Null);
        let d = &e.operators[which].op;
        let s = TimeBandSetup::new(&e.weight, d, n, omega, 12, 1e-12).unwrap();
        let g = operator_gram(&s.sequence, &s.t, 10).unwrap();
        let scale = max_abs(&g.data);
        for i in 0..=10usize {
            for j in 0..=10 {
                if i.abs_diff(j) >= 2 {
                    prop_assert!(max_abs(&g.block(i, j)) < 1e-9 * scale, "block ({}, {})", i, j);
                }
            }
        }
        prop_assert!(max_abs(&s.l.upper[n]) < 1e-10);
    }

    #[test]
    fn scalar_shift_of_m_is_harmless(c in -5.0f64..5.0, n in 1usize..6, omega in -0.8f64..0.8) {
        let e = entry("gegenbauer", json!({"p": 1.5, "q": 4.0}));
        let d = &e.operators[0].op;
        let hyp = solve_hyp(&e.weight, d, n).unwrap();
        let m = hyp.canonical_m() + Matrix::identity(2, 2) * c;
        prop_assert!(hyp.distance(&m) < 1e-8);
        let s = TimeBandSetup::with_m(&e.weight, d, n, omega, 12, 1e-12, Some(m)).unwrap();
        prop_assert!(s.verify_commutation().unwrap().comm_residual < 1e-8);
    }

    #[test]
    fn s_acts_on_qk_through_estar_e(omega in 0.05f64..0.95, n in 0usize..6, k in 0usize..6) {
        let e = entry("jacobi_cg7", Value::Null);
        let s = TimeBandSetup::new(&e.weight, &e.operators[0].op, n, omega, 12, 1e-12).unwrap();
        let got = s.apply_s(&s.sequence.q[k]).unwrap();
        let frame = e.weight.frame();
        let mut want = MatrixPolynomial::zero(2, frame);
        if k <= n {
            for j in 0..=n {
                want = &want + &s.sequence.q[j].left_mul(&s.estar_e.block(k, j));
            }
        } else {
            // ⟨Q_k, Q_j⟩_Ω for j ≤ N from a separate truncated Gram matrix
            let big = build_estar_e(&s.sequence, &e.weight, k, omega, 1e-12).unwrap();
            for j in 0..=n {
                want = &want + &s.sequence.q[j].left_mul(&big.block(k, j));
            }
        }
        prop_assert!((&got - &want).coeff_max_abs() < 1e-10 * want.coeff_max_abs().max(1.0));
    }
}

/// With `p = 1, q = 2` the weight is the polynomial `I − 2xJ + x²I`
/// (`J` the flip) on `[−1, 1]`, so `H₀ = (8/3)I` and, for `N = 0`,
/// `E*E = (3/8)∫₋₁^Ω W` with exact monomial integrals.
#[test]
fn estar_e_at_degree_zero_matches_monomial_integrals() {
    let e = entry("gegenbauer", json!({"p": 1.0, "q": 2.0}));
    let seq = monic_sequence(&e.weight, 4).unwrap();
    for omega in [-0.7, -0.2, 0.0, 0.35, 0.9] {
        let ee = build_estar_e(&seq, &e.weight, 0, omega, 1e-13).unwrap();
        let diag = (omega + 1.0) + (omega.powi(3) + 1.0) / 3.0;
        let off = -(omega * omega - 1.0);
        let want = Matrix::from_row_slice(2, 2, &[diag, off, off, diag]) * (3.0 / 8.0);
        assert!(max_abs(&(&ee.data - &want)) < 1e-13, "omega = {omega}");
    }
}

#[test]
fn estar_e_is_monotone_in_omega() {
    let e = entry("ddi_pair", Value::Null);
    let seq = monic_sequence(&e.weight, 8).unwrap();
    let mut prev = build_estar_e(&seq, &e.weight, 4, 0.1, 1e-12).unwrap().data;
    for omega in [0.3, 0.5, 0.7, 0.9] {
        let cur = build_estar_e(&seq, &e.weight, 4, omega, 1e-12).unwrap().data;
        let diff = (&cur - &prev).symmetric_eigenvalues();
        assert!(diff.min() > -1e-12, "omega = {omega}");
        prev = cur;
    }
}
