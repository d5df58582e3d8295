//! Closed forms published with the catalog examples: constant matrices `M`,
//! eigenvalues and commuting operators in explicit form.
//!
//! Several of them are misprinted. The `*_printed` functions reproduce the
//! published expression as it stands; the unsuffixed functions give the
//! corrected value that the solvers actually find.

use crate::diffop::RightDiffOp;
use crate::linalg::Matrix;
use crate::weights::Frame;

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// `J = [[0, q − p], [p, 0]]`.
pub fn gegenbauer_j(p: f64, q: f64) -> Matrix {
    m2(0.0, q - p, p, 0.0)
}

/// Published `M₁ = (−2N(N+p+1)(N+q−p+1) + q − 2p)/(q − 2p)·J`. Correct only at `N = 1`.
pub fn gegenbauer_m1_printed(p: f64, q: f64, n: usize) -> Matrix {
    let n = n as f64;
    gegenbauer_j(p, q) * ((-2.0 * n * (n + p + 1.0) * (n + q - p + 1.0) + q - 2.0 * p) / (q - 2.0 * p))
}

/// Published `M₂ = (2N(N+p+1)(N+q−p+1) + q − 2p)/(q − 2p)·J`. Correct only at `N = 1`.
pub fn gegenbauer_m2_printed(p: f64, q: f64, n: usize) -> Matrix {
    let n = n as f64;
    gegenbauer_j(p, q) * ((2.0 * n * (n + p + 1.0) * (n + q - p + 1.0) + q - 2.0 * p) / (q - 2.0 * p))
}

/// Published `M₁ + M₂ = −2J`; the sum of the two formulas above is `+2J`.
pub fn gegenbauer_m_sum_printed(p: f64, q: f64) -> Matrix {
    gegenbauer_j(p, q) * -2.0
}

/// `M₁ = −s/(q − 2p)·J` with `s = (N+p+1)(N+q−p+2) + (N+p)(N+q−p+1)`, the
/// `(1,1)` entry of `Λ_{N+1}(D₁) + Λ_N(D₁)`.
pub fn gegenbauer_m1(p: f64, q: f64, n: usize) -> Matrix {
    let n = n as f64;
    let s = (n + p + 1.0) * (n + q - p + 2.0) + (n + p) * (n + q - p + 1.0);
    gegenbauer_j(p, q) * (-s / (q - 2.0 * p))
}

/// `M₂ = s/(q − 2p)·J` with `s = (N+p+2)(N+q−p+1) + (N+p+1)(N+q−p)`, the
/// `(2,2)` entry of `Λ_{N+1}(D₂) + Λ_N(D₂)`.
pub fn gegenbauer_m2(p: f64, q: f64, n: usize) -> Matrix {
    let n = n as f64;
    let s = (n + p + 2.0) * (n + q - p + 1.0) + (n + p + 1.0) * (n + q - p);
    gegenbauer_j(p, q) * (s / (q - 2.0 * p))
}

/// `M = [[1+β, 2(α+β)+2N+5], [0, 3(1+β)]]` for the Jacobi-type example.
pub fn jacobi_cg7_m(alpha: f64, beta: f64, n: usize) -> Matrix {
    m2(
        1.0 + beta,
        2.0 * (alpha + beta) + 2.0 * n as f64 + 5.0,
        0.0,
        3.0 * (1.0 + beta),
    )
}

/// `Λₙ = [[−n(α+β+n+2), 0], [1+β−k, −(n+1)(α+β+n+2)+k]]`.
pub fn jacobi_cg7_lambda(alpha: f64, beta: f64, k: f64, n: usize) -> Matrix {
    let n = n as f64;
    m2(
        -n * (alpha + beta + n + 2.0),
        0.0,
        1.0 + beta - k,
        -(n + 1.0) * (alpha + beta + n + 2.0) + k,
    )
}

/// `D = ∂²x(1−x) + ∂(C − xU) − V` with `C = [[β+1, 1], [0, β+3]]`,
/// `U = diag(α+β+3, α+β+4)`, `V = [[0, 0], [k−β−1, α+β+2−k]]`.
pub fn jacobi_cg7_d(alpha: f64, beta: f64, k: f64, frame: Frame) -> RightDiffOp {
    let i = Matrix::identity(2, 2);
    let c = m2(beta + 1.0, 1.0, 0.0, beta + 3.0);
    let u = m2(alpha + beta + 3.0, 0.0, 0.0, alpha + beta + 4.0);
    let v = m2(0.0, 0.0, k - beta - 1.0, alpha + beta + 2.0 - k);
    RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::zeros(2, 2), i.clone(), -i],
        vec![c, -u],
        vec![-v],
        frame,
    )
}

/// `𝒫_N(x)` as `x`-coefficients `[constant, linear]`.
pub fn jacobi_cg7_p(alpha: f64, beta: f64, k: f64, n: usize) -> [Matrix; 2] {
    let n = n as f64;
    let ab = alpha + beta;
    [
        m2(0.0, ab + n + 2.0, 0.0, beta),
        m2(
            n * n + (ab + 3.0) * (n + 1.0),
            0.0,
            k - beta - 1.0,
            n * n + (ab + 4.0) * n + 2.0 * ab - k + 6.0,
        ),
    ]
}

/// `D̃ = (x − Ω)D − ∂x(1 − x) + 𝒫_N`, the leftmost factor acting first.
pub fn jacobi_cg7_dtilde(alpha: f64, beta: f64, k: f64, n: usize, omega: f64, frame: Frame) -> RightDiffOp {
    let d = jacobi_cg7_d(alpha, beta, k, frame);
    let shifted = d.mul_x_left().sub(&d.scale(omega));
    let i = Matrix::identity(2, 2);
    let [p0, p1] = jacobi_cg7_p(alpha, beta, k, n);
    let extra = RightDiffOp::from_x_coeffs(2, vec![], vec![Matrix::zeros(2, 2), -&i, i], vec![p0, p1], frame);
    shifted.add(&extra)
}

/// Published `M` for `½(D₊ − D₋)`. Its negative is the element of the
/// solution set that reproduces the published `D̃`.
pub fn ddi_m_printed() -> Matrix {
    m2(3.0, -3.0, 1.0, -1.0)
}

/// `[[−3, 3], [−1, 1]]`: the solution set is `{[[c−4, 3], [−1, c]]}`, and
/// `c = 1` gives the published `D̃` as `½T`.
pub fn ddi_m() -> Matrix {
    m2(-3.0, 3.0, -1.0, 1.0)
}

/// Published `Λₙ = n(n+3) + ½[[1, 1], [1, −1]]` for `½(D₊ − D₋)`; the matrix part has the wrong sign.
pub fn ddi_lambda_printed(n: usize) -> Matrix {
    Matrix::identity(2, 2) * (n * (n + 3)) as f64 + m2(0.5, 0.5, 0.5, -0.5)
}

/// `Λₙ = n(n+3) − ½[[1, 1], [1, −1]]` for `½(D₊ − D₋)`.
pub fn ddi_lambda(n: usize) -> Matrix {
    Matrix::identity(2, 2) * (n * (n + 3)) as f64 - m2(0.5, 0.5, 0.5, -0.5)
}

/// Published `½(D₊ − D₋) = ∂²x(x−1) + ∂[[4x−3, 2], [0, 4x+1]] + ½[[−1, −1], [−1, 1]]`.
/// The `(2,2)` entry of the first-order coefficient should read `4x − 1`.
pub fn ddi_half_printed(frame: Frame) -> RightDiffOp {
    ddi_half_with(1.0, frame)
}

/// `½(D₊ − D₋)` with the first-order `(2,2)` entry `4x − 1`.
pub fn ddi_half(frame: Frame) -> RightDiffOp {
    ddi_half_with(-1.0, frame)
}

fn ddi_half_with(f1_const: f64, frame: Frame) -> RightDiffOp {
    let i = Matrix::identity(2, 2);
    RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::zeros(2, 2), -&i, i],
        vec![m2(-3.0, 2.0, 0.0, f1_const), m2(4.0, 0.0, 0.0, 4.0)],
        vec![m2(-0.5, -0.5, -0.5, 0.5)],
        frame,
    )
}

/// Published commuting operator `D̃ = ∂²x(x−1)(x−Ω) + ∂X + Y` for the ddi pair.
pub fn ddi_dtilde(n: usize, omega: f64, frame: Frame) -> RightDiffOp {
    let i = Matrix::identity(2, 2);
    let nn = (n * (n + 4)) as f64;
    let o = omega;
    // x(x−1)(x−Ω) = Ωx − (1+Ω)x² + x³
    let f2 = vec![Matrix::zeros(2, 2), &i * o, &i * -(1.0 + o), i.clone()];
    let f1 = vec![
        m2(3.0 * o, -2.0 * o, 0.0, o),
        m2(-4.0 * o - 4.0, 2.0, 0.0, -4.0 * o - 2.0),
        m2(5.0, 0.0, 0.0, 5.0),
    ];
    let f0 = vec![
        m2(o / 2.0 - 3.0, (o + 5.0) / 2.0, (o - 1.0) / 2.0, -o / 2.0),
        m2(-nn, 0.0, 0.0, -nn),
    ];
    RightDiffOp::from_x_coeffs(2, f2, f1, f0, frame)
}

/// Published kernel-commuting family for the Hermite-type weight,
/// linear in `r₁, r₂, r₃`:
/// `F₂ = [[(Nr₂−r₁)/(2N), r₁x/(2N)], [0, r₂/2]]`,
/// `F₁ = [[(Nr₂−r₁)(1−x)/N, −(r₁x² + 2Nr₂x − r₁x − Nr₂)/N], [0, −r₂(x+1)]]`,
/// `F₀ = [[−r₁+r₃, r₁x − r₂], [0, r₂+r₃]]`. Requires `N ≥ 1`.
pub fn hermite_family(n: usize, r1: f64, r2: f64, r3: f64, frame: Frame) -> RightDiffOp {
    assert!(n >= 1, "the family is defined for N ≥ 1");
    let n = n as f64;
    let a = (n * r2 - r1) / n;
    RightDiffOp::from_x_coeffs(
        2,
        vec![m2(a / 2.0, 0.0, 0.0, r2 / 2.0), m2(0.0, r1 / (2.0 * n), 0.0, 0.0)],
        vec![
            m2(a, r2, 0.0, -r2),
            m2(-a, (r1 - 2.0 * n * r2) / n, 0.0, -r2),
            m2(0.0, -r1 / n, 0.0, 0.0),
        ],
        vec![m2(-r1 + r3, -r2, 0.0, r2 + r3), m2(0.0, r1, 0.0, 0.0)],
        frame,
    )
}

/// The three members `r = e₁, e₂, e₃` of [`hermite_family`].
pub fn hermite_family_basis(n: usize, frame: Frame) -> [RightDiffOp; 3] {
    [
        hermite_family(n, 1.0, 0.0, 0.0, frame),
        hermite_family(n, 0.0, 1.0, 0.0, frame),
        hermite_family(n, 0.0, 0.0, 1.0, frame),
    ]
}

/// Published `F₂(Ω)W(Ω)` for the family, up to a nonzero scalar:
/// `[[((Nr₂−r₁)e^{4Ω} + Nr₂Ω²)/(2N), r₂Ω/2], [r₂Ω/2, r₂/2]]`.
pub fn hermite_boundary_printed(n: usize, omega: f64, r1: f64, r2: f64) -> Matrix {
    let n = n as f64;
    m2(
        ((n * r2 - r1) * (4.0 * omega).exp() + n * r2 * omega * omega) / (2.0 * n),
        r2 * omega / 2.0,
        r2 * omega / 2.0,
        r2 / 2.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn printed_gegenbauer_formulas_agree_at_n1() {
        for (p, q) in [(1.0, 3.0), (2.0, 5.0), (1.5, 4.0)] {
            assert!(max_abs(&(gegenbauer_m1_printed(p, q, 1) - gegenbauer_m1(p, q, 1))) < 1e-12);
            assert!(max_abs(&(gegenbauer_m2_printed(p, q, 1) - gegenbauer_m2(p, q, 1))) < 1e-12);
        }
        // p = 1, q = 3, N = 2: printed −79J, actual −39J
        let j = gegenbauer_j(1.0, 3.0);
        assert!(max_abs(&(gegenbauer_m1_printed(1.0, 3.0, 2) + &j * 79.0)) < 1e-12);
        assert!(max_abs(&(gegenbauer_m1(1.0, 3.0, 2) + &j * 39.0)) < 1e-12);
    }

    #[test]
    fn gegenbauer_sum_is_plus_two_j() {
        for n in 0..6 {
            let s = gegenbauer_m1(1.5, 4.0, n) + gegenbauer_m2(1.5, 4.0, n);
            assert!(max_abs(&(s - gegenbauer_j(1.5, 4.0) * 2.0)) < 1e-12);
        }
    }

    #[test]
    fn hermite_family_contains_generator() {
        let f = Frame::IDENTITY;
        let d = hermite_family(4, 0.0, 2.0, 0.0, f);
        assert_eq!(d.f2().x_coeffs(), vec![Matrix::identity(2, 2)]);
        assert_eq!(d.f0().x_coeffs(), vec![m2(0.0, -2.0, 0.0, 2.0)]);
    }

    #[test]
    fn ddi_half_variants_differ_in_one_entry() {
        let f = Frame::IDENTITY;
        let diff = ddi_half_printed(f).sub(&ddi_half(f));
        assert!((diff.f1().eval(0.3)[(1, 1)] - 2.0).abs() < 1e-15);
        assert!(diff.f2().is_zero() && diff.f0().is_zero());
    }
}
