//! Gaussian quadrature from three-term recurrences (Golub–Welsch).
//!
//! Nodes are the eigenvalues of the Jacobi matrix, polished by one or two
//! Newton steps on the monic recurrence. Weights are Christoffel numbers
//! `1 / Σ pₖ(xᵢ)²` evaluated with the orthonormal recurrence, which keeps
//! tiny tail weights (Hermite) accurate to full relative precision.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

/// Nodes ascending, weights positive; exact for polynomials of degree `2n − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Affine map of a rule on `[−1, 1]` onto `[a, b]`; weights scale by `(b − a)/2`.
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        GaussRule {
            nodes: self.nodes.iter().map(|u| c + h * u).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }
}

/// Gauss rule for the measure with monic recurrence
/// `πₖ₊₁ = (x − aₖ)πₖ − bₖπₖ₋₁` and total mass `mu0`.
///
/// `a` needs `n` entries and `b` needs `n` entries (`b[0]` is ignored).
pub fn golub_welsch(n: usize, a: &[f64], b: &[f64], mu0: f64) -> GaussRule {
    assert!(n >= 1 && a.len() >= n && b.len() >= n);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = a[k];
        if k + 1 < n {
            let off = b[k + 1].sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let spread = nodes.last().unwrap() - nodes.first().unwrap();
    let scale = spread.max(1.0);

    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = monic_value_and_derivative(*x, n, a, b);
            if dp == 0.0 || !p.is_finite() || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            if step.abs() > 1e-6 * scale {
                break;
            }
            *x -= step;
        }
    }

    let weights = nodes
        .iter()
        .map(|&x| {
            let mut prev = 0.0;
            let mut cur = 1.0 / mu0.sqrt();
            let mut sum = cur * cur;
            for k in 0..n - 1 {
                let sb_next = b[k + 1].sqrt();
                let sb_cur = if k == 0 { 0.0 } else { b[k].sqrt() };
                let next = ((x - a[k]) * cur - sb_cur * prev) / sb_next;
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            1.0 / sum
        })
        .collect();
    GaussRule { nodes, weights }
}

fn monic_value_and_derivative(x: f64, n: usize, a: &[f64], b: &[f64]) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..n {
        let bk = if k == 0 { 0.0 } else { b[k] };
        let p_next = (x - a[k]) * p - bk * p_prev;
        let d_next = p + (x - a[k]) * d - bk * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Monic Jacobi recurrence for `(1 − u)^α (1 + u)^β` on `[−1, 1]`.
pub fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let ab = alpha + beta;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        let ak = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        a.push(ak);
        let bk = match k {
            0 => 0.0,
            1 => 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab)),
            _ => {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        };
        b.push(bk);
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    (a, b, mu0)
}

/// Gauss–Jacobi on `[−1, 1]` for `(1 − u)^α (1 + u)^β`.
///
/// Rules are memoized per `(n, α, β)`; truncated quadrature requests the same
/// large rules repeatedly.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), GaussRule>>> = OnceLock::new();
    let key = (n, alpha.to_bits(), beta.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let (a, b, mu0) = jacobi_recurrence(n, alpha, beta);
    let r = golub_welsch(n, &a, &b, mu0);
    cache.lock().unwrap().insert(key, r.clone());
    r
}

/// Gauss–Legendre on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Hermite for `e^{−t²}` on the real line.
pub fn gauss_hermite(n: usize) -> GaussRule {
    let a = vec![0.0; n];
    let b: Vec<f64> = (0..n).map(|k| 0.5 * k as f64).collect();
    golub_welsch(n, &a, &b, std::f64::consts::PI.sqrt())
}

/// Number of nodes needed for exactness up to `degree`.
pub fn nodes_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}
