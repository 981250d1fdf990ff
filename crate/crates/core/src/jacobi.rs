//! Orthonormal Jacobi polynomials on [-1, 1] and Gauss-Jacobi quadrature.
//!
//! The weight is `w(t) = (1 - t)^alpha (1 + t)^beta` with `alpha, beta >= -1/2`.
//! Polynomials are evaluated with the classical three-term recurrence for
//! `P_n^{(alpha, beta)}` (normalized by `P_n(1) = binom(n + alpha, n)`) and then
//! rescaled by `h_n^{-1/2}`, where `h_n` is the squared L2 norm.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent pair of a univariate Jacobi weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiPair {
    alpha: f64,
    beta: f64,
}

impl JacobiPair {
    pub const LEGENDRE: JacobiPair = JacobiPair {
        alpha: 0.0,
        beta: 0.0,
    };
    pub const CHEBYSHEV: JacobiPair = JacobiPair {
        alpha: -0.5,
        beta: -0.5,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < -0.5 || beta < -0.5 {
            return Err(Error::Domain(format!(
                "Jacobi exponents must satisfy alpha, beta >= -1/2 (got alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The weight `(1 - t)^alpha (1 + t)^beta`.
    pub fn weight(&self, t: f64) -> f64 {
        (1.0 - t).powf(self.alpha) * (1.0 + t).powf(self.beta)
    }

    /// The regularized weight `(1 - t + n^{-2})^{alpha + 1/2} (1 + t + n^{-2})^{beta + 1/2}`,
    /// equal to 1 for `n = 0`.
    pub fn regularized_weight(&self, n: u64, t: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let eps = 1.0 / (n as f64 * n as f64);
        (1.0 - t + eps).powf(self.alpha + 0.5) * (1.0 + t + eps).powf(self.beta + 0.5)
    }
}

impl Default for JacobiPair {
    fn default() -> Self {
        Self::LEGENDRE
    }
}

/// `ln h_n^{(alpha, beta)}`, the log of the squared norm of `P_n^{(alpha, beta)}`.
pub fn log_jacobi_norm(n: usize, pair: &JacobiPair) -> f64 {
    let (a, b) = (pair.alpha, pair.beta);
    let ab = a + b;
    if n == 0 {
        // The general expression has a removable 0/0 when alpha + beta = -1.
        return (ab + 1.0) * std::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
            - libm::lgamma(ab + 2.0);
    }
    let n = n as f64;
    (ab + 1.0) * std::f64::consts::LN_2 - (2.0 * n + ab + 1.0).ln() + libm::lgamma(n + a + 1.0)
        + libm::lgamma(n + b + 1.0)
        - libm::lgamma(n + 1.0)
        - libm::lgamma(n + ab + 1.0)
}

/// `h_n^{(alpha, beta)} = \int_{-1}^1 P_n(t)^2 w(t) dt`.
pub fn jacobi_norm(n: usize, pair: &JacobiPair) -> f64 {
    log_jacobi_norm(n, pair).exp()
}

/// Classical `P_k^{(alpha, beta)}(t)` for `k = 0..out.len()`.
fn jacobi_p_into(alpha: f64, beta: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 0.5 * ((alpha - beta) + (alpha + beta + 2.0) * t);
    let ab = alpha + beta;
    let diff_sq = alpha * alpha - beta * beta;
    for k in 2..out.len() {
        let n = k as f64;
        let c = 2.0 * n + ab;
        let lead = (c - 1.0) * (c * (c - 2.0) * t + diff_sq);
        let back = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c;
        let den = 2.0 * n * (n + ab) * (c - 2.0);
        out[k] = (lead * out[k - 1] - back * out[k - 2]) / den;
    }
}

fn jacobi_p(n: usize, alpha: f64, beta: f64, t: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    jacobi_p_into(alpha, beta, t, &mut buf);
    buf[n]
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} lies outside [-1, 1]")));
    }
    Ok(())
}

/// Orthonormal `\tilde P_n(t)`.
pub fn eval_orthonormal(n: usize, pair: &JacobiPair, t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    Ok(jacobi_p(n, pair.alpha, pair.beta, t) * (-0.5 * log_jacobi_norm(n, pair)).exp())
}

/// `d/dt \tilde P_n(t)`, from `P_n' = (n + alpha + beta + 1)/2 * P_{n-1}^{(alpha+1, beta+1)}`.
pub fn eval_orthonormal_deriv(n: usize, pair: &JacobiPair, t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    if n == 0 {
        return Ok(0.0);
    }
    let (a, b) = (pair.alpha, pair.beta);
    let raw = 0.5 * (n as f64 + a + b + 1.0) * jacobi_p(n - 1, a + 1.0, b + 1.0, t);
    Ok(raw * (-0.5 * log_jacobi_norm(n, pair)).exp())
}

/// Batched evaluator for `\tilde P_0, ..., \tilde P_{len-1}` with precomputed normalizations.
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    pair: JacobiPair,
    inv_sqrt_norm: Vec<f64>,
}

impl JacobiBasis {
    pub fn new(pair: JacobiPair, len: usize) -> Self {
        let inv_sqrt_norm = (0..len)
            .map(|k| (-0.5 * log_jacobi_norm(k, &pair)).exp())
            .collect();
        Self {
            pair,
            inv_sqrt_norm,
        }
    }

    pub fn pair(&self) -> &JacobiPair {
        &self.pair
    }

    pub fn len(&self) -> usize {
        self.inv_sqrt_norm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_sqrt_norm.is_empty()
    }

    /// Writes `\tilde P_k(t)` for `k < out.len()`; `out` may be shorter than the basis.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        assert!(out.len() <= self.len(), "basis holds {} degrees", self.len());
        jacobi_p_into(self.pair.alpha, self.pair.beta, t, out);
        for (v, s) in out.iter_mut().zip(&self.inv_sqrt_norm) {
            *v *= s;
        }
    }

    pub fn eval_vec(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(t, &mut out);
        out
    }

    /// Row-major `points.len() x len` table of basis values.
    pub fn table(&self, points: &[f64]) -> Vec<f64> {
        let len = self.len();
        let mut out = vec![0.0; points.len() * len];
        for (row, &t) in out.chunks_mut(len.max(1)).zip(points) {
            self.eval_into(t, &mut row[..len]);
        }
        out
    }
}

/// Gauss-Jacobi rule with `nodes` strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub pair: JacobiPair,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn degree_n(&self) -> usize {
        self.nodes.len()
    }

    /// `\sum_k w_k f(x_k)`, approximating `\int f w`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson-type shifts.
/// `offdiag[i]` couples rows `i` and `i + 1`; its last entry is ignored.
fn tridiagonal_eigenvalues(diag: &mut [f64], offdiag: &mut [f64]) -> std::result::Result<(), usize> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    offdiag[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if offdiag[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(l);
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + offdiag[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * offdiag[i];
                let b = c * offdiag[i];
                r = f.hypot(g);
                offdiag[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    offdiag[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            offdiag[l] = g;
            offdiag[m] = 0.0;
        }
    }
    Ok(())
}

/// Golub-Welsch Gauss-Jacobi rule with `n` nodes, exact for polynomials of degree `<= 2n - 1`.
///
/// Nodes are eigenvalues of the Jacobi matrix, polished by Newton steps on `P_n`.
/// Weights use the Christoffel form `1 / \sum_{m<n} \tilde P_m(x_k)^2`, which is positive
/// by construction and keeps full relative accuracy near the endpoints.
pub fn gauss_jacobi(n: usize, pair: &JacobiPair) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "a Gauss rule needs at least one node".into(),
        ));
    }
    let (a, b) = (pair.alpha, pair.beta);
    let ab = a + b;
    let mut diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let c = 2.0 * k as f64 + ab;
                (b * b - a * a) / (c * (c + 2.0))
            }
        })
        .collect();
    let mut offdiag: Vec<f64> = (1..=n)
        .map(|k| {
            if k >= n {
                return 0.0;
            }
            let kf = k as f64;
            let c = 2.0 * kf + ab;
            let sq = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
            };
            sq.sqrt()
        })
        .collect();
    tridiagonal_eigenvalues(&mut diag, &mut offdiag).map_err(|_| Error::Convergence {
        degree: n,
        residual: f64::NAN,
    })?;
    let mut nodes = diag;
    nodes.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));

    let mut worst = 0.0f64;
    let mut p_buf = vec![0.0; n + 1];
    let mut dp_buf = vec![0.0; n];
    let dscale = 0.5 * (n as f64 + ab + 1.0);
    for x in nodes.iter_mut() {
        let mut step = 0.0;
        for _ in 0..3 {
            jacobi_p_into(a, b, *x, &mut p_buf);
            jacobi_p_into(a + 1.0, b + 1.0, *x, &mut dp_buf);
            let dp = dscale * dp_buf[n - 1];
            if dp == 0.0 {
                break;
            }
            step = p_buf[n] / dp;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        worst = worst.max(step.abs());
    }
    if !(worst <= 1e-13) {
        return Err(Error::Convergence {
            degree: n,
            residual: worst,
        });
    }

    let basis = JacobiBasis::new(*pair, n);
    let mut vals = vec![0.0; n];
    let weights = nodes
        .iter()
        .map(|&x| {
            basis.eval_into(x, &mut vals);
            1.0 / vals.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(QuadratureRule {
        pair: *pair,
        nodes,
        weights,
    })
}

type RuleKey = (usize, u64, u64);

struct RuleCache {
    map: HashMap<RuleKey, Arc<QuadratureRule>>,
    order: VecDeque<RuleKey>,
}

const RULE_CACHE_CAPACITY: usize = 64;

/// [`gauss_jacobi`] behind a small process-wide cache (oldest entries evicted first).
pub fn gauss_jacobi_cached(n: usize, pair: &JacobiPair) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<RuleCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        Mutex::new(RuleCache {
            map: HashMap::new(),
            order: VecDeque::new(),
        })
    });
    let key = (n, pair.alpha.to_bits(), pair.beta.to_bits());
    if let Some(rule) = cache.lock().expect("rule cache").map.get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(n, pair)?);
    let mut guard = cache.lock().expect("rule cache");
    if !guard.map.contains_key(&key) {
        if guard.order.len() >= RULE_CACHE_CAPACITY {
            if let Some(old) = guard.order.pop_front() {
                guard.map.remove(&old);
            }
        }
        guard.order.push_back(key);
        guard.map.insert(key, Arc::clone(&rule));
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Exact integral over [-1, 1] of a polynomial given by ascending coefficients.
    fn poly_integral(coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { 2.0 * c / (k as f64 + 1.0) } else { 0.0 })
            .sum()
    }

    fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    /// Gamma at a positive half-integer or integer by the product recurrence.
    fn gamma_half_steps(x: f64) -> f64 {
        let mut v = if x.fract() == 0.0 { 1.0 } else { std::f64::consts::PI.sqrt() };
        let mut y = if x.fract() == 0.0 { 1.0 } else { 0.5 };
        while y < x - 1e-12 {
            v *= y;
            y += 1.0;
        }
        v
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(jacobi_norm(0, &JacobiPair::LEGENDRE), 2.0, max_relative = 1e-14);
        assert_relative_eq!(jacobi_norm(5, &JacobiPair::LEGENDRE), 2.0 / 11.0, max_relative = 1e-14);
        // (1 - t) * ((3t + 1)/2)^2 integrated exactly.
        let p1 = [0.5, 1.5];
        let integrand = poly_mul(&poly_mul(&p1, &p1), &[1.0, -1.0]);
        let oracle = poly_integral(&integrand);
        assert_relative_eq!(oracle, 1.0, max_relative = 1e-15);
        let pair = JacobiPair::new(1.0, 0.0).unwrap();
        assert_relative_eq!(jacobi_norm(1, &pair), oracle, max_relative = 1e-14);
    }

    #[test]
    fn norm_survives_large_degree() {
        let pair = JacobiPair::new(2.5, -0.5).unwrap();
        let h = jacobi_norm(1 << 16, &pair);
        assert!(h.is_finite() && h > 0.0);
        // h_n ~ 2^{alpha+beta} / n asymptotically.
        let n = (1u64 << 16) as f64;
        assert!((h * n / 4.0 - 1.0).abs() < 1e-3, "h*n = {}", h * n);
    }

    #[test]
    fn chebyshev_norm_at_zero_uses_the_limit() {
        assert_relative_eq!(
            jacobi_norm(0, &JacobiPair::CHEBYSHEV),
            std::f64::consts::PI,
            max_relative = 1e-14
        );
        let oracle = gamma_half_steps(3.5).powi(2) / (6.0 * gamma_half_steps(4.0) * gamma_half_steps(3.0));
        assert_relative_eq!(jacobi_norm(3, &JacobiPair::CHEBYSHEV), oracle, max_relative = 1e-13);
    }

    #[test]
    fn eval_examples() {
        let t = eval_orthonormal(0, &JacobiPair::LEGENDRE, 0.3).unwrap();
        assert_relative_eq!(t, 1.0 / 2f64.sqrt(), max_relative = 1e-15);
        let t = eval_orthonormal(1, &JacobiPair::LEGENDRE, 0.5).unwrap();
        assert_relative_eq!(t, 0.5 * (1.5f64).sqrt(), max_relative = 1e-15);

        let pair = JacobiPair::new(0.5, -0.5).unwrap();
        let binom: f64 = (1..=7).map(|k| (k as f64 + 0.5) / k as f64).product();
        let h7 = 2.0 / 15.0 * gamma_half_steps(8.5) * gamma_half_steps(7.5)
            / (gamma_half_steps(8.0) * gamma_half_steps(8.0));
        let got = eval_orthonormal(7, &pair, 1.0).unwrap();
        assert_relative_eq!(got, binom / h7.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn eval_rejects_points_outside_interval() {
        assert!(matches!(
            eval_orthonormal(3, &JacobiPair::LEGENDRE, 1.0 + 1e-9),
            Err(Error::Domain(_))
        ));
        assert!(eval_orthonormal_deriv(3, &JacobiPair::LEGENDRE, -2.0).is_err());
    }

    #[test]
    fn pair_rejects_small_exponents() {
        assert!(JacobiPair::new(-0.6, 0.0).is_err());
        assert!(JacobiPair::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn derivative_examples() {
        let pair = JacobiPair::new(1.3, 0.2).unwrap();
        assert_eq!(eval_orthonormal_deriv(0, &pair, 0.4).unwrap(), 0.0);
        for t in [-1.0, -0.3, 0.9] {
            let d = eval_orthonormal_deriv(1, &JacobiPair::LEGENDRE, t).unwrap();
            assert_relative_eq!(d, 1.5f64.sqrt(), max_relative = 1e-14);
        }
        let h = 1e-6;
        let fd = (eval_orthonormal(4, &JacobiPair::LEGENDRE, 0.2 + h).unwrap()
            - eval_orthonormal(4, &JacobiPair::LEGENDRE, 0.2 - h).unwrap())
            / (2.0 * h);
        let d = eval_orthonormal_deriv(4, &JacobiPair::LEGENDRE, 0.2).unwrap();
        assert!((d - fd).abs() < 1e-7, "{d} vs {fd}");
    }

    #[test]
    fn basis_matches_pointwise_evaluation() {
        let pair = JacobiPair::new(0.7, 2.1).unwrap();
        let basis = JacobiBasis::new(pair, 40);
        let vals = basis.eval_vec(-0.37);
        for (k, v) in vals.iter().enumerate() {
            let direct = eval_orthonormal(k, &pair, -0.37).unwrap();
            assert!((v - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn gauss_examples() {
        let r = gauss_jacobi(2, &JacobiPair::LEGENDRE).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], s, max_relative = 1e-15);
        assert_relative_eq!(r.nodes[1], -s, max_relative = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.weights[1], 1.0, max_relative = 1e-14);

        let r = gauss_jacobi(2, &JacobiPair::CHEBYSHEV).unwrap();
        let c = std::f64::consts::FRAC_PI_4.cos();
        assert_relative_eq!(r.nodes[0], c, max_relative = 1e-15);
        assert_relative_eq!(r.nodes[1], -c, max_relative = 1e-15);
        for w in &r.weights {
            assert_relative_eq!(*w, std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
        }

        let r = gauss_jacobi(8, &JacobiPair::new(1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_single_node() {
        let pair = JacobiPair::new(1.5, 0.25).unwrap();
        let r = gauss_jacobi(1, &pair).unwrap();
        assert_relative_eq!(r.nodes[0], (0.25 - 1.5) / (1.75 + 2.0), max_relative = 1e-14);
        assert_relative_eq!(r.weights[0], jacobi_norm(0, &pair), max_relative = 1e-14);
        assert!(gauss_jacobi(0, &pair).is_err());
    }

    #[test]
    fn gauss_rule_invariants_at_larger_degree() {
        for (a, b) in [(0.0, 0.0), (-0.5, 2.5), (3.0, -0.5), (1.25, 1.75)] {
            let pair = JacobiPair::new(a, b).unwrap();
            for n in [16, 129, 512] {
                let r = gauss_jacobi(n, &pair).unwrap();
                assert!(r.weights.iter().all(|&w| w > 0.0));
                assert!(r.nodes.windows(2).all(|w| w[0] > w[1]));
                assert!(r.nodes.iter().all(|x| x.abs() < 1.0));
                let total: f64 = r.weights.iter().sum();
                assert_relative_eq!(total, jacobi_norm(0, &pair), max_relative = 1e-12);
                let resid = r
                    .nodes
                    .iter()
                    .map(|&x| {
                        let p = jacobi_p(n, a, b, x);
                        let dp = 0.5 * (n as f64 + a + b + 1.0) * jacobi_p(n - 1, a + 1.0, b + 1.0, x);
                        (p / dp).abs()
                    })
                    .fold(0.0, f64::max);
                assert!(resid < 1e-13, "node residual {resid} for n = {n}");
            }
        }
    }

    #[test]
    fn weighted_regularized_bound_is_stable_in_degree() {
        // |P~_n(x)| sqrt(w(n; x)) bounded uniformly in n.
        let grid: Vec<f64> = (0..2000).map(|i| -1.0 + 2.0 * i as f64 / 1999.0).collect();
        for pair in [
            JacobiPair::LEGENDRE,
            JacobiPair::CHEBYSHEV,
            JacobiPair::new(2.0, 0.5).unwrap(),
        ] {
            let basis = JacobiBasis::new(pair, 65);
            let mut sup = vec![0.0f64; 65];
            for &x in &grid {
                let vals = basis.eval_vec(x);
                for n in 1..65 {
                    let v = vals[n].abs() * pair.regularized_weight(n as u64, x).sqrt();
                    sup[n] = sup[n].max(v);
                }
            }
            let mut n = 4;
            while 2 * n < 65 {
                let ratio = sup[2 * n] / sup[n];
                assert!((0.5..=2.0).contains(&ratio), "{pair:?}: C({})/C({n}) = {ratio}", 2 * n);
                n *= 2;
            }
        }
    }

    #[test]
    fn node_spacing_scales_dyadically() {
        for pair in [JacobiPair::LEGENDRE, JacobiPair::new(1.5, -0.5).unwrap()] {
            let mut lows = Vec::new();
            let mut highs = Vec::new();
            for j in 0..=8u32 {
                let r = gauss_jacobi(1 << (j + 1), &pair).unwrap();
                let theta: Vec<f64> = r.nodes.iter().map(|x| x.acos()).collect();
                let scale = 2f64.powi(j as i32);
                let mut gaps = vec![theta[0], std::f64::consts::PI - theta[theta.len() - 1]];
                gaps.extend(theta.windows(2).map(|w| w[1] - w[0]));
                let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min) * scale;
                let hi = gaps.iter().cloned().fold(0.0, f64::max) * scale;
                lows.push(lo);
                highs.push(hi);
            }
            let lo_min = lows.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi_max = highs.iter().cloned().fold(0.0, f64::max);
            assert!(lo_min > 0.3 && hi_max < 3.2, "{pair:?}: [{lo_min}, {hi_max}]");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn orthonormal_under_gauss_rule(a in -0.5f64..3.0, b in -0.5f64..3.0, m in 0usize..=32, n in 0usize..=32) {
            let pair = JacobiPair::new(a, b).unwrap();
            let nodes = (m + n) / 2 + 1;
            let rule = gauss_jacobi(nodes, &pair).unwrap();
            let basis = JacobiBasis::new(pair, 33);
            let mut s = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = basis.eval_vec(x);
                s += w * v[m] * v[n];
            }
            let expect = if m == n { 1.0 } else { 0.0 };
            prop_assert!((s - expect).abs() < 1e-10, "m={} n={} got {}", m, n, s);
        }
    }
}
