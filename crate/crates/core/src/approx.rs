//! Greedy n-term needlet approximation and Jackson-rate tables.
//!
//! The greedy approximant keeps the `n` terms `<f, psi_xi> psi_xi` of largest `L^p` norm. It
//! upper-bounds the best n-term error `sigma_n(f)_p`, which is not computed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{JacobiExpansion, TensorJacobiParams};
use crate::frame::{Family, NeedletCoefficients, NeedletFrame};
use crate::jacobi::{gauss_jacobi_cached, JacobiBasis, JacobiPair};

/// Largest needlet count for which `L^p` term norms with `p != 2` are computed one by one.
pub const TERM_NORM_BUDGET: usize = 1 << 16;

/// `tau` with `1/tau = s/d + 1/p`.
pub fn tau_for(s: f64, d: usize, p: f64) -> Result<f64> {
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let inv = s / d as f64 + inv_p;
    if !(inv > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need p > 0 and s/d + 1/p > 0 (s={s}, p={p})"
        )));
    }
    Ok(1.0 / inv)
}

/// `||psi_xi||_p` for every synthesis needlet, indexed `[j][flat]`.
pub fn term_norms(frame: &NeedletFrame, p: f64) -> Result<Vec<Vec<f64>>> {
    if p == 2.0 {
        return Ok(frame.needlet_l2_norms(Family::Synthesis));
    }
    let count: usize = (0..=frame.j_max()).map(|j| frame.level(j).len()).sum();
    if count > TERM_NORM_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{count} needlet L^{p} norms exceed the budget of {TERM_NORM_BUDGET}"
        )));
    }
    (0..=frame.j_max())
        .map(|j| {
            (0..frame.level(j).len())
                .into_par_iter()
                .map(|i| frame.needlet(j, i, Family::Synthesis).lp_norm(p))
                .collect()
        })
        .collect()
}

/// `(sum_xi ||<f, psi_xi> psi_xi||_p^tau)^{1/tau}` with `1/tau = s/d + 1/p`.
pub fn bs_tau_norm(f: &JacobiExpansion, s: f64, p: f64, frame: &NeedletFrame) -> Result<f64> {
    let coeffs = frame.analyze(f)?;
    let norms = term_norms(frame, p)?;
    bs_tau_from_terms(&coeffs, &norms, tau_for(s, frame.dim(), p)?)
}

fn bs_tau_from_terms(coeffs: &NeedletCoefficients, norms: &[Vec<f64>], tau: f64) -> Result<f64> {
    let sum: f64 = coeffs
        .iter_nonzero()
        .map(|(j, i, h)| (h.norm() * norms[j as usize][i]).powf(tau))
        .sum();
    Ok(sum.powf(1.0 / tau))
}

/// One row of a Jackson table.
#[derive(Debug, Clone, Serialize)]
pub struct JacksonRow {
    pub n: usize,
    pub error: f64,
    /// `error * n^{s/d} / ||f||_{B^s_tau}`.
    pub normalized: f64,
}

/// A target analyzed by a tight frame, with its terms ranked for greedy selection.
#[derive(Debug, Clone)]
pub struct ApproxRun {
    frame: NeedletFrame,
    target: JacobiExpansion,
    p: f64,
    coeffs: NeedletCoefficients,
    norms: Vec<Vec<f64>>,
    ranking: Vec<(u32, usize)>,
    target_norm: f64,
}

impl ApproxRun {
    pub fn new(frame: NeedletFrame, target: JacobiExpansion, p: f64) -> Result<Self> {
        if !frame.is_tight() {
            return Err(Error::InvalidParameter(
                "n-term approximation needs a tight frame (type (c), real cutoff)".into(),
            ));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("need p >= 1 (got {p})")));
        }
        let coeffs = frame.analyze(&target)?;
        let norms = term_norms(&frame, p)?;
        let mut scored: Vec<(f64, u32, usize)> = coeffs
            .iter_nonzero()
            .map(|(j, i, h)| (h.norm() * norms[j as usize][i], j, i))
            .collect();
        scored.par_sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let ranking = scored.into_iter().map(|(_, j, i)| (j, i)).collect();
        let target_norm = target.lp_norm(p)?;
        Ok(Self {
            frame,
            target,
            p,
            coeffs,
            norms,
            ranking,
            target_norm,
        })
    }

    pub fn frame(&self) -> &NeedletFrame {
        &self.frame
    }

    pub fn target(&self) -> &JacobiExpansion {
        &self.target
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coefficients(&self) -> &NeedletCoefficients {
        &self.coeffs
    }

    pub fn target_norm(&self) -> f64 {
        self.target_norm
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.ranking.len()
    }

    /// Terms in greedy order.
    pub fn ranking(&self) -> &[(u32, usize)] {
        &self.ranking
    }

    /// `|<f, psi_xi>| ||psi_xi||_p`.
    pub fn term_norm(&self, j: u32, flat: usize) -> f64 {
        self.coeffs.get(j, flat).norm() * self.norms[j as usize][flat]
    }

    fn error_of(&self, keep: &[(u32, usize)]) -> Result<(JacobiExpansion, f64)> {
        let g = self.frame.synthesize(&self.coeffs.restricted(keep))?;
        let shape: Vec<usize> = self
            .target
            .shape()
            .iter()
            .zip(g.shape())
            .map(|(a, b)| *a.max(b))
            .collect();
        let diff = self
            .target
            .resized(&shape)
            .add_scaled(&g.resized(&shape), Complex64::new(-1.0, 0.0))?;
        let err = diff.trimmed().lp_norm(self.p)?;
        Ok((g, err))
    }

    /// Approximant from the `n` leading terms and its `L^p` error.
    pub fn greedy(&self, n: usize) -> Result<(JacobiExpansion, f64)> {
        if n == 0 {
            return Err(Error::InvalidParameter("n-term approximation needs n >= 1".into()));
        }
        self.error_of(&self.ranking[..n.min(self.ranking.len())])
    }

    pub fn greedy_errors(&self, n_list: &[usize]) -> Result<Vec<f64>> {
        n_list.iter().map(|&n| Ok(self.greedy(n)?.1)).collect()
    }

    /// Baseline keeping every coefficient of levels `0..=L` for the largest `L` whose
    /// coefficient count fits in `n`. Returns `(L, error)`, or `None` when level 0 alone
    /// exceeds the budget.
    pub fn linear_truncation(&self, n: usize) -> Result<Option<(u32, f64)>> {
        let mut keep = Vec::new();
        let mut top = None;
        for j in 0..=self.frame.j_max() {
            let level: Vec<(u32, usize)> = self
                .coeffs
                .level(j)
                .map(|h| {
                    h.iter()
                        .enumerate()
                        .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                        .map(|(i, _)| (j, i))
                        .collect()
                })
                .unwrap_or_default();
            if keep.len() + level.len() > n {
                break;
            }
            keep.extend(level);
            top = Some(j);
        }
        match top {
            None => Ok(None),
            Some(j) => Ok(Some((j, self.error_of(&keep)?.1))),
        }
    }

    pub fn bs_tau_norm(&self, s: f64) -> Result<f64> {
        bs_tau_from_terms(&self.coeffs, &self.norms, tau_for(s, self.frame.dim(), self.p)?)
    }

    pub fn jackson_table(&self, n_list: &[usize], s: f64) -> Result<Vec<JacksonRow>> {
        let b = self.bs_tau_norm(s)?;
        let d = self.frame.dim() as f64;
        n_list
            .iter()
            .map(|&n| {
                let error = self.greedy(n)?.1;
                let normalized = if b > 0.0 { error * (n as f64).powf(s / d) / b } else { 0.0 };
                Ok(JacksonRow {
                    n,
                    error,
                    normalized,
                })
            })
            .collect()
    }
}

/// Kendall rank correlation of `values` against their index (tau-a).
pub fn kendall_tau(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match values[j].partial_cmp(&values[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

/// `int_0^1 g(u) (1 - u)^gamma du` with an `m`-point Gauss-Jacobi rule.
fn endpoint_integral(gamma: f64, m: usize, g: impl Fn(&[f64]) -> Vec<f64>) -> Result<Vec<f64>> {
    let rule = gauss_jacobi_cached(m, &JacobiPair::new(gamma, 0.0)?)?;
    let us: Vec<f64> = rule.nodes.iter().map(|t| 0.5 * (1.0 + t)).collect();
    let vals = g(&us);
    let len = vals.len() / m;
    let scale = 2f64.powf(-gamma - 1.0);
    let mut out = vec![0.0; len];
    for (row, w) in vals.chunks(len).zip(&rule.weights) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += scale * w * v;
        }
    }
    Ok(out)
}

/// Orthonormal expansion of `x -> |x_1|^{1/2}` truncated at degree `degree`.
///
/// The coefficients `int |t|^{1/2} P~_k(t) w(t) dt` are computed on each half-interval after
/// substituting `t = +-u^2`, which leaves smooth integrands against `(1 - u)^alpha` and
/// `(1 - u)^beta`.
pub fn singular_x1(params: &TensorJacobiParams, degree: usize) -> Result<JacobiExpansion> {
    let d = params.dim();
    let pair = params.pair(0);
    let (a, b) = (pair.alpha(), pair.beta());
    let basis = JacobiBasis::new(*pair, degree + 1);
    let m = degree + 64;
    // t = u^2: 2u^2 (1 - u)^a (1 + u)^a (1 + u^2)^b P~_k(u^2).
    let right = endpoint_integral(a, m, |us| {
        let sq: Vec<f64> = us.iter().map(|u| u * u).collect();
        let mut t = basis.table(&sq);
        for (row, u) in t.chunks_mut(degree + 1).zip(us) {
            let f = 2.0 * u * u * (1.0 + u).powf(a) * (1.0 + u * u).powf(b);
            row.iter_mut().for_each(|v| *v *= f);
        }
        t
    })?;
    // t = -u^2: 2u^2 (1 - u)^b (1 + u)^b (1 + u^2)^a P~_k(-u^2).
    let left = endpoint_integral(b, m, |us| {
        let sq: Vec<f64> = us.iter().map(|u| -u * u).collect();
        let mut t = basis.table(&sq);
        for (row, u) in t.chunks_mut(degree + 1).zip(us) {
            let f = 2.0 * u * u * (1.0 + u).powf(b) * (1.0 + u * u).powf(a);
            row.iter_mut().for_each(|v| *v *= f);
        }
        t
    })?;
    let rest: f64 = (1..d)
        .map(|i| crate::jacobi::jacobi_norm(0, params.pair(i)).sqrt())
        .product();
    let mut shape = vec![1; d];
    shape[0] = degree + 1;
    let coeffs = right
        .iter()
        .zip(&left)
        .map(|(r, l)| Complex64::new((r + l) * rest, 0.0))
        .collect();
    JacobiExpansion::from_coeffs(params.clone(), shape, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{build_frame, random_bandlimited, FrameConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tight(d: usize, j_max: u32) -> NeedletFrame {
        let p = TensorJacobiParams::legendre(d);
        build_frame(&p, FrameConfig::default_tight(d).unwrap(), j_max).unwrap()
    }

    #[test]
    fn full_budget_reconstructs() {
        let fr = tight(2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_bandlimited(fr.params(), 8, &mut rng);
        let run = ApproxRun::new(fr, f, 2.0).unwrap();
        let (_, err) = run.greedy(run.term_count()).unwrap();
        assert!(err <= 1e-9 * run.target_norm());
        let errs = run.greedy_errors(&[1, 4, 16, 64, 256, run.term_count()]).unwrap();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    }

    #[test]
    fn single_needlet_target() {
        let fr = tight(2, 3);
        let psi = fr.needlet(2, 5, Family::Synthesis);
        for p in [2.0, 3.0] {
            let run = ApproxRun::new(fr.clone(), psi.clone(), p).unwrap();
            let (_, err) = run.greedy(1).unwrap();
            assert!(err < run.target_norm(), "p={p}: {err} vs {}", run.target_norm());
            let norm_p = psi.lp_norm(p).unwrap();
            let self_coeff = run.coefficients().get(2, 5).norm();
            let b = run.bs_tau_norm(0.5).unwrap();
            assert!(b >= self_coeff * norm_p * (1.0 - 1e-12));
        }
    }

    #[test]
    fn zero_target() {
        let fr = tight(1, 3);
        let z = JacobiExpansion::zeros(fr.params().clone(), vec![1]).unwrap();
        assert_eq!(bs_tau_norm(&z, 0.5, 2.0, &fr).unwrap(), 0.0);
    }

    #[test]
    fn greedy_beats_linear_truncation() {
        let fr = tight(2, 5);
        let f = singular_x1(fr.params(), 16).unwrap();
        let run = ApproxRun::new(fr, f, 2.0).unwrap();
        for n in [1, 5, 21, 85, 341] {
            let (_, g) = run.greedy(n).unwrap();
            if let Some((_, lin)) = run.linear_truncation(n).unwrap() {
                assert!(g <= lin * (1.0 + 1e-12), "n={n}: {g} > {lin}");
            }
        }
    }

    #[test]
    fn singular_coefficients_match_quadrature() {
        // Midpoint rule in u on [0, 1]; even k are twice the right half.
        let p = TensorJacobiParams::legendre(1);
        let f = singular_x1(&p, 12).unwrap();
        let pair = *p.pair(0);
        let m = 200_000;
        for k in [0usize, 2, 4, 12] {
            let mut s = 0.0;
            for i in 0..m {
                let u = (i as f64 + 0.5) / m as f64;
                let t = u * u;
                let pk = crate::jacobi::eval_orthonormal(k, &pair, t).unwrap();
                s += 2.0 * u * u * pk * 2.0 / m as f64;
            }
            assert!((f.get(&[k]).re - s).abs() < 1e-8, "k={k}: {} vs {s}", f.get(&[k]).re);
        }
        for k in [1usize, 3, 11] {
            assert!(f.get(&[k]).re.abs() < 1e-13);
        }
        // ||f||_2^2 = int |t| dt = 1.
        let g = singular_x1(&p, 400).unwrap();
        assert!((g.l2_norm().powi(2) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kendall() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(kendall_tau(&[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(kendall_tau(&[1.0, 3.0, 2.0, 4.0]), 4.0 / 6.0);
    }

    #[test]
    fn needs_tight_frame() {
        let p = TensorJacobiParams::legendre(1);
        let fr = build_frame(&p, FrameConfig::default_dual(1).unwrap(), 3).unwrap();
        let f = JacobiExpansion::zeros(p, vec![1]).unwrap();
        assert!(ApproxRun::new(fr, f, 2.0).is_err());
        assert!(tau_for(0.5, 2, 2.0).unwrap() - 4.0 / 3.0 < 1e-15);
    }
}
