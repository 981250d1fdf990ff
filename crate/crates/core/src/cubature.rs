//! Dyadic tensor Gauss-Jacobi cubature levels, their tiles, weighted measures of boxes and
//! `rho`-balls, and a box-search estimate of the maximal function of a ball indicator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{unflatten, JacobiExpansion, TensorJacobiParams};
use crate::jacobi::{gauss_jacobi_cached, jacobi_norm, JacobiPair};
use crate::kernel::weight_w;

/// Default cap on the number of nodes of a level.
pub const NODE_BUDGET: usize = 1 << 22;

/// Nodes of the per-coordinate sub-rules used for weighted measures of intervals.
pub const SUBRULE_NODES: usize = 32;

/// `int_a^b (1 - t)^alpha (1 + t)^beta dt` for `-1 <= a <= b <= 1`.
///
/// Uses a 32-node Gauss-Jacobi rule that absorbs the endpoint singularity when the interval
/// touches `1` or `-1`, and a Gauss-Legendre rule otherwise.
pub fn weight_integral(pair: &JacobiPair, a: f64, b: f64) -> f64 {
    let (a, b) = (a.clamp(-1.0, 1.0), b.clamp(-1.0, 1.0));
    if b <= a {
        return 0.0;
    }
    if a == -1.0 && b == 1.0 {
        return jacobi_norm(0, pair);
    }
    let (al, be) = (pair.alpha(), pair.beta());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    if b == 1.0 {
        // t = mid + half u, 1 - t = half (1 - u).
        let rule = subrule(al, 0.0);
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| w * (1.0 + mid + half * u).powf(be))
            .sum();
        return s * half.powf(al + 1.0);
    }
    if a == -1.0 {
        let rule = subrule(0.0, be);
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| w * (1.0 - mid - half * u).powf(al))
            .sum();
        return s * half.powf(be + 1.0);
    }
    let rule = subrule(0.0, 0.0);
    let s: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| w * pair.weight(mid + half * u))
        .sum();
    s * half
}

fn subrule(alpha: f64, beta: f64) -> std::sync::Arc<crate::jacobi::QuadratureRule> {
    let pair = JacobiPair::new(alpha, beta).expect("exponents of a valid pair");
    gauss_jacobi_cached(SUBRULE_NODES, &pair).expect("32-node rule")
}

/// `mu(I)` for the box `I = prod_i [lo_i, hi_i]`.
pub fn tile_measure(tile: &[(f64, f64)], params: &TensorJacobiParams) -> f64 {
    tile.iter()
        .zip(params.pairs())
        .map(|(&(a, b), p)| weight_integral(p, a, b))
        .product()
}

/// One coordinate of a level: Gauss nodes (decreasing), weights, and tiles
/// `[lower, upper]` bounded by midpoints of consecutive nodes, with the outer tiles closed
/// at `+-1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub tiles: Vec<(f64, f64)>,
    pub tile_measures: Vec<f64>,
}

impl AxisRule {
    fn new(pair: &JacobiPair, m: usize) -> Result<Self> {
        let rule = gauss_jacobi_cached(m, pair)?;
        let nodes = rule.nodes.clone();
        let tiles: Vec<(f64, f64)> = (0..m)
            .map(|k| {
                let upper = if k == 0 { 1.0 } else { 0.5 * (nodes[k - 1] + nodes[k]) };
                let lower = if k + 1 == m { -1.0 } else { 0.5 * (nodes[k] + nodes[k + 1]) };
                (lower, upper)
            })
            .collect();
        let tile_measures = tiles.iter().map(|&(a, b)| weight_integral(pair, a, b)).collect();
        Ok(Self {
            nodes,
            weights: rule.weights.clone(),
            tiles,
            tile_measures,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The level-`j` cubature `X_j`: tensor Gauss-Jacobi with `2^{j+1}` nodes per axis, exact for
/// tensor polynomials of degree `2^{j+2} - 1` in each variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubatureLevel {
    j: u32,
    params: TensorJacobiParams,
    axes: Vec<AxisRule>,
}

/// Builds level `j` under the default node budget.
pub fn build_level(j: u32, params: &TensorJacobiParams) -> Result<CubatureLevel> {
    build_level_with_budget(j, params, NODE_BUDGET)
}

pub fn build_level_with_budget(
    j: u32,
    params: &TensorJacobiParams,
    budget: usize,
) -> Result<CubatureLevel> {
    let m = 1usize
        .checked_shl(j + 1)
        .filter(|m| *m > 0 && j < 40)
        .ok_or_else(|| Error::BudgetExceeded(format!("level {j} is too deep")))?;
    let total = (m as f64).powi(params.dim() as i32);
    if total > budget as f64 {
        return Err(Error::BudgetExceeded(format!(
            "level {j} has {m}^{} = {total} nodes, budget {budget}",
            params.dim()
        )));
    }
    let axes = params
        .pairs()
        .par_iter()
        .map(|p| AxisRule::new(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(CubatureLevel {
        j,
        params: params.clone(),
        axes,
    })
}

impl CubatureLevel {
    pub fn level(&self) -> u32 {
        self.j
    }

    pub fn params(&self) -> &TensorJacobiParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisRule] {
        &self.axes
    }

    pub fn per_axis(&self) -> usize {
        self.axes[0].len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(AxisRule::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(AxisRule::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis node indices of the node with row-major index `flat`.
    pub fn index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        unflatten(flat, &self.shape(), &mut idx);
        idx
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.nodes[k])
            .collect()
    }

    /// `c_xi`.
    pub fn weight(&self, flat: usize) -> f64 {
        self.index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.weights[k])
            .product()
    }

    /// `I_xi` as per-axis `[lower, upper]`.
    pub fn tile(&self, flat: usize) -> Vec<(f64, f64)> {
        self.index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.tiles[k])
            .collect()
    }

    /// `mu(I_xi)`.
    pub fn tile_measure(&self, flat: usize) -> f64 {
        self.index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.tile_measures[k])
            .product()
    }

    /// All nodes, row-major.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// All weights, row-major.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Node axes in the layout expected by [`JacobiExpansion::eval_grid`].
    pub fn node_axes(&self) -> Vec<Vec<f64>> {
        self.axes.iter().map(|a| a.nodes.clone()).collect()
    }

    /// `sum_xi c_xi f(xi)`.
    pub fn integrate(&self, f: &JacobiExpansion) -> Complex64 {
        let vals = f.eval_grid(&self.node_axes());
        vals.iter().zip(self.weights()).map(|(v, w)| v * w).sum()
    }

    /// Node index whose tile contains `x`.
    pub fn locate(&self, x: &[f64]) -> usize {
        let shape = self.shape();
        let mut flat = 0;
        for ((a, &t), &m) in self.axes.iter().zip(x).zip(&shape) {
            let k = a
                .tiles
                .iter()
                .position(|&(lo, hi)| t >= lo && t <= hi)
                .unwrap_or(m - 1);
            flat = flat * m + k;
        }
        flat
    }
}

/// Exact `int f w` of an expansion: `f_0 prod_i sqrt(h_0^{(alpha_i, beta_i)})`.
pub fn spectral_integral(f: &JacobiExpansion) -> Complex64 {
    f.get(&vec![0; f.dim()]) * f.params().total_mass().sqrt()
}

/// Random tensor polynomial with every coordinate degree exactly `degree`.
pub fn random_tensor_polynomial(
    params: &TensorJacobiParams,
    degree: usize,
    rng: &mut ChaCha8Rng,
) -> JacobiExpansion {
    let d = params.dim();
    JacobiExpansion::from_fn(params.clone(), vec![degree + 1; d], |nu| {
        let mut c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if nu.iter().all(|&k| k == degree) && c.norm() < 0.1 {
            c = Complex64::new(1.0, 0.0);
        }
        c
    })
    .expect("dimension matches")
}

/// `|sum c_xi f(xi) - int f w| / |int f w|` for a random polynomial of per-coordinate degree
/// `2^{j+2} - 1`.
pub fn exactness_error(level: &CubatureLevel, rng: &mut ChaCha8Rng) -> f64 {
    let deg = (1usize << (level.level() + 2)) - 1;
    let mut f = random_tensor_polynomial(level.params(), deg, rng);
    let zero = vec![0; f.dim()];
    if f.get(&zero).norm() < 0.5 {
        f.set(&zero, Complex64::new(1.0, 0.0));
    }
    let exact = spectral_integral(&f);
    (level.integrate(&f) - exact).norm() / exact.norm()
}

/// Summary of the comparability invariants of one level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub j: u32,
    pub node_count: usize,
    /// Extremes of `c_xi / (2^{-dj} W(2^j; xi))`.
    pub weight_ratio_min: f64,
    pub weight_ratio_max: f64,
    /// Extremes of `mu(I_xi) / c_xi`.
    pub tile_ratio_min: f64,
    pub tile_ratio_max: f64,
    /// `|sum mu(I_xi) - prod h_0| / prod h_0`.
    pub tile_partition_error: f64,
    pub exactness_error: f64,
    /// `2^j` times the extremes of the arccos gaps between consecutive nodes.
    pub gap_min: f64,
    pub gap_max: f64,
    /// `2^j` times the inscribed and circumscribed `rho`-ball radii of the tiles.
    pub ball_inner: f64,
    pub ball_outer: f64,
}

pub fn level_report(level: &CubatureLevel, rng: &mut ChaCha8Rng) -> LevelReport {
    let j = level.level();
    let d = level.dim();
    let scale = 2f64.powi(-(d as i32) * j as i32);
    let stats: Vec<(f64, f64)> = (0..level.len())
        .into_par_iter()
        .map(|i| {
            let xi = level.node(i);
            let c = level.weight(i);
            let wr = c / (scale * weight_w(1 << j, &xi, level.params()));
            (wr, level.tile_measure(i) / c)
        })
        .collect();
    let fold = |sel: fn(&(f64, f64)) -> f64| {
        stats.iter().map(sel).fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (wmin, wmax) = fold(|s| s.0);
    let (tmin, tmax) = fold(|s| s.1);
    let total: f64 = level
        .axes()
        .iter()
        .map(|a| a.tile_measures.iter().sum::<f64>())
        .product();
    let mass = level.params().total_mass();
    let (gap_min, gap_max) = arccos_gaps(level);
    let (ball_inner, ball_outer) = ball_nesting(level);
    LevelReport {
        j,
        node_count: level.len(),
        weight_ratio_min: wmin,
        weight_ratio_max: wmax,
        tile_ratio_min: tmin,
        tile_ratio_max: tmax,
        tile_partition_error: (total - mass).abs() / mass,
        exactness_error: exactness_error(level, rng),
        gap_min,
        gap_max,
        ball_inner,
        ball_outer,
    }
}

/// `2^j` times the smallest and largest arccos gap between consecutive nodes on any axis.
pub fn arccos_gaps(level: &CubatureLevel) -> (f64, f64) {
    let s = 2f64.powi(level.level() as i32);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for a in level.axes() {
        for w in a.nodes.windows(2) {
            let g = (w[1].acos() - w[0].acos()).abs() * s;
            lo = lo.min(g);
            hi = hi.max(g);
        }
    }
    (lo, hi)
}

/// `2^j` times the largest `r_1` and smallest `r_2` over nodes with
/// `B(xi, r_1) subset I_xi subset B(xi, r_2)`.
pub fn ball_nesting(level: &CubatureLevel) -> (f64, f64) {
    let s = 2f64.powi(level.level() as i32);
    let mut inner = f64::INFINITY;
    let mut outer = 0.0f64;
    for a in level.axes() {
        for (x, &(lo, hi)) in a.nodes.iter().zip(&a.tiles) {
            let th = x.acos();
            let (t_lo, t_hi) = (hi.acos(), lo.acos());
            let below = if hi == 1.0 { f64::INFINITY } else { th - t_lo };
            let above = if lo == -1.0 { f64::INFINITY } else { t_hi - th };
            inner = inner.min(below.min(above));
            outer = outer.max((th - t_lo).max(t_hi - th));
        }
    }
    (inner * s, outer * s)
}

/// How to obtain `mu(B(y, delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMethod {
    /// Integrates the weight over the arccos box.
    Bruteforce,
    /// `delta^d prod_i (sqrt(1 - y_i^2) + delta)^{2 gamma_i + 1}`.
    ClosedFormComparand,
}

fn gamma_for(pair: &JacobiPair, y: f64) -> f64 {
    if y >= 0.0 {
        pair.alpha()
    } else {
        pair.beta()
    }
}

/// The `rho`-ball `B(y, delta)` as per-axis `[lower, upper]`.
pub fn ball_box(y: &[f64], delta: f64) -> Vec<(f64, f64)> {
    y.iter()
        .map(|&t| {
            let phi = t.clamp(-1.0, 1.0).acos();
            ((phi + delta).min(PI).cos(), (phi - delta).max(0.0).cos())
        })
        .collect()
}

pub fn ball_measure(
    y: &[f64],
    delta: f64,
    params: &TensorJacobiParams,
    method: BallMethod,
) -> Result<f64> {
    params.check_dim(y.len())?;
    if !(delta > 0.0 && delta <= PI) {
        return Err(Error::InvalidParameter(format!("ball radius must lie in (0, pi] (got {delta})")));
    }
    Ok(match method {
        BallMethod::Bruteforce => tile_measure(&ball_box(y, delta), params),
        BallMethod::ClosedFormComparand => y
            .iter()
            .zip(params.pairs())
            .map(|(&t, p)| {
                delta * ((1.0 - t * t).max(0.0).sqrt() + delta).powf(2.0 * gamma_for(p, t) + 1.0)
            })
            .product(),
    })
}

/// Box-search value of `(M_t 1_{B(y, r)})(x)` with its two comparands.
#[derive(Debug, Clone, Serialize)]
pub struct MaximalEstimate {
    pub search: f64,
    /// `prod_j (1 + rho_j / r)^{-1/t} (1 + rho_j / (r + e_j))^{-(2 gamma_j + 1)/t}` with `e_j`
    /// the arccos distance from `y_j` to the endpoint whose exponent `gamma_j` selects.
    pub comparand: f64,
    /// `prod_j (1 + rho_j / r)^{-(2 gamma_j + 2)/t}`.
    pub lower_comparand: f64,
}

/// Estimates `sup_{I containing x} (mu(I cap B) / mu(I))^{1/t}` for `B = B(y, r)`.
///
/// The measure and the ball are products, so the sup splits into one search per axis over
/// the arccos intervals with endpoints on the grid `k pi / 2^grid_level`. An axis on which
/// `x` lies in the ball contributes 1, the limit of boxes shrinking to `x`.
pub fn maximal_indicator(
    y: &[f64],
    r: f64,
    t: f64,
    x: &[f64],
    params: &TensorJacobiParams,
    grid_level: u32,
) -> Result<MaximalEstimate> {
    params.check_dim(y.len())?;
    params.check_dim(x.len())?;
    if !(r > 0.0 && r <= PI) || !(t > 0.0) || grid_level > 14 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r <= pi, t > 0, grid_level <= 14 (got r={r}, t={t}, level={grid_level})"
        )));
    }
    let mut search = 1.0;
    let mut comparand = 1.0;
    let mut lower = 1.0;
    for ((&yi, &xi), pair) in y.iter().zip(x).zip(params.pairs()) {
        let (py, px) = (yi.clamp(-1.0, 1.0).acos(), xi.clamp(-1.0, 1.0).acos());
        let dist = (py - px).abs();
        let g = gamma_for(pair, yi);
        let edge = if yi >= 0.0 { py } else { PI - py };
        comparand *= (1.0 + dist / r).powf(-1.0 / t) * (1.0 + dist / (r + edge)).powf(-(2.0 * g + 1.0) / t);
        lower *= (1.0 + dist / r).powf(-(2.0 * g + 2.0) / t);
        if dist < r {
            continue;
        }
        search *= axis_search(pair, (py - r).max(0.0), (py + r).min(PI), px, grid_level).powf(1.0 / t);
    }
    Ok(MaximalEstimate {
        search,
        comparand,
        lower_comparand: lower,
    })
}

/// `max mu(I cap [b_lo, b_hi]) / mu(I)` over grid intervals `I` containing `px`, in arccos
/// coordinates.
fn axis_search(pair: &JacobiPair, b_lo: f64, b_hi: f64, px: f64, level: u32) -> f64 {
    let m = 1usize << level;
    let h = PI / m as f64;
    let grid: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    // cum[k] = mu({acos x in [0, grid[k]]}).
    let mut cum = vec![0.0; m + 1];
    for k in 1..=m {
        cum[k] = cum[k - 1] + weight_integral(pair, grid[k].cos(), grid[k - 1].cos());
    }
    let at = |theta: f64| -> f64 {
        let k = ((theta / h).floor() as usize).min(m);
        cum[k] + weight_integral(pair, theta.cos(), grid[k].cos())
    };
    let (c_lo, c_hi) = (at(b_lo), at(b_hi));
    let kx = ((px / h).floor() as usize).min(m);
    let lx = ((px / h).ceil() as usize).min(m);
    (0..=kx)
        .into_par_iter()
        .map(|k| {
            let mut best = 0.0f64;
            for l in lx.max(k + 1)..=m {
                let total = cum[l] - cum[k];
                if total <= 0.0 {
                    continue;
                }
                let lo = if grid[k] > b_lo { cum[k] } else { c_lo };
                let hi = if grid[l] < b_hi { cum[l] } else { c_hi };
                if hi > lo {
                    best = best.max((hi - lo) / total);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// One random configuration for the maximal-function sweep.
#[derive(Debug, Clone, Serialize)]
pub struct MaximalSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: f64,
    pub t: f64,
    pub estimate: MaximalEstimate,
}

/// `count` random `(x, y, r, t)`: arccos-uniform points, `r = pi 2^{-u}` with `u` uniform in
/// `[0, 6]`, `t` uniform in `[1, 4]`.
///
/// Both the search value and the comparands are `t`-th roots of `t`-free quantities, so
/// their ratio is `K^{1/t}`; `t >= 1` keeps the sweep from amplifying `K` without bound.
pub fn maximal_sweep(
    params: &TensorJacobiParams,
    count: usize,
    grid_level: u32,
    seed: u64,
) -> Result<Vec<MaximalSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = params.dim();
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..PI).cos()).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..PI).cos()).collect();
            let r = PI * 2f64.powf(-rng.gen_range(0.0..6.0));
            let t = rng.gen_range(1.0..4.0);
            let estimate = maximal_indicator(&y, r, t, &x, params, grid_level)?;
            Ok(MaximalSample { x, y, r, t, estimate })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(d: usize) -> TensorJacobiParams {
        TensorJacobiParams::legendre(d)
    }

    #[test]
    fn level_zero_legendre() {
        let l = build_level(0, &legendre(1)).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((l.node(0)[0] - s).abs() < 1e-15);
        assert!((l.node(1)[0] + s).abs() < 1e-15);
        assert!((l.weight(0) - 1.0).abs() < 1e-14 && (l.weight(1) - 1.0).abs() < 1e-14);
        assert_eq!(l.tile(0), vec![(0.0, 1.0)]);
        assert_eq!(l.tile(1), vec![(-1.0, 0.0)]);
        assert!((l.tile_measure(0) + l.tile_measure(1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_mass() {
        let l = build_level(3, &legendre(2)).unwrap();
        assert_eq!(l.len(), 256);
        assert!((l.weights().iter().sum::<f64>() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn weight_integral_matches_closed_forms() {
        let leg = JacobiPair::LEGENDRE;
        assert!((weight_integral(&leg, 0.0, 0.5) - 0.5).abs() < 1e-15);
        let box_ = [(0.0, 0.5), (-1.0, 1.0)];
        assert!((tile_measure(&box_, &legendre(2)) - 1.0).abs() < 1e-14);
        // int_a^1 (1-t)^alpha dt = (1-a)^{alpha+1}/(alpha+1).
        let p = JacobiPair::new(-0.5, 0.0).unwrap();
        assert!((weight_integral(&p, 0.3, 1.0) - 2.0 * 0.7f64.sqrt()).abs() < 1e-13);
        // int (1-t)^1.5 over [0.2, 0.9].
        let q = JacobiPair::new(1.5, 0.0).unwrap();
        let f = |a: f64| -(1.0 - a).powf(2.5) / 2.5;
        assert!((weight_integral(&q, 0.2, 0.9) - (f(0.9) - f(0.2))).abs() < 1e-13);
        // Chebyshev: int_{-1}^{b} (1-t^2)^{-1/2} = pi - acos b.
        let c = JacobiPair::CHEBYSHEV;
        assert!((weight_integral(&c, -1.0, 0.4) - (PI - 0.4f64.acos())).abs() < 1e-13);
    }

    #[test]
    fn ball_measure_legendre_center() {
        let p = legendre(1);
        for delta in [0.01, 0.3, 1.0, PI / 2.0] {
            let b = ball_measure(&[0.0], delta, &p, BallMethod::Bruteforce).unwrap();
            assert!((b - 2.0 * delta.sin()).abs() < 1e-13);
            let c = ball_measure(&[0.0], delta, &p, BallMethod::ClosedFormComparand).unwrap();
            let ratio = b / c;
            assert!((0.45..=2.1).contains(&ratio), "{ratio}");
        }
        assert!(ball_measure(&[0.0], 0.0, &p, BallMethod::Bruteforce).is_err());
    }

    #[test]
    fn maximal_inside_ball_is_one() {
        let p = legendre(2);
        let e = maximal_indicator(&[0.1, 0.2], 0.5, 2.0, &[0.15, 0.25], &p, 8).unwrap();
        assert_eq!(e.search, 1.0);
    }

    #[test]
    fn maximal_far_from_ball_is_small_and_monotone_in_t() {
        let p = legendre(1);
        let a = maximal_indicator(&[0.9], 0.05, 1.0, &[-0.9], &p, 10).unwrap();
        let b = maximal_indicator(&[0.9], 0.05, 2.0, &[-0.9], &p, 10).unwrap();
        assert!(a.search < 0.2 && a.search > 0.0);
        assert!((b.search - a.search.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn locate_finds_own_tile() {
        let l = build_level(2, &legendre(2)).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.locate(&l.node(i)), i);
        }
    }
}
