//! Weighted Triebel-Lizorkin and Besov norms of finite expansions, on the kernel side
//! (`Phi_j * f`) and on the needlet-coefficient side, plus Jacobi multipliers.
//!
//! Every norm here is a finite computation, so it is finite for every input; only values and
//! ratios between them carry information, not membership in a space.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubature::weight_integral;
use crate::cutoff::CutoffFunction;
use crate::error::{Error, Result};
use crate::expansion::{ordered_sum, unflatten, JacobiExpansion, NormGrid, TensorJacobiParams, LP_OVERSAMPLING};
use crate::frame::{NeedletCoefficients, NeedletFrame};
use crate::kernel::{spectral_convolve, weight_w};

/// Triebel-Lizorkin (`F`, `L^p` outside the level sum) or Besov (`B`, inside).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceFamily {
    F,
    B,
}

impl std::str::FromStr for SpaceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" | "f" => Ok(Self::F),
            "B" | "b" => Ok(Self::B),
            _ => Err(Error::InvalidParameter(format!("unknown space family '{s}' (F or B)"))),
        }
    }
}

/// `(s, rho_weight, p, q)` of `F^{s rho}_{pq}` or `B^{s rho}_{pq}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub rho_weight: f64,
    pub p: f64,
    pub q: f64,
    pub family: SpaceFamily,
}

impl SpaceParams {
    pub fn new(family: SpaceFamily, s: f64, rho_weight: f64, p: f64, q: f64) -> Result<Self> {
        if !s.is_finite() || !rho_weight.is_finite() {
            return Err(Error::InvalidParameter("s and rho must be finite".into()));
        }
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("need p > 0 and q > 0 (got p={p}, q={q})")));
        }
        if family == SpaceFamily::F && p.is_infinite() {
            return Err(Error::InvalidParameter("F-spaces need a finite p".into()));
        }
        Ok(Self {
            s,
            rho_weight,
            p,
            q,
            family,
        })
    }

    pub fn f(s: f64, rho_weight: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(SpaceFamily::F, s, rho_weight, p, q)
    }

    pub fn b(s: f64, rho_weight: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(SpaceFamily::B, s, rho_weight, p, q)
    }
}

fn lq(values: impl IntoIterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        values.into_iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `||f||_p` under the library convention (Parseval for `p = 2`, cubature at
/// `spectrum_level + 2` otherwise).
pub fn lp_norm(f: &JacobiExpansion, p: f64) -> Result<f64> {
    f.lp_norm(p)
}

/// Nonzero `Phi_j * f`, `j = 0, 1, ...` until `2^{j-2}` exceeds the largest `||nu||_1`.
pub fn level_components(f: &JacobiExpansion, cutoff: &CutoffFunction) -> Vec<(u32, JacobiExpansion)> {
    let top = f.max_total_degree().unwrap_or(0) as f64;
    let mut j_end = 0u32;
    while 2f64.powi(j_end as i32 - 2) <= top {
        j_end += 1;
    }
    (0..=j_end)
        .into_par_iter()
        .filter_map(|j| {
            let g = spectral_convolve(cutoff, j, f);
            let any = g.nonzero().next().is_some();
            any.then(|| (j, g.trimmed()))
        })
        .collect()
}

/// Values of `2^{sj} W(2^j; x)^{-rho/d} |Phi_j * f(x)|` on `grid`, by level.
fn level_values(
    f: &JacobiExpansion,
    sp: &SpaceParams,
    cutoff: &CutoffFunction,
    grid: &NormGrid,
    points: &[Vec<f64>],
) -> Vec<(u32, Vec<f64>)> {
    let d = f.dim() as f64;
    level_components(f, cutoff)
        .into_iter()
        .map(|(j, g)| {
            let vals = g.eval_grid(grid.axes());
            let scale = 2f64.powf(sp.s * j as f64);
            let out = vals
                .iter()
                .zip(points)
                .map(|(v, x)| {
                    let w = if sp.rho_weight == 0.0 {
                        1.0
                    } else {
                        weight_w(1 << j, x, f.params()).powf(-sp.rho_weight / d)
                    };
                    scale * w * v.norm()
                })
                .collect();
            (j, out)
        })
        .collect()
}

/// `|| ( sum_j [2^{sj} W(2^j;.)^{-rho/d} |Phi_j * f|]^q )^{1/q} ||_p`.
pub fn f_norm_kernel(f: &JacobiExpansion, sp: &SpaceParams, cutoff: &CutoffFunction) -> Result<f64> {
    if sp.family != SpaceFamily::F {
        return Err(Error::InvalidParameter("f_norm_kernel needs F-space parameters".into()));
    }
    f.params().check_dim(cutoff.dim())?;
    let grid = NormGrid::new(f.params(), f.spectrum_level() + LP_OVERSAMPLING, sp.p)?;
    let points = grid.points();
    let levels = level_values(f, sp, cutoff, &grid, &points);
    let pointwise = (0..grid.len()).map(|i| lq(levels.iter().map(|(_, v)| v[i]), sp.q));
    Ok(grid.norm(pointwise, sp.p))
}

/// Level terms `2^{sj} ||W(2^j;.)^{-rho/d} Phi_j * f||_p` of the Besov norm.
pub fn b_level_terms(
    f: &JacobiExpansion,
    sp: &SpaceParams,
    cutoff: &CutoffFunction,
) -> Result<Vec<(u32, f64)>> {
    f.params().check_dim(cutoff.dim())?;
    if sp.rho_weight == 0.0 && sp.p == 2.0 {
        return Ok(level_components(f, cutoff)
            .into_iter()
            .map(|(j, g)| (j, 2f64.powf(sp.s * j as f64) * g.l2_norm()))
            .collect());
    }
    let grid = NormGrid::new(f.params(), f.spectrum_level() + LP_OVERSAMPLING, sp.p)?;
    let points = grid.points();
    Ok(level_values(f, sp, cutoff, &grid, &points)
        .into_iter()
        .map(|(j, v)| (j, grid.norm(v, sp.p)))
        .collect())
}

/// `( sum_j (2^{sj} ||W(2^j;.)^{-rho/d} Phi_j * f||_p)^q )^{1/q}`.
pub fn b_norm_kernel(f: &JacobiExpansion, sp: &SpaceParams, cutoff: &CutoffFunction) -> Result<f64> {
    if sp.family != SpaceFamily::B {
        return Err(Error::InvalidParameter("b_norm_kernel needs B-space parameters".into()));
    }
    Ok(lq(b_level_terms(f, sp, cutoff)?.into_iter().map(|(_, v)| v), sp.q))
}

/// Kernel-side norm of either family.
pub fn kernel_norm(f: &JacobiExpansion, sp: &SpaceParams, cutoff: &CutoffFunction) -> Result<f64> {
    match sp.family {
        SpaceFamily::F => f_norm_kernel(f, sp, cutoff),
        SpaceFamily::B => b_norm_kernel(f, sp, cutoff),
    }
}

/// Sequence norm in `f^{s rho}_{pq}` or `b^{s rho}_{pq}` of coefficients over `frame`.
pub fn seq_norm(frame: &NeedletFrame, coeffs: &NeedletCoefficients, sp: &SpaceParams) -> Result<f64> {
    if coeffs.j_max() != frame.j_max() {
        return Err(Error::DimensionMismatch {
            expected: frame.j_max() as usize,
            got: coeffs.j_max() as usize,
        });
    }
    match sp.family {
        SpaceFamily::B => Ok(seq_norm_b(frame, coeffs, sp)),
        SpaceFamily::F => seq_norm_f(frame, coeffs, sp),
    }
}

fn seq_norm_b(frame: &NeedletFrame, coeffs: &NeedletCoefficients, sp: &SpaceParams) -> f64 {
    let d = frame.dim() as f64;
    let inv_p = if sp.p.is_infinite() { 0.0 } else { 1.0 / sp.p };
    let exp_w = -sp.rho_weight / d + inv_p - 0.5;
    let terms = (0..=frame.j_max()).filter_map(|j| {
        let h = coeffs.level(j)?;
        let level = frame.level(j);
        let vals = h.iter().enumerate().filter(|(_, v)| **v != Complex64::new(0.0, 0.0)).map(|(i, v)| {
            weight_w(1 << j, &level.node(i), frame.params()).powf(exp_w) * v.norm()
        });
        let inner = if sp.p.is_infinite() {
            vals.fold(0.0, f64::max)
        } else {
            vals.map(|v| v.powf(sp.p)).sum::<f64>().powf(inv_p)
        };
        Some(2f64.powf(j as f64 * (sp.s - d * inv_p + d / 2.0)) * inner)
    });
    lq(terms, sp.q)
}

/// Integrates the piecewise-constant square function exactly over the common refinement of
/// all tile partitions.
fn seq_norm_f(frame: &NeedletFrame, coeffs: &NeedletCoefficients, sp: &SpaceParams) -> Result<f64> {
    if sp.p.is_infinite() {
        return Err(Error::InvalidParameter("F-spaces need a finite p".into()));
    }
    let d = frame.dim();
    let levels: Vec<u32> = (0..=frame.j_max()).filter(|&j| coeffs.level(j).is_some()).collect();
    if levels.is_empty() {
        return Ok(0.0);
    }
    // Per level: 2^{sj} |h| W^{-rho/d} mu(I)^{-1/2} at every node.
    let amplitudes: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|&j| {
            let level = frame.level(j);
            let h = coeffs.level(j).expect("stored level");
            let scale = 2f64.powf(sp.s * j as f64);
            (0..level.len())
                .map(|i| {
                    if h[i] == Complex64::new(0.0, 0.0) {
                        return 0.0;
                    }
                    let w = weight_w(1 << j, &level.node(i), frame.params())
                        .powf(-sp.rho_weight / d as f64);
                    scale * h[i].norm() * w / level.tile_measure(i).sqrt()
                })
                .collect()
        })
        .collect();
    // Common refinement per axis.
    let mut cells_per_axis = Vec::with_capacity(d);
    let mut owner: Vec<Vec<Vec<usize>>> = Vec::with_capacity(d);
    let mut cell_mass: Vec<Vec<f64>> = Vec::with_capacity(d);
    for axis in 0..d {
        let mut cuts: Vec<f64> = vec![-1.0, 1.0];
        for &j in &levels {
            for &(lo, _) in &frame.level(j).axes()[axis].tiles {
                cuts.push(lo);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pair = frame.params().pair(axis);
        let cells: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        cell_mass.push(cells.iter().map(|&(a, b)| weight_integral(pair, a, b)).collect());
        owner.push(
            levels
                .iter()
                .map(|&j| {
                    let tiles = &frame.level(j).axes()[axis].tiles;
                    cells
                        .iter()
                        .map(|&(a, b)| {
                            let m = 0.5 * (a + b);
                            tiles.iter().position(|&(lo, hi)| m >= lo && m <= hi).expect("tiles cover")
                        })
                        .collect()
                })
                .collect(),
        );
        cells_per_axis.push(cells.len());
    }
    let total: usize = cells_per_axis.iter().product();
    let shapes: Vec<Vec<usize>> = levels.iter().map(|&j| frame.level(j).shape()).collect();
    let integral = ordered_sum(total, |flat| {
        let mut idx = vec![0; d];
        unflatten(flat, &cells_per_axis, &mut idx);
        let mass: f64 = idx.iter().enumerate().map(|(a, &k)| cell_mass[a][k]).product();
        if mass == 0.0 {
            return 0.0;
        }
        let vals = (0..levels.len()).map(|li| {
            let mut node = 0;
            for (a, &k) in idx.iter().enumerate() {
                node = node * shapes[li][a] + owner[a][li][k];
            }
            amplitudes[li][node]
        });
        mass * lq(vals, sp.q).powf(sp.p)
    });
    Ok(integral.powf(1.0 / sp.p))
}

pub type SymbolFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A Jacobi multiplier `T_m f = sum_nu m(nu) f_nu P~_nu`.
#[derive(Clone)]
pub struct Multiplier {
    m: SymbolFn,
    label: String,
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multiplier").field("label", &self.label).finish()
    }
}

impl Multiplier {
    pub fn new(label: impl Into<String>, m: SymbolFn) -> Self {
        Self {
            m,
            label: label.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", Arc::new(|_: &[f64]| Complex64::new(1.0, 0.0)))
    }

    /// `m(t) = A(t / n)`.
    pub fn dilated_cutoff(cutoff: &CutoffFunction, n: f64) -> Self {
        let c = cutoff.clone();
        Self::new(
            format!("{}(./{n})", cutoff.label()),
            Arc::new(move |t: &[f64]| {
                let u: Vec<f64> = t.iter().map(|x| x / n).collect();
                c.eval(&u)
            }),
        )
    }

    /// `m(t) = sum_{j >= 0} (-1)^j A(2^{-j} t)` for a type-(b) cutoff `A`.
    pub fn alternating_levels(cutoff: &CutoffFunction) -> Self {
        let c = cutoff.clone();
        Self::new(
            format!("alternating[{}]", cutoff.label()),
            Arc::new(move |t: &[f64]| {
                let l1: f64 = t.iter().map(|x| x.abs()).sum();
                let mut s = Complex64::new(0.0, 0.0);
                let mut u = t.to_vec();
                let mut sign = 1.0;
                let mut j = 0;
                while l1 * 2f64.powi(-j) >= 0.25 && j < 64 {
                    s += c.eval(&u) * sign;
                    u.iter_mut().for_each(|x| *x *= 0.5);
                    sign = -sign;
                    j += 1;
                }
                s
            }),
        )
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        (self.m)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `T_m f`.
pub fn apply_multiplier(m: &Multiplier, f: &JacobiExpansion) -> JacobiExpansion {
    f.map_modes(|nu, c| {
        if c == Complex64::new(0.0, 0.0) {
            return c;
        }
        let t: Vec<f64> = nu.iter().map(|&k| k as f64).collect();
        c * m.eval(&t)
    })
}

/// `max |D_i^k m(t)| (1 + ||t||_inf)^k` over random `t` in each dyadic annulus
/// `2^a <= ||t||_inf < 2^{a+1}`, by order `k = 1..=max_order` (rows) and annulus (columns),
/// from central differences along each coordinate with step `h = (1 + ||t||_inf) / 16`.
pub fn multiplier_decay_table(
    m: &Multiplier,
    d: usize,
    max_order: u32,
    annuli: u32,
    samples: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![0.0f64; annuli as usize]; max_order as usize];
    for a in 0..annuli {
        let lo = 2f64.powi(a as i32);
        for _ in 0..samples {
            let r = rng.gen_range(lo..2.0 * lo);
            let lead = rng.gen_range(0..d);
            let t: Vec<f64> = (0..d)
                .map(|i| if i == lead { r } else { rng.gen_range(0.0..=r) })
                .collect();
            let h = (1.0 + r) / 16.0;
            for axis in 0..d {
                for k in 1..=max_order {
                    // k-th central difference: sum_i (-1)^i C(k,i) m(t + (k/2 - i) h e_axis).
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut binom = 1.0;
                    for i in 0..=k {
                        let mut u = t.clone();
                        u[axis] = (u[axis] + (k as f64 / 2.0 - i as f64) * h).abs();
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        acc += m.eval(&u) * (sign * binom);
                        binom = binom * (k - i) as f64 / (i + 1) as f64;
                    }
                    let deriv = acc.norm() / h.powi(k as i32);
                    let v = deriv * (1.0 + r).powi(k as i32);
                    let cell = &mut out[k as usize - 1][a as usize];
                    *cell = cell.max(v);
                }
            }
        }
    }
    out
}

/// Random expansion with coefficients `U (1 + ||nu||_1)^{-e}`, `U` uniform in the unit
/// square and `e` uniform in `[0, decay_max]`, per-coordinate degree `<= degree`.
pub fn random_decaying(
    params: &TensorJacobiParams,
    degree: usize,
    decay_max: f64,
    rng: &mut ChaCha8Rng,
) -> JacobiExpansion {
    let e = if decay_max > 0.0 { rng.gen_range(0.0..=decay_max) } else { 0.0 };
    let d = params.dim();
    JacobiExpansion::from_fn(params.clone(), vec![degree + 1; d], |nu| {
        let l1: usize = nu.iter().sum();
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            * (1.0 + l1 as f64).powf(-e)
    })
    .expect("dimension matches")
}

/// `max ||T_m f||_p / ||f||_p` over `trials` random inputs per degree.
pub fn multiplier_sweep(
    m: &Multiplier,
    params: &TensorJacobiParams,
    degrees: &[usize],
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    degrees
        .iter()
        .map(|&deg| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (deg as u64).wrapping_mul(0x9e37_79b9));
            let fs: Vec<JacobiExpansion> =
                (0..trials).map(|_| random_decaying(params, deg, 1.5, &mut rng)).collect();
            let worst = fs
                .par_iter()
                .map(|f| -> Result<f64> {
                    let g = apply_multiplier(m, f);
                    let (a, b) = (g.lp_norm(p)?, f.lp_norm(p)?);
                    Ok(a / b)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((deg, worst))
        })
        .collect()
}

/// One input of an equivalence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceRow {
    pub trial: usize,
    pub degree: usize,
    pub kernel_norm: f64,
    pub seq_norm: f64,
    pub ratio: f64,
    /// `||f||_p`, recorded for `F` spaces with `s = rho = 0`, `q = 2`.
    pub lp_norm: Option<f64>,
}

/// Extremes of the kernel/sequence ratio at one degree.
#[derive(Debug, Clone, Serialize)]
pub struct RatioBand {
    pub degree: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

impl RatioBand {
    /// `max(ratio_max, 1 / ratio_min)`: the smallest `C` with every ratio in `[1/C, C]`.
    pub fn constant(&self) -> f64 {
        self.ratio_max.max(1.0 / self.ratio_min)
    }

    pub fn width(&self) -> f64 {
        self.ratio_max / self.ratio_min
    }
}

/// Smallest `j_max` whose frame covers per-coordinate degree `degree`.
pub fn covering_j_max(degree: usize) -> u32 {
    let mut j = 1;
    while (1usize << (j - 1)) < degree {
        j += 1;
    }
    j
}

/// Kernel-side against sequence-side norms for random decaying inputs of each degree.
///
/// `frame_for` returns a frame with at least the requested number of levels whose analysis
/// cutoff is used on both sides.
pub fn equivalence_rows(
    sp: &SpaceParams,
    params: &TensorJacobiParams,
    degrees: &[usize],
    trials: usize,
    seed: u64,
    frame_for: &dyn Fn(u32) -> Result<NeedletFrame>,
) -> Result<Vec<EquivalenceRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &deg in degrees {
        let frame = frame_for(covering_j_max(deg))?;
        let fs: Vec<JacobiExpansion> =
            (0..trials).map(|_| random_decaying(params, deg, 1.5, &mut rng)).collect();
        let want_lp = sp.family == SpaceFamily::F && sp.s == 0.0 && sp.rho_weight == 0.0 && sp.q == 2.0;
        for (trial, f) in fs.iter().enumerate() {
            let k = kernel_norm(f, sp, frame.analysis_cutoff())?;
            let c = frame.analyze(f)?;
            let s = seq_norm(&frame, &c, sp)?;
            rows.push(EquivalenceRow {
                trial,
                degree: deg,
                kernel_norm: k,
                seq_norm: s,
                ratio: k / s,
                lp_norm: if want_lp { Some(f.lp_norm(sp.p)?) } else { None },
            });
        }
    }
    Ok(rows)
}

/// Ratio bands per degree, in the order degrees first appear.
pub fn ratio_bands(rows: &[EquivalenceRow]) -> Vec<RatioBand> {
    let mut out: Vec<RatioBand> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|b| b.degree == r.degree) {
            Some(b) => {
                b.ratio_min = b.ratio_min.min(r.ratio);
                b.ratio_max = b.ratio_max.max(r.ratio);
            }
            None => out.push(RatioBand {
                degree: r.degree,
                ratio_min: r.ratio,
                ratio_max: r.ratio,
            }),
        }
    }
    out
}

/// Bands are stable when no degree's constant exceeds `tolerance` times the previous one's.
pub fn bands_stable(bands: &[RatioBand], tolerance: f64) -> bool {
    bands.windows(2).all(|w| w[1].constant() <= tolerance * w[0].constant())
}

/// Growth allowed between consecutive degrees before a band or maximum counts as unstable.
pub const STABILITY_TOLERANCE: f64 = 1.5;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::CutoffPreset;
    use crate::frame::{build_frame, random_bandlimited, FrameConfig};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_norms_collapse_to_lp() {
        let p = TensorJacobiParams::legendre(2);
        let a = CutoffPreset::ProductB.build(2).unwrap();
        let mut f = JacobiExpansion::zeros(p, vec![1, 1]).unwrap();
        f.set(&[0, 0], c(3.0));
        for pp in [1.0, 2.0, 3.5] {
            let want = f.lp_norm(pp).unwrap();
            let fnorm = f_norm_kernel(&f, &SpaceParams::f(0.7, 0.0, pp, 1.5).unwrap(), &a).unwrap();
            assert!((fnorm - want).abs() < 1e-12 * want);
            let bnorm = b_norm_kernel(&f, &SpaceParams::b(0.7, 0.0, pp, 1.5).unwrap(), &a).unwrap();
            assert!((bnorm - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn l2_f_norm_is_weighted_coefficient_sum() {
        let p = TensorJacobiParams::legendre(2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_bandlimited(&p, 9, &mut rng);
        for preset in [CutoffPreset::ProductB, CutoffPreset::SinSpliceC] {
            let a = preset.build(2).unwrap();
            let sp = SpaceParams::f(0.0, 0.0, 2.0, 2.0).unwrap();
            let got = f_norm_kernel(&f, &sp, &a).unwrap();
            let mut want = 0.0;
            for (nu, v) in f.nonzero() {
                let s: f64 = (0..10).map(|j| crate::kernel::level_symbol(&a, j, &nu).norm_sqr()).sum();
                want += s * v.norm_sqr();
            }
            assert!((got - want.sqrt()).abs() < 1e-11 * got, "{got} vs {}", want.sqrt());
        }
        let a = CutoffPreset::SinSpliceC.build(2).unwrap();
        let got = f_norm_kernel(&f, &SpaceParams::f(0.0, 0.0, 2.0, 2.0).unwrap(), &a).unwrap();
        assert!((got - f.l2_norm()).abs() < 1e-11 * got);
    }

    #[test]
    fn q_monotone_and_homogeneous() {
        let p = TensorJacobiParams::legendre(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_bandlimited(&p, 12, &mut rng);
        let a = CutoffPreset::ProductB.build(2).unwrap();
        for fam in [SpaceFamily::F, SpaceFamily::B] {
            let n = |q: f64| kernel_norm(&f, &SpaceParams::new(fam, 0.5, 0.3, 3.0, q).unwrap(), &a).unwrap();
            let (n1, n2, ni) = (n(1.0), n(2.0), n(f64::INFINITY));
            assert!(n1 >= n2 && n2 >= ni, "{fam:?}: {n1} {n2} {ni}");
            let sp = SpaceParams::new(fam, 0.5, 0.3, 3.0, 2.0).unwrap();
            let g = f.scale(c(-2.5));
            assert!((kernel_norm(&g, &sp, &a).unwrap() - 2.5 * n2).abs() < 1e-12 * n2);
        }
    }

    #[test]
    fn b_level_terms_scale_with_s() {
        let p = TensorJacobiParams::legendre(1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_bandlimited(&p, 20, &mut rng);
        let a = CutoffPreset::ProductB.build(1).unwrap();
        let t0 = b_level_terms(&f, &SpaceParams::b(0.0, 0.0, 3.0, 2.0).unwrap(), &a).unwrap();
        let t1 = b_level_terms(&f, &SpaceParams::b(1.0, 0.0, 3.0, 2.0).unwrap(), &a).unwrap();
        for ((j, x), (_, y)) in t0.iter().zip(&t1) {
            assert!((y - x * 2f64.powi(*j as i32)).abs() < 1e-12 * y);
        }
    }

    #[test]
    fn single_coefficient_sequence_norms() {
        let p = TensorJacobiParams::legendre(2);
        let fr = build_frame(&p, FrameConfig::default_tight(2).unwrap(), 3).unwrap();
        let (j, i) = (2, 7);
        let h = Complex64::new(0.6, -0.8);
        let coeffs = fr.unit_coefficient(j, i, h);
        let sp = SpaceParams::b(0.5, 0.25, 3.0, 1.0).unwrap();
        let w = weight_w(4, &fr.level(j).node(i), &p);
        let want = 2f64.powf(2.0 * (0.5 - 2.0 / 3.0 + 1.0)) * w.powf(-0.125 + 1.0 / 3.0 - 0.5);
        assert!((seq_norm(&fr, &coeffs, &sp).unwrap() - want).abs() < 1e-13 * want);
        // F: |h| W^{-rho/d} mu(I)^{-1/2} on I, so ||.||_p = 2^{sj} W^{-rho/d} mu(I)^{1/p - 1/2}.
        let sf = SpaceParams::f(0.5, 0.25, 3.0, 1.0).unwrap();
        let mu = fr.level(j).tile_measure(i);
        let want = 2f64.powf(1.0) * w.powf(-0.125) * mu.powf(1.0 / 3.0 - 0.5);
        assert!((seq_norm(&fr, &coeffs, &sf).unwrap() - want).abs() < 1e-12 * want);
        let zero = NeedletCoefficients::zeros(&fr);
        assert_eq!(seq_norm(&fr, &zero, &sf).unwrap(), 0.0);
        assert_eq!(seq_norm(&fr, &zero, &sp).unwrap(), 0.0);
    }

    #[test]
    fn multipliers() {
        let p = TensorJacobiParams::legendre(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_bandlimited(&p, 6, &mut rng);
        assert_eq!(apply_multiplier(&Multiplier::identity(), &f), f);
        let a = CutoffPreset::ProductA.build(2).unwrap();
        // Spectrum in [0, 6]^2 and A = 1 on [0, 1]^2.
        let g = apply_multiplier(&Multiplier::dilated_cutoff(&a, 6.0), &f);
        assert!(g.add_scaled(&f, c(-1.0)).unwrap().l2_norm() < 1e-15);
        let m = Multiplier::alternating_levels(&CutoffPreset::ProductB.build(2).unwrap());
        assert_eq!(m.eval(&[0.0, 0.0]), c(0.0));
        assert!(m.eval(&[5.0, 3.0]).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn f_space_rejects_infinite_p() {
        assert!(SpaceParams::f(0.0, 0.0, f64::INFINITY, 2.0).is_err());
        assert!(SpaceParams::b(0.0, 0.0, f64::INFINITY, 2.0).is_ok());
    }

    #[test]
    fn covering_levels() {
        assert_eq!(covering_j_max(1), 1);
        assert_eq!(covering_j_max(2), 2);
        assert_eq!(covering_j_max(32), 6);
        assert_eq!(covering_j_max(33), 7);
    }
}
