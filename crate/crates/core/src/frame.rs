//! Needlet frames: analysis needlets `phi_xi = c_xi^{1/2} Phi_j(., xi)` and synthesis
//! needlets `psi_xi = c_xi^{1/2} Psi_j(., xi)` over the dyadic cubature levels, with
//! analysis and synthesis carried out in coefficient space.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubature::{build_level, CubatureLevel};
use crate::cutoff::{
    make_dual_cutoff, verify_dyadic_covering, CutoffFunction, CutoffPreset, CutoffType,
};
use crate::error::{Error, Result};
use crate::expansion::{unflatten, JacobiExpansion, TensorJacobiParams};
use crate::jacobi::JacobiBasis;
use crate::kernel::{level_symbol, rho, weight_w};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which pair `(A, B)` a frame is built from.
#[derive(Clone)]
pub enum FrameConfig {
    /// `B = A` for a real, nonnegative type-(c) cutoff: the needlets form a tight frame.
    Tight(CutoffFunction),
    /// `B` the dual of a type-(b) cutoff `A` with the covering property.
    Dual(CutoffFunction),
    /// An explicit pair; the partition `sum_j conj(A) B (2^{-j} t) = 1` is checked on build.
    Pair {
        analysis: CutoffFunction,
        synthesis: CutoffFunction,
    },
}

impl FrameConfig {
    /// Sin splice of the product type-(a) cutoff.
    pub fn default_tight(d: usize) -> Result<Self> {
        Ok(Self::Tight(CutoffPreset::SinSpliceC.build(d)?))
    }

    /// Product type-(b) cutoff with its dual.
    pub fn default_dual(d: usize) -> Result<Self> {
        Ok(Self::Dual(CutoffPreset::ProductB.build(d)?))
    }
}

/// Per-level data: cubature, `sqrt(c_xi)`, symbols on the mode block `[0, 2^j)^d`.
#[derive(Clone)]
struct LevelData {
    cubature: CubatureLevel,
    sqrt_weights: Vec<f64>,
    modes: Vec<usize>,
    analysis: Vec<Complex64>,
    synthesis: Vec<Complex64>,
}

/// Coefficients at most this fraction of the largest one are round-off for `check_spectrum`.
pub const SPECTRUM_ROUNDOFF: f64 = 1e-13;

/// A finite needlet system on levels `0..=j_max`.
#[derive(Clone)]
pub struct NeedletFrame {
    params: TensorJacobiParams,
    analysis: CutoffFunction,
    synthesis: CutoffFunction,
    j_max: u32,
    tight: bool,
    levels: Vec<LevelData>,
}

impl std::fmt::Debug for NeedletFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeedletFrame")
            .field("analysis", &self.analysis.label())
            .field("synthesis", &self.synthesis.label())
            .field("j_max", &self.j_max)
            .field("tight", &self.tight)
            .finish()
    }
}

fn mode_block(j: u32) -> usize {
    if j == 0 {
        1
    } else {
        1 << j
    }
}

fn symbols(cutoff: &CutoffFunction, j: u32, d: usize) -> Vec<Complex64> {
    let m = mode_block(j);
    let shape = vec![m; d];
    let mut nu = vec![0; d];
    (0..m.pow(d as u32))
        .map(|flat| {
            unflatten(flat, &shape, &mut nu);
            level_symbol(cutoff, j, &nu)
        })
        .collect()
}

/// Largest deviation of `sum_{j in Z} conj(A) B (2^{-j} t)` from 1 over the modes of the
/// block `[0, 2^{j_max - 1}]^d` minus the origin.
pub fn partition_defect(a: &CutoffFunction, b: &CutoffFunction, j_max: u32) -> f64 {
    let d = a.dim();
    let top = 1usize << j_max.saturating_sub(1);
    let shape = vec![top + 1; d];
    let total = (top + 1).pow(d as u32);
    (1..total)
        .into_par_iter()
        .map(|flat| {
            let mut nu = vec![0; d];
            unflatten(flat, &shape, &mut nu);
            let t: Vec<f64> = nu.iter().map(|&k| k as f64).collect();
            let l1: f64 = t.iter().sum();
            let mut s = ZERO;
            let mut k = (l1 / 2.0).log2().floor() as i32 - 1;
            loop {
                let sc = 2f64.powi(-k);
                let u: Vec<f64> = t.iter().map(|x| x * sc).collect();
                if u.iter().all(|&x| x < 0.25) && u.iter().sum::<f64>() < 0.25 {
                    break;
                }
                s += a.eval(&u).conj() * b.eval(&u);
                k += 1;
            }
            (s - 1.0).norm()
        })
        .reduce(|| 0.0, f64::max)
}

/// Builds the frame; `j_max` levels of cubature are materialized.
pub fn build_frame(
    params: &TensorJacobiParams,
    config: FrameConfig,
    j_max: u32,
) -> Result<NeedletFrame> {
    let d = params.dim();
    let (analysis, synthesis, tight) = match config {
        FrameConfig::Tight(a) => {
            if a.type_tag() != CutoffType::C || !a.is_real() {
                return Err(Error::TypeMismatch(format!(
                    "tight frames need a real type-(c) cutoff, got '{}'",
                    a.label()
                )));
            }
            (a.clone(), a, true)
        }
        FrameConfig::Dual(a) => {
            let b = make_dual_cutoff(&a)?;
            (a, b, false)
        }
        FrameConfig::Pair {
            analysis,
            synthesis,
        } => (analysis, synthesis, false),
    };
    for c in [&analysis, &synthesis] {
        params.check_dim(c.dim())?;
    }
    let cover = verify_dyadic_covering(&analysis);
    if !cover.passed {
        return Err(Error::CoveringFailure {
            value: cover.min_inf,
            location: cover.worst_location,
        });
    }
    let levels = (0..=j_max)
        .map(|j| {
            let cubature = build_level(j, params)?;
            let sqrt_weights = cubature.weights().iter().map(|w| w.sqrt()).collect();
            Ok(LevelData {
                sqrt_weights,
                modes: vec![mode_block(j); d],
                analysis: symbols(&analysis, j, d),
                synthesis: if tight {
                    Vec::new()
                } else {
                    symbols(&synthesis, j, d)
                },
                cubature,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NeedletFrame {
        params: params.clone(),
        analysis,
        synthesis,
        j_max,
        tight,
        levels,
    })
}

/// Needlet coefficients, one row-major block per level; all-zero levels are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedletCoefficients {
    sizes: Vec<usize>,
    levels: Vec<Option<Vec<Complex64>>>,
}

impl NeedletCoefficients {
    pub fn zeros(frame: &NeedletFrame) -> Self {
        let sizes: Vec<usize> = frame.levels.iter().map(|l| l.cubature.len()).collect();
        Self {
            levels: vec![None; sizes.len()],
            sizes,
        }
    }

    pub fn j_max(&self) -> u32 {
        self.sizes.len() as u32 - 1
    }

    pub fn level_len(&self, j: u32) -> usize {
        self.sizes[j as usize]
    }

    pub fn level(&self, j: u32) -> Option<&[Complex64]> {
        self.levels.get(j as usize)?.as_deref()
    }

    pub fn get(&self, j: u32, flat: usize) -> Complex64 {
        self.level(j).map_or(ZERO, |l| l[flat])
    }

    pub fn set(&mut self, j: u32, flat: usize, value: Complex64) {
        let n = self.sizes[j as usize];
        let l = self.levels[j as usize].get_or_insert_with(|| vec![ZERO; n]);
        l[flat] = value;
    }

    fn set_level(&mut self, j: u32, values: Vec<Complex64>) {
        self.levels[j as usize] = if values.iter().all(|v| *v == ZERO) {
            None
        } else {
            Some(values)
        };
    }

    /// `(j, flat, h)` over nonzero entries, by level then node.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (u32, usize, Complex64)> + '_ {
        self.levels.iter().enumerate().flat_map(|(j, l)| {
            l.iter().flat_map(move |vals| {
                vals.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != ZERO)
                    .map(move |(i, v)| (j as u32, i, *v))
            })
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.iter_nonzero().count()
    }

    /// `sum |h|^2`.
    pub fn energy(&self) -> f64 {
        self.levels.iter().flatten().flatten().map(|v| v.norm_sqr()).sum()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.sizes != other.sizes {
            return Err(Error::DimensionMismatch {
                expected: self.sizes.len(),
                got: other.sizes.len(),
            });
        }
        let mut out = self.clone();
        for (j, &n) in self.sizes.iter().enumerate() {
            let x = self.levels[j].clone().unwrap_or_else(|| vec![ZERO; n]);
            let y = other.levels[j].clone().unwrap_or_else(|| vec![ZERO; n]);
            out.set_level(j as u32, x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect());
        }
        Ok(out)
    }

    /// Keeps only the listed `(j, flat)` entries.
    pub fn restricted(&self, keep: &[(u32, usize)]) -> Self {
        let mut out = Self {
            sizes: self.sizes.clone(),
            levels: vec![None; self.sizes.len()],
        };
        for &(j, i) in keep {
            out.set(j, i, self.get(j, i));
        }
        out
    }
}

/// Which family of needlets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `phi_xi`, built from `A`.
    Analysis,
    /// `psi_xi`, built from `B`.
    Synthesis,
}

impl NeedletFrame {
    pub fn params(&self) -> &TensorJacobiParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn is_tight(&self) -> bool {
        self.tight
    }

    pub fn analysis_cutoff(&self) -> &CutoffFunction {
        &self.analysis
    }

    pub fn synthesis_cutoff(&self) -> &CutoffFunction {
        &self.synthesis
    }

    pub fn level(&self, j: u32) -> &CubatureLevel {
        &self.levels[j as usize].cubature
    }

    fn symbols(&self, j: u32, family: Family) -> &[Complex64] {
        let l = &self.levels[j as usize];
        match family {
            Family::Synthesis if !self.tight => &l.synthesis,
            _ => &l.analysis,
        }
    }

    /// Errors when a mode of `f` is still seen by a level beyond `j_max`.
    pub fn check_spectrum(&self, f: &JacobiExpansion) -> Result<()> {
        let floor = SPECTRUM_ROUNDOFF * f.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        for (nu, c) in f.nonzero() {
            if c.norm() <= floor {
                continue;
            }
            let l1: usize = nu.iter().sum();
            if l1 == 0 {
                continue;
            }
            let mut j = self.j_max + 1;
            while l1 as f64 / 2f64.powi(j as i32 - 1) > 0.5 {
                if level_symbol(&self.analysis, j, &nu).norm() > 1e-15
                    || level_symbol(&self.synthesis, j, &nu).norm() > 1e-15
                {
                    return Err(Error::SpectrumNotCovered {
                        j_max: self.j_max,
                        level: j,
                        mode: nu,
                    });
                }
                j += 1;
            }
        }
        Ok(())
    }

    /// `<f, phi_xi> = c_xi^{1/2} sum_nu conj(A_j(nu)) f_nu P~_nu(xi)` at every level.
    pub fn analyze(&self, f: &JacobiExpansion) -> Result<NeedletCoefficients> {
        self.analyze_family(f, Family::Analysis)
    }

    /// Coefficients against either family.
    pub fn analyze_family(&self, f: &JacobiExpansion, family: Family) -> Result<NeedletCoefficients> {
        self.params.check_dim(f.dim())?;
        self.check_spectrum(f)?;
        let mut out = NeedletCoefficients::zeros(self);
        let blocks: Vec<Vec<Complex64>> = (0..=self.j_max)
            .into_par_iter()
            .map(|j| {
                let l = &self.levels[j as usize];
                let sym = self.symbols(j, family);
                let g = f.resized(&l.modes);
                let mut any = false;
                let coeffs: Vec<Complex64> = g
                    .coeffs()
                    .iter()
                    .zip(sym)
                    .map(|(c, s)| {
                        let v = c * s.conj();
                        any |= v != ZERO;
                        v
                    })
                    .collect();
                if !any {
                    return Vec::new();
                }
                let g = JacobiExpansion::from_coeffs(self.params.clone(), l.modes.clone(), coeffs)
                    .expect("block shape");
                let vals = g.eval_grid(&l.cubature.node_axes());
                vals.iter().zip(&l.sqrt_weights).map(|(v, w)| v * w).collect()
            })
            .collect();
        for (j, b) in blocks.into_iter().enumerate() {
            if !b.is_empty() {
                out.set_level(j as u32, b);
            }
        }
        Ok(out)
    }

    /// `sum h_xi psi_xi` as an expansion on `[0, 2^{j_max})^d`.
    pub fn synthesize(&self, coeffs: &NeedletCoefficients) -> Result<JacobiExpansion> {
        self.synthesize_family(coeffs, Family::Synthesis)
    }

    pub fn synthesize_family(
        &self,
        coeffs: &NeedletCoefficients,
        family: Family,
    ) -> Result<JacobiExpansion> {
        if coeffs.sizes.len() != self.levels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.levels.len(),
                got: coeffs.sizes.len(),
            });
        }
        let d = self.dim();
        let top = vec![mode_block(self.j_max); d];
        let parts: Vec<JacobiExpansion> = (0..=self.j_max)
            .into_par_iter()
            .filter_map(|j| {
                let h = coeffs.level(j)?;
                let l = &self.levels[j as usize];
                let v: Vec<Complex64> = h.iter().zip(&l.sqrt_weights).map(|(h, w)| h * w).collect();
                let g = JacobiExpansion::from_grid_adjoint(
                    self.params.clone(),
                    l.modes.clone(),
                    &l.cubature.node_axes(),
                    &v,
                )
                .expect("level shapes");
                let sym = self.symbols(j, family);
                let mut g = g;
                for (c, s) in g.coeffs_mut().iter_mut().zip(sym) {
                    *c *= s;
                }
                Some(g.resized(&top))
            })
            .collect();
        let mut out = JacobiExpansion::zeros(self.params.clone(), top)?;
        for p in parts {
            for (a, b) in out.coeffs_mut().iter_mut().zip(p.coeffs()) {
                *a += b;
            }
        }
        Ok(out)
    }

    /// Coefficients of a single needlet `c_xi^{1/2} sum_nu S_j(nu) P~_nu(xi) P~_nu`.
    pub fn needlet(&self, j: u32, flat: usize, family: Family) -> JacobiExpansion {
        let l = &self.levels[j as usize];
        let xi = l.cubature.node(flat);
        let vals: Vec<Vec<f64>> = self
            .params
            .pairs()
            .iter()
            .zip(&xi)
            .map(|(p, &t)| JacobiBasis::new(*p, l.modes[0]).eval_vec(t))
            .collect();
        let sym = self.symbols(j, family);
        let sw = l.sqrt_weights[flat];
        let mut nu = vec![0; self.dim()];
        let coeffs = sym
            .iter()
            .enumerate()
            .map(|(i, s)| {
                unflatten(i, &l.modes, &mut nu);
                s * sw * nu.iter().zip(&vals).map(|(&k, v)| v[k]).product::<f64>()
            })
            .collect();
        JacobiExpansion::from_coeffs(self.params.clone(), l.modes.clone(), coeffs).expect("block")
    }

    /// Empty coefficient set with `h` at `(j, flat)`.
    pub fn unit_coefficient(&self, j: u32, flat: usize, h: Complex64) -> NeedletCoefficients {
        let mut c = NeedletCoefficients::zeros(self);
        c.set(j, flat, h);
        c
    }

    /// `c_xi^{1/2}` of node `flat` at level `j`.
    pub fn sqrt_weight(&self, j: u32, flat: usize) -> f64 {
        self.levels[j as usize].sqrt_weights[flat]
    }

    /// `||psi_xi||_2^2 = c_xi sum_nu |S_j(nu)|^2 P~_nu(xi)^2`, by level, for every node.
    pub fn needlet_l2_norms(&self, family: Family) -> Vec<Vec<f64>> {
        (0..=self.j_max)
            .map(|j| {
                let l = &self.levels[j as usize];
                let sym2: Vec<Complex64> = self
                    .symbols(j, family)
                    .iter()
                    .map(|s| Complex64::new(s.norm_sqr(), 0.0))
                    .collect();
                let g = JacobiExpansion::from_coeffs(self.params.clone(), l.modes.clone(), sym2)
                    .expect("block");
                // sum_nu |S|^2 P~_nu(xi)^2 is the grid evaluation with squared basis tables.
                squared_basis_eval(&g, &l.cubature.node_axes())
                    .into_iter()
                    .zip(&l.sqrt_weights)
                    .map(|(v, w)| (v * w * w).sqrt())
                    .collect()
            })
            .collect()
    }
}

fn squared_basis_eval(g: &JacobiExpansion, axes: &[Vec<f64>]) -> Vec<f64> {
    let shape = g.shape().to_vec();
    let mut data: Vec<Complex64> = g.coeffs().to_vec();
    let mut cur = shape.clone();
    for (i, pts) in axes.iter().enumerate() {
        let basis = JacobiBasis::new(*g.params().pair(i), shape[i]);
        let table: Vec<f64> = basis.table(pts).into_iter().map(|v| v * v).collect();
        let (d2, s2) = crate::expansion::mode_product(&data, &cur, i, &table, pts.len());
        data = d2;
        cur = s2;
    }
    data.into_iter().map(|c| c.re).collect()
}

/// `||psi_xi||_p` against `(2^{dj} / W(2^j; xi))^{1/2 - 1/p}`.
#[derive(Debug, Clone, Serialize)]
pub struct NeedletNorm {
    pub j: u32,
    pub flat: usize,
    pub p: f64,
    pub norm: f64,
    pub comparand: f64,
    pub ratio: f64,
}

pub fn needlet_norm(frame: &NeedletFrame, j: u32, flat: usize, p: f64, family: Family) -> Result<NeedletNorm> {
    let psi = frame.needlet(j, flat, family);
    let norm = psi.lp_norm(p)?;
    let xi = frame.level(j).node(flat);
    let d = frame.dim() as f64;
    let base = 2f64.powf(d * j as f64) / weight_w(1 << j, &xi, frame.params());
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let comparand = base.powf(0.5 - inv_p);
    Ok(NeedletNorm {
        j,
        flat,
        p,
        norm,
        comparand,
        ratio: norm / comparand,
    })
}

/// `max_x |psi_xi(x)| sqrt(W(2^j; xi)) (1 + 2^j rho(xi, x))^sigma / 2^{jd/2}` over the
/// Chebyshev-extrema grid with `per_axis + 1` points per axis.
pub fn needlet_localization(
    frame: &NeedletFrame,
    j: u32,
    flat: usize,
    sigma: f64,
    per_axis: usize,
) -> f64 {
    let psi = frame.needlet(j, flat, Family::Synthesis);
    let grid: Vec<f64> = (0..=per_axis)
        .map(|k| (std::f64::consts::PI * k as f64 / per_axis as f64).cos())
        .collect();
    let axes = vec![grid; frame.dim()];
    let vals = psi.eval_grid(&axes);
    let xi = frame.level(j).node(flat);
    let sj = 2f64.powi(j as i32);
    let norm = weight_w(1 << j, &xi, frame.params()).sqrt() / sj.powf(frame.dim() as f64 / 2.0);
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    vals.par_iter()
        .enumerate()
        .map(|(i, v)| {
            let mut idx = vec![0; shape.len()];
            unflatten(i, &shape, &mut idx);
            let x: Vec<f64> = idx.iter().zip(&axes).map(|(&k, a)| a[k]).collect();
            v.norm() * norm * (1.0 + sj * rho(&xi, &x)).powf(sigma)
        })
        .reduce(|| 0.0, f64::max)
}

/// Random expansion with per-coordinate degree `<= max_degree`, complex coefficients
/// uniform in the unit square.
pub fn random_bandlimited(
    params: &TensorJacobiParams,
    max_degree: usize,
    rng: &mut ChaCha8Rng,
) -> JacobiExpansion {
    let d = params.dim();
    JacobiExpansion::from_fn(params.clone(), vec![max_degree + 1; d], |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .expect("dimension matches")
}

/// Round-trip, Parseval and frame-bound summary over random band-limited inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub trials: usize,
    pub max_degree: usize,
    pub max_roundtrip_rel_error: f64,
    /// `max |sum |<f, psi>|^2 - ||f||_2^2| / ||f||_2^2`; tight frames only.
    pub parseval_rel_error: Option<f64>,
    /// Max over min of `sum |<f, phi>|^2 / ||f||_2^2`.
    pub frame_bound_ratio: f64,
}

/// Runs `trials` random inputs of per-coordinate degree `<= 2^{j_max - 1}`.
pub fn roundtrip_report(frame: &NeedletFrame, trials: usize, seed: u64) -> Result<RoundtripReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_degree = 1usize << frame.j_max().saturating_sub(1);
    let mut rt = 0.0f64;
    let mut pe = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..trials {
        let f = random_bandlimited(frame.params(), max_degree, &mut rng);
        let c = frame.analyze(&f)?;
        let g = frame.synthesize(&c)?;
        let diff = g.add_scaled(&f, Complex64::new(-1.0, 0.0))?;
        let e2 = f.l2_norm().powi(2);
        rt = rt.max(diff.l2_norm() / f.l2_norm());
        let ratio = c.energy() / e2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if frame.is_tight() {
            pe = pe.max((ratio - 1.0).abs());
        }
    }
    Ok(RoundtripReport {
        trials,
        max_degree,
        max_roundtrip_rel_error: rt,
        parseval_rel_error: frame.is_tight().then_some(pe),
        frame_bound_ratio: hi / lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight(d: usize, j: u32) -> NeedletFrame {
        build_frame(&TensorJacobiParams::legendre(d), FrameConfig::default_tight(d).unwrap(), j)
            .unwrap()
    }

    #[test]
    fn level_zero_only_frame() {
        let f = tight(2, 0);
        assert!(f.is_tight());
        assert_eq!(f.level(0).len(), 4);
        let psi = f.needlet(0, 1, Family::Synthesis);
        assert_eq!(psi.shape(), &[1, 1]);
        assert!((psi.get(&[0, 0]).re - f.sqrt_weight(0, 1) * 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_analyzes_to_level_zero() {
        let fr = tight(2, 3);
        let mut f = JacobiExpansion::zeros(fr.params().clone(), vec![1, 1]).unwrap();
        f.set(&[0, 0], Complex64::new(1.0, 0.0));
        let c = fr.analyze(&f).unwrap();
        assert!(c.iter_nonzero().all(|(j, _, _)| j == 0));
        for i in 0..4 {
            assert!((c.get(0, i).re - fr.sqrt_weight(0, i) * 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn single_level_zero_coefficient_synthesizes_constant() {
        let fr = tight(1, 2);
        let h = Complex64::new(0.0, 2.0);
        let g = fr.synthesize(&fr.unit_coefficient(0, 1, h)).unwrap();
        let p0 = 1.0 / 2f64.sqrt();
        assert!((g.get(&[0]) - h * fr.sqrt_weight(0, 1) * p0).norm() < 1e-15);
        assert_eq!(g.nonzero().count(), 1);
    }

    #[test]
    fn tight_round_trip_and_parseval() {
        let fr = tight(2, 4);
        let r = roundtrip_report(&fr, 3, 11).unwrap();
        assert!(r.max_roundtrip_rel_error < 1e-12, "{r:?}");
        assert!(r.parseval_rel_error.unwrap() < 1e-12);
    }

    #[test]
    fn dual_round_trip() {
        let p = TensorJacobiParams::new(vec![
            crate::jacobi::JacobiPair::new(0.5, -0.5).unwrap(),
            crate::jacobi::JacobiPair::new(1.0, 0.0).unwrap(),
        ])
        .unwrap();
        let fr = build_frame(&p, FrameConfig::default_dual(2).unwrap(), 4).unwrap();
        assert!(!fr.is_tight());
        let r = roundtrip_report(&fr, 3, 12).unwrap();
        assert!(r.max_roundtrip_rel_error < 1e-9, "{r:?}");
        assert!(r.parseval_rel_error.is_none());
        assert!(r.frame_bound_ratio >= 1.0 && r.frame_bound_ratio.is_finite());
    }

    #[test]
    fn spectrum_beyond_levels_is_rejected() {
        let fr = tight(1, 3);
        let mut f = JacobiExpansion::zeros(fr.params().clone(), vec![1]).unwrap();
        f.set(&[9], Complex64::new(1.0, 0.0));
        assert!(matches!(fr.analyze(&f), Err(Error::SpectrumNotCovered { .. })));
    }

    #[test]
    fn synthesis_is_linear() {
        let fr = tight(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = fr.analyze(&random_bandlimited(fr.params(), 4, &mut rng)).unwrap();
        let b = fr.analyze(&random_bandlimited(fr.params(), 4, &mut rng)).unwrap();
        let (s, t) = (Complex64::new(2.0, -1.0), Complex64::new(0.5, 0.0));
        let lhs = fr.synthesize(&a.combine(s, &b, t).unwrap()).unwrap();
        let rhs = fr
            .synthesize(&a)
            .unwrap()
            .scale(s)
            .add_scaled(&fr.synthesize(&b).unwrap(), t)
            .unwrap();
        let diff = lhs.add_scaled(&rhs, Complex64::new(-1.0, 0.0)).unwrap();
        assert!(diff.l2_norm() < 1e-13 * lhs.l2_norm());
    }

    #[test]
    fn l2_norm_formula_matches_cubature() {
        let fr = tight(2, 3);
        let norms = fr.needlet_l2_norms(Family::Synthesis);
        for flat in [0, 5, 17, 63] {
            let direct = fr.needlet(3, flat, Family::Synthesis).lp_norm_oversampled(2.0, 2).unwrap();
            assert!((direct - norms[3][flat]).abs() < 1e-9 * direct);
        }
    }

    #[test]
    fn partition_defect_is_small_for_both_configs() {
        let a = CutoffPreset::SinSpliceC.build(2).unwrap();
        assert!(partition_defect(&a, &a, 5) < 1e-12);
        let b = CutoffPreset::ProductB.build(2).unwrap();
        let dual = make_dual_cutoff(&b).unwrap();
        assert!(partition_defect(&b, &dual, 5) < 1e-12);
    }
}
