//! Tensor Jacobi kernels `Lambda_n(x, y) = sum_nu A(nu/n) P~_nu(x) P~_nu(y)`, the weight
//! `W(n; x)`, the distance `rho`, and empirical localization diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cutoff::CutoffFunction;
use crate::error::{Error, Result};
use crate::expansion::{ordered_sum, unflatten, JacobiExpansion, NormGrid, TensorJacobiParams, LP_OVERSAMPLING};
use crate::jacobi::{gauss_jacobi_cached, JacobiBasis};

/// Largest dense mode block `(2n)^d` a kernel will tabulate.
pub const DENSE_BUDGET: usize = 1 << 24;

/// Pairs with `|Lambda_n| < ZERO_CUTOFF * n^d` are left out of normalized profiles.
pub const ZERO_CUTOFF: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `W(n; x)`, with `W(0; x) = 1`.
pub fn weight_w(n: u64, x: &[f64], params: &TensorJacobiParams) -> f64 {
    params.regularized_weight(n, x)
}

/// `max_j |arccos x_j - arccos y_j|`.
pub fn rho(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (acos(*a) - acos(*b)).abs())
        .fold(0.0, f64::max)
}

fn acos(t: f64) -> f64 {
    t.clamp(-1.0, 1.0).acos()
}

/// Per-coordinate evaluation data of a separable cutoff term at the points `k / n`.
#[derive(Debug, Clone)]
struct FactorTable {
    coeff: f64,
    axes: Vec<Vec<f64>>,
}

/// `Lambda_n` for a cutoff and tensor Jacobi weight, with the mode block `[0, 2n)^d`
/// tabulated or factorized.
#[derive(Clone)]
pub struct KernelSpec {
    params: TensorJacobiParams,
    cutoff: CutoffFunction,
    n: usize,
    bases: Vec<JacobiBasis>,
    dense: Option<Vec<Complex64>>,
    factors: Option<Vec<FactorTable>>,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSpec")
            .field("cutoff", &self.cutoff.label())
            .field("n", &self.n)
            .field("dense", &self.dense.is_some())
            .field("factorized", &self.factors.is_some())
            .finish()
    }
}

impl KernelSpec {
    pub fn new(params: TensorJacobiParams, cutoff: CutoffFunction, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("kernel scale n must be positive".into()));
        }
        params.check_dim(cutoff.dim())?;
        let d = params.dim();
        let m = 2 * n;
        let bases = params.pairs().iter().map(|p| JacobiBasis::new(*p, m)).collect();
        let factors = cutoff.separable_terms().map(|terms| {
            terms
                .iter()
                .map(|term| FactorTable {
                    coeff: term.coeff,
                    axes: term
                        .factors
                        .iter()
                        .map(|f| (0..m).map(|k| f.eval(k as f64 / n as f64)).collect())
                        .collect(),
                })
                .collect()
        });
        let size = (m as f64).powi(d as i32);
        let dense = if size <= DENSE_BUDGET as f64 {
            let shape = vec![m; d];
            let f = &cutoff;
            Some(
                (0..m.pow(d as u32))
                    .into_par_iter()
                    .map_init(
                        || (vec![0usize; d], vec![0.0; d]),
                        |(nu, t), flat| {
                            unflatten(flat, &shape, nu);
                            for (ti, k) in t.iter_mut().zip(nu.iter()) {
                                *ti = *k as f64 / n as f64;
                            }
                            f.eval(t)
                        },
                    )
                    .collect(),
            )
        } else {
            None
        };
        if dense.is_none() && factors.is_none() {
            return Err(Error::BudgetExceeded(format!(
                "(2n)^d = {size} modes exceed {DENSE_BUDGET} and '{}' is not separable",
                cutoff.label()
            )));
        }
        Ok(Self {
            params,
            cutoff,
            n,
            bases,
            dense,
            factors,
        })
    }

    pub fn params(&self) -> &TensorJacobiParams {
        &self.params
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.cutoff
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn is_factorized(&self) -> bool {
        self.factors.is_some()
    }

    /// `A(nu / n)`.
    pub fn symbol(&self, nu: &[usize]) -> Complex64 {
        let t: Vec<f64> = nu.iter().map(|&k| k as f64 / self.n as f64).collect();
        self.cutoff.eval(&t)
    }

    /// Per-axis `P~_k(x_i) P~_k(y_i)` for `k < 2n`.
    fn products(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        let m = 2 * self.n;
        let mut px = vec![0.0; m];
        let mut py = vec![0.0; m];
        self.bases
            .iter()
            .zip(x.iter().zip(y))
            .map(|(b, (&xi, &yi))| {
                b.eval_into(xi, &mut px);
                b.eval_into(yi, &mut py);
                px.iter().zip(&py).map(|(a, b)| a * b).collect()
            })
            .collect()
    }

    /// `Lambda_n(x, y)`: factorized when the cutoff is a sum of products, dense otherwise.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        if self.factors.is_some() {
            self.eval_factorized(x, y).expect("factorized")
        } else {
            self.eval_dense(x, y).expect("dense")
        }
    }

    /// Direct sum over the tabulated mode block.
    pub fn eval_dense(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        let table = self.dense.as_ref().ok_or_else(|| {
            Error::BudgetExceeded("mode block too large for dense evaluation".into())
        })?;
        let u = self.products(x, y);
        let m = 2 * self.n;
        let mut data: Vec<Complex64> = table.clone();
        for axis in (0..self.dim()).rev() {
            data = data
                .chunks(m)
                .map(|c| c.iter().zip(&u[axis]).map(|(a, b)| a * b).sum())
                .collect();
        }
        Ok(data[0])
    }

    /// `sum_terms c prod_i sum_k a_i(k/n) P~_k(x_i) P~_k(y_i)`.
    pub fn eval_factorized(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        let factors = self
            .factors
            .as_ref()
            .ok_or_else(|| Error::TypeMismatch(format!("'{}' is not separable", self.cutoff.label())))?;
        let u = self.products(x, y);
        let total: f64 = factors
            .iter()
            .map(|term| {
                term.coeff
                    * term
                        .axes
                        .iter()
                        .zip(&u)
                        .map(|(a, u)| a.iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
                        .product::<f64>()
            })
            .sum();
        Ok(Complex64::new(total, 0.0))
    }

    /// Coefficients of `Lambda_n(., y)`: `A(nu/n) P~_nu(y)` on `[0, 2n)^d`.
    pub fn row_expansion(&self, y: &[f64]) -> Result<JacobiExpansion> {
        let m = 2 * self.n;
        let vals: Vec<Vec<f64>> = self.bases.iter().zip(y).map(|(b, &t)| b.eval_vec(t)).collect();
        let d = self.dim();
        if (m as f64).powi(d as i32) > DENSE_BUDGET as f64 {
            return Err(Error::BudgetExceeded("mode block too large for a row expansion".into()));
        }
        JacobiExpansion::from_fn(self.params.clone(), vec![m; d], |nu| {
            let p: f64 = nu.iter().zip(&vals).map(|(&k, v)| v[k]).product();
            match &self.dense {
                Some(t) => {
                    let flat = nu.iter().fold(0, |acc, &k| acc * m + k);
                    t[flat] * p
                }
                None => self.symbol(nu) * p,
            }
        })
    }

    /// `sum_nu |A(nu/n)|^2 P~_nu(x)^2`, the Parseval form of `int |Lambda_n(x, y)|^2 w(y) dy`.
    pub fn l2_row(&self, x: &[f64]) -> f64 {
        let m = 2 * self.n;
        let sq: Vec<Vec<f64>> = self
            .bases
            .iter()
            .zip(x)
            .map(|(b, &t)| b.eval_vec(t).into_iter().map(|v| v * v).collect())
            .collect();
        if let Some(table) = &self.dense {
            let mut data: Vec<f64> = table.iter().map(|c| c.norm_sqr()).collect();
            for axis in (0..self.dim()).rev() {
                data = data
                    .chunks(m)
                    .map(|c| c.iter().zip(&sq[axis]).map(|(a, b)| a * b).sum())
                    .collect();
            }
            return data[0];
        }
        let terms = self.factors.as_ref().expect("dense or factorized");
        let mut total = 0.0;
        for a in terms {
            for b in terms {
                total += a.coeff
                    * b.coeff
                    * a.axes
                        .iter()
                        .zip(&b.axes)
                        .zip(&sq)
                        .map(|((fa, fb), s)| {
                            fa.iter().zip(fb).zip(s).map(|((p, q), r)| p * q * r).sum::<f64>()
                        })
                        .product::<f64>();
            }
        }
        total
    }

    /// `int |Lambda_n(x, y)|^2 w(y) dy` by the tensor Gauss rule with `2n` nodes per axis.
    pub fn l2_row_cubature(&self, x: &[f64]) -> Result<f64> {
        let rules = self
            .params
            .pairs()
            .iter()
            .map(|p| gauss_jacobi_cached(2 * self.n, p))
            .collect::<Result<Vec<_>>>()?;
        let shape: Vec<usize> = rules.iter().map(|r| r.nodes.len()).collect();
        let total = shape.iter().product::<usize>();
        Ok(ordered_sum(total, |flat| {
            let mut idx = vec![0; shape.len()];
            unflatten(flat, &shape, &mut idx);
            let y: Vec<f64> = idx.iter().zip(&rules).map(|(&k, r)| r.nodes[k]).collect();
            let w: f64 = idx.iter().zip(&rules).map(|(&k, r)| r.weights[k]).product();
            w * self.eval(x, &y).norm_sqr()
        }))
    }
}

/// `l2_row(x) * W(n; x) / n^d`, the quantity the lower bound keeps away from zero.
pub fn kernel_l2_row(spec: &KernelSpec, x: &[f64]) -> f64 {
    let n = spec.n();
    spec.l2_row(x) * weight_w(n as u64, x, spec.params()) / (n as f64).powi(spec.dim() as i32)
}

/// Reproduction of low-degree polynomials by `Lambda_n(x, .)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReproductionError {
    /// Largest `|int Lambda_n(x, y) P~_nu(y) w(y) dy - P~_nu(x)|` over `||nu||_1 <= n`.
    pub abs: f64,
    /// Largest `|P~_nu(x)|` over the same set.
    pub scale: f64,
}

impl ReproductionError {
    pub fn relative(&self) -> f64 {
        self.abs / self.scale.max(1.0)
    }
}

/// Reproduction error at `x`, the integral taken by a tensor Gauss-Jacobi rule with `2n`
/// nodes per axis.
pub fn reproduction_error(spec: &KernelSpec, x: &[f64]) -> Result<ReproductionError> {
    spec.params.check_dim(x.len())?;
    let n = spec.n;
    let rules = spec
        .params
        .pairs()
        .iter()
        .map(|p| gauss_jacobi_cached(2 * n, p))
        .collect::<Result<Vec<_>>>()?;
    let axes: Vec<Vec<f64>> = rules.iter().map(|r| r.nodes.clone()).collect();
    let grid_shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let row = spec.row_expansion(x)?;
    let mut vals = row.eval_grid(&axes);
    let mut idx = vec![0; x.len()];
    for (flat, v) in vals.iter_mut().enumerate() {
        unflatten(flat, &grid_shape, &mut idx);
        *v *= idx.iter().zip(&rules).map(|(&k, r)| r.weights[k]).product::<f64>();
    }
    let proj = JacobiExpansion::from_grid_adjoint(spec.params.clone(), vec![n + 1; x.len()], &axes, &vals)?;
    let tables: Vec<Vec<f64>> = spec.bases.iter().zip(x).map(|(b, &t)| b.eval_vec(t)).collect();
    let mut out = ReproductionError { abs: 0.0, scale: 0.0 };
    for (flat, c) in proj.coeffs().iter().enumerate() {
        unflatten(flat, proj.shape(), &mut idx);
        if idx.iter().sum::<usize>() > n {
            continue;
        }
        let want: f64 = idx.iter().zip(&tables).map(|(&k, t)| t[k]).product();
        out.abs = out.abs.max((c - want).norm());
        out.scale = out.scale.max(want.abs());
    }
    Ok(out)
}

/// One sampled pair of a normalized profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub rho: f64,
    pub kernel_abs: f64,
    pub normalized: f64,
}

/// Empirical constant of a normalized kernel bound over a sample.
#[derive(Debug, Clone, Serialize)]
pub struct Profile {
    pub n: usize,
    pub c_emp: f64,
    pub argmax: Option<usize>,
    pub excluded: usize,
    pub rows: Vec<ProfileRow>,
}

impl Profile {
    pub fn worst(&self) -> Option<&ProfileRow> {
        self.argmax.map(|i| &self.rows[i])
    }
}

/// `max |Lambda_n(x, y)| sqrt(W(n;x) W(n;y)) envelope(n rho) / n^d` over the sample.
pub fn normalized_profile(
    spec: &KernelSpec,
    sample: &[(Vec<f64>, Vec<f64>)],
    envelope: impl Fn(f64) -> f64 + Sync,
) -> Profile {
    let n = spec.n();
    let nd = (n as f64).powi(spec.dim() as i32);
    let rows: Vec<Option<ProfileRow>> = sample
        .par_iter()
        .map(|(x, y)| {
            let k = spec.eval(x, y).norm();
            if k < ZERO_CUTOFF * nd {
                return None;
            }
            let r = rho(x, y);
            let w = (weight_w(n as u64, x, spec.params()) * weight_w(n as u64, y, spec.params()))
                .sqrt();
            Some(ProfileRow {
                x: x.clone(),
                y: y.clone(),
                rho: r,
                kernel_abs: k,
                normalized: k * w * envelope(n as f64 * r) / nd,
            })
        })
        .collect();
    let excluded = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<ProfileRow> = rows.into_iter().flatten().collect();
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.normalized.total_cmp(&b.1.normalized))
        .map(|(i, _)| i);
    Profile {
        n,
        c_emp: argmax.map_or(0.0, |i| rows[i].normalized),
        argmax,
        excluded,
        rows,
    }
}

/// Rapid-decay profile with envelope `(1 + n rho)^sigma`.
pub fn decay_profile(spec: &KernelSpec, sigma: f64, sample: &[(Vec<f64>, Vec<f64>)]) -> Profile {
    normalized_profile(spec, sample, |t| (1.0 + t).powf(sigma))
}

/// Sub-exponential profile with envelope `exp(c t / L(t))`, `L` the cutoff's derivative gauge.
pub fn subexponential_profile(
    spec: &KernelSpec,
    c_tilde: f64,
    sample: &[(Vec<f64>, Vec<f64>)],
) -> Result<Profile> {
    let claim = spec.cutoff().gauge().cloned().ok_or_else(|| {
        Error::InvalidParameter(format!("'{}' carries no derivative gauge", spec.cutoff().label()))
    })?;
    Ok(normalized_profile(spec, sample, move |t| {
        (c_tilde * t / claim.gauge.eval(t)).exp()
    }))
}

/// Result of the search for a sub-exponential rate.
#[derive(Debug, Clone, Serialize)]
pub struct SubexpReport {
    /// Largest rate found with a bounded profile; zero when none exists down to `c_min`.
    pub c_tilde: f64,
    pub n_list: Vec<usize>,
    pub c_emp: Vec<f64>,
    pub growth: f64,
    pub bounded: bool,
}

/// Bisects for the largest `c` in `[c_min, c_max]` whose profile satisfies
/// `max_n C(n) / C(n_0) <= growth_limit` over `n_list`.
pub fn subexponential_search(
    specs: &[KernelSpec],
    samples: &[Vec<(Vec<f64>, Vec<f64>)>],
    c_min: f64,
    c_max: f64,
    growth_limit: f64,
    steps: usize,
) -> Result<SubexpReport> {
    let eval = |c: f64| -> Result<(Vec<f64>, f64)> {
        let cs = specs
            .iter()
            .zip(samples)
            .map(|(s, smp)| subexponential_profile(s, c, smp).map(|p| p.c_emp))
            .collect::<Result<Vec<_>>>()?;
        let g = cs.iter().fold(0.0f64, |m, v| m.max(v / cs[0]));
        Ok((cs, g))
    };
    let n_list = specs.iter().map(KernelSpec::n).collect();
    let (cs, g) = eval(c_min)?;
    if !(g <= growth_limit) {
        return Ok(SubexpReport {
            c_tilde: 0.0,
            n_list,
            c_emp: cs,
            growth: g,
            bounded: false,
        });
    }
    let (hi_cs, hi_g) = eval(c_max)?;
    if hi_g <= growth_limit {
        return Ok(SubexpReport {
            c_tilde: c_max,
            n_list,
            c_emp: hi_cs,
            growth: hi_g,
            bounded: true,
        });
    }
    let (mut lo, mut hi) = (c_min, c_max);
    let (mut best_cs, mut best_g) = (cs, g);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        let (cs, g) = eval(mid)?;
        if g <= growth_limit {
            lo = mid;
            best_cs = cs;
            best_g = g;
        } else {
            hi = mid;
        }
    }
    Ok(SubexpReport {
        c_tilde: lo,
        n_list,
        c_emp: best_cs,
        growth: best_g,
        bounded: true,
    })
}

fn random_theta(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..8) {
        0 => 0.0,
        1 => PI,
        _ => rng.gen_range(0.0..PI),
    }
}

fn theta_pair(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let r = if hi > lo { rng.gen_range(lo..=hi) } else { hi };
    let lead = rng.gen_range(0..d);
    let mut tx = vec![0.0; d];
    let mut ty = vec![0.0; d];
    for i in 0..d {
        if i == lead {
            let a = if rng.gen_bool(0.25) {
                if rng.gen_bool(0.5) {
                    0.0
                } else {
                    PI - r
                }
            } else {
                rng.gen_range(0.0..=(PI - r))
            };
            let (u, v) = if rng.gen_bool(0.5) { (a, a + r) } else { (a + r, a) };
            tx[i] = u;
            ty[i] = v;
        } else {
            tx[i] = random_theta(rng);
            ty[i] = (tx[i] + rng.gen_range(-r..=r)).clamp(0.0, PI);
        }
    }
    (tx, ty)
}

fn cos_point(theta: &[f64]) -> Vec<f64> {
    theta.iter().map(|t| t.cos()).collect()
}

/// Pairs stratified by `rho` in the bands `(2^{-j-1} pi, 2^{-j} pi]`, `j = 0..=log2 n`, plus a
/// near-diagonal band `[0, pi / (2 * 2^{log2 n})]`, with `per_stratum` pairs each. A quarter
/// of the pairs put the leading coordinate on the boundary and every other coordinate is on
/// the boundary with probability 1/4.
pub fn stratified_pairs(
    d: usize,
    n: usize,
    per_stratum: usize,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = (n.max(1) as f64).log2().floor() as i32;
    let mut out = Vec::with_capacity((levels as usize + 2) * per_stratum);
    for j in 0..=levels + 1 {
        let hi = PI * 2f64.powi(-j);
        let lo = if j == levels + 1 { 0.0 } else { 0.5 * hi };
        for _ in 0..per_stratum {
            let (tx, ty) = theta_pair(&mut rng, d, lo, hi);
            out.push((cos_point(&tx), cos_point(&ty)));
        }
    }
    out
}

/// Triples `(x, xi, y)` with `rho(x, xi) <= c_star / n` and `(x, y)` stratified as in
/// [`stratified_pairs`].
pub fn lip_triples(
    d: usize,
    n: usize,
    per_stratum: usize,
    c_star: f64,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11b);
    stratified_pairs(d, n, per_stratum, seed)
        .into_iter()
        .map(|(x, y)| {
            let delta = c_star / n as f64;
            let xi: Vec<f64> = x
                .iter()
                .map(|&t| (acos(t) + rng.gen_range(-delta..=delta)).clamp(0.0, PI).cos())
                .collect();
            (x, xi, y)
        })
        .collect()
}

/// `max |Lambda_n(x,y) - Lambda_n(xi,y)| sqrt(W(n;x) W(n;y)) (1 + n rho(x,y))^sigma /
/// (n^{d+1} rho(x, xi))` over the triples; triples with `x = xi` contribute nothing.
pub fn lip_profile(
    spec: &KernelSpec,
    sigma: f64,
    triples: &[(Vec<f64>, Vec<f64>, Vec<f64>)],
) -> Profile {
    let n = spec.n();
    let scale = (n as f64).powi(spec.dim() as i32 + 1);
    let rows: Vec<Option<ProfileRow>> = triples
        .par_iter()
        .map(|(x, xi, y)| {
            let h = rho(x, xi);
            if h == 0.0 {
                return None;
            }
            let diff = (spec.eval(x, y) - spec.eval(xi, y)).norm();
            let r = rho(x, y);
            let w = (weight_w(n as u64, x, spec.params()) * weight_w(n as u64, y, spec.params()))
                .sqrt();
            Some(ProfileRow {
                x: x.clone(),
                y: y.clone(),
                rho: r,
                kernel_abs: diff,
                normalized: diff * w * (1.0 + n as f64 * r).powf(sigma) / (scale * h),
            })
        })
        .collect();
    let excluded = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<ProfileRow> = rows.into_iter().flatten().collect();
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.normalized.total_cmp(&b.1.normalized))
        .map(|(i, _)| i);
    Profile {
        n,
        c_emp: argmax.map_or(0.0, |i| rows[i].normalized),
        argmax,
        excluded,
        rows,
    }
}

/// Ratios `|Lambda(x,y) - Lambda(xi',y)| / |Lambda(x,y) - Lambda(xi,y)|` with `xi'` halfway
/// between `x` and `xi` in arccos coordinates; triples whose difference is below `1e-12` are
/// skipped.
pub fn lip_halving_ratios(spec: &KernelSpec, triples: &[(Vec<f64>, Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    triples
        .par_iter()
        .filter_map(|(x, xi, y)| {
            let full = (spec.eval(x, y) - spec.eval(xi, y)).norm();
            if full < 1e-12 {
                return None;
            }
            let half: Vec<f64> = x
                .iter()
                .zip(xi)
                .map(|(&a, &b)| (0.5 * (acos(a) + acos(b))).cos())
                .collect();
            Some((spec.eval(x, y) - spec.eval(&half, y)).norm() / full)
        })
        .collect()
}

/// `Phi_j` multiplier at mode `nu`: `A(nu / 2^{j-1})` for `j >= 1`, `[nu = 0]` for `j = 0`.
pub fn level_symbol(cutoff: &CutoffFunction, j: u32, nu: &[usize]) -> Complex64 {
    if j == 0 {
        return if nu.iter().all(|&k| k == 0) {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        };
    }
    let s = 2f64.powi(j as i32 - 1);
    let t: Vec<f64> = nu.iter().map(|&k| k as f64 / s).collect();
    cutoff.eval(&t)
}

/// `Phi_j * f`: coefficient-wise multiplication by [`level_symbol`].
pub fn spectral_convolve(cutoff: &CutoffFunction, j: u32, f: &JacobiExpansion) -> JacobiExpansion {
    f.map_modes(|nu, c| if c == ZERO { ZERO } else { c * level_symbol(cutoff, j, nu) })
}

/// `2d + 2 sum_i min(0, max(alpha_i, beta_i))`, the degree exponent of the Nikolski bound
/// per unit of `1/q - 1/p`.
pub fn nikolski_exponent(params: &TensorJacobiParams) -> f64 {
    2.0 * params.dim() as f64
        + 2.0
            * params
                .pairs()
                .iter()
                .map(|p| p.alpha().max(p.beta()).min(0.0))
                .sum::<f64>()
}

/// Nikolski ratio `||W^s g||_p / (n^e ||W^{s'} g||_q)`.
#[derive(Debug, Clone, Serialize)]
pub struct NikolskiReport {
    pub norm_p: f64,
    pub norm_q: f64,
    pub exponent: f64,
    pub ratio: f64,
}

fn weighted_norm(g: &JacobiExpansion, n: u64, s: f64, p: f64) -> Result<f64> {
    let grid = NormGrid::new(g.params(), g.spectrum_level() + LP_OVERSAMPLING, p)?;
    let vals = g.trimmed().eval_grid(grid.axes());
    let pts = grid.points();
    Ok(grid.norm(
        vals.iter()
            .zip(&pts)
            .map(|(v, x)| v.norm() * weight_w(n, x, g.params()).powf(s)),
        p,
    ))
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(q > 0.0 && q <= p) {
        return Err(Error::InvalidParameter(format!("need 0 < q <= p (got p={p}, q={q})")));
    }
    Ok(())
}

/// `||g||_p / (n^{e (1/q - 1/p)} ||g||_q)` with `e` from [`nikolski_exponent`].
pub fn nikolski_check(g: &JacobiExpansion, n: u64, p: f64, q: f64) -> Result<NikolskiReport> {
    check_pq(p, q)?;
    let exponent = nikolski_exponent(g.params()) * (1.0 / q - 1.0 / p);
    let (norm_p, norm_q) = if p == q {
        let v = weighted_norm(g, n, 0.0, p)?;
        (v, v)
    } else {
        (weighted_norm(g, n, 0.0, p)?, weighted_norm(g, n, 0.0, q)?)
    };
    Ok(NikolskiReport {
        norm_p,
        norm_q,
        exponent,
        ratio: norm_p / ((n as f64).powf(exponent) * norm_q),
    })
}

/// `||W(n;.)^s g||_p / (n^{d(1/q - 1/p)} ||W(n;.)^{s + 1/p - 1/q} g||_q)`.
pub fn nikolski_weighted_check(
    g: &JacobiExpansion,
    n: u64,
    p: f64,
    q: f64,
    s: f64,
) -> Result<NikolskiReport> {
    check_pq(p, q)?;
    let exponent = g.dim() as f64 * (1.0 / q - 1.0 / p);
    let norm_p = weighted_norm(g, n, s, p)?;
    let norm_q = weighted_norm(g, n, s + 1.0 / p - 1.0 / q, q)?;
    Ok(NikolskiReport {
        norm_p,
        norm_q,
        exponent,
        ratio: norm_p / ((n as f64).powf(exponent) * norm_q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::CutoffPreset;
    use crate::jacobi::JacobiPair;

    fn spec(preset: CutoffPreset, d: usize, n: usize) -> KernelSpec {
        KernelSpec::new(TensorJacobiParams::legendre(d), preset.build(d).unwrap(), n).unwrap()
    }

    #[test]
    fn weight_examples() {
        let p1 = TensorJacobiParams::legendre(1);
        assert!((weight_w(2, &[0.0], &p1) - 1.25).abs() < 1e-15);
        let p3 = TensorJacobiParams::legendre(3);
        let want = (1.0f64 / 16.0).powf(1.5) * (2.0f64 + 1.0 / 16.0).powf(1.5);
        assert!((weight_w(4, &[1.0; 3], &p3) - want).abs() < 1e-14 * want);
        assert_eq!(weight_w(0, &[0.3, 0.2, 0.1], &p3), 1.0);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&[0.3, -0.2], &[0.3, -0.2]), 0.0);
        assert!((rho(&[1.0, 1.0], &[-1.0, -1.0]) - PI).abs() < 1e-15);
        assert!((rho(&[1.0, 0.0], &[0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn factorized_matches_dense() {
        for preset in [CutoffPreset::ProductA, CutoffPreset::ProductB] {
            let s = spec(preset, 2, 12);
            assert!(s.is_factorized());
            for (x, y) in stratified_pairs(2, 12, 8, 3) {
                let a = s.eval_dense(&x, &y).unwrap();
                let b = s.eval_factorized(&x, &y).unwrap();
                assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_for_real_cutoffs() {
        let s = spec(CutoffPreset::QuasinormB, 2, 9);
        for (x, y) in stratified_pairs(2, 9, 4, 5) {
            assert_eq!(s.eval(&x, &y), s.eval(&y, &x));
        }
    }

    #[test]
    fn type_a_reproduces_low_degrees() {
        let s = spec(CutoffPreset::ProductA, 2, 8);
        assert!(reproduction_error(&s, &[0.3, -0.95]).unwrap().abs < 1e-10);
        let b = spec(CutoffPreset::ProductB, 2, 8);
        assert!(reproduction_error(&b, &[0.3, -0.95]).unwrap().abs > 0.1);
    }

    #[test]
    fn row_expansion_has_no_modes_at_or_beyond_2n() {
        let s = spec(CutoffPreset::QuasinormB, 2, 6);
        let row = s.row_expansion(&[0.2, -0.7]).unwrap();
        let (x, y) = ([0.4, 0.1], [0.2, -0.7]);
        assert!((row.eval(&x) - s.eval(&x, &y)).norm() < 1e-12);
        let wide = row.resized(&[20, 20]);
        for (nu, _) in wide.nonzero() {
            assert!(nu.iter().all(|&k| k < 12));
        }
    }

    #[test]
    fn l2_row_parseval_matches_cubature() {
        let params = TensorJacobiParams::new(vec![
            JacobiPair::new(0.5, 0.0).unwrap(),
            JacobiPair::new(-0.5, 1.5).unwrap(),
        ])
        .unwrap();
        for preset in [CutoffPreset::ProductB, CutoffPreset::SinSpliceC] {
            let s = KernelSpec::new(params.clone(), preset.build(2).unwrap(), 10).unwrap();
            for x in [[0.0, 0.0], [0.9, -0.99], [-1.0, 0.3]] {
                let a = s.l2_row(&x);
                let b = s.l2_row_cubature(&x).unwrap();
                assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn spectral_convolve_examples() {
        let p = TensorJacobiParams::legendre(2);
        let a = CutoffPreset::ProductB.build(2).unwrap();
        let mut f = JacobiExpansion::zeros(p.clone(), vec![4, 4]).unwrap();
        f.set(&[0, 0], Complex64::new(3.0, 0.0));
        f.set(&[3, 2], Complex64::new(1.0, 0.0));
        let g = spectral_convolve(&a, 0, &f);
        assert_eq!(g.nonzero().collect::<Vec<_>>(), vec![(vec![0, 0], Complex64::new(3.0, 0.0))]);
        // max ||nu||_1 = 5; the level-j symbol vanishes once 2^{j-2} > 5.
        for j in 5..8 {
            assert_eq!(spectral_convolve(&a, j, &f).l2_norm(), 0.0);
        }
    }

    #[test]
    fn nikolski_identity_and_exponent() {
        let p = TensorJacobiParams::legendre(2);
        let g = JacobiExpansion::basis_function(p.clone(), &[2, 3]).unwrap();
        let r = nikolski_check(&g, 5, 3.0, 3.0).unwrap();
        assert_eq!(r.exponent, 0.0);
        assert_eq!(r.ratio, 1.0);
        assert_eq!(nikolski_exponent(&p), 4.0);
        let q = TensorJacobiParams::new(vec![
            JacobiPair::new(-0.5, -0.5).unwrap(),
            JacobiPair::new(2.0, 0.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(nikolski_exponent(&q), 3.0);
    }

    #[test]
    fn lip_zero_perturbation_is_excluded() {
        let s = spec(CutoffPreset::ProductB, 1, 8);
        let t = vec![(vec![0.1], vec![0.1], vec![0.5])];
        let p = lip_profile(&s, 4.0, &t);
        assert_eq!(p.excluded, 1);
        assert_eq!(p.c_emp, 0.0);
    }

    #[test]
    fn stratified_pairs_hit_their_bands() {
        let n = 16;
        let pairs = stratified_pairs(3, n, 10, 1);
        assert_eq!(pairs.len(), 6 * 10);
        for (k, (x, y)) in pairs.iter().enumerate() {
            let j = (k / 10) as i32;
            let hi = PI * 2f64.powi(-j);
            let r = rho(x, y);
            assert!(r <= hi + 1e-12);
            if j <= 4 {
                assert!(r >= 0.5 * hi - 1e-12);
            }
        }
    }
}
