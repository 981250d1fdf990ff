//! Finite tensor Jacobi expansions `f = sum_nu f_nu P~_nu` and the separable transforms
//! between coefficients and values on tensor grids.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{gauss_jacobi_cached, jacobi_norm, JacobiBasis, JacobiPair};

/// Per-coordinate Jacobi exponents of the product weight on `[-1, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJacobiParams {
    pairs: Vec<JacobiPair>,
}

impl TensorJacobiParams {
    pub fn new(pairs: Vec<JacobiPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { pairs })
    }

    pub fn uniform(d: usize, pair: JacobiPair) -> Result<Self> {
        Self::new(vec![pair; d])
    }

    pub fn legendre(d: usize) -> Self {
        Self {
            pairs: vec![JacobiPair::LEGENDRE; d.max(1)],
        }
    }

    /// Pairs from parallel lists of exponents; a single value is broadcast to `d` coordinates.
    pub fn from_lists(d: usize, alpha: &[f64], beta: &[f64]) -> Result<Self> {
        let pick = |v: &[f64], i: usize, name: &str| -> Result<f64> {
            match v.len() {
                1 => Ok(v[0]),
                n if n == d => Ok(v[i]),
                n => Err(Error::InvalidParameter(format!(
                    "{name} has {n} entries, expected 1 or {d}"
                ))),
            }
        };
        let pairs = (0..d)
            .map(|i| JacobiPair::new(pick(alpha, i, "alpha")?, pick(beta, i, "beta")?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[JacobiPair] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> &JacobiPair {
        &self.pairs[i]
    }

    /// `w_{alpha,beta}(x)`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.pairs.iter().zip(x).map(|(p, &t)| p.weight(t)).product()
    }

    /// `W(n; x) = prod_i (1 - x_i + n^{-2})^{alpha_i + 1/2} (1 + x_i + n^{-2})^{beta_i + 1/2}`.
    pub fn regularized_weight(&self, n: u64, x: &[f64]) -> f64 {
        self.pairs
            .iter()
            .zip(x)
            .map(|(p, &t)| p.regularized_weight(n, t))
            .product()
    }

    /// Total mass `prod_i h_0^{(alpha_i, beta_i)}` of the weight.
    pub fn total_mass(&self) -> f64 {
        self.pairs.iter().map(|p| jacobi_norm(0, p)).product()
    }

    /// `sum_i max(alpha_i, beta_i)`, the exponent excess in doubling and comparison bounds.
    pub fn max_exponent_sum(&self) -> f64 {
        self.pairs.iter().map(|p| p.alpha().max(p.beta())).sum()
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// `sum_{i < total} f(i)` in parallel over fixed blocks, so the rounding does not depend on
/// scheduling.
pub(crate) fn ordered_sum<F: Fn(usize) -> f64 + Sync>(total: usize, f: F) -> f64 {
    const BLOCK: usize = 1 << 12;
    let parts: Vec<f64> = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| (b * BLOCK..((b + 1) * BLOCK).min(total)).map(&f).sum())
        .collect();
    parts.iter().sum()
}

/// Strides for row-major storage with the last axis fastest.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub(crate) fn unflatten(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for i in (0..shape.len()).rev() {
        out[i] = flat % shape[i];
        flat /= shape[i];
    }
}

/// Applies the row-major `rows x shape[axis]` real matrix along `axis` of a row-major tensor.
pub(crate) fn mode_product(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    mat: &[f64],
    rows: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let cols = shape[axis];
    debug_assert_eq!(mat.len(), rows * cols);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    let mut new_shape = shape.to_vec();
    new_shape[axis] = rows;
    if out.is_empty() {
        return (out, new_shape);
    }
    let work = |(idx, chunk): (usize, &mut [Complex64])| {
        let (o, r) = (idx / rows, idx % rows);
        let mrow = &mat[r * cols..(r + 1) * cols];
        let base = o * cols * inner;
        for (c, &m) in mrow.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let src = &data[base + c * inner..base + (c + 1) * inner];
            for (dst, s) in chunk.iter_mut().zip(src) {
                *dst += s * m;
            }
        }
    };
    if outer * rows * inner * cols > 1 << 14 {
        out.par_chunks_mut(inner).enumerate().for_each(work);
    } else {
        out.chunks_mut(inner).enumerate().for_each(work);
    }
    (out, new_shape)
}

fn transpose(mat: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; mat.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = mat[r * cols + c];
        }
    }
    out
}

/// A dense finite expansion with coefficients for `0 <= nu_i < shape[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiExpansion {
    params: TensorJacobiParams,
    shape: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl JacobiExpansion {
    pub fn zeros(params: TensorJacobiParams, shape: Vec<usize>) -> Result<Self> {
        params.check_dim(shape.len())?;
        let len = shape.iter().product();
        Ok(Self {
            params,
            shape,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn from_fn(
        params: TensorJacobiParams,
        shape: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> Complex64,
    ) -> Result<Self> {
        let mut e = Self::zeros(params, shape)?;
        let mut nu = vec![0; e.shape.len()];
        for flat in 0..e.coeffs.len() {
            unflatten(flat, &e.shape, &mut nu);
            e.coeffs[flat] = f(&nu);
        }
        Ok(e)
    }

    pub fn from_coeffs(
        params: TensorJacobiParams,
        shape: Vec<usize>,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        params.check_dim(shape.len())?;
        let len: usize = shape.iter().product();
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: coeffs.len(),
            });
        }
        Ok(Self {
            params,
            shape,
            coeffs,
        })
    }

    /// The single orthonormal polynomial `P~_nu`.
    pub fn basis_function(params: TensorJacobiParams, nu: &[usize]) -> Result<Self> {
        let shape = nu.iter().map(|k| k + 1).collect();
        let mut e = Self::zeros(params, shape)?;
        e.set(nu, Complex64::new(1.0, 0.0));
        Ok(e)
    }

    pub fn params(&self) -> &TensorJacobiParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn flat_index(&self, nu: &[usize]) -> Option<usize> {
        if nu.len() != self.shape.len() || nu.iter().zip(&self.shape).any(|(k, s)| k >= s) {
            return None;
        }
        Some(nu.iter().zip(strides(&self.shape)).map(|(k, s)| k * s).sum())
    }

    /// `f_nu`, zero outside the stored block.
    pub fn get(&self, nu: &[usize]) -> Complex64 {
        self.flat_index(nu)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Sets `f_nu`, growing the stored block when needed.
    pub fn set(&mut self, nu: &[usize], value: Complex64) {
        if self.flat_index(nu).is_none() {
            let shape: Vec<usize> = self
                .shape
                .iter()
                .zip(nu)
                .map(|(s, k)| (*s).max(k + 1))
                .collect();
            *self = self.resized(&shape);
        }
        let i = self.flat_index(nu).expect("index inside grown block");
        self.coeffs[i] = value;
    }

    /// Copy with stored block `shape`, truncating or zero-padding.
    pub fn resized(&self, shape: &[usize]) -> Self {
        let mut out = Self::zeros(self.params.clone(), shape.to_vec()).expect("same dimension");
        let mut nu = vec![0; shape.len()];
        for (flat, c) in self.coeffs.iter().enumerate() {
            unflatten(flat, &self.shape, &mut nu);
            if let Some(j) = out.flat_index(&nu) {
                out.coeffs[j] = *c;
            }
        }
        out
    }

    /// Iterates `(nu, f_nu)` over nonzero coefficients.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| c.norm_sqr() > 0.0).map(|(flat, c)| {
            let mut nu = vec![0; self.shape.len()];
            unflatten(flat, &self.shape, &mut nu);
            (nu, *c)
        })
    }

    /// Largest `nu_i` over nonzero coefficients, per coordinate (`None` for `f = 0`).
    pub fn max_degrees(&self) -> Option<Vec<usize>> {
        let mut out: Option<Vec<usize>> = None;
        for (nu, _) in self.nonzero() {
            let o = out.get_or_insert_with(|| vec![0; nu.len()]);
            for (m, k) in o.iter_mut().zip(&nu) {
                *m = (*m).max(*k);
            }
        }
        out
    }

    /// `max ||nu||_1` over nonzero coefficients.
    pub fn max_total_degree(&self) -> Option<usize> {
        self.nonzero().map(|(nu, _)| nu.iter().sum()).max()
    }

    /// Smallest `j` with `max_i deg_i < 2^j`.
    pub fn spectrum_level(&self) -> u32 {
        let d = self.max_degrees().map_or(0, |v| v.into_iter().max().unwrap_or(0));
        let mut j = 0;
        while (1usize << j) <= d {
            j += 1;
        }
        j
    }

    /// Coefficient-wise `m(nu) f_nu`.
    pub fn map_modes(&self, mut m: impl FnMut(&[usize], Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        let mut nu = vec![0; self.shape.len()];
        for (flat, c) in out.coeffs.iter_mut().enumerate() {
            unflatten(flat, &self.shape, &mut nu);
            *c = m(&nu, *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_modes(|_, c| c * s)
    }

    /// `self + s * other` on the union of the stored blocks.
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Result<Self> {
        self.params.check_dim(other.dim())?;
        let shape: Vec<usize> = self
            .shape
            .iter()
            .zip(&other.shape)
            .map(|(a, b)| *a.max(b))
            .collect();
        let mut out = self.resized(&shape);
        let o = other.resized(&shape);
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b * s;
        }
        Ok(out)
    }

    /// `||f||_2` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Values on the tensor grid `axes[0] x ... x axes[d-1]`, row-major, last axis fastest.
    pub fn eval_grid(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        assert_eq!(axes.len(), self.dim());
        let mut data = self.coeffs.clone();
        let mut shape = self.shape.clone();
        for (i, pts) in axes.iter().enumerate() {
            let basis = JacobiBasis::new(*self.params.pair(i), self.shape[i]);
            let table = basis.table(pts);
            let (d2, s2) = mode_product(&data, &shape, i, &table, pts.len());
            data = d2;
            shape = s2;
        }
        data
    }

    /// `f(x)` at a single point.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let axes: Vec<Vec<f64>> = x.iter().map(|&t| vec![t]).collect();
        self.eval_grid(&axes)[0]
    }

    /// `f` at scattered points.
    pub fn eval_points(&self, points: &[Vec<f64>]) -> Vec<Complex64> {
        points.par_iter().map(|x| self.eval(x)).collect()
    }

    /// `g_nu = sum_xi v_xi P~_nu(xi)` for values `v` on a tensor grid, for `nu < shape`.
    pub fn from_grid_adjoint(
        params: TensorJacobiParams,
        shape: Vec<usize>,
        axes: &[Vec<f64>],
        values: &[Complex64],
    ) -> Result<Self> {
        params.check_dim(shape.len())?;
        params.check_dim(axes.len())?;
        let mut data = values.to_vec();
        let mut cur: Vec<usize> = axes.iter().map(Vec::len).collect();
        if data.len() != cur.iter().product::<usize>() {
            return Err(Error::DimensionMismatch {
                expected: cur.iter().product(),
                got: data.len(),
            });
        }
        for (i, pts) in axes.iter().enumerate() {
            let basis = JacobiBasis::new(*params.pair(i), shape[i]);
            let table = transpose(&basis.table(pts), pts.len(), shape[i]);
            let (d2, s2) = mode_product(&data, &cur, i, &table, shape[i]);
            data = d2;
            cur = s2;
        }
        Self::from_coeffs(params, shape, data)
    }

    /// `||f||_p` with the library-wide convention: Parseval for `p = 2`, otherwise tensor
    /// Gauss-Jacobi cubature (or, for `p = inf`, a Chebyshev-extrema grid including the
    /// endpoints) at level `spectrum_level + 2`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p == 2.0 {
            return Ok(self.l2_norm());
        }
        self.lp_norm_oversampled(p, LP_OVERSAMPLING)
    }

    /// `||f||_p` by cubature at level `spectrum_level + extra`, even for `p = 2`.
    pub fn lp_norm_oversampled(&self, p: f64, extra: u32) -> Result<f64> {
        let grid = NormGrid::new(&self.params, self.spectrum_level() + extra, p)?;
        let vals = self.trimmed().eval_grid(grid.axes());
        Ok(grid.norm(vals.iter().map(|v| v.norm()), p))
    }

    /// Copy whose stored block is shrunk to the nonzero coefficients.
    pub fn trimmed(&self) -> Self {
        match self.max_degrees() {
            Some(m) => self.resized(&m.iter().map(|k| k + 1).collect::<Vec<_>>()),
            None => self.resized(&vec![1; self.dim()]),
        }
    }
}

/// Levels added above the spectrum level for non-Parseval `L^p` norms.
pub const LP_OVERSAMPLING: u32 = 2;

/// Sampling grid for `L^p(w)` norms at a dyadic level: tensor Gauss-Jacobi with `2^{level+1}`
/// nodes per axis for finite `p`, the Chebyshev extrema `cos(k pi / N)`, `k = 0..=N`, for
/// `p = inf`.
#[derive(Debug, Clone)]
pub struct NormGrid {
    level: u32,
    axes: Vec<Vec<f64>>,
    weights: Option<Vec<Vec<f64>>>,
}

impl NormGrid {
    pub fn new(params: &TensorJacobiParams, level: u32, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be positive (got {p})")));
        }
        let per_axis = 1usize << (level + 1);
        let total = (per_axis as f64).powi(params.dim() as i32);
        if total > GRID_BUDGET as f64 {
            return Err(Error::BudgetExceeded(format!(
                "norm grid with {per_axis}^{} points exceeds {GRID_BUDGET}",
                params.dim()
            )));
        }
        if p.is_infinite() {
            let grid: Vec<f64> = (0..=per_axis)
                .map(|k| (std::f64::consts::PI * k as f64 / per_axis as f64).cos())
                .collect();
            return Ok(Self {
                level,
                axes: vec![grid; params.dim()],
                weights: None,
            });
        }
        let rules = params
            .pairs()
            .iter()
            .map(|pair| gauss_jacobi_cached(per_axis, pair))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            level,
            axes: rules.iter().map(|r| r.nodes.clone()).collect(),
            weights: Some(rules.iter().map(|r| r.weights.clone()).collect()),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The point with row-major index `flat`.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        unflatten(flat, &shape, &mut idx);
        for ((o, a), k) in out.iter_mut().zip(&self.axes).zip(idx) {
            *o = a[k];
        }
    }

    /// All points, row-major.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|flat| {
                let mut x = vec![0.0; self.axes.len()];
                self.point(flat, &mut x);
                x
            })
            .collect()
    }

    /// Cubature weights, row-major; `None` on a sup grid.
    pub fn weights(&self) -> Option<Vec<f64>> {
        let w = self.weights.as_ref()?;
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        Some(
            (0..self.len())
                .map(|flat| {
                    unflatten(flat, &shape, &mut idx);
                    idx.iter().zip(w).map(|(&k, r)| r[k]).product()
                })
                .collect(),
        )
    }

    /// `(sum w |v|^p)^{1/p}`, or `max |v|` on a sup grid, of nonnegative samples `v`.
    pub fn norm(&self, values: impl IntoIterator<Item = f64>, p: f64) -> f64 {
        match self.weights() {
            None => values.into_iter().fold(0.0, f64::max),
            Some(w) => {
                let total: f64 = w.iter().zip(values).map(|(w, v)| w * v.powf(p)).sum();
                total.powf(1.0 / p)
            }
        }
    }
}

/// Largest number of points in a norm grid.
pub const GRID_BUDGET: usize = 1 << 24;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random(params: TensorJacobiParams, deg: usize, seed: u64) -> JacobiExpansion {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = params.dim();
        JacobiExpansion::from_fn(params, vec![deg + 1; d], |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap()
    }

    #[test]
    fn basis_function_has_unit_norms() {
        let p = TensorJacobiParams::legendre(2);
        let f = JacobiExpansion::basis_function(p, &[3, 2]).unwrap();
        assert_eq!(f.lp_norm(2.0).unwrap(), 1.0);
        assert!((f.lp_norm_oversampled(2.0, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_one_lp_norm() {
        for d in 1..=3 {
            let p = TensorJacobiParams::legendre(d);
            let f0 = 2f64.powf(d as f64 / 2.0);
            let mut f = JacobiExpansion::zeros(p, vec![1; d]).unwrap();
            f.set(&vec![0; d], c(f0));
            let v = f.lp_norm(4.0).unwrap();
            assert!((v - 2f64.powf(d as f64 / 4.0)).abs() < 1e-12);
            assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p4_norm_stable_under_more_oversampling() {
        let p = TensorJacobiParams::new(vec![
            JacobiPair::new(0.5, -0.5).unwrap(),
            JacobiPair::new(1.0, 2.0).unwrap(),
        ])
        .unwrap();
        let f = random(p, 8, 9);
        let a = f.lp_norm_oversampled(4.0, 2).unwrap();
        let b = f.lp_norm_oversampled(4.0, 3).unwrap();
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }

    #[test]
    fn grid_eval_matches_pointwise_and_adjoint_is_transpose() {
        let p = TensorJacobiParams::new(vec![
            JacobiPair::new(0.3, 1.1).unwrap(),
            JacobiPair::CHEBYSHEV,
            JacobiPair::LEGENDRE,
        ])
        .unwrap();
        let f = random(p.clone(), 5, 2);
        let axes = vec![vec![-0.9, 0.1, 0.7], vec![0.25, -0.5], vec![0.0, 0.3, 0.6, 1.0]];
        let grid = f.eval_grid(&axes);
        let mut k = 0;
        for &x in &axes[0] {
            for &y in &axes[1] {
                for &z in &axes[2] {
                    assert!((grid[k] - f.eval(&[x, y, z])).norm() < 1e-12);
                    k += 1;
                }
            }
        }
        // <A f, v> = <f, A^T v> for real tables.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v: Vec<Complex64> = (0..grid.len()).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
        let lhs: Complex64 = grid.iter().zip(&v).map(|(a, b)| a * b).sum();
        let g = JacobiExpansion::from_grid_adjoint(p, f.shape().to_vec(), &axes, &v).unwrap();
        let rhs: Complex64 = f.coeffs().iter().zip(g.coeffs()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn set_grows_and_get_defaults_to_zero() {
        let mut f = JacobiExpansion::zeros(TensorJacobiParams::legendre(2), vec![1, 1]).unwrap();
        f.set(&[3, 1], c(2.0));
        assert_eq!(f.shape(), &[4, 2]);
        assert_eq!(f.get(&[3, 1]), c(2.0));
        assert_eq!(f.get(&[9, 9]), c(0.0));
        assert_eq!(f.max_total_degree(), Some(4));
        assert_eq!(f.spectrum_level(), 2);
    }

    #[test]
    fn params_from_lists() {
        let p = TensorJacobiParams::from_lists(3, &[0.5], &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(p.pair(2).beta(), 2.0);
        assert!(TensorJacobiParams::from_lists(3, &[0.5, 1.0], &[0.0]).is_err());
    }
}
