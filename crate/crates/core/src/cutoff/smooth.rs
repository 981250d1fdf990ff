//! Cutoffs with controlled derivative growth, built from an iterated box filter.
//!
//! `phi_m = chi_{delta_0} * ... * chi_{delta_m}` with `chi_delta = 1/(2 delta) 1_{[-delta, delta]}`
//! and `delta_j = 1 / ((j + 1) L(j))`. The filter is applied to the distribution function
//! `G_k(x) = \int_{-inf}^x phi_k`, since one box filter maps `G_k` to its local average
//! `G_{k+1}(x) = (1/(2 delta)) \int_{x-delta}^{x+delta} G_k`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::gauge::{DerivativeGauge, GaugeClaim};
use super::{CutoffType, Univariate};
use crate::error::{Error, Result};

const MAX_GRID_POINTS: usize = 1 << 24;

/// Grid samples of `G = G_m` and `phi_m`, interpolated by cubic Hermite splines.
#[derive(Debug, Clone)]
pub struct SmallDerivativeProfile {
    gauge: DerivativeGauge,
    deltas: Vec<f64>,
    tail_bound: f64,
    pitch: f64,
    half: usize,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

#[inline]
fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, h: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * h * m0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * h * m1
}

struct Grid<'a> {
    half: usize,
    h: f64,
    vals: &'a [f64],
    slopes: &'a [f64],
}

impl Grid<'_> {
    /// Interpolates inside the grid; `left` and `right_slope` describe the affine continuation.
    fn at(&self, x: f64, left: f64, right_value: f64, right_slope: f64) -> f64 {
        let n = self.vals.len() - 1;
        let s = x / self.h + self.half as f64;
        if s <= 0.0 {
            return left;
        }
        if s >= n as f64 {
            return right_value + right_slope * (x - self.h * (n - self.half) as f64);
        }
        let i = (s.floor() as usize).min(n - 1);
        let u = s - i as f64;
        hermite(
            self.vals[i],
            self.slopes[i],
            self.vals[i + 1],
            self.slopes[i + 1],
            self.h,
            u,
        )
    }
}

impl SmallDerivativeProfile {
    pub fn new(gauge: &DerivativeGauge, truncation_m: usize) -> Result<Self> {
        if !(8..=64).contains(&truncation_m) {
            return Err(Error::InvalidParameter(format!(
                "truncation index must lie in [8, 64] (got {truncation_m})"
            )));
        }
        let deltas: Vec<f64> = (0..=truncation_m)
            .map(|j| 1.0 / ((j as f64 + 1.0) * gauge.eval(j as f64)))
            .collect();
        let support: f64 = deltas.iter().sum();
        let tail_bound = (gauge.mass() - gauge.truncated_mass(truncation_m as f64)).max(0.0);

        let target = (deltas[truncation_m] / 8.0).min(1.0 / 8192.0);
        let reach = support + 2.0 * target;
        let half_f = (reach / target).ceil();
        if !(2.0 * half_f + 1.0 <= MAX_GRID_POINTS as f64) {
            return Err(Error::GridResolution(format!(
                "pitch {target:e} over [-{reach}, {reach}] needs more than {MAX_GRID_POINTS} points"
            )));
        }
        let half = half_f as usize;
        let n = 2 * half;
        let h = reach / half as f64;
        let x = |i: usize| (i as f64 - half as f64) * h;

        // G_1 in closed form from G_0 = clamp((x + d0) / (2 d0)).
        let (d0, d1) = (deltas[0], deltas[1]);
        let g0 = |x: f64| ((x + d0) / (2.0 * d0)).clamp(0.0, 1.0);
        let h0 = |x: f64| {
            if x <= -d0 {
                0.0
            } else if x <= d0 {
                (x + d0) * (x + d0) / (4.0 * d0)
            } else {
                x
            }
        };
        let mut cdf: Vec<f64> = (0..=n)
            .map(|i| (h0(x(i) + d1) - h0(x(i) - d1)) / (2.0 * d1))
            .collect();
        let mut density: Vec<f64> = (0..=n)
            .map(|i| (g0(x(i) + d1) - g0(x(i) - d1)) / (2.0 * d1))
            .collect();

        let mut anti = vec![0.0; n + 1];
        let mut next_cdf = vec![0.0; n + 1];
        let mut next_density = vec![0.0; n + 1];
        for &delta in &deltas[2..] {
            // Antiderivative by the endpoint-corrected trapezoid rule.
            anti[0] = 0.0;
            for i in 0..n {
                anti[i + 1] = anti[i]
                    + 0.5 * h * (cdf[i] + cdf[i + 1])
                    + h * h / 12.0 * (density[i] - density[i + 1]);
            }
            let last_anti = anti[n];
            let anti_grid = Grid {
                half,
                h,
                vals: &anti,
                slopes: &cdf,
            };
            let cdf_grid = Grid {
                half,
                h,
                vals: &cdf,
                slopes: &density,
            };
            for i in 0..=n {
                let (lo, hi) = (x(i) - delta, x(i) + delta);
                next_cdf[i] = (anti_grid.at(hi, 0.0, last_anti, 1.0)
                    - anti_grid.at(lo, 0.0, last_anti, 1.0))
                    / (2.0 * delta);
                next_density[i] =
                    (cdf_grid.at(hi, 0.0, 1.0, 0.0) - cdf_grid.at(lo, 0.0, 1.0, 0.0)) / (2.0 * delta);
            }
            std::mem::swap(&mut cdf, &mut next_cdf);
            std::mem::swap(&mut density, &mut next_density);
        }

        // Impose G(-x) = 1 - G(x) and phi(-x) = phi(x) exactly on the symmetric grid.
        for i in 0..half {
            let j = n - i;
            let g = 0.5 * (cdf[i] + 1.0 - cdf[j]);
            cdf[i] = g;
            cdf[j] = 1.0 - g;
            let p = 0.5 * (density[i] + density[j]);
            density[i] = p;
            density[j] = p;
        }
        cdf[half] = 0.5;

        Ok(Self {
            gauge: gauge.clone(),
            deltas,
            tail_bound,
            pitch: h,
            half,
            cdf,
            density,
        })
    }

    pub fn gauge(&self) -> &DerivativeGauge {
        &self.gauge
    }

    pub fn truncation_m(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Upper bound for the omitted widths `\sum_{j > m} delta_j`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Half-width of the support of `phi_m`.
    pub fn support(&self) -> f64 {
        self.deltas.iter().sum()
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// `G_m(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x > 0.0 {
            return 1.0 - self.cdf(-x);
        }
        Grid {
            half: self.half,
            h: self.pitch,
            vals: &self.cdf,
            slopes: &self.density,
        }
        .at(x, 0.0, 1.0, 0.0)
    }

    /// `phi_m(x)`, linearly interpolated.
    pub fn density(&self, x: f64) -> f64 {
        let n = self.density.len() - 1;
        let s = x.abs() / self.pitch + self.half as f64;
        if s >= n as f64 {
            return 0.0;
        }
        let i = s.floor() as usize;
        let u = s - i as f64;
        (1.0 - u) * self.density[i] + u * self.density[i + 1]
    }

    /// `g(t) = (pi/2) \int_{-inf}^t psi` with `psi(t) = 2M phi(2Mt)`; rises from 0 on
    /// `(-inf, -1/2]` to `pi/2` on `[1/2, inf)` and satisfies `g(t) + g(-t) = pi/2`.
    pub fn g(&self, t: f64) -> f64 {
        FRAC_PI_2 * self.cdf(2.0 * self.gauge.mass() * t)
    }

    fn type_a(&self, t: f64) -> f64 {
        self.cdf(2.0 * self.gauge.mass() * (1.5 - t))
    }

    fn type_c(&self, t: f64) -> f64 {
        if t <= 0.5 || t >= 2.0 {
            0.0
        } else if t <= 1.0 {
            self.g(2.0 * t - 1.5).sin()
        } else {
            self.g(1.5 - t).sin()
        }
    }

    /// The univariate cutoff of the given type, carrying the matching derivative class.
    pub fn univariate(self: &Arc<Self>, type_tag: CutoffType) -> Result<Univariate> {
        let m = self.gauge.mass();
        let p = Arc::clone(self);
        let (f, gamma, scale): (Arc<dyn Fn(f64) -> f64 + Send + Sync>, f64, f64) = match type_tag {
            CutoffType::A => (Arc::new(move |t| p.type_a(t)), 1.0, 2.0 * m),
            CutoffType::B => (
                Arc::new(move |t| p.type_a(t) - p.type_a(2.0 * t)),
                2.0,
                4.0 * m,
            ),
            CutoffType::C => (Arc::new(move |t| p.type_c(t)), 8.0, 8.0 * m),
            CutoffType::None => {
                return Err(Error::TypeMismatch(
                    "small-derivative cutoffs are of type (a), (b) or (c)".into(),
                ))
            }
        };
        let label = format!(
            "small-derivative-{}(m={})",
            match type_tag {
                CutoffType::A => "a",
                CutoffType::B => "b",
                _ => "c",
            },
            self.truncation_m()
        );
        Ok(Univariate::new(label, type_tag, f).with_gauge(GaugeClaim {
            gauge: self.gauge.clone(),
            gamma,
            scale,
        }))
    }
}

/// Builds the profile for `gauge` and returns the univariate cutoff of the given type.
pub fn make_small_derivative_univariate(
    gauge: &DerivativeGauge,
    type_tag: CutoffType,
    truncation_m: usize,
) -> Result<Univariate> {
    Arc::new(SmallDerivativeProfile::new(gauge, truncation_m)?).univariate(type_tag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(m: usize) -> Arc<SmallDerivativeProfile> {
        Arc::new(SmallDerivativeProfile::new(&DerivativeGauge::power(1.0).unwrap(), m).unwrap())
    }

    /// Distribution function of a sum of independent uniforms on `[-d_k, d_k]`, by
    /// inclusion-exclusion over subsets.
    fn uniform_sum_cdf(deltas: &[f64], x: f64) -> f64 {
        let n = deltas.len();
        let widths: Vec<f64> = deltas.iter().map(|d| 2.0 * d).collect();
        let y = x + deltas.iter().sum::<f64>();
        let norm: f64 = widths.iter().product::<f64>() * (1..=n).map(|k| k as f64).product::<f64>();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let shift: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| widths[k]).sum();
            let r = y - shift;
            if r > 0.0 {
                let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * r.powi(n as i32);
            }
        }
        total / norm
    }

    #[test]
    fn endpoint_examples() {
        let a = profile(32).univariate(CutoffType::A).unwrap();
        assert_eq!(a.eval(0.0), 1.0);
        assert_eq!(a.eval(2.0 + 1e-6), 0.0);
        let c = profile(32).univariate(CutoffType::C).unwrap();
        let t: f64 = 1.5;
        let s = c.eval(t).powi(2) + c.eval(t / 2.0).powi(2) + c.eval(t / 4.0).powi(2);
        assert!((s - 1.0).abs() < 2e-6);
    }

    #[test]
    fn g_is_a_monotone_transition() {
        let p = profile(32);
        assert!(p.g(-1.0).abs() < 1e-8);
        assert!((p.g(1.0) - FRAC_PI_2).abs() < 1e-8);
        let mut prev = 0.0;
        for i in 0..=4000 {
            let v = p.g(-1.0 + i as f64 / 2000.0);
            assert!(v >= prev - 1e-12, "g decreases at step {i} by {}", prev - v);
            prev = v;
        }
        for i in 0..200 {
            let t = i as f64 / 400.0;
            assert!((p.g(t) + p.g(-t) - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_exact_uniform_sum_distribution() {
        let p = profile(8);
        let support = p.support();
        // Only x <= 0: the alternating sum cancels badly near the upper end.
        for i in 0..=40 {
            let x = -support * i as f64 / 40.0;
            let exact = uniform_sum_cdf(p.deltas(), x);
            assert!((p.cdf(x) - exact).abs() < 1e-8, "x = {x}: {} vs {exact}", p.cdf(x));
        }
    }

    #[test]
    fn density_has_unit_mass_and_bounded_height() {
        let p = profile(16);
        let s = p.support();
        let n = 20000;
        let h = 2.0 * s / n as f64;
        let mass: f64 = (0..n).map(|i| p.density(-s + (i as f64 + 0.5) * h) * h).sum();
        assert!((mass - 1.0).abs() < 1e-5);
        assert!(p.density(0.0) <= 0.5 + 1e-12);
    }

    #[test]
    fn reports_truncation_tail_and_rejects_bad_m() {
        let p = profile(32);
        let exact_tail: f64 = (33..200000).map(|j| 1.0 / ((j as f64 + 1.0) * (j as f64 + 1.0))).sum();
        assert!(p.tail_bound() >= exact_tail);
        assert!(p.support() + p.tail_bound() <= p.gauge().mass() + 1e-12);
        assert!(SmallDerivativeProfile::new(&DerivativeGauge::power(1.0).unwrap(), 7).is_err());
        assert!(SmallDerivativeProfile::new(&DerivativeGauge::power(1.0).unwrap(), 65).is_err());
    }

    #[test]
    fn type_b_vanishes_off_its_band() {
        let b = profile(24).univariate(CutoffType::B).unwrap();
        assert_eq!(b.eval(0.4), 0.0);
        assert_eq!(b.eval(2.5), 0.0);
        assert!(b.eval(1.0) > 0.5);
        assert_eq!(b.gauge().unwrap().gamma, 2.0);
    }

    #[test]
    fn iterated_log_profile_builds() {
        let g = DerivativeGauge::iterated_log(1, 0.5).unwrap();
        let a = make_small_derivative_univariate(&g, CutoffType::A, 16).unwrap();
        assert_eq!(a.eval(0.5), 1.0);
        assert_eq!(a.eval(2.0), 0.0);
    }
}
