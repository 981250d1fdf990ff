use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{gauss_jacobi, JacobiPair, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GaugeFamily {
    /// `L(t) = (1 + t)^eps`.
    Power { eps: f64 },
    /// Products of iterated logarithms, the last one raised to `1 + eps`.
    IteratedLog { ell: u32, eps: f64 },
    Custom,
}

/// A growth gauge `L: [0, inf) -> [1, inf)` with `L(0) = 1` and its mass constant
/// `M = 1 + \int_0^inf dt / ((t + 1) L(t))`.
#[derive(Clone)]
pub struct DerivativeGauge {
    family: GaugeFamily,
    l: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    mass: f64,
}

/// Upper end of the numerically integrated part of the mass.
pub const MASS_TRUNCATION: f64 = 1e6;

fn legendre16() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_jacobi(16, &JacobiPair::LEGENDRE).expect("16-point Legendre rule"))
}

/// `\int_0^T dt / ((t + 1) L(t))`, integrated in `s = ln(1 + t)` where the integrand is smooth.
fn integrate_mass(l: &dyn Fn(f64) -> f64, t_max: f64) -> f64 {
    let rule = legendre16();
    let s_max = t_max.ln_1p();
    let panels = ((s_max * 32.0).ceil() as usize).max(1);
    let h = s_max / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = mid + 0.5 * h * x;
            total += 0.5 * h * w / l(s.exp_m1());
        }
    }
    total
}

fn exp_iter(k: u32) -> f64 {
    (0..k).fold(1.0, |x, _| x.exp())
}

fn ln_iter(k: u32, x: f64) -> f64 {
    (0..k).fold(x, |x, _| x.ln())
}

impl DerivativeGauge {
    pub fn power(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "power gauge needs eps > 0 (got {eps})"
            )));
        }
        Ok(Self {
            family: GaugeFamily::Power { eps },
            l: Arc::new(move |t: f64| (1.0 + t).powf(eps)),
            mass: 1.0 + 1.0 / eps,
        })
    }

    /// The iterated-logarithm gauge for `1 <= ell <= 3` and `0 < eps <= 1`.
    ///
    /// The mass is the integral up to [`MASS_TRUNCATION`] plus an upper bound for the tail
    /// obtained from the substitution `u = ln^{(ell)}(exp^{(ell)}(1) + t)`.
    pub fn iterated_log(ell: u32, eps: f64) -> Result<Self> {
        if !(1..=3).contains(&ell) {
            return Err(Error::InvalidParameter(format!(
                "iterated-log gauge supports 1 <= ell <= 3 (got {ell})"
            )));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "iterated-log gauge needs 0 < eps <= 1 (got {eps})"
            )));
        }
        let l = move |t: f64| {
            let mut v = 1.0;
            for k in 1..ell {
                v *= ln_iter(k, exp_iter(k) + t);
            }
            v * ln_iter(ell, exp_iter(ell) + t).powf(1.0 + eps)
        };
        let head = integrate_mass(&l, MASS_TRUNCATION);
        let t = MASS_TRUNCATION;
        let e_ell = exp_iter(ell);
        let mut factor = (e_ell + t) / (t + 1.0);
        for k in 1..ell {
            factor *= ln_iter(k, e_ell + t) / ln_iter(k, exp_iter(k) + t);
        }
        let u = ln_iter(ell, e_ell + t);
        let tail = factor * u.powf(-eps) / eps;
        Ok(Self {
            family: GaugeFamily::IteratedLog { ell, eps },
            l: Arc::new(l),
            mass: 1.0 + head + tail,
        })
    }

    /// A user gauge with an explicitly supplied mass constant.
    pub fn custom(l: Arc<dyn Fn(f64) -> f64 + Send + Sync>, mass: f64) -> Result<Self> {
        if (l(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "gauge must satisfy L(0) = 1 (got {})",
                l(0.0)
            )));
        }
        let mut prev = 1.0;
        for i in 1..=4096 {
            let t = (i as f64 / 4096.0 * MASS_TRUNCATION.ln_1p()).exp_m1();
            let v = l(t);
            if !(v >= prev) {
                return Err(Error::InvalidParameter(format!(
                    "gauge is not nondecreasing near t = {t}"
                )));
            }
            prev = v;
        }
        let truncated = 1.0 + integrate_mass(l.as_ref(), MASS_TRUNCATION);
        if mass < truncated {
            return Err(Error::InvalidParameter(format!(
                "mass {mass} is below the truncated integral {truncated}"
            )));
        }
        Ok(Self {
            family: GaugeFamily::Custom,
            l,
            mass,
        })
    }

    pub fn family(&self) -> GaugeFamily {
        self.family
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.l)(t)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `1 + \int_0^T dt / ((t + 1) L(t))`.
    pub fn truncated_mass(&self, t_max: f64) -> f64 {
        1.0 + integrate_mass(self.l.as_ref(), t_max)
    }
}

impl fmt::Debug for DerivativeGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DerivativeGauge")
            .field("family", &self.family)
            .field("mass", &self.mass)
            .finish()
    }
}

/// Membership claim in `S(d, L; gamma, scale)`: `||D_j^k A||_inf / k! <= gamma (scale L(k-1))^k`.
#[derive(Clone, Debug)]
pub struct GaugeClaim {
    pub gauge: DerivativeGauge,
    pub gamma: f64,
    pub scale: f64,
}

impl GaugeClaim {
    pub fn envelope(&self, k: u32) -> f64 {
        if k == 0 {
            return self.gamma;
        }
        self.gamma * (self.scale * self.gauge.eval((k - 1) as f64)).powi(k as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_mass_matches_closed_form() {
        for eps in [0.25, 0.5, 1.0, 2.0] {
            let g = DerivativeGauge::power(eps).unwrap();
            let truncated = g.truncated_mass(MASS_TRUNCATION);
            let tail = (1.0 + MASS_TRUNCATION).powf(-eps) / eps;
            assert!((truncated + tail - g.mass()).abs() < 1e-9, "eps = {eps}");
        }
        assert_eq!(DerivativeGauge::power(1.0).unwrap().mass(), 2.0);
        assert!(DerivativeGauge::power(0.0).is_err());
    }

    #[test]
    fn iterated_log_gauge_is_normalized_and_monotone() {
        for ell in 1..=3 {
            for eps in [0.5, 1.0] {
                let g = DerivativeGauge::iterated_log(ell, eps).unwrap();
                assert!((g.eval(0.0) - 1.0).abs() < 1e-12);
                let mut prev = 1.0;
                for i in 1..2000 {
                    let v = g.eval(i as f64 * 0.5);
                    assert!(v >= prev);
                    prev = v;
                }
                let truncated = g.truncated_mass(MASS_TRUNCATION);
                assert!(g.mass() >= truncated);
                assert!(g.mass().is_finite());
            }
        }
        assert!(DerivativeGauge::iterated_log(4, 0.5).is_err());
    }

    #[test]
    fn iterated_log_mass_within_tolerance_of_truncation() {
        let g = DerivativeGauge::iterated_log(1, 1.0).unwrap();
        let truncated = g.truncated_mass(MASS_TRUNCATION);
        assert!(g.mass() <= truncated * 1.05, "{} vs {truncated}", g.mass());
    }

    #[test]
    fn custom_gauge_validation() {
        let l: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|t: f64| (1.0 + t).powi(2));
        assert!(DerivativeGauge::custom(l.clone(), 1.5).is_ok());
        assert!(DerivativeGauge::custom(l, 1.1).is_err());
        let bad: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|t: f64| 2.0 + t);
        assert!(DerivativeGauge::custom(bad, 10.0).is_err());
    }

    #[test]
    fn envelope_values() {
        let claim = GaugeClaim {
            gauge: DerivativeGauge::power(1.0).unwrap(),
            gamma: 1.0,
            scale: 4.0,
        };
        assert_eq!(claim.envelope(1), 4.0);
        assert_eq!(claim.envelope(2), 64.0);
    }
}
