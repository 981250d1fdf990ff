//! Numerical admissibility diagnostics. Finite grids cannot certify smoothness, so each
//! check reports its worst sample rather than a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CutoffFunction, CutoffKind, CutoffType};

const SEED: u64 = 0x5eed_c0ff;
const COVERING_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub worst_value: f64,
    pub worst_location: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub passed: bool,
    /// Smallest over the sphere sample of the best window infimum.
    pub min_inf: f64,
    pub worst_location: Vec<f64>,
    /// Range over the sphere sample of the window start that maximizes the infimum.
    pub gamma_min: f64,
    pub gamma_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub label: String,
    pub checks: Vec<PropertyCheck>,
    pub covering: Option<CoveringReport>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.covering.as_ref().is_none_or(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivativeEstimate {
    pub k: u32,
    /// `max_j sup |D_j^k A| / k!` over the sample grid.
    pub estimate: f64,
    pub envelope: Option<f64>,
}

/// Grid points per axis used by the dense checks.
pub(crate) fn grid_points_per_axis(d: usize) -> usize {
    match d {
        1 => 1 << 12,
        2 => 1 << 7,
        3 => 1 << 5,
        _ => 1 << 3,
    }
}

fn tensor_grid(d: usize, n: usize, hi: f64) -> Vec<Vec<f64>> {
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let k = idx % n;
                    idx /= n;
                    hi * k as f64 / (n - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Folds `(value, location)` pairs into a check that passes when every value is `<= tol`.
fn summarize(name: &str, tol: f64, items: Vec<(f64, Vec<f64>)>) -> PropertyCheck {
    let samples = items.len();
    let (worst_value, worst_location) = items
        .into_iter()
        .fold((0.0, Vec::new()), |acc, (v, loc)| {
            if v > acc.0 || (v.is_nan() && !acc.0.is_nan()) {
                (v, loc)
            } else {
                acc
            }
        });
    PropertyCheck {
        name: name.to_string(),
        passed: worst_value <= tol,
        worst_value,
        worst_location,
        samples,
    }
}

fn l1(t: &[f64]) -> f64 {
    t.iter().map(|x| x.abs()).sum()
}

fn sup(t: &[f64]) -> f64 {
    t.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn partition_check(a: &CutoffFunction, rng: &mut ChaCha8Rng, samples: usize) -> PropertyCheck {
    let d = a.dim();
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let r: f64 = rng.gen_range(1.0..8.0);
            let k = rng.gen_range(0..d);
            let mut t: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..r)).collect();
            t[k] = r;
            t
        })
        .collect();
    let items = points
        .into_par_iter()
        .map(|t| {
            let levels = (sup(&t).log2().ceil() as i32) + 2;
            let s: f64 = (0..=levels)
                .map(|j| {
                    let sc = 2f64.powi(-j);
                    let p: Vec<f64> = t.iter().map(|x| x * sc).collect();
                    a.eval(&p).norm_sqr()
                })
                .sum();
            ((s - 1.0).abs(), t)
        })
        .collect();
    summarize("square-partition", 1e-12, items)
}

fn second_kind_check(a: &CutoffFunction, rng: &mut ChaCha8Rng, samples: usize) -> PropertyCheck {
    let d = a.dim();
    let sb = a.support_bound();
    let points: Vec<(Vec<f64>, usize)> = (0..samples)
        .map(|_| {
            let mut t: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..sb + 0.25)).collect();
            let k = rng.gen_range(0..d);
            t[k] = 0.0;
            let m = sup(&t);
            t[k] = rng.gen_range(0.0..=0.5) * m;
            (t, k)
        })
        .collect();
    let items = points
        .into_par_iter()
        .map(|(t, k)| {
            let mut p = t.clone();
            p[k] = 0.0;
            ((a.eval(&t) - a.eval(&p)).norm(), t)
        })
        .collect();
    summarize("second-kind", 1e-12, items)
}

/// One-sided differences of orders 1..=4 away from each coordinate plane.
fn first_kind_check(a: &CutoffFunction) -> PropertyCheck {
    let d = a.dim();
    let c_star = 1.0 / (4.0 * d as f64 - 2.0);
    let h = c_star / 8.0;
    let tol = h.powi(4);
    let n = grid_points_per_axis(d.max(2) - 1).min(256);
    let base = if d == 1 {
        vec![Vec::new()]
    } else {
        tensor_grid(d - 1, n, a.support_bound() + 0.25)
    };
    let binom = [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 3.0, 1.0, 0.0], [1.0, 4.0, 6.0, 4.0, 1.0]];
    let items = (0..d)
        .flat_map(|k| base.iter().map(move |rest| (k, rest)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, rest)| {
            let mut tau: Vec<f64> = rest.clone();
            tau.insert(k, 0.0);
            let vals: Vec<_> = (0..=4)
                .map(|i| {
                    let mut p = tau.clone();
                    p[k] = i as f64 * h;
                    a.eval(&p)
                })
                .collect();
            let worst = (1..=4)
                .map(|m| {
                    (0..=m)
                        .map(|i| {
                            let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
                            vals[i] * (sign * binom[m][i])
                        })
                        .sum::<num_complex::Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            (worst, tau)
        })
        .collect();
    summarize("first-kind", tol, items)
}

/// Runs every invariant the cutoff's metadata claims, plus both boundary-condition checks
/// in dimension `>= 2` and the dyadic covering check for types (b) and (c).
pub fn verify_admissibility(a: &CutoffFunction) -> AdmissibilityReport {
    let d = a.dim();
    let sb = a.support_bound();
    let n = grid_points_per_axis(d);
    let grid = tensor_grid(d, n, sb + 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = Vec::new();

    let outside: Vec<(f64, Vec<f64>)> = grid
        .par_iter()
        .filter(|t| sup(t) > sb)
        .map(|t| (a.eval(t).norm(), t.clone()))
        .collect();
    checks.push(summarize("support", 1e-14, outside));

    match a.type_tag() {
        CutoffType::A => {
            let items = grid
                .par_iter()
                .filter(|t| l1(t) <= 1.0)
                .map(|t| ((a.eval(t) - 1.0).norm(), t.clone()))
                .collect();
            checks.push(summarize("one-on-simplex", 1e-12, items));
        }
        CutoffType::B | CutoffType::C => {
            let items = grid
                .par_iter()
                .filter(|t| l1(t) <= 0.5)
                .map(|t| (a.eval(t).norm(), t.clone()))
                .collect();
            checks.push(summarize("zero-on-half-simplex", 1e-14, items));
        }
        CutoffType::None => {}
    }
    if a.type_tag() == CutoffType::C {
        checks.push(partition_check(a, &mut rng, 2000));
    }
    if d >= 2 {
        checks.push(second_kind_check(a, &mut rng, 4000));
    }
    if d >= 2 || a.kind() != CutoffKind::Unclassified {
        checks.push(first_kind_check(a));
    }
    let covering = matches!(a.type_tag(), CutoffType::B | CutoffType::C)
        .then(|| verify_dyadic_covering(a));
    AdmissibilityReport {
        label: a.label().to_string(),
        checks,
        covering,
    }
}

/// For each `t` on the face sample of `{||t||_inf = 1}`, searches `gamma in (0, 1]` with
/// `inf_{lambda in [gamma, 2 gamma]} |A(lambda t)| >= 1e-3` on a logarithmic `lambda` grid.
pub fn verify_dyadic_covering(a: &CutoffFunction) -> CoveringReport {
    let d = a.dim();
    let sphere: Vec<Vec<f64>> = if d == 1 {
        vec![vec![1.0]]
    } else {
        let n = grid_points_per_axis(d);
        let faces = tensor_grid(d - 1, n, 1.0);
        (0..d)
            .flat_map(|k| {
                faces.iter().map(move |rest| {
                    let mut t = rest.clone();
                    t.insert(k, 1.0);
                    t
                })
            })
            .collect()
    };
    const STEPS: usize = 32;
    let lambdas: Vec<f64> = (0..=5 * STEPS)
        .map(|i| 2f64.powf(-4.0 + i as f64 / STEPS as f64))
        .collect();
    let per_point: Vec<(f64, f64, Vec<f64>)> = sphere
        .into_par_iter()
        .map(|t| {
            let vals: Vec<f64> = lambdas
                .iter()
                .map(|&l| {
                    let p: Vec<f64> = t.iter().map(|x| x * l).collect();
                    a.eval(&p).norm()
                })
                .collect();
            let mut best = (f64::NEG_INFINITY, 0.0);
            for start in 0..=4 * STEPS {
                let inf = vals[start..=start + STEPS]
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                if inf > best.0 {
                    best = (inf, lambdas[start]);
                }
            }
            (best.0, best.1, t)
        })
        .collect();
    let mut report = CoveringReport {
        passed: true,
        min_inf: f64::INFINITY,
        worst_location: Vec::new(),
        gamma_min: f64::INFINITY,
        gamma_max: 0.0,
    };
    for (inf, gamma, t) in per_point {
        if inf < report.min_inf {
            report.min_inf = inf;
            report.worst_location = t;
        }
        report.gamma_min = report.gamma_min.min(gamma);
        report.gamma_max = report.gamma_max.max(gamma);
    }
    report.passed = report.min_inf >= COVERING_FLOOR;
    report
}

fn fd_step(k: u32) -> f64 {
    [1e-4, 2e-3, 5e-3, 1e-2, 2e-2, 3e-2][(k - 1) as usize]
}

/// Central finite-difference estimates of `max_j ||D_j^k A||_inf / k!` for `k = 1..=k_max`
/// (`k_max <= 6`), next to the claimed envelope when a gauge claim is present.
pub fn gauge_derivatives(a: &CutoffFunction, k_max: u32) -> Vec<DerivativeEstimate> {
    let k_max = k_max.min(6);
    let d = a.dim();
    let grid = tensor_grid(d, grid_points_per_axis(d), a.support_bound() + 0.5);
    (1..=k_max)
        .map(|k| {
            let h = fd_step(k);
            let coeffs: Vec<f64> = (0..=k)
                .map(|i| {
                    let b = (1..=i).fold(1.0, |acc, m| acc * (k - m + 1) as f64 / m as f64);
                    if i % 2 == 0 {
                        b
                    } else {
                        -b
                    }
                })
                .collect();
            let fact: f64 = (1..=k).map(f64::from).product();
            let sup = grid
                .par_iter()
                .map(|t| {
                    let mut worst = 0.0f64;
                    for j in 0..d {
                        let mut p = t.clone();
                        let mut acc = num_complex::Complex64::new(0.0, 0.0);
                        for (i, c) in coeffs.iter().enumerate() {
                            p[j] = t[j] + (k as f64 / 2.0 - i as f64) * h;
                            acc += a.eval(&p) * *c;
                        }
                        worst = worst.max(acc.norm() / h.powi(k as i32));
                    }
                    worst
                })
                .reduce(|| 0.0, f64::max);
            DerivativeEstimate {
                k,
                estimate: sup / fact,
                envelope: a.gauge().map(|g| g.envelope(k)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{
        make_multivariate, make_small_derivative_univariate, make_univariate,
        radial_negative_control, Construction, DerivativeGauge,
    };
    use std::sync::Arc;

    #[test]
    fn product_a_passes_everything() {
        let a = make_multivariate(
            Construction::Product,
            2,
            CutoffType::A,
            &[make_univariate(CutoffType::A).unwrap()],
        )
        .unwrap();
        let r = verify_admissibility(&a);
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn radial_impostor_fails_second_kind() {
        let r = radial_negative_control(&make_univariate(CutoffType::B).unwrap(), 2).unwrap();
        let rep = verify_admissibility(&r);
        assert!(!rep.check("second-kind").unwrap().passed);
        assert!(!rep.check("first-kind").unwrap().passed);
        assert!(!rep.passed());
    }

    #[test]
    fn difference_covering_gamma_range() {
        let b = make_multivariate(
            Construction::Difference,
            2,
            CutoffType::B,
            &[make_univariate(CutoffType::A).unwrap()],
        )
        .unwrap();
        let rep = verify_admissibility(&b);
        assert!(rep.passed(), "{rep:#?}");
        let cov = rep.covering.unwrap();
        assert!(cov.gamma_min >= 0.4 && cov.gamma_max <= 1.0, "{cov:?}");
    }

    #[test]
    fn derivative_estimates() {
        let a = make_univariate(CutoffType::A).unwrap().to_cutoff();
        let est = gauge_derivatives(&a, 1);
        assert!(est[0].estimate > 0.0 && est[0].estimate <= 4.0, "{est:?}");

        let g = DerivativeGauge::power(1.0).unwrap();
        let s = make_small_derivative_univariate(&g, CutoffType::A, 32).unwrap().to_cutoff();
        for e in gauge_derivatives(&s, 4) {
            let env = e.envelope.unwrap();
            assert!(e.estimate <= env, "k = {}: {} > {env}", e.k, e.estimate);
        }

        let zero = CutoffFunction::custom("zero", 2, Arc::new(|_: &[f64]| num_complex::Complex64::new(0.0, 0.0)));
        assert!(gauge_derivatives(&zero, 3).iter().all(|e| e.estimate == 0.0));
    }

    #[test]
    fn univariate_types_pass() {
        for tag in [CutoffType::A, CutoffType::B, CutoffType::C] {
            let rep = verify_admissibility(&make_univariate(tag).unwrap().to_cutoff());
            assert!(rep.passed(), "{rep:#?}");
        }
    }
}
