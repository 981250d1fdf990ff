//! The property-based acceptance checks, one function per criterion.
//!
//! Each check runs at desk scale, measures its own wall time and reports pass or fail with
//! the numbers that decided it.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{kendall_tau, singular_x1, ApproxRun};
use crate::cubature::{build_level, exactness_error, maximal_sweep};
use crate::cutoff::{verify_dyadic_covering, CutoffPreset};
use crate::error::Result;
use crate::expansion::TensorJacobiParams;
use crate::frame::{build_frame, needlet_norm, roundtrip_report, Family, FrameConfig};
use crate::kernel::{
    decay_profile, reproduction_error, stratified_pairs, subexponential_search, KernelSpec,
};
use crate::spaces::{
    equivalence_rows, f_norm_kernel, multiplier_decay_table, multiplier_sweep, random_decaying,
    ratio_bands, Multiplier, SpaceParams, STABILITY_TOLERANCE,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed_s: f64,
    pub limit_s: f64,
    pub detail: String,
}

impl CriterionReport {
    /// `[PASS] 3 localization stability (12.1 s / 300 s): ...`
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1} s / {:.0} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed_s,
            self.limit_s,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "quadrature exactness"),
    (2, "kernel reproduction"),
    (3, "localization stability"),
    (4, "sub-exponential regime"),
    (5, "tight frame"),
    (6, "needlet norm law"),
    (7, "norm equivalence"),
    (8, "cutoff independence"),
    (9, "Jackson rate"),
    (10, "maximal-operator equivalence"),
    (11, "multiplier boundedness"),
];

const LIMITS: [f64; 11] = [10.0, 60.0, 300.0, 600.0, 60.0, 120.0, 300.0, 300.0, 600.0, 120.0, 300.0];

/// Runs criterion `id` (1..=11).
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionReport> {
    let start = Instant::now();
    let (ok, detail) = match id {
        1 => quadrature(seed)?,
        2 => reproduction(seed)?,
        3 => localization(seed)?,
        4 => subexponential(seed)?,
        5 => tight_frame(seed)?,
        6 => needlet_norms()?,
        7 => norm_equivalence(seed)?,
        8 => cutoff_independence(seed)?,
        9 => jackson()?,
        10 => maximal(seed)?,
        11 => multipliers(seed)?,
        _ => {
            return Err(crate::Error::InvalidParameter(format!(
                "no acceptance criterion {id} (1..=11)"
            )))
        }
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    let limit_s = LIMITS[id as usize - 1];
    Ok(CriterionReport {
        id,
        title: CRITERIA[id as usize - 1].1,
        passed: ok && elapsed_s < limit_s,
        elapsed_s,
        limit_s,
        detail,
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

fn mixed_params(d: usize) -> TensorJacobiParams {
    TensorJacobiParams::from_lists(d, &[0.5, -0.5, 1.5][..d], &[-0.5, 2.0, 0.25][..d]).expect("valid exponents")
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn quadrature(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for params in [TensorJacobiParams::legendre(2), mixed_params(2)] {
        for j in 0..=4 {
            let level = build_level(j, &params)?;
            for _ in 0..4 {
                worst = worst.max(exactness_error(&level, &mut rng));
            }
        }
    }
    Ok((worst <= 1e-11, format!("max relative error {worst:.2e} (tol 1e-11)")))
}

fn reproduction(seed: u64) -> Result<(bool, String)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_abs = 0.0f64;
    let mut worst_rel = 0.0f64;
    let mut scale = 0.0f64;
    for d in 1..=3usize {
        for params in [TensorJacobiParams::legendre(d), mixed_params(d)] {
            let cutoff = CutoffPreset::ProductA.build(d)?;
            for n in [4usize, 8, 16, 32] {
                let spec = KernelSpec::new(params.clone(), cutoff.clone(), n)?;
                let mut xs: Vec<Vec<f64>> = vec![vec![1.0; d], vec![-1.0; d]];
                xs.extend((0..2).map(|_| (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()));
                for x in &xs {
                    let e = reproduction_error(&spec, x)?;
                    worst_abs = worst_abs.max(e.abs);
                    worst_rel = worst_rel.max(e.relative());
                    scale = scale.max(e.scale);
                }
            }
        }
    }
    Ok((
        worst_rel <= 1e-10,
        format!(
            "max error relative to max |P~_nu(x)| {worst_rel:.2e} (tol 1e-10); absolute {worst_abs:.2e} with |P~_nu(x)| up to {scale:.2e}; d<=3, n<=32"
        ),
    ))
}

fn profile_constants(preset: CutoffPreset, ns: &[usize], seed: u64) -> Result<Vec<f64>> {
    let params = TensorJacobiParams::legendre(2);
    let cutoff = preset.build(2)?;
    ns.iter()
        .map(|&n| {
            let spec = KernelSpec::new(params.clone(), cutoff.clone(), n)?;
            Ok(decay_profile(&spec, 4.0, &stratified_pairs(2, n, 64, seed)).c_emp)
        })
        .collect()
}

fn localization(seed: u64) -> Result<(bool, String)> {
    let ns = [8usize, 16, 32, 64];
    let b = profile_constants(CutoffPreset::ProductB, &ns, seed)?;
    let ratios: Vec<f64> = b[1..].iter().map(|c| c / b[0]).collect();
    let stable = ratios.iter().all(|r| (0.25..=4.0).contains(r));
    let r = profile_constants(CutoffPreset::RadialNegativeControl, &[8, 64], seed)?;
    let growth = r[1] / r[0];
    Ok((
        stable && growth >= 2.0,
        format!(
            "product-b C(n)/C(8) for n=16,32,64: {} (band [0.25, 4]); radial C(64)/C(8) = {growth:.2} (>= 2)",
            fmt_list(&ratios)
        ),
    ))
}

fn subexponential(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(2);
    let cutoff = CutoffPreset::SmallDerivative.build(2)?;
    let ns = [8usize, 16, 32];
    let specs = ns
        .iter()
        .map(|&n| KernelSpec::new(params.clone(), cutoff.clone(), n))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<_> = ns.iter().map(|&n| stratified_pairs(2, n, 64, seed)).collect();
    let rep = subexponential_search(&specs, &samples, 1e-3, 4.0, 4.0, 24)?;
    Ok((
        rep.bounded && rep.c_tilde > 0.0,
        format!(
            "c~ = {:.4}, normalized constants {} for n = 8, 16, 32, growth {:.2} (limit 4)",
            rep.c_tilde,
            fmt_list(&rep.c_emp),
            rep.growth
        ),
    ))
}

fn tight_frame(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(2);
    let frame = build_frame(&params, FrameConfig::default_tight(2)?, 5)?;
    let rep = roundtrip_report(&frame, 20, seed)?;
    let parseval = rep.parseval_rel_error.unwrap_or(f64::INFINITY);
    Ok((
        parseval <= 1e-9 && rep.max_roundtrip_rel_error <= 1e-9,
        format!(
            "Parseval {parseval:.2e}, round trip {:.2e} on 20 inputs of degree {} (tol 1e-9)",
            rep.max_roundtrip_rel_error, rep.max_degree
        ),
    ))
}

fn needlet_norms() -> Result<(bool, String)> {
    use rayon::prelude::*;
    let params = TensorJacobiParams::legendre(2);
    let frame = build_frame(&params, FrameConfig::default_tight(2)?, 4)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [1.0, 2.0, f64::INFINITY] {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for j in 0..=4 {
            let ratios = (0..frame.level(j).len())
                .into_par_iter()
                .map(|i| needlet_norm(&frame, j, i, p, Family::Synthesis).map(|r| r.ratio))
                .collect::<Result<Vec<_>>>()?;
            for r in ratios {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        ok &= lo >= 0.1 && hi <= 10.0;
        parts.push(format!("p={p}: [{lo:.3}, {hi:.3}]"));
    }
    Ok((ok, format!("{} (band [0.1, 10])", parts.join("; "))))
}

fn norm_equivalence(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(2);
    let frame_for = |j| build_frame(&params, FrameConfig::default_dual(2)?, j);
    let degrees = [32usize, 64];
    let mut ok = true;
    let mut parts = Vec::new();
    for sp in [SpaceParams::b(1.0, 1.0, 2.0, 2.0)?, SpaceParams::f(0.0, 0.0, 2.0, 2.0)?] {
        let rows = equivalence_rows(&sp, &params, &degrees, 10, seed, &frame_for)?;
        let bands = ratio_bands(&rows);
        let (c0, c1) = (bands[0].constant(), bands[1].constant());
        ok &= c1 <= STABILITY_TOLERANCE * c0;
        parts.push(format!("{:?}: C(32) = {c0:.4}, C(64) = {c1:.4}", sp.family));
        let ident: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.lp_norm.map(|l| r.kernel_norm / l))
            .collect();
        if !ident.is_empty() {
            let lo = ident.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ident.iter().cloned().fold(0.0, f64::max);
            ok &= lo >= 1.0 / 3.0 && hi <= 3.0;
            parts.push(format!("F-norm/L2 in [{lo:.4}, {hi:.4}] (band [1/3, 3])"));
        }
    }
    Ok((ok, format!("{} (growth limit {STABILITY_TOLERANCE})", parts.join("; "))))
}

fn cutoff_independence(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(2);
    let a1 = CutoffPreset::ProductB.build(2)?;
    let a2 = CutoffPreset::QuasinormB.build(2)?;
    let covering = verify_dyadic_covering(&a1).passed && verify_dyadic_covering(&a2).passed;
    let sp = SpaceParams::f(1.0, 0.0, 3.0, 2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constants = Vec::new();
    let mut parts = Vec::new();
    for deg in [16usize, 32, 64] {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..10 {
            let f = random_decaying(&params, deg, 1.5, &mut rng);
            let r = f_norm_kernel(&f, &sp, &a1)? / f_norm_kernel(&f, &sp, &a2)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        constants.push(hi.max(1.0 / lo));
        parts.push(format!("degree {deg}: [{lo:.4}, {hi:.4}]"));
    }
    let stable = constants.windows(2).all(|w| w[1] <= STABILITY_TOLERANCE * w[0]);
    Ok((
        covering && stable,
        format!(
            "product-b / quasinorm-b F^(1,0)_(3,2) ratios {}; covering {covering}",
            parts.join(", ")
        ),
    ))
}

fn jackson() -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(2);
    let f = singular_x1(&params, 256)?;
    let frame = build_frame(&params, FrameConfig::default_tight(2)?, 9)?;
    let run = ApproxRun::new(frame, f, 2.0)?;
    let table = run.jackson_table(&[16, 64, 256, 1024], 0.5)?;
    let col: Vec<f64> = table.iter().map(|r| r.normalized).collect();
    let mut sorted = col.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[1] + sorted[2]);
    let max = sorted[3];
    let tau = kendall_tau(&col);
    Ok((
        max <= 10.0 * median && tau <= 0.0,
        format!(
            "normalized errors {} for n = 16, 64, 256, 1024; max/median {:.2} (<= 10); Kendall tau {tau:.2} (<= 0)",
            fmt_list(&col),
            max / median
        ),
    ))
}

fn maximal(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(1);
    let samples = maximal_sweep(&params, 200, 10, seed)?;
    let ratios: Vec<f64> = samples
        .iter()
        .map(|s| s.estimate.search / s.estimate.comparand)
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    Ok((
        lo >= 0.125 && hi <= 8.0,
        format!("search/comparand in [{lo:.3}, {hi:.3}] over 200 configurations (band [1/8, 8])"),
    ))
}

fn multipliers(seed: u64) -> Result<(bool, String)> {
    let params = TensorJacobiParams::legendre(1);
    let m = Multiplier::alternating_levels(&CutoffPreset::ProductB.build(1)?);
    let decay = multiplier_decay_table(&m, 1, 4, 8, 32, seed);
    let half = |r: std::ops::Range<usize>| {
        decay.iter().flat_map(|row| row[r.clone()].iter()).cloned().fold(0.0, f64::max)
    };
    let (inner, outer) = (half(0..4), half(4..8));
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.5, 3.0] {
        let sweep = multiplier_sweep(&m, &params, &[8, 16, 32, 64], p, 100, seed)?;
        let maxima: Vec<f64> = sweep.iter().map(|s| s.1).collect();
        ok &= maxima.windows(2).all(|w| w[1] <= STABILITY_TOLERANCE * w[0]);
        parts.push(format!("p={p}: {}", fmt_list(&maxima)));
    }
    Ok((
        ok,
        format!(
            "max ||T_m f||_p/||f||_p at degrees 8, 16, 32, 64: {} (jump <= {STABILITY_TOLERANCE}); scaled derivatives of order <= 4 peak at {inner:.1} on annuli 1..16 and {outer:.1} on 16..256",
            parts.join("; ")
        ),
    ))
}
