use cube_needlets::approx::{kendall_tau, singular_x1, ApproxRun};
use cube_needlets::checks::{run_criterion, CRITERIA};
use cube_needlets::cubature::{build_level, level_report};
use cube_needlets::cutoff::CutoffPreset;
use cube_needlets::expansion::{JacobiExpansion, TensorJacobiParams};
use cube_needlets::frame::{
    build_frame, random_bandlimited, roundtrip_report, Family, FrameConfig, NeedletFrame,
};
use cube_needlets::kernel::{decay_profile, stratified_pairs, KernelSpec};
use cube_needlets::spaces::{
    bands_stable, equivalence_rows, ratio_bands, SpaceFamily, SpaceParams, STABILITY_TOLERANCE,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::report::{num, point, Checks, Failure, Outcome, Output};
use crate::*;

const GRID_BUDGET: usize = 1 << 22;

pub fn run(cli: &Cli) -> Outcome {
    let out = Output::new(cli.out.as_deref());
    match &cli.command {
        Command::CutoffExport(a) => cutoff_export(a, &out),
        Command::KernelDecay(a) => kernel_decay(a, cli.seed, &out),
        Command::CubatureReport(a) => cubature_report(a, cli.seed, &out),
        Command::FrameRoundtrip(a) => frame_roundtrip(a, cli.seed, &out),
        Command::NormEquiv(a) => norm_equiv(a, cli.seed, &out),
        Command::Nterm(a) => nterm(a, cli.seed, &out),
        Command::Acceptance(a) => acceptance(a, cli.seed, &out),
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn jacobi(a: &JacobiArgs) -> Result<TensorJacobiParams, Failure> {
    if a.d == 0 {
        return Err(invalid("--d must be positive"));
    }
    Ok(TensorJacobiParams::from_lists(a.d, &a.alpha, &a.beta)?)
}

fn frame_config(kind: FrameKind, d: usize) -> Result<FrameConfig, Failure> {
    Ok(match kind {
        FrameKind::Tight => FrameConfig::default_tight(d)?,
        FrameKind::Dual => FrameConfig::default_dual(d)?,
    })
}

fn cutoff_export(a: &CutoffExportArgs, out: &Output) -> Outcome {
    let preset: CutoffPreset = a.cutoff.parse()?;
    if a.resolution < 2 {
        return Err(invalid("--resolution must be at least 2"));
    }
    if !(a.t_max > 0.0 && a.t_max.is_finite()) {
        return Err(invalid("--t-max must be positive and finite"));
    }
    let total = a
        .resolution
        .checked_pow(a.d as u32)
        .filter(|&t| t <= GRID_BUDGET)
        .ok_or_else(|| invalid(format!("resolution^d exceeds {GRID_BUDGET} grid points")))?;
    let cutoff = preset.build(a.d)?;
    let complex = !cutoff.is_real();
    let step = a.t_max / (a.resolution - 1) as f64;
    let mut t = vec![0.0; a.d];
    let rows: Vec<Vec<String>> = (0..total)
        .map(|flat| {
            let mut rem = flat;
            for k in (0..a.d).rev() {
                t[k] = (rem % a.resolution) as f64 * step;
                rem /= a.resolution;
            }
            let v = cutoff.eval(&t);
            let mut row: Vec<String> = t.iter().map(|&x| num(x)).collect();
            row.push(num(v.re));
            if complex {
                row.push(num(v.im));
            }
            row
        })
        .collect();
    let mut header: Vec<String> = (1..=a.d).map(|i| format!("t_{i}")).collect();
    header.push("value".into());
    if complex {
        header.push("value_im".into());
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(&header, &rows)
}

fn kernel_decay(a: &KernelDecayArgs, seed: u64, out: &Output) -> Outcome {
    let preset: CutoffPreset = a.cutoff.parse()?;
    let params = jacobi(&a.jacobi)?;
    if a.n_list.is_empty() || a.n_list.contains(&0) {
        return Err(invalid("--n-list needs positive entries"));
    }
    if !(a.sigma > 0.0) {
        return Err(invalid("--sigma must be positive"));
    }
    if a.per_stratum == 0 {
        return Err(invalid("--per-stratum must be positive"));
    }
    let d = params.dim();
    let cutoff = preset.build(d)?;
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for &n in &a.n_list {
        let spec = KernelSpec::new(params.clone(), cutoff.clone(), n)?;
        let profile = decay_profile(&spec, a.sigma, &stratified_pairs(d, n, a.per_stratum, seed));
        let (x, y, rho) = match profile.worst() {
            Some(w) => (point(&w.x), point(&w.y), num(w.rho)),
            None => (String::new(), String::new(), String::new()),
        };
        rows.push(vec![n.to_string(), num(a.sigma), num(profile.c_emp), x, y, rho]);
        constants.push(profile.c_emp);
    }
    out.csv(&["n", "sigma", "C_emp", "argmax_x", "argmax_y", "rho"], &rows)?;

    let ratios: Vec<f64> = constants.iter().map(|c| c / constants[0]).collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let growth = ratios[ratios.len() - 1];
    let stable = ratios.iter().all(|r| (0.25..=4.0).contains(r));
    let control = preset == CutoffPreset::RadialNegativeControl;
    out.summary(&json!({
        "cutoff": preset.name(),
        "sigma": a.sigma,
        "ratio_min": lo,
        "ratio_max": hi,
        "growth": growth,
        "stable": stable,
        "negative_control": control,
    }))?;
    let mut checks = Checks::default();
    let detail = format!("C_emp(n)/C_emp({}) in [{lo:.3}, {hi:.3}], band [0.25, 4]", a.n_list[0]);
    if control {
        checks.info(
            "negative control",
            format!("{detail}; growth {growth:.2} ({})", if growth >= 2.0 { "flagged" } else { "not flagged" }),
        );
    } else {
        checks.check("localization stability", stable, detail);
    }
    checks.finish()
}

fn cubature_report(a: &CubatureReportArgs, seed: u64, out: &Output) -> Outcome {
    let params = jacobi(&a.jacobi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut checks = Checks::default();
    let (mut exact, mut tiles) = (0.0f64, 0.0f64);
    for j in 0..=a.jmax {
        let level = build_level(j, &params)?;
        let rep = level_report(&level, &mut rng);
        exact = exact.max(rep.exactness_error);
        tiles = tiles.max(rep.tile_partition_error);
        reports.push(serde_json::to_value(&rep)?);
    }
    out.json(&Value::Array(reports))?;
    checks.check("quadrature exactness", exact <= 1e-11, format!("max relative error {exact:.2e} (tol 1e-11)"));
    checks.check("tile partition", tiles <= 1e-12, format!("max relative defect {tiles:.2e} (tol 1e-12)"));
    checks.finish()
}

fn frame_roundtrip(a: &FrameRoundtripArgs, seed: u64, out: &Output) -> Outcome {
    let params = jacobi(&a.jacobi)?;
    if a.trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let kind = a.kind.kind(FrameKind::Tight);
    let frame = build_frame(&params, frame_config(kind, params.dim())?, a.jmax)?;
    let rep = roundtrip_report(&frame, a.trials, seed)?;
    out.json(&json!({
        "frame": if frame.is_tight() { "tight" } else { "dual" },
        "jmax": a.jmax,
        "trials": rep.trials,
        "max_degree": rep.max_degree,
        "max_roundtrip_rel_error": rep.max_roundtrip_rel_error,
        "parseval_rel_error": rep.parseval_rel_error,
        "frame_bound_ratio": rep.frame_bound_ratio,
    }))?;
    let mut checks = Checks::default();
    checks.check(
        "round trip",
        rep.max_roundtrip_rel_error <= 1e-9,
        format!("max relative error {:.2e} (tol 1e-9)", rep.max_roundtrip_rel_error),
    );
    if let Some(pe) = rep.parseval_rel_error {
        checks.check("Parseval", pe <= 1e-9, format!("max relative error {pe:.2e} (tol 1e-9)"));
    }
    checks.finish()
}

fn norm_equiv(a: &NormEquivArgs, seed: u64, out: &Output) -> Outcome {
    let family: SpaceFamily = a.family.parse()?;
    let sp = SpaceParams::new(family, a.s, a.rho, a.p, a.q)?;
    let params = jacobi(&a.jacobi)?;
    if a.jmax < 2 {
        return Err(invalid("--jmax must be at least 2"));
    }
    if a.trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let kind = a.kind.kind(FrameKind::Dual);
    let degrees = [1usize << (a.jmax - 2), 1usize << (a.jmax - 1)];
    let frame_for = |j: u32| -> cube_needlets::Result<NeedletFrame> {
        let config = match kind {
            FrameKind::Tight => FrameConfig::default_tight(params.dim())?,
            FrameKind::Dual => FrameConfig::default_dual(params.dim())?,
        };
        build_frame(&params, config, j)
    };
    let rows = equivalence_rows(&sp, &params, &degrees, a.trials, seed, &frame_for)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.trial.to_string(),
                r.degree.to_string(),
                num(r.kernel_norm),
                num(r.seq_norm),
                num(r.ratio),
            ]
        })
        .collect();
    out.csv(&["trial", "degree", "kernel_norm", "seq_norm", "ratio"], &csv_rows)?;

    let bands = ratio_bands(&rows);
    let lo = bands.iter().map(|b| b.ratio_min).fold(f64::INFINITY, f64::min);
    let hi = bands.iter().map(|b| b.ratio_max).fold(0.0, f64::max);
    let stable = bands_stable(&bands, STABILITY_TOLERANCE);
    let constants: Vec<f64> = bands.iter().map(|b| b.constant()).collect();
    out.summary(&json!({
        "ratio_min": lo,
        "ratio_max": hi,
        "stable": stable,
        "constant_low_degree": constants[0],
        "constant_high_degree": constants[constants.len() - 1],
    }))?;
    let mut checks = Checks::default();
    checks.check(
        "norm equivalence stability",
        stable,
        format!(
            "C = {:.4} at degree {} and {:.4} at degree {} (growth limit {STABILITY_TOLERANCE})",
            constants[0], degrees[0], constants[1], degrees[1]
        ),
    );
    checks.finish()
}

fn nterm(a: &NtermArgs, seed: u64, out: &Output) -> Outcome {
    let params = jacobi(&a.jacobi)?;
    if a.jmax < 1 {
        return Err(invalid("--jmax must be positive"));
    }
    if a.n_list.is_empty() {
        return Err(invalid("--n-list must not be empty"));
    }
    if !(a.s > 0.0) {
        return Err(invalid("--s must be positive"));
    }
    let degree = a.degree.unwrap_or(1usize << (a.jmax - 1));
    let frame = build_frame(&params, FrameConfig::default_tight(params.dim())?, a.jmax)?;
    let target: JacobiExpansion = match a.target {
        Target::SingularX1 => singular_x1(&params, degree)?,
        Target::RandomBandlimited => {
            random_bandlimited(&params, degree, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        Target::Needlet => {
            let j = a.jmax.saturating_sub(2);
            let center = frame.level(j).len() / 2;
            frame.needlet(j, center, Family::Synthesis)
        }
    };
    let run = ApproxRun::new(frame, target, a.p)?;
    let table = run.jackson_table(&a.n_list, a.s)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.error), num(r.normalized)])
        .collect();
    out.csv(&["n", "error", "normalized"], &rows)?;

    let col: Vec<f64> = table.iter().map(|r| r.normalized).collect();
    let mut sorted = col.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]) };
    let max = sorted[k - 1];
    let tau = kendall_tau(&col);
    out.summary(&json!({
        "target": a.target.to_possible_value().map(|v| v.get_name().to_string()),
        "degree": degree,
        "terms": run.term_count(),
        "max_normalized": max,
        "median_normalized": median,
        "kendall_tau": tau,
    }))?;
    let mut checks = Checks::default();
    let bound = format!("max/median of normalized errors {:.3} (limit 10)", max / median);
    let trend = format!("Kendall tau {tau:.3} (limit 0)");
    if a.target == Target::SingularX1 {
        checks.check("Jackson bound", max <= 10.0 * median, bound);
        checks.check("no increasing trend", tau <= 0.0, trend);
    } else {
        checks.info("Jackson column", format!("max/median {:.3}, Kendall tau {tau:.3}", max / median));
    }
    checks.finish()
}

fn acceptance(a: &AcceptanceArgs, seed: u64, out: &Output) -> Outcome {
    let ids: Vec<u32> = match a.criterion {
        Some(id) if CRITERIA.iter().any(|&(c, _)| c == id) => vec![id],
        Some(id) => return Err(invalid(format!("no criterion {id}; valid ids are 1..={}", CRITERIA.len()))),
        None => CRITERIA.iter().map(|&(c, _)| c).collect(),
    };
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for id in ids {
        let rep = run_criterion(id, seed)?;
        println!("{}", rep.line());
        if !rep.passed {
            failed.push(format!("criterion {} ({})", rep.id, rep.title));
        }
        reports.push(json!({
            "id": rep.id,
            "title": rep.title,
            "passed": rep.passed,
            "elapsed_s": rep.elapsed_s,
            "limit_s": rep.limit_s,
            "detail": rep.detail,
        }));
    }
    if out.has_path() {
        out.json(&Value::Array(reports))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed))
    }
}
