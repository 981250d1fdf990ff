#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cube_needlets::checks::DEFAULT_SEED;

use report::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "cube-needlets",
    version,
    about = "Needlet frames, localized Jacobi kernels and function-space norms on [-1,1]^d"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every random family.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Writes the primary report here; the JSON summary then goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON file of flags with the subcommand under "command". Explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Samples a cutoff on a regular grid of [0, t_max]^d.
    CutoffExport(CutoffExportArgs),
    /// Empirical decay constants of Lambda_n over rho-stratified pairs.
    KernelDecay(KernelDecayArgs),
    /// Per-level cubature invariants.
    CubatureReport(CubatureReportArgs),
    /// Analysis/synthesis round trip on random band-limited inputs.
    FrameRoundtrip(FrameRoundtripArgs),
    /// Kernel-side against needlet-sequence norms.
    NormEquiv(NormEquivArgs),
    /// Greedy n-term approximation errors.
    Nterm(NtermArgs),
    /// Runs the built-in acceptance checks.
    Acceptance(AcceptanceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct JacobiArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Comma list of alpha_i; one value is broadcast.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
    /// Comma list of beta_i; one value is broadcast.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    pub beta: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct CutoffExportArgs {
    #[arg(long, default_value = "product-b")]
    pub cutoff: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 65)]
    pub resolution: usize,
    #[arg(long, default_value_t = 2.5)]
    pub t_max: f64,
}

#[derive(Args, Debug)]
pub struct KernelDecayArgs {
    #[command(flatten)]
    pub jacobi: JacobiArgs,
    #[arg(long, default_value = "product-b")]
    pub cutoff: String,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
    /// Pairs per rho band.
    #[arg(long, default_value_t = 64)]
    pub per_stratum: usize,
}

#[derive(Args, Debug)]
pub struct CubatureReportArgs {
    #[command(flatten)]
    pub jacobi: JacobiArgs,
    #[arg(long, default_value_t = 4)]
    pub jmax: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Tight,
    Dual,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct FrameKindArgs {
    /// Sin-splice cutoff, tight frame.
    #[arg(long)]
    pub tight: bool,
    /// Product type-(b) cutoff with its dual.
    #[arg(long)]
    pub dual: bool,
}

impl FrameKindArgs {
    pub fn kind(&self, default: FrameKind) -> FrameKind {
        match (self.tight, self.dual) {
            (true, _) => FrameKind::Tight,
            (_, true) => FrameKind::Dual,
            _ => default,
        }
    }
}

#[derive(Args, Debug)]
pub struct FrameRoundtripArgs {
    #[command(flatten)]
    pub jacobi: JacobiArgs,
    #[arg(long, default_value_t = 4)]
    pub jmax: u32,
    #[command(flatten)]
    pub kind: FrameKindArgs,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct NormEquivArgs {
    #[command(flatten)]
    pub jacobi: JacobiArgs,
    /// F (Triebel-Lizorkin) or B (Besov).
    #[arg(long, default_value = "B")]
    pub family: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s: f64,
    /// Power of W in the norm.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rho: f64,
    /// Accepts `inf`.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Accepts `inf`.
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// The two largest degrees are 2^{jmax-2} and 2^{jmax-1}.
    #[arg(long, default_value_t = 6)]
    pub jmax: u32,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[command(flatten)]
    pub kind: FrameKindArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    SingularX1,
    RandomBandlimited,
    Needlet,
}

#[derive(Args, Debug)]
pub struct NtermArgs {
    #[command(flatten)]
    pub jacobi: JacobiArgs,
    #[arg(long, value_enum, default_value = "singular-x1")]
    pub target: Target,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 9)]
    pub jmax: u32,
    /// Target degree; defaults to 2^{jmax-1}.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Args, Debug)]
pub struct AcceptanceArgs {
    /// Runs one criterion instead of all of them.
    #[arg(long)]
    pub criterion: Option<u32>,
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let help = !e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(names)) => {
            eprintln!("numerical check failed: {}", names.join("; "));
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
