//! `memchan`: transmission rates and capacity optima of a two-use thermal
//! channel with correlated noise.
//!
//! Subcommands: `rate` evaluates one `(eta, y)` point, `optimize` maximizes
//! the rate over the box, `contour` writes an `eta x y` rate grid as CSV, and
//! `sweep-nbar` optimizes along a photon-number sweep at fixed
//! signal-to-noise ratio. All CSV output is deterministic: identical flags
//! produce byte-identical files.
//!
//! Exit codes: 0 on success, 1 on domain or I/O errors, 2 on usage errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use memchan_core::optim::{optimize_rate, OptimizerOptions};
use memchan_core::rate::{rate_generic, squeezing_db};
use memchan_core::{InputStrategy, NoiseModel, NoisePattern};

#[derive(Parser)]
#[command(
    name = "memchan",
    version,
    about = "Rates and capacity optima of a correlated-noise bosonic channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the transmission rate at one (eta, y) point.
    Rate(RateArgs),
    /// Maximize the rate over (eta, y); report the optimum and the gain.
    Optimize(OptimizeArgs),
    /// Write the rate over an eta x y grid as CSV.
    Contour(ContourArgs),
    /// Optimize along an nbar sweep at fixed snr; write one CSV row per
    /// (nbar, x).
    SweepNbar(SweepNbarArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    PhaseSensitive,
    Symmetric,
}

impl From<PatternArg> for NoisePattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::PhaseSensitive => NoisePattern::PhaseSensitive,
            PatternArg::Symmetric => NoisePattern::Symmetric,
        }
    }
}

/// Channel parameters shared by the point-wise subcommands. The noise level
/// comes either directly (`--noise`) or through `--snr` as N = nbar/snr.
///
/// Negative numbers must parse as flag values (y is signed, and a negative
/// photon number should be a domain error with exit code 1, not a usage
/// error), hence `allow_negative_numbers`.
#[derive(Args)]
#[command(
    group(ArgGroup::new("noise_level").required(true).args(["noise", "snr"])),
    allow_negative_numbers = true
)]
struct ChannelArgs {
    /// Mean photon number budget per mode.
    #[arg(long)]
    nbar: f64,
    /// Thermal photons N added per channel use.
    #[arg(long)]
    noise: Option<f64>,
    /// Signal-to-noise ratio nbar/N; sets N = nbar / snr.
    #[arg(long)]
    snr: Option<f64>,
    /// Memory coefficient x in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    memory: f64,
    /// Noise correlation pattern.
    #[arg(long, value_enum, default_value_t = PatternArg::PhaseSensitive)]
    pattern: PatternArg,
}

impl ChannelArgs {
    fn thermal_photons(&self) -> f64 {
        match self.noise {
            Some(n) => n,
            None => self.nbar / self.snr.expect("clap enforces the group"),
        }
    }
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Degree of entanglement in [0, 1].
    #[arg(long)]
    eta: f64,
    /// Classical modulation correlation in [-1, 1].
    #[arg(long)]
    y: f64,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Rate tolerance of the refinement stage.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct ContourArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Grid points along eta.
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    grid_eta: u32,
    /// Grid points along y.
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    grid_y: u32,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepNbarArgs {
    /// Signal-to-noise ratio nbar/N held fixed along the sweep.
    #[arg(long)]
    snr: f64,
    /// Memory coefficients to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.7")]
    x_list: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    nbar_min: f64,
    #[arg(long, default_value_t = 100.0)]
    nbar_max: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(2..))]
    nbar_steps: u32,
    /// Space the nbar values logarithmically instead of linearly.
    #[arg(long)]
    log_scale: bool,
    /// Noise correlation pattern.
    #[arg(long, value_enum, default_value_t = PatternArg::PhaseSensitive)]
    pattern: PatternArg,
    /// Rate tolerance of the refinement stage.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

/// 9 significant digits, enough to verify 1e-6 tolerances without bloat.
fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rate(args) => cmd_rate(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Contour(args) => cmd_contour(args),
        Command::SweepNbar(args) => cmd_sweep_nbar(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type CmdResult = Result<(), Box<dyn std::error::Error>>;

fn cmd_rate(args: RateArgs) -> CmdResult {
    let model = NoiseModel::new(
        args.channel.thermal_photons(),
        args.channel.memory,
        args.channel.pattern.into(),
    )?;
    let strategy = InputStrategy::new(args.eta, args.y, args.channel.nbar)?;
    let point = rate_generic(&strategy, &model)?;
    println!("eta = {}", fmt9(point.eta));
    println!("y = {}", fmt9(point.y));
    println!("rate = {} bits/mode", fmt9(point.rate_bits_per_mode));
    println!("lambda_out = {}", fmt9(point.lambda_out));
    println!("lambda_mix = {}", fmt9(point.lambda_mix));
    println!(
        "squeezing_db = {}",
        fmt9(squeezing_db(args.eta, args.channel.nbar))
    );
    Ok(())
}

fn cmd_optimize(args: OptimizeArgs) -> CmdResult {
    let options = OptimizerOptions {
        rate_tol: args.tol,
        ..OptimizerOptions::default()
    };
    let result = optimize_rate(
        args.channel.nbar,
        args.channel.thermal_photons(),
        args.channel.memory,
        args.channel.pattern.into(),
        &options,
    )?;
    println!("eta_star = {:.3}", result.eta_star);
    println!("y_star = {:.3}", result.y_star);
    println!("rate_star = {} bits/mode", fmt9(result.rate_star));
    println!("rate_eta0 = {} bits/mode", fmt9(result.rate_eta0));
    println!("gain = {}", fmt9(result.gain));
    println!(
        "squeezing_db = {}",
        fmt9(squeezing_db(result.eta_star, args.channel.nbar))
    );
    println!("evaluations = {}", result.evaluations);
    println!("converged = {}", result.converged);
    Ok(())
}

fn cmd_contour(args: ContourArgs) -> CmdResult {
    let model = NoiseModel::new(
        args.channel.thermal_photons(),
        args.channel.memory,
        args.channel.pattern.into(),
    )?;
    let (grid_eta, grid_y) = (args.grid_eta as usize, args.grid_y as usize);
    let mut csv = String::from("eta,y,rate\n");
    for i in 0..grid_eta {
        let eta = i as f64 / (grid_eta - 1) as f64;
        for j in 0..grid_y {
            let y = 2.0 * j as f64 / (grid_y - 1) as f64 - 1.0;
            let strategy = InputStrategy::new(eta, y, args.channel.nbar)?;
            let point = rate_generic(&strategy, &model)?;
            writeln!(
                csv,
                "{},{},{}",
                fmt9(eta),
                fmt9(y),
                fmt9(point.rate_bits_per_mode)
            )?;
        }
    }
    fs::write(&args.out, csv)?;
    println!("wrote {} rows to {}", grid_eta * grid_y, args.out.display());
    Ok(())
}

fn cmd_sweep_nbar(args: SweepNbarArgs) -> CmdResult {
    let steps = args.nbar_steps as usize;
    let nbars: Vec<f64> = (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            if args.log_scale {
                (args.nbar_min.ln() + t * (args.nbar_max.ln() - args.nbar_min.ln())).exp()
            } else {
                args.nbar_min + t * (args.nbar_max - args.nbar_min)
            }
        })
        .collect();
    let options = OptimizerOptions {
        rate_tol: args.tol,
        ..OptimizerOptions::default()
    };
    let pattern: NoisePattern = args.pattern.into();
    let mut csv =
        String::from("nbar,N,x,pattern,eta_star,y_star,rate_star,rate_eta0,gain,squeezing_db\n");
    for &nbar in &nbars {
        let thermal = nbar / args.snr;
        for &x in &args.x_list {
            let result = optimize_rate(nbar, thermal, x, pattern, &options)?;
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt9(nbar),
                fmt9(thermal),
                fmt9(x),
                pattern,
                fmt9(result.eta_star),
                fmt9(result.y_star),
                fmt9(result.rate_star),
                fmt9(result.rate_eta0),
                fmt9(result.gain),
                fmt9(squeezing_db(result.eta_star, nbar))
            )?;
        }
    }
    fs::write(&args.out, csv)?;
    println!(
        "wrote {} rows to {}",
        nbars.len() * args.x_list.len(),
        args.out.display()
    );
    Ok(())
}
