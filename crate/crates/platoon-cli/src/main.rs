use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use platoon_cli::config::RunConfig;
use platoon_cli::error::CliError;
use platoon_cli::stability_cmd::{self, parse_fractions, StabilityRequest};
use platoon_cli::{csvio, run, sweep};

#[derive(Parser)]
#[command(
    name = "platoon",
    version,
    about = "Car-following platoon simulator and string-stability analyzer"
)]
struct Cli {
    /// Run configuration file (see README for the schema)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override the config's base PRNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Record every K-th step (the final step is always kept)
    #[arg(long, global = true, value_name = "K")]
    record_every: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv + summary.txt
    Simulate {
        /// Also write headway/velocity SVG charts
        #[arg(long)]
        svg: bool,
    },
    /// Criterion verdicts, eigenvalues, and neutral stability lines
    Stability(StabilityArgs),
    /// Run a grid of scenarios and aggregate their metrics
    Sweep,
    /// Print the version
    Version,
}

#[derive(Args)]
struct StabilityArgs {
    /// Following law: ovm, povm, tovm, or fovm
    #[arg(long)]
    model: Option<String>,

    /// Predecessor sensitivity (1/s)
    #[arg(long)]
    a: Option<f64>,

    /// Secondary sensitivity (1/s), for tovm/fovm
    #[arg(long)]
    b: Option<f64>,

    /// Platoon size for the numeric eigensolve
    #[arg(long, value_name = "N")]
    n: Option<usize>,

    /// OVF slope V'(h) at the operating headway (1/s)
    #[arg(long, value_name = "VP")]
    vp: Option<f64>,

    /// Derive V' from a stock OVF: cosine or triangular
    #[arg(long, value_name = "KIND")]
    ovf: Option<String>,

    /// Headway at which to evaluate V' (with --ovf)
    #[arg(long, value_name = "H")]
    h: Option<f64>,

    /// Emit neutral stability lines as CSV
    #[arg(long)]
    neutral: bool,

    /// Leader-sensitivity fractions b/(a+b) for --neutral
    #[arg(long, value_name = "LIST", default_value = "0,0.2,0.4,0.6,0.8")]
    fractions: String,

    /// Neutral-line V' range start
    #[arg(long, default_value_t = 0.0)]
    vp_min: f64,

    /// Neutral-line V' range end
    #[arg(long, default_value_t = 2.0)]
    vp_max: f64,

    /// Neutral-line sample count
    #[arg(long, default_value_t = 81)]
    vp_samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Version => {
            println!("platoon {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
        Command::Simulate { svg } => {
            let cfg = load_config(&cli)?;
            let dir = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
            let finished = run::execute(&cfg, &dir, svg)?;
            println!(
                "wrote {} and {} ({} recorded steps, {} events)",
                dir.join("trajectory.csv").display(),
                dir.join("summary.txt").display(),
                finished.trajectory.times.len(),
                finished.trajectory.events.len()
            );
            Ok(())
        }
        Command::Sweep => {
            let cfg = load_config(&cli)?;
            let dir = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
            let outcome = sweep::execute(&cfg, &dir)?;
            println!("ran {} grid points; aggregate at {}", outcome.runs, outcome.aggregate_path.display());
            Ok(())
        }
        Command::Stability(args) => {
            let request = StabilityRequest {
                model: args.model,
                a: args.a,
                b: args.b,
                n: args.n,
                vp: args.vp,
                ovf: args.ovf,
                headway: args.h,
                neutral: args.neutral,
                fractions: parse_fractions(&args.fractions)?,
                vp_min: args.vp_min,
                vp_max: args.vp_max,
                vp_samples: args.vp_samples,
            };
            let output = stability_cmd::execute(&request)?;
            print!("{}", output.report);
            if let Some(dir) = &cli.out {
                csvio::write_atomic(&dir.join("stability.txt"), output.report.as_bytes())?;
                if let Some(neutral) = &output.neutral {
                    let path = dir.join("neutral.csv");
                    csvio::write_atomic(&path, neutral.as_bytes())?;
                    println!("neutral_csv = {}", path.display());
                }
            } else if output.neutral.is_some() {
                return Err(CliError::config("--neutral needs --out to receive neutral.csv"));
            }
            Ok(())
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("this subcommand needs --config <FILE>"))?;
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(record_every) = cli.record_every {
        if record_every == 0 {
            return Err(CliError::config("--record-every must be at least 1"));
        }
        cfg.record_every = record_every;
    }
    Ok(cfg)
}
