use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diminishing::verify::{Figure, Sizes};
use diminishing_cli::commands::{self, VerifySummary};
use diminishing_cli::config::{parse_config, resolve_seed, RawConfig, SEED_VAR};
use diminishing_cli::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "diminish",
    version,
    about = "Simulate and verify diminishing convex-body processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML file with any of the settings below
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: RawConfig,
    /// CSV destination [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichFigure {
    /// Heptagon, sqrt(n)(m_n - rho_7)
    Fig7,
    /// Octagon, n(m_n - rho_8)
    Fig8,
}

#[derive(Subcommand)]
enum Command {
    /// Write every step of one trajectory as CSV
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Replica whose random stream drives the trajectory
        #[arg(long, default_value_t = 0)]
        replica: u64,
    },
    /// Run independent replicas and write their scaled statistics as CSV
    Experiment {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the limit-law checks and print one line per statistic
    Verify {
        /// Smaller sample sizes for a fast smoke test
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a JSON summary here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Reproduce the heptagon or octagon figure data as (replica, value) CSV
    Figure {
        #[arg(long, value_enum)]
        which: WhichFigure,
        #[arg(long, default_value_t = 100)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        replicas: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination [default: stdout]
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn env_seed() -> Option<String> {
    std::env::var(SEED_VAR).ok()
}

fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            CliError::Create {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<ExitCode> {
    let env = env_seed();
    match command {
        Command::Simulate { run, replica } => {
            let cfg = parse_config(run.config.as_deref(), &run.settings, env.as_deref())?;
            commands::simulate(&cfg, replica, create(run.output.as_deref())?)?;
        }
        Command::Experiment { run } => {
            let cfg = parse_config(run.config.as_deref(), &run.settings, env.as_deref())?;
            let (_, diagnostics) = commands::experiment(&cfg, create(run.output.as_deref())?)?;
            if !diagnostics.is_clean() {
                eprintln!("structural invariants violated:");
                for m in diagnostics
                    .log
                    .messages
                    .iter()
                    .chain(diagnostics.polygon.iter().flat_map(|p| &p.log.messages))
                {
                    eprintln!("  {m}");
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify { quick, seed, json } => {
            let seed = resolve_seed(seed, env.as_deref())?;
            let sizes = if quick {
                Sizes::quick()
            } else {
                Sizes::default()
            };
            let report = commands::verify(&sizes, seed)?;
            print!("{report}");
            println!();
            for v in commands::verdicts(&report) {
                println!(
                    "criterion {:>2} {}: {}",
                    v.criterion,
                    v.name,
                    if v.passed { "PASS" } else { "FAIL" }
                );
            }
            if let Some(path) = json {
                let mut out = create(Some(&path))?;
                serde_json::to_writer_pretty(&mut out, &VerifySummary::new(&report, &sizes, seed))?;
                writeln!(out)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::PartialWrite { rows: 0, source })?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Figure {
            which,
            n,
            replicas,
            seed,
            output,
        } => {
            let seed = resolve_seed(seed, env.as_deref())?;
            let which = match which {
                WhichFigure::Fig7 => Figure::Heptagon,
                WhichFigure::Fig8 => Figure::Octagon,
            };
            commands::figure(which, n, replicas, seed, create(output.as_deref())?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
