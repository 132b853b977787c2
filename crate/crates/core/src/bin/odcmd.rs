use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use odcmd::experiment::{self, ExperimentConfig, OUT_DIR_ENV};
use odcmd::problems::oracle::Feasibility;

#[derive(Parser)]
#[command(name = "odcmd", version, about = "Distributed online composite mirror descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV and JSON results.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = "odcmd-out")]
        out: PathBuf,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Validate a configuration and its network without running it.
    Check {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Source {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: fig2 ... fig7.
    #[arg(long)]
    preset: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat infeasible queries as fatal and fail if any regret exceeds its bound.
    #[arg(long)]
    strict: bool,
}

impl Source {
    fn load(&self) -> odcmd::Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => experiment::load_config(path)?,
            (None, Some(name)) => experiment::preset(name)?,
            (None, None) => unreachable!("clap enforces a source"),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if self.strict {
            config.run.feasibility = Feasibility::Strict;
        }
        Ok(config)
    }
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { source } => {
            let config = match source.load() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let report = match experiment::check(&config) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            for cell in &report.cells {
                let a = &cell.assumption;
                println!(
                    "{} T={}: zeta={:.4} B={} max row/col deviation={:.1e} {}",
                    cell.label,
                    cell.horizon,
                    a.zeta,
                    a.window.map_or("none".into(), |b| b.to_string()),
                    a.max_sum_deviation,
                    if a.passed() { "ok" } else { "VIOLATED" }
                );
            }
            if report.passed() {
                println!("check passed");
                ExitCode::SUCCESS
            } else {
                for e in &report.errors {
                    eprintln!("error: {e}");
                }
                ExitCode::FAILURE
            }
        }
        Command::Run { source, out, threads } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    return fail(e);
                }
            }
            let config = match source.load() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let output = match experiment::run_experiment(&config, &out) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            let mut exceeded = 0;
            for r in &output.results {
                let bound = r.bound.map_or("-".into(), |b| format!("{b:.4e}"));
                println!(
                    "{:<40} T={:<6} max={:.6e} min={:.6e} bound={bound}",
                    r.label, r.horizon, r.report.max, r.report.min
                );
                if r.bound.is_some_and(|b| r.report.max > b) {
                    exceeded += 1;
                }
            }
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            if source.strict && exceeded > 0 {
                return fail(format!("{exceeded} run(s) exceeded their regret bound"));
            }
            ExitCode::SUCCESS
        }
    }
}
