//! Thin command-line front end: `sweep` runs a scenario file, `validate`
//! runs the built-in oracle checks, `preset` emits the default scenario.
//!
//! Exit codes: 0 success, 1 infeasible-only results (or failed checks),
//! 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wpbc::harness::scenario::{load_scenario, preset_toml};
use wpbc::harness::validate::run_validation;
use wpbc::harness::{emit_csv, run_sweep, Scheme};

#[derive(Parser)]
#[command(name = "wpbc", version, about = "Wirelessly powered backscatter link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a scenario file and write a CSV
    Sweep {
        /// Scenario file (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Override the scenario's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's Monte Carlo trial count
        #[arg(long)]
        trials: Option<usize>,
        /// Override the scenario's output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict the run to one scheme
        #[arg(long)]
        scheme: Option<String>,
        /// Rayon worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in invariant and oracle checks
    Validate {
        /// Monte Carlo sample size per check
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Emit the default scenario file
    Preset {
        /// Write to this path instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep {
            config,
            seed,
            trials,
            out,
            scheme,
            threads,
        } => {
            init_threads(threads);
            let mut spec = match load_scenario(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            if let Some(t) = trials {
                spec.mc_trials = t;
            }
            if let Some(name) = scheme {
                match Scheme::parse(&name) {
                    Ok(s) => spec.schemes = vec![s],
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            if let Some(o) = out {
                spec.out_path = Some(o);
            }
            let out_path = spec
                .out_path
                .clone()
                .unwrap_or_else(|| PathBuf::from("sweep.csv"));
            let rows = match run_sweep(&spec) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = emit_csv(&rows, &out_path) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let feasible = rows.iter().filter(|r| r.feasible).count();
            for row in &rows {
                println!(
                    "{}={} scheme={} min_rate={:.4} bits/s/Hz alpha={} p_ce={:.4} feasible={}",
                    spec.axis.name(),
                    row.axis_value,
                    row.scheme.name(),
                    row.min_rate,
                    row.alpha,
                    row.p_ce,
                    row.feasible
                );
            }
            println!(
                "wrote {} rows ({} tags each) to {}",
                rows.len(),
                spec.config.k_tags(),
                out_path.display()
            );
            if feasible == 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Validate {
            trials,
            seed,
            threads,
        } => {
            init_threads(threads);
            let outcomes = run_validation(trials, seed);
            let mut all_pass = true;
            for o in &outcomes {
                println!("{} {} — {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
                all_pass &= o.pass;
            }
            if all_pass {
                println!("all {} checks passed", outcomes.len());
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Preset { out } => match out {
            Some(path) => {
                if let Err(e) = std::fs::write(&path, preset_toml()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
                println!("wrote {}", path.display());
                ExitCode::SUCCESS
            }
            None => {
                print!("{}", preset_toml());
                ExitCode::SUCCESS
            }
        },
    }
}
