//! `flatland`: run, compare and sweep sampler experiments from TOML configs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flatland::experiment::{
    compare, oracle_check, run_experiment, sweep, write_compare_csv, write_json, write_run,
    write_sweep_csv, Experiment, Overrides, SweepParam,
};
use flatland::Error;

/// Exit status for a failed oracle check.
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "flatland",
    version,
    about = "Entropic discrete Langevin samplers and friends"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Root seed; chain k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of chains.
    #[arg(long)]
    chains: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            chains: self.chains,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its archives and reports.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run several experiments on one model and tabulate them side by side.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Rerun an experiment over a list of parameter values.
    Sweep {
        config: PathBuf,
        /// eta, alpha or alpha_a
        #[arg(long, default_value = "eta")]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the kernels against exact transition matrices.
    OracleCheck {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn default_out(exp: &Experiment, config: &Path) -> PathBuf {
    exp.out.clone().unwrap_or_else(|| {
        let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        PathBuf::from("runs").join(stem)
    })
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config, common } => {
            let exp = Experiment::load(&config, &common.overrides())?;
            let outcome = run_experiment(&exp)?;
            let dir = default_out(&exp, &config);
            write_run(&exp, &outcome, &dir)?;
            let s = &outcome.summary;
            println!(
                "{}: {} samples, acceptance {:.4}, invalid {} -> {}",
                s.sampler,
                s.samples,
                s.acceptance_rate,
                s.rejected_invalid,
                dir.display()
            );
            if let Some(d) = s.distance {
                println!("  tv {:.6}", d.tv);
            }
            if let Some(e) = &s.eigenspectrum {
                println!("  eigen std {:.4} iqr {:.4}", e.std, e.iqr);
            }
            if let Some(m) = &s.mode_frequencies {
                for f in m {
                    println!("  mode {} {:.4}", f.mode, f.frequency);
                }
            }
            if let Some(r) = &s.routes {
                println!(
                    "  best cost {:.4}, {} unique routes, pmc {:.3} ± {:.3}",
                    r.best_cost, r.unique_routes, r.pmc_mean, r.pmc_std
                );
            }
            if let Some(r) = &s.rmse {
                println!(
                    "  rmse {:.4} ± {:.4}, ensemble {:.4} ({})",
                    r.mean, r.std, r.ensemble, r.on
                );
            }
            Ok(0)
        }
        Command::Compare { configs, common } => {
            let exps = configs
                .iter()
                .map(|c| Experiment::load(c, &common.overrides()))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = compare(&exps)?;
            let dir = common
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("runs/compare"));
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("compare.csv");
            write_compare_csv(&rows, &path)?;
            print!("{}", std::fs::read_to_string(&path)?);
            Ok(0)
        }
        Command::Sweep {
            config,
            param,
            values,
            common,
        } => {
            let param: SweepParam = param.parse()?;
            let exp = Experiment::load(&config, &common.overrides())?;
            let rows = sweep(&exp, param, &values)?;
            let dir = default_out(&exp, &config);
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("sweep.csv");
            write_sweep_csv(param, &rows, &path)?;
            print!("{}", std::fs::read_to_string(&path)?);
            Ok(0)
        }
        Command::OracleCheck { config, common } => {
            let exp = Experiment::load(&config, &common.overrides())?;
            let report = oracle_check(&exp)?;
            for c in &report.checks {
                println!(
                    "{} {}: {:.3e} (< {:.0e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            if let Some(dir) = &common.out {
                std::fs::create_dir_all(dir)?;
                write_json(&report, &dir.join("oracle.json"))?;
            }
            Ok(if report.all_pass() {
                0
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("flatland: {e}");
            ExitCode::from(if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            })
        }
    }
}
