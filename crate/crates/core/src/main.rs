use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use simbench::gpr::{fit_with, FitOptions};
use simbench::harness::{report, run_pipeline, ExperimentConfig};
use simbench::io;
use simbench::optimizers::generate_training_data_with;
use simbench::simulate::{default_terms, simulate_conditional, simulate_unconditional};
use simbench::testbed::{catalog, make_instance, FunctionId};
use simbench::GprModel;

#[derive(Parser)]
#[command(
    name = "simbench",
    version,
    about = "Benchmarks from Gaussian-process simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the test-function catalog.
    Functions,
    /// Generate training data with a short DE run on a problem instance.
    GenData {
        #[arg(long)]
        function: FunctionId,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        instance: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluations per dimension.
        #[arg(long, default_value_t = 50)]
        budget: usize,
        /// Population size per dimension.
        #[arg(long, default_value_t = 20)]
        population: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a Gaussian-process model to a training CSV.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Likelihood restarts (default 10 n).
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a spectral simulation from a fitted model.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Number of cosine terms (default 100 n).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip conditioning on the training data.
        #[arg(long)]
        unconditional: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline. Without a config file, runs the desk-scale
    /// experiment.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Start from the full-scale defaults instead of desk scale.
        #[arg(long, conflicts_with = "config")]
        full: bool,
        /// Override a config key, e.g. `--set instances=3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run unconditional simulations.
        #[arg(long)]
        unconditional: bool,
    },
    /// Aggregate the error curves of a result directory.
    Report {
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    // usage errors exit with 1; 2 is reserved for partial pipeline failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Functions => {
            println!(
                "{:<16} {:<11} {:<11} description",
                "id", "modality", "dimensions"
            );
            for info in catalog() {
                let dims = match info.max_dim {
                    Some(max) if max == info.min_dim => max.to_string(),
                    Some(max) => format!("{}..{max}", info.min_dim),
                    None => format!(">= {}", info.min_dim),
                };
                println!(
                    "{:<16} {:<11} {:<11} {}",
                    info.id.as_str(),
                    info.modality.to_string(),
                    dims,
                    info.description
                );
            }
        }
        Command::GenData {
            function,
            dim,
            instance,
            seed,
            budget,
            population,
            out,
        } => {
            let inst = make_instance(function, dim, instance)?;
            let set = generate_training_data_with(&inst, budget * dim, population * dim, seed)?;
            io::write_training_csv(&out, &set)?;
            println!("wrote {} points to {}", set.len(), out.display());
        }
        Command::Fit {
            data,
            seed,
            restarts,
            out,
        } => {
            let set = io::read_training_csv(&data)?;
            let options = FitOptions {
                restarts,
                seed,
                ..FitOptions::default()
            };
            let model = fit_with(&set, &options)?;
            io::write_json(&out, &model)?;
            println!(
                "theta = {:?}, mu = {}, sigma2 = {}",
                model.theta(),
                model.mu_hat(),
                model.sigma2_hat()
            );
        }
        Command::Simulate {
            model,
            terms,
            seed,
            unconditional,
            out,
        } => {
            let model: GprModel = io::read_json(&model).context("reading model")?;
            let terms = terms.unwrap_or_else(|| default_terms(model.dim()));
            let sim = if unconditional {
                simulate_unconditional(&model, terms, seed)?
            } else {
                simulate_conditional(&model, terms, seed)?
            };
            io::write_json(&out, &sim)?;
            println!("wrote {} terms to {}", terms, out.display());
        }
        Command::Bench {
            config,
            full,
            overrides,
            seed,
            workers,
            out,
            unconditional,
        } => {
            let mut config = match config {
                Some(path) => ExperimentConfig::from_path(&path)?,
                None if full => ExperimentConfig::default(),
                None => ExperimentConfig::desk_scale(),
            }
            .with_overrides(&overrides)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(workers) = workers {
                config.workers = workers;
            }
            if let Some(out) = out {
                config.output = out;
            }
            if unconditional && !config.sources.contains(&simbench::Source::Unconditional) {
                config.sources.push(simbench::Source::Unconditional);
            }
            let result = run_pipeline(&config)?;
            let s = result.summary;
            println!(
                "{}: {} computed, {} cached, {} failed",
                result.dir.display(),
                s.computed,
                s.cached,
                s.failed
            );
            if !result.is_complete() {
                for (path, message) in result.manifest.failures() {
                    eprintln!("failed: {path}: {message}");
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::Report { out } => {
            let report = report(&out)?;
            print!("{}", report.summary_text());
            if !report.missing.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
