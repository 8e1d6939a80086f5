use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use landslide_cli::config::{load_config, resolve, FlagOverrides};
use landslide_cli::error::CliError;
use landslide_cli::{render, stage};
use landslide_core::model::ClassifierKind;

#[derive(Parser)]
#[command(
    name = "landslide",
    version,
    about = "Landslide-susceptibility modeling: feature screening, model search, \
             SHAP explanation, and feature reduction with reproducible reports"
)]
struct Cli {
    /// TOML configuration file; omitted values use the benchmark defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cross-validation fold count (overrides the config file).
    #[arg(long, global = true, value_name = "K")]
    folds: Option<usize>,
    /// How many of the least important features to drop (overrides the
    /// config file).
    #[arg(long, global = true, value_name = "N")]
    drop: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normality and label-independence screening of every feature.
    Stats,
    /// Grid-search one classifier family with stratified cross-validation,
    /// refit the winner, and evaluate it on the held-out split.
    Search {
        /// Classifier family: gbt | knn | logreg | svm | adaboost.
        #[arg(long)]
        model: String,
    },
    /// Shapley explanations of a stored boosted-tree model.
    Explain {
        /// Model JSON to explain (default: <out>/model_gbt.json).
        #[arg(long, value_name = "PATH")]
        model_path: Option<PathBuf>,
    },
    /// Drop the least important features, retrain, and compare scores.
    Reduce,
    /// Every stage in order: stats, search for each family, explain,
    /// reduce.
    Pipeline,
    /// Write the built-in synthetic dataset as a CSV.
    Synth {
        /// Where to write the CSV.
        #[arg(long, value_name = "PATH")]
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Synth { path } = &cli.command {
        // Synthesis needs no data file, so skip full config resolution.
        let file = load_config(cli.config.as_deref())?;
        let seed = cli.seed.or(file.seed).unwrap_or(15);
        stage::run_synth(path, seed)?;
        println!("wrote synthetic dataset to {}", path.display());
        return Ok(());
    }

    let flags =
        FlagOverrides { seed: cli.seed, out: cli.out.clone(), folds: cli.folds, drop: cli.drop };
    let cfg = resolve(load_config(cli.config.as_deref())?, &flags)?;
    match &cli.command {
        Command::Stats => {
            let report = stage::run_stats(&cfg)?;
            print!("{}", render::stats(&report));
        }
        Command::Search { model } => {
            let kind: ClassifierKind =
                model.parse().map_err(|e: landslide_core::model::UnknownKind| {
                    CliError::Config(e.to_string())
                })?;
            let outcome = stage::run_search(&cfg, kind)?;
            print!("{}", render::search(&outcome));
        }
        Command::Explain { model_path } => {
            let report = stage::run_explain(&cfg, model_path.as_deref())?;
            print!("{}", render::explain(&report));
        }
        Command::Reduce => {
            let outcome = stage::run_reduce(&cfg)?;
            print!("{}", render::reduce(&outcome));
        }
        Command::Pipeline => {
            let outcome = stage::run_pipeline(&cfg)?;
            print!("{}", render::pipeline(&outcome));
        }
        Command::Synth { .. } => unreachable!("handled above"),
    }
    Ok(())
}
