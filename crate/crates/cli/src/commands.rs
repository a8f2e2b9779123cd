use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RawConfig;
use crate::embedding::Embedding;
use crate::error::{CliError, Result};
use crate::experiment::{build_dataset, codes_csv, data_csv, run_experiment, score};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "hgplvm", version, about = "Hyperboloid GP-LVM experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Seed for data generation and training.
    #[arg(long)]
    pub seed: u64,
    /// Override a configuration key, e.g. `--set model.kappa=30`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RawConfig> {
        let mut raw = RawConfig::load(&self.config)?;
        for o in &self.overrides {
            raw.set(o)?;
        }
        Ok(raw)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the dataset, train, score and write all artifacts.
    Run(ConfigArgs),
    /// Draw an embedding CSV on the Poincaré disk.
    Render {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score an existing embedding against the configured dataset.
    Metrics {
        #[arg(long)]
        embedding: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write the configured dataset as CSV files.
    GenData {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Executes a command, returning what it prints on success.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Run(args) => {
            let rc = args.load()?.resolve(args.seed)?;
            let report = run_experiment(&rc)?;
            Ok(format!(
                "wrote {} (objective {:.6})",
                report.out_dir.display(),
                report.manifest.final_objective.unwrap_or(f64::NAN)
            ))
        }
        Command::Render { embedding, out } => {
            svg::render_to(&Embedding::read(embedding)?, out)?;
            Ok(format!("wrote {}", out.display()))
        }
        Command::Metrics { embedding, cfg } => {
            let rc = cfg.load()?.resolve(cfg.seed)?;
            let ds = build_dataset(&rc.dataset)?;
            let emb = Embedding::read(embedding)?;
            let scores = score(&ds, &emb.lorentz, rc.output.metric_k, rc.output.knn_k)?;
            Ok(serde_json::to_string_pretty(&scores)?)
        }
        Command::GenData { cfg, out } => {
            let rc = cfg.load()?.resolve(cfg.seed)?;
            let ds = build_dataset(&rc.dataset)?;
            std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
            write(&out.join("data.csv"), &data_csv(&ds))?;
            if let Some(codes) = codes_csv(&ds) {
                write(&out.join("codes.csv"), &codes)?;
            }
            Ok(format!("wrote {} rows to {}", ds.n(), out.display()))
        }
    }
}
