//! Dataset generation, training, scoring and artifact writing for one run.

use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hgplvm::datasets::{sbt_dataset, spiral_dataset, Dataset};
use hgplvm::lorentz::to_poincare;
use hgplvm::metrics::{
    continuity_from, distance_correlation, knn_accuracy_from, pairwise_euclidean, pairwise_hamming, pairwise_hyperbolic,
    shepard_goodness, trustworthiness_from,
};
use hgplvm::optimizer::train;
use hgplvm::{PointSet, TraceRecord};
use serde::Serialize;

use crate::config::{field_error, DatasetConfig, RunConfig};
use crate::embedding::Embedding;
use crate::error::{CliError, Result};
use crate::svg;

pub const EMBEDDING_FILE: &str = "embedding.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const PLOT_FILE: &str = "plot.svg";
const LOCK_FILE: &str = ".lock";

pub fn software_version() -> String {
    format!("hgplvm {}", env!("CARGO_PKG_VERSION"))
}

pub fn build_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    let ds = match cfg {
        DatasetConfig::Sbt(spec) => sbt_dataset(spec),
        DatasetConfig::Spiral(spec) => spiral_dataset(spec),
    };
    ds.map_err(|e| field_error("dataset", e))
}

/// Embedding quality scores. Tree-only scores are absent for other data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scores {
    pub distance_correlation: Option<f64>,
    pub trustworthiness: Option<f64>,
    pub continuity: Option<f64>,
    pub shepard_goodness: Option<f64>,
    pub knn_accuracy: Option<f64>,
    pub max_poincare_radius: f64,
}

/// Scores latent positions against a dataset. Scores whose preconditions
/// fail (too few points for `k`, constant distances) are left out.
pub fn score(ds: &Dataset, latent: &PointSet, metric_k: usize, knn_k: usize) -> Result<Scores> {
    if latent.len() != ds.n() {
        return Err(CliError::Usage(format!("embedding has {} rows, dataset has {}", latent.len(), ds.n())));
    }
    let lat = pairwise_hyperbolic(latent)?;
    let obs = pairwise_euclidean(&ds.y)?;
    let distance_correlation = match ds.sample_codes() {
        Some(codes) => distance_correlation(&lat, &pairwise_hamming(&codes)?).ok(),
        None => None,
    };
    Ok(Scores {
        distance_correlation,
        trustworthiness: trustworthiness_from(&obs, &lat, metric_k).ok(),
        continuity: continuity_from(&obs, &lat, metric_k).ok(),
        shepard_goodness: shepard_goodness(&obs, &lat).ok(),
        knn_accuracy: knn_accuracy_from(&lat, &ds.labels, knn_k).ok(),
        max_poincare_radius: latent.to_points().iter().map(|p| to_poincare(p).norm()).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub software: String,
    pub status: String,
    pub seed: u64,
    pub config: std::collections::BTreeMap<String, String>,
    pub n: usize,
    pub d: usize,
    pub duration_secs: f64,
    pub epochs: usize,
    pub final_objective: Option<f64>,
    pub final_sigma: Option<f64>,
    pub final_beta: Option<f64>,
    pub scores: Option<Scores>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut s = String::from("epoch,objective,log_sigma,log_beta\n");
    for r in trace {
        writeln!(s, "{},{:.16e},{:.16e},{:.16e}", r.epoch, r.objective, r.log_sigma, r.log_beta).unwrap();
    }
    s
}

/// Exclusive claim on an output directory, released on drop.
struct DirLock {
    path: PathBuf,
    _file: File,
}

impl DirLock {
    fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(file) => Ok(Self { path, _file: file }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(dir.to_path_buf())),
            Err(e) => Err(CliError::io(path, e)),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
}

/// Generates the dataset, trains, scores and writes all artifacts.
pub fn run_experiment(rc: &RunConfig) -> Result<RunReport> {
    let ds = build_dataset(&rc.dataset)?;
    rc.model.validate(ds.n()).map_err(|e| field_error("model", e))?;
    let dir = rc.output.dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let _lock = DirLock::acquire(&dir)?;

    let mut manifest = RunManifest {
        software: software_version(),
        status: "failed".into(),
        seed: rc.seed,
        config: rc.snapshot(),
        n: ds.n(),
        d: ds.d(),
        duration_secs: 0.0,
        epochs: 0,
        final_objective: None,
        final_sigma: None,
        final_beta: None,
        scores: None,
        warnings: Vec::new(),
        error: None,
    };
    let start = Instant::now();
    let outcome = match train(&ds.y, &rc.model, &rc.train, rc.seed) {
        Ok(o) => o,
        Err(e) => {
            manifest.duration_secs = start.elapsed().as_secs_f64();
            manifest.error = Some(e.to_string());
            manifest.write(&dir.join(MANIFEST_FILE))?;
            return Err(e.into());
        }
    };
    manifest.duration_secs = start.elapsed().as_secs_f64();

    let emb = Embedding::from_latent(&outcome.state.latent, &ds.labels)?;
    emb.write(&dir.join(EMBEDDING_FILE))?;
    let trace_path = dir.join(TRACE_FILE);
    std::fs::write(&trace_path, trace_csv(&outcome.trace)).map_err(|e| CliError::io(&trace_path, e))?;
    if emb.dim() == 2 {
        svg::render_to(&emb, &dir.join(PLOT_FILE))?;
    } else {
        manifest.warnings.push(format!("no plot: latent dimension {} is not 2", emb.dim()));
    }

    manifest.status = "ok".into();
    manifest.epochs = outcome.state.epoch;
    manifest.final_objective = Some(outcome.final_objective);
    manifest.final_sigma = Some(outcome.state.log_sigma.exp());
    manifest.final_beta = Some(outcome.state.log_beta.exp());
    manifest.scores = Some(score(&ds, &emb.lorentz, rc.output.metric_k, rc.output.knn_k)?);
    manifest.warnings.extend(outcome.warnings);
    manifest.write(&dir.join(MANIFEST_FILE))?;
    Ok(RunReport { out_dir: dir, manifest })
}

/// Observations as `index,label,y1,…,yD`.
pub fn data_csv(ds: &Dataset) -> String {
    let mut s = String::from("index,label");
    (1..=ds.d()).for_each(|j| write!(s, ",y{j}").unwrap());
    s.push('\n');
    for i in 0..ds.n() {
        write!(s, "{i},{}", ds.labels[i]).unwrap();
        (0..ds.d()).for_each(|j| write!(s, ",{:.16e}", ds.y[(i, j)]).unwrap());
        s.push('\n');
    }
    s
}

/// Tree node codes as `node,depth,c1,…,cD`.
pub fn codes_csv(ds: &Dataset) -> Option<String> {
    if ds.node_codes.is_empty() {
        return None;
    }
    let mut s = String::from("node,depth");
    (1..=ds.node_codes[0].len()).for_each(|j| write!(s, ",c{j}").unwrap());
    s.push('\n');
    for (node, code) in ds.node_codes.iter().enumerate() {
        write!(s, "{node},{}", ds.depth_of_node[node]).unwrap();
        code.iter().for_each(|b| write!(s, ",{b}").unwrap());
        s.push('\n');
    }
    Some(s)
}
