//! `key = value` run configuration with `[section]` headers and `#`
//! comments.
//!
//! ```text
//! [dataset]
//! kind = sbt
//! depth = 4
//!
//! [model]
//! variant = full
//! kappa = 100
//!
//! [output]
//! dir = runs/sbt4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hgplvm::datasets::{SbtSpec, SpiralSpec};
use hgplvm::{ModelConfig, TrainConfig, Variant};

use crate::error::{CliError, Result};

/// Every accepted key. Keys without a default are required.
const KEYS: &[(&str, Option<&str>)] = &[
    ("dataset.kind", None),
    ("dataset.seed", Some("")),
    ("dataset.depth", Some("4")),
    ("dataset.samples_per_node", Some("20")),
    ("dataset.flip_prob", Some("0.1")),
    ("dataset.n_spirals", Some("10")),
    ("dataset.points_per_spiral", Some("80")),
    ("dataset.ambient_dim", Some("20")),
    ("dataset.noise", Some("0.05")),
    ("dataset.angular_rate", Some("9.42477796076938")),
    ("model.variant", None),
    ("model.latent_dim", Some("2")),
    ("model.inducing", Some("50")),
    ("model.mc_samples", Some("5")),
    ("model.kappa", Some("100")),
    ("model.sigma", Some("1")),
    ("model.beta", Some("100")),
    ("model.jitter", Some("1e-8")),
    ("train.max_iter", Some("1000")),
    ("train.lr_latent", Some("5e-4")),
    ("train.lr_hyper", Some("5e-3")),
    ("train.warmup_epochs", Some("10")),
    ("train.resample_every", Some("10")),
    ("train.variance_freeze_epochs", Some("100")),
    ("train.init_scale", Some("1e-3")),
    ("train.init_variance", Some("1e-5")),
    ("train.max_step", Some("1")),
    ("train.learn_sigma", Some("true")),
    ("train.learn_beta", Some("true")),
    ("output.dir", None),
    ("output.metric_k", Some("3")),
    ("output.knn_k", Some("5")),
];

/// Unresolved `section.key → value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| CliError::Parse { path: path.to_path_buf(), line: idx + 1, reason };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err(format!("unterminated section header '{line}'")))?;
                section = Some(name.trim().to_string());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let sec = section.as_deref().ok_or_else(|| err(format!("key '{}' appears before any [section]", k.trim())))?;
            let key = format!("{sec}.{}", k.trim());
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(err(format!("duplicate key '{key}'")));
            }
        }
        let cfg = Self { entries };
        cfg.check_known()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override '{assignment}' must look like section.key=value")))?;
        let key = k.trim().to_string();
        if !KEYS.iter().any(|(name, _)| *name == key) {
            return Err(CliError::InvalidField { key, reason: "unknown key".into() });
        }
        self.entries.insert(key, v.trim().to_string());
        Ok(())
    }

    fn check_known(&self) -> Result<()> {
        match self.entries.keys().find(|k| !KEYS.iter().any(|(name, _)| name == k)) {
            Some(k) => Err(CliError::InvalidField { key: k.clone(), reason: "unknown key".into() }),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Result<String> {
        if let Some(v) = self.entries.get(key) {
            return Ok(v.clone());
        }
        match KEYS.iter().find(|(name, _)| *name == key) {
            Some((_, Some(default))) => Ok(default.to_string()),
            _ => Err(CliError::MissingField(key.to_string())),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.raw(key)?;
        v.parse().map_err(|e: T::Err| CliError::InvalidField { key: key.to_string(), reason: format!("'{v}': {e}") })
    }

    pub fn resolve(&self, seed: u64) -> Result<RunConfig> {
        let data_seed = match self.raw("dataset.seed")?.as_str() {
            "" => seed,
            _ => self.get("dataset.seed")?,
        };
        let dataset = match self.raw("dataset.kind")?.as_str() {
            "sbt" => DatasetConfig::Sbt(SbtSpec {
                depth: self.get("dataset.depth")?,
                samples_per_node: self.get("dataset.samples_per_node")?,
                flip_prob: self.get("dataset.flip_prob")?,
                seed: data_seed,
            }),
            "spiral" => DatasetConfig::Spiral(SpiralSpec {
                n_spirals: self.get("dataset.n_spirals")?,
                points_per_spiral: self.get("dataset.points_per_spiral")?,
                ambient_dim: self.get("dataset.ambient_dim")?,
                noise: self.get("dataset.noise")?,
                angular_rate: self.get("dataset.angular_rate")?,
                seed: data_seed,
            }),
            other => {
                return Err(CliError::InvalidField {
                    key: "dataset.kind".into(),
                    reason: format!("'{other}' (expected sbt or spiral)"),
                })
            }
        };
        let variant: Variant = self
            .raw("model.variant")?
            .parse()
            .map_err(|e: hgplvm::Error| CliError::InvalidField { key: "model.variant".into(), reason: e.to_string() })?;
        let model = ModelConfig {
            variant,
            latent_dim: self.get("model.latent_dim")?,
            inducing: self.get("model.inducing")?,
            mc_samples: self.get("model.mc_samples")?,
            kappa: self.get("model.kappa")?,
            sigma_init: self.get("model.sigma")?,
            beta_init: self.get("model.beta")?,
            jitter: self.get("model.jitter")?,
        };
        let train = TrainConfig {
            max_iter: self.get("train.max_iter")?,
            lr_latent: self.get("train.lr_latent")?,
            lr_hyper: self.get("train.lr_hyper")?,
            warmup_epochs: self.get("train.warmup_epochs")?,
            resample_every: self.get("train.resample_every")?,
            variance_freeze_epochs: self.get("train.variance_freeze_epochs")?,
            init_scale: self.get("train.init_scale")?,
            init_variance: self.get("train.init_variance")?,
            max_step: self.get("train.max_step")?,
            learn_sigma: self.get("train.learn_sigma")?,
            learn_beta: self.get("train.learn_beta")?,
        };
        train.validate().map_err(|e| field_error("train", e))?;
        let output = OutputConfig {
            dir: PathBuf::from(self.raw("output.dir")?),
            metric_k: self.get("output.metric_k")?,
            knn_k: self.get("output.knn_k")?,
        };
        Ok(RunConfig { dataset, model, train, output, seed })
    }
}

pub(crate) fn field_error(section: &str, e: hgplvm::Error) -> CliError {
    match e {
        hgplvm::Error::Parameter { name, reason } => CliError::InvalidField { key: format!("{section}.{name}"), reason },
        other => CliError::Core(other),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetConfig {
    Sbt(SbtSpec),
    Spiral(SpiralSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Neighbourhood size for trustworthiness and continuity.
    pub metric_k: usize,
    pub knn_k: usize,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub output: OutputConfig,
    pub seed: u64,
}

impl RunConfig {
    /// Every resolved parameter as `section.key → value`, for manifests.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match &self.dataset {
            DatasetConfig::Sbt(s) => {
                put("dataset.kind", "sbt".into());
                put("dataset.depth", s.depth.to_string());
                put("dataset.samples_per_node", s.samples_per_node.to_string());
                put("dataset.flip_prob", s.flip_prob.to_string());
                put("dataset.seed", s.seed.to_string());
            }
            DatasetConfig::Spiral(s) => {
                put("dataset.kind", "spiral".into());
                put("dataset.n_spirals", s.n_spirals.to_string());
                put("dataset.points_per_spiral", s.points_per_spiral.to_string());
                put("dataset.ambient_dim", s.ambient_dim.to_string());
                put("dataset.noise", s.noise.to_string());
                put("dataset.angular_rate", s.angular_rate.to_string());
                put("dataset.seed", s.seed.to_string());
            }
        }
        let md = &self.model;
        put("model.variant", md.variant.name().into());
        put("model.latent_dim", md.latent_dim.to_string());
        put("model.inducing", md.inducing.to_string());
        put("model.mc_samples", md.mc_samples.to_string());
        put("model.kappa", md.kappa.to_string());
        put("model.sigma", md.sigma_init.to_string());
        put("model.beta", md.beta_init.to_string());
        put("model.jitter", md.jitter.to_string());
        let t = &self.train;
        put("train.max_iter", t.max_iter.to_string());
        put("train.lr_latent", t.lr_latent.to_string());
        put("train.lr_hyper", t.lr_hyper.to_string());
        put("train.warmup_epochs", t.warmup_epochs.to_string());
        put("train.resample_every", t.resample_every.to_string());
        put("train.variance_freeze_epochs", t.variance_freeze_epochs.to_string());
        put("train.init_scale", t.init_scale.to_string());
        put("train.init_variance", t.init_variance.to_string());
        put("train.max_step", t.max_step.to_string());
        put("train.learn_sigma", t.learn_sigma.to_string());
        put("train.learn_beta", t.learn_beta.to_string());
        put("output.dir", self.output.dir.display().to_string());
        put("output.metric_k", self.output.metric_k.to_string());
        put("output.knn_k", self.output.knn_k.to_string());
        m
    }
}
