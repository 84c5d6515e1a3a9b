use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::CsvOptions;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    Intervals,
    Twonorm,
    KrkpLike,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Adaboost,
    Bagging,
}

/// Experiment description, read from a flat kebab-case JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    /// intervals
    pub num_intervals: usize,
    /// intervals, twonorm
    pub train_size: usize,
    /// twonorm
    pub test_size: usize,
    /// twonorm
    pub dim: usize,
    /// krkp-like
    pub sample_size: usize,
    /// csv
    pub data_path: Option<PathBuf>,
    pub label_column: Option<usize>,
    pub positive_label: String,
    pub has_header: bool,
    /// krkp-like, csv
    pub train_fraction: f64,

    pub algorithm: Algorithm,
    pub rounds: usize,
    /// evaluate bounds every k-th round (plus the first and last)
    pub every: usize,
    pub gammas: Vec<f64>,
    pub include_gamma_min: bool,
    pub gamma_bound: bool,
    pub delta_bound: bool,
    pub weighted_bound: bool,
    pub normalized_bound: bool,
    pub vc_bound: bool,
    pub doom_lp: bool,
    /// `None` picks delta from the Rademacher margin bound
    pub doom_delta: Option<f64>,
    pub rademacher_draws: usize,
    pub zeta: f64,
    pub k: f64,
    pub t: f64,
    /// covering exponent V; default 2 (vc - 1)
    pub cover_exponent: Option<f64>,

    pub seed: u64,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    pub save_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetKind::Intervals,
            num_intervals: 20,
            train_size: 1000,
            test_size: 2000,
            dim: 20,
            sample_size: 3196,
            data_path: None,
            label_column: None,
            positive_label: "1".into(),
            has_header: true,
            train_fraction: 0.9,
            algorithm: Algorithm::Adaboost,
            rounds: 500,
            every: 1,
            gammas: vec![1.0, 0.8, 2.0 / 3.0],
            include_gamma_min: false,
            gamma_bound: true,
            delta_bound: true,
            weighted_bound: false,
            normalized_bound: false,
            vc_bound: false,
            doom_lp: false,
            doom_delta: None,
            rademacher_draws: 100,
            zeta: 0.4,
            k: 1.14,
            t: 1.0,
            cover_exponent: None,
            seed: 0,
            repetitions: 1,
            output_dir: PathBuf::from("out"),
            save_traces: true,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates; every unrecognized key is reported at once.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(map) = &value else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        let known = serde_json::to_value(ExperimentConfig::default())?;
        let known = known.as_object().expect("config serializes to an object");
        let mut unknown: Vec<String> = map
            .keys()
            .filter(|k| !known.contains_key(*k))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            unknown.sort();
            return Err(Error::UnknownConfigKeys(unknown));
        }
        let cfg: ExperimentConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if let Some(g) = self.gammas.iter().find(|g| !(**g > 0.0 && **g <= 1.0)) {
            return fail(format!("gamma {g} outside (0, 1]"));
        }
        if self.repetitions == 0 || self.rounds == 0 || self.every == 0 {
            return fail("repetitions, rounds and every must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.zeta) || !(self.k > 0.0) || !(self.t > 0.0) {
            return fail("need zeta in [0, 1], k > 0 and t > 0".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!(
                "train-fraction {} outside (0, 1)",
                self.train_fraction
            ));
        }
        if self.train_size == 0 || self.test_size == 0 || self.dim == 0 || self.sample_size == 0 {
            return fail("sizes and dim must be at least 1".into());
        }
        if self.num_intervals == 0 {
            return fail("num-intervals must be at least 1".into());
        }
        if self.rademacher_draws == 0 {
            return fail("rademacher-draws must be at least 1".into());
        }
        if let Some(d) = self.doom_delta {
            if !(d > 0.0 && d <= 1.0) {
                return fail(format!("doom-delta {d} outside (0, 1]"));
            }
        }
        if let Some(v) = self.cover_exponent {
            if !(v > 0.0) {
                return fail(format!("cover-exponent {v} must be positive"));
            }
        }
        if self.dataset == DatasetKind::Csv && self.data_path.is_none() {
            return fail("dataset csv requires data-path".into());
        }
        Ok(())
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            label_column: self.label_column,
            positive_label: self.positive_label.clone(),
            has_header: self.has_header,
        }
    }
}
