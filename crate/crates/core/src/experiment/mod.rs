//! Experiment orchestration behind the command-line tool: configuration,
//! per-round bound reports, the gamma-margin ratio study, DOOM-LP
//! comparisons, data generation and Rademacher estimates.

mod config;
mod doom;
mod report;
mod run;

use std::path::Path;

pub use config::{Algorithm, DatasetKind, ExperimentConfig};
pub use doom::{cmd_doomlp, comparison_reports, run_doom};
pub use report::{format_value, BoundReport};
pub use run::{
    average_reports, class_meta, cmd_ratio, cmd_run, evaluate_trace, evaluation_rounds,
    gamma_label, gamma_list, prepare_sample, report_columns, train, train_repetitions, Artifacts,
    Repetition, Sample,
};

use crate::data::{self, LabeledDataset};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::stumps::{rademacher_complexity, RademacherEstimate};

/// How DOOM-LP picks its margin scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoomDelta {
    Fixed(f64),
    /// minimize the Rademacher margin bound over the default grid
    Auto {
        draws: usize,
        seed: u64,
    },
}

/// A synthetic sample request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: DatasetKind,
    pub n: usize,
    pub dim: usize,
    pub num_intervals: usize,
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<LabeledDataset> {
    let rng = RngState::new(seed).fork("gen");
    match spec.kind {
        DatasetKind::Intervals => Ok(data::gen_intervals(spec.num_intervals, spec.n, &rng)?.0),
        DatasetKind::Twonorm => data::gen_twonorm(spec.n, spec.dim, &rng),
        DatasetKind::KrkpLike => data::gen_krkp_like(spec.n, &rng),
        DatasetKind::Csv => Err(Error::invalid("csv is not a generator")),
    }
}

pub fn cmd_gen(spec: &GenSpec, seed: u64, out: &Path) -> Result<LabeledDataset> {
    let ds = generate(spec, seed)?;
    ds.save_csv(out)?;
    Ok(ds)
}

pub fn cmd_rademacher(ds: &LabeledDataset, draws: usize, seed: u64) -> Result<RademacherEstimate> {
    rademacher_complexity(ds, draws, &RngState::new(seed))
}
