//! Weighted votes of stumps: the combined classifier, the training loops
//! that build it, and the exact error oracle for one-dimensional problems.

mod boosting;
mod oracle;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub use boosting::{
    adaboost, adaboost_observed, bagging, RoundRecord, StopReason, TrainingTrace, EPS_CLAMP,
};
pub use oracle::{exact_oracle_1d, ExactMarginDistribution};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::stumps::Stump;

/// `f = sum_t lambda_t h_t` with `sum_t |lambda_t| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombination {
    terms: Vec<(f64, Stump)>,
}

impl ConvexCombination {
    /// Normalizes the weights by their absolute sum.
    pub fn new(terms: Vec<(f64, Stump)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("a combination needs at least one term"));
        }
        if terms.iter().any(|(w, _)| !w.is_finite()) {
            return Err(Error::invalid("combination weights must be finite"));
        }
        let norm: f64 = terms.iter().map(|(w, _)| w.abs()).sum();
        if norm <= 0.0 {
            return Err(Error::invalid("combination weights are all zero"));
        }
        Ok(ConvexCombination {
            terms: terms.into_iter().map(|(w, s)| (w / norm, s)).collect(),
        })
    }

    pub fn single(stump: Stump) -> Self {
        ConvexCombination {
            terms: vec![(1.0, stump)],
        }
    }

    pub fn terms(&self) -> &[(f64, Stump)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|(w, _)| *w).collect()
    }

    pub fn stumps(&self) -> Vec<Stump> {
        self.terms.iter().map(|(_, s)| *s).collect()
    }

    /// Same stumps, new weights (renormalized).
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.terms.len() {
            return Err(Error::invalid("one weight per term required"));
        }
        Self::new(
            weights
                .iter()
                .zip(&self.terms)
                .map(|(&w, (_, s))| (w, *s))
                .collect(),
        )
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(w, s)| w * f64::from(s.eval(x)))
            .sum()
    }

    pub fn eval_value(&self, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|(w, s)| w * f64::from(s.eval_value(v)))
            .sum()
    }

    /// Model file: header, then `weight,feature,threshold,orientation` per term.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "weight,feature,threshold,orientation")?;
        for (w, s) in &self.terms {
            writeln!(out, "{w},{s}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(File::create(path)?)
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut terms = Vec::new();
        for (row, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("weight") {
                continue;
            }
            let (w, rest) = line.split_once(',').ok_or_else(|| Error::Parse {
                row,
                column: 0,
                message: format!("malformed model line '{line}'"),
            })?;
            let w: f64 = w.trim().parse().map_err(|_| Error::Parse {
                row,
                column: 0,
                message: format!("bad weight '{w}'"),
            })?;
            let stump: Stump = rest.parse().map_err(|e: Error| Error::Parse {
                row,
                column: 1,
                message: e.to_string(),
            })?;
            terms.push((w, stump));
        }
        let norm: f64 = terms.iter().map(|(w, _)| w.abs()).sum();
        if (norm - 1.0).abs() <= 1e-12 && terms.iter().all(|(w, _)| w.is_finite()) {
            return Ok(ConvexCombination { terms });
        }
        Self::new(terms)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Data {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::read(BufReader::new(file))
    }
}

/// Margins `y_i f(x_i)` and the zero-one error `P_n{yf <= 0}`.
pub fn evaluate(f: &ConvexCombination, ds: &LabeledDataset) -> Result<(Vec<f64>, f64)> {
    if let Some((_, s)) = f.terms().iter().find(|(_, s)| s.feature >= ds.dim()) {
        return Err(Error::invalid(format!(
            "stump uses feature {} but the data has {} columns",
            s.feature,
            ds.dim()
        )));
    }
    let margins: Vec<f64> = ds
        .rows()
        .zip(ds.labels())
        .map(|(x, &y)| f64::from(y) * f.eval(x))
        .collect();
    let err = zero_one_error(&margins);
    Ok((margins, err))
}

pub fn zero_one_error(margins: &[f64]) -> f64 {
    margins.iter().filter(|&&m| m <= 0.0).count() as f64 / margins.len() as f64
}

/// Running unnormalized scores `sum_s w_s h_s(x_i)` over a fixed dataset, so
/// margins of every intermediate combination cost O(n) per added stump.
#[derive(Debug, Clone)]
pub struct ScoreAccumulator<'a> {
    ds: &'a LabeledDataset,
    scores: Vec<f64>,
    norm: f64,
}

impl<'a> ScoreAccumulator<'a> {
    pub fn new(ds: &'a LabeledDataset) -> Self {
        ScoreAccumulator {
            ds,
            scores: vec![0.0; ds.len()],
            norm: 0.0,
        }
    }

    pub fn push(&mut self, weight: f64, stump: &Stump) {
        for (score, x) in self.scores.iter_mut().zip(self.ds.rows()) {
            *score += weight * f64::from(stump.eval(x));
        }
        self.norm += weight.abs();
    }

    pub fn margins(&self) -> Vec<f64> {
        self.scores
            .iter()
            .zip(self.ds.labels())
            .map(|(s, &y)| f64::from(y) * s / self.norm)
            .collect()
    }
}
