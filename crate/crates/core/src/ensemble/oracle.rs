use crate::data::IntervalsConcept;
use crate::error::{Error, Result};

use super::ConvexCombination;

/// Law of the margin `f0(X) f(X)` for `X ~ U[0,1]`, as atoms.
///
/// `f` is piecewise constant between stump thresholds and `f0` between
/// concept endpoints, so the margin takes finitely many values; each atom
/// carries the Lebesgue measure of the cells where it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMarginDistribution {
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ExactMarginDistribution {
    pub fn new(f: &ConvexCombination, concept: &IntervalsConcept) -> Result<Self> {
        if let Some((_, s)) = f.terms().iter().find(|(_, s)| s.feature != 0) {
            return Err(Error::invalid(format!(
                "exact oracle needs one-dimensional stumps, found feature {}",
                s.feature
            )));
        }
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        cuts.extend(concept.endpoints());
        cuts.extend(
            f.terms()
                .iter()
                .map(|(_, s)| s.threshold)
                .filter(|c| *c > 0.0 && *c < 1.0),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut atoms: Vec<(f64, f64)> = cuts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = w[0] + (w[1] - w[0]) / 2.0;
                let m = f64::from(concept.label(mid)) * f.eval_value(mid);
                (m, w[1] - w[0])
            })
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut cumulative: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (v, mass) in atoms {
            acc += mass;
            if values.last() == Some(&v) {
                *cumulative.last_mut().unwrap() = acc;
            } else {
                values.push(v);
                cumulative.push(acc);
            }
        }
        Ok(ExactMarginDistribution { values, cumulative })
    }

    /// `P{f0 f <= delta}`.
    pub fn cdf(&self, delta: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= delta);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    pub fn generalization_error(&self) -> f64 {
        self.cdf(0.0)
    }

    /// Distinct margin values in increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `P{margin <= values[k]}` for each `k`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// `P{y f(x) <= delta}` under the uniform law on [0,1] labeled by `concept`.
pub fn exact_oracle_1d(
    f: &ConvexCombination,
    concept: &IntervalsConcept,
    delta: f64,
) -> Result<f64> {
    Ok(ExactMarginDistribution::new(f, concept)?.cdf(delta))
}
