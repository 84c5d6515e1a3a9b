//! Decision stumps: axis-aligned threshold classifiers with values in {-1, +1}.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Weighted errors closer than this are treated as tied.
pub const ERROR_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// +1 when `x[feature] <= threshold`
    Le,
    /// +1 when `x[feature] >= threshold`
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub orientation: Orientation,
}

impl Stump {
    pub fn new(feature: usize, threshold: f64, orientation: Orientation) -> Self {
        Stump {
            feature,
            threshold,
            orientation,
        }
    }

    /// The stump that answers +1 everywhere.
    pub fn always_positive() -> Self {
        Stump::new(0, f64::NEG_INFINITY, Orientation::Ge)
    }

    #[inline]
    pub fn eval_value(&self, v: f64) -> i8 {
        let hit = match self.orientation {
            Orientation::Le => v <= self.threshold,
            Orientation::Ge => v >= self.threshold,
        };
        if hit {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> i8 {
        self.eval_value(x[self.feature])
    }

    /// Canonical total order `(feature, threshold, orientation)`.
    pub fn canonical_cmp(&self, other: &Stump) -> Ordering {
        self.feature
            .cmp(&other.feature)
            .then(self.threshold.total_cmp(&other.threshold))
            .then(self.orientation.cmp(&other.orientation))
    }

    /// Bit-exact identity key, used to merge duplicate terms.
    pub fn key(&self) -> (usize, u64, Orientation) {
        (self.feature, self.threshold.to_bits(), self.orientation)
    }
}

impl fmt::Display for Stump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::Le => "le",
            Orientation::Ge => "ge",
        };
        write!(f, "{},{},{}", self.feature, self.threshold, o)
    }
}

impl FromStr for Stump {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "stump line '{s}' must have 3 fields: feature,threshold,orientation"
            )));
        }
        let feature = parts[0]
            .parse()
            .map_err(|_| Error::invalid(format!("bad feature index '{}'", parts[0])))?;
        let threshold: f64 = parts[1]
            .parse()
            .map_err(|_| Error::invalid(format!("bad threshold '{}'", parts[1])))?;
        if threshold.is_nan() {
            return Err(Error::invalid("threshold is NaN"));
        }
        let orientation = match parts[2] {
            "le" | "LE" => Orientation::Le,
            "ge" | "GE" => Orientation::Ge,
            o => return Err(Error::invalid(format!("bad orientation '{o}'"))),
        };
        Ok(Stump::new(feature, threshold, orientation))
    }
}

/// Per-feature sort order of a dataset, reusable across boosting rounds.
#[derive(Debug, Clone)]
pub struct StumpLearner<'a> {
    ds: &'a LabeledDataset,
    features: Vec<SortedFeature>,
}

#[derive(Debug, Clone)]
struct SortedFeature {
    order: Vec<usize>,
    /// end offsets (exclusive) of runs of equal values within `order`
    group_ends: Vec<usize>,
    /// threshold after each group: midpoints, then +inf after the last
    thresholds: Vec<f64>,
}

impl SortedFeature {
    fn build(ds: &LabeledDataset, feature: usize) -> Self {
        let mut order: Vec<usize> = (0..ds.len()).collect();
        order.sort_by(|&a, &b| {
            ds.value(a, feature)
                .total_cmp(&ds.value(b, feature))
                .then(a.cmp(&b))
        });
        let mut group_ends = Vec::new();
        let mut thresholds = Vec::new();
        for k in 1..=order.len() {
            let prev = ds.value(order[k - 1], feature);
            if k == order.len() {
                group_ends.push(k);
                thresholds.push(f64::INFINITY);
            } else {
                let next = ds.value(order[k], feature);
                if next != prev {
                    group_ends.push(k);
                    thresholds.push(prev + (next - prev) / 2.0);
                }
            }
        }
        SortedFeature {
            order,
            group_ends,
            thresholds,
        }
    }
}

impl<'a> StumpLearner<'a> {
    pub fn new(ds: &'a LabeledDataset) -> Self {
        let features = (0..ds.dim()).map(|j| SortedFeature::build(ds, j)).collect();
        StumpLearner { ds, features }
    }

    pub fn dataset(&self) -> &LabeledDataset {
        self.ds
    }

    /// Exact minimizer of the weighted training error over every feature,
    /// every midpoint threshold plus the two sentinels, and both
    /// orientations. Ties go to the canonically smallest stump.
    pub fn train(&self, weights: &[f64]) -> (Stump, f64) {
        assert_eq!(weights.len(), self.ds.len(), "one weight per example");
        let labels = self.ds.labels();
        let total: f64 = weights.iter().sum();
        let pos_total: f64 = weights
            .iter()
            .zip(labels)
            .filter(|(_, &y)| y == 1)
            .map(|(w, _)| w)
            .sum();

        let mut best = (Stump::always_positive(), f64::INFINITY);
        let mut consider = |stump: Stump, err: f64| {
            if err < best.1 - ERROR_TIE_TOLERANCE {
                best = (stump, err);
            }
        };
        for (j, sf) in self.features.iter().enumerate() {
            // Le at -inf answers -1 everywhere, so it misses every positive
            let mut err_le = pos_total;
            consider(Stump::new(j, f64::NEG_INFINITY, Orientation::Le), err_le);
            consider(
                Stump::new(j, f64::NEG_INFINITY, Orientation::Ge),
                total - err_le,
            );
            let mut start = 0;
            for (&end, &thr) in sf.group_ends.iter().zip(&sf.thresholds) {
                for &i in &sf.order[start..end] {
                    if labels[i] == 1 {
                        err_le -= weights[i];
                    } else {
                        err_le += weights[i];
                    }
                }
                start = end;
                consider(Stump::new(j, thr, Orientation::Le), err_le);
                consider(Stump::new(j, thr, Orientation::Ge), total - err_le);
            }
        }
        best
    }

    /// `sup_h |n^-1 sum_i sigma_i h(X_i)|` over all stumps, for one sign vector.
    pub fn rademacher_sup(&self, signs: &[i8]) -> f64 {
        let n = self.ds.len();
        let total: i64 = signs.iter().map(|&s| i64::from(s)).sum();
        // an Le stump after prefix k scores 2 * prefix - total; Ge is its negation
        let mut best = total.abs();
        for sf in &self.features {
            let mut prefix = 0i64;
            let mut start = 0;
            for &end in &sf.group_ends {
                for &i in &sf.order[start..end] {
                    prefix += i64::from(signs[i]);
                }
                start = end;
                best = best.max((2 * prefix - total).abs());
            }
        }
        best as f64 / n as f64
    }
}

pub fn train_stump(ds: &LabeledDataset, weights: &[f64]) -> Result<(Stump, f64)> {
    if weights.len() != ds.len() {
        return Err(Error::invalid("one weight per example required"));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::invalid("weights must be nonnegative"));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("weights sum to {s}, expected 1")));
    }
    Ok(StumpLearner::new(ds).train(weights))
}

/// Monte-Carlo estimate of the empirical Rademacher complexity of the stump
/// class on `ds`, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

pub fn rademacher_complexity(
    ds: &LabeledDataset,
    num_draws: usize,
    rng: &RngState,
) -> Result<RademacherEstimate> {
    if num_draws == 0 {
        return Err(Error::invalid("num_draws must be at least 1"));
    }
    let learner = StumpLearner::new(ds);
    let base = rng.fork("rademacher");
    let sups: Vec<f64> = (0..num_draws)
        .into_par_iter()
        .map(|k| {
            let mut gen = base.stream(&k.to_string());
            let signs: Vec<i8> = (0..ds.len())
                .map(|_| if gen.random::<bool>() { 1 } else { -1 })
                .collect();
            learner.rademacher_sup(&signs)
        })
        .collect();
    let m = num_draws as f64;
    let estimate = sups.iter().sum::<f64>() / m;
    let std_error = if num_draws > 1 {
        let var = sups.iter().map(|s| (s - estimate).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    Ok(RademacherEstimate {
        estimate,
        std_error,
    })
}

/// Upper bound on the VC dimension of stumps in `R^d`: the smallest `n >= 2`
/// with `2^(n-1) >= (n-1) d + 1`. For `d = 1` this is 2.
pub fn stump_vc_dim(d: usize) -> usize {
    assert!(d >= 1, "dimension must be at least 1");
    if d == 1 {
        return 2;
    }
    // n = 1 satisfies the inequality trivially for every d
    let mut n: usize = 2;
    loop {
        let lhs = 2f64.powi((n - 1) as i32);
        let rhs = ((n - 1) * d + 1) as f64;
        if lhs >= rhs {
            return n;
        }
        n += 1;
    }
}

/// Complexity constants of the stump class in a given dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StumpClassMeta {
    pub dim: usize,
    pub vc_dim: usize,
    /// exponent `V` of the uniform covering-number condition
    pub cover_exponent: f64,
    /// `2V / (V + 2)`
    pub alpha: f64,
}

impl StumpClassMeta {
    /// Uses the VC-subgraph covering exponent `V = 2 (vc_dim - 1)`.
    pub fn for_dim(dim: usize) -> Self {
        let vc_dim = stump_vc_dim(dim);
        Self::with_cover_exponent(dim, 2.0 * (vc_dim as f64 - 1.0))
    }

    pub fn with_cover_exponent(dim: usize, cover_exponent: f64) -> Self {
        assert!(cover_exponent > 0.0, "cover exponent must be positive");
        StumpClassMeta {
            dim,
            vc_dim: stump_vc_dim(dim),
            cover_exponent,
            alpha: 2.0 * cover_exponent / (cover_exponent + 2.0),
        }
    }

    /// Entropy exponent of the symmetric convex hull, `2 (V(H) - 1) / V(H)`.
    pub fn hull_alpha(&self) -> f64 {
        let v = self.vc_dim as f64;
        2.0 * (v - 1.0) / v
    }

    /// Smallest admissible margin exponent, `2 (V(H) - 1) / (2 V(H) - 1)`.
    pub fn gamma_min(&self) -> f64 {
        let v = self.vc_dim as f64;
        2.0 * (v - 1.0) / (2.0 * v - 1.0)
    }
}
