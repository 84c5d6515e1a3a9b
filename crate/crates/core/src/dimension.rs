//! Approximate Delta-dimension of a combination and the bounds that trade it
//! off against the margin distribution.

use std::collections::HashMap;

use crate::ensemble::ConvexCombination;
use crate::error::{Error, Result};
use crate::margins::{MarginProfile, Supremum};

/// Combinations whose absolute weights sum to 1 within this are proper.
pub const PROPER_TOLERANCE: f64 = 1e-9;

const DELTA_HAT_RTOL: f64 = 1e-10;

/// Absolute weights in nonincreasing order with their tail sums
/// `tail[d] = sum_{j > d} |lambda_j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpectrum {
    sorted_abs: Vec<f64>,
    tails: Vec<f64>,
}

impl WeightSpectrum {
    /// Spectrum of a combination after merging bit-identical stumps.
    pub fn from_combination(f: &ConvexCombination) -> Self {
        let mut merged: HashMap<_, f64> = HashMap::new();
        let mut order = Vec::new();
        for (w, s) in f.terms() {
            let key = s.key();
            match merged.get_mut(&key) {
                Some(acc) => *acc += w,
                None => {
                    merged.insert(key, *w);
                    order.push(key);
                }
            }
        }
        Self::from_weights(&order.iter().map(|k| merged[k]).collect::<Vec<_>>())
    }

    /// Spectrum of raw weights, without merging; zero weights are dropped.
    pub fn from_weights(weights: &[f64]) -> Self {
        let mut sorted_abs: Vec<f64> = weights
            .iter()
            .map(|w| w.abs())
            .filter(|&w| w > 0.0)
            .collect();
        sorted_abs.sort_by(|a, b| b.total_cmp(a));
        let mut tails = vec![0.0; sorted_abs.len() + 1];
        for d in (0..sorted_abs.len()).rev() {
            tails[d] = tails[d + 1] + sorted_abs[d];
        }
        WeightSpectrum { sorted_abs, tails }
    }

    /// Number of nonzero merged weights.
    pub fn len(&self) -> usize {
        self.sorted_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_abs.is_empty()
    }

    pub fn sorted_abs(&self) -> &[f64] {
        &self.sorted_abs
    }

    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    pub fn total(&self) -> f64 {
        self.tails[0]
    }

    pub fn is_proper(&self) -> bool {
        (self.total() - 1.0).abs() <= PROPER_TOLERANCE
    }
}

/// `d(f; Delta)`: the smallest `d` with `tail[d] <= Delta`.
pub fn delta_dimension(spec: &WeightSpectrum, delta: f64) -> usize {
    spec.tails.partition_point(|&t| t > delta)
}

/// Exponent and sample size of the Delta-bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBoundParams {
    /// `2V / (V + 2)`
    pub alpha: f64,
    pub n: usize,
}

impl DeltaBoundParams {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || n == 0 {
            return Err(Error::invalid(
                "Delta-bound needs alpha in (0, 2) and n >= 1",
            ));
        }
        Ok(DeltaBoundParams { alpha, n })
    }

    /// `2 alpha / (alpha + 2)`
    pub fn margin_exponent(&self) -> f64 {
        2.0 * self.alpha / (self.alpha + 2.0)
    }

    /// `(Delta / delta)^{2a/(a+2)} n^{-2/(a+2)}`
    pub fn margin_term(&self, big_delta: f64, delta: f64) -> f64 {
        (big_delta / delta).powf(self.margin_exponent())
            * (self.n as f64).powf(-2.0 / (self.alpha + 2.0))
    }

    /// `(d/n) (ln(1/delta) + ln(n e^2 / d))`, 0 at `d = 0`.
    pub fn dimension_term(&self, d: f64, delta: f64) -> f64 {
        self.dimension_term_scaled(d, d, delta)
    }

    fn dimension_term_scaled(&self, lead: f64, d: f64, delta: f64) -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        let n = self.n as f64;
        lead / n * ((1.0 / delta).ln() + (n * std::f64::consts::E.powi(2) / d).ln())
    }

    pub fn log_floor(&self) -> f64 {
        let n = self.n as f64;
        2.0 * n.ln() / n
    }
}

/// Minimum of a Delta-bound objective and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimizer {
    pub value: f64,
    pub dimension: usize,
    pub big_delta: f64,
}

/// Minimizes `objective(d(f; Delta), Delta)` over `Delta in [0, 1]`.
///
/// `d(f; .)` is a right-continuous step function that drops at each tail sum
/// and the objectives are increasing in `Delta`, so the infimum is attained
/// at some `Delta = tail[d]`. A proper combination's `tail[0]` is read as 1.
fn minimize_over_tails(
    spec: &WeightSpectrum,
    max_dimension: Option<usize>,
    objective: impl Fn(usize, f64) -> f64,
) -> Minimizer {
    let mut best = Minimizer {
        value: f64::INFINITY,
        dimension: 0,
        big_delta: 0.0,
    };
    for (d, &tail) in spec.tails.iter().enumerate() {
        if tail > 1.0 + PROPER_TOLERANCE {
            continue;
        }
        if max_dimension.is_some_and(|m| d > m) {
            break;
        }
        let big_delta = tail.min(1.0);
        let dim = delta_dimension(spec, tail);
        let v = objective(dim, big_delta);
        if v < best.value {
            best = Minimizer {
                value: v,
                dimension: dim,
                big_delta,
            };
        }
    }
    best
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta = {delta} outside (0, 1)")))
    }
}

/// `eps_n(f; delta)`: the minimized dimension-plus-margin objective over
/// `{Delta : d(f; Delta) <= n}`, floored at `2 ln n / n`.
pub fn eps_n_minimizer(
    spec: &WeightSpectrum,
    delta: f64,
    params: &DeltaBoundParams,
) -> Result<Minimizer> {
    check_delta(delta)?;
    let mut m = minimize_over_tails(spec, Some(params.n), |d, big| {
        params.dimension_term(d as f64, delta) + params.margin_term(big, delta)
    });
    m.value = m.value.max(params.log_floor());
    Ok(m)
}

pub fn eps_n(spec: &WeightSpectrum, delta: f64, params: &DeltaBoundParams) -> Result<f64> {
    Ok(eps_n_minimizer(spec, delta, params)?.value)
}

/// `delta_hat_n(f) = sup{delta in (0, 1/2) : P_n{f <= delta} <= eps_n(f; delta)}`.
///
/// The left side is nondecreasing and the right side nonincreasing in
/// `delta`, so the feasible set is an initial segment. Its end is bracketed
/// by a binary search over the sorted margins and refined by bisection to
/// relative accuracy 1e-10 (geometric while the bracket spans more than a
/// factor of 2). Empty only when no positive `f64` is feasible.
pub fn delta_hat(
    profile: &MarginProfile,
    spec: &WeightSpectrum,
    params: &DeltaBoundParams,
) -> Result<Supremum> {
    let n = profile.len() as f64;
    let eps = |d: f64| eps_n(spec, d, params);
    let feasible = |d: f64| -> Result<bool> { Ok(profile.cdf(d) <= eps(d)?) };

    // limit at 1/2 from the left uses the strict count
    if profile.count_lt(0.5) as f64 / n <= eps(0.5)? {
        return Ok(Supremum {
            value: 0.5,
            feasible: true,
        });
    }
    let inside: Vec<f64> = profile
        .sorted()
        .iter()
        .copied()
        .filter(|&m| m > 0.0 && m < 0.5)
        .collect();
    // first margin point that is infeasible
    let (mut lo_idx, mut hi_idx) = (0usize, inside.len());
    while lo_idx < hi_idx {
        let mid = (lo_idx + hi_idx) / 2;
        if feasible(inside[mid])? {
            lo_idx = mid + 1;
        } else {
            hi_idx = mid;
        }
    }
    let mut lo = if lo_idx == 0 { 0.0 } else { inside[lo_idx - 1] };
    let mut hi = inside.get(lo_idx).copied().unwrap_or(0.5);
    if lo == 0.0 {
        // eps_n grows like ln(1/delta)/n near 0, so the supremum can be tiny
        if !feasible(f64::MIN_POSITIVE)? {
            return Ok(Supremum::empty());
        }
        lo = f64::MIN_POSITIVE;
    }
    while hi - lo > DELTA_HAT_RTOL * hi {
        let mid = if hi > 2.0 * lo {
            lo.sqrt() * hi.sqrt()
        } else {
            lo + (hi - lo) / 2.0
        };
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Supremum {
        value: lo,
        feasible: true,
    })
}

/// The Delta-bound `eps_n(f; delta_hat_n(f))` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    /// infinite when `delta_hat` is empty
    pub value: f64,
    pub delta_hat: Supremum,
    /// Delta-dimension and Delta at the minimizing candidate
    pub dimension: usize,
    pub big_delta: f64,
}

pub fn delta_bound(
    profile: &MarginProfile,
    spec: &WeightSpectrum,
    params: &DeltaBoundParams,
) -> Result<DeltaBound> {
    let dh = delta_hat(profile, spec, params)?;
    if !dh.feasible {
        return Ok(DeltaBound {
            value: f64::INFINITY,
            delta_hat: dh,
            dimension: 0,
            big_delta: 0.0,
        });
    }
    let m = eps_n_minimizer(spec, dh.value, params)?;
    Ok(DeltaBound {
        value: m.value,
        delta_hat: dh,
        dimension: m.dimension,
        big_delta: m.big_delta,
    })
}

/// Relative weight `zeta` of the dimension term and overall scale `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighting {
    pub zeta: f64,
    pub k: f64,
}

impl Weighting {
    pub fn new(zeta: f64, k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) || !(k > 0.0) {
            return Err(Error::invalid("weighting needs zeta in [0, 1] and K > 0"));
        }
        Ok(Weighting { zeta, k })
    }
}

/// `K inf_Delta [zeta * dimension term + (1 - zeta) * margin term]`, with no
/// logarithmic floor and no restriction `d <= n`.
pub fn weighted_eps(
    spec: &WeightSpectrum,
    delta: f64,
    params: &DeltaBoundParams,
    w: &Weighting,
) -> Result<f64> {
    normalized_eps(spec, delta, params, w, 1)
}

/// [`weighted_eps`] with the leading `d` of the dimension term divided by the
/// number of combined classifiers; the `d` inside the logarithm is kept.
pub fn normalized_eps(
    spec: &WeightSpectrum,
    delta: f64,
    params: &DeltaBoundParams,
    w: &Weighting,
    total_classifiers: usize,
) -> Result<f64> {
    check_delta(delta)?;
    if total_classifiers == 0 {
        return Err(Error::invalid("number of classifiers must be at least 1"));
    }
    let t = total_classifiers as f64;
    let m = minimize_over_tails(spec, None, |d, big| {
        let d = d as f64;
        w.zeta * params.dimension_term_scaled(d / t, d, delta)
            + (1.0 - w.zeta) * params.margin_term(big, delta)
    });
    Ok(w.k * m.value)
}
