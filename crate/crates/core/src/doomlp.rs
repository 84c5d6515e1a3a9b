//! Partition-based LP descent on the piecewise-linear margin cost, and the
//! Rademacher margin bound it targets.

use crate::data::LabeledDataset;
use crate::ensemble::ConvexCombination;
use crate::error::{Error, Result};
use crate::lp::{solve, LpStatus, StandardLp};
use crate::margins::MarginProfile;
use crate::stumps::Stump;

/// `|M_i| <= BOUNDARY_TOL` counts as `M_i = 0`, likewise for `delta`.
pub const BOUNDARY_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// `phi_delta(m)`: 1 for `m <= 0`, `1 - m/delta` on `(0, delta]`, 0 beyond.
pub fn phi_delta(m: f64, delta: f64) -> f64 {
    if m <= 0.0 {
        1.0
    } else if m <= delta {
        1.0 - m / delta
    } else {
        0.0
    }
}

fn mean_cost(margins: &[f64], delta: f64) -> f64 {
    margins.iter().map(|&m| phi_delta(m, delta)).sum::<f64>() / margins.len() as f64
}

/// `P_n phi_delta(yf)`
pub fn margin_cost(profile: &MarginProfile, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!(
            "margin cost needs delta > 0, got {delta}"
        )));
    }
    Ok(mean_cost(profile.sorted(), delta))
}

/// `{0.02 j : j = 1..50}`
pub fn auto_delta_grid() -> Vec<f64> {
    (1..=50).map(|j| 0.02 * j as f64).collect()
}

/// Minimum over `delta` in the grid of
/// `P_n phi_delta + 8 R / delta + sqrt(ln log2(2/delta) / n)`, plus `t / sqrt(n)`.
/// Returns `(argmin delta, value)`.
pub fn rademacher_margin_bound(
    profile: &MarginProfile,
    rad_estimate: f64,
    t: f64,
    delta_grid: &[f64],
) -> Result<(f64, f64)> {
    if delta_grid.is_empty() {
        return Err(Error::invalid("delta grid is empty"));
    }
    if !(rad_estimate >= 0.0) {
        return Err(Error::invalid("Rademacher estimate must be nonnegative"));
    }
    let n = profile.len() as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for &delta in delta_grid {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(format!("grid value {delta} outside (0, 1]")));
        }
        let v = mean_cost(profile.sorted(), delta)
            + 8.0 * rad_estimate / delta
            + ((2.0 / delta).log2().ln() / n).sqrt();
        if v < best.1 {
            best = (delta, v);
        }
    }
    Ok((best.0, best.1 + t / n.sqrt()))
}

/// Signed votes `Y_i h_k(X_i)`, row-major `n x T`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteMatrix {
    n: usize,
    t: usize,
    votes: Vec<f64>,
}

impl VoteMatrix {
    pub fn new(ds: &LabeledDataset, classifiers: &[Stump]) -> Result<Self> {
        if classifiers.is_empty() {
            return Err(Error::invalid("at least one base classifier required"));
        }
        if let Some(s) = classifiers.iter().find(|s| s.feature >= ds.dim()) {
            return Err(Error::invalid(format!(
                "stump feature {} out of range",
                s.feature
            )));
        }
        let mut votes = Vec::with_capacity(ds.len() * classifiers.len());
        for (x, &y) in ds.rows().zip(ds.labels()) {
            votes.extend(classifiers.iter().map(|h| f64::from(y * h.eval(x))));
        }
        Ok(VoteMatrix {
            n: ds.len(),
            t: classifiers.len(),
            votes,
        })
    }

    pub fn num_examples(&self) -> usize {
        self.n
    }

    pub fn num_classifiers(&self) -> usize {
        self.t
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.votes[i * self.t..(i + 1) * self.t]
    }

    pub fn margins(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(w).map(|(v, w)| v * w).sum())
            .collect()
    }

    /// `b_k = -sum_{i in S_l} Y_i h_k(X_i)`
    pub fn objective(&self, s_l: &[usize]) -> Vec<f64> {
        let mut b = vec![0.0; self.t];
        for &i in s_l {
            for (bk, v) in b.iter_mut().zip(self.row(i)) {
                *bk -= v;
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginPartition {
    pub s_minus: Vec<usize>,
    pub s_l: Vec<usize>,
    pub s_0: Vec<usize>,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Minus,
    Linear,
    Zero,
}

impl MarginPartition {
    /// `M <= 0` goes to `S_-`, `M >= delta` to `S_0`, the rest to `S_l`.
    pub fn from_margins(margins: &[f64], delta: f64) -> Self {
        let sides: Vec<Side> = margins
            .iter()
            .map(|&m| {
                if m <= 0.0 {
                    Side::Minus
                } else if m >= delta {
                    Side::Zero
                } else {
                    Side::Linear
                }
            })
            .collect();
        Self::from_sides(&sides, delta)
    }

    fn from_sides(sides: &[Side], delta: f64) -> Self {
        let pick = |s: Side| (0..sides.len()).filter(|&i| sides[i] == s).collect();
        MarginPartition {
            s_minus: pick(Side::Minus),
            s_l: pick(Side::Linear),
            s_0: pick(Side::Zero),
            delta,
        }
    }

    fn sides(&self) -> Vec<Side> {
        let n = self.s_minus.len() + self.s_l.len() + self.s_0.len();
        let mut sides = vec![Side::Minus; n];
        self.s_l.iter().for_each(|&i| sides[i] = Side::Linear);
        self.s_0.iter().for_each(|&i| sides[i] = Side::Zero);
        sides
    }

    /// Boundary flips, each rule tested against the pre-update sets:
    /// `S_l` at 0 to `S_-`, `S_-` at 0 to `S_l`, `S_0` at delta to `S_l`,
    /// `S_l` at delta to `S_0`.
    pub fn flipped(&self, margins: &[f64]) -> Self {
        let d = self.delta;
        let at_zero = |m: f64| m.abs() <= BOUNDARY_TOL;
        let at_delta = |m: f64| (m - d).abs() <= BOUNDARY_TOL;
        let sides: Vec<Side> = self
            .sides()
            .into_iter()
            .zip(margins)
            .map(|(side, &m)| match side {
                Side::Linear if at_zero(m) => Side::Minus,
                Side::Linear if at_delta(m) => Side::Zero,
                Side::Minus if at_zero(m) => Side::Linear,
                Side::Zero if at_delta(m) => Side::Linear,
                s => s,
            })
            .collect();
        Self::from_sides(&sides, d)
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.s_minus.len(), self.s_l.len(), self.s_0.len())
    }
}

/// LP over `w` for a fixed partition, in standard form.
///
/// Variables are the `T` weights followed by one slack per `S_-` and `S_0`
/// example and two per `S_l` example. Row 0 is `sum w = 1`; then
/// `M_i + s = 0` for `S_-`, `-M_i + s = 0` and `M_i + s' = delta` for `S_l`,
/// and `M_i - s = delta` for `S_0`. Objective `b.w`.
pub fn build_partition_lp(votes: &VoteMatrix, partition: &MarginPartition) -> Result<StandardLp> {
    let t = votes.num_classifiers();
    let (nm, nl, n0) = partition.sizes();
    if nm + nl + n0 != votes.num_examples() {
        return Err(Error::invalid("partition does not cover the examples"));
    }
    let k = t + nm + 2 * nl + n0;
    let mut rows = Vec::with_capacity(1 + nm + 2 * nl + n0);
    let mut rhs = Vec::with_capacity(rows.capacity());
    let mut first = vec![0.0; k];
    first[..t].iter_mut().for_each(|v| *v = 1.0);
    rows.push(first);
    rhs.push(1.0);
    let mut slack = t;
    let mut push = |i: usize, sign: f64, slack_coef: f64, b: f64| {
        let mut row = vec![0.0; k];
        for (r, v) in row.iter_mut().zip(votes.row(i)) {
            *r = sign * v;
        }
        row[slack] = slack_coef;
        slack += 1;
        rows.push(row);
        rhs.push(b);
    };
    for &i in &partition.s_minus {
        push(i, 1.0, 1.0, 0.0);
    }
    for &i in &partition.s_l {
        push(i, -1.0, 1.0, 0.0);
        push(i, 1.0, 1.0, partition.delta);
    }
    for &i in &partition.s_0 {
        push(i, 1.0, -1.0, partition.delta);
    }
    let mut c = votes.objective(&partition.s_l);
    c.resize(k, 0.0);
    StandardLp::new(c, rows, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoomIteration {
    pub iteration: usize,
    pub c_min: f64,
    pub c: f64,
    pub s_minus: usize,
    pub s_l: usize,
    pub s_0: usize,
    /// `|S_l|` of the partition the LP was solved on
    pub lp_s_l: usize,
    /// optimum of that LP, `b.w` before the flips
    pub lp_objective: f64,
    pub margin_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoomStatus {
    /// `C >= C_min`
    Converged,
    /// `S_l` became empty
    EmptyLinearSet,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoomResult {
    pub weights: Vec<f64>,
    pub partition: MarginPartition,
    pub trace: Vec<DoomIteration>,
    pub status: DoomStatus,
    pub initial_cost: f64,
    pub final_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoomOptions {
    pub max_iterations: usize,
}

impl Default for DoomOptions {
    fn default() -> Self {
        DoomOptions {
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn check_simplex(w: &[f64]) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if w.iter().any(|&v| !(v >= -1e-10)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("initial weights must lie on the simplex"));
    }
    Ok(())
}

pub fn doom_lp(votes: &VoteMatrix, initial_w: &[f64], delta: f64) -> Result<DoomResult> {
    doom_lp_with(votes, initial_w, delta, &DoomOptions::default())
}

pub fn doom_lp_with(
    votes: &VoteMatrix,
    initial_w: &[f64],
    delta: f64,
    opts: &DoomOptions,
) -> Result<DoomResult> {
    if initial_w.len() != votes.num_classifiers() {
        return Err(Error::invalid("one initial weight per classifier required"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, 1]")));
    }
    check_simplex(initial_w)?;
    let mut w = initial_w.to_vec();
    let mut margins = votes.margins(&w);
    let initial_cost = mean_cost(&margins, delta);
    let mut partition = MarginPartition::from_margins(&margins, delta);
    let mut b = votes.objective(&partition.s_l);
    let mut trace = Vec::new();
    let status = loop {
        if trace.len() >= opts.max_iterations {
            break DoomStatus::IterationCap;
        }
        let c_min = dot(&b, &w);
        if partition.s_l.is_empty() {
            break DoomStatus::EmptyLinearSet;
        }
        let lp = build_partition_lp(votes, &partition)?;
        let sol = solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::numeric(format!(
                "partition LP is {:?} at iteration {}",
                sol.status,
                trace.len() + 1
            )));
        }
        let lp_s_l = partition.s_l.len();
        let lp_objective = dot(&b, &sol.x[..votes.num_classifiers()]);
        w = sol.x[..votes.num_classifiers()]
            .iter()
            .map(|v| v.max(0.0))
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        margins = votes.margins(&w);
        partition = partition.flipped(&margins);
        b = votes.objective(&partition.s_l);
        let c = dot(&b, &w);
        let (s_minus, s_l, s_0) = partition.sizes();
        trace.push(DoomIteration {
            iteration: trace.len() + 1,
            c_min,
            c,
            s_minus,
            s_l,
            s_0,
            lp_s_l,
            lp_objective,
            margin_cost: mean_cost(&margins, delta),
        });
        if c >= c_min {
            break DoomStatus::Converged;
        }
    };
    Ok(DoomResult {
        final_cost: mean_cost(&margins, delta),
        weights: w,
        partition,
        trace,
        status,
        initial_cost,
    })
}

/// Optimized combination, chosen `delta` and the run.
#[derive(Debug, Clone, PartialEq)]
pub struct DoomOutcome {
    pub combination: ConvexCombination,
    pub delta: f64,
    pub result: DoomResult,
}

/// DOOM-LP on a combination's own stumps and weights.
///
/// Negative weights are rejected: the LP keeps `w` on the simplex.
pub fn optimize_combination(
    f: &ConvexCombination,
    ds: &LabeledDataset,
    delta: f64,
) -> Result<DoomOutcome> {
    let w0 = f.weights();
    if w0.iter().any(|&w| w < 0.0) {
        return Err(Error::invalid("DOOM-LP requires nonnegative weights"));
    }
    let votes = VoteMatrix::new(ds, &f.stumps())?;
    let result = doom_lp(&votes, &w0, delta)?;
    let combination = f.reweighted(&result.weights)?;
    Ok(DoomOutcome {
        combination,
        delta,
        result,
    })
}

/// Picks `delta` from [`auto_delta_grid`] by minimizing the Rademacher
/// margin bound of the input combination, then runs DOOM-LP there.
pub fn optimize_combination_auto(
    f: &ConvexCombination,
    ds: &LabeledDataset,
    rad_estimate: f64,
) -> Result<DoomOutcome> {
    let votes = VoteMatrix::new(ds, &f.stumps())?;
    let profile = MarginProfile::new(votes.margins(&f.weights()))?;
    let (delta, _) = rademacher_margin_bound(&profile, rad_estimate, 0.0, &auto_delta_grid())?;
    optimize_combination(f, ds, delta)
}
