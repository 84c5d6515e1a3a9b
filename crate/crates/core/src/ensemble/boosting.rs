use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::data::{bootstrap_indices, LabeledDataset};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::stumps::{Stump, StumpLearner};

use super::ConvexCombination;

/// Floor applied to a zero weighted error so that `beta > 0`.
pub const EPS_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// 1-based
    pub round: usize,
    pub stump: Stump,
    /// weighted training error of `stump`, before clamping
    pub raw_error: f64,
    /// `max(raw_error, EPS_CLAMP)`; defines `beta`
    pub eps: f64,
    pub beta: f64,
    /// unnormalized vote, `ln(1/beta)` for AdaBoost and 1 for bagging
    pub vote: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Completed,
    /// the base learner could not beat 1/2 at this round; it is not recorded
    WeakLearnerFailed {
        round: usize,
        error: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub rounds: Vec<RoundRecord>,
    pub stop: StopReason,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Combined classifier after the first `t` rounds.
    pub fn combination_at(&self, t: usize) -> Result<ConvexCombination> {
        if t == 0 || t > self.rounds.len() {
            return Err(Error::invalid(format!(
                "round {t} outside 1..={}",
                self.rounds.len()
            )));
        }
        ConvexCombination::new(self.rounds[..t].iter().map(|r| (r.vote, r.stump)).collect())
    }

    pub fn final_combination(&self) -> Result<ConvexCombination> {
        self.combination_at(self.rounds.len())
    }

    /// Writes `<stem>.csv` (round, eps_t, beta_t, vote, stump file and line)
    /// and `<stem>.stumps` (one stump per line, in round order).
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let stump_name = format!("{stem}.stumps");
        let mut stumps = File::create(dir.join(&stump_name))?;
        let mut wtr = csv::Writer::from_path(dir.join(format!("{stem}.csv")))?;
        wtr.write_record([
            "round",
            "eps_t",
            "beta_t",
            "vote",
            "raw_error",
            "stump_file",
            "stump_line",
        ])?;
        for (k, r) in self.rounds.iter().enumerate() {
            writeln!(stumps, "{}", r.stump)?;
            wtr.write_record([
                r.round.to_string(),
                r.eps.to_string(),
                r.beta.to_string(),
                r.vote.to_string(),
                r.raw_error.to_string(),
                stump_name.clone(),
                (k + 1).to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path, stem: &str) -> Result<Self> {
        let stumps: Vec<Stump> = BufReader::new(File::open(dir.join(format!("{stem}.stumps")))?)
            .lines()
            .map(|l| l.map_err(Error::from).and_then(|l| l.parse()))
            .collect::<Result<_>>()?;
        let mut rdr = csv::Reader::from_path(dir.join(format!("{stem}.csv")))?;
        let mut rounds = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let num = |c: usize| -> Result<f64> {
                rec.get(c).and_then(|v| v.parse().ok()).ok_or(Error::Parse {
                    row,
                    column: c,
                    message: "expected a number".into(),
                })
            };
            let line = num(6)? as usize;
            let stump = *stumps.get(line.wrapping_sub(1)).ok_or(Error::Parse {
                row,
                column: 6,
                message: format!("no stump on line {line}"),
            })?;
            rounds.push(RoundRecord {
                round: num(0)? as usize,
                eps: num(1)?,
                beta: num(2)?,
                vote: num(3)?,
                raw_error: num(4)?,
                stump,
            });
        }
        Ok(TrainingTrace {
            rounds,
            stop: StopReason::Completed,
        })
    }
}

pub fn adaboost(ds: &LabeledDataset, rounds: usize) -> Result<TrainingTrace> {
    adaboost_observed(ds, rounds, |_, _, _| {})
}

/// AdaBoost over exact stumps. `observe(record, d_t, d_next)` sees both
/// distributions of every recorded round.
pub fn adaboost_observed<F>(
    ds: &LabeledDataset,
    rounds: usize,
    mut observe: F,
) -> Result<TrainingTrace>
where
    F: FnMut(&RoundRecord, &[f64], &[f64]),
{
    if rounds == 0 {
        return Err(Error::invalid("number of rounds must be at least 1"));
    }
    if !ds.has_both_labels() {
        return Err(Error::invalid("AdaBoost needs examples of both labels"));
    }
    let n = ds.len();
    let learner = StumpLearner::new(ds);
    let mut dist = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut records = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let (stump, raw_error) = learner.train(&dist);
        if raw_error >= 0.5 {
            return Ok(TrainingTrace {
                rounds: records,
                stop: StopReason::WeakLearnerFailed {
                    round: t,
                    error: raw_error,
                },
            });
        }
        let eps = raw_error.max(EPS_CLAMP);
        let beta = eps / (1.0 - eps);
        for (i, (x, &y)) in ds.rows().zip(ds.labels()).enumerate() {
            next[i] = if stump.eval(x) == y {
                dist[i] * beta
            } else {
                dist[i]
            };
        }
        let z: f64 = next.iter().sum();
        next.iter_mut().for_each(|d| *d /= z);
        let record = RoundRecord {
            round: t,
            stump,
            raw_error,
            eps,
            beta,
            vote: (1.0 / beta).ln(),
        };
        observe(&record, &dist, &next);
        records.push(record);
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(TrainingTrace {
        rounds: records,
        stop: StopReason::Completed,
    })
}

/// Bagging: stump `t` is trained with uniform weights on bootstrap sample
/// `t`; every vote is 1.
pub fn bagging(ds: &LabeledDataset, rounds: usize, rng: &RngState) -> Result<TrainingTrace> {
    if rounds == 0 {
        return Err(Error::invalid("number of rounds must be at least 1"));
    }
    let n = ds.len();
    let base = rng.fork("bagging");
    let uniform = vec![1.0 / n as f64; n];
    let mut records = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let sample = ds.select(&bootstrap_indices(n, &base.fork_index(t)));
        let (stump, raw_error) = StumpLearner::new(&sample).train(&uniform);
        let eps = raw_error.max(EPS_CLAMP);
        records.push(RoundRecord {
            round: t,
            stump,
            raw_error,
            eps,
            beta: eps / (1.0 - eps),
            vote: 1.0,
        });
    }
    Ok(TrainingTrace {
        rounds: records,
        stop: StopReason::Completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stumps::Orientation;

    #[test]
    fn quarter_error_round_rebalances_to_half() {
        // alternating labels: no stump is perfect, the best errs on one point
        let ds = LabeledDataset::new(vec![0.1, 0.2, 0.3, 0.9], vec![1, -1, 1, -1], 1).unwrap();
        let mut seen = 0;
        let trace = adaboost_observed(&ds, 1, |rec, before, after| {
            seen += 1;
            assert_eq!(rec.raw_error, 0.25);
            assert!((rec.beta - 1.0 / 3.0).abs() < 1e-15);
            assert!(before.iter().all(|&d| d == 0.25));
            let wrong: f64 = ds
                .rows()
                .zip(ds.labels())
                .zip(after)
                .filter(|((x, &y), _)| rec.stump.eval(x) != y)
                .map(|(_, d)| d)
                .sum();
            assert!((wrong - 0.5).abs() < 1e-12);
        })
        .unwrap();
        assert_eq!(seen, 1);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn separable_data_clamps_and_continues() {
        let ds = LabeledDataset::new(vec![0.1, 0.4, 0.6, 0.9], vec![1, 1, -1, -1], 1).unwrap();
        let trace = adaboost(&ds, 3).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(trace.stop, StopReason::Completed);
        let r = trace.rounds[0];
        assert_eq!(r.raw_error, 0.0);
        assert_eq!(r.eps, EPS_CLAMP);
        assert_eq!(r.stump, Stump::new(0, 0.5, Orientation::Le));
        let (_, err) = super::super::evaluate(&trace.combination_at(1).unwrap(), &ds).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn stops_when_weak_learning_fails() {
        // identical points with opposite labels: every stump has error 1/2
        let ds = LabeledDataset::new(vec![0.5, 0.5], vec![1, -1], 1).unwrap();
        let trace = adaboost(&ds, 5).unwrap();
        assert!(trace.is_empty());
        assert_eq!(
            trace.stop,
            StopReason::WeakLearnerFailed {
                round: 1,
                error: 0.5
            }
        );
    }

    #[test]
    fn adaboost_preconditions() {
        let ds = LabeledDataset::new(vec![0.1, 0.2], vec![1, 1], 1).unwrap();
        assert!(adaboost(&ds, 3).is_err());
        let ds = LabeledDataset::new(vec![0.1, 0.2], vec![1, -1], 1).unwrap();
        assert!(adaboost(&ds, 0).is_err());
    }

    #[test]
    fn bagging_single_round_is_the_stump() {
        let ds = crate::data::gen_twonorm(60, 2, &RngState::new(3)).unwrap();
        let trace = bagging(&ds, 1, &RngState::new(4)).unwrap();
        let f = trace.final_combination().unwrap();
        assert_eq!(f.weights(), vec![1.0]);
        assert_eq!(f.stumps()[0], trace.rounds[0].stump);
    }

    #[test]
    fn bagging_votes_uniform_and_deterministic() {
        let ds = crate::data::gen_twonorm(80, 3, &RngState::new(3)).unwrap();
        let a = bagging(&ds, 7, &RngState::new(9)).unwrap();
        let b = bagging(&ds, 7, &RngState::new(9)).unwrap();
        assert_eq!(a, b);
        let f = a.final_combination().unwrap();
        assert!(f.weights().iter().all(|&w| (w - 1.0 / 7.0).abs() < 1e-15));
        for r in &a.rounds {
            assert!((r.beta - r.eps / (1.0 - r.eps)).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_files_round_trip() {
        let ds = crate::data::gen_twonorm(80, 3, &RngState::new(3)).unwrap();
        let trace = adaboost(&ds, 6).unwrap();
        let dir = tempfile::tempdir().unwrap();
        trace.save(dir.path(), "ada").unwrap();
        let back = TrainingTrace::load(dir.path(), "ada").unwrap();
        assert_eq!(back, trace);
    }
}
