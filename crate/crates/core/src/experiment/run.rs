use std::path::PathBuf;

use rayon::prelude::*;

use super::config::{Algorithm, DatasetKind, ExperimentConfig};
use super::report::BoundReport;
use crate::data::{self, IntervalsConcept, LabeledDataset};
use crate::dimension::{
    delta_bound, normalized_eps, weighted_eps, DeltaBoundParams, WeightSpectrum, Weighting,
};
use crate::ensemble::{
    adaboost, bagging, zero_one_error, ExactMarginDistribution, ScoreAccumulator, TrainingTrace,
};
use crate::error::{Error, Result};
use crate::margins::{
    gamma_bound_from_margin, gamma_margin, step_gamma_margin, vc_psi_bound, BoundParams,
    MarginProfile,
};
use crate::rng::RngState;
use crate::stumps::StumpClassMeta;

/// One repetition's data: training sample plus either a test sample or the
/// exact concept.
#[derive(Debug, Clone)]
pub struct Sample {
    pub train: LabeledDataset,
    pub test: Option<LabeledDataset>,
    pub concept: Option<IntervalsConcept>,
}

fn repetition_rng(cfg: &ExperimentConfig, rep: usize) -> RngState {
    RngState::new(cfg.seed).fork("repetition").fork_index(rep)
}

pub fn prepare_sample(cfg: &ExperimentConfig, rng: &RngState) -> Result<Sample> {
    let rng = rng.fork("data");
    Ok(match cfg.dataset {
        DatasetKind::Intervals => {
            let (train, concept) = data::gen_intervals(cfg.num_intervals, cfg.train_size, &rng)?;
            Sample {
                train,
                test: None,
                concept: Some(concept),
            }
        }
        DatasetKind::Twonorm => Sample {
            train: data::gen_twonorm(cfg.train_size, cfg.dim, &rng.fork("train"))?,
            test: Some(data::gen_twonorm(
                cfg.test_size,
                cfg.dim,
                &rng.fork("test"),
            )?),
            concept: None,
        },
        DatasetKind::KrkpLike | DatasetKind::Csv => {
            let full = if cfg.dataset == DatasetKind::KrkpLike {
                data::gen_krkp_like(cfg.sample_size, &rng)?
            } else {
                let path = cfg.data_path.as_ref().expect("validated");
                data::load_csv(path, &cfg.csv_options())?
            };
            let (train, test) = data::split(&full, cfg.train_fraction, &rng)?;
            Sample {
                train,
                test: Some(test),
                concept: None,
            }
        }
    })
}

pub fn train(cfg: &ExperimentConfig, ds: &LabeledDataset, rng: &RngState) -> Result<TrainingTrace> {
    match cfg.algorithm {
        Algorithm::Adaboost => adaboost(ds, cfg.rounds),
        Algorithm::Bagging => bagging(ds, cfg.rounds, &rng.fork("train")),
    }
}

/// Rounds `1, every, 2 every, .., last`.
pub fn evaluation_rounds(last: usize, every: usize) -> Vec<usize> {
    let mut r: Vec<usize> = (1..=last).filter(|t| *t == 1 || t % every == 0).collect();
    if r.last() != Some(&last) && last > 0 {
        r.push(last);
    }
    r
}

pub fn gamma_label(g: f64) -> String {
    let s = format!("{g:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn class_meta(cfg: &ExperimentConfig, dim: usize) -> StumpClassMeta {
    match cfg.cover_exponent {
        Some(v) => StumpClassMeta::with_cover_exponent(dim, v),
        None => StumpClassMeta::for_dim(dim),
    }
}

/// Configured gammas, plus gamma_min when requested.
pub fn gamma_list(cfg: &ExperimentConfig, dim: usize) -> Vec<f64> {
    let mut g = cfg.gammas.clone();
    if cfg.include_gamma_min {
        let gmin = class_meta(cfg, dim).gamma_min();
        if !g.iter().any(|x| gamma_label(*x) == gamma_label(gmin)) {
            g.push(gmin);
        }
    }
    g
}

pub fn report_columns(cfg: &ExperimentConfig, gammas: &[f64], exact: bool) -> Vec<String> {
    let mut c = vec![
        "round".to_string(),
        "train_error".into(),
        if exact {
            "exact_error".into()
        } else {
            "test_error".into()
        },
    ];
    if cfg.gamma_bound {
        for &g in gammas {
            c.push(format!("gamma_bound_{}", gamma_label(g)));
            c.push(format!("gamma_margin_{}", gamma_label(g)));
        }
    }
    if cfg.delta_bound || cfg.weighted_bound || cfg.normalized_bound {
        c.extend(
            [
                "delta_bound",
                "delta_hat",
                "delta_dimension",
                "delta_cutoff",
            ]
            .map(String::from),
        );
    }
    if cfg.weighted_bound {
        c.push("weighted_bound".into());
    }
    if cfg.normalized_bound {
        c.push("normalized_bound".into());
    }
    if cfg.vc_bound {
        c.push("vc_bound".into());
    }
    c
}

struct Snapshot {
    round: usize,
    train_margins: Vec<f64>,
    test_margins: Option<Vec<f64>>,
}

fn snapshots(trace: &TrainingTrace, sample: &Sample, rounds: &[usize]) -> Vec<Snapshot> {
    let mut train_acc = ScoreAccumulator::new(&sample.train);
    let mut test_acc = sample.test.as_ref().map(ScoreAccumulator::new);
    let mut out = Vec::with_capacity(rounds.len());
    let mut next = rounds.iter().peekable();
    for (t, rec) in trace.rounds.iter().enumerate() {
        train_acc.push(rec.vote, &rec.stump);
        if let Some(acc) = test_acc.as_mut() {
            acc.push(rec.vote, &rec.stump);
        }
        if next.peek() == Some(&&(t + 1)) {
            next.next();
            out.push(Snapshot {
                round: t + 1,
                train_margins: train_acc.margins(),
                test_margins: test_acc.as_ref().map(|a| a.margins()),
            });
        }
    }
    out
}

/// Every requested bound at the given rounds of one trace.
pub fn evaluate_trace(
    cfg: &ExperimentConfig,
    sample: &Sample,
    trace: &TrainingTrace,
    rounds: &[usize],
) -> Result<BoundReport> {
    let n = sample.train.len();
    let gammas = gamma_list(cfg, sample.train.dim());
    let meta = class_meta(cfg, sample.train.dim());
    let params = DeltaBoundParams::new(meta.alpha, n)?;
    let weighting = Weighting::new(cfg.zeta, cfg.k)?;
    let vc_params = BoundParams::new(n, cfg.t)?;
    let mut report = BoundReport::new(report_columns(cfg, &gammas, sample.concept.is_some()));
    let rows: Vec<Vec<f64>> = snapshots(trace, sample, rounds)
        .into_par_iter()
        .map(|snap| -> Result<Vec<f64>> {
            let f = trace.combination_at(snap.round)?;
            let generalization = match (&sample.concept, &snap.test_margins) {
                (Some(concept), _) => {
                    ExactMarginDistribution::new(&f, concept)?.generalization_error()
                }
                (None, Some(m)) => zero_one_error(m),
                (None, None) => unreachable!("sample has test data or a concept"),
            };
            let mut row = vec![
                snap.round as f64,
                zero_one_error(&snap.train_margins),
                generalization,
            ];
            let profile = MarginProfile::new(snap.train_margins)?;
            if cfg.gamma_bound {
                for &g in &gammas {
                    let sup = gamma_margin(&profile, g)?;
                    row.push(gamma_bound_from_margin(n, g, sup.value));
                    row.push(sup.value);
                }
            }
            if cfg.delta_bound || cfg.weighted_bound || cfg.normalized_bound {
                let spec = WeightSpectrum::from_combination(&f);
                let b = delta_bound(&profile, &spec, &params)?;
                row.extend([b.value, b.delta_hat.value, b.dimension as f64, b.big_delta]);
                let dh = b.delta_hat;
                if cfg.weighted_bound {
                    row.push(if dh.feasible {
                        weighted_eps(&spec, dh.value, &params, &weighting)?
                    } else {
                        f64::INFINITY
                    });
                }
                if cfg.normalized_bound {
                    row.push(if dh.feasible {
                        normalized_eps(&spec, dh.value, &params, &weighting, snap.round)?
                    } else {
                        f64::INFINITY
                    });
                }
            }
            if cfg.vc_bound {
                row.push(vc_psi_bound(&profile, &vc_params)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for row in rows {
        report.push(row)?;
    }
    Ok(report)
}

/// Column-wise mean of reports with identical shape.
pub fn average_reports(reports: &[BoundReport]) -> Result<BoundReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::invalid("no reports to average"))?;
    let mut out = BoundReport::new(first.columns.clone());
    for i in 0..first.rows.len() {
        let row = (0..first.columns.len())
            .map(|j| reports.iter().map(|r| r.rows[i][j]).sum::<f64>() / reports.len() as f64)
            .collect();
        out.push(row)?;
    }
    Ok(out)
}

pub struct Repetition {
    pub sample: Sample,
    pub trace: TrainingTrace,
}

/// Samples and trains every repetition, in parallel.
pub fn train_repetitions(cfg: &ExperimentConfig) -> Result<Vec<Repetition>> {
    (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let rng = repetition_rng(cfg, rep);
            let sample = prepare_sample(cfg, &rng)?;
            let trace = train(cfg, &sample.train, &rng)?;
            if trace.is_empty() {
                return Err(Error::numeric(format!(
                    "repetition {rep}: the first stump has error >= 1/2"
                )));
            }
            Ok(Repetition { sample, trace })
        })
        .collect()
}

/// Files written by a command.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, path: PathBuf, contents: &[u8]) -> Result<()> {
        std::fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn report(&mut self, path: PathBuf, report: &BoundReport) -> Result<()> {
        report.save(&path)?;
        self.files.push(path);
        Ok(())
    }
}

fn common_rounds(reps: &[Repetition], every: usize) -> Vec<usize> {
    let last = reps.iter().map(|r| r.trace.len()).min().unwrap_or(0);
    evaluation_rounds(last, every)
}

/// Trains, evaluates all requested bounds, averages over repetitions and
/// writes `report.csv`, `report.svg` and, optionally, traces and training
/// samples.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<(BoundReport, Artifacts)> {
    cfg.validate()?;
    let reps = train_repetitions(cfg)?;
    let rounds = common_rounds(&reps, cfg.every);
    let reports: Vec<BoundReport> = reps
        .par_iter()
        .map(|r| evaluate_trace(cfg, &r.sample, &r.trace, &rounds))
        .collect::<Result<_>>()?;
    let report = average_reports(&reports)?;

    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut art = Artifacts::default();
    art.write(dir.join("config.json"), cfg.to_json().as_bytes())?;
    art.report(dir.join("report.csv"), &report)?;
    let plotted: Vec<String> = report
        .columns
        .iter()
        .filter(|c| c.contains("error") || c.ends_with("_bound") || c.contains("bound_"))
        .cloned()
        .collect();
    let svg = report
        .chart("errors and bounds", "round", &plotted)?
        .to_svg()?;
    art.write(dir.join("report.svg"), svg.as_bytes())?;
    if cfg.save_traces {
        for (i, r) in reps.iter().enumerate() {
            let stem = format!("rep{i}_trace");
            r.trace.save(dir, &stem)?;
            art.files.push(dir.join(format!("{stem}.csv")));
            art.files.push(dir.join(format!("{stem}.stumps")));
            let path = dir.join(format!("rep{i}_train.csv"));
            r.sample.train.save_csv(&path)?;
            art.files.push(path);
        }
    }
    if cfg.doom_lp {
        let first = &reps[0];
        let f = first.trace.final_combination()?;
        let delta = match cfg.doom_delta {
            Some(d) => super::DoomDelta::Fixed(d),
            None => super::DoomDelta::Auto {
                draws: cfg.rademacher_draws,
                seed: cfg.seed,
            },
        };
        let doom_dir = dir.join("doomlp");
        let (_, doom_art) = super::doom::run_doom(&f, &first.sample.train, delta, &doom_dir)?;
        art.files.extend(doom_art.files);
    }
    Ok((report, art))
}

/// Ratio of the empirical gamma-margin to the true one computed from the
/// exact margin distribution, per round and gamma. Intervals only.
pub fn cmd_ratio(cfg: &ExperimentConfig) -> Result<(BoundReport, Artifacts)> {
    cfg.validate()?;
    if cfg.dataset != DatasetKind::Intervals {
        return Err(Error::invalid(
            "the ratio experiment needs the one-dimensional intervals data",
        ));
    }
    let reps = train_repetitions(cfg)?;
    let rounds = common_rounds(&reps, cfg.every);
    let gammas = gamma_list(cfg, 1);
    let mut columns = vec!["round".to_string()];
    for &g in &gammas {
        let l = gamma_label(g);
        columns.extend([
            format!("ratio_{l}"),
            format!("empirical_margin_{l}"),
            format!("true_margin_{l}"),
        ]);
    }
    let reports: Vec<BoundReport> = reps
        .par_iter()
        .map(|r| -> Result<BoundReport> {
            let concept = r.sample.concept.as_ref().expect("intervals sample");
            let n = r.sample.train.len();
            let mut report = BoundReport::new(columns.clone());
            for snap in snapshots(&r.trace, &r.sample, &rounds) {
                let f = r.trace.combination_at(snap.round)?;
                let exact = ExactMarginDistribution::new(&f, concept)?;
                let profile = MarginProfile::new(snap.train_margins)?;
                let mut row = vec![snap.round as f64];
                for &g in &gammas {
                    let emp = gamma_margin(&profile, g)?.value;
                    let truth = step_gamma_margin(exact.values(), exact.cumulative(), n, g)?.value;
                    let ratio = if truth > 0.0 {
                        emp / truth
                    } else {
                        f64::INFINITY
                    };
                    row.extend([ratio, emp, truth]);
                }
                report.push(row)?;
            }
            Ok(report)
        })
        .collect::<Result<_>>()?;
    let report = average_reports(&reports)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut art = Artifacts::default();
    art.report(dir.join("ratio.csv"), &report)?;
    let ratio_cols: Vec<String> = report
        .columns
        .iter()
        .filter(|c| c.starts_with("ratio_"))
        .cloned()
        .collect();
    let svg = report
        .chart("empirical / true gamma-margin", "round", &ratio_cols)?
        .to_svg()?;
    art.write(dir.join("ratio.svg"), svg.as_bytes())?;
    Ok((report, art))
}
