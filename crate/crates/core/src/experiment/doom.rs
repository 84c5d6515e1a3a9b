use std::path::Path;

use serde::Serialize;

use super::report::BoundReport;
use super::run::Artifacts;
use super::DoomDelta;
use crate::data::{load_csv, CsvOptions, LabeledDataset};
use crate::dimension::{delta_dimension, WeightSpectrum};
use crate::doomlp::{optimize_combination, optimize_combination_auto, DoomOutcome, DoomStatus};
use crate::ensemble::{evaluate, ConvexCombination};
use crate::error::Result;
use crate::margins::MarginProfile;
use crate::rng::RngState;
use crate::stumps::rademacher_complexity;

#[derive(Debug, Clone, Serialize)]
struct Summary {
    delta: f64,
    status: String,
    iterations: usize,
    initial_margin_cost: f64,
    final_margin_cost: f64,
    train_error_before: f64,
    train_error_after: f64,
    support_before: usize,
    support_after: usize,
    delta_dimension_001_before: usize,
    delta_dimension_001_after: usize,
}

fn sorted_abs(f: &ConvexCombination) -> Vec<f64> {
    let mut w: Vec<f64> = f.weights().iter().map(|w| w.abs()).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

fn support(f: &ConvexCombination) -> usize {
    f.weights().iter().filter(|w| w.abs() > 1e-10).count()
}

/// Sorted coefficients, Delta-dimension curves and cumulative margin
/// distributions before and after DOOM-LP.
pub fn comparison_reports(
    before: &ConvexCombination,
    after: &ConvexCombination,
    ds: &LabeledDataset,
) -> Result<[BoundReport; 3]> {
    let (wb, wa) = (sorted_abs(before), sorted_abs(after));
    let mut coef = BoundReport::new(vec!["rank".into(), "before".into(), "after".into()]);
    for i in 0..wb.len().max(wa.len()) {
        coef.push(vec![
            (i + 1) as f64,
            wb.get(i).copied().unwrap_or(0.0),
            wa.get(i).copied().unwrap_or(0.0),
        ])?;
    }

    let (sb, sa) = (
        WeightSpectrum::from_combination(before),
        WeightSpectrum::from_combination(after),
    );
    let mut dims = BoundReport::new(vec!["cutoff".into(), "before".into(), "after".into()]);
    for j in 0..=200 {
        let cut = j as f64 / 200.0;
        dims.push(vec![
            cut,
            delta_dimension(&sb, cut) as f64,
            delta_dimension(&sa, cut) as f64,
        ])?;
    }

    let pb = MarginProfile::new(evaluate(before, ds)?.0)?;
    let pa = MarginProfile::new(evaluate(after, ds)?.0)?;
    let mut cdf = BoundReport::new(vec!["margin".into(), "before".into(), "after".into()]);
    for j in 0..=200 {
        let m = -1.0 + j as f64 / 100.0;
        cdf.push(vec![m, pb.cdf(m), pa.cdf(m)])?;
    }
    Ok([coef, dims, cdf])
}

/// Runs DOOM-LP on `f` over `ds` and writes the comparison files to `dir`.
pub fn run_doom(
    f: &ConvexCombination,
    ds: &LabeledDataset,
    delta: DoomDelta,
    dir: &Path,
) -> Result<(DoomOutcome, Artifacts)> {
    let outcome = match delta {
        DoomDelta::Fixed(d) => optimize_combination(f, ds, d)?,
        DoomDelta::Auto { draws, seed } => {
            let rad = rademacher_complexity(ds, draws, &RngState::new(seed))?;
            optimize_combination_auto(f, ds, rad.estimate)?
        }
    };
    std::fs::create_dir_all(dir)?;
    let mut art = Artifacts::default();
    let after = &outcome.combination;
    let model_path = dir.join("model_after.csv");
    after.save(&model_path)?;
    art.files.push(model_path);

    let [coef, dims, cdf] = comparison_reports(f, after, ds)?;
    let panels = [
        ("coefficients", "sorted coefficients", "rank", coef),
        ("delta_dimension", "Delta-dimension", "cutoff", dims),
        ("margins", "cumulative margin distribution", "margin", cdf),
    ];
    for (stem, title, x, report) in &panels {
        let path = dir.join(format!("{stem}.csv"));
        report.save(&path)?;
        art.files.push(path);
        let svg = report
            .chart(title, x, &["before".into(), "after".into()])?
            .to_svg()?;
        let path = dir.join(format!("{stem}.svg"));
        std::fs::write(&path, svg)?;
        art.files.push(path);
    }

    let mut iters = BoundReport::new(
        [
            "iteration",
            "c_min",
            "c",
            "s_minus",
            "s_l",
            "s_0",
            "margin_cost",
            "lp_objective",
        ]
        .map(String::from)
        .to_vec(),
    );
    for it in &outcome.result.trace {
        iters.push(vec![
            it.iteration as f64,
            it.c_min,
            it.c,
            it.s_minus as f64,
            it.s_l as f64,
            it.s_0 as f64,
            it.margin_cost,
            it.lp_objective,
        ])?;
    }
    let path = dir.join("iterations.csv");
    iters.save(&path)?;
    art.files.push(path);

    let status = match outcome.result.status {
        DoomStatus::Converged => "converged",
        DoomStatus::EmptyLinearSet => "empty-linear-set",
        DoomStatus::IterationCap => "iteration-cap",
    };
    let summary = Summary {
        delta: outcome.delta,
        status: status.into(),
        iterations: outcome.result.trace.len(),
        initial_margin_cost: outcome.result.initial_cost,
        final_margin_cost: outcome.result.final_cost,
        train_error_before: evaluate(f, ds)?.1,
        train_error_after: evaluate(after, ds)?.1,
        support_before: support(f),
        support_after: support(after),
        delta_dimension_001_before: delta_dimension(&WeightSpectrum::from_combination(f), 0.01),
        delta_dimension_001_after: delta_dimension(&WeightSpectrum::from_combination(after), 0.01),
    };
    let path = dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    art.files.push(path);
    Ok((outcome, art))
}

/// DOOM-LP on a saved model and a labeled CSV file.
pub fn cmd_doomlp(
    model_path: &Path,
    data_path: &Path,
    csv: &CsvOptions,
    delta: DoomDelta,
    out_dir: &Path,
) -> Result<(DoomOutcome, Artifacts)> {
    let f = ConvexCombination::load(model_path)?;
    let ds = load_csv(data_path, csv)?;
    run_doom(&f, &ds, delta, out_dir)
}
