//! Labeled samples: synthetic generators, CSV ingestion, splitting and
//! bootstrap resampling.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Feature matrix (row-major) with labels in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<i8>,
    dim: usize,
}

impl LabeledDataset {
    pub fn new(features: Vec<f64>, labels: Vec<i8>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset dimension must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::invalid("dataset must contain at least one example"));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::invalid(format!(
                "feature buffer holds {} values, expected {} x {}",
                features.len(),
                labels.len(),
                dim
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y != 1 && y != -1) {
            return Err(Error::invalid(format!(
                "label at row {i} is {}, expected -1 or +1",
                labels[i]
            )));
        }
        if let Some(k) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature at row {}, column {}",
                k / dim,
                k % dim
            )));
        }
        Ok(LabeledDataset {
            features,
            labels,
            dim,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<i8>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::invalid(format!(
                "row {i} has {} values, expected {dim}",
                rows[i].len()
            )));
        }
        Self::new(rows.concat(), labels, dim)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    #[inline]
    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.features[i * self.dim + feature]
    }

    pub fn label(&self, i: usize) -> i8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn has_both_labels(&self) -> bool {
        self.labels.contains(&1) && self.labels.contains(&-1)
    }

    /// New dataset made of the given rows, in order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        LabeledDataset {
            features,
            labels,
            dim: self.dim,
        }
    }

    /// Writes the intermediate CSV schema: header `x0,..,x{d-1},label`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.dim).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        wtr.write_record(&header)?;
        for (row, &y) in self.rows().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(y.to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(File::create(path)?)
    }
}

/// Union of disjoint closed subintervals of [0, 1]; +1 inside, -1 outside.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalsConcept {
    intervals: Vec<(f64, f64)>,
}

impl IntervalsConcept {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for (k, &(a, b)) in intervals.iter().enumerate() {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::invalid(format!(
                    "interval {k} = [{a}, {b}] is not inside [0, 1]"
                )));
            }
            if k > 0 && intervals[k - 1].1 >= a {
                return Err(Error::invalid(format!(
                    "intervals {} and {k} overlap or are out of order",
                    k - 1
                )));
            }
        }
        Ok(IntervalsConcept { intervals })
    }

    /// `[0,1]` cut into `2k` equal cells; cells 0, 2, 4, .. are positive.
    pub fn equally_spaced(num_intervals: usize) -> Result<Self> {
        if num_intervals == 0 {
            return Err(Error::invalid("num_intervals must be at least 1"));
        }
        let cells = (2 * num_intervals) as f64;
        let intervals = (0..num_intervals)
            .map(|j| ((2 * j) as f64 / cells, (2 * j + 1) as f64 / cells))
            .collect();
        Self::new(intervals)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        // first interval whose right end is >= x
        let k = self.intervals.partition_point(|&(_, b)| b < x);
        k < self.intervals.len() && self.intervals[k].0 <= x
    }

    pub fn label(&self, x: f64) -> i8 {
        if self.contains(x) {
            1
        } else {
            -1
        }
    }

    /// Lebesgue measure of the positive region.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().flat_map(|&(a, b)| [a, b])
    }
}

/// The intervals problem: `n` uniform points on [0,1] labeled by
/// `num_intervals` equally spaced intervals.
pub fn gen_intervals(
    num_intervals: usize,
    n: usize,
    rng: &RngState,
) -> Result<(LabeledDataset, IntervalsConcept)> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let concept = IntervalsConcept::equally_spaced(num_intervals)?;
    let mut gen = rng.stream("gen_intervals");
    let xs: Vec<f64> = (0..n).map(|_| gen.random::<f64>()).collect();
    let labels = xs.iter().map(|&x| concept.label(x)).collect();
    Ok((LabeledDataset::new(xs, labels, 1)?, concept))
}

/// Twonorm: equiprobable classes, `N(+mu, I)` vs `N(-mu, I)` with
/// `mu = (2/sqrt(d), .., 2/sqrt(d))`.
pub fn gen_twonorm(n: usize, d: usize, rng: &RngState) -> Result<LabeledDataset> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("twonorm needs n >= 1 and d >= 1"));
    }
    let mu = 2.0 / (d as f64).sqrt();
    let mut gen = rng.stream("gen_twonorm");
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y: i8 = if gen.random::<bool>() { 1 } else { -1 };
        let center = f64::from(y) * mu;
        for _ in 0..d {
            let z: f64 = StandardNormal.sample(&mut gen);
            features.push(center + z);
        }
        labels.push(y);
    }
    LabeledDataset::new(features, labels, d)
}

/// Number of binary attributes in [`gen_krkp_like`] samples.
pub const KRKP_LIKE_DIM: usize = 36;

/// Synthetic stand-in for the chess endgame data: 36 binary attributes with
/// unequal frequencies, a small DNF concept over a handful of them, and 3%
/// label noise.
pub fn gen_krkp_like(n: usize, rng: &RngState) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut gen = rng.stream("gen_krkp_like");
    let freq: Vec<f64> = (0..KRKP_LIKE_DIM)
        .map(|j| 0.2 + 0.6 * ((j * 7) % 11) as f64 / 10.0)
        .collect();
    let mut features = Vec::with_capacity(n * KRKP_LIKE_DIM);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<bool> = freq.iter().map(|&p| gen.random_bool(p)).collect();
        let clean = (x[0] && !x[3])
            || (x[5] && x[7] && x[11])
            || (!x[2] && x[13])
            || (x[20] && !x[21] && x[30]);
        let noisy = if gen.random_bool(0.03) { !clean } else { clean };
        features.extend(x.iter().map(|&b| if b { 1.0 } else { 0.0 }));
        labels.push(if noisy { 1 } else { -1 });
    }
    LabeledDataset::new(features, labels, KRKP_LIKE_DIM)
}

/// How to read a labeled CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    /// Column holding the label; `None` means the last column.
    pub label_column: Option<usize>,
    /// Label token mapped to +1; every other token maps to -1.
    pub positive_label: String,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label_column: None,
            positive_label: "1".into(),
            has_header: true,
        }
    }
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<LabeledDataset> {
    let file = File::open(path).map_err(|e| Error::Data {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_csv(BufReader::new(file), opts).map_err(|e| match e {
        Error::InvalidArgument(message) => Error::Data {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Row indices in errors are 0-based data rows (the header is not counted).
pub fn read_csv<R: Read>(input: R, opts: &CsvOptions) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        match width {
            None => {
                if rec.len() < 2 {
                    return Err(Error::Parse {
                        row,
                        column: 0,
                        message: "need at least one feature and a label".into(),
                    });
                }
                width = Some(rec.len());
            }
            Some(w) if w != rec.len() => {
                return Err(Error::Parse {
                    row,
                    column: rec.len().min(w),
                    message: format!("expected {w} columns, found {}", rec.len()),
                });
            }
            _ => {}
        }
        let w = rec.len();
        let label_col = opts.label_column.unwrap_or(w - 1);
        if label_col >= w {
            return Err(Error::invalid(format!(
                "label column {label_col} out of range for {w} columns"
            )));
        }
        for (column, field) in rec.iter().enumerate() {
            if column == label_col {
                labels.push(if field == opts.positive_label { 1 } else { -1 });
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column,
                    message: format!("'{field}' is not finite"),
                });
            }
            features.push(v);
        }
    }
    match width {
        None => Err(Error::invalid("no rows")),
        Some(w) => LabeledDataset::new(features, labels, w - 1),
    }
}

/// Uniformly random partition into `floor(n * train_fraction)` training rows
/// and the rest for testing.
pub fn split(
    ds: &LabeledDataset,
    train_fraction: f64,
    rng: &RngState,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid("train fraction must lie in (0, 1)"));
    }
    let n = ds.len();
    let n_train = (n as f64 * train_fraction).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::invalid(format!(
            "train fraction {train_fraction} leaves an empty side for n = {n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng.stream("split"));
    let (train, test) = idx.split_at(n_train);
    Ok((ds.select(train), ds.select(test)))
}

/// Indices of a size-n bootstrap resample.
pub fn bootstrap_indices(n: usize, rng: &RngState) -> Vec<usize> {
    let mut gen = rng.stream("bootstrap");
    (0..n).map(|_| gen.random_range(0..n)).collect()
}

pub fn bootstrap(ds: &LabeledDataset, rng: &RngState) -> LabeledDataset {
    ds.select(&bootstrap_indices(ds.len(), rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_labels_follow_concept() {
        let (ds, concept) = gen_intervals(20, 1000, &RngState::new(3)).unwrap();
        assert_eq!(ds.len(), 1000);
        assert_eq!(ds.dim(), 1);
        for i in 0..ds.len() {
            let x = ds.value(i, 0);
            assert!((0.0..1.0).contains(&x));
            assert_eq!(ds.label(i) == 1, concept.contains(x));
        }
        assert!(ds.has_both_labels());
    }

    #[test]
    fn concept_measure_is_half() {
        for k in [1, 2, 3, 7, 20, 64] {
            let c = IntervalsConcept::equally_spaced(k).unwrap();
            assert!((c.measure() - 0.5).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn single_interval_is_lower_half() {
        let c = IntervalsConcept::equally_spaced(1).unwrap();
        assert_eq!(c.intervals(), &[(0.0, 0.5)]);
        assert_eq!(c.label(0.5), 1);
        assert_eq!(c.label(0.25), 1);
        assert_eq!(c.label(0.5000001), -1);
        let (ds, _) = gen_intervals(1, 200, &RngState::new(1)).unwrap();
        for i in 0..ds.len() {
            assert_eq!(ds.label(i) == 1, ds.value(i, 0) <= 0.5);
        }
    }

    #[test]
    fn concept_boundaries_are_closed() {
        let c = IntervalsConcept::equally_spaced(2).unwrap();
        assert_eq!(c.label(0.0), 1);
        assert_eq!(c.label(0.25), 1);
        assert_eq!(c.label(0.5), 1);
        assert_eq!(c.label(0.75), 1);
        assert_eq!(c.label(0.3), -1);
        assert_eq!(c.label(1.0), -1);
    }

    #[test]
    fn rejects_bad_concepts() {
        assert!(IntervalsConcept::new(vec![(0.2, 0.4), (0.3, 0.5)]).is_err());
        assert!(IntervalsConcept::new(vec![(0.5, 0.6), (0.1, 0.2)]).is_err());
        assert!(IntervalsConcept::new(vec![(0.5, 1.2)]).is_err());
        assert!(IntervalsConcept::equally_spaced(0).is_err());
    }

    #[test]
    fn twonorm_shape_and_determinism() {
        let a = gen_twonorm(1000, 20, &RngState::new(11)).unwrap();
        let b = gen_twonorm(1000, 20, &RngState::new(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 20);
        let c = gen_twonorm(1000, 20, &RngState::new(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn twonorm_class_mean_one_dimensional() {
        // class +1 ~ N(2, 1) when d = 1
        let ds = gen_twonorm(40_000, 1, &RngState::new(5)).unwrap();
        let pos: Vec<f64> = (0..ds.len())
            .filter(|&i| ds.label(i) == 1)
            .map(|i| ds.value(i, 0))
            .collect();
        let m = pos.len() as f64;
        let mean = pos.iter().sum::<f64>() / m;
        let se = 1.0 / m.sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}, se {se}");
        let frac = m / ds.len() as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.5 / (ds.len() as f64).sqrt());
    }

    #[test]
    fn split_sizes_and_partition() {
        let ds = gen_krkp_like(3196, &RngState::new(2)).unwrap();
        let (tr, te) = split(&ds, 0.9, &RngState::new(9)).unwrap();
        assert_eq!((tr.len(), te.len()), (2876, 320));

        let ds = LabeledDataset::new(
            (0..10).map(f64::from).collect(),
            vec![1, -1, 1, -1, 1, -1, 1, -1, 1, -1],
            1,
        )
        .unwrap();
        let (tr, te) = split(&ds, 0.5, &RngState::new(4)).unwrap();
        assert_eq!((tr.len(), te.len()), (5, 5));
        let mut all: Vec<f64> = tr.rows().chain(te.rows()).map(|r| r[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(f64::from).collect::<Vec<_>>());
        let (tr2, _) = split(&ds, 0.5, &RngState::new(4)).unwrap();
        assert_eq!(tr, tr2);
    }

    #[test]
    fn split_rejects_empty_side() {
        let ds = LabeledDataset::new(vec![0.0, 1.0, 2.0], vec![1, -1, 1], 1).unwrap();
        assert!(split(&ds, 0.1, &RngState::new(0)).is_err());
        assert!(split(&ds, 1.0, &RngState::new(0)).is_err());
        assert!(split(&ds, 0.5, &RngState::new(0)).is_ok());
    }

    #[test]
    fn bootstrap_single_row() {
        let ds = LabeledDataset::new(vec![0.3], vec![-1], 1).unwrap();
        assert_eq!(bootstrap(&ds, &RngState::new(1)), ds);
    }

    #[test]
    fn bootstrap_distinct_fraction() {
        // E[#distinct]/n -> 1 - 1/e for large n
        let n = 2000;
        let reps = 200;
        let mut fracs = Vec::with_capacity(reps);
        for r in 0..reps {
            let idx = bootstrap_indices(n, &RngState::new(17).fork_index(r));
            let mut seen = vec![false; n];
            idx.iter().for_each(|&i| seen[i] = true);
            fracs.push(seen.iter().filter(|&&s| s).count() as f64 / n as f64);
        }
        let mean = fracs.iter().sum::<f64>() / reps as f64;
        let var = fracs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        let target = 1.0 - (-1.0f64).exp();
        // finite-n mean is 1 - (1 - 1/n)^n, within 1e-4 of the limit here
        assert!(
            (mean - target).abs() < 3.0 * se + 1e-4,
            "mean {mean} se {se}"
        );
        assert_eq!(
            bootstrap_indices(n, &RngState::new(17)),
            bootstrap_indices(n, &RngState::new(17))
        );
    }

    #[test]
    fn csv_reading() {
        let text = "a,b,class\n1,2,won\n3,4.5,nowin\n";
        let ds = read_csv(
            text.as_bytes(),
            &CsvOptions {
                positive_label: "won".into(),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labels(), &[1, -1]);
        assert_eq!(ds.row(1), &[3.0, 4.5]);

        let text = "won,1,2\nnowin,3,4\n";
        let opts = CsvOptions {
            label_column: Some(0),
            positive_label: "won".into(),
            has_header: false,
        };
        let ds = read_csv(text.as_bytes(), &opts).unwrap();
        assert_eq!(ds.row(0), &[1.0, 2.0]);
        assert_eq!(ds.labels(), &[1, -1]);
    }

    #[test]
    fn csv_errors() {
        let opts = CsvOptions::default();
        let err = read_csv("".as_bytes(), &opts).unwrap_err();
        assert!(err.to_string().contains("no rows"));
        let err = read_csv("x0,label\n".as_bytes(), &opts).unwrap_err();
        assert!(err.to_string().contains("no rows"));

        let err = read_csv("x0,x1,label\n1,2,1\n3,abc,-1\n".as_bytes(), &opts).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (1, 1)),
            e => panic!("unexpected {e}"),
        }
        let err = read_csv("x0,x1,label\n1,2,1\n3,-1\n".as_bytes(), &opts).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }), "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let ds = gen_twonorm(25, 3, &RngState::new(8)).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = read_csv(buf.as_slice(), &CsvOptions::default()).unwrap();
        assert_eq!(back, ds);
    }
}
