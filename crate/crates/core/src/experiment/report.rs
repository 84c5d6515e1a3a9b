use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::plot::{LineChart, Series};

/// Numeric table with a header; infinities are written as `inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

fn parse_value(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok().filter(|v: &f64| !v.is_nan()),
    }
}

impl BoundReport {
    pub fn new(columns: Vec<String>) -> Self {
        BoundReport {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid("row width differs from header"));
        }
        if row.iter().any(|v| v.is_nan()) {
            return Err(Error::numeric("NaN in report row"));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::invalid(format!("no column named {name}")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_value(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut report = BoundReport::new(columns);
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    parse_value(s).ok_or_else(|| Error::Parse {
                        row: i + 2,
                        column: j + 1,
                        message: format!("not a number: {s:?}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            report.rows.push(row);
        }
        if report.rows.is_empty() {
            return Err(Error::invalid("CSV has no data rows"));
        }
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Data {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::read_csv(file).map_err(|e| match e {
            Error::InvalidArgument(message) => Error::Data {
                path: path.to_path_buf(),
                message,
            },
            e => e,
        })
    }

    /// Line chart of `ys` against `x`.
    pub fn chart(&self, title: &str, x: &str, ys: &[String]) -> Result<LineChart> {
        let xs = self.column(x)?;
        let series = ys
            .iter()
            .map(|name| {
                Ok(Series {
                    name: name.clone(),
                    ys: self.column(name)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LineChart {
            title: title.into(),
            x_label: x.into(),
            xs,
            series,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_infinity() {
        let mut r = BoundReport::new(vec!["round".into(), "bound".into()]);
        r.push(vec![1.0, f64::INFINITY]).unwrap();
        r.push(vec![2.0, 0.125]).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "round,bound\n1,inf\n2,0.125\n"
        );
        assert_eq!(BoundReport::read_csv(&buf[..]).unwrap(), r);
    }

    #[test]
    fn rejects_nan_and_missing_columns() {
        let mut r = BoundReport::new(vec!["a".into()]);
        assert!(r.push(vec![f64::NAN]).is_err());
        assert!(r.push(vec![1.0, 2.0]).is_err());
        r.push(vec![1.0]).unwrap();
        assert!(r.chart("t", "a", &["b".into()]).is_err());
        assert!(BoundReport::read_csv("a,b\n".as_bytes()).is_err());
        assert!(BoundReport::read_csv("a\nx\n".as_bytes()).is_err());
    }
}
