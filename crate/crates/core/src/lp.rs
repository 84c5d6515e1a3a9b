//! Dense two-phase simplex for `min c.x  s.t.  A x = b, x >= 0`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Reduced costs below `-REDUCED_COST_TOL` make a column eligible to enter.
pub const REDUCED_COST_TOL: f64 = 1e-9;
/// Smallest admissible pivot magnitude.
pub const PIVOT_TOL: f64 = 1e-10;
/// Equality residuals are accepted up to `FEASIBILITY_TOL * (1 + |b|_inf)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_PIVOTS: usize = 200_000;
/// Right-hand sides this small count as zero; also the Harris slack.
const ZERO_RHS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 50;
/// The tableau is rebuilt from the original data this often.
const REINVERT_EVERY: usize = 100;

/// Linear program in standard equality form.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl StandardLp {
    /// Rows with negative right-hand side are negated so that `b >= 0`.
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != c.len()) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                c.len()
            )));
        }
        if c.iter()
            .chain(b.iter())
            .chain(a.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("LP data must be finite"));
        }
        let mut a = a;
        let mut b = b;
        for (row, bi) in a.iter_mut().zip(b.iter_mut()) {
            if *bi < 0.0 {
                *bi = -*bi;
                row.iter_mut().for_each(|v| *v = -*v);
            }
        }
        Ok(StandardLp { c, a, b })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    /// `|A x - b|_inf`
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max)
    }

    /// Rows of `A | b` followed by a `c` line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (row, bi) in self.a.iter().zip(&self.b) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{} | {}", cells.join(" "), bi);
        }
        let cells: Vec<String> = self.c.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "c: {}", cells.join(" "));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Basic solution at termination (zeros when infeasible).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic column per row; indices `>= num_vars` are leftover artificials
    /// on redundant rows.
    pub basis: Vec<usize>,
    /// Final reduced costs of the original columns.
    pub reduced_costs: Vec<f64>,
    pub phase_one_objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    cells: Vec<f64>,
    /// `[A | artificials | b]` as first assembled
    initial: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    cost_row: Vec<f64>,
    pivots: usize,
    max_pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.cells[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn reset_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        self.cost = cost.to_vec();
        self.cost_row = cost.to_vec();
        self.cost_row.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.cells[i * w..(i + 1) * w];
                for (z, a) in self.cost_row.iter_mut().zip(row) {
                    *z -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::numeric(format!(
                "simplex exceeded {} pivots",
                self.max_pivots
            )));
        }
        let w = self.width;
        let p = self.at(r, col);
        let (before, rest) = self.cells.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        prow.iter_mut().for_each(|v| *v /= p);
        prow[col] = 1.0;
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = self.cost_row[col];
        if f != 0.0 {
            for (v, pv) in self.cost_row.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.cost_row[col] = 0.0;
        }
        self.basis[r] = col;
        for i in 0..self.rows {
            let v = &mut self.cells[i * w + w - 1];
            if *v < 0.0 && *v >= -ZERO_RHS_TOL {
                *v = 0.0;
            }
        }
        Ok(())
    }

    /// Recomputes `B^-1 [A | b]` and the cost row for the current basis.
    /// Leaves the tableau unchanged if `B` is numerically singular.
    fn reinvert(&mut self) {
        let (m, w) = (self.rows, self.width);
        let mut b = vec![0.0; m * m];
        for (col, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                b[i * m + col] = self.initial[i * w + j];
            }
        }
        let mut rhs = self.initial.clone();
        for c in 0..m {
            let p = (c..m)
                .max_by(|&i, &j| b[i * m + c].abs().total_cmp(&b[j * m + c].abs()))
                .unwrap_or(c);
            if b[p * m + c].abs() < 1e-12 {
                return;
            }
            if p != c {
                for j in 0..m {
                    b.swap(p * m + j, c * m + j);
                }
                for j in 0..w {
                    rhs.swap(p * w + j, c * w + j);
                }
            }
            let piv = b[c * m + c];
            for i in c + 1..m {
                let f = b[i * m + c] / piv;
                if f != 0.0 {
                    for j in c..m {
                        b[i * m + j] -= f * b[c * m + j];
                    }
                    let (top, bottom) = rhs.split_at_mut(i * w);
                    let src = &top[c * w..(c + 1) * w];
                    for (v, s) in bottom[..w].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
        }
        for c in (0..m).rev() {
            for k in c + 1..m {
                let f = b[c * m + k];
                if f != 0.0 {
                    let (top, bottom) = rhs.split_at_mut(k * w);
                    let src = &bottom[..w];
                    for (v, s) in top[c * w..(c + 1) * w].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
            let piv = b[c * m + c];
            rhs[c * w..(c + 1) * w].iter_mut().for_each(|v| *v /= piv);
        }
        for (i, &j) in self.basis.iter().enumerate() {
            for r in 0..m {
                rhs[r * w + j] = if r == i { 1.0 } else { 0.0 };
            }
        }
        self.cells = rhs;
        let cost = std::mem::take(&mut self.cost);
        self.reset_costs(&cost);
    }

    /// Dantzig pricing over columns `0..allowed`, falling back to Bland's rule
    /// after a run of degenerate pivots. Harris ratio test, periodic
    /// reinversion and a fresh tableau before optimality is declared.
    fn run(&mut self, allowed: usize) -> Result<Outcome> {
        let mut fresh = false;
        let mut degenerate_run = 0;
        loop {
            let bland = degenerate_run >= BLAND_AFTER;
            let entering = if bland {
                (0..allowed).find(|&j| self.cost_row[j] < -REDUCED_COST_TOL)
            } else {
                (0..allowed)
                    .filter(|&j| self.cost_row[j] < -REDUCED_COST_TOL)
                    .min_by(|&a, &b| self.cost_row[a].total_cmp(&self.cost_row[b]))
            };
            let Some(col) = entering else {
                if fresh {
                    return Ok(Outcome::Optimal);
                }
                self.reinvert();
                fresh = true;
                continue;
            };
            fresh = false;
            let Some(r) = self.leaving_row(col, bland) else {
                return Ok(Outcome::Unbounded);
            };
            if self.rhs(r) <= ZERO_RHS_TOL {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, col)?;
            if self.pivots.is_multiple_of(REINVERT_EVERY) {
                self.reinvert();
            }
        }
    }

    /// Harris two-pass ratio test: the bound is relaxed by `ZERO_RHS_TOL`,
    /// then the largest pivot within it wins (smallest basic index under
    /// Bland's rule).
    fn leaving_row(&self, col: usize, bland: bool) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a > PIVOT_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + ZERO_RHS_TOL) / a);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a <= PIVOT_TOL || self.rhs(i).max(0.0) / a > bound {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) if bland => Some(if self.basis[i] < self.basis[b] { i } else { b }),
                Some(b) => Some(if a > self.at(b, col) { i } else { b }),
            };
        }
        best
    }
}

/// Columns that equal a unit vector `e_i` can start basic in row `i`.
fn crash_basis(lp: &StandardLp) -> Vec<Option<usize>> {
    let m = lp.num_constraints();
    let mut basis = vec![None; m];
    for j in 0..lp.num_vars() {
        let mut unit_row = None;
        let mut ok = true;
        for i in 0..m {
            let v = lp.a[i][j];
            if v == 1.0 && unit_row.is_none() {
                unit_row = Some(i);
            } else if v != 0.0 {
                ok = false;
                break;
            }
        }
        if let (true, Some(i)) = (ok, unit_row) {
            if basis[i].is_none() {
                basis[i] = Some(j);
            }
        }
    }
    basis
}

/// Re-solves `B x_B = b` from the original data to shed tableau drift.
/// Artificial column `k + a` is the unit vector of `artificial_rows[a]`.
/// `None` if `B` is numerically singular.
fn basic_solution(lp: &StandardLp, basis: &[usize], artificial_rows: &[usize]) -> Option<Vec<f64>> {
    let m = basis.len();
    let k = lp.num_vars();
    let mut mat = vec![0.0; m * m];
    for (col, &j) in basis.iter().enumerate() {
        if j < k {
            for i in 0..m {
                mat[i * m + col] = lp.a[i][j];
            }
        }
    }
    for (col, &j) in basis.iter().enumerate() {
        if j >= k {
            mat[artificial_rows[j - k] * m + col] = 1.0;
        }
    }
    let xb = gauss_solve(mat, lp.b.clone(), m)?;
    let mut x = vec![0.0; k];
    for (col, &j) in basis.iter().enumerate() {
        if j < k {
            x[j] = xb[col].max(0.0);
        }
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting on a row-major `m x m` matrix.
fn gauss_solve(mut a: Vec<f64>, mut b: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs()))?;
        if a[p * m + c].abs() < 1e-12 {
            return None;
        }
        if p != c {
            for j in 0..m {
                a.swap(p * m + j, c * m + j);
            }
            b.swap(p, c);
        }
        let piv = a[c * m + c];
        for i in c + 1..m {
            let f = a[i * m + c] / piv;
            if f != 0.0 {
                for j in c..m {
                    a[i * m + j] -= f * a[c * m + j];
                }
                b[i] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|j| a[c * m + j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c * m + c];
    }
    Some(x)
}

pub fn solve(lp: &StandardLp) -> Result<LpSolution> {
    solve_with_limit(lp, DEFAULT_MAX_PIVOTS)
}

/// Two-phase simplex; exceeding `max_pivots` is a numeric error.
pub fn solve_with_limit(lp: &StandardLp, max_pivots: usize) -> Result<LpSolution> {
    let m = lp.num_constraints();
    let k = lp.num_vars();
    let crash = crash_basis(lp);
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| crash[i].is_none()).collect();
    let cols = k + artificial_rows.len();
    let width = cols + 1;
    let mut cells = vec![0.0; m * width];
    let mut basis = vec![0; m];
    for i in 0..m {
        cells[i * width..i * width + k].copy_from_slice(&lp.a[i]);
        cells[i * width + cols] = lp.b[i];
        if let Some(j) = crash[i] {
            basis[i] = j;
        }
    }
    for (a, &i) in artificial_rows.iter().enumerate() {
        cells[i * width + k + a] = 1.0;
        basis[i] = k + a;
    }
    let mut tab = Tableau {
        rows: m,
        width,
        initial: cells.clone(),
        cells,
        basis,
        cost: Vec::new(),
        cost_row: Vec::new(),
        pivots: 0,
        max_pivots,
    };

    let mut phase_one_objective = 0.0;
    if !artificial_rows.is_empty() {
        let mut cost = vec![0.0; cols];
        cost[k..].iter_mut().for_each(|c| *c = 1.0);
        tab.reset_costs(&cost);
        tab.run(cols)?;
        phase_one_objective = -tab.cost_row[cols];
        let b_norm = lp.b.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if phase_one_objective > FEASIBILITY_TOL * (1.0 + b_norm) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; k],
                objective: f64::NAN,
                basis: tab.basis.clone(),
                reduced_costs: tab.cost_row[..k].to_vec(),
                phase_one_objective,
                pivots: tab.pivots,
            });
        }
        for i in 0..m {
            if tab.basis[i] >= k {
                if let Some(j) = (0..k).find(|&j| tab.at(i, j).abs() > PIVOT_TOL) {
                    tab.pivot(i, j)?;
                }
            }
        }
    }

    let mut cost = lp.c.clone();
    cost.resize(cols, 0.0);
    tab.reset_costs(&cost);
    let outcome = tab.run(k)?;
    let x = basic_solution(lp, &tab.basis, &artificial_rows).unwrap_or_else(|| {
        let mut x = vec![0.0; k];
        for i in 0..m {
            if tab.basis[i] < k {
                x[tab.basis[i]] = tab.rhs(i).max(0.0);
            }
        }
        x
    });
    let objective = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    if status == LpStatus::Optimal {
        let b_norm = lp.b.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let res = lp.residual(&x);
        if res > FEASIBILITY_TOL * (1.0 + b_norm) {
            return Err(Error::numeric(format!(
                "simplex residual {res:e} above tolerance"
            )));
        }
    }
    Ok(LpSolution {
        status,
        x,
        objective,
        basis: tab.basis,
        reduced_costs: tab.cost_row[..k].to_vec(),
        phase_one_objective,
        pivots: tab.pivots,
    })
}
