//! Empirical margin distributions and the margin-based bounds built on them:
//! gamma-margins, gamma-bounds and empirical psi-bounds.

use crate::error::{Error, Result};

/// Sorted empirical margins; `cdf` is the right-continuous step function
/// `P_n{f <= delta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginProfile {
    sorted: Vec<f64>,
}

impl MarginProfile {
    pub fn new(mut margins: Vec<f64>) -> Result<Self> {
        if margins.is_empty() {
            return Err(Error::invalid("margin profile needs at least one margin"));
        }
        if margins.iter().any(|m| m.is_nan()) {
            return Err(Error::invalid("margin is NaN"));
        }
        margins.sort_by(f64::total_cmp);
        Ok(MarginProfile { sorted: margins })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn count_le(&self, delta: f64) -> usize {
        self.sorted.partition_point(|&m| m <= delta)
    }

    pub fn count_lt(&self, delta: f64) -> usize {
        self.sorted.partition_point(|&m| m < delta)
    }

    pub fn cdf(&self, delta: f64) -> f64 {
        self.count_le(delta) as f64 / self.len() as f64
    }

    /// Distinct values with `P_n{f <= value}`.
    pub fn steps(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len() as f64;
        let mut values = Vec::new();
        let mut cdf = Vec::new();
        for (k, &m) in self.sorted.iter().enumerate() {
            if values.last() == Some(&m) {
                *cdf.last_mut().unwrap() = (k + 1) as f64 / n;
            } else {
                values.push(m);
                cdf.push((k + 1) as f64 / n);
            }
        }
        (values, cdf)
    }
}

/// Result of a supremum over an open interval. `value` is 0 with
/// `feasible == false` when no point qualifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supremum {
    pub value: f64,
    pub feasible: bool,
}

impl Supremum {
    pub fn empty() -> Self {
        Supremum {
            value: 0.0,
            feasible: false,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma = {gamma} outside (0, 1]")))
    }
}

/// `sup{delta in (0,1) : delta^gamma F(delta) <= n^(gamma/2 - 1)}` for a step
/// cdf `F` given by distinct sorted `values` and `F(values[k]) = cdf[k]`.
///
/// On each step F is a constant `p`, and the condition reads
/// `delta <= (n^(gamma/2 - 1) / p)^(1/gamma)`, so the supremum is the largest
/// per-step supremum, clipped to (0, 1].
pub fn step_gamma_margin(values: &[f64], cdf: &[f64], n: usize, gamma: f64) -> Result<Supremum> {
    check_gamma(gamma)?;
    if values.len() != cdf.len() {
        return Err(Error::invalid("values and cdf must have equal length"));
    }
    let level = (n as f64).powf(gamma / 2.0 - 1.0);
    let mut best: Option<f64> = None;
    for k in 0..=values.len() {
        let lo = if k == 0 {
            f64::NEG_INFINITY
        } else {
            values[k - 1]
        };
        let hi = values.get(k).copied().unwrap_or(f64::INFINITY);
        let p = if k == 0 { 0.0 } else { cdf[k - 1] };
        let reach = if p > 0.0 {
            (level / p).powf(1.0 / gamma)
        } else {
            f64::INFINITY
        };
        let upper = hi.min(reach);
        if upper >= lo && upper > 0.0 && lo < 1.0 {
            let cand = upper.min(1.0);
            best = Some(best.map_or(cand, |b: f64| b.max(cand)));
        }
    }
    Ok(match best {
        Some(value) => Supremum {
            value,
            feasible: true,
        },
        None => Supremum::empty(),
    })
}

/// The empirical gamma-margin `delta_hat_n(gamma; f)`.
pub fn gamma_margin(profile: &MarginProfile, gamma: f64) -> Result<Supremum> {
    let (values, cdf) = profile.steps();
    step_gamma_margin(&values, &cdf, profile.len(), gamma)
}

/// `1 / (n^(1 - gamma/2) delta^gamma)`, infinite when `delta == 0`.
pub fn gamma_bound_from_margin(n: usize, gamma: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        return f64::INFINITY;
    }
    1.0 / ((n as f64).powf(1.0 - gamma / 2.0) * delta.powf(gamma))
}

/// The gamma-bound `1 / (n^(1 - gamma/2) delta_hat_n(gamma; f)^gamma)`.
pub fn gamma_bound(profile: &MarginProfile, gamma: f64) -> Result<f64> {
    let sup = gamma_margin(profile, gamma)?;
    Ok(gamma_bound_from_margin(profile.len(), gamma, sup.value))
}

/// `gamma = 2 alpha / (alpha + 2)`.
pub fn gamma_from_alpha(alpha: f64) -> f64 {
    2.0 * alpha / (alpha + 2.0)
}

/// `alpha = 2 gamma / (2 - gamma)`, inverse of [`gamma_from_alpha`].
pub fn alpha_from_gamma(gamma: f64) -> f64 {
    2.0 * gamma / (2.0 - gamma)
}

const PHI_INVERSE_RTOL: f64 = 1e-12;
const PSI_BOUND_ATOL: f64 = 1e-10;

/// Concave nondecreasing `psi` on `[0, inf)` with `psi(0) = 0`.
pub trait Psi: Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// `psi(x) / x`, nonincreasing.
    fn phi(&self, x: f64) -> f64 {
        self.value(x) / x
    }

    /// Largest `x` with `phi(x) >= y`.
    fn phi_inverse(&self, y: f64) -> Result<f64> {
        bisect_phi_inverse(|x| self.phi(x), y)
    }

    /// `delta_n^psi(eps) = phi^{-1}(sqrt(eps n)) / sqrt(eps)`.
    fn delta(&self, n: usize, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::invalid(format!("eps = {eps} must be positive")));
        }
        Ok(self.phi_inverse((eps * n as f64).sqrt())? / eps.sqrt())
    }
}

/// `sup{x > 0 : phi(x) >= y}` for nonincreasing `phi`, by bracketing and
/// bisection to relative tolerance 1e-12.
pub fn bisect_phi_inverse(phi: impl Fn(f64) -> f64, y: f64) -> Result<f64> {
    const LIMIT: i32 = 1000;
    let (mut lo, mut hi) = if phi(1.0) >= y {
        let mut hi = 2.0;
        let mut steps = 0;
        while phi(hi) >= y {
            hi *= 2.0;
            steps += 1;
            if steps > LIMIT || !hi.is_finite() {
                return Err(Error::numeric(format!(
                    "phi never falls below {y}: phi is not invertible there"
                )));
            }
        }
        (hi / 2.0, hi)
    } else {
        let mut lo = 0.5;
        let mut steps = 0;
        while phi(lo) < y {
            lo /= 2.0;
            steps += 1;
            if steps > LIMIT || lo == 0.0 {
                return Err(Error::numeric(format!(
                    "phi never reaches {y}: value outside the range of phi"
                )));
            }
        }
        (lo, lo * 2.0)
    };
    while hi - lo > PHI_INVERSE_RTOL * hi {
        let mid = lo + (hi - lo) / 2.0;
        if phi(mid) >= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `psi(x) = x^(1 - alpha/2)`, with `phi^{-1}(y) = y^(-2/alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPsi {
    pub alpha: f64,
}

impl PowerPsi {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha = {alpha} outside [0, 2)")));
        }
        Ok(PowerPsi { alpha })
    }
}

impl Psi for PowerPsi {
    fn value(&self, x: f64) -> f64 {
        x.powf(1.0 - self.alpha / 2.0)
    }

    fn phi(&self, x: f64) -> f64 {
        x.powf(-self.alpha / 2.0)
    }

    fn phi_inverse(&self, y: f64) -> Result<f64> {
        if self.alpha == 0.0 {
            return Err(Error::numeric(
                "phi is constant for alpha = 0 and has no inverse",
            ));
        }
        if !(y > 0.0) {
            return Err(Error::invalid(format!(
                "phi takes only positive values, got {y}"
            )));
        }
        Ok(y.powf(-2.0 / self.alpha))
    }
}

/// `psi(x) = x sqrt(ln(e/x))` on `[0,1]`, `x` beyond. Its delta function is
/// `e^(1 - n eps) / sqrt(eps)` for `eps >= 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VcPsi;

impl Psi for VcPsi {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x <= 1.0 {
            x * (1.0 - x.ln()).sqrt()
        } else {
            x
        }
    }

    fn phi(&self, x: f64) -> f64 {
        if x <= 1.0 {
            (1.0 - x.ln()).sqrt()
        } else {
            1.0
        }
    }

    fn phi_inverse(&self, y: f64) -> Result<f64> {
        if y < 1.0 {
            return Err(Error::invalid(format!(
                "phi^-1({y}) undefined: requires eps >= 1/n"
            )));
        }
        Ok((1.0 - y * y).exp())
    }
}

/// Piecewise-linear `psi` through user knots, continued with the last slope.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPsi {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TabulatedPsi {
    /// Knots `(x_k, psi(x_k))` with increasing positive `x_k`; `(0, 0)` is
    /// implied. Concavity and monotonicity are checked on a 1024-point grid.
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("tabulated psi needs at least one knot"));
        }
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for &(x, y) in knots {
            if !(x > *xs.last().unwrap()) || !y.is_finite() {
                return Err(Error::invalid(
                    "knots must have increasing positive x and finite values",
                ));
            }
            xs.push(x);
            ys.push(y);
        }
        let psi = TabulatedPsi { xs, ys };
        let top = 2.0 * psi.xs.last().unwrap();
        let grid: Vec<f64> = (0..1024).map(|k| top * k as f64 / 1023.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| psi.value(x)).collect();
        let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let tol = 1e-12 * scale;
        for k in 1..vals.len() {
            if vals[k] < vals[k - 1] - tol {
                return Err(Error::invalid("tabulated psi is not nondecreasing"));
            }
            if k + 1 < vals.len() && vals[k + 1] - 2.0 * vals[k] + vals[k - 1] > tol {
                return Err(Error::invalid("tabulated psi is not concave"));
            }
        }
        Ok(psi)
    }
}

impl Psi for TabulatedPsi {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let k = self
            .xs
            .partition_point(|&k| k < x)
            .clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Sample size and confidence level of a psi-bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub n: usize,
    pub t: f64,
}

impl BoundParams {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n == 0 || !(t > 0.0) {
            return Err(Error::invalid("bound parameters need n >= 1 and t > 0"));
        }
        Ok(BoundParams { n, t })
    }

    /// `t = n^(gamma/2)`, the choice under which the power-psi bound reduces
    /// to the gamma-bound.
    pub fn for_gamma(n: usize, gamma: f64) -> Result<Self> {
        Self::new(n, (n as f64).powf(gamma / 2.0))
    }

    /// `(t v 2 ln n) / n`
    pub fn floor(&self) -> f64 {
        let n = self.n as f64;
        self.t.max(2.0 * n.ln()) / n
    }
}

/// `inf{eps >= floor : P_n{f <= delta_n^psi(eps)} <= eps}`.
///
/// `delta_n^psi` is nonincreasing in `eps` and `P_n` nondecreasing in its
/// argument, so feasibility is monotone and bisection finds the infimum.
pub fn empirical_psi_bound(
    profile: &MarginProfile,
    psi: &dyn Psi,
    params: &BoundParams,
) -> Result<f64> {
    let n = profile.len();
    let floor = params.floor();
    if floor > 1.0 {
        return Err(Error::invalid(format!("floor {floor} exceeds 1")));
    }
    let feasible = |eps: f64| -> Result<bool> { Ok(profile.cdf(psi.delta(n, eps)?) <= eps) };
    if feasible(floor)? {
        return Ok(floor);
    }
    // P_n <= 1 always holds at eps = 1
    let (mut lo, mut hi) = (floor, 1.0);
    while hi - lo > PSI_BOUND_ATOL {
        let mid = lo + (hi - lo) / 2.0;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(feasible(hi)?);
    Ok(hi)
}

/// The VC-type empirical bound, the psi-bound with [`VcPsi`].
pub fn vc_psi_bound(profile: &MarginProfile, params: &BoundParams) -> Result<f64> {
    empirical_psi_bound(profile, &VcPsi, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(m: &[f64]) -> MarginProfile {
        MarginProfile::new(m.to_vec()).unwrap()
    }

    #[test]
    fn cdf_steps() {
        let p = profile(&[0.8, 0.2, 0.5]);
        assert!((p.cdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.cdf(0.1), 0.0);
        assert_eq!(p.cdf(0.8), 1.0);
        assert_eq!(p.cdf(5.0), 1.0);
        assert!(MarginProfile::new(vec![]).is_err());
        assert!(MarginProfile::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn gamma_margin_two_segments() {
        let p = profile(&[0.9; 4]);
        let s = gamma_margin(&p, 1.0).unwrap();
        assert!(s.feasible);
        assert_eq!(s.value, 0.9);
    }

    #[test]
    fn gamma_margin_all_ones_closes_at_one() {
        let p = profile(&[1.0; 10]);
        let s = gamma_margin(&p, 0.5).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn gamma_margin_with_all_mass_below_zero() {
        // n = 4, gamma = 1: level 1/2 and P = 1 on (0, 1), so delta <= 1/2
        let p = profile(&[-0.5; 4]);
        let s = gamma_margin(&p, 1.0).unwrap();
        assert_eq!(s.value, 0.5);
        assert!(gamma_margin(&p, 0.0).is_err());
        assert!(gamma_margin(&p, 1.5).is_err());
    }

    #[test]
    fn gamma_margin_reach_inside_segment() {
        // margins 0.1 (x2) and 0.95 (x2), n = 4, gamma = 1, level 1/2:
        // on [0.1, 0.95) P = 1/2 so delta <= 1; the sup is 0.95.
        // on [0.95, inf) P = 1, delta <= 1/2 < 0.95: infeasible
        let p = profile(&[0.1, 0.1, 0.95, 0.95]);
        assert_eq!(gamma_margin(&p, 1.0).unwrap().value, 0.95);
        // three of four at 0.1: P = 3/4 there, reach 2/3
        let p = profile(&[0.1, 0.1, 0.1, 0.95]);
        let v = gamma_margin(&p, 1.0).unwrap().value;
        assert!((v - 2.0 / 3.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn gamma_bound_formula() {
        assert!(
            (gamma_bound_from_margin(100, 2.0 / 3.0, 0.5) - 50f64.powf(-2.0 / 3.0)).abs() < 1e-15
        );
        assert!((50f64.powf(-2.0 / 3.0) - 0.07368).abs() < 1e-5);
        assert!((gamma_bound_from_margin(400, 1.0, 1.0) - 0.05).abs() < 1e-15);
        assert_eq!(gamma_bound_from_margin(10, 0.5, 0.0), f64::INFINITY);
    }

    #[test]
    fn power_psi_delta_closed_form() {
        let psi = PowerPsi::new(0.8).unwrap();
        for &(n, eps) in &[(100usize, 0.05), (1000, 0.3), (64, 0.9)] {
            let expected = (eps * n as f64).powf(-1.0 / 0.8) / eps.sqrt();
            let got = psi.delta(n, eps).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected);
            // generic bisection agrees
            let y = (eps * n as f64).sqrt();
            let generic = bisect_phi_inverse(|x| psi.phi(x), y).unwrap();
            assert!((generic - psi.phi_inverse(y).unwrap()).abs() <= 1e-11 * generic);
        }
    }

    #[test]
    fn linear_psi_is_not_invertible() {
        let psi = PowerPsi::new(0.0).unwrap();
        assert!(psi.delta(10, 0.5).is_err());
        let lin = TabulatedPsi::new(&[(1.0, 1.0)]).unwrap();
        assert!(lin.delta(10, 0.5).is_err());
        assert!(PowerPsi::new(2.0).is_err());
    }

    #[test]
    fn vc_psi_delta_closed_form() {
        let n = 200;
        for eps in [1.0 / 200.0, 0.01, 0.1, 0.7] {
            let expected = (1.0 - n as f64 * eps).exp() / f64::sqrt(eps);
            let got = VcPsi.delta(n, eps).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300));
        }
        assert!(VcPsi.delta(n, 0.001).is_err());
        // bisection on phi reproduces the analytic inverse
        for y in [1.5, 2.0, 4.0] {
            let a = VcPsi.phi_inverse(y).unwrap();
            let b = bisect_phi_inverse(|x| VcPsi.phi(x), y).unwrap();
            assert!((a - b).abs() <= 1e-11 * a);
        }
    }

    #[test]
    fn psi_instances_concave_and_phi_nonincreasing() {
        let tab = TabulatedPsi::new(&[(0.5, 1.0), (1.0, 1.5), (3.0, 2.0)]).unwrap();
        let insts: Vec<Box<dyn Psi>> = vec![
            Box::new(PowerPsi::new(1.0).unwrap()),
            Box::new(VcPsi),
            Box::new(tab),
        ];
        for psi in &insts {
            assert_eq!(psi.value(0.0), 0.0);
            let grid: Vec<f64> = (1..400).map(|k| k as f64 * 0.01).collect();
            for w in grid.windows(2) {
                assert!(psi.phi(w[1]) <= psi.phi(w[0]) + 1e-12);
                assert!(psi.value(w[1]) >= psi.value(w[0]) - 1e-12);
            }
        }
        for psi in [&insts[0], &insts[2]] {
            for (a, b) in [(0.1, 0.9), (0.5, 3.0), (0.01, 2.5)] {
                assert!(psi.value((a + b) / 2.0) >= (psi.value(a) + psi.value(b)) / 2.0 - 1e-12);
            }
        }
        // the VC instance is concave on [0, 1] only; its slope jumps from 1/2 to 1 at x = 1
        for (a, b) in [(0.1, 0.9), (0.01, 1.0), (0.3, 0.4)] {
            assert!(VcPsi.value((a + b) / 2.0) >= (VcPsi.value(a) + VcPsi.value(b)) / 2.0 - 1e-12);
        }
        assert!(TabulatedPsi::new(&[(1.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(TabulatedPsi::new(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
    }

    #[test]
    fn psi_bound_equals_floor_without_low_margins() {
        let n = 100;
        let p = profile(&vec![1.0; n]);
        let params = BoundParams::new(n, 1.0).unwrap();
        let floor = params.floor();
        assert!((floor - 2.0 * (n as f64).ln() / n as f64).abs() < 1e-15);
        let psi = PowerPsi::new(1.0).unwrap();
        assert!(psi.delta(n, floor).unwrap() < 1.0);
        assert_eq!(empirical_psi_bound(&p, &psi, &params).unwrap(), floor);
        assert_eq!(vc_psi_bound(&p, &params).unwrap(), floor);
    }

    #[test]
    fn vc_bound_all_wrong_is_one() {
        let p = profile(&[-1.0; 50]);
        let params = BoundParams::new(50, 1.0).unwrap();
        let v = vc_psi_bound(&p, &params).unwrap();
        assert!((v - 1.0).abs() <= 1e-10, "{v}");
    }

    #[test]
    fn alpha_gamma_conversions() {
        for a in [0.2, 1.0, 1.6] {
            assert!((alpha_from_gamma(gamma_from_alpha(a)) - a).abs() < 1e-14);
        }
        assert!((gamma_from_alpha(1.0) - 2.0 / 3.0).abs() < 1e-15);
    }
}
