//! Heat kernel K_t(n) of Γ in closed form, and the oracles that check it.
//!
//! Two evaluation routes are kept side by side:
//!
//! * the closed form: two eigenvalue terms with rational coefficients α_n,
//!   β_n plus integrals of e^{−tλ} γ_n^±(s) over s ∈ [0, π];
//! * the transfer route K^pr_t(n)/√|π⁻¹(n)| from the spectral measure of
//!   the line.
//!
//! For n < 0 the coefficient prefactor has two candidate readings, see
//! [`PrefactorReading`]; [`adjudicate`] decides between them against a
//! truncated heat series on a ball of Γ.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{arg, Error, Result};
use crate::gamma::gamma_ball;
use crate::graph::{heat_series, poisson_tail, HeatSeries, WeightedGraph};
use crate::line::LineWindow;
use crate::quadrature::{integrate_vec, QuadOptions};
use crate::spectral::{kernel_pr_many, lambda_of, Sign};
use crate::word::{fiber_size, ReducedWord};
use crate::Rational;

/// How the n < 0 coefficients are scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrefactorReading {
    /// α_n = (−1)^{⌈n/2⌉}/6, β_n = (−1)^n/6 and γ prefactor √2^{−⌈n/2⌉},
    /// with ⌈·⌉ the ordinary ceiling.
    Printed,
    /// The printed coefficients divided by 2^{⌊|n|/2⌋}, i.e. the γ prefactor
    /// becomes √2^{−⌊|n|/2⌋} = 1/√|π⁻¹(n)|.
    FiberNormalized,
}

impl PrefactorReading {
    pub const ALL: [PrefactorReading; 2] = [PrefactorReading::Printed, PrefactorReading::FiberNormalized];

    pub fn name(self) -> &'static str {
        match self {
            PrefactorReading::Printed => "printed",
            PrefactorReading::FiberNormalized => "fiber-normalized",
        }
    }
}

fn ceil_half(n: i64) -> i64 {
    -(-n).div_euclid(2)
}

fn parity_sign(k: i64) -> i128 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn pow2_rational(e: i64) -> Rational {
    let p = Rational::from_integer(1i128 << e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

// Extra factor 2^{−⌊|n|/2⌋} applied to every n < 0 coefficient by the
// fiber-normalized reading.
fn reading_scale(n: i64, reading: PrefactorReading) -> i64 {
    match reading {
        PrefactorReading::FiberNormalized if n < 0 => -(n.abs() / 2),
        _ => 0,
    }
}

/// Coefficient α_n of e^{−3t/4}.
pub fn coeff_alpha(n: i64, reading: PrefactorReading) -> Rational {
    let c = ceil_half(n);
    let base = Rational::new(parity_sign(c), 6);
    let decay = if n >= 0 { -c } else { 0 };
    base * pow2_rational(decay + reading_scale(n, reading))
}

/// Coefficient β_n of e^{−7t/4}.
pub fn coeff_beta(n: i64, reading: PrefactorReading) -> Rational {
    let base = Rational::new(parity_sign(n), 6);
    let decay = if n >= 0 { -ceil_half(n) } else { 0 };
    base * pow2_rational(decay + reading_scale(n, reading))
}

/// γ_n^±(s), the density of the continuous part on the branch
/// λ = 7/8 ± R_s/2.
pub fn coeff_gamma(n: i64, sign: Sign, s: f64, reading: PrefactorReading) -> Result<f64> {
    if !(0.0..=PI).contains(&s) {
        return Err(arg(format!("spectral parameter {s} outside [0, pi]")));
    }
    Ok(gamma_unchecked(n, sign, s, reading))
}

fn gamma_unchecked(n: i64, sign: Sign, s: f64, reading: PrefactorReading) -> f64 {
    let r = (25.0 / 16.0 + SQRT_2 * s.cos()).sqrt();
    let (sn, cs) = s.sin_cos();
    let pm = sign.value();
    let m = n.div_euclid(2) as f64;
    let (sm, cm) = (m * s).sin_cos();
    let sm1 = ((m + 1.0) * s).sin();
    let a = SQRT_2 + cs;
    let b = 4.0 + 2.0 * SQRT_2 * cs;
    let c = 9.0 * SQRT_2 / 4.0 + 4.0 * cs;
    let odd = n.rem_euclid(2) == 1;
    let bracket = match (n >= 0, odd) {
        (true, false) => -pm * a * sm + 4.0 * r * sn * cm,
        (true, true) => pm * b * sm + (SQRT_2 * r - pm * c) * sm1,
        (false, false) => pm * a * sm + 4.0 * r * sn * cm,
        (false, true) => pm * b * sm - (SQRT_2 * r + pm * c) * sm1,
    };
    let exponent = -ceil_half(n) + 2 * reading_scale(n, reading);
    let pref = SQRT_2.powi(exponent as i32);
    pref * sn / (PI * r * (1.0 + 8.0 * sn * sn)) * bracket
}

/// One evaluation of K_t(n), optionally annotated with an oracle value.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatKernelValue {
    pub t: f64,
    pub n: i64,
    pub value: f64,
    pub quad_error: f64,
    pub oracle_value: Option<f64>,
    pub discrepancy: Option<f64>,
}

impl HeatKernelValue {
    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle_value = Some(oracle);
        self.discrepancy = Some((self.value - oracle).abs());
        self
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(arg(format!("time must be a nonnegative finite number, got {t}")))
    }
}

/// Closed-form K_t(n) for several n with one shared quadrature.
pub fn kernel_gamma_many(t: f64, ns: &[i64], quad_tol: f64, reading: PrefactorReading) -> Result<Vec<HeatKernelValue>> {
    check_t(t)?;
    let integral = integrate_vec(
        |s| {
            let r = (25.0 / 16.0 + SQRT_2 * s.cos()).sqrt();
            let (wm, wp) = ((-t * (0.875 - 0.5 * r)).exp(), (-t * (0.875 + 0.5 * r)).exp());
            ns.iter()
                .map(|&n| {
                    wm * gamma_unchecked(n, Sign::Minus, s, reading) + wp * gamma_unchecked(n, Sign::Plus, s, reading)
                })
                .collect()
        },
        0.0,
        PI,
        &QuadOptions::with_tol(quad_tol),
    )?;
    let (ea, eb) = ((-0.75 * t).exp(), (-1.75 * t).exp());
    Ok(ns
        .iter()
        .zip(integral.value)
        .map(|(&n, c)| HeatKernelValue {
            t,
            n,
            value: ea * crate::graph::rational_to_f64(&coeff_alpha(n, reading))
                + eb * crate::graph::rational_to_f64(&coeff_beta(n, reading))
                + c,
            quad_error: integral.error,
            oracle_value: None,
            discrepancy: None,
        })
        .collect())
}

/// K_t(n) under the given reading of the n < 0 prefactor.
pub fn kernel_gamma_with(t: f64, n: i64, quad_tol: f64, reading: PrefactorReading) -> Result<HeatKernelValue> {
    Ok(kernel_gamma_many(t, &[n], quad_tol, reading)?.remove(0))
}

/// K_t(n) with the fiber-normalized reading, the one that agrees with the
/// heat series on Γ.
pub fn kernel_gamma(t: f64, n: i64, quad_tol: f64) -> Result<HeatKernelValue> {
    kernel_gamma_with(t, n, quad_tol, PrefactorReading::FiberNormalized)
}

/// Transfer route K^pr_t(n)/√|π⁻¹(n)| for several n.
pub fn kernel_transfer_many(t: f64, ns: &[i64], quad_tol: f64) -> Result<Vec<HeatKernelValue>> {
    let pr = kernel_pr_many(t, ns, quad_tol)?;
    Ok(ns
        .iter()
        .zip(pr.value)
        .map(|(&n, v)| {
            let scale = (fiber_size(n) as f64).sqrt();
            HeatKernelValue {
                t,
                n,
                value: v / scale,
                quad_error: pr.error / scale,
                oracle_value: None,
                discrepancy: None,
            }
        })
        .collect())
}

pub fn kernel_transfer(t: f64, n: i64, quad_tol: f64) -> Result<HeatKernelValue> {
    Ok(kernel_transfer_many(t, &[n], quad_tol)?.remove(0))
}

/// k_t(w) = K_t(π(w)).
pub fn kernel_on_gamma(t: f64, w: &ReducedWord, quad_tol: f64) -> Result<f64> {
    Ok(kernel_gamma(t, w.pi_project(), quad_tol)?.value)
}

/// Truncated heat series on a window of the line, lifted to Γ by the fiber
/// sizes.
#[derive(Clone, Debug)]
pub struct LineOracle {
    window: LineWindow,
    series: HeatSeries,
}

impl LineOracle {
    pub fn new(t: f64, radius: i64, terms: usize) -> Result<Self> {
        let window = LineWindow::symmetric(radius)?;
        let g = window.graph()?;
        let series = heat_series(&g, &0, t, terms)?;
        Ok(Self { window, series })
    }

    fn position(&self, n: i64) -> Result<usize> {
        self.window
            .position(n)
            .ok_or_else(|| arg(format!("index {n} outside the oracle window")))
    }

    /// h^pr_t(0, n).
    pub fn projected(&self, n: i64) -> Result<f64> {
        Ok(self.series.values[self.position(n)?])
    }

    /// K_t(n) = h^pr_t(0, n)/√|π⁻¹(n)|.
    pub fn value(&self, n: i64) -> Result<f64> {
        Ok(self.projected(n)? / (fiber_size(n) as f64).sqrt())
    }

    /// Rigorous bound on |value(n) − K_t(n)| up to rounding.
    pub fn error_bound(&self, n: i64) -> Result<f64> {
        Ok(self.series.error_bound(self.position(n)?) / (fiber_size(n) as f64).sqrt())
    }

    pub fn tail_bound(&self) -> f64 {
        self.series.tail_bound
    }
}

/// Truncated heat series from e on a ball of Γ itself.
#[derive(Clone, Debug)]
pub struct GammaBallOracle {
    graph: WeightedGraph<ReducedWord>,
    series: HeatSeries,
}

impl GammaBallOracle {
    pub fn new(t: f64, radius: u32, terms: usize, budget: usize) -> Result<Self> {
        let graph = gamma_ball(radius, budget)?;
        let series = heat_series(&graph, &ReducedWord::identity(), t, terms)?;
        Ok(Self { graph, series })
    }

    pub fn graph(&self) -> &WeightedGraph<ReducedWord> {
        &self.graph
    }

    pub fn series(&self) -> &HeatSeries {
        &self.series
    }

    fn index(&self, w: &ReducedWord) -> Result<usize> {
        self.graph
            .index_of(w)
            .ok_or_else(|| arg(format!("word {w} outside the oracle ball")))
    }

    pub fn value(&self, w: &ReducedWord) -> Result<f64> {
        Ok(self.series.values[self.index(w)?])
    }

    pub fn error_bound(&self, w: &ReducedWord) -> Result<f64> {
        Ok(self.series.error_bound(self.index(w)?))
    }

    /// Words of the ball lying in π⁻¹(n).
    pub fn fiber(&self, n: i64) -> Vec<&ReducedWord> {
        self.graph.labels().iter().filter(|w| w.pi_project() == n).collect()
    }
}

/// One row of the n < 0 comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjudicationRow {
    pub n: i64,
    pub oracle: f64,
    pub oracle_bound: f64,
    /// Spread of the oracle over the words of π⁻¹(n) in the ball.
    pub fiber_spread: f64,
    pub printed: f64,
    pub fiber_normalized: f64,
}

impl AdjudicationRow {
    pub fn error(&self, reading: PrefactorReading) -> f64 {
        let v = match reading {
            PrefactorReading::Printed => self.printed,
            PrefactorReading::FiberNormalized => self.fiber_normalized,
        };
        (v - self.oracle).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Adjudication {
    pub t: f64,
    pub radius: u32,
    pub tol: f64,
    pub rows: Vec<AdjudicationRow>,
    /// Readings whose error is within `tol` on every row.
    pub consistent: Vec<PrefactorReading>,
}

impl Adjudication {
    pub fn max_error(&self, reading: PrefactorReading) -> f64 {
        self.rows.iter().map(|r| r.error(reading)).fold(0.0, f64::max)
    }

    /// The unique consistent reading, if exactly one is.
    pub fn verdict(&self) -> Option<PrefactorReading> {
        match self.consistent.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

/// Compares both readings with the Γ-ball oracle for each n in `ns`.
pub fn adjudicate(
    t: f64,
    ns: &[i64],
    radius: u32,
    terms: usize,
    quad_tol: f64,
    tol: f64,
    budget: usize,
) -> Result<Adjudication> {
    let oracle = GammaBallOracle::new(t, radius, terms, budget)?;
    let printed = kernel_gamma_many(t, ns, quad_tol, PrefactorReading::Printed)?;
    let fiber = kernel_gamma_many(t, ns, quad_tol, PrefactorReading::FiberNormalized)?;
    let mut rows = Vec::with_capacity(ns.len());
    for ((&n, p), f) in ns.iter().zip(&printed).zip(&fiber) {
        let words = oracle.fiber(n);
        if words.is_empty() {
            return Err(arg(format!("ball of radius {radius} misses the fiber over {n}")));
        }
        let mut vals = Vec::with_capacity(words.len());
        let mut bound: f64 = 0.0;
        for w in words {
            vals.push(oracle.value(w)?);
            bound = bound.max(oracle.error_bound(w)?);
        }
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(AdjudicationRow {
            n,
            oracle: vals[0],
            oracle_bound: bound,
            fiber_spread: hi - lo,
            printed: p.value,
            fiber_normalized: f.value,
        });
    }
    let consistent = PrefactorReading::ALL
        .into_iter()
        .filter(|&r| rows.iter().all(|row| row.error(r) <= tol))
        .collect();
    Ok(Adjudication {
        t,
        radius,
        tol,
        rows,
        consistent,
    })
}

/// Σ_{|n|≤radius} |π⁻¹(n)| K_t(n), the heat mass of the ball of that radius.
pub fn mass(t: f64, radius: i64, quad_tol: f64) -> Result<f64> {
    let ns: Vec<i64> = (-radius..=radius).collect();
    let vals = kernel_gamma_many(t, &ns, quad_tol, PrefactorReading::FiberNormalized)?;
    Ok(vals.iter().map(|v| fiber_size(v.n) as f64 * v.value).sum())
}

/// The spectrum of the Laplacian of Γ: two bands and two eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSet {
    pub lambda0: f64,
    pub lambda1: f64,
    pub intervals: [(f64, f64); 2],
    pub points: [f64; 2],
}

impl SpectrumSet {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b) || self.points.iter().any(|&p| (p - x).abs() <= 1e-12)
    }

    /// True when the four components are pairwise disjoint and ordered.
    pub fn is_disjoint(&self) -> bool {
        let [(a0, b0), (a1, b1)] = self.intervals;
        let [p, q] = self.points;
        a0 < b0 && b0 < p && p < a1 && a1 < b1 && b1 < q
    }
}

/// λ₀ = 7/8 − ½√(25/16 + √2), λ₁ = 7/8 + ½√(25/16 − √2).
pub fn spectrum() -> SpectrumSet {
    let lambda0 = lambda_of(Sign::Plus, 0.0).expect("0 is in range");
    let lambda1 = lambda_of(Sign::Minus, PI).expect("pi is in range");
    SpectrumSet {
        lambda0,
        lambda1,
        intervals: [(lambda0, 1.75 - lambda1), (lambda1, 1.75 - lambda0)],
        points: [0.75, 1.75],
    }
}

/// A value of K_t(n) checked against the line oracle.
pub fn checked_kernel(t: f64, ns: &[i64], quad_tol: f64, oracle: &LineOracle) -> Result<Vec<HeatKernelValue>> {
    let vals = kernel_gamma_many(t, ns, quad_tol, PrefactorReading::FiberNormalized)?;
    vals.into_iter()
        .map(|v| {
            let o = oracle.value(v.n)?;
            Ok(v.with_oracle(o))
        })
        .collect()
}

/// Rejects K values that are negative beyond their quadrature error.
pub fn check_positivity(vals: &[HeatKernelValue], slack: f64) -> Result<()> {
    for v in vals {
        if v.value < -(v.quad_error + slack) {
            return Err(Error::Numeric(format!("K_{}({}) = {} is negative", v.t, v.n, v.value)));
        }
    }
    Ok(())
}

/// Poisson tail of the default oracle, exposed for reports.
pub fn oracle_tail(t: f64, terms: usize) -> f64 {
    poisson_tail(t, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: PrefactorReading = PrefactorReading::FiberNormalized;

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(coeff_alpha(0, R), Rational::new(1, 6));
        assert_eq!(coeff_beta(1, R), Rational::new(-1, 12));
        assert_eq!(coeff_alpha(-1, PrefactorReading::Printed), Rational::new(1, 6));
        assert_eq!(coeff_alpha(-1, R), Rational::new(1, 6));
        assert_eq!(coeff_alpha(3, R), Rational::new(1, 24));
        assert_eq!(coeff_alpha(-2, PrefactorReading::Printed), Rational::new(-1, 6));
        assert_eq!(coeff_alpha(-2, R), Rational::new(-1, 12));
        assert_eq!(coeff_beta(-5, R), Rational::new(-1, 24));
    }

    #[test]
    fn gamma_examples() {
        for sign in Sign::BOTH {
            let g = coeff_gamma(0, sign, PI / 2.0, R).unwrap();
            assert!((g - 4.0 / (9.0 * PI)).abs() < 1e-15);
            for n in -6..=6 {
                assert_eq!(coeff_gamma(n, sign, 0.0, R).unwrap(), 0.0);
                assert!(coeff_gamma(n, sign, PI, R).unwrap().abs() < 1e-15);
            }
        }
        assert!(coeff_gamma(0, Sign::Plus, -0.5, R).is_err());
    }

    #[test]
    fn initial_condition() {
        let ns: Vec<i64> = (-4..=4).collect();
        for v in kernel_gamma_many(0.0, &ns, 1e-11, R).unwrap() {
            let want = if v.n == 0 { 1.0 } else { 0.0 };
            assert!((v.value - want).abs() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn matches_line_oracle() {
        let oracle = LineOracle::new(1.0, 40, 40).unwrap();
        let ns: Vec<i64> = (-6..=6).collect();
        for v in checked_kernel(1.0, &ns, 1e-11, &oracle).unwrap() {
            assert!(v.discrepancy.unwrap() < 1e-9, "{v:?}");
        }
        let k0 = kernel_gamma(1.0, 0, 1e-12).unwrap().value;
        assert!((k0 - 0.442_231_379_298_732_63).abs() < 1e-10);
    }

    #[test]
    fn routes_agree_for_nonnegative_n() {
        let ns: Vec<i64> = (0..=8).collect();
        let a = kernel_gamma_many(0.7, &ns, 1e-11, PrefactorReading::Printed).unwrap();
        let b = kernel_transfer_many(0.7, &ns, 1e-11).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.value - y.value).abs() < 1e-10, "{x:?} {y:?}");
        }
    }

    #[test]
    fn adjudication_on_small_ball() {
        let adj = adjudicate(1.0, &[-1, -2, -3, -4], 10, 30, 1e-11, 1e-8, 10_000).unwrap();
        assert_eq!(adj.verdict(), Some(PrefactorReading::FiberNormalized));
        assert!(adj.rows[0].error(PrefactorReading::Printed) < 1e-8);
    }

    #[test]
    fn spectrum_endpoints() {
        let s = spectrum();
        assert_eq!(format!("{:.5}", s.lambda0 - 5e-6), "0.01234");
        assert_eq!(format!("{:.4}", s.lambda1 - 5e-5), "1.0675");
        assert!((s.lambda0 - (0.875 - 0.5 * (1.5625 + SQRT_2).sqrt())).abs() < 1e-15);
        assert!((s.lambda1 - (0.875 + 0.5 * (1.5625 - SQRT_2).sqrt())).abs() < 1e-15);
        assert!(s.is_disjoint());
        assert!(s.contains(0.75));
        assert!(!s.contains(0.9));
        assert!(s.contains(0.5));
    }

    #[test]
    fn on_gamma() {
        let w: ReducedWord = "bac".parse().unwrap();
        assert_eq!(w.pi_project(), 3);
        let a = kernel_on_gamma(0.8, &w, 1e-11).unwrap();
        assert_eq!(a, kernel_gamma(0.8, 3, 1e-11).unwrap().value);
        let k = kernel_on_gamma(0.0, &"a".parse().unwrap(), 1e-11).unwrap();
        assert!(k.abs() < 1e-9);
    }
}
