//! Composite Gauss–Legendre quadrature with panel doubling.

use crate::error::{arg, Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of P_n by Newton iteration from the Chebyshev-like initial
    /// guesses, weights 2/((1−x²) P_n'(x)²).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Options for [`integrate_vec`].
#[derive(Clone, Debug)]
pub struct QuadOptions {
    pub tol: f64,
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            order: 20,
            initial_panels: 4,
            max_panels: 1 << 14,
        }
    }
}

/// Integral estimate with the difference between the last two refinements.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

/// Integrates a vector-valued function over [a, b] by composite
/// Gauss–Legendre, doubling the panel count until every component of two
/// successive estimates differs by less than `opts.tol`.
///
/// Panels are summed left to right so results are reproducible.
pub fn integrate_vec(f: impl Fn(f64) -> Vec<f64>, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<Vec<f64>>> {
    if !(opts.tol > 0.0) {
        return Err(arg("quadrature tolerance must be positive"));
    }
    if !(a < b) {
        return Err(arg(format!("empty interval [{a}, {b}]")));
    }
    let rule = GaussLegendre::new(opts.order);
    let composite = |panels: usize| -> Vec<f64> {
        let h = (b - a) / panels as f64;
        let mut acc: Vec<f64> = Vec::new();
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let y = f(mid + 0.5 * h * x);
                if acc.is_empty() {
                    acc = vec![0.0; y.len()];
                }
                for (s, v) in acc.iter_mut().zip(y) {
                    *s += 0.5 * h * w * v;
                }
            }
        }
        acc
    };
    let mut panels = opts.initial_panels.max(1);
    let mut prev = composite(panels);
    loop {
        let next_panels = panels * 2;
        if next_panels > opts.max_panels {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not reach tolerance {:e} with {panels} panels",
                opts.tol
            )));
        }
        let next = composite(next_panels);
        let diff = prev.iter().zip(&next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if diff < opts.tol {
            return Ok(QuadResult {
                value: next,
                error: diff,
                panels: next_panels,
            });
        }
        prev = next;
        panels = next_panels;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<f64>> {
    let r = integrate_vec(|x| vec![f(x)], a, b, opts)?;
    Ok(QuadResult {
        value: r.value[0],
        error: r.error,
        panels: r.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let g = GaussLegendre::new(10);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // ∫ x^18 = 2/19, degree 2n−1 = 19 is exact
        let v: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(18)).sum();
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn known_integrals() {
        let o = QuadOptions::with_tol(1e-13);
        let r = integrate(f64::sin, 0.0, PI, &o).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        // ∫₀^π sin²/(1 + 8 sin²) = π/12
        let r = integrate(|s| s.sin().powi(2) / (1.0 + 8.0 * s.sin().powi(2)), 0.0, PI, &o).unwrap();
        assert!((r.value - PI / 12.0).abs() < 1e-13);
        let r = integrate(|s| (40.0 * s).cos().powi(2), 0.0, PI, &o).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let o = QuadOptions {
            tol: 1e-12,
            max_panels: 16,
            ..QuadOptions::default()
        };
        // discontinuous integrand cannot converge with few panels
        let r = integrate(|x| if x < 1.0 / 3.0 { 0.0 } else { 1.0 }, 0.0, 1.0, &o);
        assert!(matches!(r, Err(Error::Numeric(_))));
        assert!(integrate(f64::sin, 1.0, 0.0, &o).is_err());
        assert!(integrate(f64::sin, 0.0, 1.0, &QuadOptions::with_tol(0.0)).is_err());
    }
}
