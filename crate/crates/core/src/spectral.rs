//! Spectral resolution of the projected Laplacian 𝓛^pr on the line.
//!
//! 𝓛^pr has two eigenvalues λ_ε = (5 − 2ε)/4 with ℓ² eigenfunctions f_ε,
//! and a continuous family of generalized eigenfunctions f_{x,μ,ε},
//! x ∈ [0, π], with eigenvalue λ_{μ,x} = 7/8 − (μ/2)R_x where
//! R_x = √(25/16 + √2 cos x). Both families satisfy f(−m−1) = ε f(m); the
//! negative half-line is always evaluated through that symmetry. The
//! spectral density of the continuous part is 1/H_{με}(x).

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{arg, Result};
use crate::quadrature::{integrate_vec, QuadOptions, QuadResult};

/// A sign ±1, used for the parameters ε and μ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn product(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.product(Sign::Minus)
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=PI).contains(&x) {
        Ok(())
    } else {
        Err(arg(format!("spectral parameter {x} outside [0, pi]")))
    }
}

// R_x without the range check, for quadrature inner loops.
fn r_unchecked(x: f64) -> f64 {
    (25.0 / 16.0 + SQRT_2 * x.cos()).sqrt()
}

/// R_x = √(25/16 + √2 cos x), strictly decreasing on [0, π].
pub fn r_of(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(r_unchecked(x))
}

/// λ_{μ,x} = 7/8 − (μ/2) R_x.
pub fn lambda_of(mu: Sign, x: f64) -> Result<f64> {
    Ok(0.875 - 0.5 * mu.value() * r_of(x)?)
}

/// Discrete eigenvalue λ_ε: 3/4 for ε = +1, 7/4 for ε = −1.
pub fn discrete_eigenvalue(epsilon: Sign) -> f64 {
    (5.0 - 2.0 * epsilon.value()) / 4.0
}

/// f_ε(m): for m = 2n ≥ 0 it is −(1/√6)(−ε√2)^{−n}, for m = 2n+1 it is
/// (1/(2√3))(−ε√2)^{−n}.
pub fn eval_discrete(epsilon: Sign, m: i64) -> f64 {
    if m < 0 {
        return epsilon.value() * eval_discrete(epsilon, -m - 1);
    }
    let n = (m / 2) as i32;
    let base = (-epsilon.value() * SQRT_2).powi(-n);
    if m % 2 == 0 {
        -base / 6f64.sqrt()
    } else {
        base / (2.0 * 3f64.sqrt())
    }
}

fn eval_generalized_unchecked(x: f64, r: f64, mu: Sign, epsilon: Sign, m: i64) -> f64 {
    if m < 0 {
        return epsilon.value() * eval_generalized_unchecked(x, r, mu, epsilon, -m - 1);
    }
    let (e, mu) = (epsilon.value(), mu.value());
    let n = (m / 2) as f64;
    if m % 2 == 0 {
        (1.0 + e / 4.0 - e * mu * r) * (n * x).sin() + FRAC_1_SQRT_2 * ((n + 1.0) * x).sin()
    } else {
        (mu * r + 0.25 - e) * ((n + 1.0) * x).sin() - e * FRAC_1_SQRT_2 * (n * x).sin()
    }
}

/// Generalized eigenfunction f_{x,μ,ε}(m).
pub fn eval_generalized(x: f64, mu: Sign, epsilon: Sign, m: i64) -> Result<f64> {
    let r = r_of(x)?;
    Ok(eval_generalized_unchecked(x, r, mu, epsilon, m))
}

fn h_unchecked(epsilon: Sign, x: f64, r: f64) -> f64 {
    2.0 * PI * r * (2.0 * r - epsilon.value() * (2.0 + SQRT_2 * x.cos()))
}

/// H_ε(x) = 2πR_x(2R_x − ε(2 + √2 cos x)), positive on [0, π].
pub fn spectral_weight(epsilon: Sign, x: f64) -> Result<f64> {
    Ok(h_unchecked(epsilon, x, r_of(x)?))
}

/// Σ_{μ,ε} w_μ(x) f_{x,μ,ε}(m) f_{x,μ,ε}(n) / H_{με}(x) for each requested
/// pair, where `w_μ` lets callers weight the two eigenvalue branches.
fn continuous_density(x: f64, pairs: &[(i64, i64)], branch_weight: impl Fn(Sign, f64) -> f64) -> Vec<f64> {
    let r = r_unchecked(x);
    let mut out = vec![0.0; pairs.len()];
    for mu in Sign::BOTH {
        let lam = 0.875 - 0.5 * mu.value() * r;
        let bw = branch_weight(mu, lam);
        for eps in Sign::BOTH {
            let h = h_unchecked(mu.product(eps), x, r);
            for (o, &(m, n)) in out.iter_mut().zip(pairs) {
                let fm = eval_generalized_unchecked(x, r, mu, eps, m);
                let fn_ = eval_generalized_unchecked(x, r, mu, eps, n);
                *o += bw * fm * fn_ / h;
            }
        }
    }
    out
}

/// Left-hand side of the completeness identity for several (m, n) at once:
/// Σ_ε f_ε(m)f_ε(n) + ∫₀^π Σ_{μ,ε} f_{x,μ,ε}(m) f_{x,μ,ε}(n) dx / H_{με}(x).
pub fn completeness_entries(pairs: &[(i64, i64)], quad_tol: f64) -> Result<QuadResult<Vec<f64>>> {
    let integral = integrate_vec(
        |x| continuous_density(x, pairs, |_, _| 1.0),
        0.0,
        PI,
        &QuadOptions::with_tol(quad_tol),
    )?;
    let value = pairs
        .iter()
        .zip(integral.value)
        .map(|(&(m, n), c)| {
            c + Sign::BOTH
                .iter()
                .map(|&e| eval_discrete(e, m) * eval_discrete(e, n))
                .sum::<f64>()
        })
        .collect();
    Ok(QuadResult {
        value,
        error: integral.error,
        panels: integral.panels,
    })
}

/// Completeness sum C(m, n), which should equal δ_{m,n}.
pub fn completeness_entry(m: i64, n: i64, quad_tol: f64) -> Result<QuadResult<f64>> {
    let r = completeness_entries(&[(m, n)], quad_tol)?;
    Ok(QuadResult {
        value: r.value[0],
        error: r.error,
        panels: r.panels,
    })
}

/// Projected heat kernel h^pr_t(0, n) for several n at once, from the
/// spectral measure: the two eigenvalue terms plus the continuous integral.
pub fn kernel_pr_many(t: f64, ns: &[i64], quad_tol: f64) -> Result<QuadResult<Vec<f64>>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(arg(format!("time must be a nonnegative finite number, got {t}")));
    }
    let pairs: Vec<(i64, i64)> = ns.iter().map(|&n| (0, n)).collect();
    let integral = integrate_vec(
        |x| continuous_density(x, &pairs, |_, lam| (-t * lam).exp()),
        0.0,
        PI,
        &QuadOptions::with_tol(quad_tol),
    )?;
    let value = ns
        .iter()
        .zip(integral.value)
        .map(|(&n, c)| {
            c + Sign::BOTH
                .iter()
                .map(|&e| (-t * discrete_eigenvalue(e)).exp() * eval_discrete(e, 0) * eval_discrete(e, n))
                .sum::<f64>()
        })
        .collect();
    Ok(QuadResult {
        value,
        error: integral.error,
        panels: integral.panels,
    })
}

/// K^pr_t(n) = h^pr_t(0, n) with its quadrature error estimate.
pub fn kernel_pr(t: f64, n: i64, quad_tol: f64) -> Result<QuadResult<f64>> {
    let r = kernel_pr_many(t, &[n], quad_tol)?;
    Ok(QuadResult {
        value: r.value[0],
        error: r.error,
        panels: r.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::apply_stencil;

    #[test]
    fn r_values() {
        assert_eq!(r_of(PI / 2.0).unwrap(), 1.25);
        assert!((r_of(0.0).unwrap() - (1.5625f64 + SQRT_2).sqrt()).abs() < 1e-15);
        assert!((r_of(0.0).unwrap() - 1.725315).abs() < 1e-6);
        assert!((r_of(PI).unwrap() - 0.385079).abs() < 1e-6);
        assert!(r_of(-0.1).is_err());
        assert!(r_of(3.2).is_err());
    }

    #[test]
    fn lambda_values() {
        let l0 = lambda_of(Sign::Plus, 0.0).unwrap();
        assert!((l0 - 0.01234).abs() < 5e-6);
        let l1 = lambda_of(Sign::Minus, PI).unwrap();
        assert!((l1 - 1.0675).abs() < 5e-5);
        assert!((lambda_of(Sign::Minus, 0.0).unwrap() - (1.75 - l0)).abs() < 1e-15);
    }

    #[test]
    fn discrete_values() {
        assert!((eval_discrete(Sign::Plus, 0) + 1.0 / 6f64.sqrt()).abs() < 1e-16);
        assert!((eval_discrete(Sign::Plus, 1) - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-16);
        assert_eq!(eval_discrete(Sign::Plus, -1), eval_discrete(Sign::Plus, 0));
        assert_eq!(eval_discrete(Sign::Minus, -1), -eval_discrete(Sign::Minus, 0));
    }

    #[test]
    fn generalized_values() {
        let x = 0.7;
        let r = r_of(x).unwrap();
        for mu in Sign::BOTH {
            for eps in Sign::BOTH {
                assert!((eval_generalized(x, mu, eps, 0).unwrap() - x.sin() / SQRT_2).abs() < 1e-15);
                let want = (mu.value() * r + 0.25 - eps.value()) * x.sin();
                assert!((eval_generalized(x, mu, eps, 1).unwrap() - want).abs() < 1e-15);
            }
        }
        let v = eval_generalized(PI / 2.0, Sign::Plus, Sign::Plus, 2).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn weight_values() {
        assert!((spectral_weight(Sign::Minus, PI / 2.0).unwrap() - 45.0 * PI / 4.0).abs() < 1e-13);
        assert!((spectral_weight(Sign::Plus, PI / 2.0).unwrap() - 5.0 * PI / 4.0).abs() < 1e-13);
        let r0 = r_of(0.0).unwrap();
        let h = spectral_weight(Sign::Plus, 0.0).unwrap();
        assert!((h - 2.0 * PI * r0 * (2.0 * r0 - 2.0 - SQRT_2)).abs() < 1e-14);
        assert!(h > 0.0);
    }

    #[test]
    fn spectral_weight_is_positive() {
        for i in 0..=1000 {
            let x = PI * i as f64 / 1000.0;
            for e in Sign::BOTH {
                assert!(spectral_weight(e, x).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn discrete_eigen_residuals() {
        for eps in Sign::BOTH {
            let lam = discrete_eigenvalue(eps);
            for m in -30..=30 {
                let res = apply_stencil(|k| eval_discrete(eps, k), m) - lam * eval_discrete(eps, m);
                assert!(res.abs() <= 1e-12, "eps {eps:?} m {m}: {res}");
            }
        }
    }

    #[test]
    fn discrete_norm() {
        for eps in Sign::BOTH {
            let s: f64 = (-200..=200).map(|m| eval_discrete(eps, m).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_eigen_residuals() {
        for i in 0..50 {
            let x = PI * (i as f64 + 0.5) / 50.0;
            for mu in Sign::BOTH {
                let lam = lambda_of(mu, x).unwrap();
                for eps in Sign::BOTH {
                    for m in -25..=25 {
                        let f = |k| eval_generalized(x, mu, eps, k).unwrap();
                        let res = apply_stencil(f, m) - lam * f(m);
                        assert!(res.abs() <= 1e-10, "x {x} mu {mu:?} eps {eps:?} m {m}: {res}");
                    }
                }
            }
        }
    }

    #[test]
    fn completeness_examples() {
        let c = completeness_entries(&[(0, 0), (0, 3), (6, 5), (-2, -2), (-3, 4)], 1e-11).unwrap();
        let want = [1.0, 0.0, 0.0, 1.0, 0.0];
        for (v, w) in c.value.iter().zip(want) {
            assert!((v - w).abs() < 1e-9, "{:?}", c.value);
        }
    }

    #[test]
    fn kernel_pr_at_time_zero() {
        assert!((kernel_pr(0.0, 0, 1e-11).unwrap().value - 1.0).abs() < 1e-9);
        assert!(kernel_pr(0.0, 4, 1e-11).unwrap().value.abs() < 1e-9);
        assert!(kernel_pr(-1.0, 0, 1e-11).is_err());
    }
}
