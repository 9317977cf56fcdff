//! The weighted line that Γ covers through π, and its projected Laplacian.
//!
//! For n ≥ 0 the weights are
//!
//! ```text
//! w(2n, 2n) = 0,  w(2n+1, 2n+1) = 2^{n+1},  w(2n−1, 2n) = w(2n, 2n+1) = 2^{n+1}
//! ```
//!
//! and the negative half is the mirror image under m ↦ −m−1. Degrees are
//! d_{2n} = 2^{n+2} and d_{2n+1} = 2^{n+3}, i.e. 4·|π⁻¹(m)|.

use num_traits::{One, Zero};

use crate::error::{arg, Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};
use crate::linalg::DenseMatrix;
use crate::qsqrt2::QSqrt2;
use crate::Rational;

fn mirror(m: i64) -> i64 {
    -m - 1
}

fn pow2(e: i64) -> u128 {
    assert!((0..127).contains(&e), "line weight 2^{e} out of range");
    1u128 << e
}

/// Weight of the line between `i` and `j`.
pub fn line_weight(i: i64, j: i64) -> u128 {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    if j < 0 {
        return line_weight(mirror(j), mirror(i));
    }
    // now j ≥ 0 and i ≥ j − 1 is the only way to be adjacent
    match j - i {
        0 if j % 2 == 1 => pow2(j / 2 + 1),
        0 => 0,
        // (2n−1, 2n) or (2n, 2n+1): both 2^{n+1} with n = ⌈i/2⌉ resp. i/2
        1 if i % 2 == 0 => pow2(i / 2 + 1),
        1 => pow2((i + 1) / 2 + 1),
        _ => 0,
    }
}

/// Degree of a line vertex.
pub fn line_degree(m: i64) -> u128 {
    if m < 0 {
        return line_degree(mirror(m));
    }
    if m % 2 == 0 {
        pow2(m / 2 + 2)
    } else {
        pow2(m / 2 + 3)
    }
}

/// Projected Laplacian entry 𝓛^pr(i, j) in closed form.
pub fn lpr_entry(i: i64, j: i64) -> QSqrt2 {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    if j < 0 {
        return lpr_entry(mirror(j), mirror(i));
    }
    let half = QSqrt2::from_rational(Rational::new(1, 2));
    match j - i {
        0 if j % 2 == 0 => QSqrt2::one(),
        0 => QSqrt2::from_rational(Rational::new(3, 4)),
        // (2n−1, 2n) → −1/2, (2n, 2n+1) → −1/(2√2) = −√2/4
        1 if i % 2 != 0 => -half,
        1 => QSqrt2::new(Rational::zero(), Rational::new(-1, 4)),
        _ => QSqrt2::zero(),
    }
}

/// A finite window [n_min, n_max] of the line with n_min ≤ 0 ≤ n_max.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineWindow {
    pub n_min: i64,
    pub n_max: i64,
}

impl LineWindow {
    pub fn new(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > 0 || n_max < 0 {
            return Err(arg(format!("window [{n_min}, {n_max}] must contain 0")));
        }
        if n_min < -250 || n_max > 250 {
            return Err(arg("line windows are limited to |m| <= 250"));
        }
        Ok(Self { n_min, n_max })
    }

    pub fn symmetric(radius: i64) -> Result<Self> {
        Self::new(-radius, radius)
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.n_min..=self.n_max).contains(&m)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    pub fn position(&self, m: i64) -> Option<usize> {
        self.contains(m).then(|| (m - self.n_min) as usize)
    }

    /// The window as a truncated weighted graph carrying the line degrees.
    pub fn graph(&self) -> Result<WeightedGraph<i64>> {
        self.graph_with(line_weight)
    }

    /// Same window with a caller-supplied weight function, used to inject
    /// faults into covering checks.
    pub fn graph_with(&self, weight: impl Fn(i64, i64) -> u128) -> Result<WeightedGraph<i64>> {
        let mut b = GraphBuilder::new();
        for m in self.indices() {
            b.vertex(m);
        }
        for m in self.indices() {
            for j in [m, m + 1] {
                if self.contains(j) {
                    let w = weight(m, j);
                    if w > 0 {
                        b.add(m, j, Rational::from_integer(w as i128))?;
                    }
                }
            }
            b.ambient_degree(m, Rational::from_integer(line_degree(m) as i128));
        }
        b.build()
    }

    /// Dense 𝓛^pr restricted to the window, from the closed-form entries.
    pub fn window_matrix(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.len());
        for (p, i) in self.indices().enumerate() {
            for (q, j) in self.indices().enumerate() {
                if (i - j).abs() <= 1 {
                    a[(p, q)] = lpr_entry(i, j).to_f64();
                }
            }
        }
        a
    }

    /// (𝓛^pr f)(m) from the three-point stencil.
    pub fn apply_projected_laplacian(&self, f: impl Fn(i64) -> f64, m: i64) -> Result<f64> {
        if !self.contains(m - 1) || !self.contains(m + 1) {
            return Err(Error::Boundary(format!(
                "stencil at {m} leaves window [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        Ok(apply_stencil(f, m))
    }
}

/// Stencil of 𝓛^pr on the whole line: for m ≥ 0
///
/// ```text
/// even m:  f(m) − f(m−1)/2 − f(m+1)/(2√2)
/// odd  m:  3f(m)/4 − f(m−1)/(2√2) − f(m+1)/2
/// ```
///
/// and the mirrored formulas for m < 0.
pub fn apply_stencil(f: impl Fn(i64) -> f64, m: i64) -> f64 {
    let s = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    // for m < 0 write m = −k−1 with k ≥ 0: "previous" is −k = m+1, "next" is m−1
    let (k, prev, next) = if m >= 0 {
        (m, m - 1, m + 1)
    } else {
        (mirror(m), m + 1, m - 1)
    };
    if k % 2 == 0 {
        f(m) - 0.5 * f(prev) - s * f(next)
    } else {
        0.75 * f(m) - s * f(prev) - 0.5 * f(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_from_figure() {
        assert_eq!(line_weight(0, 1), 2);
        assert_eq!(line_weight(3, 3), 4);
        assert_eq!(line_weight(-4, -5), 8);
        assert_eq!(line_weight(-1, 0), 2);
        assert_eq!(line_weight(1, 1), 2);
        assert_eq!(line_weight(1, 2), 4);
        assert_eq!(line_weight(3, 4), 8);
        assert_eq!(line_weight(-2, -2), 2);
        assert_eq!(line_weight(0, 0), 0);
        assert_eq!(line_weight(0, 2), 0);
    }

    #[test]
    fn degrees_are_weight_sums() {
        for m in -30..=30 {
            let sum: u128 = (m - 1..=m + 1).map(|j| line_weight(m, j)).sum();
            assert_eq!(sum, line_degree(m), "m = {m}");
        }
        assert_eq!(line_degree(0), 4);
        assert_eq!(line_degree(1), 8);
        assert_eq!(line_degree(-2), 8);
    }

    #[test]
    fn mirror_symmetry() {
        for i in -20..=20 {
            for j in -20..=20 {
                assert_eq!(line_weight(i, j), line_weight(mirror(i), mirror(j)));
            }
        }
    }

    #[test]
    fn window_matrix_entries() {
        let w = LineWindow::symmetric(6).unwrap();
        let a = w.window_matrix();
        let at = |i: i64, j: i64| a[(w.position(i).unwrap(), w.position(j).unwrap())];
        let s = 1.0 / (2.0 * 2f64.sqrt());
        assert_eq!(at(0, 0), 1.0);
        assert_eq!(at(1, 1), 0.75);
        assert!((at(0, 1) + s).abs() < 1e-16);
        assert!((at(2, 3) + s).abs() < 1e-16);
        assert_eq!(at(1, 2), -0.5);
        assert!((at(-1, -2) + s).abs() < 1e-16);
        assert_eq!(at(-1, 0), -0.5);
    }

    #[test]
    fn window_matrix_matches_normalized_laplacian_exactly() {
        let w = LineWindow::new(-9, 11).unwrap();
        let g = w.graph().unwrap();
        for i in w.indices() {
            for j in w.indices() {
                assert_eq!(g.laplacian_entry_exact(&i, &j).unwrap(), lpr_entry(i, j), "({i}, {j})");
            }
        }
    }

    #[test]
    fn stencil_matches_matrix() {
        let w = LineWindow::symmetric(10).unwrap();
        let a = w.window_matrix();
        let f = |m: i64| ((m * 7 + 3) % 5) as f64 - 2.0;
        let fv: Vec<f64> = w.indices().map(f).collect();
        let av = a.mul_vec(&fv);
        for m in -9..=9 {
            let s = w.apply_projected_laplacian(f, m).unwrap();
            assert!((s - av[w.position(m).unwrap()]).abs() < 1e-14, "m = {m}");
        }
        assert!(matches!(w.apply_projected_laplacian(f, 10), Err(Error::Boundary(_))));
    }

    #[test]
    fn indicator_examples() {
        let w = LineWindow::symmetric(4).unwrap();
        assert_eq!(w.apply_projected_laplacian(|m| (m == 0) as i32 as f64, 0).unwrap(), 1.0);
        assert_eq!(
            w.apply_projected_laplacian(|m| (m == 1) as i32 as f64, 1).unwrap(),
            0.75
        );
    }

    #[test]
    fn mirror_commutes_with_laplacian() {
        let w = LineWindow::symmetric(12).unwrap();
        let f = |m: i64| {
            if (-6..=5).contains(&m) {
                (m as f64 * 0.37).sin() + 0.1 * m as f64
            } else {
                0.0
            }
        };
        let pf = |m: i64| f(mirror(m));
        for m in -10..=9 {
            let l_pf = w.apply_projected_laplacian(pf, m).unwrap();
            let p_lf = w.apply_projected_laplacian(f, mirror(m)).unwrap();
            assert!((l_pf - p_lf).abs() < 1e-15, "m = {m}");
        }
    }

    #[test]
    fn rejects_windows_without_origin() {
        assert!(LineWindow::new(1, 5).is_err());
        assert!(LineWindow::new(-5, -1).is_err());
    }
}
