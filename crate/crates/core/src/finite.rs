//! Cayley graphs of PSL₂(𝔽_p) and their normalized-Laplacian spectra.

use std::fmt::Write as _;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};
use crate::kernel::spectrum;
use crate::linalg::symmetric_eigen;
use crate::psl::{PslElement, PslGroup};
use crate::word::Letter;
use crate::Rational;

/// Off-diagonal Frobenius tolerance handed to the Jacobi solver.
pub const JACOBI_TOL: f64 = 1e-11;

/// Tolerance for the 3/4 and 7/4 membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// The Cayley graph of PSL₂(𝔽_p) for a, b with w(x, xa) = 2 and
/// w(x, xb) = w(x, xb²) = 1.
pub fn build_cayley(p: u32, budget: usize) -> Result<WeightedGraph<PslElement>> {
    let group = PslGroup::enumerate(p, budget)?;
    let a = PslElement::generator(p, Letter::A)?;
    let b = PslElement::generator(p, Letter::B)?;
    let mut g = GraphBuilder::new();
    for x in &group.elements {
        g.vertex(*x);
    }
    let one = Rational::one();
    for x in &group.elements {
        // the a-edge is added from both ends, which doubles it
        g.add(*x, x.mul(&a), one)?;
        g.add(*x, x.mul(&b), one)?;
        g.ambient_degree(*x, Rational::from_integer(4));
    }
    let g = g.build()?;
    if (0..g.len()).any(|i| g.is_deficient(i)) {
        return Err(Error::Invariant(format!(
            "Cayley graph of PSL2(F_{p}) is not 4-regular"
        )));
    }
    Ok(g)
}

/// Full spectrum of one finite quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpectrum {
    pub p: u32,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue above the zero threshold.
    pub gap: f64,
    /// max ‖𝓛v − λv‖ over all computed pairs.
    pub residual: f64,
    pub trace: f64,
    pub zero_threshold: f64,
    pub sweeps: usize,
}

impl FiniteSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.eigenvalues.iter().any(|&l| (l - x).abs() <= tol)
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| l.abs() <= self.zero_threshold)
            .count()
    }

    /// |Σλ − trace 𝓛|.
    pub fn trace_error(&self) -> f64 {
        (self.eigenvalues.iter().sum::<f64>() - self.trace).abs()
    }

    /// CSV with header `p,index,eigenvalue`, ascending.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            writeln!(s, "{},{},{:.15e}", self.p, i, l).expect("writing to a String");
        }
        s
    }
}

pub fn spectrum_of(p: u32, zero_threshold: f64, budget: usize) -> Result<FiniteSpectrum> {
    let g = build_cayley(p, budget)?;
    let l = g.normalized_laplacian();
    let eig = symmetric_eigen(&l, JACOBI_TOL)?;
    let residual = eig.residual(&l);
    let gap = eig
        .values
        .iter()
        .copied()
        .find(|&x| x > zero_threshold)
        .ok_or_else(|| Error::Numeric(format!("no nonzero eigenvalue for p = {p}")))?;
    Ok(FiniteSpectrum {
        p,
        trace: l.trace(),
        eigenvalues: eig.values,
        gap,
        residual,
        zero_threshold,
        sweeps: eig.sweeps,
    })
}

/// One row of the spectral-gap comparison with λ₀.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureRow {
    pub p: u32,
    pub size: usize,
    pub gap: f64,
    pub gap_minus_lambda0: f64,
    pub has_three_quarters: bool,
    pub has_seven_quarters: bool,
    pub zero_multiplicity: usize,
    pub residual: f64,
}

impl ConjectureRow {
    pub fn from_spectrum(s: &FiniteSpectrum) -> Self {
        let lambda0 = spectrum().lambda0;
        Self {
            p: s.p,
            size: s.len(),
            gap: s.gap,
            gap_minus_lambda0: s.gap - lambda0,
            has_three_quarters: s.contains(0.75, MEMBERSHIP_TOL),
            has_seven_quarters: s.contains(1.75, MEMBERSHIP_TOL),
            zero_multiplicity: s.zero_multiplicity(),
            residual: s.residual,
        }
    }

    pub fn gap_holds(&self) -> bool {
        self.gap_minus_lambda0 >= 0.0
    }
}

/// Spectra and gap rows for each prime, in the given order.
pub fn conjecture_report(
    primes: &[u32],
    zero_threshold: f64,
    budget: usize,
) -> Result<Vec<(FiniteSpectrum, ConjectureRow)>> {
    primes
        .iter()
        .map(|&p| {
            let s = spectrum_of(p, zero_threshold, budget)?;
            let row = ConjectureRow::from_spectrum(&s);
            Ok((s, row))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_like_p2() {
        let g = build_cayley(2, 100).unwrap();
        assert_eq!(g.len(), 6);
        let a = PslElement::generator(2, Letter::A).unwrap();
        let b = PslElement::generator(2, Letter::B).unwrap();
        let e = PslElement::identity(2).unwrap();
        assert_eq!(g.weight(&e, &a).unwrap(), Rational::from_integer(2));
        assert_eq!(g.weight(&e, &b).unwrap(), Rational::one());
        assert_eq!(g.weight(&b, &b.mul(&b)).unwrap(), Rational::one());
        let s = spectrum_of(2, 1e-8, 100).unwrap();
        assert_eq!(s.zero_multiplicity(), 1);
        assert!((s.gap - 0.75).abs() < 1e-10);
        assert!(s.contains(1.75, 1e-10));
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn small_primes() {
        for p in [3, 5] {
            let s = spectrum_of(p, 1e-8, 1000).unwrap();
            let row = ConjectureRow::from_spectrum(&s);
            assert!(row.gap_holds());
            assert!(row.has_three_quarters && row.has_seven_quarters);
            assert_eq!(row.zero_multiplicity, 1);
            assert!(s.trace_error() < 1e-8);
            assert!(s.eigenvalues.iter().all(|&l| (-1e-10..=2.0 + 1e-10).contains(&l)));
        }
        let s3 = spectrum_of(3, 1e-8, 1000).unwrap();
        assert!(s3.gap < 0.75 - 1e-6);
    }

    #[test]
    fn csv_layout() {
        let s = spectrum_of(2, 1e-8, 100).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,index,eigenvalue");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("2,0,"));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(build_cayley(7, 100), Err(Error::Resource { .. })));
        assert!(build_cayley(4, 100).is_err());
    }
}
