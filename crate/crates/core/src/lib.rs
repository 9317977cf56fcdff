//! Heat kernel of the Cayley graph of PSL₂ℤ = ⟨a, b | a² = b³ = 1⟩.
//!
//! The crate is organized bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`word`], [`psl`] | reduced words of C₂∗C₃, the projection π, PSL₂(𝔽_p) |
//! | [`graph`] | weighted graphs, quotients, covering checks, truncated heat series |
//! | [`gamma`] | balls of the Cayley graph Γ and their fiber partitions |
//! | [`line`] | the weighted line that Γ covers and its projected Laplacian |
//! | [`spectral`] | eigenfunctions, spectral weight, completeness, projected heat kernel |
//! | [`kernel`] | the closed-form heat kernel K_t(n) on Γ and its oracles |
//! | [`finite`] | spectra of the finite Cayley graphs of PSL₂(𝔽_p) |
//!
//! Weights are exact rationals. The normalization √(d_u d_v) is the only
//! source of irrationality and lands in ℚ(√2), see [`qsqrt2`].

pub mod error;
pub mod finite;
pub mod gamma;
pub mod graph;
pub mod kernel;
pub mod linalg;
pub mod line;
pub mod psl;
pub mod qsqrt2;
pub mod quadrature;
pub mod spectral;
pub mod word;

/// Exact rational scalar used for weights and degrees.
pub type Rational = num_rational::Ratio<i128>;

/// Default cap on the number of vertices any enumeration may produce.
pub const DEFAULT_VERTEX_BUDGET: usize = 250_000;

pub use error::{Error, Result};
pub use finite::{build_cayley, conjecture_report, spectrum_of, FiniteSpectrum};
pub use graph::{Partition, VertexMap, WeightedGraph};
pub use kernel::{kernel_gamma, kernel_on_gamma, spectrum, HeatKernelValue, PrefactorReading, SpectrumSet};
pub use line::{line_weight, LineWindow};
pub use psl::{enumerate_psl, genus, psl_image, PslElement};
pub use qsqrt2::QSqrt2;
pub use spectral::{completeness_entry, kernel_pr, Sign};
pub use word::{ball, fiber_size, Letter, ReducedWord};
