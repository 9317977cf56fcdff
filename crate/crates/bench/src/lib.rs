//! Fixtures shared by the benchmarks.

use modheat_core::linalg::DenseMatrix;
use modheat_core::{build_cayley, DEFAULT_VERTEX_BUDGET};

/// Normalized Laplacian of the finite Cayley graph for the prime `p`.
pub fn cayley_laplacian(p: u32) -> DenseMatrix {
    build_cayley(p, DEFAULT_VERTEX_BUDGET)
        .expect("small prime")
        .normalized_laplacian()
}

/// Indices `-r..=r`.
pub fn symmetric_range(r: i64) -> Vec<i64> {
    (-r..=r).collect()
}
