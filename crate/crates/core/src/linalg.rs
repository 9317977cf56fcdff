//! Dense symmetric matrices and the cyclic Jacobi eigensolver.

use crate::error::{arg, Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(arg("matrix rows must all have length equal to the row count"));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest |A(i,j) − A(j,i)|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, o) in dst.iter_mut().zip(orow) {
                    *d += a * o;
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Result of a full symmetric eigendecomposition.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl Eigen {
    /// max_k ‖A v_k − λ_k v_k‖₂ against the original matrix.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&lam, v)| {
                let av = a.mul_vec(v);
                av.iter().zip(v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all (p, q) pairs, annihilating each off-diagonal entry with a
/// plane rotation, until the off-diagonal Frobenius norm drops below `tol`.
/// Eigenvectors are accumulated so callers can certify residuals.
pub fn symmetric_eigen(a: &DenseMatrix, tol: f64) -> Result<Eigen> {
    if !(tol > 0.0) {
        return Err(arg("tolerance must be positive"));
    }
    let n = a.dim();
    let scale = a.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if a.asymmetry() > 1e-14 * scale {
        return Err(arg(format!("matrix is not symmetric (asymmetry {:e})", a.asymmetry())));
    }
    let mut m = a.data.clone();
    // rows of `v` are the eigenvectors, so rotations touch contiguous memory
    let mut v = DenseMatrix::identity(n).data;

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[i * n + j] * m[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let schedule = round_robin(n);
    let mut rot: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(n / 2 + 1);
    while off_norm(&m) >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {:e})",
                off_norm(&m)
            )));
        }
        sweeps += 1;
        for round in &schedule {
            // the pairs of one round are disjoint, so their rotations commute
            // and each still annihilates its own pivot exactly
            rot.clear();
            for &(p, q) in round {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                rot.push((p, q, c, t * c));
            }
            for &(p, q, c, s) in &rot {
                rotate_rows(&mut m, n, p, q, c, s);
                rotate_rows(&mut v, n, p, q, c, s);
            }
            for row in m.chunks_exact_mut(n) {
                for &(p, q, c, s) in &rot {
                    let (a, b) = (row[p], row[q]);
                    row[p] = c * a - s * b;
                    row[q] = s * a + c * b;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order.iter().map(|&i| v[i * n..(i + 1) * n].to_vec()).collect();
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

/// Sorted eigenvalues only.
pub fn symmetric_eigenvalues(a: &DenseMatrix, tol: f64) -> Result<Vec<f64>> {
    symmetric_eigen(a, tol).map(|e| e.values)
}

// Circle-method tournament: n − 1 rounds (n rounded up to even) of
// disjoint pairs covering every p < q once.
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let m = n + n % 2;
    let mut players: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let round = (0..m / 2)
            .map(|i| (players[i], players[m - 1 - i]))
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        rounds.push(round);
        players[1..].rotate_right(1);
    }
    rounds
}

fn rotate_rows(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = m.split_at_mut(q * n);
    let rp = &mut lo[p * n..(p + 1) * n];
    let rq = &mut hi[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
