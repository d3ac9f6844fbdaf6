//! Dense symmetric linear algebra: eigen-analysis, PSD checks, the
//! max-min-eigenvalue solver over affine families, Gram factorization and
//! the minor sums of the monotonicity lemma.

mod eigen;
mod gram;
mod minors;
mod slice;
mod svd;

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use eigen::{sym_eigen, Eigen};
pub use gram::gram_to_squares;
pub use minors::{det_dense, lemma41_check, minor_sum, Lemma41Chain};
pub use slice::{max_min_eig, AffinePsdProblem, SliceResult, SliceStatus, SolverOptions};
pub use svd::{svd, Svd};

/// Floating scalar usable by the dense routines.
pub trait Real: Float + Scalar {}
impl<T: Float + Scalar> Real for T {}

/// Symmetric matrix stored as its packed upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<F> {
    n: usize,
    upper: Vec<F>,
}

fn idx(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl<F: Real> SymMatrix<F> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            upper: vec![F::zero(); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_diag(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// From a dense square array; the upper triangle is taken, and the
    /// array must be symmetric within `1e-12` relative.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        let scale = rows
            .iter()
            .flatten()
            .fold(F::zero(), |a, &b| a.max(b.abs()))
            .max(F::one());
        for i in 0..n {
            if rows[i].len() != n {
                return Err(Error::DimensionMismatch("matrix is not square".into()));
            }
            for j in i..n {
                let tol = F::from(1e-12).unwrap() * scale;
                if (rows[i][j] - rows[j][i]).abs() > tol {
                    return Err(Error::DimensionMismatch(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
                m.set(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    pub fn outer(v: &[F]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, v[i] * v[j]);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.upper[idx(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        let k = idx(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: F) {
        let k = idx(self.n, i, j);
        self.upper[k] = self.upper[k] + v;
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn max_abs(&self) -> F {
        self.upper.iter().fold(F::zero(), |a, &b| a.max(b.abs()))
    }

    pub fn scale(&self, s: F) -> Self {
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(SymMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-F::one()))
    }

    /// `self + s·other` in place.
    pub fn axpy(&mut self, s: F, other: &Self) {
        for (a, &b) in self.upper.iter_mut().zip(&other.upper) {
            *a = *a + s * b;
        }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        (0..self.n)
            .map(|i| (0..self.n).fold(F::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn quad(&self, v: &[F]) -> F {
        self.mul_vec(v)
            .iter()
            .zip(v)
            .fold(F::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// `Σ a_ij b_ij`.
    pub fn frobenius_dot(&self, other: &Self) -> F {
        let mut acc = F::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    pub fn trace(&self) -> F {
        (0..self.n).fold(F::zero(), |a, i| a + self.get(i, i))
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn cast<G: Real>(&self) -> SymMatrix<G> {
        SymMatrix {
            n: self.n,
            upper: self
                .upper
                .iter()
                .map(|v| G::from(*v).unwrap_or_else(G::nan))
                .collect(),
        }
    }

    /// Cholesky factor `L` (row-major lower triangle) if the matrix is positive definite.
    pub fn cholesky(&self) -> Option<Vec<F>> {
        cholesky_dense(&self.to_rows().concat(), self.n)
    }
}

/// Lower Cholesky factor of a dense row-major SPD matrix.
pub(crate) fn cholesky_dense<F: Real>(a: &[F], n: usize) -> Option<Vec<F>> {
    let mut l = vec![F::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= F::zero() {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// Solve `L Lᵀ x = b` given the lower factor.
pub(crate) fn cholesky_solve<F: Real>(l: &[F], n: usize, b: &[F]) -> Vec<F> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s = s - l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Outcome of [`psd_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum PsdVerdict {
    Psd { lambda_min: f64 },
    NotPsd { lambda_min: f64, eigvec: Vec<f64> },
}

impl PsdVerdict {
    pub fn lambda_min(&self) -> f64 {
        match self {
            PsdVerdict::Psd { lambda_min } | PsdVerdict::NotPsd { lambda_min, .. } => *lambda_min,
        }
    }

    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd { .. })
    }
}

/// Smallest eigenvalue against `-tol`, with a unit witness when negative.
pub fn psd_check<F: Real>(m: &SymMatrix<F>, tol: f64) -> PsdVerdict {
    let e = sym_eigen(m);
    let lambda_min = e.values[0].to_f64_lossy();
    if lambda_min >= -tol {
        PsdVerdict::Psd { lambda_min }
    } else {
        PsdVerdict::NotPsd {
            lambda_min,
            eigvec: e.vector(0).iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }
}
