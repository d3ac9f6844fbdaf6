//! One-sided Jacobi singular value decomposition.

use super::Real;

/// Singular values (descending) and right singular vectors.
#[derive(Clone, Debug)]
pub struct Svd<F> {
    pub values: Vec<F>,
    /// Row-major `n×n`; column `k` pairs with `values[k]`.
    pub v: Vec<F>,
    n: usize,
}

impl<F: Real> Svd<F> {
    pub fn right_vector(&self, k: usize) -> Vec<F> {
        (0..self.n).map(|i| self.v[i * self.n + k]).collect()
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: F) -> usize {
        self.values.iter().filter(|&&s| s > threshold).count()
    }
}

/// SVD of a dense `rows×n` matrix given as row vectors.
pub fn svd<F: Real>(a: &[Vec<F>], n: usize) -> Svd<F> {
    let m = a.len();
    // work on columns
    let mut cols: Vec<Vec<F>> = (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect();
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = F::one();
    }
    let eps = F::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (F::zero(), F::zero(), F::zero());
                for i in 0..m {
                    alpha = alpha + cols[p][i] * cols[p][i];
                    beta = beta + cols[q][i] * cols[q][i];
                    gamma = gamma + cols[p][i] * cols[q][i];
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == F::zero() {
                    continue;
                }
                rotated = true;
                let two = F::one() + F::one();
                let zeta = (beta - alpha) / (two * gamma);
                let sign = if zeta >= F::zero() { F::one() } else { -F::one() };
                let t = sign / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[i * n + p], v[i * n + q]);
                    v[i * n + p] = c * x - s * y;
                    v[i * n + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<F> = cols
        .iter()
        .map(|c| c.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| norms[k]).collect();
    let mut vs = vec![F::zero(); n * n];
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vs[i * n + col] = v[i * n + k];
        }
    }
    Svd { values, v: vs, n }
}
