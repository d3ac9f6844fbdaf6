//! Householder tridiagonalization followed by implicit QL iterations.

use super::{Real, SymMatrix};

/// Eigenvalues in ascending order and orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen<F> {
    pub values: Vec<F>,
    /// Row-major `n×n`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<F>,
    n: usize,
}

impl<F: Real> Eigen<F> {
    pub fn vector(&self, k: usize) -> Vec<F> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Full eigen-decomposition of a symmetric matrix.
pub fn sym_eigen<F: Real>(m: &SymMatrix<F>) -> Eigen<F> {
    let n = m.n();
    let mut v = m.to_rows();
    let mut d = vec![F::zero(); n];
    let mut e = vec![F::zero(); n];
    if n == 0 {
        return Eigen {
            values: d,
            vectors: vec![],
            n,
        };
    }
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![F::zero(); n * n];
    for (col, &k) in order.iter().enumerate() {
        // deterministic sign: largest-magnitude component positive
        let mut big = 0;
        for i in 0..n {
            if v[i][k].abs() > v[big][k].abs() {
                big = i;
            }
        }
        let s = if v[big][k] < F::zero() { -F::one() } else { F::one() };
        for i in 0..n {
            vectors[i * n + col] = s * v[i][k];
        }
    }
    Eigen { values, vectors, n }
}

fn tred2<F: Real>(v: &mut [Vec<F>], d: &mut [F], e: &mut [F]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1][..n]);
    for i in (1..n).rev() {
        let mut scale = F::zero();
        let mut h = F::zero();
        for dk in d.iter().take(i) {
            scale = scale + dk.abs();
        }
        if scale == F::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = F::zero();
                v[j][i] = F::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > F::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = F::zero();
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g = g + v[k][j] * d[k];
                    e[k] = e[k] + v[k][j] * f;
                }
                e[j] = g;
            }
            f = F::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] = v[k][j] - (f * e[k] + g * d[k]);
                }
                d[j] = v[i - 1][j];
                v[i][j] = F::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = F::one();
        let h = d[i + 1];
        if h != F::zero() {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = F::zero();
                for k in 0..=i {
                    g = g + v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] = v[k][j] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = F::zero();
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = F::zero();
    }
    v[n - 1][n - 1] = F::one();
    e[0] = F::zero();
}

fn tql2<F: Real>(v: &mut [Vec<F>], d: &mut [F], e: &mut [F]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = F::zero();
    let mut f = F::zero();
    let mut tst1 = F::zero();
    let eps = F::epsilon();
    let two = F::one() + F::one();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(F::one());
                if p < F::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = F::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = F::zero();
                let mut s2 = F::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter > 60 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = F::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(m: &SymMatrix<f64>, e: &Eigen<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..m.n() {
            let v = e.vector(k);
            let mv = m.mul_vec(&v);
            for i in 0..m.n() {
                worst = worst.max((mv[i] - e.values[k] * v[i]).abs());
            }
        }
        worst
    }

    #[test]
    fn random_matrices_meet_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[1usize, 2, 3, 9, 36, 64] {
            let mut m = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    m.set(i, j, rng.random_range(-1.0..1.0));
                }
            }
            let e = sym_eigen(&m);
            let norm = m.max_abs() * n as f64;
            assert!(residual(&m, &e) <= 1e-10 * norm, "n = {n}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            // orthonormality
            for a in 0..n {
                for b in 0..n {
                    let dot: f64 = e.vector(a).iter().zip(e.vector(b)).map(|(x, y)| x * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let m = SymMatrix::<f64>::identity(4).scale(2.0);
        let e = sym_eigen(&m);
        assert!(e.values.iter().all(|v| (v - 2.0).abs() < 1e-15));
        let z = sym_eigen(&SymMatrix::<f64>::zeros(3));
        assert!(z.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_precision() {
        let m = SymMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = sym_eigen(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-6 && (e.values[1] - 3.0).abs() < 1e-6);
    }
}
