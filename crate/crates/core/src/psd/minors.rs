use serde::Serialize;

use super::{psd_check, Real, SymMatrix};
use crate::error::{Error, Result};

/// Determinant of a dense square matrix by partial-pivot elimination.
pub fn det_dense<F: Real>(a: &[Vec<F>]) -> F {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a.to_vec();
    let mut det = F::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col] == F::zero() {
            return F::zero();
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det = det * m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == F::zero() {
                continue;
            }
            for c in col..n {
                let v = m[col][c];
                m[r][c] = m[r][c] - f * v;
            }
        }
    }
    det
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn sub_det<F: Real>(m: &SymMatrix<F>, rows: &[usize], cols: &[usize]) -> F {
    let a: Vec<Vec<F>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m.get(r, c)).collect())
        .collect();
    det_dense(&a)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Average over all `k × k` minors of `b` of the minor times its signed
/// complementary minor in `a`.
///
/// `k = 0` gives `det a`, `k = n` gives `det b`.
pub fn minor_sum<F: Real>(a: &SymMatrix<F>, b: &SymMatrix<F>, k: usize) -> Result<F> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch(format!("{n}×{n} vs {}×{}", b.n(), b.n())));
    }
    if k > n {
        return Err(Error::PreconditionViolated(format!("minor order {k} exceeds {n}")));
    }
    let sets = subsets(n, k);
    let mut total = F::zero();
    for r in &sets {
        let rc: Vec<usize> = (0..n).filter(|i| !r.contains(i)).collect();
        for s in &sets {
            let sc: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
            let mb = if k == 0 { F::one() } else { sub_det(b, r, s) };
            if mb == F::zero() {
                continue;
            }
            let ma = if k == n { F::one() } else { sub_det(a, &rc, &sc) };
            let parity: usize = r.iter().sum::<usize>() + s.iter().sum::<usize>();
            let term = mb * ma;
            total = if parity.is_multiple_of(2) { total + term } else { total - term };
        }
    }
    Ok(total / F::from_f64_lossy(binomial(n, k)))
}

/// The four-term chain `3 det B ≤ Σ a_ij cof(B)_ij ≤ Σ b_ij cof(A)_ij ≤ 3 det A`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma41Chain {
    pub values: [f64; 4],
    /// `nondecreasing[i]` is `values[i] ≤ values[i + 1]` within the slack.
    pub nondecreasing: [bool; 3],
}

impl Lemma41Chain {
    pub fn holds(&self) -> bool {
        self.nondecreasing.iter().all(|&b| b)
    }
}

/// Evaluate the chain for 3×3 `A ⪰ B ⪰ 0`.
pub fn lemma41_check<F: Real>(a: &SymMatrix<F>, b: &SymMatrix<F>, tol: f64) -> Result<Lemma41Chain> {
    if a.n() != 3 || b.n() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "expected 3×3 matrices, got {} and {}",
            a.n(),
            b.n()
        )));
    }
    if !psd_check(b, tol).is_psd() {
        return Err(Error::PreconditionViolated("B is not PSD".into()));
    }
    if !psd_check(&a.sub(b)?, tol).is_psd() {
        return Err(Error::PreconditionViolated("A − B is not PSD".into()));
    }
    let n = 3.0;
    let values = [
        n * minor_sum(a, b, 3)?.to_f64_lossy(),
        n * minor_sum(a, b, 2)?.to_f64_lossy(),
        n * minor_sum(a, b, 1)?.to_f64_lossy(),
        n * minor_sum(a, b, 0)?.to_f64_lossy(),
    ];
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;
    let nondecreasing = [
        values[0] <= values[1] + slack,
        values[1] <= values[2] + slack,
        values[2] <= values[3] + slack,
    ];
    Ok(Lemma41Chain { values, nondecreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_pairs() {
        let i3 = SymMatrix::<f64>::identity(3);
        for k in 0..=3 {
            assert!((minor_sum(&i3, &i3, k).unwrap() - 1.0).abs() < 1e-14);
        }
        let c = lemma41_check(&i3, &i3, 1e-9).unwrap();
        assert_eq!(c.values, [3.0, 3.0, 3.0, 3.0]);
        assert!(c.holds());
    }

    #[test]
    fn doubled_identity() {
        let a = SymMatrix::<f64>::identity(3).scale(2.0);
        let b = SymMatrix::<f64>::identity(3);
        let got: Vec<f64> = (0..=3).map(|k| minor_sum(&a, &b, k).unwrap()).collect();
        assert_eq!(got, vec![8.0, 4.0, 2.0, 1.0]);
        assert_eq!(lemma41_check(&a, &b, 1e-9).unwrap().values, [3.0, 6.0, 12.0, 24.0]);
    }

    #[test]
    fn matches_cofactor_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mut a = SymMatrix::<f64>::zeros(3);
        let mut b = SymMatrix::<f64>::zeros(3);
        for i in 0..3 {
            for j in i..3 {
                a.set(i, j, rows[i][j]);
                b.set(i, j, rows[j][i] * 0.5 + 0.1);
            }
        }
        // k = 1 is the cofactor pairing of B against A
        let cof = |m: &SymMatrix<f64>, i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            let d = sub_det(m, &r, &c);
            if (i + j).is_multiple_of(2) { d } else { -d }
        };
        let mut direct = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                direct += b.get(i, j) * cof(&a, i, j);
            }
        }
        assert!((3.0 * minor_sum(&a, &b, 1).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn dense_determinant() {
        let a: Vec<Vec<f64>> = vec![vec![0.0, 2.0, 1.0], vec![1.0, 0.0, 0.0], vec![3.0, 1.0, 1.0]];
        assert!((det_dense(&a) + 1.0).abs() < 1e-14);
        assert_eq!(det_dense::<f64>(&[]), 1.0);
    }

    #[test]
    fn preconditions() {
        let a = SymMatrix::<f64>::identity(3);
        let b = SymMatrix::<f64>::identity(3).scale(2.0);
        assert!(matches!(lemma41_check(&a, &b, 1e-9), Err(Error::PreconditionViolated(_))));
        assert!(matches!(
            minor_sum(&a, &SymMatrix::identity(2), 1),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
