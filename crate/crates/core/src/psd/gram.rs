use super::{sym_eigen, Real, SymMatrix};
use crate::error::{Error, Result};

/// Factor a PSD Gram matrix as `Σ v vᵀ`, dropping eigenvalues below `rank_tol`.
///
/// Vectors come out in order of decreasing eigenvalue.
pub fn gram_to_squares<F: Real>(g: &SymMatrix<F>, rank_tol: f64) -> Result<Vec<Vec<f64>>> {
    let g: SymMatrix<f64> = g.cast();
    let eig = sym_eigen(&g);
    if let Some(&lmin) = eig.values.first() {
        if lmin < -rank_tol {
            return Err(Error::NotPsd(lmin));
        }
    }
    let mut out = Vec::new();
    for k in (0..eig.values.len()).rev() {
        let lam = eig.values[k];
        if lam <= rank_tol {
            continue;
        }
        let s = lam.sqrt();
        out.push(eig.vector(k).iter().map(|x| x * s).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rebuild(vs: &[Vec<f64>], n: usize) -> SymMatrix<f64> {
        let mut m = SymMatrix::zeros(n);
        for v in vs {
            m.axpy(1.0, &SymMatrix::outer(v));
        }
        m
    }

    #[test]
    fn identity_gives_unit_vectors() {
        let vs = gram_to_squares(&SymMatrix::<f64>::identity(2), 1e-8).unwrap();
        assert_eq!(vs.len(), 2);
        let r = rebuild(&vs, 2);
        assert!(r.sub(&SymMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rank_one() {
        let vs = gram_to_squares(&SymMatrix::outer(&[1.0f64, 2.0]), 1e-8).unwrap();
        assert_eq!(vs.len(), 1);
        let v = &vs[0];
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_bilinear_squares() {
        // (X1y1 + X2y2)² + (X1y2 - X2y1)² on [X1y1, X1y2, X2y1, X2y2]
        let a = [1.0, 0.0, 0.0, 1.0];
        let b = [0.0, 1.0, -1.0, 0.0];
        let mut g = SymMatrix::outer(&a);
        g.axpy(1.0, &SymMatrix::outer(&b));
        let vs = gram_to_squares(&g, 1e-8).unwrap();
        assert_eq!(vs.len(), 2);
        assert!(rebuild(&vs, 4).sub(&g).unwrap().max_abs() <= 4.0 * 1e-8);
        // each vector lies in span{a, b}
        for v in &vs {
            let pa: f64 = v.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() / 2.0;
            let pb: f64 = v.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / 2.0;
            for i in 0..4 {
                assert!((v[i] - pa * a[i] - pb * b[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let g = SymMatrix::from_diag(&[1.0f64, -0.1]);
        assert!(matches!(gram_to_squares(&g, 1e-8), Err(Error::NotPsd(_))));
        assert_eq!(gram_to_squares(&SymMatrix::from_diag(&[1.0f64, -1e-9]), 1e-8).unwrap().len(), 1);
    }
}
