use serde::Serialize;

use super::PolynomialMatrix;
use crate::error::{Error, Result};
use crate::poly::HomPoly;
use crate::scalar::Scalar;

fn det_rec<S: Scalar>(m: &PolynomialMatrix<S>) -> HomPoly<S> {
    let n = m.n();
    let deg = m.entry_degree() * n as u32;
    match n {
        0 => HomPoly::constant(m.nvars(), S::one()),
        1 => m.get(0, 0).clone(),
        2 => m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0),
        _ => {
            let mut acc = HomPoly::zero(m.nvars(), deg);
            for j in 0..n {
                if m.get(0, j).is_zero() {
                    continue;
                }
                let t = m.get(0, j) * &det_rec(&m.without(0, j));
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Exact determinant and cofactor matrix by Laplace expansion (`n ≤ 4`).
///
/// `cof[i][j] = (-1)^(i+j)·det(M without row i, column j)`, so
/// `M·cofᵀ = det(M)·I`.
pub fn symbolic_det_cof<S: Scalar>(
    m: &PolynomialMatrix<S>,
) -> Result<(HomPoly<S>, PolynomialMatrix<S>)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    let n = m.n();
    if n == 0 || n > 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let det = det_rec(m);
    let cof_deg = m.entry_degree() * (n as u32 - 1);
    let mut cof = vec![vec![HomPoly::zero(m.nvars(), cof_deg); n]; n];
    for (i, row) in cof.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let minor = if n == 1 {
                HomPoly::constant(m.nvars(), S::one())
            } else {
                det_rec(&m.without(i, j))
            };
            *c = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    Ok((det, PolynomialMatrix::new(cof)?))
}

/// Coefficients of `det(T - λ·T1) = c0 - λ·c1 + λ²·c2 - λ³·c3`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct MixedCoefficients<S> {
    pub c0: HomPoly<S>,
    pub c1: HomPoly<S>,
    pub c2: HomPoly<S>,
    pub c3: HomPoly<S>,
}

impl<S: Scalar> MixedCoefficients<S> {
    /// Evaluate the cubic in `λ` at the point `y`.
    pub fn eval(&self, lambda: &S, y: &[S]) -> S {
        let l2 = lambda.clone() * lambda.clone();
        let l3 = l2.clone() * lambda.clone();
        self.c0.eval(y) - lambda.clone() * self.c1.eval(y) + l2 * self.c2.eval(y)
            - l3 * self.c3.eval(y)
    }
}

fn frobenius<S: Scalar>(a: &PolynomialMatrix<S>, b: &PolynomialMatrix<S>) -> HomPoly<S> {
    let deg = a.entry_degree() + b.entry_degree();
    let mut acc = HomPoly::zero(a.nvars(), deg);
    for i in 0..a.n() {
        for j in 0..a.n() {
            acc = &acc + &(a.get(i, j) * b.get(i, j));
        }
    }
    acc
}

/// Expansion of `det(T - λ·T1)` in powers of `λ` for 3×3 symmetric `T`, `T1`.
pub fn mixed_det_expansion<S: Scalar>(
    t: &PolynomialMatrix<S>,
    t1: &PolynomialMatrix<S>,
) -> Result<MixedCoefficients<S>> {
    for m in [t, t1] {
        if m.n() != 3 || !m.is_square() || !m.is_symmetric() || m.entry_degree() != 2 {
            return Err(Error::DimensionMismatch(
                "expected 3x3 symmetric matrices of quadratic forms".into(),
            ));
        }
    }
    if t.nvars() != t1.nvars() {
        return Err(Error::DimensionMismatch("matrices in different variables".into()));
    }
    let (c0, cof) = symbolic_det_cof(t)?;
    let (c3, cof1) = symbolic_det_cof(t1)?;
    Ok(MixedCoefficients {
        c1: frobenius(t1, &cof),
        c2: frobenius(t, &cof1),
        c0,
        c3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::tensor::{acoustic_tensor, corpus::corpus, MatrixRole};
    use crate::RatPoly;
    use num_rational::BigRational;

    fn y(i: usize) -> RatPoly {
        RatPoly::var(3, i)
    }

    fn diag(entries: [RatPoly; 3]) -> PolynomialMatrix<BigRational> {
        let z = RatPoly::zero(3, 2);
        let [a, b, c] = entries;
        PolynomialMatrix::new(vec![
            vec![a, z.clone(), z.clone()],
            vec![z.clone(), b, z.clone()],
            vec![z.clone(), z, c],
        ])
        .unwrap()
    }

    fn assert_adjugate(m: &PolynomialMatrix<BigRational>) {
        let (det, cof) = symbolic_det_cof(m).unwrap();
        let prod = m.checked_mul(&cof.transpose()).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                let want = if i == j { det.clone() } else { RatPoly::zero(m.nvars(), det.degree()) };
                assert_eq!(prod.get(i, j), &want);
            }
        }
    }

    #[test]
    fn choi_lam_determinants() {
        let c = corpus("choi-lam").unwrap();
        let t = acoustic_tensor(&c, MatrixRole::YMatrix);
        let (det, _) = symbolic_det_cof(&t).unwrap();
        let want = RatPoly::from_int_terms(
            3,
            6,
            &[(&[2, 4, 0], 1), (&[0, 2, 4], 1), (&[4, 0, 2], 1), (&[2, 2, 2], -3)],
        );
        assert_eq!(det, want);
        assert_adjugate(&t);
        let s = acoustic_tensor(&c, MatrixRole::XMatrix);
        let (det_x, _) = symbolic_det_cof(&s).unwrap();
        assert_eq!(det_x, crate::tensor::corpus::choi_lam_det(3));
    }

    #[test]
    fn diagonal_cofactors() {
        let m = diag([y(0).square(), y(1).square(), y(2).square()]);
        let (det, cof) = symbolic_det_cof(&m).unwrap();
        assert_eq!(det, (&(&y(0) * &y(1)) * &y(2)).square());
        assert_eq!(cof.get(0, 0), &(&y(1) * &y(2)).square());
        assert_eq!(cof.get(1, 1), &(&y(0) * &y(2)).square());
        assert_eq!(cof.get(2, 2), &(&y(0) * &y(1)).square());
        assert!(cof.get(0, 1).is_zero());

        let m = diag([y(0).square(), y(1).square(), RatPoly::zero(3, 2)]);
        let (det, cof) = symbolic_det_cof(&m).unwrap();
        assert!(det.is_zero());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(cof.get(i, j).is_zero(), (i, j) != (2, 2));
            }
        }
        assert_eq!(cof.get(2, 2), &(&y(0) * &y(1)).square());
    }

    #[test]
    fn four_by_four_block() {
        let t = acoustic_tensor(&corpus("cl-plus-square44").unwrap(), MatrixRole::YMatrix);
        assert_adjugate(&t);
    }

    #[test]
    fn mixed_expansion_trivial_cases() {
        let t = acoustic_tensor(&corpus("choi-lam").unwrap(), MatrixRole::YMatrix);
        let c = mixed_det_expansion(&t, &t).unwrap();
        assert_eq!(c.c1, c.c0.scale(&rat(3)));
        assert_eq!(c.c2, c.c0.scale(&rat(3)));
        assert_eq!(c.c3, c.c0);
        let z = PolynomialMatrix::zeros(3, 3, 3, 2);
        let c = mixed_det_expansion(&t, &z).unwrap();
        assert!(c.c1.is_zero() && c.c2.is_zero() && c.c3.is_zero());
        let bad = PolynomialMatrix::zeros(2, 2, 3, 2);
        assert!(mixed_det_expansion(&t, &bad).is_err());
    }
}
