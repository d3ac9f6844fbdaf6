use super::{HomPoly, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

impl<S: Scalar> HomPoly<S> {
    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> HomPoly<S> {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = HomPoly::zero(self.nvars, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (m, c) in self.terms() {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c.clone() * S::from_i64(e as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<HomPoly<S>> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Symmetric matrix of second partials.
    pub fn hessian(&self) -> Vec<Vec<HomPoly<S>>> {
        let g = self.gradient();
        let n = self.nvars;
        let mut h = vec![vec![HomPoly::zero(n, self.degree.saturating_sub(2)); n]; n];
        for i in 0..n {
            for j in i..n {
                let d = g[i].partial(j);
                h[j][i] = d.clone();
                h[i][j] = d;
            }
        }
        h
    }
}

/// Gradient and Hessian of `p`.
pub fn poly_calculus<S: Scalar>(p: &HomPoly<S>) -> Result<(Vec<HomPoly<S>>, Vec<Vec<HomPoly<S>>>)> {
    if p.degree() < 2 {
        return Err(Error::PreconditionViolated(format!(
            "hessian needs degree >= 2, got {}",
            p.degree()
        )));
    }
    Ok((p.gradient(), p.hessian()))
}
