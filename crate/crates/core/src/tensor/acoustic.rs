use num_rational::BigRational;
use serde::Serialize;

use super::{orbit_distinct, ElastTensor};
use crate::error::{Error, Result};
use crate::poly::{HomPoly, Monomial};
use crate::scalar::Scalar;

/// Matrix of homogeneous polynomials sharing `nvars` and degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct PolynomialMatrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<HomPoly<S>>>,
    symmetric: bool,
}

impl<S: Scalar> PolynomialMatrix<S> {
    /// Validates shape and shared `nvars`/degree; the symmetry flag is computed.
    pub fn new(entries: Vec<Vec<HomPoly<S>>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let (nv, deg) = entries
            .first()
            .and_then(|r| r.first())
            .map(|p| (p.nvars(), p.degree()))
            .unwrap_or((0, 0));
        for r in &entries {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged polynomial matrix".into()));
            }
            for p in r {
                if p.nvars() != nv || p.degree() != deg {
                    return Err(Error::DimensionMismatch(
                        "entries must share nvars and degree".into(),
                    ));
                }
            }
        }
        let symmetric = rows == cols
            && (0..rows).all(|i| (0..i).all(|j| entries[i][j] == entries[j][i]));
        Ok(PolynomialMatrix {
            rows,
            cols,
            entries,
            symmetric,
        })
    }

    pub fn zeros(rows: usize, cols: usize, nvars: usize, degree: u32) -> Self {
        PolynomialMatrix {
            rows,
            cols,
            entries: vec![vec![HomPoly::zero(nvars, degree); cols]; rows],
            symmetric: rows == cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Size of a square matrix.
    pub fn n(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> &HomPoly<S> {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<HomPoly<S>>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[HomPoly<S>] {
        &self.entries[i]
    }

    pub fn nvars(&self) -> usize {
        self.entries
            .first()
            .and_then(|r| r.first())
            .map_or(0, |p| p.nvars())
    }

    pub fn entry_degree(&self) -> u32 {
        self.entries
            .first()
            .and_then(|r| r.first())
            .map_or(0, |p| p.degree())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.entries[i][j].clone()).collect())
            .collect();
        PolynomialMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            symmetric: self.symmetric,
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let deg = self.entry_degree() + other.entry_degree();
        let nv = self.nvars();
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(other.cols);
            for j in 0..other.cols {
                let mut acc = HomPoly::zero(nv, deg);
                for k in 0..self.cols {
                    acc = acc.checked_add(&self.entries[i][k].checked_mul(&other.entries[k][j])?)?;
                }
                row.push(acc);
            }
            out.push(row);
        }
        Self::new(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix shapes differ".into()));
        }
        let mut out = self.entries.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i][j] = out[i][j].checked_sub(&other.entries[i][j])?;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        PolynomialMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|p| p.scale(s)).collect())
                .collect(),
            ..self.clone()
        }
    }

    pub fn map_entries<T: Scalar>(&self, f: impl Fn(&HomPoly<S>) -> HomPoly<T>) -> PolynomialMatrix<T> {
        PolynomialMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
            symmetric: self.symmetric,
        }
    }

    pub fn eval(&self, y: &[S]) -> Vec<Vec<S>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|p| p.eval(y)).collect())
            .collect()
    }

    pub fn eval_f64(&self, y: &[f64]) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|p| p.eval_f64(y)).collect())
            .collect()
    }

    pub fn to_f64(&self) -> PolynomialMatrix<f64> {
        self.map_entries(|p| p.to_f64())
    }

    /// Square submatrix with the given row and column removed.
    pub fn without(&self, row: usize, col: usize) -> Self {
        let entries: Vec<Vec<HomPoly<S>>> = (0..self.rows)
            .filter(|&i| i != row)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != col)
                    .map(|j| self.entries[i][j].clone())
                    .collect()
            })
            .collect();
        let sym = self.symmetric && row == col;
        PolynomialMatrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            entries,
            symmetric: sym,
        }
    }

    /// Keep only the listed rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries: Vec<Vec<HomPoly<S>>> = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect())
            .collect();
        PolynomialMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries,
            symmetric: self.symmetric && rows == cols,
        }
    }

    /// Pretty-print with one row per line.
    pub fn display_with(&self, names: &[&str]) -> String {
        self.entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|p| p.display_with(names)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Which argument of `f(x⊗y)` stays as the quadratic-form variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixRole {
    /// `T(y)_ik = Σ_jl C_ijkl y_j y_l`.
    YMatrix,
    /// `S(x)_jl = Σ_ik C_ijkl x_i x_k`.
    XMatrix,
}

/// Acoustic tensor of `C` as a symmetric matrix of quadratic forms.
pub fn acoustic_tensor(c: &ElastTensor, role: MatrixRole) -> PolynomialMatrix<BigRational> {
    let d = c.dim();
    let mut m = PolynomialMatrix::zeros(d, d, d, 2);
    for (q, v) in c.components() {
        for [i, j, k, l] in orbit_distinct(*q) {
            let (r, s, a, b) = match role {
                MatrixRole::YMatrix => (i, k, j, l),
                MatrixRole::XMatrix => (j, l, i, k),
            };
            let mut e = vec![0; d];
            e[a] += 1;
            e[b] += 1;
            m.entries[r][s].add_term(Monomial::new(e), v.clone());
        }
    }
    m.symmetric = true;
    m
}

/// Biquadratic form `g(x, y) = x·T(y)·x` held as its `dx×dx` acoustic matrix
/// of quadratic forms in `dy` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct BiquadraticForm<S> {
    t: PolynomialMatrix<S>,
}

impl<S: Scalar> BiquadraticForm<S> {
    /// From a symmetric matrix of quadratic forms.
    pub fn from_matrix(t: PolynomialMatrix<S>) -> Result<Self> {
        if !t.is_symmetric() || t.entry_degree() != 2 {
            return Err(Error::DimensionMismatch(
                "biquadratic form needs a symmetric matrix of quadratic forms".into(),
            ));
        }
        Ok(BiquadraticForm { t })
    }

    /// From a polynomial in `(x1..x_dx, y1..y_dy)` of bidegree (2, 2).
    pub fn from_poly(p: &HomPoly<S>, dx: usize, dy: usize) -> Result<Self> {
        if p.nvars() != dx + dy || p.degree() != 4 {
            return Err(Error::DimensionMismatch("expected a degree-4 form in dx + dy variables".into()));
        }
        let mut t = PolynomialMatrix::zeros(dx, dx, dy, 2);
        let half = S::one() / S::from_i64(2);
        for (m, c) in p.terms() {
            let e = m.exps();
            let xs: Vec<usize> = (0..dx)
                .flat_map(|i| std::iter::repeat_n(i, e[i] as usize))
                .collect();
            let ydeg: u32 = e[dx..].iter().sum();
            if xs.len() != 2 || ydeg != 2 {
                return Err(Error::DimensionMismatch(format!("term {e:?} is not of bidegree (2, 2)")));
            }
            let ym = Monomial::new(e[dx..].to_vec());
            let (i, k) = (xs[0], xs[1]);
            if i == k {
                t.entries[i][i].add_term(ym, c.clone());
            } else {
                t.entries[i][k].add_term(ym.clone(), c.clone() * half.clone());
                t.entries[k][i].add_term(ym, c.clone() * half.clone());
            }
        }
        t.symmetric = true;
        Ok(BiquadraticForm { t })
    }

    pub fn dx(&self) -> usize {
        self.t.rows()
    }

    pub fn dy(&self) -> usize {
        self.t.nvars()
    }

    pub fn matrix(&self) -> &PolynomialMatrix<S> {
        &self.t
    }

    /// Coefficient of `x_i y_j x_k y_l` collected over the pair swap.
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> S {
        let mut e = vec![0; self.dy()];
        e[j] += 1;
        e[l] += 1;
        let c = self.t.get(i, k).coeff(&Monomial::new(e));
        let mult = if i == k { 1 } else { 2 };
        c * S::from_i64(mult)
    }

    /// Polynomial in `(x1..x_dx, y1..y_dy)`.
    pub fn to_poly(&self) -> HomPoly<S> {
        let (dx, dy) = (self.dx(), self.dy());
        let n = dx + dy;
        let mut out = HomPoly::zero(n, 4);
        for i in 0..dx {
            for k in 0..dx {
                for (m, c) in self.t.get(i, k).terms() {
                    let mut e = vec![0; n];
                    e[i] += 1;
                    e[k] += 1;
                    for (a, &x) in m.exps().iter().enumerate() {
                        e[dx + a] += x;
                    }
                    out.add_term(Monomial::new(e), c.clone());
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[S], y: &[S]) -> S {
        let t = self.t.eval(y);
        let mut acc = S::zero();
        for i in 0..self.dx() {
            for k in 0..self.dx() {
                acc = acc + x[i].clone() * t[i][k].clone() * x[k].clone();
            }
        }
        acc
    }
}

impl ElastTensor {
    /// Biquadratic form `f(x⊗y)`.
    pub fn biquadratic(&self) -> BiquadraticForm<BigRational> {
        BiquadraticForm {
            t: acoustic_tensor(self, MatrixRole::YMatrix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};
    use crate::tensor::corpus::corpus;
    use crate::RatPoly;

    fn y(i: usize) -> RatPoly {
        RatPoly::var(3, i)
    }

    #[test]
    fn choi_lam_acoustic_tensor() {
        let t = acoustic_tensor(&corpus("choi-lam").unwrap(), MatrixRole::YMatrix);
        let yy = |i: usize, j: usize| &y(i) * &y(j);
        let expect = [
            [&yy(0, 0) + &yy(1, 1), -&yy(0, 1), -&yy(0, 2)],
            [-&yy(0, 1), &yy(1, 1) + &yy(2, 2), -&yy(1, 2)],
            [-&yy(0, 2), -&yy(1, 2), &yy(2, 2) + &yy(0, 0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.get(i, j), &expect[i][j], "entry ({i},{j})");
            }
        }
        assert!(t.is_symmetric());
    }

    #[test]
    fn diagonal_and_minor() {
        let t = acoustic_tensor(&corpus("diag-convex").unwrap(), MatrixRole::YMatrix);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { y(i).square() } else { RatPoly::zero(3, 2) };
                assert_eq!(t.get(i, j), &want);
            }
        }
        let m = acoustic_tensor(&corpus("null-lagrangian").unwrap(), MatrixRole::YMatrix);
        assert!(m.is_zero());
    }

    #[test]
    fn rank_one_evaluation() {
        let c = corpus("choi-lam").unwrap();
        assert_eq!(c.eval_rank_one(&[rat(1), rat(0), rat(0)], &[rat(0), rat(1), rat(0)]).unwrap(), rat(1));
        let ones = [rat(1), rat(1), rat(1)];
        assert_eq!(c.eval_rank_one(&ones, &ones).unwrap(), rat(0));
        assert_eq!(c.eval_rank_one(&[rat(0), rat(0), rat(0)], &[rat(3), rat(1), rat(2)]).unwrap(), rat(0));
        assert!(matches!(c.eval_rank_one(&[rat(1)], &ones), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn transpose_duality() {
        let c = corpus("remark25").unwrap();
        let x = acoustic_tensor(&c, MatrixRole::XMatrix);
        let y = acoustic_tensor(&c.transposed(), MatrixRole::YMatrix);
        assert_eq!(x, y);
    }

    #[test]
    fn biquadratic_views_agree() {
        let c = corpus("choi-lam").unwrap();
        let b = c.biquadratic();
        let p = b.to_poly();
        assert_eq!(p, c.rank_one_form());
        let back = BiquadraticForm::from_poly(&p, 3, 3).unwrap();
        assert_eq!(back, b);
        let x = [rat(2), ratio(-1, 2), rat(1)];
        let yv = [rat(1), rat(3), ratio(2, 7)];
        assert_eq!(b.eval(&x, &yv), c.eval_rank_one(&x, &yv).unwrap());
        assert_eq!(b.coeff(0, 1, 0, 1), rat(1));
    }
}
