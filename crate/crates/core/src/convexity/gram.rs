//! Gram-matrix searches for sums of squares over a monomial basis.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{HomPoly, Monomial};
use crate::psd::{gram_to_squares, max_min_eig, sym_eigen, AffinePsdProblem, SliceResult, SliceStatus, SymMatrix};
use crate::scalar::{rationalize, rationalize_digits, Scalar};
use crate::tensor::BiquadraticForm;
use crate::RatPoly;

/// Sparse symmetric direction: `(i, j, v)` with `i ≤ j`, mirrored below the diagonal.
pub(crate) type Direction = Vec<(usize, usize, BigRational)>;

/// Target `p = vᵀ G v` with `G = G0 + Σ c_k D_k` and `v` the basis monomials.
pub(crate) struct GramSearch {
    pub basis: Vec<Monomial>,
    pub g0: Vec<Vec<BigRational>>,
    pub dirs: Vec<Direction>,
    pub target: RatPoly,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl GramSearch {
    /// Particular Gram matrix placing each coefficient on the first basis pair
    /// that produces its monomial, and the kernel spanned by pair differences.
    pub(crate) fn from_target(basis: Vec<Monomial>, target: RatPoly) -> Result<Self> {
        let n = basis.len();
        let mut pairs: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                pairs.entry(basis[i].mul(&basis[j])).or_default().push((i, j));
            }
        }
        let mut g0 = vec![vec![BigRational::zero(); n]; n];
        for (m, c) in target.terms() {
            let Some(list) = pairs.get(m) else {
                return Err(Error::PreconditionViolated(format!(
                    "monomial {:?} is not a product of basis elements",
                    m.exps()
                )));
            };
            let (i, j) = list[0];
            if i == j {
                g0[i][i] = c.clone();
            } else {
                g0[i][j] = c * half();
                g0[j][i] = c * half();
            }
        }
        let weight = |(i, j): (usize, usize)| if i == j { BigRational::from_integer(1.into()) } else { half() };
        let mut dirs = Vec::new();
        for list in pairs.values() {
            let r = list[0];
            for &q in &list[1..] {
                dirs.push(vec![(r.0, r.1, weight(r)), (q.0, q.1, -weight(q))]);
            }
        }
        Ok(GramSearch {
            basis,
            g0,
            dirs,
            target,
        })
    }

    pub(crate) fn n(&self) -> usize {
        self.basis.len()
    }

    fn direction_f64(&self, d: &Direction) -> SymMatrix<f64> {
        let mut m = SymMatrix::zeros(self.n());
        for (i, j, v) in d {
            m.add_to(*i, *j, v.to_f64_lossy());
        }
        m
    }

    pub(crate) fn base_f64(&self) -> SymMatrix<f64> {
        let n = self.n();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, self.g0[i][j].to_f64_lossy());
            }
        }
        m
    }

    pub(crate) fn solve(&self, tolerance: f64, seed: u64) -> Result<SliceResult> {
        let dirs = self.dirs.iter().map(|d| self.direction_f64(d)).collect();
        let mut p = AffinePsdProblem::new(self.base_f64(), dirs);
        p.tolerance = tolerance;
        p.seed = seed;
        max_min_eig(&p)
    }

    pub(crate) fn exact_gram(&self, c: &[BigRational]) -> Vec<Vec<BigRational>> {
        let mut g = self.g0.clone();
        for (d, ck) in self.dirs.iter().zip(c) {
            if ck.is_zero() {
                continue;
            }
            for (i, j, v) in d {
                let add = v * ck;
                g[*i][*j] += &add;
                if i != j {
                    g[*j][*i] += &add;
                }
            }
        }
        g
    }

    /// Rationalize the shift at increasing precision until the Gram matrix is
    /// exactly PSD, falling back to the face cut out by the numeric kernel.
    pub(crate) fn exact_decomposition(&self, c: &[f64]) -> Option<(Vec<BigRational>, Ldl)> {
        for max_den in DENOMINATORS {
            let cr: Vec<BigRational> = c.iter().map(|&x| rationalize(x, max_den)).collect();
            if let Some(ldl) = ldl_exact(&self.exact_gram(&cr)) {
                return Some((cr, ldl));
            }
        }
        self.face_decomposition(c)
    }

    /// When every feasible Gram matrix is singular, rounding the shift leaves
    /// the face. Rationalize the affine hull `{c : G(c)·k = 0}` cut out by the
    /// numeric kernel and round only the free coordinates inside it; if the
    /// hull is irrational, walk to the boundary of the face, where the kernel
    /// grows, and retry there.
    fn face_decomposition(&self, c: &[f64]) -> Option<(Vec<BigRational>, Ldl)> {
        if self.dirs.len() > FACE_MAX_DIRECTIONS {
            return None;
        }
        self.face_search(c, FACE_DEPTH)
    }

    fn gram_at(&self, c: &[f64]) -> SymMatrix<f64> {
        let mut g = self.base_f64();
        for (d, &ck) in self.dirs.iter().zip(c) {
            g.axpy(ck, &self.direction_f64(d));
        }
        g
    }

    fn face_search(&self, c: &[f64], depth: usize) -> Option<(Vec<BigRational>, Ldl)> {
        let n = self.n();
        let g = self.gram_at(c);
        let scale = g.max_abs().max(f64::MIN_POSITIVE);
        let eig = sym_eigen(&g);
        let mut tried = Vec::new();
        let mut hull = None;
        for rel in [1e-9, 1e-7, 1e-5] {
            let r = eig.values.iter().take_while(|&&v| v <= rel * scale).count();
            if r == 0 || r == n || tried.contains(&r) {
                continue;
            }
            tried.push(r);
            let kernel: Vec<Vec<f64>> = (0..r).map(|k| eig.vector(k)).collect();
            let (rows, rhs) = self.kernel_equations(&kernel);
            let Some(ech) = NumericEchelon::new(&rows, &rhs) else { continue };
            let mut seen: Vec<Vec<BigRational>> = vec![];
            for digits in [10, 8, 6] {
                let system = ech.rationalize(digits);
                for max_den in DENOMINATORS {
                    let free: Vec<BigRational> = c.iter().map(|&x| rationalize(x, max_den)).collect();
                    let cr = system.solution(&free);
                    if seen.contains(&cr) {
                        continue;
                    }
                    seen.push(cr.clone());
                    let cf: Vec<f64> = cr.iter().map(|v| v.to_f64_lossy()).collect();
                    if sym_eigen(&self.gram_at(&cf)).values[0] < -1e-9 * scale {
                        continue;
                    }
                    if let Some(ldl) = ldl_exact(&self.exact_gram(&cr)) {
                        return Some((cr, ldl));
                    }
                }
            }
            hull.get_or_insert(ech);
        }
        let hull = hull?;
        if depth == 0 {
            return None;
        }
        let tol = 1e-12 * scale;
        for v in hull.null_directions().into_iter().take(FACE_DIRECTIONS) {
            for sign in [1.0, -1.0] {
                let step = |t: f64| -> Vec<f64> { c.iter().zip(&v).map(|(a, b)| a + sign * t * b).collect() };
                let feasible = |t: f64| sym_eigen(&self.gram_at(&step(t))).values[0] >= -tol;
                let (mut lo, mut hi) = (0.0, 1e-3 * (1.0 + c.iter().fold(0.0f64, |m, x| m.max(x.abs()))));
                while feasible(hi) {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e8 {
                        break;
                    }
                }
                if hi > 1e8 {
                    continue;
                }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if feasible(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if let Some(found) = self.face_search(&step(lo), depth - 1) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Rows of `Σ_c c·D_c·k = -G0·k` for every kernel vector `k`.
    fn kernel_equations(&self, kernel: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.n();
        let m = self.dirs.len();
        let g0 = self.base_f64();
        let mut rows = vec![];
        let mut rhs = vec![];
        for k in kernel {
            let mut block = vec![vec![0.0; m]; n];
            for (col, d) in self.dirs.iter().enumerate() {
                for (i, j, v) in d {
                    let v = v.to_f64_lossy();
                    block[*i][col] += v * k[*j];
                    if i != j {
                        block[*j][col] += v * k[*i];
                    }
                }
            }
            for (i, row) in block.into_iter().enumerate() {
                rows.push(row);
                rhs.push(-(0..n).map(|j| g0.get(i, j) * k[j]).sum::<f64>());
            }
        }
        (rows, rhs)
    }

    /// `Σ (Σ_a v_a basis_a)²` computed exactly from floating coefficients.
    pub(crate) fn sum_of_squares_exact(&self, squares: &[Vec<f64>]) -> RatPoly {
        let nv = self.target.nvars();
        let deg = self.target.degree();
        let mut out = HomPoly::zero(nv, deg);
        for v in squares {
            let mut lin = HomPoly::zero(nv, deg / 2);
            for (m, &c) in self.basis.iter().zip(v) {
                if c != 0.0 {
                    lin.add_term(m.clone(), BigRational::from_f64_lossy(c));
                }
            }
            out = &out + &lin.square();
        }
        out
    }
}

const DENOMINATORS: [u64; 5] = [1, 12, 1_000, 1_000_000, 1_000_000_000];

const FACE_DEPTH: usize = 2;
const FACE_DIRECTIONS: usize = 4;
/// Beyond this the exact hull arithmetic costs minutes per face.
const FACE_MAX_DIRECTIONS: usize = 200;

/// Numeric reduced row echelon form of `A·x = b` found with full pivoting:
/// row `p` has a unit entry in column `pivots[p]` and zeros in the other
/// pivot columns.
struct NumericEchelon {
    pivots: Vec<usize>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cols: usize,
}

impl NumericEchelon {
    /// `None` when the system is inconsistent.
    fn new(a: &[Vec<f64>], b: &[f64]) -> Option<Self> {
        let m = a.first().map_or(0, Vec::len);
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        let amax = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        let bmax = b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let tol = 1e-7 * amax.max(bmax).max(f64::MIN_POSITIVE);
        let mut pivots: Vec<usize> = Vec::new();
        for p in 0..a.len().min(m) {
            let (mut br, mut bc, mut best) = (p, 0, 0.0);
            for (i, row) in a.iter().enumerate().skip(p) {
                for (j, v) in row.iter().enumerate() {
                    if !pivots.contains(&j) && v.abs() > best {
                        (br, bc, best) = (i, j, v.abs());
                    }
                }
            }
            if best <= tol {
                break;
            }
            a.swap(p, br);
            b.swap(p, br);
            let pv = a[p][bc];
            a[p].iter_mut().for_each(|v| *v /= pv);
            b[p] /= pv;
            for i in 0..a.len() {
                if i != p {
                    let f = a[i][bc];
                    if f != 0.0 {
                        for j in 0..m {
                            a[i][j] -= f * a[p][j];
                        }
                        b[i] -= f * b[p];
                    }
                }
            }
            pivots.push(bc);
        }
        let r = pivots.len();
        if b[r..].iter().any(|v| v.abs() > 1e-6 * bmax.max(1.0)) {
            return None;
        }
        a.truncate(r);
        b.truncate(r);
        Some(NumericEchelon { pivots, a, b, cols: m })
    }

    /// Entries rationalized to `digits` significant digits.
    fn rationalize(&self, digits: i32) -> Rref {
        let rows = self
            .pivots
            .iter()
            .zip(&self.a)
            .zip(&self.b)
            .map(|((&col, row), &rhs)| {
                let coeffs = (0..self.cols)
                    .map(|j| {
                        if j == col {
                            BigRational::one()
                        } else if self.pivots.contains(&j) {
                            BigRational::zero()
                        } else {
                            rationalize_digits(row[j], digits)
                        }
                    })
                    .collect();
                (col, coeffs, rationalize_digits(rhs, digits))
            })
            .collect();
        Rref { rows }
    }

    /// One direction per free column spanning the solutions of `A·x = 0`.
    fn null_directions(&self) -> Vec<Vec<f64>> {
        (0..self.cols)
            .filter(|j| !self.pivots.contains(j))
            .map(|f| {
                let mut v = vec![0.0; self.cols];
                v[f] = 1.0;
                for (&col, row) in self.pivots.iter().zip(&self.a) {
                    v[col] = -row[f];
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            })
            .collect()
    }
}

/// Exact reduced row echelon form of `A·x = b`.
struct Rref {
    /// `(pivot column, row coefficients, right-hand side)`.
    rows: Vec<(usize, Vec<BigRational>, BigRational)>,
}

impl Rref {
    /// The solution whose free unknowns equal `free`.
    fn solution(&self, free: &[BigRational]) -> Vec<BigRational> {
        let mut x = free.to_vec();
        for (col, _, _) in &self.rows {
            x[*col] = BigRational::zero();
        }
        let fixed: Vec<BigRational> = self
            .rows
            .iter()
            .map(|(_, coeffs, rhs)| rhs - coeffs.iter().zip(&x).fold(BigRational::zero(), |acc, (a, v)| acc + a * v))
            .collect();
        for ((col, _, _), v) in self.rows.iter().zip(fixed) {
            x[col.to_owned()] = v;
        }
        x
    }
}

/// Exact `G = Σ w_r l_r l_rᵀ` with positive rational weights.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Ldl {
    pub weights: Vec<BigRational>,
    pub forms: Vec<Vec<BigRational>>,
}

/// Symmetric-pivot LDLᵀ over the rationals; `None` unless `g` is PSD.
pub(crate) fn ldl_exact(g: &[Vec<BigRational>]) -> Option<Ldl> {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = g.to_vec();
    let mut done = vec![false; n];
    let mut weights = Vec::new();
    let mut forms = Vec::new();
    loop {
        let mut pivot = None;
        for i in 0..n {
            if done[i] {
                continue;
            }
            if a[i][i].is_negative() {
                return None;
            }
            if a[i][i].is_positive() && pivot.is_none() {
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else {
            let clean = (0..n).all(|i| done[i] || (0..n).all(|j| done[j] || a[i][j].is_zero()));
            return clean.then_some(Ldl { weights, forms });
        };
        let w = a[p][p].clone();
        let l: Vec<BigRational> = (0..n).map(|j| &a[p][j] / &w).collect();
        for i in 0..n {
            if done[i] || l[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if done[j] || l[j].is_zero() {
                    continue;
                }
                let sub = &w * &l[i] * &l[j];
                a[i][j] -= sub;
            }
        }
        done[p] = true;
        weights.push(w);
        forms.push(l);
    }
}

/// Explicit minor directions on the row-major basis `x_i y_j`:
/// `ξ_ij ξ_kl - ξ_il ξ_kj` for `i < k`, `j < l`.
pub(crate) fn minor_directions(dx: usize, dy: usize) -> Vec<Direction> {
    let idx = |i: usize, j: usize| i * dy + j;
    let mut out = Vec::new();
    for i in 0..dx {
        for k in i + 1..dx {
            for j in 0..dy {
                for l in j + 1..dy {
                    let (a, b) = (idx(i, j), idx(k, l));
                    let (c, e) = (idx(i, l), idx(k, j));
                    out.push(vec![
                        (a.min(b), a.max(b), half()),
                        (c.min(e), c.max(e), -half()),
                    ]);
                }
            }
        }
    }
    out
}

/// Basis `x_i y_j` in row-major order, over `dx + dy` variables.
pub(crate) fn bilinear_basis(dx: usize, dy: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(dx * dy);
    for i in 0..dx {
        for j in 0..dy {
            let mut e = vec![0; dx + dy];
            e[i] = 1;
            e[dx + j] = 1;
            out.push(Monomial::new(e));
        }
    }
    out
}

/// Gram matrix of a biquadratic form on the bilinear basis.
pub(crate) fn bilinear_gram(g: &BiquadraticForm<BigRational>) -> Vec<Vec<BigRational>> {
    let (dx, dy) = (g.dx(), g.dy());
    let n = dx * dy;
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..dx {
        for k in 0..dx {
            let t = g.matrix().get(i, k);
            for j in 0..dy {
                for l in 0..dy {
                    let mut e = vec![0; dy];
                    e[j] += 1;
                    e[l] += 1;
                    let c = t.coeff(&Monomial::new(e));
                    out[i * dy + j][k * dy + l] = if j == l { c } else { c * half() };
                }
            }
        }
    }
    out
}

/// Exact part of a certificate: `Σ w_r (xᵀ M_r y)²` with the exact minor shift.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSquares {
    pub weights: Vec<BigRational>,
    pub matrices: Vec<Vec<Vec<BigRational>>>,
    pub minor_coeffs: Vec<BigRational>,
}

impl Serialize for ExactSquares {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let strs = |v: &[BigRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let mats: Vec<Vec<Vec<String>>> = self
            .matrices
            .iter()
            .map(|m| m.iter().map(|row| strs(row)).collect())
            .collect();
        let mut st = s.serialize_struct("ExactSquares", 3)?;
        st.serialize_field("weights", &strs(&self.weights))?;
        st.serialize_field("matrices", &mats)?;
        st.serialize_field("minor_coeffs", &strs(&self.minor_coeffs))?;
        st.end()
    }
}

/// One square `(xᵀ M y)²`, `M` of size `dx×dy`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BilinearSquare {
    pub matrix: Vec<Vec<f64>>,
}

impl BilinearSquare {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (xi, row) in x.iter().zip(&self.matrix) {
            for (yj, m) in y.iter().zip(row) {
                acc += xi * m * yj;
            }
        }
        acc
    }
}

/// `f(x⊗y) = Σ (xᵀ M_r y)²`; equivalently `f + Σ c_k·minor_k` is a sum of
/// squares of linear forms in `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SosCertificate {
    pub minor_coeffs: Vec<f64>,
    pub squares: Vec<BilinearSquare>,
    /// Largest coefficient of `Σ squares - f(x⊗y)`, computed exactly.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSquares>,
}

impl SosCertificate {
    pub fn empty(dx: usize, dy: usize) -> Self {
        let k = dx * (dx.saturating_sub(1)) / 2 * dy * (dy.saturating_sub(1)) / 2;
        SosCertificate {
            minor_coeffs: vec![0.0; k],
            squares: vec![],
            residual: 0.0,
            exact: Some(ExactSquares {
                weights: vec![],
                matrices: vec![],
                minor_coeffs: vec![BigRational::zero(); k],
            }),
        }
    }

    pub fn dx(&self) -> Option<usize> {
        self.squares.first().map(|s| s.matrix.len())
    }

    /// Exact sum of the floating squares as a form in `(x, y)`.
    pub fn reconstruct(&self, dx: usize, dy: usize) -> RatPoly {
        let mut out = HomPoly::zero(dx + dy, 4);
        for sq in &self.squares {
            let mut lin = HomPoly::zero(dx + dy, 2);
            for (i, row) in sq.matrix.iter().enumerate() {
                for (j, &c) in row.iter().enumerate() {
                    if c != 0.0 {
                        let mut e = vec![0; dx + dy];
                        e[i] = 1;
                        e[dx + j] = 1;
                        lin.add_term(Monomial::new(e), BigRational::from_f64_lossy(c));
                    }
                }
            }
            out = &out + &lin.square();
        }
        out
    }

    /// Exact sum of the exact squares, if present.
    pub fn reconstruct_exact(&self, dx: usize, dy: usize) -> Option<RatPoly> {
        let ex = self.exact.as_ref()?;
        let mut out = HomPoly::zero(dx + dy, 4);
        for (w, m) in ex.weights.iter().zip(&ex.matrices) {
            let mut lin = HomPoly::zero(dx + dy, 2);
            for (i, row) in m.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        let mut e = vec![0; dx + dy];
                        e[i] = 1;
                        e[dx + j] = 1;
                        lin.add_term(Monomial::new(e), c.clone());
                    }
                }
            }
            out = &out + &lin.square().scale(w);
        }
        Some(out)
    }

    /// Certificate from exact weighted squares `Σ w_r (xᵀ M_r y)²`, `w_r ≥ 0`,
    /// with the residual measured against `target`.
    pub(crate) fn from_exact(
        weights: Vec<BigRational>,
        matrices: Vec<Vec<Vec<BigRational>>>,
        dx: usize,
        dy: usize,
        target: &RatPoly,
    ) -> SosCertificate {
        let k = dx * dx.saturating_sub(1) / 2 * dy * dy.saturating_sub(1) / 2;
        let squares = weights
            .iter()
            .zip(&matrices)
            .map(|(w, m)| {
                let s = w.to_f64_lossy().sqrt();
                BilinearSquare {
                    matrix: m.iter().map(|r| r.iter().map(|v| v.to_f64_lossy() * s).collect()).collect(),
                }
            })
            .collect();
        let mut cert = SosCertificate {
            minor_coeffs: vec![0.0; k],
            squares,
            residual: 0.0,
            exact: Some(ExactSquares {
                weights,
                matrices,
                minor_coeffs: vec![BigRational::zero(); k],
            }),
        };
        cert.residual = max_defect(&cert.reconstruct(dx, dy), target);
        cert
    }

    /// Substitute `x = L·x'` (rows of `l` give each old variable in terms of
    /// the new ones): each `M` becomes `Lᵀ M`.
    pub(crate) fn pull_back(&self, l: &[Vec<BigRational>], new_dx: usize, dy: usize) -> SosCertificate {
        let minors = new_dx * new_dx.saturating_sub(1) / 2 * dy * dy.saturating_sub(1) / 2;
        let lf: Vec<Vec<f64>> = l.iter().map(|r| r.iter().map(|v| v.to_f64_lossy()).collect()).collect();
        let map_f = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let dy = m.first().map_or(0, |r| r.len());
            (0..new_dx)
                .map(|a| {
                    (0..dy)
                        .map(|j| (0..m.len()).map(|i| lf[i][a] * m[i][j]).sum())
                        .collect()
                })
                .collect()
        };
        let map_r = |m: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
            let dy = m.first().map_or(0, |r| r.len());
            (0..new_dx)
                .map(|a| {
                    (0..dy)
                        .map(|j| {
                            (0..m.len()).fold(BigRational::zero(), |acc, i| acc + &l[i][a] * &m[i][j])
                        })
                        .collect()
                })
                .collect()
        };
        SosCertificate {
            minor_coeffs: vec![0.0; minors],
            squares: self
                .squares
                .iter()
                .map(|s| BilinearSquare { matrix: map_f(&s.matrix) })
                .collect(),
            residual: self.residual,
            exact: self.exact.as_ref().map(|e| ExactSquares {
                weights: e.weights.clone(),
                matrices: e.matrices.iter().map(map_r).collect(),
                minor_coeffs: vec![BigRational::zero(); minors],
            }),
        }
    }
}

/// Outcome of a bilinear Gram search.
pub(crate) struct BilinearOutcome {
    pub slice: SliceResult,
    pub certificate: Option<SosCertificate>,
}

pub(crate) const CERT_TOL: f64 = 1e-8;

/// Search for `f(x⊗y) = Σ (xᵀ M y)²` with Gram matrix `g0` on the bilinear basis.
pub(crate) fn bilinear_search(
    g0: Vec<Vec<BigRational>>,
    dx: usize,
    dy: usize,
    target: RatPoly,
    tolerance: f64,
    seed: u64,
) -> Result<BilinearOutcome> {
    let search = GramSearch {
        basis: bilinear_basis(dx, dy),
        g0,
        dirs: minor_directions(dx, dy),
        target,
    };
    let scale = search.target.max_abs_coeff();
    let slice = search.solve(tolerance * scale.max(f64::MIN_POSITIVE), seed)?;
    if scale == 0.0 {
        return Ok(BilinearOutcome {
            slice,
            certificate: Some(SosCertificate::empty(dx, dy)),
        });
    }
    if slice.status != SliceStatus::Feasible {
        return Ok(BilinearOutcome { slice, certificate: None });
    }
    let to_matrix = |v: &[f64]| -> Vec<Vec<f64>> { (0..dx).map(|i| v[i * dy..(i + 1) * dy].to_vec()).collect() };
    let mut certificate = None;
    if let Some((cr, ldl)) = search.exact_decomposition(&slice.c_star) {
        let squares: Vec<Vec<f64>> = ldl
            .weights
            .iter()
            .zip(&ldl.forms)
            .map(|(w, l)| {
                let s = w.to_f64_lossy().sqrt();
                l.iter().map(|x| x.to_f64_lossy() * s).collect()
            })
            .collect();
        let residual = max_defect(&search.sum_of_squares_exact(&squares), &search.target);
        let to_rmatrix =
            |v: &[BigRational]| -> Vec<Vec<BigRational>> { (0..dx).map(|i| v[i * dy..(i + 1) * dy].to_vec()).collect() };
        certificate = Some(SosCertificate {
            minor_coeffs: cr.iter().map(|x| x.to_f64_lossy()).collect(),
            squares: squares.iter().map(|v| BilinearSquare { matrix: to_matrix(v) }).collect(),
            residual,
            exact: Some(ExactSquares {
                weights: ldl.weights,
                matrices: ldl.forms.iter().map(|f| to_rmatrix(f)).collect(),
                minor_coeffs: cr,
            }),
        });
    }
    if certificate.as_ref().is_none_or(|c| c.residual > CERT_TOL * scale) {
        let g = search.base_f64();
        let mut full = g.clone();
        for (d, &c) in search.dirs.iter().zip(&slice.c_star) {
            full.axpy(c, &search.direction_f64(d));
        }
        if let Ok(squares) = gram_to_squares(&full, 1e-9 * full.max_abs().max(scale)) {
            let residual = max_defect(&search.sum_of_squares_exact(&squares), &search.target);
            certificate = Some(SosCertificate {
                minor_coeffs: slice.c_star.clone(),
                squares: squares.iter().map(|v| BilinearSquare { matrix: to_matrix(v) }).collect(),
                residual,
                exact: None,
            });
        }
    }
    let certificate = certificate.filter(|c| c.residual <= CERT_TOL * scale);
    Ok(BilinearOutcome { slice, certificate })
}

pub(crate) fn max_defect(a: &RatPoly, b: &RatPoly) -> f64 {
    let d = a - b;
    let m = d
        .terms()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    // round up so the reported bound is never below the true defect
    let f = m.to_f64_lossy();
    if f == 0.0 {
        0.0
    } else {
        f * (1.0 + 1e-15)
    }
}
