//! Algebraic structure of degenerate acoustic matrices: rank-one factorization,
//! row dependencies, proportional quadratic forms and the two special shapes
//! of a matrix whose last cofactor row vanishes.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convexity::SosCertificate;
use crate::error::{Error, Result};
use crate::poly::{gcd, perfect_square_test, quad_classify, HomPoly, ShapeVerdict, SquareRoot};
use crate::psd::sym_eigen;
use crate::scalar::{rationalize_digits, Scalar};
use crate::sphere::{norm, random_unit};
use crate::tensor::{symbolic_det_cof, BiquadraticForm};
use crate::{QuadForm, RatPoly, RatPolyMatrix, SymMatrix};

/// `a_ij = b_i·c_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rank1Factorization {
    pub b: Vec<RatPoly>,
    pub c: Vec<RatPoly>,
    pub verified: bool,
}

impl Rank1Factorization {
    pub fn entry(&self, i: usize, j: usize) -> RatPoly {
        &self.b[i] * &self.c[j]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Rank1Outcome {
    Factored(Rank1Factorization),
    /// A 2×2 minor (rows, cols) that is not the zero polynomial.
    RankExceeded { rows: [usize; 2], cols: [usize; 2], minor: RatPoly },
}

fn first_nonzero(v: &[RatPoly]) -> Option<usize> {
    v.iter().position(|p| !p.is_zero())
}

fn leading_negative(p: &RatPoly) -> bool {
    p.leading_term().is_some_and(|(_, c)| c.is_negative())
}

/// Factor a matrix whose 2×2 minors all vanish identically.
pub fn rank1_factor_polymatrix(a: &RatPolyMatrix) -> Rank1Outcome {
    let (m, n) = (a.rows(), a.cols());
    for i in 0..m {
        for k in i + 1..m {
            for j in 0..n {
                for l in j + 1..n {
                    let minor = &(a.get(i, j) * a.get(k, l)) - &(a.get(i, l) * a.get(k, j));
                    if !minor.is_zero() {
                        return Rank1Outcome::RankExceeded {
                            rows: [i, k],
                            cols: [j, l],
                            minor,
                        };
                    }
                }
            }
        }
    }
    let nv = a.nvars();
    let Some(pivot) = (0..m).find(|&i| first_nonzero(a.row(i)).is_some()) else {
        let zero = HomPoly::zero(nv, 0);
        return Rank1Outcome::Factored(Rank1Factorization {
            b: vec![zero.clone(); m],
            c: vec![HomPoly::constant(nv, BigRational::zero()); n],
            verified: true,
        });
    };
    // c = pivot row divided by its content; rows are then polynomial multiples of c
    let row = a.row(pivot);
    let content = row.iter().skip(1).fold(row[0].clone(), |g, p| gcd(&g, p));
    let mut c: Vec<RatPoly> = row.iter().map(|p| p.exact_div(&content).expect("content divides")).collect();
    let jc = first_nonzero(&c).expect("nonzero pivot row");
    let mut b: Vec<RatPoly> = (0..m)
        .map(|i| a.get(i, jc).exact_div(&c[jc]).expect("rank one rows are multiples"))
        .collect();

    // symmetric input: b = p·c, balance p = ±s² between the two sides
    if a.is_symmetric() {
        let p = b[jc].exact_div(&c[jc]);
        if let Some(p) = p.filter(|p| !p.is_zero()) {
            let neg = leading_negative(&p);
            let mag = if neg { -&p } else { p };
            if let Some(SquareRoot::Exact { root }) = perfect_square_test(&mag) {
                let mut s = root;
                if leading_negative(&s) {
                    s = -&s;
                }
                let sc: Vec<RatPoly> = c.iter().map(|ci| &s * ci).collect();
                b = if neg { sc.iter().map(|v| -v).collect() } else { sc.clone() };
                c = sc;
            }
        }
    }
    if let Some(i0) = first_nonzero(&b) {
        if leading_negative(&b[i0]) {
            b = b.iter().map(|v| -v).collect();
            c = c.iter().map(|v| -v).collect();
        }
    }
    let verified = (0..m).all(|i| (0..n).all(|j| &b[i] * &c[j] == *a.get(i, j)));
    Rank1Outcome::Factored(Rank1Factorization { b, c, verified })
}

/// `pivot row = r·(first other row) + q·(second other row)` with
/// `r = r_num/r_den`, `q = q_num/q_den` reduced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalFunctionPair {
    pub pivot: usize,
    /// The two other row indices, in increasing order.
    pub others: [usize; 2],
    pub r_num: RatPoly,
    pub r_den: RatPoly,
    pub q_num: RatPoly,
    pub q_den: RatPoly,
}

impl RationalFunctionPair {
    /// Exact cross-multiplied identity on the rows of `s`.
    pub fn verify(&self, s: &RatPolyMatrix) -> bool {
        let [a, b] = self.others;
        let da = &self.r_den * &self.q_den;
        (0..s.cols()).all(|j| {
            let lhs = &da * s.get(self.pivot, j);
            let rhs = &(&(&self.r_num * &self.q_den) * s.get(a, j)) + &(&(&self.q_num * &self.r_den) * s.get(b, j));
            lhs == rhs
        })
    }

    /// Constant values of `r` and `q`, when both denominators and numerators are constants.
    pub fn constants(&self) -> Option<(BigRational, BigRational)> {
        let k = |p: &RatPoly| -> Option<BigRational> {
            match p.degree() {
                0 => Some(p.coeff_of(&vec![0; p.nvars()])),
                _ if p.is_zero() => Some(BigRational::zero()),
                _ => None,
            }
        };
        Some((k(&self.r_num)? / k(&self.r_den)?, k(&self.q_num)? / k(&self.q_den)?))
    }
}

/// `num/den` in lowest terms with monic leading denominator coefficient.
fn reduce(num: &RatPoly, den: &RatPoly) -> (RatPoly, RatPoly) {
    let nv = den.nvars();
    if num.is_zero() {
        return (HomPoly::zero(nv, 0), HomPoly::constant(nv, BigRational::one()));
    }
    let g = gcd(num, den);
    let (n, d) = (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"));
    let lead = d.leading_term().map(|(_, c)| c.clone()).expect("nonzero denominator");
    let inv = BigRational::one() / lead;
    (n.scale(&inv), d.scale(&inv))
}

/// Coefficients expressing row `pivot` of a singular 3×3 matrix through the
/// other two, read off the `pivot` column of the cofactor matrix.
pub fn row_combination_coeffs(s: &RatPolyMatrix, pivot: usize) -> Result<RationalFunctionPair> {
    if s.rows() != 3 || s.cols() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3×3, got {}×{}", s.rows(), s.cols())));
    }
    if pivot > 2 {
        return Err(Error::IndexOutOfRange(format!("pivot {pivot}")));
    }
    let (det, cof) = symbolic_det_cof(s)?;
    if !det.is_zero() {
        return Err(Error::NonzeroDeterminant);
    }
    let cpp = cof.get(pivot, pivot);
    if cpp.is_zero() {
        return Err(Error::DegenerateCofactor);
    }
    let others: Vec<usize> = (0..3).filter(|&k| k != pivot).collect();
    let (a, b) = (others[0], others[1]);
    // cofᵀ·S = det·I = 0, so Σ_k cof_{k,p}·row_k = 0
    let (r_num, r_den) = reduce(&-cof.get(a, pivot), cpp);
    let (q_num, q_den) = reduce(&-cof.get(b, pivot), cpp);
    let pair = RationalFunctionPair {
        pivot,
        others: [a, b],
        r_num,
        r_den,
        q_num,
        q_den,
    };
    if !pair.verify(s) {
        return Err(Error::PreconditionViolated("row identity failed to verify".into()));
    }
    Ok(pair)
}

fn exact_coeffs<S: Scalar>(p: &HomPoly<S>) -> Option<RatPoly> {
    let mut out = HomPoly::zero(p.nvars(), p.degree());
    for (m, c) in p.terms() {
        out.add_term(m.clone(), c.to_rational()?);
    }
    Some(out)
}

fn gram_f64<S: Scalar>(q: &QuadForm<S>) -> SymMatrix<f64> {
    let n = q.nvars();
    let mut g = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            g.set(i, j, q.gram[i][j].to_f64_lossy());
        }
    }
    g
}

pub const RATIO_SAMPLES: usize = 50;

/// Points on the zero cone of an indefinite form, from its eigenbasis.
fn sample_zero_cone(g: &SymMatrix<f64>, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let eig = sym_eigen(g);
    let n = eig.values.len();
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = 1e-12 * scale;
    let pos: Vec<usize> = (0..n).filter(|&k| eig.values[k] > thr).collect();
    let neg: Vec<usize> = (0..n).filter(|&k| eig.values[k] < -thr).collect();
    let free: Vec<usize> = (0..n).filter(|&k| eig.values[k].abs() <= thr).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = random_unit(&mut rng, n);
            let mut coef = vec![0.0; n];
            let sp: f64 = pos.iter().map(|&k| eig.values[k] * u[k] * u[k]).sum();
            let sn: f64 = neg.iter().map(|&k| -eig.values[k] * u[k] * u[k]).sum();
            let t = (sp / sn).sqrt();
            for &k in &pos {
                coef[k] = u[k];
            }
            for &k in &neg {
                coef[k] = u[k] * t;
            }
            for &k in &free {
                coef[k] = u[k];
            }
            let y: Vec<f64> = (0..n).map(|i| (0..n).map(|k| coef[k] * eig.vector(k)[i]).sum()).collect();
            let ny = norm(&y);
            y.iter().map(|v| v / ny).collect()
        })
        .collect()
}

/// `λ` with `q1 = λ·q2`, provided `q1` vanishes on the zero cone of the
/// indefinite `q2`; `None` when it does not.
pub fn marcellini_ratio<S: Scalar>(q1: &QuadForm<S>, q2: &QuadForm<S>) -> Result<Option<BigRational>> {
    if q1.nvars() != q2.nvars() {
        return Err(Error::DimensionMismatch(format!("{} vs {} variables", q1.nvars(), q2.nvars())));
    }
    if !matches!(
        quad_classify(q2),
        ShapeVerdict::ProductOfTwoLinears { .. }
            | ShapeVerdict::ProductOfTwoLinearsApprox { .. }
            | ShapeVerdict::IrreducibleIndefinite
    ) {
        return Err(Error::NotIndefinite);
    }
    let p1 = q1.poly.to_f64();
    let scale = p1.max_abs_coeff();
    let samples = sample_zero_cone(&gram_f64(q2), RATIO_SAMPLES, 0);
    if samples.iter().any(|y| p1.eval_f64(y).abs() > 1e-10 * scale) {
        return Ok(None);
    }
    let v1 = q1.poly.coeff_vector();
    let v2 = q2.poly.coeff_vector();
    let lambda = crate::sphere::dot(&v1, &v2) / crate::sphere::dot(&v2, &v2);
    let lam = rationalize_digits(lambda, 12);
    let (Some(e1), Some(e2)) = (exact_coeffs(&q1.poly), exact_coeffs(&q2.poly)) else {
        return Ok(None);
    };
    Ok((&e1 - &e2.scale(&lam)).is_zero().then_some(lam))
}

/// Points near a zero of an indefinite form where it is negative and positive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignWitnesses {
    pub negative: Vec<f64>,
    pub positive: Vec<f64>,
}

/// Walk from `z0` along the extreme eigenvectors of the Gram matrix, halving
/// the step until the exact value has the wanted sign.
pub fn lemma44_sign_witnesses<S: Scalar>(q: &QuadForm<S>, z0: &[f64], radius: f64) -> Result<SignWitnesses> {
    if !q.is_indefinite() {
        return Err(Error::NotIndefinite);
    }
    if z0.len() != q.nvars() {
        return Err(Error::DimensionMismatch(format!("point of length {} for {} variables", z0.len(), q.nvars())));
    }
    let pf = q.poly.to_f64();
    let v0 = pf.eval_f64(z0);
    let zn = norm(z0);
    if v0.abs() > 1e-10 * pf.max_abs_coeff() * zn * zn {
        return Err(Error::NotAZero(v0));
    }
    let exact = exact_coeffs(&q.poly).ok_or(Error::ModeError)?;
    let value = |p: &[f64]| -> BigRational {
        let r: Vec<BigRational> = p.iter().map(|&v| BigRational::from_f64_lossy(v)).collect();
        exact.eval(&r)
    };
    let eig = sym_eigen(&gram_f64(q));
    let n = eig.values.len();
    let find = |v: Vec<f64>, want_pos: bool| -> Option<Vec<f64>> {
        let mut t = radius;
        for _ in 0..60 {
            for sign in [1.0, -1.0] {
                let p: Vec<f64> = z0.iter().zip(&v).map(|(z, d)| z + sign * t * d).collect();
                let val = value(&p);
                if (want_pos && val.is_positive()) || (!want_pos && val.is_negative()) {
                    return Some(p);
                }
            }
            t *= 0.5;
        }
        None
    };
    let negative = find(eig.vector(0), false);
    let positive = find(eig.vector(n - 1), true);
    match (negative, positive) {
        (Some(negative), Some(positive)) => Ok(SignWitnesses { negative, positive }),
        _ => Err(Error::NotAZero(v0)),
    }
}

/// Shapes of a singular 3×3 acoustic matrix whose third cofactor row vanishes.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum StructuredForm {
    /// Top-left 2×2 block and third column are `P·(1, α, β)ᵀ(1, α, β)`
    /// except the corner `Q`; `remainder = Q - β²P`.
    Proportional {
        p: RatPoly,
        #[serde(serialize_with = "crate::poly::json::ser_scalar")]
        alpha: BigRational,
        #[serde(serialize_with = "crate::poly::json::ser_scalar")]
        beta: BigRational,
        q: RatPoly,
        remainder: RatPoly,
    },
    /// Entries `l_i·l_j` except the corner `Q`; `remainder = Q - l3²`.
    LinearOuter {
        l1: RatPoly,
        l2: RatPoly,
        l3: RatPoly,
        q: RatPoly,
        remainder: RatPoly,
    },
    NotStructured,
}

fn constant_ratio(num: &RatPoly, den: &RatPoly) -> Option<BigRational> {
    if num.is_zero() {
        return Some(BigRational::zero());
    }
    let (m, c) = den.leading_term()?;
    let r = num.coeff(m) / c;
    (*num == den.scale(&r)).then_some(r)
}

/// Match `t` against the two degenerate shapes.
pub fn structured_form_detect(t: &RatPolyMatrix) -> Result<StructuredForm> {
    if t.rows() != 3 || t.cols() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3×3, got {}×{}", t.rows(), t.cols())));
    }
    let (det, cof) = symbolic_det_cof(t)?;
    if !det.is_zero() || (0..3).any(|j| !cof.get(2, j).is_zero()) {
        return Err(Error::PreconditionViolated(
            "needs a vanishing determinant and a vanishing third cofactor row".into(),
        ));
    }
    if !t.is_symmetric() {
        return Ok(StructuredForm::NotStructured);
    }
    let p = t.get(0, 0);
    if p.is_zero() {
        return Ok(StructuredForm::NotStructured);
    }
    let q = t.get(2, 2).clone();
    if let Some(SquareRoot::Exact { root: l1 }) = perfect_square_test(p) {
        let l2 = t.get(0, 1).exact_div(&l1);
        let l3 = t.get(0, 2).exact_div(&l1);
        if let (Some(l2), Some(l3)) = (l2, l3) {
            if l2.square() == *t.get(1, 1) && &l2 * &l3 == *t.get(1, 2) {
                let remainder = &q - &l3.square();
                return Ok(StructuredForm::LinearOuter { l1, l2, l3, q, remainder });
            }
        }
    }
    let (Some(alpha), Some(beta)) = (constant_ratio(t.get(0, 1), p), constant_ratio(t.get(0, 2), p)) else {
        return Ok(StructuredForm::NotStructured);
    };
    if *t.get(1, 1) != p.scale(&(&alpha * &alpha)) || *t.get(1, 2) != p.scale(&(&alpha * &beta)) {
        return Ok(StructuredForm::NotStructured);
    }
    let remainder = &q - &p.scale(&(&beta * &beta));
    Ok(StructuredForm::Proportional {
        p: p.clone(),
        alpha,
        beta,
        q,
        remainder,
    })
}

fn nonneg_squares(p: &RatPoly) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let qf = QuadForm::new(p.clone()).ok()?;
    if !qf.is_psd() {
        return None;
    }
    let ws = qf.weighted_squares();
    Some((ws.weights, ws.forms.iter().map(|f| f.coeffs.clone()).collect()))
}

fn outer(x: &[BigRational], y: &[BigRational]) -> Vec<Vec<BigRational>> {
    x.iter().map(|a| y.iter().map(|b| a * b).collect()).collect()
}

impl StructuredForm {
    /// Sum of bilinear squares for `f(x⊗y) = xᵀ T(y) x` in the detected shape,
    /// when the quadratic pieces involved are nonnegative.
    pub fn certificate(&self, t: &RatPolyMatrix) -> Option<SosCertificate> {
        let dy = t.nvars();
        let target = BiquadraticForm::from_matrix(t.clone()).ok()?.to_poly();
        let zero = BigRational::zero();
        let one = BigRational::one();
        let e3 = [zero.clone(), zero.clone(), one.clone()];
        let (mut weights, mut mats) = (Vec::new(), Vec::new());
        let remainder = match self {
            StructuredForm::Proportional {
                p, alpha, beta, remainder, ..
            } => {
                let xv = [one.clone(), alpha.clone(), beta.clone()];
                let (w, forms) = nonneg_squares(p)?;
                for (w, l) in w.into_iter().zip(forms) {
                    weights.push(w);
                    mats.push(outer(&xv, &l));
                }
                remainder
            }
            StructuredForm::LinearOuter { l1, l2, l3, remainder, .. } => {
                let lin = |l: &RatPoly| -> Vec<BigRational> {
                    (0..dy).map(|j| l.coeff(&crate::Monomial::var(dy, j))).collect()
                };
                weights.push(one.clone());
                mats.push(vec![lin(l1), lin(l2), lin(l3)]);
                remainder
            }
            StructuredForm::NotStructured => return None,
        };
        if !remainder.is_zero() {
            let (w, forms) = nonneg_squares(remainder)?;
            for (w, l) in w.into_iter().zip(forms) {
                weights.push(w);
                mats.push(outer(&e3, &l));
            }
        }
        let cert = SosCertificate::from_exact(weights, mats, 3, dy, &target);
        (cert.reconstruct_exact(3, dy)? == target).then_some(cert)
    }
}
