//! Quasiconvexity and polyconvexity tests with sum-of-squares certificates.

mod gram;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{monomials_of_degree, HomPoly, Monomial};
use crate::psd::{sym_eigen, SliceStatus, SymMatrix};
use crate::scalar::{rationalize_digits, Scalar};
use crate::sphere::{canonical_sign, descend, normalize, random_unit};
use crate::tensor::{acoustic_tensor, BiquadraticForm, ElastTensor, MatrixRole};
use crate::{FloatPoly, RatPoly};

pub use gram::{BilinearSquare, ExactSquares, SosCertificate};
pub(crate) use gram::{bilinear_gram, bilinear_search, max_defect, CERT_TOL};

/// Knobs shared by the convexity tests.
#[derive(Clone, Copy, Debug)]
pub struct QcOptions {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Relative tolerance on `min f(x⊗y)` over unit `x, y`.
    pub tolerance: f64,
    /// Highest multiplier level tried for the certificate.
    pub max_level: u32,
}

impl Default for QcOptions {
    fn default() -> Self {
        QcOptions {
            starts: 64,
            iterations: 500,
            seed: 0,
            tolerance: 1e-7,
            max_level: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum QcKind {
    CertifiedQuasiconvex { level: u32 },
    NumericQuasiconvex { min_value: f64 },
    NotQuasiconvex {
        x: Vec<f64>,
        y: Vec<f64>,
        value: f64,
        /// `f(x⊗y)` at the rationalized witness, exactly.
        exact_value: String,
    },
    Inconclusive { min_value: f64 },
}

/// Result of one multiplier level of the Gram search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelOutcome {
    pub level: u32,
    pub status: SliceStatus,
    pub t_star: f64,
    pub gram_size: usize,
    pub directions: usize,
    /// An exactly PSD rational Gram matrix was found at this level.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcEvidence {
    pub starts: usize,
    pub min_value: f64,
    pub levels: Vec<LevelOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SosCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcVerdict {
    #[serde(flatten)]
    pub kind: QcKind,
    pub evidence: QcEvidence,
}

impl QcVerdict {
    pub fn is_not_quasiconvex(&self) -> bool {
        matches!(self.kind, QcKind::NotQuasiconvex { .. })
    }
}

fn check_dim(c: &ElastTensor, allowed: &[usize]) -> Result<()> {
    if allowed.contains(&c.dim()) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(c.dim()))
    }
}

struct RankOneSearch {
    t: Vec<Vec<FloatPoly>>,
    s: Vec<Vec<FloatPoly>>,
}

impl RankOneSearch {
    fn new(c: &ElastTensor) -> Self {
        let conv = |m: crate::PolynomialMatrix<BigRational>| -> Vec<Vec<FloatPoly>> {
            m.entries().iter().map(|r| r.iter().map(|p| p.to_f64()).collect()).collect()
        };
        RankOneSearch {
            t: conv(acoustic_tensor(c, MatrixRole::YMatrix)),
            s: conv(acoustic_tensor(c, MatrixRole::XMatrix)),
        }
    }

    fn eval(m: &[Vec<FloatPoly>], v: &[f64]) -> SymMatrix<f64> {
        let n = m.len();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                out.set(i, j, m[i][j].eval_f64(v));
            }
        }
        out
    }

    /// `λ_min(T(y))` and its gradient `2 S(x) y` at the minimizing `x`.
    fn value_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let e = sym_eigen(&Self::eval(&self.t, y));
        let x = e.vector(0);
        let s = Self::eval(&self.s, &x);
        (e.values[0], s.mul_vec(y).iter().map(|v| 2.0 * v).collect())
    }

    /// Alternate exact block minimizations from `y`.
    fn alternate(&self, mut y: Vec<f64>) -> (Vec<f64>, Vec<f64>, f64) {
        let mut x = sym_eigen(&Self::eval(&self.t, &y)).vector(0);
        let mut val = f64::INFINITY;
        for _ in 0..50 {
            let ey = sym_eigen(&Self::eval(&self.s, &x));
            y = ey.vector(0);
            let ex = sym_eigen(&Self::eval(&self.t, &y));
            x = ex.vector(0);
            let v = ex.values[0];
            if v >= val {
                break;
            }
            val = v;
        }
        (x, y, val)
    }
}

/// Rationalize to 12 significant digits.
fn rationalize_vec(v: &[f64]) -> Vec<BigRational> {
    v.iter().map(|&x| rationalize_digits(x, 12)).collect()
}

/// Bidegree `(1 + r, 1 + r)` basis in `(x, y)`.
fn multiplier_basis(d: usize, level: u32) -> Vec<Monomial> {
    let ms = monomials_of_degree(d, 1 + level);
    let mut out = Vec::with_capacity(ms.len() * ms.len());
    for a in &ms {
        for b in &ms {
            let mut e = a.exps().to_vec();
            e.extend_from_slice(b.exps());
            out.push(Monomial::new(e));
        }
    }
    out
}

fn sum_of_squares_form(n: usize, offset: usize, count: usize) -> RatPoly {
    let mut p = HomPoly::zero(n, 2);
    for i in offset..offset + count {
        let mut e = vec![0; n];
        e[i] = 2;
        p.add_term(Monomial::new(e), BigRational::from_integer(1.into()));
    }
    p
}

/// Legendre–Hadamard test: multistart search for a negative value of
/// `f(x⊗y)`, then Gram certificates at multiplier levels `0..=max_level`.
///
/// Level 1 is attempted for `d = 3` only.
pub fn quasiconvexity_test(c: &ElastTensor, opts: QcOptions) -> Result<QcVerdict> {
    check_dim(c, &[2, 3, 4])?;
    let d = c.dim();
    let scale = c.max_abs().max(f64::MIN_POSITIVE);
    let tol = opts.tolerance * scale;
    let search = RankOneSearch::new(c);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..opts.starts {
        let start = random_unit(&mut rng, d);
        let (y, v) = descend(&|y: &[f64]| search.value_grad(y), start, opts.iterations);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((y, v));
        }
    }
    let (y0, _) = best.expect("at least one start");
    let (mut x, mut y, min_value) = search.alternate(y0);
    let mut evidence = QcEvidence {
        starts: opts.starts,
        min_value,
        levels: vec![],
        certificate: None,
    };
    if min_value < -tol {
        canonical_sign(&mut x);
        canonical_sign(&mut y);
        let (xr, yr) = (rationalize_vec(&x), rationalize_vec(&y));
        let exact = c.eval_rank_one(&xr, &yr)?;
        if exact < BigRational::from_integer(0.into()) {
            let xf = normalize(&xr.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>());
            let yf = normalize(&yr.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>());
            let value = c.eval_rank_one(&xf, &yf)?;
            return Ok(QcVerdict {
                kind: QcKind::NotQuasiconvex {
                    x: xf,
                    y: yf,
                    value,
                    exact_value: exact.to_string(),
                },
                evidence,
            });
        }
        return Ok(QcVerdict {
            kind: QcKind::Inconclusive { min_value },
            evidence,
        });
    }

    let target = c.rank_one_form();
    let max_level = if d == 3 { opts.max_level.min(1) } else { 0 };
    for level in 0..=max_level {
        if level == 0 {
            let out = bilinear_search(
                bilinear_gram(&c.biquadratic()),
                d,
                d,
                target.clone(),
                opts.tolerance,
                opts.seed,
            )?;
            evidence.levels.push(LevelOutcome {
                level,
                status: out.slice.status,
                t_star: out.slice.t_star,
                gram_size: d * d,
                directions: out.slice.c_star.len(),
                exact: out.certificate.as_ref().is_some_and(|c| c.exact.is_some()),
            });
            if let Some(cert) = out.certificate {
                evidence.certificate = Some(cert);
                return Ok(QcVerdict {
                    kind: QcKind::CertifiedQuasiconvex { level },
                    evidence,
                });
            }
        } else {
            let mult = &sum_of_squares_form(2 * d, 0, d) * &sum_of_squares_form(2 * d, d, d);
            let mut p = target.clone();
            for _ in 0..level {
                p = &p * &mult;
            }
            let gs = gram::GramSearch::from_target(multiplier_basis(d, level), p)?;
            let tscale = gs.target.max_abs_coeff();
            let slice = gs.solve(opts.tolerance * tscale, opts.seed)?;
            // numeric feasibility alone is not a certificate here
            let exact = slice.status == SliceStatus::Feasible && gs.exact_decomposition(&slice.c_star).is_some();
            evidence.levels.push(LevelOutcome {
                level,
                status: slice.status,
                t_star: slice.t_star,
                gram_size: gs.n(),
                directions: gs.dirs.len(),
                exact,
            });
            if exact {
                return Ok(QcVerdict {
                    kind: QcKind::CertifiedQuasiconvex { level },
                    evidence,
                });
            }
        }
    }
    Ok(QcVerdict {
        kind: QcKind::NumericQuasiconvex { min_value },
        evidence,
    })
}

/// Polyconvexity verdict; `t_star` is the best `λ_min` of the shifted Gram
/// matrix, `normalized_t_star` the same after dividing by the largest entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum PcVerdict {
    Polyconvex { t_star: f64, certificate: SosCertificate },
    NotPolyconvex { t_star: f64, normalized_t_star: f64 },
    Inconclusive { t_star: f64, normalized_t_star: f64 },
}

impl PcVerdict {
    pub fn is_polyconvex(&self) -> bool {
        matches!(self, PcVerdict::Polyconvex { .. })
    }

    pub fn t_star(&self) -> f64 {
        match self {
            PcVerdict::Polyconvex { t_star, .. }
            | PcVerdict::NotPolyconvex { t_star, .. }
            | PcVerdict::Inconclusive { t_star, .. } => *t_star,
        }
    }
}

/// Does some combination of 2×2 minors make the coefficient matrix of `f` PSD?
pub fn polyconvexity_test(c: &ElastTensor) -> Result<PcVerdict> {
    polyconvexity_test_with(c, 1e-7, 0)
}

pub fn polyconvexity_test_with(c: &ElastTensor, tolerance: f64, seed: u64) -> Result<PcVerdict> {
    check_dim(c, &[2, 3, 4])?;
    let d = c.dim();
    let out = bilinear_search(c.coefficient_matrix(), d, d, c.rank_one_form(), tolerance, seed)?;
    let fscale = c
        .coefficient_matrix()
        .iter()
        .flatten()
        .map(|v| v.to_f64_lossy().abs())
        .fold(0.0, f64::max);
    let t_star = out.slice.t_star;
    let normalized_t_star = if fscale > 0.0 { t_star / fscale } else { t_star };
    Ok(match (out.slice.status, out.certificate) {
        (SliceStatus::Feasible, Some(certificate)) => PcVerdict::Polyconvex { t_star, certificate },
        (SliceStatus::Infeasible, _) => PcVerdict::NotPolyconvex {
            t_star,
            normalized_t_star,
        },
        _ => PcVerdict::Inconclusive {
            t_star,
            normalized_t_star,
        },
    })
}

/// Certificate for a polyconvex `f`.
pub fn sos_certificate(c: &ElastTensor) -> Result<SosCertificate> {
    match polyconvexity_test(c)? {
        PcVerdict::Polyconvex { certificate, .. } => Ok(certificate),
        other => Err(Error::CertificateNotFound(format!(
            "no PSD Gram matrix found (t_star = {:e})",
            other.t_star()
        ))),
    }
}

/// Sum of squares `Σ (a_k(y) X1 + b_k(y) X2)²` for a nonnegative biquadratic
/// form in two `X` variables and at most three `y` variables.
pub fn terpstra_sos_2xn(g: &BiquadraticForm<BigRational>) -> Result<SosCertificate> {
    if g.dx() != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2 x-variables, got {}", g.dx())));
    }
    if g.dy() > 3 {
        return Err(Error::UnsupportedDimension(g.dy()));
    }
    let out = bilinear_search(bilinear_gram(g), 2, g.dy(), g.to_poly(), 1e-7, 0)?;
    match (out.slice.status, out.certificate) {
        (SliceStatus::Feasible, Some(c)) => Ok(c),
        (SliceStatus::Infeasible, _) => Err(Error::NotNonnegative(out.slice.t_star)),
        _ => Err(Error::CertificateNotFound(format!(
            "Gram search ended {:?} at t_star = {:e}",
            out.slice.status, out.slice.t_star
        ))),
    }
}
