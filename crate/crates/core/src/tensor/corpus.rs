//! Named example tensors addressable from the command line as `@name`.

use num_rational::BigRational;
use serde::Serialize;

use super::{acoustic_tensor, symbolic_det_cof, ElastTensor, MatrixRole};
use crate::error::{Error, Result};
use crate::poly::HomPoly;
use crate::scalar::rat;
use crate::RatPoly;

/// One-based `(i, j, k, l, coefficient)` of `coefficient·ξ_ij·ξ_kl`.
type Term = (usize, usize, usize, usize, i64);

fn from_terms(d: usize, terms: &[Term]) -> ElastTensor {
    let t: Vec<_> = terms
        .iter()
        .map(|&(i, j, k, l, a)| ((i - 1, j - 1), (k - 1, l - 1), rat(a)))
        .collect();
    ElastTensor::from_quadratic_form(d, &t).expect("corpus indices are in range")
}

/// `ξ11² + ξ22² + ξ33² + ξ12² + ξ23² + ξ31² - 2(ξ11ξ22 + ξ22ξ33 + ξ33ξ11)`
/// on the index triple `(a, b, c)`.
fn choi_lam_terms(a: usize, b: usize, c: usize) -> Vec<Term> {
    vec![
        (a, a, a, a, 1),
        (b, b, b, b, 1),
        (c, c, c, c, 1),
        (a, b, a, b, 1),
        (b, c, b, c, 1),
        (c, a, c, a, 1),
        (a, a, b, b, -2),
        (b, b, c, c, -2),
        (c, c, a, a, -2),
    ]
}

/// Names accepted by [`corpus`], with a one-line description each.
pub fn corpus_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("choi-lam", "Choi-Lam form, d = 3 (accepts choi-lam(d) to embed in d dimensions)"),
        ("diag-convex", "sum of squared diagonal entries, d = 3"),
        ("single-square", "xi11^2, d = 3"),
        ("null-lagrangian", "2x2 minor xi11 xi22 - xi12 xi21 (accepts null-lagrangian(i,j,k,l))"),
        ("remark24", "Choi-Lam plus sum_{k=3..d} xi_kk^2, d = 4 (accepts remark24(d))"),
        ("remark25", "two overlapping Choi-Lam copies, d = 4"),
        ("cl-plus-square44", "Choi-Lam embedded in d = 4 plus xi44^2"),
    ]
}

fn parse_args(name: &str) -> Result<(String, Vec<usize>)> {
    let name = name.trim();
    match name.split_once('(') {
        None => Ok((name.to_string(), vec![])),
        Some((base, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownName(name.to_string()))?;
            let args = inner
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::UnknownName(name.to_string()))?;
            Ok((base.trim().to_string(), args))
        }
    }
}

/// The named tensor.
pub fn corpus(name: &str) -> Result<ElastTensor> {
    let (base, args) = parse_args(name)?;
    let unknown = || Error::UnknownName(name.to_string());
    match (base.as_str(), args.as_slice()) {
        ("choi-lam", []) => Ok(from_terms(3, &choi_lam_terms(1, 2, 3))),
        ("choi-lam", &[d]) if (3..=4).contains(&d) => Ok(from_terms(d, &choi_lam_terms(1, 2, 3))),
        ("diag-convex", []) => Ok(from_terms(3, &[(1, 1, 1, 1, 1), (2, 2, 2, 2, 1), (3, 3, 3, 3, 1)])),
        ("single-square", []) => Ok(from_terms(3, &[(1, 1, 1, 1, 1)])),
        ("null-lagrangian", []) => Ok(from_terms(3, &[(1, 1, 2, 2, 1), (1, 2, 2, 1, -1)])),
        ("null-lagrangian", &[i, j, k, l]) => {
            if [i, j, k, l].iter().any(|&x| x == 0 || x > 3) || i == k || j == l {
                return Err(unknown());
            }
            Ok(from_terms(3, &[(i, j, k, l, 1), (i, l, k, j, -1)]))
        }
        ("remark24", []) => Ok(remark24(4)),
        ("remark24", &[d]) if (3..=4).contains(&d) => Ok(remark24(d)),
        ("remark25", []) => {
            let mut t = choi_lam_terms(1, 2, 3);
            t.extend(choi_lam_terms(2, 3, 4));
            Ok(from_terms(4, &t))
        }
        ("cl-plus-square44", []) => {
            let mut t = choi_lam_terms(1, 2, 3);
            t.push((4, 4, 4, 4, 1));
            Ok(from_terms(4, &t))
        }
        _ => Err(unknown()),
    }
}

fn remark24(d: usize) -> ElastTensor {
    remark24_from(d, 3)
}

/// Choi-Lam plus `Σ_{k=first..d} ξ_kk²`.
fn remark24_from(d: usize, first: usize) -> ElastTensor {
    let mut t = choi_lam_terms(1, 2, 3);
    for k in first..=d {
        t.push((k, k, k, k, 1));
    }
    from_terms(d, &t)
}

/// The sextic `y1⁴y2² + y2⁴y3² + y3⁴y1² - 3y1²y2²y3²` in `nvars` variables.
///
/// This is the determinant of the Choi-Lam x-matrix; the y-matrix determinant
/// is the same sextic with `y1` and `y2` exchanged, see [`choi_lam_y_det`].
pub fn choi_lam_det(nvars: usize) -> RatPoly {
    let mono = |e: [u32; 3]| {
        let mut v = vec![0; nvars];
        v[..3].copy_from_slice(&e);
        v
    };
    HomPoly::from_terms(
        nvars,
        6,
        vec![
            (mono([4, 2, 0]), rat(1)),
            (mono([0, 4, 2]), rat(1)),
            (mono([2, 0, 4]), rat(1)),
            (mono([2, 2, 2]), rat(-3)),
        ],
    )
    .expect("valid sextic")
}

/// `y1²y2⁴ + y2²y3⁴ + y3²y1⁴ - 3y1²y2²y3²`, the determinant of the Choi-Lam y-matrix.
pub fn choi_lam_y_det(nvars: usize) -> RatPoly {
    let mut map: Vec<usize> = (0..nvars).collect();
    map.swap(0, 1);
    choi_lam_det(nvars).embed(nvars, &map)
}

/// Determinants for the displayed `d = 4` counterexample and its alternative reading.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Remark24Report {
    pub d: usize,
    /// Determinant of the form exactly as displayed (sum from `k = 3`).
    pub displayed_det: RatPoly,
    /// `(Choi-Lam y-matrix det)·∏_{k=3..d} y_k²`.
    pub product_formula: RatPoly,
    pub displayed_matches_product: bool,
    /// Determinant when the added squares start at `k = 4`.
    pub shifted_det: RatPoly,
    /// `(Choi-Lam y-matrix det)·∏_{k=4..d} y_k²`.
    pub shifted_product: RatPoly,
    pub shifted_matches_shifted_product: bool,
}

fn det_of(t: &ElastTensor) -> RatPoly {
    let m = acoustic_tensor(t, MatrixRole::YMatrix);
    symbolic_det_cof(&m).expect("d <= 4").0
}

fn product_from(d: usize, first: usize) -> RatPoly {
    let mut p = choi_lam_y_det(d);
    for k in first..=d {
        p = &p * &HomPoly::<BigRational>::var(d, k - 1).square();
    }
    p
}

/// Exact comparison of the displayed determinant formula against the
/// determinant of the displayed form, for `d ∈ {3, 4}`.
pub fn remark24_report(d: usize) -> Result<Remark24Report> {
    if !(3..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let displayed_det = det_of(&remark24_from(d, 3));
    let product_formula = product_from(d, 3);
    let shifted_det = det_of(&remark24_from(d, 4));
    let shifted_product = product_from(d, 4);
    Ok(Remark24Report {
        d,
        displayed_matches_product: displayed_det == product_formula,
        shifted_matches_shifted_product: shifted_det == shifted_product,
        displayed_det,
        product_formula,
        shifted_det,
        shifted_product,
    })
}
