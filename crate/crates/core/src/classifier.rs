//! Decision pipeline for 3×3 quasiconvex forms: extreme ray, polyconvex or
//! undecided, driven by the determinant of the acoustic tensor.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::convexity::{
    max_defect, polyconvexity_test_with, quasiconvexity_test, sos_certificate, terpstra_sos_2xn, PcVerdict,
    QcKind, QcOptions, QcVerdict, SosCertificate, CERT_TOL,
};
use crate::error::{Error, Result};
use crate::extremality::{extremality_test, ExtremalKind, ExtremalityEvidence, ExtremalityOptions};
use crate::poly::{gcd, perfect_square_test, SquareRoot};
use crate::psd::det_dense;
use crate::sphere::random_unit;
use crate::structure::{row_combination_coeffs, structured_form_detect, StructuredForm};
use crate::tensor::json::tensor_to_json;
use crate::tensor::{acoustic_tensor, symbolic_det_cof, BiquadraticForm, MatrixRole};
use crate::{ElastTensor, FloatPoly, HomPoly, Monomial, PolynomialMatrix, RatPoly, RatPolyMatrix};

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub seed: u64,
    /// Relative tolerance shared by the semidefinite searches.
    pub tolerance: f64,
    pub qc: QcOptions,
    pub extremality: ExtremalityOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            seed: 0,
            tolerance: 1e-7,
            qc: QcOptions::default(),
            extremality: ExtremalityOptions::default(),
        }
    }
}

impl ClassifyOptions {
    pub fn with_seed(seed: u64) -> Self {
        let mut o = ClassifyOptions {
            seed,
            ..Default::default()
        };
        o.qc.seed = seed;
        o.extremality.seed = seed;
        o
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum DetKind {
    IdenticallyZero,
    PerfectSquare { root: SquareRoot<BigRational> },
    ExtremalNonSquare { kernel_dim: usize },
    NotExtremal { witness: FloatPoly, scale: f64 },
    Unknown { kernel_dim: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetStatus {
    #[serde(flatten)]
    pub kind: DetKind,
    pub det: RatPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ExtremeRay,
    Polyconvex,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InconclusiveReason {
    /// A zero determinant without a certificate; this contradicts the theory.
    InternalInconsistency,
    SolverStalled,
    /// Non-extremal determinant: no classification is claimed.
    TheoremSilent,
    ExtremalityUndecided,
    QuasiconvexityUndecided,
}

/// Construction that produced a zero-determinant certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SosRoute {
    /// A vanishing diagonal entry reduces to two `x` variables.
    ZeroDiagonal,
    /// The proportional or linear-outer shape of a vanishing cofactor row.
    StructuredForm,
    /// A row is a constant combination of the other two.
    ConstantRowCombination,
    /// A row is a combination with non-constant rational coefficients.
    RationalRowCombination,
    /// Gram search over the full bilinear basis.
    Semidefinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroDetCertificate {
    pub route: SosRoute,
    pub certificate: SosCertificate,
}

/// Which branch of the pipeline decided the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    ZeroDeterminant,
    PerfectSquare,
    Extremality,
    QuasiconvexityGate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationEvidence {
    pub branch: Branch,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sos_route: Option<SosRoute>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polyconvexity_t_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremality: Option<ExtremalityEvidence>,
    /// Largest `|det T(y) - det(polynomial)(y)|` over random unit `y`, relative.
    pub det_probe_defect: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// SHA-256 of the canonical tensor JSON.
    pub input_digest: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<InconclusiveReason>,
    pub det_status: DetStatus,
    pub quasiconvexity: QcVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SosCertificate>,
    pub evidence: ClassificationEvidence,
}

pub fn input_digest(c: &ElastTensor) -> String {
    let canon = tensor_to_json(c).to_string();
    hex::encode(Sha256::digest(canon.as_bytes()))
}

pub const DET_PROBES: usize = 50;

/// Compare the symbolic determinant with dense determinants at random points.
pub fn det_probe_defect(t: &RatPolyMatrix, det: &RatPoly, seed: u64) -> f64 {
    let tf = t.to_f64();
    let df = det.to_f64();
    let scale = df.max_abs_coeff().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DET_PROBES)
        .map(|_| {
            let y = random_unit(&mut rng, t.nvars());
            let m = tf.eval_f64(&y);
            (det_dense(&m) - df.eval_f64(&y)).abs() / scale
        })
        .fold(0.0, f64::max)
}

fn residual_ok(cert: &SosCertificate, target: &RatPoly) -> bool {
    cert.residual <= CERT_TOL * target.max_abs_coeff().max(f64::MIN_POSITIVE)
}

/// Selection matrix: new variable `a` is old variable `keep[a]`.
fn selection(keep: &[usize], n: usize) -> Vec<Vec<BigRational>> {
    keep.iter()
        .map(|&k| (0..n).map(|i| if i == k { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

fn sub2(t: &RatPolyMatrix, idx: [usize; 2]) -> Result<BiquadraticForm<BigRational>> {
    BiquadraticForm::from_matrix(t.submatrix(&idx, &idx))
}

fn route_zero_diagonal(t: &RatPolyMatrix, target: &RatPoly) -> Option<SosCertificate> {
    let n = t.n();
    let k = (0..n).find(|&k| t.get(k, k).is_zero())?;
    if t.row(k).iter().any(|p| !p.is_zero()) {
        return None;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let g = sub2(t, [keep[0], keep[1]]).ok()?;
    let cert = terpstra_sos_2xn(&g).ok()?;
    let mut out = cert.pull_back(&selection(&keep, n), n, n);
    out.residual = max_defect(&out.reconstruct(n, t.nvars()), target);
    Some(out)
}

fn permuted(t: &RatPolyMatrix, perm: &[usize]) -> RatPolyMatrix {
    PolynomialMatrix::new(
        perm.iter()
            .map(|&i| perm.iter().map(|&j| t.get(i, j).clone()).collect())
            .collect(),
    )
    .expect("same shape")
}

fn route_structured(t: &RatPolyMatrix, cof: &RatPolyMatrix, target: &RatPoly) -> Option<SosCertificate> {
    for k in (0..3).rev() {
        if (0..3).any(|j| !cof.get(k, j).is_zero()) {
            continue;
        }
        // move row k last
        let mut perm: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        perm.push(k);
        let tp = permuted(t, &perm);
        let Ok(form) = structured_form_detect(&tp) else { continue };
        if form == StructuredForm::NotStructured {
            continue;
        }
        if let Some(cert) = form.certificate(&tp) {
            let mut out = cert.pull_back(&selection(&perm, 3), 3, 3);
            out.residual = max_defect(&out.reconstruct(3, t.nvars()), target);
            return Some(out);
        }
    }
    None
}

fn linear_coeffs(l: &[BigRational], dy: usize) -> RatPoly {
    let mut p = HomPoly::zero(dy, 1);
    for (j, c) in l.iter().enumerate() {
        p.add_term(Monomial::var(dy, j), c.clone());
    }
    p
}

fn linear_row(p: &RatPoly, dy: usize) -> Vec<BigRational> {
    (0..dy).map(|j| p.coeff(&Monomial::var(dy, j))).collect()
}

/// Terpstra squares of the two-row block, then the pivot column from
/// `h_k = (a_k·c_i + b_k·c_j)/D`.
fn route_row_combination(t: &RatPolyMatrix, target: &RatPoly) -> Option<(SosRoute, SosCertificate)> {
    let dy = t.nvars();
    for pivot in (0..3).rev() {
        let Ok(pair) = row_combination_coeffs(t, pivot) else { continue };
        let [i, j] = pair.others;
        // common denominator D with r = ci/D, q = cj/D
        let g = gcd(&pair.r_den, &pair.q_den);
        let den = &pair.r_den * &pair.q_den.exact_div(&g)?;
        let ci = &pair.r_num * &den.exact_div(&pair.r_den)?;
        let cj = &pair.q_num * &den.exact_div(&pair.q_den)?;
        let route = if den.degree() == 0 {
            SosRoute::ConstantRowCombination
        } else {
            SosRoute::RationalRowCombination
        };
        let block = sub2(t, [i, j]).ok()?;
        let Ok(cert) = terpstra_sos_2xn(&block) else { continue };
        let Some(ex) = cert.exact.as_ref() else { continue };
        let mut mats = Vec::with_capacity(ex.matrices.len());
        let mut ok = true;
        for m in &ex.matrices {
            let a = linear_coeffs(&m[0], dy);
            let b = linear_coeffs(&m[1], dy);
            let num = &(&a * &ci) + &(&b * &cj);
            let Some(h) = num.exact_div(&den) else {
                ok = false;
                break;
            };
            let mut full = vec![vec![BigRational::zero(); dy]; 3];
            full[i] = m[0].clone();
            full[j] = m[1].clone();
            full[pivot] = if h.is_zero() { vec![BigRational::zero(); dy] } else { linear_row(&h, dy) };
            mats.push(full);
        }
        if !ok {
            continue;
        }
        let out = SosCertificate::from_exact(ex.weights.clone(), mats, 3, dy, target);
        if residual_ok(&out, target) {
            return Some((route, out));
        }
    }
    None
}

/// Certificate for a quasiconvex 3×3 form whose acoustic determinant vanishes
/// identically, trying the explicit constructions before the Gram search.
pub fn zero_det_sos(c: &ElastTensor) -> Result<ZeroDetCertificate> {
    if c.dim() != 3 {
        return Err(Error::UnsupportedDimension(c.dim()));
    }
    let t = acoustic_tensor(c, MatrixRole::YMatrix);
    let (det, cof) = symbolic_det_cof(&t)?;
    if !det.is_zero() {
        return Err(Error::NonzeroDeterminant);
    }
    let target = c.rank_one_form();
    if target.is_zero() {
        return Ok(ZeroDetCertificate {
            route: SosRoute::ZeroDiagonal,
            certificate: SosCertificate::empty(3, 3),
        });
    }
    let accept = |route, cert: SosCertificate| residual_ok(&cert, &target).then_some(ZeroDetCertificate { route, certificate: cert });
    if let Some(z) = route_zero_diagonal(&t, &target).and_then(|cert| accept(SosRoute::ZeroDiagonal, cert)) {
        return Ok(z);
    }
    if let Some(z) = route_structured(&t, &cof, &target).and_then(|cert| accept(SosRoute::StructuredForm, cert)) {
        return Ok(z);
    }
    if let Some((route, cert)) = route_row_combination(&t, &target) {
        return Ok(ZeroDetCertificate { route, certificate: cert });
    }
    let cert = sos_certificate(c)?;
    accept(SosRoute::Semidefinite, cert)
        .ok_or_else(|| Error::CertificateNotFound("residual above tolerance on every route".into()))
}

/// Classify a 3×3 form that passes the quasiconvexity gate.
pub fn classify(c: &ElastTensor, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if c.dim() != 3 {
        return Err(Error::UnsupportedDimension(c.dim()));
    }
    let quasiconvexity = quasiconvexity_test(c, opts.qc)?;
    if let QcKind::NotQuasiconvex { x, y, exact_value, .. } = &quasiconvexity.kind {
        return Err(Error::NotInCone {
            x: x.clone(),
            y: y.clone(),
            value: exact_value.clone(),
        });
    }
    let t = acoustic_tensor(c, MatrixRole::YMatrix);
    let (det, _) = symbolic_det_cof(&t)?;
    let mut evidence = ClassificationEvidence {
        branch: Branch::QuasiconvexityGate,
        sos_route: None,
        polyconvexity_t_star: None,
        extremality: None,
        det_probe_defect: det_probe_defect(&t, &det, opts.seed),
        seed: opts.seed,
    };
    let report = |verdict, reason, kind, certificate, evidence| ClassificationReport {
        input_digest: input_digest(c),
        verdict,
        reason,
        det_status: DetStatus { kind, det: det.clone() },
        quasiconvexity: quasiconvexity.clone(),
        certificate,
        evidence,
    };
    if matches!(quasiconvexity.kind, QcKind::Inconclusive { .. }) {
        return Ok(report(
            Verdict::Inconclusive,
            Some(InconclusiveReason::QuasiconvexityUndecided),
            DetKind::Unknown { kernel_dim: None },
            None,
            evidence,
        ));
    }

    if det.is_zero() {
        evidence.branch = Branch::ZeroDeterminant;
        return Ok(match zero_det_sos(c) {
            Ok(z) => {
                evidence.sos_route = Some(z.route);
                report(Verdict::Polyconvex, None, DetKind::IdenticallyZero, Some(z.certificate), evidence)
            }
            Err(_) => report(
                Verdict::Inconclusive,
                Some(InconclusiveReason::InternalInconsistency),
                DetKind::IdenticallyZero,
                None,
                evidence,
            ),
        });
    }

    if let Some(root) = perfect_square_test(&det) {
        evidence.branch = Branch::PerfectSquare;
        let pc = polyconvexity_test_with(c, opts.tolerance, opts.seed)?;
        evidence.polyconvexity_t_star = Some(pc.t_star());
        let kind = DetKind::PerfectSquare { root };
        return Ok(match pc {
            PcVerdict::Polyconvex { certificate, .. } => {
                report(Verdict::Polyconvex, None, kind, Some(certificate), evidence)
            }
            PcVerdict::NotPolyconvex { .. } => report(Verdict::ExtremeRay, None, kind, None, evidence),
            PcVerdict::Inconclusive { .. } => report(
                Verdict::Inconclusive,
                Some(InconclusiveReason::SolverStalled),
                kind,
                None,
                evidence,
            ),
        });
    }

    evidence.branch = Branch::Extremality;
    let ext = match extremality_test(&det, &opts.extremality) {
        Ok(v) => v,
        Err(_) => {
            return Ok(report(
                Verdict::Inconclusive,
                Some(InconclusiveReason::ExtremalityUndecided),
                DetKind::Unknown { kernel_dim: None },
                None,
                evidence,
            ))
        }
    };
    evidence.extremality = Some(ext.evidence);
    Ok(match ext.kind {
        ExtremalKind::Extremal { kernel_dim } => report(
            Verdict::ExtremeRay,
            None,
            DetKind::ExtremalNonSquare { kernel_dim },
            None,
            evidence,
        ),
        ExtremalKind::NotExtremal { witness, scale } => report(
            Verdict::Inconclusive,
            Some(InconclusiveReason::TheoremSilent),
            DetKind::NotExtremal { witness, scale },
            None,
            evidence,
        ),
        // a square root would have been found above
        ExtremalKind::ExtremalByPerfectSquare { .. } | ExtremalKind::Inconclusive { .. } => {
            let kernel_dim = evidence.extremality.as_ref().map(|e| e.kernel_dim);
            report(
                Verdict::Inconclusive,
                Some(InconclusiveReason::ExtremalityUndecided),
                DetKind::Unknown { kernel_dim },
                None,
                evidence,
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::tensor::corpus::corpus;

    fn tensor(terms: &[((usize, usize), (usize, usize), i64)]) -> ElastTensor {
        let t: Vec<_> = terms.iter().map(|&(a, b, c)| (a, b, rat(c))).collect();
        ElastTensor::from_quadratic_form(3, &t).unwrap()
    }

    #[test]
    fn single_square_uses_zero_diagonal_route() {
        let c = corpus("single-square").unwrap();
        let z = zero_det_sos(&c).unwrap();
        assert_eq!(z.route, SosRoute::ZeroDiagonal);
        assert_eq!(z.certificate.squares.len(), 1);
        assert_eq!(z.certificate.reconstruct_exact(3, 3).unwrap(), c.rank_one_form());
        let m = &z.certificate.squares[0].matrix;
        assert_eq!(m[0][0].abs(), 1.0);
        assert_eq!(m.iter().flatten().filter(|v| **v != 0.0).count(), 1);
    }

    /// `Σ w·(xᵀ M y)²` as a tensor through its quadratic form in ξ.
    fn from_squares(mats: &[[[i64; 3]; 3]]) -> ElastTensor {
        let mut terms = Vec::new();
        for m in mats {
            for (a, ra) in m.iter().enumerate() {
                for (b, &va) in ra.iter().enumerate() {
                    for (c, rc) in m.iter().enumerate() {
                        for (d, &vc) in rc.iter().enumerate() {
                            if va * vc != 0 {
                                terms.push(((a, b), (c, d), va * vc));
                            }
                        }
                    }
                }
            }
        }
        tensor(&terms)
    }

    #[test]
    fn constant_combination_route() {
        // rows X1 = x1 + 2x3, X2 = x2 - x3 with a PSD 2×2 block in y
        let c = from_squares(&[
            [[1, 0, 0], [0, 0, 0], [2, 0, 0]],
            [[0, 1, 0], [0, 1, 0], [0, 1, 0]],
            [[0, 0, 1], [0, -1, 1], [0, 1, 1]],
        ]);
        let t = acoustic_tensor(&c, MatrixRole::YMatrix);
        let (det, _) = symbolic_det_cof(&t).unwrap();
        assert!(det.is_zero());
        let pair = row_combination_coeffs(&t, 2).unwrap();
        assert_eq!(pair.constants(), Some((rat(2), rat(-1))));
        let z = zero_det_sos(&c).unwrap();
        assert_eq!(z.route, SosRoute::ConstantRowCombination);
        assert!(z.certificate.squares.len() <= 6);
        assert_eq!(z.certificate.reconstruct_exact(3, 3).unwrap(), c.rank_one_form());
    }

    #[test]
    fn linear_combination_route() {
        // squares (a_k x1 + b_k x2 + h_k x3) with a_k c1 + b_k c2 = h_k c3, c = (y1, y2, y3)
        // x-rows [a; b; h] as matrices of linear forms in y
        let c = from_squares(&[
            [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
            [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
            [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
        ]);
        let t = acoustic_tensor(&c, MatrixRole::YMatrix);
        let (det, _) = symbolic_det_cof(&t).unwrap();
        assert!(det.is_zero());
        let z = zero_det_sos(&c).unwrap();
        assert_eq!(z.certificate.reconstruct_exact(3, 3).unwrap(), c.rank_one_form());
        assert!(matches!(z.route, SosRoute::RationalRowCombination | SosRoute::StructuredForm), "{:?}", z.route);
    }

    #[test]
    fn null_lagrangian_is_polyconvex_with_empty_certificate() {
        let c = corpus("null-lagrangian").unwrap();
        let r = classify(&c, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Polyconvex);
        assert_eq!(r.det_status.kind, DetKind::IdenticallyZero);
        assert!(r.certificate.unwrap().squares.is_empty());
    }

    #[test]
    fn diagonal_sum_takes_perfect_square_branch() {
        let c = corpus("diag-convex").unwrap();
        let r = classify(&c, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Polyconvex);
        let DetKind::PerfectSquare { root: SquareRoot::Exact { root } } = &r.det_status.kind else {
            panic!("{:?}", r.det_status.kind)
        };
        assert_eq!(root, &RatPoly::from_int_terms(3, 3, &[(&[1, 1, 1], 1)]));
        assert!(r.evidence.polyconvexity_t_star.unwrap() >= -1e-7);
        assert!(r.certificate.unwrap().residual <= 1e-8);
        assert!(r.evidence.det_probe_defect < 1e-12);
    }

    #[test]
    fn negative_form_is_rejected() {
        let c = tensor(&[((0, 0), (0, 0), -1)]);
        match classify(&c, &ClassifyOptions::default()) {
            Err(Error::NotInCone { value, .. }) => assert_eq!(value, "-1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn four_dimensional_input_is_refused() {
        let c = corpus("cl-plus-square44").unwrap();
        assert_eq!(classify(&c, &ClassifyOptions::default()), Err(Error::UnsupportedDimension(4)));
    }

    #[test]
    fn digest_is_stable() {
        let a = input_digest(&corpus("diag-convex").unwrap());
        assert_eq!(a, input_digest(&corpus("diag-convex").unwrap()));
        assert_eq!(a.len(), 64);
        assert_ne!(a, input_digest(&corpus("single-square").unwrap()));
    }
}
