//! Extremality of nonnegative forms through the linear conditions their zeros
//! impose on any nonnegative summand.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{monomials_of_degree, perfect_square_test, HomPoly, Monomial, SquareRoot};
use crate::psd::{svd, sym_eigen};
use crate::scalar::{rationalize_digits, Scalar};
use crate::sphere::{canonical_sign, dot, line_angle, norm, normalize, random_unit, SphereForm};
use crate::{FloatPoly, RatPoly};

#[derive(Clone, Copy, Debug)]
pub struct ExtremalityOptions {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Relative bound on `P(z)` for a point to count as a zero.
    pub zero_tol: f64,
    /// Relative bound on negative minima tolerated as rounding.
    pub nonneg_tol: f64,
    /// Relative singular-value threshold for the kernel.
    pub rank_tol: f64,
    /// Minimum ratio across the rank threshold for a confident rank.
    pub min_gap: f64,
    pub dedup_tol: f64,
    /// More distinct zeros than this means a zero curve.
    pub curve_threshold: usize,
    pub curve_samples: usize,
    pub witness_directions: usize,
    pub witness_starts: usize,
}

impl Default for ExtremalityOptions {
    fn default() -> Self {
        ExtremalityOptions {
            starts: 128,
            iterations: 500,
            seed: 0,
            zero_tol: 1e-10,
            nonneg_tol: 1e-8,
            rank_tol: 1e-7,
            min_gap: 10.0,
            dedup_tol: 1e-6,
            curve_threshold: 20,
            curve_samples: 24,
            witness_directions: 200,
            witness_starts: 64,
        }
    }
}

/// Projective zeros on the unit sphere, one representative per antipodal pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub dedup_tol: f64,
    /// The zeros were sampled from a positive-dimensional zero set.
    pub on_curve: bool,
    /// Points confirmed as exact rational zeros.
    pub exact: Vec<bool>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Does some zero lie within `tol` (angle) of the line through `v`?
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.points.iter().any(|p| line_angle(p, v) <= tol)
    }
}

fn to_rational_poly<S: Scalar>(p: &HomPoly<S>) -> Option<RatPoly> {
    let mut out = HomPoly::zero(p.nvars(), p.degree());
    for (m, c) in p.terms() {
        out.add_term(m.clone(), c.to_rational()?);
    }
    Some(out)
}

/// Rescale so the largest coordinate is 1, rationalize, and keep the point
/// when it is an exact critical zero.
fn snap(z: &[f64], exact: &RatPoly, grad: &[RatPoly]) -> Option<Vec<f64>> {
    let (imax, _) = z
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())?;
    // flat directions (quartic, sextic) stall the descent 1e-5 to 1e-3 away from the zero
    let w = [12, 9, 6, 4, 3, 2].iter().find_map(|&digits| {
        let w: Vec<BigRational> = z.iter().map(|&v| rationalize_digits(v / z[imax], digits)).collect();
        (exact.eval(&w).is_zero() && grad.iter().all(|g| g.eval(&w).is_zero())).then_some(w)
    })?;
    let mut out = normalize(&w.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>());
    canonical_sign(&mut out);
    Some(out)
}

fn minimize<R: rand::Rng>(form: &SphereForm, rng: &mut R, starts: usize, iters: usize) -> Vec<(Vec<f64>, f64)> {
    let n = form.nvars();
    (0..starts)
        .map(|_| {
            let s = random_unit(rng, n);
            form.local_min(s, iters)
        })
        .collect()
}

/// Multistart minima of `P` on the sphere that are zeros, polished and deduplicated.
pub fn find_zeros<S: Scalar>(p: &HomPoly<S>, opts: &ExtremalityOptions) -> Result<ZeroSet> {
    let pf = p.to_f64();
    let exact = to_rational_poly(p);
    // unit largest coefficient, so the search path does not depend on the scale of `p`
    let unit = match exact.as_ref().and_then(|e| e.terms().map(|(_, c)| c.abs()).max()) {
        Some(m) if !m.is_zero() => exact.as_ref().unwrap().scale(&m.recip()).to_f64(),
        _ => pf.scale(&(1.0 / pf.max_abs_coeff().max(f64::MIN_POSITIVE))),
    };
    let form = SphereForm::new(&unit);
    let scale = form.scale();
    let exact_grad: Option<Vec<RatPoly>> = exact.as_ref().map(|e| e.gradient());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut flags: Vec<bool> = Vec::new();
    for (mut z, v) in minimize(&form, &mut rng, opts.starts, opts.iterations) {
        if v < -opts.nonneg_tol * scale {
            return Err(Error::NotNonnegative(v / scale));
        }
        if v > opts.zero_tol * scale || form.tangent_gradient_norm(&z) > 1e-8 * scale {
            continue;
        }
        canonical_sign(&mut z);
        let mut is_exact = false;
        if let (Some(e), Some(g)) = (&exact, &exact_grad) {
            if let Some(s) = snap(&z, e, g) {
                z = s;
                is_exact = true;
            }
        }
        match points.iter().position(|q| line_angle(q, &z) <= opts.dedup_tol) {
            Some(i) => {
                if is_exact && !flags[i] {
                    points[i] = z;
                    flags[i] = true;
                }
            }
            None => {
                points.push(z);
                flags.push(is_exact);
            }
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[b].partial_cmp(&points[a]).unwrap());
    let mut points: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
    let mut flags: Vec<bool> = order.iter().map(|&i| flags[i]).collect();
    let on_curve = points.len() > opts.curve_threshold;
    if on_curve {
        let picked = farthest_points(&points, opts.curve_samples);
        points = picked.iter().map(|&i| points[i].clone()).collect();
        flags = picked.iter().map(|&i| flags[i]).collect();
    }
    let residuals = points.iter().map(|z| pf.eval_f64(z).abs()).collect();
    Ok(ZeroSet {
        points,
        residuals,
        dedup_tol: opts.dedup_tol,
        on_curve,
        exact: flags,
    })
}

/// Greedy farthest-point sample (by line angle), starting from the first point.
fn farthest_points(points: &[Vec<f64>], k: usize) -> Vec<usize> {
    if points.is_empty() {
        return vec![];
    }
    let mut picked = vec![0];
    let mut dist: Vec<f64> = points.iter().map(|p| line_angle(p, &points[0])).collect();
    while picked.len() < k.min(points.len()) {
        let (next, _) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        picked.push(next);
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(line_angle(p, &points[next]));
        }
    }
    picked.sort();
    picked
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstraintLevel {
    Value,
    Gradient,
    HessianKernel,
}

pub const ALL_LEVELS: [ConstraintLevel; 3] = [
    ConstraintLevel::Value,
    ConstraintLevel::Gradient,
    ConstraintLevel::HessianKernel,
];

/// Linear conditions on the coefficient vector (ascending monomial basis).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub nvars: usize,
    pub degree: u32,
    /// Unit-norm rows.
    pub rows: Vec<Vec<f64>>,
    pub row_levels: Vec<ConstraintLevel>,
}

impl ConstraintSystem {
    pub fn count(&self, level: ConstraintLevel) -> usize {
        self.row_levels.iter().filter(|&&l| l == level).count()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest `|row·q̂|` over rows, `q̂` the unit coefficient vector of `q`.
    pub fn residual<S: Scalar>(&self, q: &HomPoly<S>) -> f64 {
        let v = q.coeff_vector();
        let n = norm(&v);
        if n == 0.0 {
            return 0.0;
        }
        self.rows
            .iter()
            .map(|r| (dot(r, &v) / n).abs())
            .fold(0.0, f64::max)
    }
}

fn monomial_value(m: &Monomial, z: &[f64]) -> f64 {
    m.eval_f64(z)
}

fn monomial_partial(m: &Monomial, i: usize, z: &[f64]) -> f64 {
    let e = m.exps();
    if e[i] == 0 {
        return 0.0;
    }
    let mut f = e[i] as f64;
    for (k, (&ek, &zk)) in e.iter().zip(z).enumerate() {
        let p = if k == i { ek - 1 } else { ek };
        f *= zk.powi(p as i32);
    }
    f
}

fn monomial_second(m: &Monomial, i: usize, j: usize, z: &[f64]) -> f64 {
    let mut e: Vec<u32> = m.exps().to_vec();
    let mut f = 1.0;
    for k in [i, j] {
        if e[k] == 0 {
            return 0.0;
        }
        f *= e[k] as f64;
        e[k] -= 1;
    }
    for (&ek, &zk) in e.iter().zip(z) {
        f *= zk.powi(ek as i32);
    }
    f
}

fn push_row(sys: &mut ConstraintSystem, row: Vec<f64>, level: ConstraintLevel) {
    let n = norm(&row);
    if n > 1e-300 {
        sys.rows.push(row.iter().map(|x| x / n).collect());
        sys.row_levels.push(level);
    }
}

/// Rows that every nonnegative summand `Q` of `P` must satisfy at the zeros of `P`.
pub fn zero_constraints<S: Scalar>(p: &HomPoly<S>, zeros: &ZeroSet, levels: &[ConstraintLevel]) -> ConstraintSystem {
    let (nv, deg) = (p.nvars(), p.degree());
    let basis = monomials_of_degree(nv, deg);
    let pf = p.to_f64();
    let form = SphereForm::new(&pf);
    let mut sys = ConstraintSystem {
        nvars: nv,
        degree: deg,
        rows: vec![],
        row_levels: vec![],
    };
    for z in &zeros.points {
        if levels.contains(&ConstraintLevel::Value) {
            push_row(&mut sys, basis.iter().map(|m| monomial_value(m, z)).collect(), ConstraintLevel::Value);
        }
        if levels.contains(&ConstraintLevel::Gradient) {
            for i in 0..nv {
                push_row(
                    &mut sys,
                    basis.iter().map(|m| monomial_partial(m, i, z)).collect(),
                    ConstraintLevel::Gradient,
                );
            }
        }
        if levels.contains(&ConstraintLevel::HessianKernel) {
            let u = SphereForm::tangent_basis(z);
            let h = form.tangent_hessian(z, &u);
            let eig = sym_eigen(&h);
            let thr = 1e-7 * form.scale();
            for k in 0..eig.values.len() {
                if eig.values[k].abs() > thr {
                    continue;
                }
                let w = eig.vector(k);
                let v: Vec<f64> = (0..nv).map(|i| u.iter().zip(&w).map(|(b, c)| b[i] * c).sum()).collect();
                for i in 0..nv {
                    let row = basis
                        .iter()
                        .map(|m| (0..nv).map(|j| monomial_second(m, i, j, z) * v[j]).sum())
                        .collect();
                    push_row(&mut sys, row, ConstraintLevel::HessianKernel);
                }
            }
        }
    }
    sys
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", bound(serialize = "S: Scalar"))]
pub enum ExtremalKind<S> {
    Extremal { kernel_dim: usize },
    ExtremalByPerfectSquare { root: SquareRoot<S> },
    /// `witness` and `scale·P - witness` are both nonnegative.
    NotExtremal { witness: FloatPoly, scale: f64 },
    Inconclusive { kernel_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalityEvidence {
    pub zero_count: usize,
    pub exact_zeros: usize,
    pub on_curve: bool,
    pub value_rows: usize,
    pub gradient_rows: usize,
    pub hessian_rows: usize,
    pub kernel_dim: usize,
    /// Singular values on both sides of the rank threshold.
    pub singular_values_near_threshold: Vec<f64>,
    pub gap_ratio: Option<f64>,
    pub membership_residual: f64,
    pub square_root_found: bool,
    pub witnesses_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct ExtremalityVerdict<S> {
    #[serde(flatten)]
    pub kind: ExtremalKind<S>,
    pub evidence: ExtremalityEvidence,
}

/// Smallest value of `q` on the unit sphere found by multistart descent,
/// relative to the largest coefficient of `q`.
fn relative_min(q: &FloatPoly, starts: usize, seed: u64) -> f64 {
    let form = SphereForm::new(q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let best = minimize(&form, &mut rng, starts, 500)
        .into_iter()
        .map(|(_, v)| v)
        .fold(f64::INFINITY, f64::min);
    best / form.scale()
}

struct WitnessCheck<'a> {
    p: &'a FloatPoly,
    opts: &'a ExtremalityOptions,
}

impl WitnessCheck<'_> {
    fn nonneg(&self, q: &FloatPoly) -> bool {
        relative_min(q, self.opts.witness_starts, self.opts.seed) >= -self.opts.nonneg_tol
    }

    /// Verified `(Q, c)` or `None`.
    fn try_witness(&self, q: FloatPoly) -> Option<(FloatPoly, f64)> {
        if line_angle(&q.coeff_vector(), &self.p.coeff_vector()) < 1e-6 {
            return None;
        }
        if !self.nonneg(&q) {
            return None;
        }
        let ok = |c: f64| self.nonneg(&self.p.scale(&c).checked_sub(&q).expect("same shape"));
        let mut hi = None;
        for k in 0..21 {
            let c = (2.0f64).powi(k);
            if ok(c) {
                hi = Some(c);
                break;
            }
        }
        let mut hi = hi?;
        if hi > 1.0 {
            let mut lo = hi / 2.0;
            for _ in 0..8 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        Some((q, hi))
    }
}

/// Decide extremality from the zero-induced constraints, with a witness
/// search when the constraint kernel is larger than the span of `P`.
pub fn extremality_test<S: Scalar>(p: &HomPoly<S>, opts: &ExtremalityOptions) -> Result<ExtremalityVerdict<S>> {
    if p.is_zero() || !p.degree().is_multiple_of(2) || p.nvars() < 2 {
        return Err(Error::PreconditionViolated(
            "extremality needs a nonzero form of even degree in at least two variables".into(),
        ));
    }
    let zeros = find_zeros(p, opts)?;
    let square = perfect_square_test(p);
    let sys = zero_constraints(p, &zeros, &ALL_LEVELS);
    let nb = monomials_of_degree(p.nvars(), p.degree()).len();
    let dec = svd(&sys.rows, nb);
    let smax = dec.values.first().copied().unwrap_or(0.0);
    let thr = opts.rank_tol * smax;
    let rank = if smax == 0.0 { 0 } else { dec.rank(thr) };
    let kernel_dim = nb - rank;
    let gap_ratio = if rank == 0 || rank == nb || dec.values[rank] == 0.0 {
        None
    } else {
        Some(dec.values[rank - 1] / dec.values[rank])
    };
    let confident = gap_ratio.is_none_or(|g| g >= opts.min_gap);
    let lo = rank.saturating_sub(2);
    let hi = (rank + 2).min(dec.values.len());
    let membership_residual = sys.residual(p);
    let mut evidence = ExtremalityEvidence {
        zero_count: zeros.len(),
        exact_zeros: zeros.exact.iter().filter(|&&e| e).count(),
        on_curve: zeros.on_curve,
        value_rows: sys.count(ConstraintLevel::Value),
        gradient_rows: sys.count(ConstraintLevel::Gradient),
        hessian_rows: sys.count(ConstraintLevel::HessianKernel),
        kernel_dim,
        singular_values_near_threshold: dec.values[lo..hi].to_vec(),
        gap_ratio,
        membership_residual,
        square_root_found: square.is_some(),
        witnesses_tried: 0,
    };
    let pinned = kernel_dim == 1 && confident && membership_residual <= 1e-8;
    if pinned {
        let kind = match square {
            Some(root) => ExtremalKind::ExtremalByPerfectSquare { root },
            None => ExtremalKind::Extremal { kernel_dim },
        };
        return Ok(ExtremalityVerdict { kind, evidence });
    }

    let pf = p.to_f64();
    let pscale = pf.max_abs_coeff();
    let check = WitnessCheck { p: &pf, opts };
    let kernel: Vec<Vec<f64>> = (rank..nb).map(|k| dec.right_vector(k)).collect();
    let in_kernel = |v: &[f64]| sys.rows.iter().all(|r| dot(r, v).abs() <= 1e-8 * norm(v));

    // sparse candidates first: even monomials satisfying every constraint
    for m in monomials_of_degree(p.nvars(), p.degree()) {
        if !m.is_even() {
            continue;
        }
        let c = match pf.coeff(&m) {
            c if c > 0.0 => c,
            _ => pscale,
        };
        let q = HomPoly::monomial(m, c);
        if !in_kernel(&q.coeff_vector()) {
            continue;
        }
        evidence.witnesses_tried += 1;
        if let Some((witness, scale)) = check.try_witness(q) {
            return Ok(ExtremalityVerdict {
                kind: ExtremalKind::NotExtremal { witness, scale },
                evidence,
            });
        }
    }

    // perturbations P + ε·D with D in the kernel, orthogonal to P
    let pv = pf.coeff_vector();
    let pn = norm(&pv);
    let phat: Vec<f64> = pv.iter().map(|x| x / pn).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    if kernel.len() > 1 {
        for _ in 0..opts.witness_directions {
            let mut dvec = vec![0.0; nb];
            for k in &kernel {
                let g: f64 = StandardNormal.sample(&mut rng);
                for (a, b) in dvec.iter_mut().zip(k) {
                    *a += g * b;
                }
            }
            let c = dot(&dvec, &phat);
            for (a, b) in dvec.iter_mut().zip(&phat) {
                *a -= c * b;
            }
            let dn = norm(&dvec);
            if dn < 1e-12 {
                continue;
            }
            for eps in [0.1, 0.01] {
                let qv: Vec<f64> = pv.iter().zip(&dvec).map(|(a, b)| a + eps * pn * b / dn).collect();
                let q = HomPoly::from_coeff_vector(p.nvars(), p.degree(), &qv);
                evidence.witnesses_tried += 1;
                if let Some((witness, scale)) = check.try_witness(q) {
                    return Ok(ExtremalityVerdict {
                        kind: ExtremalKind::NotExtremal { witness, scale },
                        evidence,
                    });
                }
            }
        }
    }
    Ok(ExtremalityVerdict {
        kind: ExtremalKind::Inconclusive { kernel_dim },
        evidence,
    })
}
