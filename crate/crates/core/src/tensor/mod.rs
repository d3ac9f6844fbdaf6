//! Fourth-order tensors with the rank-one symmetries, their quadratic and
//! biquadratic forms, and acoustic tensors.

mod acoustic;
pub mod corpus;
mod det;
pub mod json;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{HomPoly, Monomial};
use crate::scalar::{rat, Scalar};
use crate::RatPoly;

pub use acoustic::{acoustic_tensor, BiquadraticForm, MatrixRole, PolynomialMatrix};
pub use det::{mixed_det_expansion, symbolic_det_cof, MixedCoefficients};

/// Index quadruple, zero-based internally.
pub type Quad = [usize; 4];

/// The four images of `q` under the group generated by swapping the first
/// and third index and swapping the second and fourth index.
pub fn orbit(q: Quad) -> [Quad; 4] {
    let [i, j, k, l] = q;
    [[i, j, k, l], [k, j, i, l], [i, l, k, j], [k, l, i, j]]
}

/// Lexicographically smallest orbit member.
pub fn canonical(q: Quad) -> Quad {
    *orbit(q).iter().min().unwrap()
}

/// Tensor `C_ijkl` stored once per symmetry orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct ElastTensor {
    d: usize,
    components: BTreeMap<Quad, BigRational>,
}

impl ElastTensor {
    pub fn zero(d: usize) -> Self {
        ElastTensor {
            d,
            components: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Stored `(canonical index, value)` pairs.
    pub fn components(&self) -> impl Iterator<Item = (&Quad, &BigRational)> {
        self.components.iter()
    }

    pub fn get(&self, q: Quad) -> BigRational {
        self.components
            .get(&canonical(q))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Full `d⁴` expansion in row-major `(i, j, k, l)` order.
    pub fn expand(&self) -> Vec<BigRational> {
        let d = self.d;
        let mut out = vec![BigRational::zero(); d * d * d * d];
        for (q, v) in &self.components {
            for m in orbit(*q) {
                out[((m[0] * d + m[1]) * d + m[2]) * d + m[3]] = v.clone();
            }
        }
        out
    }

    /// Tensor whose quadratic form agrees with `Σ a·ξ_ij ξ_kl` on rank-one matrices.
    ///
    /// Terms are `((i, j), (k, l), a)` with zero-based indices; repeated pairs
    /// accumulate. The coefficients are spread symmetrically and averaged over
    /// the symmetry group, which leaves `f(x⊗y)` unchanged.
    pub fn from_quadratic_form(
        d: usize,
        terms: &[((usize, usize), (usize, usize), BigRational)],
    ) -> Result<Self> {
        let mut full: BTreeMap<Quad, BigRational> = BTreeMap::new();
        let half = BigRational::new(1.into(), 2.into());
        for ((i, j), (k, l), a) in terms {
            for &x in &[*i, *j, *k, *l] {
                if x >= d {
                    return Err(Error::IndexOutOfRange(format!("index {} exceeds d = {d}", x + 1)));
                }
            }
            if (i, j) == (k, l) {
                *full.entry([*i, *j, *k, *l]).or_insert_with(BigRational::zero) += a;
            } else {
                *full.entry([*i, *j, *k, *l]).or_insert_with(BigRational::zero) += a * &half;
                *full.entry([*k, *l, *i, *j]).or_insert_with(BigRational::zero) += a * &half;
            }
        }
        let quarter = BigRational::new(1.into(), 4.into());
        let mut sums: BTreeMap<Quad, BigRational> = BTreeMap::new();
        for (q, v) in full {
            *sums.entry(canonical(q)).or_insert_with(BigRational::zero) += v;
        }
        let mut components = BTreeMap::new();
        for (c, s) in sums {
            // orbit size 1, 2 or 4; each distinct member contributes once to the average
            let members: std::collections::BTreeSet<Quad> = orbit(c).into_iter().collect();
            let mult = rat(4 / members.len() as i64);
            let v = s * mult * &quarter;
            if !v.is_zero() {
                components.insert(c, v);
            }
        }
        Ok(ElastTensor { d, components })
    }

    /// Multiply every component by `s`.
    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = ElastTensor::zero(self.d);
        if s.is_zero() {
            return out;
        }
        for (q, v) in &self.components {
            out.components.insert(*q, v * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!("d {} vs {}", self.d, other.d)));
        }
        let mut out = self.clone();
        for (q, v) in &other.components {
            let e = out.components.entry(*q).or_insert_with(BigRational::zero);
            *e += v;
            if e.is_zero() {
                out.components.remove(q);
            }
        }
        Ok(out)
    }

    /// Copy into dimension `d_new ≥ d`, padding with zeros.
    pub fn embed(&self, d_new: usize) -> Self {
        assert!(d_new >= self.d);
        ElastTensor {
            d: d_new,
            components: self.components.clone(),
        }
    }

    /// Tensor of the transposed argument: `C'_ijkl = C_jilk`.
    pub fn transposed(&self) -> Self {
        let mut out = ElastTensor::zero(self.d);
        for (q, v) in &self.components {
            out.components
                .insert(canonical([q[1], q[0], q[3], q[2]]), v.clone());
        }
        out
    }

    /// `f(ξ)` as a polynomial in the `d²` entries of `ξ`, row-major.
    pub fn quadratic_form(&self) -> RatPoly {
        let d = self.d;
        let n = d * d;
        let full = self.expand();
        let mut p = HomPoly::zero(n, 2);
        for a in 0..n {
            for b in 0..n {
                let v = &full[a * n + b];
                if v.is_zero() {
                    continue;
                }
                let mut e = vec![0; n];
                e[a] += 1;
                e[b] += 1;
                p.add_term(Monomial::new(e), v.clone());
            }
        }
        p
    }

    /// Symmetric `d²×d²` coefficient matrix of `f` on row-major `ξ`.
    pub fn coefficient_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.d * self.d;
        let full = self.expand();
        (0..n)
            .map(|a| (0..n).map(|b| full[a * n + b].clone()).collect())
            .collect()
    }

    /// `f(x⊗y)` as a polynomial in `(x1..xd, y1..yd)`.
    pub fn rank_one_form(&self) -> RatPoly {
        let d = self.d;
        let mut p = HomPoly::zero(2 * d, 4);
        for (q, v) in &self.components {
            for m in orbit_distinct(*q) {
                let mut e = vec![0; 2 * d];
                e[m[0]] += 1;
                e[d + m[1]] += 1;
                e[m[2]] += 1;
                e[d + m[3]] += 1;
                p.add_term(Monomial::new(e), v.clone());
            }
        }
        p
    }

    /// `Σ C_ijkl x_i y_j x_k y_l`.
    pub fn eval_rank_one<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        if x.len() != self.d || y.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "expected vectors of length {}, got {} and {}",
                self.d,
                x.len(),
                y.len()
            )));
        }
        let mut acc = S::zero();
        for (q, v) in &self.components {
            let c = S::from_rational(v);
            for m in orbit_distinct(*q) {
                acc = acc
                    + c.clone()
                        * x[m[0]].clone()
                        * y[m[1]].clone()
                        * x[m[2]].clone()
                        * y[m[3]].clone();
            }
        }
        Ok(acc)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.components
            .values()
            .map(|v| v.to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }
}

fn orbit_distinct(q: Quad) -> Vec<Quad> {
    let mut v: Vec<Quad> = orbit(q).to_vec();
    v.sort();
    v.dedup();
    v
}

/// Options for [`canonicalize_tensor`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CanonOptions {
    /// Reject orbits whose supplied members disagree instead of averaging.
    pub strict: bool,
}

/// Build a tensor from raw `(i, j, k, l, value)` entries with one-based indices.
///
/// Every orbit receives the average of the values supplied for its members;
/// members left unspecified do not count.
pub fn canonicalize_tensor(
    d: usize,
    raw: &[(usize, usize, usize, usize, BigRational)],
    opts: CanonOptions,
) -> Result<ElastTensor> {
    if d == 0 {
        return Err(Error::DimensionMismatch("d must be positive".into()));
    }
    let mut groups: BTreeMap<Quad, Vec<BigRational>> = BTreeMap::new();
    for (i, j, k, l, v) in raw {
        let q1 = [*i, *j, *k, *l];
        if q1.iter().any(|&x| x == 0 || x > d) {
            return Err(Error::IndexOutOfRange(format!("{q1:?} with d = {d}")));
        }
        let q = q1.map(|x| x - 1);
        groups.entry(canonical(q)).or_default().push(v.clone());
    }
    let mut components = BTreeMap::new();
    for (c, vals) in groups {
        if opts.strict {
            if let Some(bad) = vals.iter().find(|v| **v != vals[0]) {
                return Err(Error::ConflictingAssignment {
                    orbit: c.map(|x| x + 1),
                    first: vals[0].to_string(),
                    second: bad.to_string(),
                });
            }
        }
        let n = rat(vals.len() as i64);
        let mean = vals.into_iter().fold(BigRational::zero(), |a, b| a + b) / n;
        if !mean.is_zero() {
            components.insert(c, mean);
        }
    }
    Ok(ElastTensor { d, components })
}
