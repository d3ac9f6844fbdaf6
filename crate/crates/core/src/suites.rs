//! Randomized property suites over the matrix and determinant identities.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::poly::monomials_of_degree;
use crate::psd::{det_dense, lemma41_check, minor_sum};
use crate::scalar::rat;
use crate::sphere::random_unit;
use crate::tensor::mixed_det_expansion;
use crate::{HomPoly, RatPolyMatrix, Scalar, SymMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Most negative relative slack seen (positive when every check had room).
    pub worst_slack: f64,
    /// Indices of the first failing trials.
    pub failures: Vec<usize>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            trials: 0,
            passed: 0,
            worst_slack: f64::INFINITY,
            failures: vec![],
        }
    }

    fn record(&mut self, ok: bool, slack: f64) {
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 10 {
            self.failures.push(self.trials);
        }
        self.trials += 1;
        self.worst_slack = self.worst_slack.min(slack);
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub fn summary(&self) -> String {
        format!("{}/{} passed", self.passed, self.trials)
    }
}

/// `G Gᵀ` for a Gaussian `n×r` factor with random rank `r ∈ 1..=n`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize) -> SymMatrix<f64> {
    let r = rng.random_range(1..=n);
    let g: Vec<Vec<f64>> = (0..n).map(|_| (0..r).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, (0..r).map(|k| g[i][k] * g[j][k]).sum());
        }
    }
    m
}

pub const LEMMA41_SLACK: f64 = 1e-9;

/// `B ⪰ 0`, `A = B + PSD`; every averaged minor sum of order `m` is at most
/// the one of order `k < m`, and for `n = 3` the four-term chain holds.
pub fn lemma41_suite(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new(&format!("lemma41 n={n}"));
    for _ in 0..trials {
        let b = random_psd(&mut rng, n);
        let a = b.add(&random_psd(&mut rng, n)).expect("same size");
        let sums: Vec<f64> = (0..=n).map(|k| minor_sum(&a, &b, k).expect("valid order")).collect();
        let scale = sums
            .iter()
            .fold(a.max_abs().powi(n as i32), |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut slack = f64::INFINITY;
        for k in 1..n {
            for m in k + 1..=n {
                slack = slack.min((sums[k] - sums[m]) / scale);
            }
        }
        let mut ok = slack >= -LEMMA41_SLACK;
        if n == 3 {
            let tol = 1e-12 * a.max_abs();
            ok &= lemma41_check(&a, &b, tol).is_ok_and(|c| c.holds());
        }
        rep.record(ok, slack);
    }
    rep
}

fn random_quadratic<R: Rng>(rng: &mut R) -> crate::RatPoly {
    let mut p = HomPoly::zero(3, 2);
    for m in monomials_of_degree(3, 2) {
        p.add_term(m, rat(rng.random_range(-3..=3)));
    }
    p
}

fn random_symmetric<R: Rng>(rng: &mut R) -> RatPolyMatrix {
    let mut e = vec![vec![HomPoly::zero(3, 2); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let q = random_quadratic(rng);
            e[i][j] = q.clone();
            e[j][i] = q;
        }
    }
    RatPolyMatrix::new(e).expect("uniform entries")
}

pub const MIXED_DET_TOL: f64 = 1e-9;

/// `det(T(y) - λ·T1(y))` against the four-coefficient expansion at random
/// probes, plus the exact `T1 = T` case `(1 - λ)³·det T`.
pub fn mixed_det_suite(trials: usize, probes: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("mixed-det");
    for _ in 0..trials {
        let t = random_symmetric(&mut rng);
        let t1 = random_symmetric(&mut rng);
        let coeffs = mixed_det_expansion(&t, &t1).expect("3×3 symmetric");
        let cf = [&coeffs.c0, &coeffs.c1, &coeffs.c2, &coeffs.c3].map(|c| c.to_f64());
        let (tf, t1f) = (t.to_f64(), t1.to_f64());
        let mut slack = f64::INFINITY;
        for _ in 0..probes {
            let lambda: f64 = rng.random_range(-2.0..2.0);
            let y = random_unit(&mut rng, 3);
            let (m, m1) = (tf.eval_f64(&y), t1f.eval_f64(&y));
            let diff: Vec<Vec<f64>> = m
                .iter()
                .zip(&m1)
                .map(|(r, r1)| r.iter().zip(r1).map(|(a, b)| a - lambda * b).collect())
                .collect();
            let terms: Vec<f64> = cf.iter().enumerate().map(|(i, c)| (-lambda).powi(i as i32) * c.eval_f64(&y)).collect();
            let scale = 1.0 + terms.iter().map(|v| v.abs()).sum::<f64>();
            let err = (det_dense(&diff) - terms.iter().sum::<f64>()).abs();
            slack = slack.min(MIXED_DET_TOL - err / scale);
        }
        let same = mixed_det_expansion(&t, &t).expect("3×3 symmetric");
        let three = BigRational::from_i64(3);
        let vieta = same.c1 == same.c0.scale(&three) && same.c2 == same.c0.scale(&three) && same.c3 == same.c0;
        rep.record(slack >= 0.0 && vieta, slack);
    }
    rep
}

pub const PSD_DUAL_TOL: f64 = 1e-10;

/// `Σ a_ij b_ij ≥ 0` for PSD `A`, `B`.
pub fn psd_dual_suite(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new(&format!("psd-dual n={n}"));
    for _ in 0..trials {
        let a = random_psd(&mut rng, n);
        let b = random_psd(&mut rng, n);
        let scale = (a.max_abs() * b.max_abs() * (n * n) as f64).max(f64::MIN_POSITIVE);
        let slack = a.frobenius_dot(&b) / scale;
        rep.record(slack >= -PSD_DUAL_TOL, slack);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_runs() {
        for n in [2, 3, 4] {
            let r = lemma41_suite(n, 50, 1);
            assert!(r.all_passed(), "{r:?}");
        }
        let r = mixed_det_suite(10, 5, 2);
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.summary(), "10/10 passed");
        assert!(psd_dual_suite(4, 100, 3).all_passed());
    }

    #[test]
    fn suites_are_deterministic() {
        assert_eq!(lemma41_suite(3, 20, 9), lemma41_suite(3, 20, 9));
        assert_eq!(mixed_det_suite(3, 3, 9), mixed_det_suite(3, 3, 9));
    }
}
