//! Maximize `λ_min(F + Σ c_k M_k)` by a log-det barrier path-following method.

use serde::Serialize;

use super::{cholesky_dense, cholesky_solve, sym_eigen, Real, SymMatrix};
use crate::error::{Error, Result};

/// `F + Σ c_k M_k` family to optimize over.
#[derive(Clone, Debug)]
pub struct AffinePsdProblem<F> {
    pub base: SymMatrix<F>,
    pub directions: Vec<SymMatrix<F>>,
    /// Feasibility tolerance on `t_star`.
    pub tolerance: f64,
    pub seed: u64,
}

impl<F: Real> AffinePsdProblem<F> {
    pub fn new(base: SymMatrix<F>, directions: Vec<SymMatrix<F>>) -> Self {
        AffinePsdProblem {
            base,
            directions,
            tolerance: 1e-7,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SliceStatus {
    Feasible,
    Infeasible,
    Stalled,
}

/// Solver output; `t_star` and `c_star` are in the units of the input.
#[derive(Clone, Debug, Serialize)]
pub struct SliceResult {
    pub t_star: f64,
    pub c_star: Vec<f64>,
    #[serde(skip)]
    pub g: SymMatrix<f64>,
    pub status: SliceStatus,
    pub iterations: usize,
    /// Bound on `max t - t_star` at termination (input units).
    pub gap: f64,
}

/// Knobs for [`max_min_eig`].
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Box `|c_k| < radius` on unit-scaled directions.
    pub box_radius: f64,
    /// Target barrier gap (scaled units).
    pub gap_tol: f64,
    pub max_newton: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            box_radius: 1e4,
            gap_tol: 1e-9,
            max_newton: 3000,
        }
    }
}

struct Sparse {
    // full symmetric pattern: both (i, j) and (j, i) for off-diagonal entries
    entries: Vec<(usize, usize, f64)>,
}

struct Barrier<'a> {
    n: usize,
    base: &'a [f64],
    dirs: &'a [Sparse],
    radius: f64,
}

impl Barrier<'_> {
    fn slack(&self, c: &[f64], t: f64) -> Vec<f64> {
        let n = self.n;
        let mut s = self.base.to_vec();
        for (d, &ck) in self.dirs.iter().zip(c) {
            if ck == 0.0 {
                continue;
            }
            for &(i, j, v) in &d.entries {
                s[i * n + j] += ck * v;
            }
        }
        for i in 0..n {
            s[i * n + i] -= t;
        }
        s
    }

    /// Barrier objective `-τt - log det S - Σ log(R² - c²)`, or `None` outside the domain.
    fn value(&self, c: &[f64], t: f64, tau: f64) -> Option<(f64, Vec<f64>)> {
        if c.iter().any(|&x| x.abs() >= self.radius) {
            return None;
        }
        let s = self.slack(c, t);
        let l = cholesky_dense(&s, self.n)?;
        let logdet: f64 = (0..self.n).map(|i| 2.0 * l[i * self.n + i].ln()).sum();
        let boxterm: f64 = c
            .iter()
            .map(|&x| (self.radius - x).ln() + (self.radius + x).ln())
            .sum();
        Some((-tau * t - logdet - boxterm, l))
    }
}

fn inverse_from_cholesky(l: &[f64], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(l, n, &e);
        for i in 0..n {
            w[i * n + j] = col[i];
        }
    }
    w
}

/// Maximize `t` subject to `λ_min(F + Σ c_k M_k) ≥ t`.
///
/// Deterministic: the seed is carried for reproducibility records only. The
/// status is `Feasible` when `t_star ≥ -tolerance`; `Infeasible` when the path
/// converged, the gap bound certifies `max t < -tolerance`, and the box on
/// `c` is inactive; `Stalled` otherwise.
pub fn max_min_eig<F: Real>(problem: &AffinePsdProblem<F>) -> Result<SliceResult> {
    max_min_eig_with(problem, SolverOptions::default())
}

pub fn max_min_eig_with<F: Real>(
    problem: &AffinePsdProblem<F>,
    opts: SolverOptions,
) -> Result<SliceResult> {
    let n = problem.base.n();
    for d in &problem.directions {
        if d.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "direction of size {} for base of size {n}",
                d.n()
            )));
        }
    }
    let base64: SymMatrix<f64> = problem.base.cast();
    if !base64.is_finite() {
        return Err(Error::PreconditionViolated("non-finite base matrix".into()));
    }
    let fscale = if base64.max_abs() > 0.0 { base64.max_abs() } else { 1.0 };
    let base_n = base64.scale(1.0 / fscale);
    let mut dscale = Vec::with_capacity(problem.directions.len());
    let mut dirs = Vec::with_capacity(problem.directions.len());
    for d in &problem.directions {
        let d: SymMatrix<f64> = d.cast();
        let s = if d.max_abs() > 0.0 { d.max_abs() } else { 1.0 };
        dscale.push(s);
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = d.get(i, j);
                if v != 0.0 {
                    entries.push((i, j, v / s));
                }
            }
        }
        dirs.push(Sparse { entries });
    }
    let k = dirs.len();
    let base_dense = base_n.to_rows().concat();
    let barrier = Barrier {
        n,
        base: &base_dense,
        dirs: &dirs,
        radius: opts.box_radius,
    };

    let finish = |c: Vec<f64>, iterations: usize, converged: bool, gap: f64| {
        let mut g = base64.clone();
        let mut c_out = Vec::with_capacity(k);
        for (idx, &ck) in c.iter().enumerate() {
            let coef = ck * fscale / dscale[idx];
            c_out.push(coef);
            if coef != 0.0 {
                let d: SymMatrix<f64> = problem.directions[idx].cast();
                g.axpy(coef, &d);
            }
        }
        let t_star = if n == 0 { 0.0 } else { sym_eigen(&g).values[0] };
        let gap = gap * fscale;
        let cmax = c.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let status = if t_star >= -problem.tolerance {
            SliceStatus::Feasible
        } else if converged && t_star + gap < -problem.tolerance && cmax < 0.9 * opts.box_radius {
            SliceStatus::Infeasible
        } else {
            SliceStatus::Stalled
        };
        SliceResult {
            t_star,
            c_star: c_out,
            g,
            status,
            iterations,
            gap,
        }
    };

    if n == 0 {
        return Ok(finish(vec![0.0; k], 0, true, 0.0));
    }
    if k == 0 {
        return Ok(finish(vec![], 0, true, 0.0));
    }

    let m = (n + 2 * k) as f64;
    let mut c = vec![0.0; k];
    let mut t = sym_eigen(&base_n).values[0] - 1.0;
    let mut tau = 1.0;
    let mut iterations = 0;
    let dim = k + 1;
    loop {
        // center for the current τ
        let mut centered = false;
        let mut stuck = false;
        for _ in 0..200 {
            if iterations >= opts.max_newton {
                break;
            }
            let Some((phi, l)) = barrier.value(&c, t, tau) else {
                return Ok(finish(c, iterations, false, m / tau));
            };
            iterations += 1;
            let w = inverse_from_cholesky(&l, n);
            let mut w2 = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for q in 0..n {
                        s += w[i * n + q] * w[q * n + j];
                    }
                    w2[i * n + j] = s;
                }
            }
            let mut grad = vec![0.0; dim];
            let mut hess = vec![0.0; dim * dim];
            for (a, da) in dirs.iter().enumerate() {
                let mut tr = 0.0;
                let mut trw2 = 0.0;
                for &(i, j, v) in &da.entries {
                    tr += v * w[j * n + i];
                    trw2 += v * w2[j * n + i];
                }
                let (rm, rp) = (opts.box_radius - c[a], opts.box_radius + c[a]);
                grad[a] = -tr + 1.0 / rm - 1.0 / rp;
                hess[a * dim + k] = -trw2;
                hess[k * dim + a] = -trw2;
                for b in a..k {
                    let mut h = 0.0;
                    for &(i, j, v) in &da.entries {
                        for &(p, q, u) in &dirs[b].entries {
                            h += v * u * w[j * n + p] * w[q * n + i];
                        }
                    }
                    if a == b {
                        h += 1.0 / (rm * rm) + 1.0 / (rp * rp);
                    }
                    hess[a * dim + b] = h;
                    hess[b * dim + a] = h;
                }
            }
            let trw: f64 = (0..n).map(|i| w[i * n + i]).sum();
            let trw2: f64 = w.iter().map(|x| x * x).sum();
            grad[k] = -tau + trw;
            hess[k * dim + k] = trw2;

            let mut reg = 0.0;
            let maxdiag = (0..dim).map(|i| hess[i * dim + i]).fold(0.0f64, f64::max);
            let step = loop {
                let mut h = hess.clone();
                for i in 0..dim {
                    h[i * dim + i] += reg;
                }
                if let Some(lh) = cholesky_dense(&h, dim) {
                    let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
                    break Some(cholesky_solve(&lh, dim, &neg));
                }
                reg = if reg == 0.0 { 1e-14 * maxdiag.max(1e-300) } else { reg * 100.0 };
                if reg > 1e6 * maxdiag.max(1.0) {
                    break None;
                }
            };
            let Some(step) = step else {
                return Ok(finish(c, iterations, false, m / tau));
            };
            let decrement: f64 = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
            if decrement < 1e-10 {
                centered = true;
                break;
            }
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let cn: Vec<f64> = c.iter().zip(&step).map(|(x, s)| x + alpha * s).collect();
                let tn = t + alpha * step[k];
                if let Some((phin, _)) = barrier.value(&cn, tn, tau) {
                    // slack of a few ulps: at large τ the objective is dominated by rounding
                    if phin <= phi - 0.25 * alpha * decrement + 4.0 * f64::EPSILON * phi.abs() {
                        c = cn;
                        t = tn;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                stuck = true;
                centered = decrement < 1e-6;
                break;
            }
        }
        if stuck && m / tau <= 1e-6 {
            // no further progress in double precision; report a padded gap
            return Ok(finish(c, iterations, true, 2.0 * m / tau));
        }
        if !centered {
            return Ok(finish(c, iterations, false, m / tau));
        }
        if m / tau < opts.gap_tol {
            return Ok(finish(c, iterations, true, m / tau));
        }
        tau *= 10.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_directions() {
        let p = AffinePsdProblem::new(SymMatrix::<f64>::identity(2), vec![]);
        let r = max_min_eig(&p).unwrap();
        assert_eq!(r.status, SliceStatus::Feasible);
        assert!((r.t_star - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bounded_by_fixed_block() {
        let p = AffinePsdProblem::new(
            SymMatrix::from_diag(&[1.0f64, -1.0]),
            vec![SymMatrix::from_diag(&[0.0, 1.0])],
        );
        let r = max_min_eig(&p).unwrap();
        assert_eq!(r.status, SliceStatus::Feasible);
        assert!(r.t_star >= 0.0 && r.t_star <= 1.0 + 1e-12);
        assert!((r.t_star - 1.0).abs() < 1e-6);
        assert!(r.c_star[0] >= 1.0);
    }

    #[test]
    fn infeasible_off_diagonal_shift() {
        // diag(1, -1) + c·(e1e2ᵀ + e2e1ᵀ): eigenvalues ±sqrt(1 + c²), best is c = 0
        let mut m = SymMatrix::<f64>::zeros(2);
        m.set(0, 1, 1.0);
        let p = AffinePsdProblem::new(SymMatrix::from_diag(&[1.0, -1.0]), vec![m]);
        let r = max_min_eig(&p).unwrap();
        assert_eq!(r.status, SliceStatus::Infeasible);
        assert!((r.t_star + 1.0).abs() < 1e-6);
    }

    #[test]
    fn soundness_and_determinism() {
        let mut m1 = SymMatrix::<f64>::zeros(3);
        m1.set(0, 2, 1.0);
        let m2 = SymMatrix::from_diag(&[1.0, -1.0, 0.0]);
        let base = SymMatrix::from_rows(&[
            vec![0.5, 0.2, 0.9],
            vec![0.2, 0.1, 0.0],
            vec![0.9, 0.0, 0.4],
        ])
        .unwrap();
        let p = AffinePsdProblem::new(base, vec![m1, m2]);
        let a = max_min_eig(&p).unwrap();
        let b = max_min_eig(&p).unwrap();
        assert_eq!(a.c_star, b.c_star);
        assert_eq!(a.t_star.to_bits(), b.t_star.to_bits());
        let lam = sym_eigen(&a.g).values[0];
        assert!(lam >= a.t_star - p.tolerance);
        assert_eq!(a.status, SliceStatus::Feasible);
    }

    #[test]
    fn size_mismatch() {
        let p = AffinePsdProblem::new(SymMatrix::<f64>::identity(2), vec![SymMatrix::identity(3)]);
        assert!(matches!(max_min_eig(&p), Err(Error::DimensionMismatch(_))));
    }
}
