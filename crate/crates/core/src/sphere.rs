//! Local minimization on the unit sphere.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::poly::HomPoly;
use crate::psd::{sym_eigen, SymMatrix};

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if norm(&v) > 1e-6 {
            return normalize(&v);
        }
    }
}

/// Flip `v` so that its first non-negligible entry is positive.
pub(crate) fn canonical_sign(v: &mut [f64]) {
    if let Some(&x) = v.iter().find(|x| x.abs() > 1e-12) {
        if x < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// Angle between the lines through `a` and `b`.
pub(crate) fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let c = (dot(a, b) / (norm(a) * norm(b))).abs().min(1.0);
    c.acos()
}

/// Projected gradient descent with an adaptive step that halves on failure.
pub(crate) fn descend(
    f: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    start: Vec<f64>,
    iters: usize,
) -> (Vec<f64>, f64) {
    let mut y = normalize(&start);
    let (mut val, mut grad) = f(&y);
    let mut step = 0.1;
    for _ in 0..iters {
        let gy = dot(&grad, &y);
        let tang: Vec<f64> = grad.iter().zip(&y).map(|(g, yi)| g - gy * yi).collect();
        let gn = norm(&tang);
        if gn < 1e-300 {
            break;
        }
        let mut moved = false;
        while step > 1e-16 {
            let cand: Vec<f64> = y.iter().zip(&tang).map(|(a, t)| a - step * t / gn).collect();
            let cand = normalize(&cand);
            let (v, g) = f(&cand);
            if v < val {
                y = cand;
                val = v;
                grad = g;
                step = (step * 2.0).min(1.0);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (y, val)
}

/// A form restricted to the unit sphere, with cached derivatives.
pub(crate) struct SphereForm {
    p: HomPoly<f64>,
    grad: Vec<HomPoly<f64>>,
    hess: Vec<Vec<HomPoly<f64>>>,
    scale: f64,
}

impl SphereForm {
    pub(crate) fn new(p: &HomPoly<f64>) -> Self {
        let n = p.nvars();
        let grad: Vec<HomPoly<f64>> = (0..n).map(|i| p.partial(i)).collect();
        let hess = grad
            .iter()
            .map(|g| (0..n).map(|j| g.partial(j)).collect())
            .collect();
        let scale = p.max_abs_coeff().max(f64::MIN_POSITIVE);
        SphereForm {
            p: p.clone(),
            grad,
            hess,
            scale,
        }
    }

    pub(crate) fn nvars(&self) -> usize {
        self.p.nvars()
    }

    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    pub(crate) fn value(&self, y: &[f64]) -> f64 {
        self.p.eval_f64(y)
    }

    pub(crate) fn gradient(&self, y: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval_f64(y)).collect()
    }

    pub(crate) fn hessian(&self, y: &[f64]) -> Vec<Vec<f64>> {
        self.hess
            .iter()
            .map(|row| row.iter().map(|h| h.eval_f64(y)).collect())
            .collect()
    }

    /// Norm of the tangential gradient at a unit point.
    pub(crate) fn tangent_gradient_norm(&self, y: &[f64]) -> f64 {
        let g = self.gradient(y);
        let gy = dot(&g, y);
        norm(&g.iter().zip(y).map(|(a, b)| a - gy * b).collect::<Vec<_>>())
    }

    /// Orthonormal basis of the tangent plane at the unit point `z`.
    pub(crate) fn tangent_basis(z: &[f64]) -> Vec<Vec<f64>> {
        let n = z.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[a].abs().partial_cmp(&z[b].abs()).unwrap());
        for &k in &order {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let c = dot(&e, z);
            for (ei, zi) in e.iter_mut().zip(z) {
                *ei -= c * zi;
            }
            for b in &basis {
                let c = dot(&e, b);
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= c * bi;
                }
            }
            let nn = norm(&e);
            if nn > 1e-8 {
                basis.push(e.iter().map(|x| x / nn).collect());
            }
            if basis.len() == n - 1 {
                break;
            }
        }
        basis
    }

    /// Tangent-plane Hessian `Uᵀ H U - deg·P(z)·I` at a unit point.
    pub(crate) fn tangent_hessian(&self, z: &[f64], u: &[Vec<f64>]) -> SymMatrix<f64> {
        let h = self.hessian(z);
        let pz = self.value(z);
        let m = u.len();
        let mut out = SymMatrix::zeros(m);
        for a in 0..m {
            let hu: Vec<f64> = h.iter().map(|row| dot(row, &u[a])).collect();
            for b in a..m {
                let mut v = dot(&hu, &u[b]);
                if a == b {
                    v -= self.p.degree() as f64 * pz;
                }
                out.set(a, b, v);
            }
        }
        out
    }

    fn value_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        (self.value(y), self.gradient(y))
    }

    /// Projected descent followed by Newton polishing in tangent coordinates.
    pub(crate) fn local_min(&self, start: Vec<f64>, iters: usize) -> (Vec<f64>, f64) {
        let (y, _) = descend(&|v: &[f64]| self.value_grad(v), start, iters);
        self.polish(y, 200)
    }

    pub(crate) fn polish(&self, mut z: Vec<f64>, iters: usize) -> (Vec<f64>, f64) {
        let mut val = self.value(&z);
        for _ in 0..iters {
            let u = Self::tangent_basis(&z);
            let g = self.gradient(&z);
            let gt: Vec<f64> = u.iter().map(|b| dot(b, &g)).collect();
            if norm(&gt) <= 1e-15 * self.scale {
                break;
            }
            let h = self.tangent_hessian(&z, &u);
            let eig = sym_eigen(&h);
            let floor = 1e-13 * self.scale;
            let mut s = vec![0.0; u.len()];
            let newton = eig.values[0] > -floor;
            for k in 0..eig.values.len() {
                let v = eig.vector(k);
                let coef = dot(&v, &gt);
                let lam = if newton { eig.values[k].max(floor) } else { eig.values[k].abs().max(self.scale) };
                for (si, vi) in s.iter_mut().zip(&v) {
                    *si -= coef / lam * vi;
                }
            }
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let mut cand = z.clone();
                for (b, si) in u.iter().zip(&s) {
                    for (c, bi) in cand.iter_mut().zip(b) {
                        *c += alpha * si * bi;
                    }
                }
                let cand = normalize(&cand);
                let v = self.value(&cand);
                if v < val || (v <= val && self.tangent_gradient_norm(&cand) < norm(&gt)) {
                    z = cand;
                    val = v;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (z, val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn descent_finds_smallest_axis() {
        // 3y1² + y2² + 2y3² on the sphere is minimized at ±e2
        let f = |y: &[f64]| {
            let v = 3.0 * y[0] * y[0] + y[1] * y[1] + 2.0 * y[2] * y[2];
            (v, vec![6.0 * y[0], 2.0 * y[1], 4.0 * y[2]])
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (y, v) = descend(&f, random_unit(&mut rng, 3), 500);
        assert!((v - 1.0).abs() < 1e-10);
        assert!(y[1].abs() > 1.0 - 1e-8);
    }

    #[test]
    fn polishing_reaches_degenerate_zero() {
        // y1⁴ y3² + y2⁶ vanishes at e3 and e1 with quartic growth
        let mut p = HomPoly::<f64>::zero(3, 6);
        p.add_term(Monomial::new(vec![4, 0, 2]), 1.0);
        p.add_term(Monomial::new(vec![0, 6, 0]), 1.0);
        let f = SphereForm::new(&p);
        let (z, v) = f.local_min(vec![0.1, 0.05, 1.0], 500);
        assert!(v < 1e-20, "{v}");
        assert!(f.tangent_gradient_norm(&z) < 1e-12);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let z = normalize(&[1.0, 2.0, -0.5]);
        let u = SphereForm::tangent_basis(&z);
        assert_eq!(u.len(), 2);
        assert!(dot(&u[0], &z).abs() < 1e-14 && dot(&u[1], &z).abs() < 1e-14);
        assert!(dot(&u[0], &u[1]).abs() < 1e-14);
    }

    #[test]
    fn signs_and_angles() {
        let mut v = vec![0.0, -1.0, 2.0];
        canonical_sign(&mut v);
        assert_eq!(v, vec![0.0, 1.0, -2.0]);
        assert!(line_angle(&[1.0, 0.0], &[-1.0, 0.0]) < 1e-12);
    }
}
