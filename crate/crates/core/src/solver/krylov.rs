//! Matrix-free Krylov solvers on flat vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub(crate) trait LinearOperator {
    fn len(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub(crate) trait Preconditioner {
    fn solve(&self, r: &[f64], z: &mut [f64]);
}

#[cfg(test)]
pub(crate) struct Identity;

#[cfg(test)]
impl Preconditioner for Identity {
    fn solve(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

pub(crate) struct Jacobi<'a>(pub &'a [f64]);

impl Preconditioner for Jacobi<'_> {
    fn solve(&self, r: &[f64], z: &mut [f64]) {
        for ((z, r), d) in z.iter_mut().zip(r).zip(self.0) {
            *z = r / d;
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct KrylovStats {
    pub iterations: usize,
    /// Relative residual `|b - Ax| / |b|` recomputed at exit.
    pub residual: f64,
}

fn true_residual<A: LinearOperator>(a: &A, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let mut ax = vec![0.0; b.len()];
    a.apply(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    norm(&r) / bnorm
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub(crate) fn conjugate_gradient<A: LinearOperator, P: Preconditioner>(
    a: &A,
    pre: &P,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<KrylovStats> {
    let n = a.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats { iterations: 0, residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for (r, b) in r.iter_mut().zip(b) {
        *r = b - *r;
    }
    let mut z = vec![0.0; n];
    pre.solve(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = norm(&r) / bnorm;
    for it in 0..max_iter {
        if rel <= tol {
            return Ok(KrylovStats { iterations: it, residual: true_residual(a, b, x, bnorm) });
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NonConvergence { iterations: it, residual: rel });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / bnorm;
        pre.solve(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if rel <= tol {
        return Ok(KrylovStats { iterations: max_iter, residual: true_residual(a, b, x, bnorm) });
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: rel })
}

/// BiCGStab for general nonsymmetric `a`.
pub(crate) fn bicgstab<A: LinearOperator>(a: &A, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<KrylovStats> {
    let n = a.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats { iterations: 0, residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for (r, b) in r.iter_mut().zip(b) {
        *r = b - *r;
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = norm(&r) / bnorm;
    for it in 0..max_iter {
        if rel <= tol {
            return Ok(KrylovStats { iterations: it, residual: true_residual(a, b, x, bnorm) });
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::NonConvergence { iterations: it, residual: rel });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        a.apply(&p, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return Ok(KrylovStats { iterations: it + 1, residual: true_residual(a, b, x, bnorm) });
        }
        a.apply(&s, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm(&r) / bnorm;
    }
    if rel <= tol {
        return Ok(KrylovStats { iterations: max_iter, residual: true_residual(a, b, x, bnorm) });
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: rel })
}
