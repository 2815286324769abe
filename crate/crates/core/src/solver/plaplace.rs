//! Damped Newton minimisation of the regularised `p`-Dirichlet energy
//! `E(u) = Σ_T |T| (|∇u_T|² + ε²)^{p/2}` over continuous piecewise-linear
//! functions on the grid, each cell split along its rising diagonal.
//!
//! For `p = 2` the stiffness matrix of this triangulation is exactly the
//! five-point Laplacian, so the minimiser coincides with the linear solver.

use alloc::vec;
use alloc::vec::Vec;

use super::krylov::{conjugate_gradient, dot, Jacobi, LinearOperator};
use crate::error::{Error, Result};
use crate::math;

/// Smallest accepted step length in the backtracking line search.
pub const MIN_STEP: f64 = 1.0 / (1u32 << 20) as f64;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Copy)]
struct Triangle {
    nodes: [usize; 3],
    /// Index into the two local gradient tables.
    kind: usize,
}

pub(crate) struct PEnergy {
    rows: usize,
    cols: usize,
    h: f64,
    p: f64,
    eps2: f64,
    triangles: Vec<Triangle>,
    /// Unknown index per node, `usize::MAX` on the boundary.
    dof: Vec<usize>,
    interior: Vec<usize>,
}

/// Local gradient vectors (times h) for the two triangle shapes.
const LOCAL: [[[f64; 2]; 3]; 2] = [
    // (a, b, c): q = ((u_b - u_a), (u_c - u_b)) / h
    [[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]],
    // (a, c, d): q = ((u_c - u_d), (u_d - u_a)) / h
    [[0.0, -1.0], [1.0, 0.0], [-1.0, 1.0]],
];

#[derive(Clone, Debug, Default)]
pub struct NewtonTrace {
    /// Regularised energy after each accepted step (first entry: initial guess).
    pub energies: Vec<f64>,
    pub step_lengths: Vec<f64>,
    /// `max |∂E/∂u_i| / h²` at exit.
    pub optimality: f64,
}

impl PEnergy {
    pub(crate) fn new(rows: usize, cols: usize, h: f64, p: f64, eps: f64) -> PEnergy {
        let mut triangles = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
        for j in 0..rows - 1 {
            for i in 0..cols - 1 {
                let a = j * cols + i;
                let (b, c, d) = (a + 1, a + cols + 1, a + cols);
                triangles.push(Triangle { nodes: [a, b, c], kind: 0 });
                triangles.push(Triangle { nodes: [a, c, d], kind: 1 });
            }
        }
        let mut dof = vec![usize::MAX; rows * cols];
        let mut interior = Vec::new();
        for j in 1..rows - 1 {
            for i in 1..cols - 1 {
                dof[j * cols + i] = interior.len();
                interior.push(j * cols + i);
            }
        }
        PEnergy { rows, cols, h, p, eps2: eps * eps, triangles, dof, interior }
    }

    fn area(&self) -> f64 {
        0.5 * self.h * self.h
    }

    fn grad_of(&self, t: &Triangle, u: &[f64]) -> [f64; 2] {
        let e = &LOCAL[t.kind];
        let mut q = [0.0; 2];
        for (k, &n) in t.nodes.iter().enumerate() {
            q[0] += e[k][0] * u[n];
            q[1] += e[k][1] * u[n];
        }
        [q[0] / self.h, q[1] / self.h]
    }

    pub(crate) fn energy(&self, u: &[f64]) -> f64 {
        let half_p = 0.5 * self.p;
        self.triangles
            .iter()
            .map(|t| {
                let q = self.grad_of(t, u);
                math::powf(q[0] * q[0] + q[1] * q[1] + self.eps2, half_p)
            })
            .sum::<f64>()
            * self.area()
    }

    /// `E(u + t d) - E(u)` evaluated without cancellation.
    fn energy_change(&self, u: &[f64], d: &[f64], t: f64) -> f64 {
        let half_p = 0.5 * self.p;
        let mut acc = 0.0;
        for tri in &self.triangles {
            let q = self.grad_of(tri, u);
            let dq = self.grad_of(tri, d);
            let (dx, dy) = (t * dq[0], t * dq[1]);
            let s0 = q[0] * q[0] + q[1] * q[1] + self.eps2;
            let ds = dx * (2.0 * q[0] + dx) + dy * (2.0 * q[1] + dy);
            if s0 == 0.0 {
                acc += math::powf(ds, half_p);
            } else {
                acc += math::powf(s0, half_p) * math::expm1(half_p * math::ln1p(ds / s0));
            }
        }
        acc * self.area()
    }

    /// Gradient with respect to the interior unknowns.
    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.interior.len()];
        let scale = self.area() * self.p / self.h;
        for t in &self.triangles {
            let q = self.grad_of(t, u);
            let s = q[0] * q[0] + q[1] * q[1] + self.eps2;
            let f = scale * math::powf(s, 0.5 * self.p - 1.0);
            let e = &LOCAL[t.kind];
            for (k, &n) in t.nodes.iter().enumerate() {
                let d = self.dof[n];
                if d != usize::MAX {
                    g[d] += f * (e[k][0] * q[0] + e[k][1] * q[1]);
                }
            }
        }
        g
    }

    /// Per-triangle 2x2 Hessian blocks `(xx, xy, yy)` of the energy density.
    fn hessian_blocks(&self, u: &[f64]) -> Vec<[f64; 3]> {
        let p = self.p;
        self.triangles
            .iter()
            .map(|t| {
                let q = self.grad_of(t, u);
                let s = q[0] * q[0] + q[1] * q[1] + self.eps2;
                let c = self.area() * p * math::powf(s, 0.5 * p - 2.0);
                let k = p - 2.0;
                [c * (s + k * q[0] * q[0]), c * k * q[0] * q[1], c * (s + k * q[1] * q[1])]
            })
            .collect()
    }

    fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.rows * self.cols];
        for (d, &n) in self.interior.iter().enumerate() {
            full[n] = x[d];
        }
        full
    }

    /// Runs damped Newton from `u` (full grid, boundary already set).
    pub(crate) fn minimise(
        &self,
        u: &mut [f64],
        tol: f64,
        max_newton: usize,
        max_krylov: usize,
        damping: f64,
    ) -> Result<NewtonTrace> {
        let mut trace = NewtonTrace { energies: vec![self.energy(u)], ..Default::default() };
        let h2 = self.h * self.h;
        for it in 0..=max_newton {
            let g = self.gradient(u);
            let opt = g.iter().fold(0.0f64, |m, v| m.max(math::abs(*v))) / h2;
            trace.optimality = opt;
            if opt <= tol {
                return Ok(trace);
            }
            if it == max_newton {
                break;
            }
            let blocks = self.hessian_blocks(u);
            let op = NewtonOperator { energy: self, blocks: &blocks };
            let diag = op.diagonal();
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let mut dir = vec![0.0; g.len()];
            match conjugate_gradient(&op, &Jacobi(&diag), &rhs, &mut dir, 1e-12, max_krylov) {
                Ok(_) => {}
                // an inexact Newton direction from CG is still a descent direction
                Err(Error::NonConvergence { .. }) if dot(&dir, &g) < 0.0 => {}
                Err(e) => return Err(e),
            }
            let slope = dot(&dir, &g);
            let full_dir = self.expand(&dir);
            let mut t = damping;
            loop {
                let de = self.energy_change(u, &full_dir, t);
                if de <= ARMIJO * t * slope {
                    for (ui, di) in u.iter_mut().zip(&full_dir) {
                        *ui += t * di;
                    }
                    let last = *trace.energies.last().unwrap_or(&0.0);
                    trace.energies.push(last + de);
                    trace.step_lengths.push(t);
                    break;
                }
                t *= 0.5;
                if t < MIN_STEP {
                    return Err(Error::NonConvergence { iterations: it + 1, residual: opt });
                }
            }
        }
        Err(Error::NonConvergence { iterations: max_newton, residual: trace.optimality })
    }
}

struct NewtonOperator<'a> {
    energy: &'a PEnergy,
    blocks: &'a [[f64; 3]],
}

impl NewtonOperator<'_> {
    fn diagonal(&self) -> Vec<f64> {
        let e = self.energy;
        let mut diag = vec![0.0; e.interior.len()];
        let ih2 = 1.0 / (e.h * e.h);
        for (t, m) in e.triangles.iter().zip(self.blocks) {
            let loc = &LOCAL[t.kind];
            for (k, &n) in t.nodes.iter().enumerate() {
                let d = e.dof[n];
                if d != usize::MAX {
                    let [a, b] = loc[k];
                    diag[d] += ih2 * (a * a * m[0] + 2.0 * a * b * m[1] + b * b * m[2]);
                }
            }
        }
        diag
    }
}

impl LinearOperator for NewtonOperator<'_> {
    fn len(&self) -> usize {
        self.energy.interior.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let e = self.energy;
        let full = e.expand(x);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (t, m) in e.triangles.iter().zip(self.blocks) {
            let dq = e.grad_of(t, &full);
            let f = [m[0] * dq[0] + m[1] * dq[1], m[1] * dq[0] + m[2] * dq[1]];
            let loc = &LOCAL[t.kind];
            for (k, &n) in t.nodes.iter().enumerate() {
                let d = e.dof[n];
                if d != usize::MAX {
                    y[d] += (loc[k][0] * f[0] + loc[k][1] * f[1]) / e.h;
                }
            }
        }
    }
}
