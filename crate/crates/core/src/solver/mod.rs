//! Finite-difference Dirichlet solvers on squares.
//!
//! * Laplace: five-point stencil, conjugate gradients with an SSOR
//!   preconditioner.
//! * Constant drift `Δu = b·∇u`: five-point Laplacian plus centred first
//!   differences, BiCGStab.
//! * `p`-Laplace: damped Newton on the regularised P1 energy.

mod grid;
mod krylov;
mod plaplace;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub use grid::{GridInterpolant, GridSolution};
pub use plaplace::{NewtonTrace, MIN_STEP};

use crate::error::{param, Result};
#[cfg(test)]
use crate::error::Error;
use crate::fields::{make_field, Field, FieldSpec, ScalarField};
use crate::math;
use crate::point::{Dim, Point};
use krylov::{bicgstab, conjugate_gradient, LinearOperator, Preconditioner};

/// The closed square `[lo, hi]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Square {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BvpEquation {
    Laplace,
    /// `Δu = b·∇u` with constant `b`.
    Drift { b: [f64; 2] },
    /// `∇·(|∇u|^{p-2}∇u) = 0`, regularised with `ε`.
    PLaplace { p: f64, epsilon: f64 },
}

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// A Dirichlet problem on a square grid with boundary data `boundary(x, y)`.
pub struct Bvp<G> {
    pub square: Square,
    pub h: f64,
    pub equation: BvpEquation,
    pub boundary: G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrylovMethod {
    /// CG for symmetric systems, BiCGStab otherwise.
    Auto,
    ConjugateGradient,
    BiCgStab,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative residual for linear solves; optimality tolerance for Newton.
    pub tol: f64,
    /// Krylov iteration cap.
    pub max_iter: usize,
    /// Initial Newton step length (1 = undamped first trial).
    pub damping: f64,
    pub newton_max_iter: usize,
    pub method: KrylovMethod,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 50_000, damping: 1.0, newton_max_iter: 100, method: KrylovMethod::Auto }
    }
}

struct Layout {
    n: usize,
    h: f64,
    lo: f64,
}

impl Layout {
    fn new(square: Square, h: f64) -> Result<Layout> {
        let width = square.hi - square.lo;
        if !(width > 0.0) || !width.is_finite() {
            return Err(param(alloc::format!("empty square [{}, {}]", square.lo, square.hi)));
        }
        if !(h > 0.0) {
            return Err(param(alloc::format!("grid spacing must be positive, got {h}")));
        }
        let n = math::round(width / h);
        if math::abs(n * h - width) > 1e-9 * width {
            return Err(param(alloc::format!("spacing {h} does not divide the side length {width}")));
        }
        let n = n as usize;
        if n < 4 {
            return Err(param("grid must have at least 9 interior points"));
        }
        Ok(Layout { n, h: width / n as f64, lo: square.lo })
    }

    fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.h
    }
}

/// Five-point operator `4u - Σ` plus centred drift terms, scaled by `h²`.
struct FivePoint {
    nx: usize,
    ny: usize,
    /// Neighbour coefficients (E, W, N, S).
    c: [f64; 4],
}

impl FivePoint {
    fn new(nx: usize, ny: usize, h: f64, b: [f64; 2]) -> FivePoint {
        let hb = [0.5 * h * b[0], 0.5 * h * b[1]];
        FivePoint { nx, ny, c: [-1.0 + hb[0], -1.0 - hb[0], -1.0 + hb[1], -1.0 - hb[1]] }
    }
}

impl LinearOperator for FivePoint {
    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let [ce, cw, cn, cs] = self.c;
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut v = 4.0 * x[k];
                if i + 1 < nx {
                    v += ce * x[k + 1];
                }
                if i > 0 {
                    v += cw * x[k - 1];
                }
                if j + 1 < ny {
                    v += cn * x[k + nx];
                }
                if j > 0 {
                    v += cs * x[k - nx];
                }
                y[k] = v;
            }
        }
    }
}

/// Symmetric SOR sweep pair for the plain five-point Laplacian.
struct Ssor {
    nx: usize,
    ny: usize,
    omega: f64,
}

impl Preconditioner for Ssor {
    fn solve(&self, r: &[f64], z: &mut [f64]) {
        let (nx, ny, w) = (self.nx, self.ny, self.omega);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut s = r[k];
                if i > 0 {
                    s += w * z[k - 1];
                }
                if j > 0 {
                    s += w * z[k - nx];
                }
                z[k] = 0.25 * s;
            }
        }
        for v in z.iter_mut() {
            *v *= 4.0;
        }
        for j in (0..ny).rev() {
            for i in (0..nx).rev() {
                let k = j * nx + i;
                let mut s = z[k];
                if i + 1 < nx {
                    s += w * z[k + 1];
                }
                if j + 1 < ny {
                    s += w * z[k + nx];
                }
                z[k] = 0.25 * s;
            }
        }
        let scale = w * (2.0 - w);
        for v in z.iter_mut() {
            *v *= scale;
        }
    }
}

/// Full grid with boundary data and a transfinite (Coons) interior guess.
fn initial_grid<G>(layout: &Layout, boundary: &G) -> Result<Vec<f64>>
where
    G: Fn(f64, f64) -> Result<f64>,
{
    let m = layout.n + 1;
    let mut u = vec![0.0; m * m];
    for k in 0..m {
        let t = layout.coord(k);
        let (lo, hi) = (layout.coord(0), layout.coord(layout.n));
        u[k] = boundary(t, lo)?;
        u[(m - 1) * m + k] = boundary(t, hi)?;
        u[k * m] = boundary(lo, t)?;
        u[k * m + m - 1] = boundary(hi, t)?;
    }
    let last = m - 1;
    for j in 1..last {
        let t = j as f64 / last as f64;
        for i in 1..last {
            let s = i as f64 / last as f64;
            let edges = (1.0 - t) * u[i] + t * u[last * m + i] + (1.0 - s) * u[j * m] + s * u[j * m + last];
            let corners = (1.0 - s) * (1.0 - t) * u[0]
                + s * (1.0 - t) * u[last]
                + (1.0 - s) * t * u[last * m]
                + s * t * u[last * m + last];
            u[j * m + i] = edges - corners;
        }
    }
    Ok(u)
}

/// Extra solver output that does not belong on [`GridSolution`].
#[derive(Clone, Debug, Default)]
pub struct SolveTrace {
    /// Present for `p`-Laplace solves.
    pub newton: Option<NewtonTrace>,
}

/// Solves the boundary value problem; see [`solve_with_trace`].
pub fn solve<G>(bvp: &Bvp<G>, opts: &SolveOptions) -> Result<GridSolution>
where
    G: Fn(f64, f64) -> Result<f64>,
{
    solve_with_trace(bvp, opts).map(|(s, _)| s)
}

pub fn solve_with_trace<G>(bvp: &Bvp<G>, opts: &SolveOptions) -> Result<(GridSolution, SolveTrace)>
where
    G: Fn(f64, f64) -> Result<f64>,
{
    let layout = Layout::new(bvp.square, bvp.h)?;
    if !(opts.tol > 0.0) {
        return Err(param("solver tolerance must be positive"));
    }
    let m = layout.n + 1;
    let h = layout.h;
    let mut u = initial_grid(&layout, &bvp.boundary)?;
    let (residual, iterations, trace) = match bvp.equation {
        BvpEquation::Laplace => {
            let (r, it) = linear_solve(&mut u, m, h, [0.0, 0.0], opts, true)?;
            (r, it, SolveTrace::default())
        }
        BvpEquation::Drift { b } => {
            if b.iter().any(|c| !c.is_finite()) {
                return Err(param("drift vector must be finite"));
            }
            let peclet = 0.5 * h * math::sqrt(b[0] * b[0] + b[1] * b[1]);
            if peclet >= 1.0 {
                return Err(param(alloc::format!("mesh Péclet number |b|h/2 = {peclet} must be < 1")));
            }
            let (r, it) = linear_solve(&mut u, m, h, b, opts, false)?;
            (r, it, SolveTrace::default())
        }
        BvpEquation::PLaplace { p, epsilon } => {
            if !(p > 1.0) || !p.is_finite() {
                return Err(param(alloc::format!("p must lie in (1, inf), got {p}")));
            }
            if !(epsilon >= 0.0) {
                return Err(param("regularisation must be non-negative"));
            }
            if !(opts.damping > 0.0 && opts.damping <= 1.0) {
                return Err(param("damping must lie in (0, 1]"));
            }
            let energy = plaplace::PEnergy::new(m, m, h, p, epsilon);
            let tr = energy.minimise(&mut u, opts.tol, opts.newton_max_iter, opts.max_iter, opts.damping)?;
            let it = tr.step_lengths.len();
            (tr.optimality, it, SolveTrace { newton: Some(tr) })
        }
    };
    let lo = layout.lo;
    let sol = GridSolution::from_values(m, m, h, lo, lo, u)?.with_stats(residual, iterations);
    Ok((sol, trace))
}

fn linear_solve(u: &mut [f64], m: usize, h: f64, b: [f64; 2], opts: &SolveOptions, symmetric: bool) -> Result<(f64, usize)> {
    let nx = m - 2;
    let op = FivePoint::new(nx, nx, h, b);
    let [ce, cw, cn, cs] = op.c;
    // boundary contributions move to the right-hand side
    let mut rhs = vec![0.0; nx * nx];
    let mut x = vec![0.0; nx * nx];
    for j in 0..nx {
        for i in 0..nx {
            let (gi, gj) = (i + 1, j + 1);
            let k = j * nx + i;
            let mut s = 0.0;
            if i + 1 == nx {
                s -= ce * u[gj * m + gi + 1];
            }
            if i == 0 {
                s -= cw * u[gj * m + gi - 1];
            }
            if j + 1 == nx {
                s -= cn * u[(gj + 1) * m + gi];
            }
            if j == 0 {
                s -= cs * u[(gj - 1) * m + gi];
            }
            rhs[k] = s;
            x[k] = u[gj * m + gi];
        }
    }
    let method = match opts.method {
        KrylovMethod::Auto if symmetric => KrylovMethod::ConjugateGradient,
        KrylovMethod::Auto => KrylovMethod::BiCgStab,
        KrylovMethod::ConjugateGradient if !symmetric => {
            return Err(param("conjugate gradients need the symmetric (drift-free) system"))
        }
        other => other,
    };
    let stats = match method {
        KrylovMethod::ConjugateGradient => {
            let omega = 2.0 / (1.0 + math::sin(core::f64::consts::PI / (nx + 1) as f64));
            let pre = Ssor { nx, ny: nx, omega };
            conjugate_gradient(&op, &pre, &rhs, &mut x, opts.tol, opts.max_iter)?
        }
        _ => bicgstab(&op, &rhs, &mut x, opts.tol, opts.max_iter)?,
    };
    for j in 0..nx {
        for i in 0..nx {
            u[(j + 1) * m + i + 1] = x[j * nx + i];
        }
    }
    Ok((stats.residual, stats.iterations))
}

/// Wraps a solution as a grid-backed field.
pub fn to_field(sol: GridSolution) -> Result<ScalarField> {
    make_field(FieldSpec::GridBacked(Arc::new(sol)), Dim::Two)
}

/// Maximum nodal error against `exact` over all grid nodes.
pub fn max_nodal_error<F: Field + ?Sized>(sol: &GridSolution, exact: &F) -> Result<f64> {
    let mut err = 0.0f64;
    for j in 0..sol.rows() {
        for i in 0..sol.cols() {
            let (x, y) = sol.node(i, j);
            let e = exact.eval(&Point::xy(x, y))?.value;
            err = err.max(math::abs(sol.at(i, j) - e));
        }
    }
    Ok(err)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub spacings: Vec<f64>,
    pub max_errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for successive halvings.
    pub orders: Vec<f64>,
}

/// Solves on `h0, h0/2, …` (`levels` grids) with boundary data taken from
/// `exact` and reports observed orders of the maximum nodal error.
pub fn convergence_study<F: Field + ?Sized>(
    square: Square,
    equation: BvpEquation,
    h0: f64,
    levels: usize,
    exact: &F,
    opts: &SolveOptions,
) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(param("a convergence study needs at least two grids"));
    }
    if exact.dim() != Dim::Two {
        return Err(param("grid solvers are planar"));
    }
    let mut study = ConvergenceStudy { spacings: Vec::new(), max_errors: Vec::new(), orders: Vec::new() };
    for level in 0..levels {
        let h = h0 / (1u64 << level) as f64;
        let bvp = Bvp { square, h, equation, boundary: |x: f64, y: f64| Ok(exact.eval(&Point::xy(x, y))?.value) };
        let sol = solve(&bvp, opts)?;
        study.spacings.push(sol.h());
        study.max_errors.push(max_nodal_error(&sol, exact)?);
    }
    study.orders = study.max_errors.windows(2).map(|w| math::log2(w[0] / w[1])).collect();
    Ok(study)
}
