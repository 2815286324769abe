//! Exact and grid-backed scalar fields with first and second derivatives.

use alloc::format;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;
use crate::point::{dot, Dim, Point};
use crate::poly::{planar_harmonic, solid_harmonic, Poly};
use crate::solver::{GridInterpolant, GridSolution};

/// Value, gradient and Laplacian of a field at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bundle {
    pub value: f64,
    /// Padded gradient; components beyond the dimension are zero.
    pub grad: [f64; 3],
    pub laplacian: f64,
}

pub type Hessian = [[f64; 3]; 3];

/// Anything that can be sampled by the quadrature and frequency code.
pub trait Field {
    fn dim(&self) -> Dim;

    fn eval(&self, x: &Point) -> Result<Bundle>;

    fn hessian(&self, x: &Point) -> Result<Hessian>;

    /// Succeeds when the closed ball `B_r(center)` lies in the admissible domain.
    fn check_ball(&self, center: &Point, r: f64) -> Result<()>;
}

impl<F: Field + ?Sized> Field for &F {
    fn dim(&self) -> Dim {
        (**self).dim()
    }
    fn eval(&self, x: &Point) -> Result<Bundle> {
        (**self).eval(x)
    }
    fn hessian(&self, x: &Point) -> Result<Hessian> {
        (**self).hessian(x)
    }
    fn check_ball(&self, center: &Point, r: f64) -> Result<()> {
        (**self).check_ball(center, r)
    }
}

/// Basis selector for homogeneous harmonic polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicBasis {
    /// `r^k cos kθ` in the plane.
    Cos,
    /// `r^k sin kθ` in the plane.
    Sin,
    /// Real solid harmonic of order `m` in space, `-k <= m <= k`.
    Solid(i32),
}

#[derive(Clone, Debug)]
pub enum FieldSpec {
    HarmonicPolynomial { degree: u32, basis: HarmonicBasis },
    /// `a·x + constant`; `coeffs` is padded to three components.
    Affine { coeffs: [f64; 3], constant: f64 },
    /// `exp(b·x)`, which solves `Δu = b·∇u`.
    DriftExponential { b: [f64; 3] },
    /// `|x|^((p-n)/(p-1))` on `{|x| >= r_min}`, p-harmonic away from the origin.
    PRadial { p: f64, r_min: f64 },
    /// `max(a·x, 0)^power`, a Sobolev function vanishing on a half space.
    Ramp { coeffs: [f64; 3], power: f64 },
    GridBacked(Arc<GridSolution>),
}

impl FieldSpec {
    pub fn constant(c: f64) -> FieldSpec {
        FieldSpec::Affine { coeffs: [0.0; 3], constant: c }
    }

    pub fn planar(degree: u32, basis: HarmonicBasis) -> FieldSpec {
        FieldSpec::HarmonicPolynomial { degree, basis }
    }
}

pub const DEFAULT_P_RADIAL_R_MIN: f64 = 0.1;

fn fmt_vec(f: &mut fmt::Formatter<'_>, v: &[f64]) -> fmt::Result {
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Repr {
    Poly { u: Poly, grad: [Poly; 3], hess: [[Poly; 3]; 3] },
    Affine { a: [f64; 3], c: f64 },
    DriftExp { b: [f64; 3] },
    PRadial { exponent: f64, r_min: f64 },
    Ramp { a: [f64; 3], q: f64 },
    Grid(Arc<GridInterpolant>),
}

/// An immutable field built from a [`FieldSpec`].
#[derive(Clone, Debug)]
pub struct ScalarField {
    spec: FieldSpec,
    dim: Dim,
    repr: Repr,
}

fn check_padding(dim: Dim, v: &[f64; 3], what: &str) -> Result<()> {
    if dim == Dim::Two && v[2] != 0.0 {
        return Err(Error::InvalidSpec(format!("{what} has a third component in 2D")));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec(format!("{what} must be finite")));
    }
    Ok(())
}

/// Builds a field, validating the specification against the dimension.
pub fn make_field(spec: FieldSpec, dim: Dim) -> Result<ScalarField> {
    let repr = match &spec {
        FieldSpec::HarmonicPolynomial { degree, basis } => {
            let u = match (dim, basis) {
                (Dim::Two, HarmonicBasis::Cos) => planar_harmonic(*degree, false),
                (Dim::Two, HarmonicBasis::Sin) => planar_harmonic(*degree, true),
                (Dim::Three, HarmonicBasis::Solid(m)) => {
                    solid_harmonic(*degree, *m).map_err(|e| Error::InvalidSpec(format!("{e}")))?
                }
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "basis {basis:?} not available in {}D",
                        dim.n()
                    )))
                }
            };
            let grad = [u.derivative(0), u.derivative(1), u.derivative(2)];
            let hess = [0, 1, 2].map(|i| [0, 1, 2].map(|j| grad[i].derivative(j)));
            Repr::Poly { u, grad, hess }
        }
        FieldSpec::Affine { coeffs, constant } => {
            check_padding(dim, coeffs, "affine coefficients")?;
            Repr::Affine { a: *coeffs, c: *constant }
        }
        FieldSpec::DriftExponential { b } => {
            check_padding(dim, b, "drift vector")?;
            Repr::DriftExp { b: *b }
        }
        FieldSpec::PRadial { p, r_min } => {
            let n = dim.n() as f64;
            if !(*p > 1.0) || !p.is_finite() {
                return Err(Error::InvalidSpec(format!("p-radial needs 1 < p < inf, got {p}")));
            }
            if *p == n {
                return Err(Error::InvalidSpec(format!(
                    "p-radial profile is logarithmic for p = n = {n}; excluded"
                )));
            }
            if !(*r_min > 0.0) {
                return Err(Error::InvalidSpec(format!("p-radial r_min must be positive, got {r_min}")));
            }
            Repr::PRadial { exponent: (p - n) / (p - 1.0), r_min: *r_min }
        }
        FieldSpec::Ramp { coeffs, power } => {
            check_padding(dim, coeffs, "ramp coefficients")?;
            if !(*power >= 1.0) {
                return Err(Error::InvalidSpec(format!("ramp power must be >= 1, got {power}")));
            }
            Repr::Ramp { a: *coeffs, q: *power }
        }
        FieldSpec::GridBacked(sol) => {
            if dim != Dim::Two {
                return Err(Error::InvalidSpec("grid-backed fields are planar".into()));
            }
            Repr::Grid(Arc::new(GridInterpolant::new(sol.clone())))
        }
    };
    Ok(ScalarField { spec, dim, repr })
}

/// Value, gradient and Laplacian of `field` at `x`.
pub fn eval_bundle<F: Field + ?Sized>(field: &F, x: &Point) -> Result<Bundle> {
    field.eval(x)
}

impl ScalarField {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Whether the field solves the Laplace equation on its domain.
    pub fn is_harmonic(&self) -> bool {
        match &self.spec {
            FieldSpec::HarmonicPolynomial { .. } | FieldSpec::Affine { .. } => true,
            FieldSpec::DriftExponential { b } => b.iter().all(|c| *c == 0.0),
            _ => false,
        }
    }

    pub fn domain_note(&self) -> alloc::string::String {
        match &self.repr {
            Repr::PRadial { r_min, .. } => format!("annulus |x| >= {r_min}"),
            Repr::Grid(g) => {
                let (lo, hi) = g.admissible_box();
                format!("grid interior [{}, {}] x [{}, {}]", lo[0], hi[0], lo[1], hi[1])
            }
            _ => "all of R^n".into(),
        }
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::Domain { point: x.array(), reason: "dimension mismatch" });
        }
        if let Repr::PRadial { r_min, .. } = self.repr {
            if x.norm() < r_min {
                return Err(Error::Domain { point: x.array(), reason: "inside the excluded core ball" });
            }
        }
        Ok(())
    }
}

impl Field for ScalarField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn eval(&self, x: &Point) -> Result<Bundle> {
        self.check_point(x)?;
        let p = x.array();
        Ok(match &self.repr {
            Repr::Poly { u, grad, hess } => Bundle {
                value: u.eval(&p),
                grad: [grad[0].eval(&p), grad[1].eval(&p), grad[2].eval(&p)],
                laplacian: hess[0][0].eval(&p) + hess[1][1].eval(&p) + hess[2][2].eval(&p),
            },
            Repr::Affine { a, c } => Bundle { value: dot(a, &p) + c, grad: *a, laplacian: 0.0 },
            Repr::DriftExp { b } => {
                let e = math::exp(dot(b, &p));
                Bundle { value: e, grad: b.map(|bi| bi * e), laplacian: dot(b, b) * e }
            }
            Repr::PRadial { exponent: a, .. } => {
                let rho = x.norm();
                let ra2 = math::powf(rho, a - 2.0);
                let n = self.dim.n() as f64;
                Bundle {
                    value: ra2 * rho * rho,
                    grad: p.map(|c| a * ra2 * c),
                    laplacian: a * ra2 * (n + a - 2.0),
                }
            }
            Repr::Ramp { a, q } => {
                let s = dot(a, &p);
                if s > 0.0 {
                    let sq1 = math::powf(s, q - 1.0);
                    let lap = if *q == 1.0 { 0.0 } else { q * (q - 1.0) * math::powf(s, q - 2.0) * dot(a, a) };
                    Bundle { value: sq1 * s, grad: a.map(|c| q * sq1 * c), laplacian: lap }
                } else if s == 0.0 && *q == 1.0 {
                    // one-sided gradients average across the kink
                    Bundle { value: 0.0, grad: a.map(|c| 0.5 * c), laplacian: 0.0 }
                } else {
                    Bundle { value: 0.0, grad: [0.0; 3], laplacian: 0.0 }
                }
            }
            Repr::Grid(g) => g.bundle(p[0], p[1])?,
        })
    }

    fn hessian(&self, x: &Point) -> Result<Hessian> {
        self.check_point(x)?;
        let p = x.array();
        Ok(match &self.repr {
            Repr::Poly { hess, .. } => hess.each_ref().map(|row| row.each_ref().map(|h| h.eval(&p))),
            Repr::Affine { .. } => [[0.0; 3]; 3],
            Repr::DriftExp { b } => {
                let e = math::exp(dot(b, &p));
                b.map(|bi| b.map(|bj| bi * bj * e))
            }
            Repr::PRadial { exponent: a, .. } => {
                let rho2 = dot(&p, &p);
                let ra2 = math::powf(rho2, 0.5 * (a - 2.0));
                let mut h = [[0.0; 3]; 3];
                for i in 0..self.dim.n() {
                    for j in 0..self.dim.n() {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        h[i][j] = a * ra2 * (delta + (a - 2.0) * p[i] * p[j] / rho2);
                    }
                }
                h
            }
            Repr::Ramp { a, q } => {
                let s = dot(a, &p);
                if s > 0.0 && *q != 1.0 {
                    let c = q * (q - 1.0) * math::powf(s, q - 2.0);
                    a.map(|ai| a.map(|aj| c * ai * aj))
                } else {
                    [[0.0; 3]; 3]
                }
            }
            Repr::Grid(g) => g.hessian(p[0], p[1])?,
        })
    }

    fn check_ball(&self, center: &Point, r: f64) -> Result<()> {
        let outside = || Error::BallOutsideDomain { center: center.array(), radius: r };
        if center.dim() != self.dim || !(r > 0.0) {
            return Err(outside());
        }
        match &self.repr {
            Repr::PRadial { r_min, .. } if center.norm() - r < *r_min => Err(outside()),
            Repr::Grid(g) => {
                let (lo, hi) = g.admissible_box();
                let c = center.array();
                if (0..2).all(|i| c[i] - r >= lo[i] && c[i] + r <= hi[i]) {
                    Ok(())
                } else {
                    Err(outside())
                }
            }
            _ => Ok(()),
        }
    }
}

/// The field `x ↦ u(τx)`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<F> {
    pub inner: F,
    pub tau: f64,
}

impl<F: Field> Field for Scaled<F> {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    fn eval(&self, x: &Point) -> Result<Bundle> {
        let b = self.inner.eval(&x.scaled(self.tau))?;
        Ok(Bundle {
            value: b.value,
            grad: b.grad.map(|g| self.tau * g),
            laplacian: self.tau * self.tau * b.laplacian,
        })
    }

    fn hessian(&self, x: &Point) -> Result<Hessian> {
        let t2 = self.tau * self.tau;
        Ok(self.inner.hessian(&x.scaled(self.tau))?.map(|row| row.map(|h| t2 * h)))
    }

    fn check_ball(&self, center: &Point, r: f64) -> Result<()> {
        self.inner.check_ball(&center.scaled(self.tau), self.tau * r)
    }
}

/// Differential operator used for residual checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Equation {
    Laplace,
    /// `Δu = b·∇u` with constant `b`.
    Drift { b: [f64; 3] },
    /// `∇·(|∇u|^{p-2}∇u) = 0`; `regularization = Some(ε)` replaces `|∇u|²` by `|∇u|² + ε²`.
    PLaplace { p: f64, regularization: Option<f64> },
}

/// Pointwise residual of `equation` for `field` at `x` (absolute value).
pub fn pde_residual<F: Field + ?Sized>(field: &F, x: &Point, equation: &Equation) -> Result<f64> {
    let b = field.eval(x)?;
    match equation {
        Equation::Laplace => Ok(math::abs(b.laplacian)),
        Equation::Drift { b: drift } => Ok(math::abs(b.laplacian - dot(drift, &b.grad))),
        Equation::PLaplace { p, regularization } => {
            let g2 = dot(&b.grad, &b.grad);
            let s = match regularization {
                Some(eps) => g2 + eps * eps,
                None if g2 == 0.0 => return Err(Error::DegeneratePoint),
                None => g2,
            };
            let h = field.hessian(x)?;
            let mut hgg = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    hgg += b.grad[i] * h[i][j] * b.grad[j];
                }
            }
            // div(|∇u|^{p-2}∇u) = |∇u|^{p-2} (Δu + (p-2) ∇uᵀH∇u / |∇u|²)
            let val = math::powf(s, 0.5 * (p - 2.0)) * (b.laplacian + (p - 2.0) * hgg / s);
            Ok(math::abs(val))
        }
    }
}

impl fmt::Display for ScalarField {
    /// Canonical catalog name, parseable by [`crate::catalog::parse_field`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim.n();
        match &self.spec {
            FieldSpec::HarmonicPolynomial { degree, basis } => match basis {
                HarmonicBasis::Cos => write!(f, "harmonic:2d:k={degree}:cos"),
                HarmonicBasis::Sin => write!(f, "harmonic:2d:k={degree}:sin"),
                HarmonicBasis::Solid(m) => write!(f, "harmonic:3d:k={degree}:m={m}"),
            },
            FieldSpec::Affine { coeffs, constant } if coeffs.iter().all(|&c| c == 0.0) => {
                write!(f, "constant:c={constant}:n={n}")
            }
            FieldSpec::Affine { coeffs, constant } => {
                f.write_str("affine:a=")?;
                fmt_vec(f, &coeffs[..n])?;
                write!(f, ":c={constant}")
            }
            FieldSpec::DriftExponential { b } => {
                f.write_str("drift-exp:b=")?;
                fmt_vec(f, &b[..n])
            }
            FieldSpec::PRadial { p, r_min } => write!(f, "p-radial:p={p}:n={n}:rmin={r_min}"),
            FieldSpec::Ramp { coeffs, power } => {
                f.write_str("ramp:a=")?;
                fmt_vec(f, &coeffs[..n])?;
                write!(f, ":q={power}")
            }
            FieldSpec::GridBacked(sol) => write!(f, "grid:{}x{}:h={}", sol.cols(), sol.rows(), sol.h()),
        }
    }
}
