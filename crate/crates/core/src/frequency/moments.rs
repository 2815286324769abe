use crate::error::{param, Result};
use crate::fields::Field;
use crate::math;
use crate::point::{dot, Point};
use crate::quadrature::{shell_integrals, sphere_integrals, Rules};

/// `p`-power moments `Ip = ∫_{∂B_r}|u|^p` and `Dp = ∫_{B_r}|∇u|^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerMoments {
    pub p: f64,
    pub ip: f64,
    pub dp: f64,
}

/// Radial data of a field on `B_r(center)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    /// `∫_{∂B_r} u²`
    pub i: f64,
    /// `∫_{B_r} |∇u|²`
    pub d: f64,
    /// `∫_{∂B_r} u u_ν`
    pub h: f64,
    /// `∫_{∂B_r} |∇u|²`
    pub dsurf: f64,
    /// `∫_{∂B_r} u_ν²`
    pub nsurf: f64,
    /// `∫_{B_r} u Δu`
    pub ulap: f64,
    /// `∫_{B_r} ((x - c)·∇u) Δu`
    pub xlap: f64,
    pub power: Option<PowerMoments>,
    /// Absolute residual of the Rellich–Nečas identity on this ball.
    pub rn_residual: f64,
}

impl RadialSample {
    /// `|r·Dsurf - 2r·Nsurf - (n-2)·D|`, the form valid for harmonic `u`.
    pub fn rn_harmonic_form(&self, n: usize) -> f64 {
        let m = (n as f64) - 2.0;
        math::abs(self.r * self.dsurf - 2.0 * self.r * self.nsurf - m * self.d)
    }
}

/// Computes every moment on `B_r(center)` in one pass over the sphere and
/// one pass over the ball.
pub fn radial_moments<F: Field + ?Sized>(
    field: &F,
    center: &Point,
    r: f64,
    p: Option<f64>,
    rules: &Rules,
) -> Result<RadialSample> {
    if center.dim() != field.dim() {
        return Err(param("center and field dimensions differ"));
    }
    if let Some(p) = p {
        if !(p > 1.0) || !p.is_finite() {
            return Err(param(alloc::format!("p must lie in (1, inf), got {p}")));
        }
    }
    field.check_ball(center, r)?;
    let pe = p.unwrap_or(2.0);
    let [i, h, dsurf, nsurf, ip] = sphere_integrals(
        |x, nu| {
            let b = field.eval(x)?;
            let un = dot(&b.grad, nu);
            let u = b.value;
            Ok([u * u, u * un, dot(&b.grad, &b.grad), un * un, math::powf(math::abs(u), pe)])
        },
        center,
        r,
        &rules.sphere,
    )?;
    let [d, ulap, xlap, dp] = shell_integrals(
        |x, _| {
            let b = field.eval(x)?;
            let g2 = dot(&b.grad, &b.grad);
            let xg = dot(&x.sub(center), &b.grad);
            Ok([g2, b.value * b.laplacian, xg * b.laplacian, math::powf(g2, 0.5 * pe)])
        },
        center,
        0.0,
        r,
        &rules.ball,
    )?;
    let m = center.dim().n() as f64 - 2.0;
    // ∫ 2(x·∇u)Δu + (n-2)uΔu  +  ∫_{∂B} |∇u|²(x·ν) - 2(x·∇u)u_ν - (n-2)u u_ν, with x - c = rν
    let rn_residual = math::abs(2.0 * xlap + m * ulap + r * dsurf - 2.0 * r * nsurf - m * h);
    Ok(RadialSample {
        r,
        i,
        d,
        h,
        dsurf,
        nsurf,
        ulap,
        xlap,
        power: p.map(|p| PowerMoments { p, ip, dp }),
        rn_residual,
    })
}
