use alloc::format;
use alloc::vec::Vec;

use crate::error::{input, Error, Result};
use crate::fields::{Field, Scaled};
use crate::math;
use crate::point::{dot, Point};
use crate::quadrature::{shell_integrals, Rules};

use super::moments::radial_moments;
use super::profile::{frequency_value, FrequencyKind, RadialProfile};
use super::report::{Status, VerificationReport};

/// Default relative tolerance for exact identities evaluated by quadrature.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Safety factor applied to the finite-difference truncation estimate.
pub const FD_SAFETY: f64 = 4.0;
/// Relative floor added to finite-difference tolerances.
pub const FD_REL_FLOOR: f64 = 1e-9;
/// Default Poincaré constant.
pub const DEFAULT_CP: f64 = 1.0;
/// Default zero-set fraction for the Poincaré check.
pub const DEFAULT_GAMMA0: f64 = 0.5;

fn slack(r: f64) -> f64 {
    1e-12 * r.max(1.0)
}

/// Three-point derivative at each node, with a truncation estimate
/// `|f'''/6 · ω'(x_i)|` when at least four nodes are available.
fn fd_derivatives(x: &[f64], f: &[f64]) -> Vec<(f64, Option<f64>)> {
    let m = x.len();
    (0..m)
        .map(|i| {
            let s = i.saturating_sub(1).min(m - 3);
            let idx = [s, s + 1, s + 2];
            let mut d = 0.0;
            for &j in &idx {
                let mut lj = if j == i { 0.0 } else { 1.0 };
                if j == i {
                    for &k in &idx {
                        if k != i {
                            lj += 1.0 / (x[i] - x[k]);
                        }
                    }
                } else {
                    for &k in &idx {
                        if k != j {
                            lj /= x[j] - x[k];
                        }
                        if k != j && k != i {
                            lj *= x[i] - x[k];
                        }
                    }
                }
                d += lj * f[j];
            }
            let err = (m >= 4).then(|| {
                let w = s.min(m - 4);
                let mut dd: Vec<f64> = f[w..w + 4].to_vec();
                for level in 1..4 {
                    for k in 0..4 - level {
                        dd[k] = (dd[k + 1] - dd[k]) / (x[w + k + level] - x[w + k]);
                    }
                }
                let omega: f64 = idx.iter().filter(|&&k| k != i).map(|&k| x[i] - x[k]).product();
                math::abs(dd[0] * omega)
            });
            (d, err)
        })
        .collect()
}

fn fd_tolerance(x: &[f64], i: usize, err: Option<f64>, scale: f64, floor: f64) -> f64 {
    match err {
        Some(e) => FD_SAFETY * e + floor * scale,
        None => {
            let gap = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let q = gap / x[i];
            q * q * scale + floor * scale
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(math::abs(*b)))
}

/// Differential identities along the profile, one report per radius:
///
/// * `identity.I_prime`: `I' = (n-1)/r · I + 2H`
/// * `identity.hardt_lin`: `(r^{2-n} D)' = 2 r^{2-n} Nsurf - 2 r^{1-n} ∫(x·∇u)Δu`
///   (the last term vanishes for harmonic `u`)
/// * `identity.log_I_prime`: `(log I)' = (n-1)/r + 2F/r` with the drift `F`
///
/// Derivatives are three-point finite differences on the sampled radii.
pub fn identity_checks(profile: &RadialProfile) -> Result<Vec<VerificationReport>> {
    identity_checks_with_floor(profile, FD_REL_FLOOR)
}

/// As [`identity_checks`], with relative floor `rel_floor` added to each
/// finite-difference tolerance (useful for grid-backed fields).
pub fn identity_checks_with_floor(profile: &RadialProfile, rel_floor: f64) -> Result<Vec<VerificationReport>> {
    let s = &profile.samples;
    if s.len() < 3 {
        return Err(input("identity checks need at least three samples"));
    }
    let n = profile.dim.n() as f64;
    let x = profile.radii();
    let mut out = Vec::new();

    let fi: Vec<f64> = s.iter().map(|q| q.i).collect();
    for (k, (d, err)) in fd_derivatives(&x, &fi).into_iter().enumerate() {
        let q = &s[k];
        let rhs = (n - 1.0) / q.r * q.i + 2.0 * q.h;
        let scale = max_abs(&[d, (n - 1.0) / q.r * q.i, 2.0 * q.h]);
        out.push(VerificationReport::identity("identity.I_prime", d, rhs, fd_tolerance(&x, k, err, scale, rel_floor)).at(q.r));
    }

    let fd: Vec<f64> = s.iter().map(|q| math::powf(q.r, 2.0 - n) * q.d).collect();
    for (k, (d, err)) in fd_derivatives(&x, &fd).into_iter().enumerate() {
        let q = &s[k];
        let a = 2.0 * math::powf(q.r, 2.0 - n) * q.nsurf;
        let b = 2.0 * math::powf(q.r, 1.0 - n) * q.xlap;
        let scale = max_abs(&[d, a, b]);
        out.push(VerificationReport::identity("identity.hardt_lin", d, a - b, fd_tolerance(&x, k, err, scale, rel_floor)).at(q.r));
    }

    if s.iter().any(|q| !(q.i > 0.0)) {
        for q in s {
            out.push(VerificationReport::skipped("identity.log_I_prime", "boundary mass vanishes on the profile").at(q.r));
        }
    } else {
        let fl: Vec<f64> = s.iter().map(|q| math::ln(q.i)).collect();
        for (k, (d, err)) in fd_derivatives(&x, &fl).into_iter().enumerate() {
            let q = &s[k];
            let rep = match frequency_value(q, FrequencyKind::Drift) {
                Ok(f) => {
                    let rhs = (n - 1.0) / q.r + 2.0 * f / q.r;
                    let scale = max_abs(&[d, (n - 1.0) / q.r, 2.0 * f / q.r]);
                    VerificationReport::identity("identity.log_I_prime", d, rhs, fd_tolerance(&x, k, err, scale, rel_floor))
                }
                Err(e) => VerificationReport::skipped("identity.log_I_prime", format!("{e}")),
            };
            out.push(rep.at(q.r));
        }
    }
    Ok(out)
}

/// Passes when the classical frequency never drops by more than `tol`
/// between consecutive samples. Reports the worst consecutive pair.
#[allow(non_snake_case)]
pub fn check_monotone_F(profile: &RadialProfile, tol: f64) -> VerificationReport {
    const NAME: &str = "monotone_F";
    let s = &profile.samples;
    if s.len() < 2 {
        return VerificationReport::failed(NAME, "need at least two samples");
    }
    let mut f = Vec::with_capacity(s.len());
    for q in s {
        match frequency_value(q, FrequencyKind::Classical) {
            Ok(v) => f.push(v),
            Err(e) => return VerificationReport::failed(NAME, format!("{e}")).at(q.r),
        }
    }
    let k = (0..f.len() - 1)
        .min_by(|&a, &b| (f[a + 1] - f[a]).total_cmp(&(f[b + 1] - f[b])))
        .expect("at least one pair");
    VerificationReport::inequality(NAME, f[k], f[k + 1], tol)
        .at(s[k].r)
        .with_meta("r_next", s[k + 1].r)
        .with_meta("F_first", f[0])
        .with_meta("F_last", f[f.len() - 1])
}

fn window(profile: &RadialProfile, s: f64, t: f64) -> Result<Vec<usize>> {
    if !(s > 0.0 && t > s) {
        return Err(input(format!("need 0 < s < t, got [{s}, {t}]")));
    }
    let idx: Vec<usize> = (0..profile.samples.len())
        .filter(|&k| {
            let r = profile.samples[k].r;
            r >= s - slack(s) && r <= t + slack(t)
        })
        .collect();
    let (Some(&a), Some(&b)) = (idx.first(), idx.last()) else {
        return Err(input(format!("no samples in [{s}, {t}]")));
    };
    let (ra, rb) = (profile.samples[a].r, profile.samples[b].r);
    if math::abs(ra - s) > slack(s) || math::abs(rb - t) > slack(t) {
        return Err(input(format!("[{s}, {t}] must start and end at sampled radii")));
    }
    Ok(idx)
}

/// Harnack-type bounds for the boundary mass on `[s, t]`:
///
/// * `harnack.I`: `max I <= (t/s)^{n-1+2 sup F} min I`
/// * `harnack.averaged`: the same for `I / |∂B_r|` with exponent `2 sup F`
///
/// `F` is the drift frequency sampled on `[s, t]`; when it takes negative
/// values the exponent uses its largest magnitude instead.
pub fn check_harnack(profile: &RadialProfile, s: f64, t: f64, rel_tol: f64) -> Result<Vec<VerificationReport>> {
    let idx = window(profile, s, t)?;
    let n = profile.dim.n() as f64;
    let area = profile.dim.sphere_area();
    let mut f = Vec::new();
    for &k in &idx {
        let q = &profile.samples[k];
        if !(q.i > 0.0) {
            return Err(Error::Degenerate(format!("boundary mass vanishes at r = {}", q.r)));
        }
        f.push(frequency_value(q, FrequencyKind::Drift).map_err(|e| Error::Degenerate(format!("{e}")))?);
    }
    let sup = f.iter().copied().fold(f64::MIN, f64::max);
    let inf = f.iter().copied().fold(f64::MAX, f64::min);
    let ratio = t / s;

    let masses: Vec<f64> = idx.iter().map(|&k| profile.samples[k].i).collect();
    let avgs: Vec<f64> = idx
        .iter()
        .map(|&k| {
            let q = &profile.samples[k];
            q.i / (area * math::powf(q.r, n - 1.0))
        })
        .collect();

    let mut out = Vec::new();
    for (name, vals, exponent) in [
        ("harnack.I", &masses, (n - 1.0 + 2.0 * sup).max(-(n - 1.0 + 2.0 * inf))),
        ("harnack.averaged", &avgs, (2.0 * sup).max(-2.0 * inf)),
    ] {
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        let bound = math::powf(ratio, exponent) * min;
        out.push(
            VerificationReport::inequality(name, max, bound, rel_tol * bound)
                .with_meta("s", s)
                .with_meta("t", t)
                .with_meta("sup_F", sup)
                .with_meta("exponent", exponent),
        );
    }
    Ok(out)
}

/// Reconstructs `I(r)` from `I(R)` and the drift frequency on `[r, R]`:
/// `Î(r) = R^{1-n} I(R) · exp(-2∫_r^R F(t) dt/t) · r^{n-1}`, with the
/// integral evaluated by the trapezoid rule in `log t`.
#[allow(non_snake_case)]
pub fn representation_I(profile: &RadialProfile, r: f64, big_r: f64, rel_tol: f64) -> Result<VerificationReport> {
    let idx = window(profile, r, big_r)?;
    let n = profile.dim.n() as f64;
    let mut f = Vec::with_capacity(idx.len());
    for &k in &idx {
        f.push(frequency_value(&profile.samples[k], FrequencyKind::Drift)?);
    }
    let mut integral = 0.0;
    let mut trap_err = 0.0;
    for j in 0..idx.len() - 1 {
        let (a, b) = (profile.samples[idx[j]].r, profile.samples[idx[j + 1]].r);
        let h = math::ln(b / a);
        integral += 0.5 * (f[j] + f[j + 1]) * h;
        trap_err += h * h * h / 12.0 * math::abs(second_log_derivative(profile, idx[j])?);
    }
    let last = &profile.samples[*idx.last().expect("window is non-empty")];
    let first = &profile.samples[idx[0]];
    let gamma = math::powf(last.r, 1.0 - n) * last.i;
    let reconstructed = gamma * math::exp(-2.0 * integral) * math::powf(first.r, n - 1.0);
    let quad = math::expm1(2.0 * FD_SAFETY * trap_err) * math::abs(reconstructed);
    Ok(VerificationReport::identity("representation_I", reconstructed, first.i, rel_tol * math::abs(first.i) + quad)
        .at(first.r)
        .with_meta("R", last.r)
        .with_meta("gamma", gamma)
        .with_meta("trapezoid_err", trap_err))
}

/// Second derivative of the drift frequency in `log t` near sample `k`,
/// from the closest three samples; zero when fewer than three exist.
fn second_log_derivative(profile: &RadialProfile, k: usize) -> Result<f64> {
    let s = &profile.samples;
    if s.len() < 3 {
        return Ok(0.0);
    }
    let j = k.saturating_sub(1).min(s.len() - 3);
    let x: [f64; 3] = core::array::from_fn(|m| math::ln(s[j + m].r));
    let mut y = [0.0; 3];
    for m in 0..3 {
        y[m] = frequency_value(&s[j + m], FrequencyKind::Drift)?;
    }
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    Ok(2.0 * (d2 - d1) / (x[2] - x[0]))
}

/// Vanishing-order bound from the classical frequency at `R`:
/// `β = 2F(R)`, `γ = I(R) R^{-β-n+1}`, and `I(r) >= γ r^{β+n-1}` for
/// sampled `r <= R`. The report carries the worst radius.
pub fn vanishing_order(profile: &RadialProfile, big_r: f64, rel_tol: f64) -> Result<(f64, f64, VerificationReport)> {
    let kr = profile.index_of(big_r)?;
    let top = &profile.samples[kr];
    let n = profile.dim.n() as f64;
    let beta = 2.0 * frequency_value(top, FrequencyKind::Classical)?;
    let gamma = top.i * math::powf(top.r, -beta - n + 1.0);
    let mut worst: Option<VerificationReport> = None;
    for q in &profile.samples[..=kr] {
        let bound = gamma * math::powf(q.r, beta + n - 1.0);
        let rep = VerificationReport::inequality("vanishing_order", bound, q.i, rel_tol * math::abs(q.i)).at(q.r);
        if worst.as_ref().map_or(true, |w| rep.margin + rep.tolerance < w.margin + w.tolerance) {
            worst = Some(rep);
        }
    }
    let rep = worst.expect("at least one sample").with_meta("beta", beta).with_meta("gamma", gamma).with_meta("R", top.r);
    Ok((gamma, beta, rep))
}

/// Rellich–Nečas residuals on one ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RnResidual {
    /// Full identity, valid for every `C²` field.
    pub general: f64,
    /// `|r·Dsurf - 2r·Nsurf - (n-2)·D|`, valid for harmonic fields.
    pub harmonic_form: f64,
    /// `r·Dsurf`, the natural size of either side.
    pub scale: f64,
}

pub fn rellich_necas_residual<F: Field + ?Sized>(field: &F, center: &Point, r: f64, rules: &Rules) -> Result<RnResidual> {
    let s = radial_moments(field, center, r, None, rules)?;
    Ok(RnResidual { general: s.rn_residual, harmonic_form: s.rn_harmonic_form(center.dim().n()), scale: r * s.dsurf })
}

/// Weak doubling: `r★` is the largest sampled radius with
/// `max Ip <= factor · min Ip` over `[r_b, r★]`, `r_b` the first sample.
/// Passes when `r★ > r_b`.
pub fn check_weak_doubling(profile: &RadialProfile, factor: f64) -> Result<(f64, VerificationReport)> {
    if !(factor > 1.0) {
        return Err(input("doubling factor must exceed 1"));
    }
    let ip: Vec<f64> = profile
        .samples
        .iter()
        .map(|q| q.power.map(|pm| pm.ip).ok_or_else(|| input("weak doubling needs a p-kind profile")))
        .collect::<Result<_>>()?;
    if ip.is_empty() || ip.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("Ip vanishes on the whole profile".into()));
    }
    let mut max = ip[0];
    let mut min = ip[0];
    let mut star = 0;
    for k in 1..ip.len() {
        let (hi, lo) = (max.max(ip[k]), min.min(ip[k]));
        if hi > factor * lo {
            break;
        }
        (max, min, star) = (hi, lo, k);
    }
    let r_b = profile.samples[0].r;
    let r_star = profile.samples[star].r;
    let mut rep = VerificationReport::inequality("weak_doubling", max, factor * min, 0.0)
        .with_meta("r_b", r_b)
        .with_meta("r_star", r_star)
        .with_meta("ratio", r_star / r_b);
    if star == 0 {
        rep.status = Status::Fail;
        rep.note = "doubling fails beyond the first sample".into();
    } else if (0..=star).any(|k| ip[star] > factor * ip[k]) {
        rep.status = Status::Fail;
        rep.note = "Ip(r_star) exceeds factor times Ip(r)".into();
    }
    Ok((r_star, rep))
}

/// Scaling law for `v(x) = u(τx)`: `F^v(r) = F^u(τr)` (ball about `τc`
/// for `u`) for the classical, drift and `p` kinds, and
/// `F̃_p^v(r) = τ^{p-2} F̃_p^u(τr)` for the tilde kind.
#[allow(clippy::too_many_arguments)]
pub fn check_scaling<F: Field + ?Sized>(
    field: &F,
    center: &Point,
    tau: f64,
    radii: &[f64],
    kind: FrequencyKind,
    p: Option<f64>,
    rules: &Rules,
    rel_tol: f64,
) -> Result<Vec<VerificationReport>> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(input(format!("scale factor must be positive, got {tau}")));
    }
    let needs_p = matches!(kind, FrequencyKind::P | FrequencyKind::PTilde);
    if needs_p && p.is_none() {
        return Err(input("p-kind scaling needs p"));
    }
    let p = if needs_p { p } else { None };
    let v = Scaled { inner: field, tau };
    let moved = center.scaled(tau);
    let factor = match (kind, p) {
        (FrequencyKind::PTilde, Some(p)) => math::powf(tau, p - 2.0),
        _ => 1.0,
    };
    let name = format!("scaling.{}", kind.name());
    let mut out = Vec::new();
    for &r in radii {
        let fv = frequency_value(&radial_moments(&v, center, r, p, rules)?, kind)?;
        let fu = frequency_value(&radial_moments(field, &moved, tau * r, p, rules)?, kind)?;
        let rhs = factor * fu;
        let scale = math::abs(rhs).max(math::abs(fv)).max(1.0);
        out.push(VerificationReport::identity(&name, fv, rhs, rel_tol * scale).at(r).with_meta("tau", tau));
    }
    Ok(out)
}

/// `∫_{B_r} u² / (r² ∫_{B_r} |∇u|²)`, checked against `cp` for fields
/// vanishing on at least the fraction `gamma0` of the ball (measured on the
/// quadrature nodes, threshold `1e-12 · max|u|`).
pub fn poincare_ratio<F: Field + ?Sized>(
    field: &F,
    center: &Point,
    r: f64,
    gamma0: f64,
    cp: f64,
    rules: &Rules,
) -> Result<(f64, VerificationReport)> {
    if !(gamma0 > 0.0 && gamma0 <= 1.0) || !(cp > 0.0) {
        return Err(input("need 0 < gamma0 <= 1 and C_p > 0"));
    }
    field.check_ball(center, r)?;
    let mut umax = 0.0f64;
    let [u2, g2, vol] = shell_integrals(
        |x, _| {
            let b = field.eval(x)?;
            umax = umax.max(math::abs(b.value));
            Ok([b.value * b.value, dot(&b.grad, &b.grad), 1.0])
        },
        center,
        0.0,
        r,
        &rules.ball,
    )?;
    let threshold = 1e-12 * umax;
    let [zero] = shell_integrals(
        |x, _| Ok([if math::abs(field.eval(x)?.value) <= threshold { 1.0 } else { 0.0 }]),
        center,
        0.0,
        r,
        &rules.ball,
    )?;
    let fraction = zero / vol;
    if fraction < gamma0 - 1e-12 {
        return Err(Error::Precondition(format!("zero set covers {fraction} of the ball, need {gamma0}")));
    }
    if !(g2 > 0.0) {
        return Err(Error::Degenerate("gradient energy vanishes on the ball".into()));
    }
    let ratio = u2 / (r * r * g2);
    let rep = VerificationReport::inequality("poincare", ratio, cp, 0.0)
        .at(r)
        .with_meta("zero_fraction", fraction)
        .with_meta("gamma0", gamma0);
    Ok((ratio, rep))
}
