use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::math;
use crate::point::Dim;

use super::profile::{frequency_value, FrequencyKind, RadialProfile};
use super::report::VerificationReport;

/// Constants of the growth bound `F(r) <= (ρ/r)^α F(ρ) + β((ρ/r)^α - 1)`
/// for solutions of `Δu = b·∇u` with `M = ‖b‖∞`, valid for radii up to `r2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftConstants {
    pub m: f64,
    pub cp: f64,
    pub dim: Dim,
    pub safety: f64,
    pub r2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl DriftConstants {
    fn with_r2(m: f64, cp: f64, dim: Dim, safety: f64, r2: f64) -> DriftConstants {
        let n = dim.n() as f64;
        let mr = m * r2;
        DriftConstants { m, cp, dim, safety, r2, alpha: (n - 2.0 + 6.0 * mr).max(n - 1.0), beta: 2.0 * mr * mr / (n - 1.0) }
    }

    /// Caps `r2` at `r_max` (for instance the domain size) and recomputes
    /// `α` and `β`.
    pub fn capped(self, r_max: f64) -> Result<DriftConstants> {
        if !(r_max > 0.0) {
            return Err(param("radius cap must be positive"));
        }
        Ok(DriftConstants::with_r2(self.m, self.cp, self.dim, self.safety, self.r2.min(r_max)))
    }

    /// The `M = 0` limit with `r2 = r_max`: `α = n - 1`, `β = 0`.
    pub fn harmonic(dim: Dim, cp: f64, r_max: f64) -> Result<DriftConstants> {
        if !(r_max > 0.0) || !(cp > 0.0) {
            return Err(param("radius cap and C_p must be positive"));
        }
        Ok(DriftConstants::with_r2(0.0, cp, dim, 1.0, r_max))
    }
}

/// `r2 = safety / (2 √C_p M)`, `α = max(n - 2 + 6 M r2, n - 1)`,
/// `β = 2 (M r2)² / (n - 1)`.
pub fn drift_constants(m: f64, cp: f64, dim: Dim, safety: f64) -> Result<DriftConstants> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(param(format!("M must be positive and finite, got {m}")));
    }
    if !(cp > 0.0) || !cp.is_finite() {
        return Err(param(format!("C_p must be positive and finite, got {cp}")));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(param(format!("safety factor must lie in (0, 1), got {safety}")));
    }
    let r2 = safety / (2.0 * math::sqrt(cp) * m);
    Ok(DriftConstants::with_r2(m, cp, dim, safety, r2))
}

/// Growth-bound battery on a profile with radii `<= r2`, using the drift
/// frequency:
///
/// * `growth.fineq`: worst sampled pair `r < ρ` of the integrated inequality
/// * `growth.sup_F`: `sup F <= (r_last/r_first)^α F(r_last) + β((r_last/r_first)^α - 1)`
/// * `growth.flux_nonneg`: `H(r) >= 0`, worst radius
/// * `growth.energy_flux`: `D(r) <= 2H(r)`, worst radius
///
/// `tol` is relative to the size of each right-hand side (at least 1).
pub fn check_growth_bound(profile: &RadialProfile, c: &DriftConstants, tol: f64) -> Result<Vec<VerificationReport>> {
    let s = &profile.samples;
    if s.is_empty() {
        return Err(Error::InvalidInput("empty profile".into()));
    }
    if let Some(q) = s.iter().find(|q| q.r > c.r2 * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!("radius {} exceeds r2 = {}", q.r, c.r2)));
    }
    let f = s
        .iter()
        .map(|q| {
            if !(q.i > 0.0) {
                return Err(Error::Precondition(format!("boundary mass vanishes at r = {}", q.r)));
            }
            frequency_value(q, FrequencyKind::Drift)
        })
        .collect::<Result<Vec<f64>>>()?;
    let bound = |r: f64, rho: f64, f_rho: f64| {
        let q = math::powf(rho / r, c.alpha);
        q * f_rho + c.beta * (q - 1.0)
    };
    let scaled = |rhs: f64| tol * math::abs(rhs).max(1.0);
    let constants = |rep: VerificationReport| {
        rep.with_meta("alpha", c.alpha).with_meta("beta", c.beta).with_meta("r2", c.r2)
    };

    let mut out = Vec::new();
    let mut worst: Option<VerificationReport> = None;
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            let rhs = bound(s[a].r, s[b].r, f[b]);
            let rep = VerificationReport::inequality("growth.fineq", f[a], rhs, scaled(rhs)).at(s[a].r).with_meta("rho", s[b].r);
            if worst.as_ref().map_or(true, |w| rep.margin + rep.tolerance < w.margin + w.tolerance) {
                worst = Some(rep);
            }
        }
    }
    if let Some(w) = worst {
        out.push(constants(w));
    }

    let (first, last) = (s[0].r, s[s.len() - 1].r);
    let sup = f.iter().copied().fold(f64::MIN, f64::max);
    let rhs = bound(first, last, f[f.len() - 1]);
    out.push(constants(VerificationReport::inequality("growth.sup_F", sup, rhs, scaled(rhs))));

    let k = (0..s.len()).min_by(|&a, &b| s[a].h.total_cmp(&s[b].h)).expect("non-empty");
    out.push(VerificationReport::inequality("growth.flux_nonneg", 0.0, s[k].h, scaled(s[k].d)).at(s[k].r));

    let k = (0..s.len())
        .min_by(|&a, &b| (2.0 * s[a].h - s[a].d).total_cmp(&(2.0 * s[b].h - s[b].d)))
        .expect("non-empty");
    out.push(VerificationReport::inequality("growth.energy_flux", s[k].d, 2.0 * s[k].h, scaled(2.0 * s[k].h)).at(s[k].r));
    Ok(out)
}
