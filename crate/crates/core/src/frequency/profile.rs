use alloc::vec::Vec;

use crate::error::{input, param, Error, Result};
use crate::fields::Field;
use crate::math;
use crate::point::{Dim, Point};
use crate::quadrature::Rules;

use super::moments::{radial_moments, RadialSample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrequencyKind {
    /// `r D / I`
    Classical,
    /// `r H / I`
    Drift,
    /// `r^{p-1} Dp / Ip`
    P,
    /// `r Dp / Ip`
    PTilde,
}

impl FrequencyKind {
    pub const ALL: [FrequencyKind; 4] = [FrequencyKind::Classical, FrequencyKind::Drift, FrequencyKind::P, FrequencyKind::PTilde];

    pub fn name(self) -> &'static str {
        match self {
            FrequencyKind::Classical => "classical",
            FrequencyKind::Drift => "drift",
            FrequencyKind::P => "p",
            FrequencyKind::PTilde => "p_tilde",
        }
    }
}

/// Relative floor below which the denominator counts as zero.
pub const FREQUENCY_FLOOR: f64 = 1e-14;

/// Evaluates one of the frequency functions on a sample.
///
/// The value is undefined when the denominator is not positive, when it is
/// below `FREQUENCY_FLOOR` times the numerator's magnitude, or when the
/// quotient is not finite. The drift frequency may be negative.
pub fn frequency_value(sample: &RadialSample, kind: FrequencyKind) -> Result<f64> {
    let r = sample.r;
    let (num, den) = match kind {
        FrequencyKind::Classical => (r * sample.d, sample.i),
        FrequencyKind::Drift => (r * sample.h, sample.i),
        FrequencyKind::P | FrequencyKind::PTilde => {
            let pm = sample.power.ok_or_else(|| input("p-kind frequency needs a sample computed with p"))?;
            let w = if kind == FrequencyKind::P { math::powf(r, pm.p - 1.0) } else { r };
            (w * pm.dp, pm.ip)
        }
    };
    let value = num / den;
    if !(den > 0.0) || den <= FREQUENCY_FLOOR * math::abs(num) || !value.is_finite() {
        return Err(Error::FrequencyUndefined { radius: r, mass: den });
    }
    Ok(value)
}

/// Samples on increasing radii about a fixed center. Radii whose moments
/// could not be computed are kept in `failures`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub center: Point,
    pub dim: Dim,
    pub p: Option<f64>,
    pub samples: Vec<RadialSample>,
    pub failures: Vec<(f64, Error)>,
}

impl RadialProfile {
    /// Assembles a profile from per-radius results given in radius order.
    pub fn assemble(center: Point, p: Option<f64>, results: Vec<(f64, Result<RadialSample>)>) -> Result<RadialProfile> {
        check_increasing(&results.iter().map(|(r, _)| *r).collect::<Vec<_>>())?;
        let mut samples = Vec::new();
        let mut failures = Vec::new();
        for (r, res) in results {
            match res {
                Ok(s) => samples.push(s),
                Err(e) => failures.push((r, e)),
            }
        }
        Ok(RadialProfile { center, dim: center.dim(), p, samples, failures })
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    pub fn frequencies(&self, kind: FrequencyKind) -> Vec<Result<f64>> {
        self.samples.iter().map(|s| frequency_value(s, kind)).collect()
    }

    /// Index of the sample at radius `r` (relative match `1e-12`).
    pub fn index_of(&self, r: f64) -> Result<usize> {
        self.samples
            .iter()
            .position(|s| math::abs(s.r - r) <= 1e-12 * r.max(1.0))
            .ok_or_else(|| input(alloc::format!("radius {r} is not a sampled radius")))
    }
}

fn check_increasing(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(input("no radii given"));
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(input("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(input("radii must be strictly increasing"));
    }
    Ok(())
}

/// Computes a sample at every radius. Per-radius failures are recorded and
/// the sweep continues.
pub fn sweep_profile<F: Field + ?Sized>(
    field: &F,
    center: &Point,
    radii: &[f64],
    p: Option<f64>,
    rules: &Rules,
) -> Result<RadialProfile> {
    check_increasing(radii)?;
    let results = radii.iter().map(|&r| (r, radial_moments(field, center, r, p, rules))).collect();
    RadialProfile::assemble(*center, p, results)
}

/// `count` radii with equal ratios from `start` to `stop`.
pub fn geometric_radii(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    check_range(start, stop, count)?;
    let ratio = stop / start;
    let last = (count - 1) as f64;
    let mut r: Vec<f64> = (0..count).map(|k| start * math::powf(ratio, k as f64 / last)).collect();
    r[count - 1] = stop;
    Ok(r)
}

/// `count` equally spaced radii from `start` to `stop`.
pub fn linear_radii(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    check_range(start, stop, count)?;
    let step = (stop - start) / (count - 1) as f64;
    let mut r: Vec<f64> = (0..count).map(|k| start + step * k as f64).collect();
    r[count - 1] = stop;
    Ok(r)
}

fn check_range(start: f64, stop: f64, count: usize) -> Result<()> {
    if !(start > 0.0) || !(stop > start) || !stop.is_finite() {
        return Err(param(alloc::format!("need 0 < start < stop, got start = {start}, stop = {stop}")));
    }
    if count < 2 {
        return Err(param("need at least two radii"));
    }
    Ok(())
}
