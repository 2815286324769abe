//! Radial moments, frequency functions and the checks built on them.

mod checks;
mod drift;
mod moments;
mod profile;
mod report;

pub use checks::{
    check_harnack, check_monotone_F, check_scaling, check_weak_doubling, identity_checks, identity_checks_with_floor, poincare_ratio,
    rellich_necas_residual, representation_I, vanishing_order, RnResidual, DEFAULT_CP, DEFAULT_GAMMA0, DEFAULT_REL_TOL,
};
pub use drift::{check_growth_bound, drift_constants, DriftConstants};
pub use moments::{radial_moments, PowerMoments, RadialSample};
pub use profile::{
    frequency_value, geometric_radii, linear_radii, sweep_profile, FrequencyKind, RadialProfile, FREQUENCY_FLOOR,
};
pub use report::{Status, VerificationReport};

#[cfg(test)]
mod tests;
