use core::f64::consts::PI;

use super::*;
use crate::error::Error;
use crate::fields::{make_field, Bundle, Field, FieldSpec, HarmonicBasis, Hessian, ScalarField};
use crate::point::{Dim, Point};
use crate::quadrature::Rules;
use crate::Result;

fn planar(k: u32) -> ScalarField {
    make_field(FieldSpec::planar(k, HarmonicBasis::Cos), Dim::Two).unwrap()
}

fn x1() -> ScalarField {
    make_field(FieldSpec::Affine { coeffs: [1.0, 0.0, 0.0], constant: 0.0 }, Dim::Two).unwrap()
}

fn constant(c: f64) -> ScalarField {
    make_field(FieldSpec::constant(c), Dim::Two).unwrap()
}

fn drift_exp() -> ScalarField {
    make_field(FieldSpec::DriftExponential { b: [1.0, 0.0, 0.0] }, Dim::Two).unwrap()
}

fn o2() -> Point {
    Point::origin(Dim::Two)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `a·u + c·v`.
struct Sum<'a>(f64, &'a ScalarField, f64, &'a ScalarField);

impl Field for Sum<'_> {
    fn dim(&self) -> Dim {
        self.1.dim()
    }
    fn eval(&self, x: &Point) -> Result<Bundle> {
        let (u, v) = (self.1.eval(x)?, self.3.eval(x)?);
        let (a, c) = (self.0, self.2);
        Ok(Bundle {
            value: a * u.value + c * v.value,
            grad: [0, 1, 2].map(|i| a * u.grad[i] + c * v.grad[i]),
            laplacian: a * u.laplacian + c * v.laplacian,
        })
    }
    fn hessian(&self, x: &Point) -> Result<Hessian> {
        let (u, v) = (self.1.hessian(x)?, self.3.hessian(x)?);
        Ok([0, 1, 2].map(|i| [0, 1, 2].map(|j| self.0 * u[i][j] + self.2 * v[i][j])))
    }
    fn check_ball(&self, center: &Point, r: f64) -> Result<()> {
        self.1.check_ball(center, r)?;
        self.3.check_ball(center, r)
    }
}

#[test]
fn moments_of_degree_two_harmonic() {
    let s = radial_moments(&planar(2), &o2(), 1.0, None, &Rules::for_dim(Dim::Two)).unwrap();
    for (got, want) in [(s.i, PI), (s.d, 2.0 * PI), (s.h, 2.0 * PI), (s.dsurf, 8.0 * PI), (s.nsurf, 4.0 * PI)] {
        assert!(close(got, want, 1e-13), "{got} vs {want}");
    }
}

#[test]
fn moments_of_constant() {
    let s = radial_moments(&constant(5.0), &o2(), 0.7, None, &Rules::for_dim(Dim::Two)).unwrap();
    assert!(close(s.i, 25.0 * 2.0 * PI * 0.7, 1e-14));
    assert_eq!((s.d, s.h), (0.0, 0.0));
    assert_eq!(frequency_value(&s, FrequencyKind::Classical).unwrap(), 0.0);
}

#[test]
fn p_moments_of_linear_field() {
    let s = radial_moments(&x1(), &o2(), 1.0, Some(3.0), &Rules::for_dim(Dim::Two)).unwrap();
    let pm = s.power.unwrap();
    assert!(close(pm.dp, PI, 1e-13));
    assert!(close(pm.ip, 8.0 / 3.0, 1e-5));
    assert!(close(frequency_value(&s, FrequencyKind::P).unwrap(), 3.0 * PI / 8.0, 1e-5));
    let fine = Rules::new(Dim::Two, crate::quadrature::QuadratureOrders { order2d: 4096, ..Default::default() }).unwrap();
    let s = radial_moments(&x1(), &o2(), 1.0, Some(3.0), &fine).unwrap();
    assert!(close(s.power.unwrap().ip, 8.0 / 3.0, 1e-10));
}

#[test]
fn degree_law_and_floor() {
    let rules = Rules::for_dim(Dim::Two);
    let s = radial_moments(&planar(3), &o2(), 0.4, None, &rules).unwrap();
    assert!(close(frequency_value(&s, FrequencyKind::Classical).unwrap(), 3.0, 1e-10));
    let zero = radial_moments(&constant(0.0), &o2(), 0.4, None, &rules).unwrap();
    assert!(matches!(frequency_value(&zero, FrequencyKind::Classical), Err(Error::FrequencyUndefined { .. })));
    assert!(frequency_value(&s, FrequencyKind::P).is_err());
}

#[test]
fn sweep_rejects_unordered_radii_and_records_failures() {
    let rules = Rules::for_dim(Dim::Two);
    assert!(matches!(sweep_profile(&planar(1), &o2(), &[0.5, 0.4], None, &rules), Err(Error::InvalidInput(_))));
    let pr = make_field(FieldSpec::PRadial { p: 3.0, r_min: 0.1 }, Dim::Two).unwrap();
    let c = Point::xy(1.0, 0.0);
    let prof = sweep_profile(&pr, &c, &[0.2, 0.5, 0.95], None, &rules).unwrap();
    assert_eq!(prof.samples.len(), 2);
    assert_eq!(prof.failures.len(), 1);
    let prof = sweep_profile(&planar(1), &o2(), &geometric_radii(0.2, 1.0, 5).unwrap(), None, &rules).unwrap();
    assert!(prof.frequencies(FrequencyKind::Classical).iter().all(|f| close(*f.as_ref().unwrap(), 1.0, 1e-12)));
    let prof = sweep_profile(&drift_exp(), &o2(), &linear_radii(0.1, 0.5, 5).unwrap(), None, &rules).unwrap();
    assert!(prof.frequencies(FrequencyKind::Drift).iter().all(|f| f.as_ref().unwrap().is_finite()));
}

#[test]
fn radius_grids() {
    let g = geometric_radii(0.1, 1.0, 3).unwrap();
    assert!(close(g[1], 0.1f64.sqrt(), 1e-15) && g[2] == 1.0);
    assert!(geometric_radii(1.0, 1.0, 3).is_err());
    assert!(linear_radii(0.5, 1.0, 1).is_err());
}

#[test]
fn rellich_necas_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let rn = rellich_necas_residual(&planar(2), &o2(), 1.0, &rules).unwrap();
    assert!(rn.general < 1e-10 && rn.harmonic_form < 1e-10);
    let x1_3d = make_field(FieldSpec::Affine { coeffs: [1.0, 0.0, 0.0], constant: 0.0 }, Dim::Three).unwrap();
    let rn = rellich_necas_residual(&x1_3d, &Point::origin(Dim::Three), 1.0, &Rules::for_dim(Dim::Three)).unwrap();
    assert!(rn.harmonic_form < 1e-10);
    let rn = rellich_necas_residual(&drift_exp(), &Point::xy(0.1, 0.2), 0.6, &rules).unwrap();
    assert!(rn.general < 1e-10 * rn.scale, "{rn:?}");
}

#[test]
fn identity_checks_pass_on_exact_fields() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.2, 1.0, 12).unwrap();
    for field in [planar(2), constant(3.0), x1()] {
        let prof = sweep_profile(&field, &Point::xy(0.1, -0.2), &radii, None, &rules).unwrap();
        let reps = identity_checks(&prof).unwrap();
        assert_eq!(reps.len(), 3 * radii.len());
        for r in &reps {
            assert!(r.passed(), "{r:?}");
        }
    }
    let drift = sweep_profile(&drift_exp(), &o2(), &linear_radii(0.1, 0.5, 9).unwrap(), None, &rules).unwrap();
    assert!(identity_checks(&drift).unwrap().iter().all(|r| r.passed()));
    let short = sweep_profile(&planar(2), &o2(), &[0.5, 1.0], None, &rules).unwrap();
    assert!(identity_checks(&short).is_err());
}

#[test]
fn monotone_frequency_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.1, 1.0, 15).unwrap();
    let prof = sweep_profile(&planar(2), &o2(), &radii, None, &rules).unwrap();
    assert!(check_monotone_F(&prof, 1e-10).passed());
    let (a, b) = (x1(), planar(2));
    let mixed = Sum(1.0, &a, 0.1, &b);
    let prof = sweep_profile(&mixed, &o2(), &radii, None, &rules).unwrap();
    let rep = check_monotone_F(&prof, 1e-10);
    assert!(rep.passed() && rep.margin > 0.0);
    let f = prof.frequencies(FrequencyKind::Classical);
    assert!(close(*f[0].as_ref().unwrap(), 1.0, 1e-2) && *f[14].as_ref().unwrap() < 2.0);
    let zero = sweep_profile(&constant(0.0), &o2(), &radii, None, &rules).unwrap();
    assert_eq!(check_monotone_F(&zero, 1e-10).status, Status::Fail);
}

#[test]
fn harnack_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.5, 1.0, 9).unwrap();
    let prof = sweep_profile(&planar(2), &o2(), &radii, None, &rules).unwrap();
    let reps = check_harnack(&prof, 0.5, 1.0, 1e-9).unwrap();
    assert!(reps.iter().all(|r| r.passed()));
    assert!(close(reps[0].lhs, PI, 1e-12) && close(reps[0].rhs, PI, 1e-12));
    let prof = sweep_profile(&constant(2.0), &o2(), &radii, None, &rules).unwrap();
    let reps = check_harnack(&prof, 0.5, 1.0, 1e-9).unwrap();
    assert!(reps.iter().all(|r| r.passed() && close(r.lhs, r.rhs, 1e-12)));
    let prof = sweep_profile(&drift_exp(), &o2(), &radii, None, &rules).unwrap();
    assert!(check_harnack(&prof, 0.5, 1.0, 1e-9).unwrap().iter().all(|r| r.passed()));
    assert!(check_harnack(&prof, 0.55, 1.0, 1e-9).is_err());
    let zero = sweep_profile(&constant(0.0), &o2(), &radii, None, &rules).unwrap();
    assert!(matches!(check_harnack(&zero, 0.5, 1.0, 1e-9), Err(Error::Degenerate(_))));
}

#[test]
fn representation_and_vanishing_order() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.25, 1.0, 9).unwrap();
    let prof = sweep_profile(&planar(2), &o2(), &radii, None, &rules).unwrap();
    assert!(representation_I(&prof, 0.5, 1.0, 1e-12).unwrap().passed());
    let (gamma, beta, rep) = vanishing_order(&prof, 1.0, 1e-12).unwrap();
    assert!(close(beta, 4.0, 1e-12) && close(gamma, PI, 1e-12) && rep.passed());
    let prof = sweep_profile(&x1(), &o2(), &radii, None, &rules).unwrap();
    let (gamma, beta, rep) = vanishing_order(&prof, 1.0, 1e-12).unwrap();
    assert!(close(beta, 2.0, 1e-12) && close(gamma, prof.samples[8].i, 1e-12) && rep.passed());
    let prof = sweep_profile(&constant(1.5), &o2(), &radii, None, &rules).unwrap();
    assert!(representation_I(&prof, 0.25, 1.0, 1e-12).unwrap().passed());
    let (_, beta, rep) = vanishing_order(&prof, 1.0, 1e-12).unwrap();
    assert!(beta == 0.0 && rep.passed());
}

#[test]
fn representation_tolerance_tracks_trapezoid_error() {
    let rules = Rules::for_dim(Dim::Two);
    let coarse = sweep_profile(&drift_exp(), &o2(), &geometric_radii(0.05, 0.4, 5).unwrap(), None, &rules).unwrap();
    let fine = sweep_profile(&drift_exp(), &o2(), &geometric_radii(0.05, 0.4, 41).unwrap(), None, &rules).unwrap();
    let a = representation_I(&coarse, 0.05, 0.4, 1e-12).unwrap();
    let b = representation_I(&fine, 0.05, 0.4, 1e-12).unwrap();
    assert!(a.passed() && b.passed());
    let (ea, eb) = (a.meta("trapezoid_err").unwrap(), b.meta("trapezoid_err").unwrap());
    assert!(ea > 0.0 && eb < ea / 50.0, "{ea} {eb}");
    assert!(b.lhs < a.lhs);
    let flat = sweep_profile(&planar(3), &o2(), &geometric_radii(0.2, 1.0, 4).unwrap(), None, &rules).unwrap();
    assert!(representation_I(&flat, 0.2, 1.0, 1e-12).unwrap().meta("trapezoid_err").unwrap() < 1e-12);
}

#[test]
fn growth_bound_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let c = drift_constants(1.0, 1.0, Dim::Two, 0.9).unwrap();
    let radii = geometric_radii(0.05, c.r2, 10).unwrap();
    let prof = sweep_profile(&drift_exp(), &o2(), &radii, None, &rules).unwrap();
    let reps = check_growth_bound(&prof, &c, 1e-9).unwrap();
    assert_eq!(reps.len(), 4);
    assert!(reps.iter().all(|r| r.passed()), "{reps:?}");

    let h = DriftConstants::harmonic(Dim::Two, 1.0, 1.0).unwrap();
    let radii = geometric_radii(0.1, 1.0, 10).unwrap();
    for field in [planar(3), constant(2.0)] {
        let prof = sweep_profile(&field, &o2(), &radii, None, &rules).unwrap();
        assert!(check_growth_bound(&prof, &h, 1e-9).unwrap().iter().all(|r| r.passed()));
    }

    let big = drift_constants(3.0, 1.0, Dim::Two, 0.9).unwrap();
    let prof = sweep_profile(&drift_exp(), &o2(), &radii, None, &rules).unwrap();
    assert!(matches!(check_growth_bound(&prof, &big, 1e-9), Err(Error::Precondition(_))));
}

#[test]
fn weak_doubling_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = linear_radii(0.2, 0.5, 301).unwrap();
    let prof = sweep_profile(&x1(), &o2(), &radii, Some(3.0), &rules).unwrap();
    let (r_star, rep) = check_weak_doubling(&prof, 4.0).unwrap();
    assert!(rep.passed());
    assert!(close(r_star / 0.2, 2f64.sqrt(), 5e-3), "{r_star}");
    let radii = linear_radii(0.1, 0.3, 21).unwrap();
    let prof = sweep_profile(&constant(1.0), &o2(), &radii, Some(2.0), &rules).unwrap();
    let (r_star, rep) = check_weak_doubling(&prof, 4.0).unwrap();
    assert!(rep.passed() && r_star == 0.3);
    let prof = sweep_profile(&x1(), &o2(), &radii, None, &rules).unwrap();
    assert!(check_weak_doubling(&prof, 4.0).is_err());
}

#[test]
fn scaling_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let radii = [0.2, 0.3, 0.45];
    for tau in [1.0, 2.0] {
        let reps = check_scaling(&planar(3), &Point::xy(0.05, 0.1), tau, &radii, FrequencyKind::Classical, None, &rules, 1e-9).unwrap();
        assert!(reps.iter().all(|r| r.passed()));
    }
    let reps = check_scaling(&x1(), &Point::xy(0.1, 0.0), 2.0, &radii, FrequencyKind::PTilde, Some(3.0), &rules, 1e-9).unwrap();
    assert!(reps.iter().all(|r| r.passed()));
    assert!(check_scaling(&x1(), &o2(), 2.0, &radii, FrequencyKind::P, None, &rules, 1e-9).is_err());
}

#[test]
fn poincare_examples() {
    let rules = Rules::for_dim(Dim::Two);
    let ramp = make_field(FieldSpec::Ramp { coeffs: [1.0, 0.0, 0.0], power: 1.0 }, Dim::Two).unwrap();
    let (ratio, rep) = poincare_ratio(&ramp, &o2(), 1.0, 0.5, 1.0, &rules).unwrap();
    assert!(close(ratio, 0.25, 1e-12) && rep.passed(), "{ratio}");
    let bump = make_field(FieldSpec::Ramp { coeffs: [0.0, 2.0, 0.0], power: 3.0 }, Dim::Two).unwrap();
    let (ratio, rep) = poincare_ratio(&bump, &o2(), 0.5, 0.5, 1.0, &rules).unwrap();
    assert!(ratio < 1.0 && rep.passed());
    assert!(matches!(poincare_ratio(&constant(0.0), &o2(), 1.0, 0.5, 1.0, &rules), Err(Error::Degenerate(_))));
    assert!(matches!(poincare_ratio(&x1(), &o2(), 1.0, 0.5, 1.0, &rules), Err(Error::Precondition(_))));
}
