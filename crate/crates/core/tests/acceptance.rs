//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use freqlab_core::fields::{HarmonicBasis, Scaled};
use freqlab_core::frequency::{
    check_growth_bound, check_harnack, check_monotone_F, check_scaling, check_weak_doubling, drift_constants,
    frequency_value, geometric_radii, linear_radii, poincare_ratio, radial_moments, rellich_necas_residual,
    representation_I, sweep_profile, vanishing_order, FrequencyKind, RadialProfile,
};
use freqlab_core::quadrature::Rules;
use freqlab_core::solver::{
    convergence_study, max_nodal_error, solve, to_field, Bvp, BvpEquation, GridSolution, SolveOptions, Square,
    DEFAULT_EPSILON,
};
use freqlab_core::{make_field, Dim, Field, FieldSpec, Point, ScalarField};

type Outcome = Result<String, String>;

fn planar(k: u32, basis: HarmonicBasis) -> ScalarField {
    make_field(FieldSpec::planar(k, basis), Dim::Two).unwrap()
}

fn cos_k(k: u32) -> ScalarField {
    planar(k, HarmonicBasis::Cos)
}

fn o2() -> Point {
    Point::origin(Dim::Two)
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_degree_law() -> Outcome {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.1, 1.0, 20).map_err(err)?;
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let prof = sweep_profile(&cos_k(k), &o2(), &radii, None, &rules).map_err(err)?;
        ensure(prof.failures.is_empty(), format!("k={k}: failed radii"))?;
        for f in prof.frequencies(FrequencyKind::Classical) {
            worst = worst.max((f.map_err(err)? - k as f64).abs());
        }
    }
    ensure(worst <= 1e-8, format!("max |F - k| = {worst:e}"))?;
    Ok(format!("max |F - k| = {worst:.2e} over k = 1..3, 20 radii"))
}

fn c2_rellich_necas() -> Outcome {
    let mut worst = 0.0f64;
    let planar_fields = [
        cos_k(1),
        planar(2, HarmonicBasis::Sin),
        cos_k(3),
        planar(4, HarmonicBasis::Sin),
        cos_k(5),
    ];
    let rules2 = Rules::for_dim(Dim::Two);
    for f in &planar_fields {
        for (c, r) in [(o2(), 1.0), (Point::xy(0.2, -0.3), 0.7)] {
            let rn = rellich_necas_residual(f, &c, r, &rules2).map_err(err)?;
            worst = worst.max(rn.harmonic_form / rn.scale);
        }
    }
    let rules3 = Rules::for_dim(Dim::Three);
    for (k, m) in [(2, 1), (3, -2)] {
        let f = make_field(FieldSpec::HarmonicPolynomial { degree: k, basis: HarmonicBasis::Solid(m) }, Dim::Three)
            .map_err(err)?;
        for (c, r) in [(Point::origin(Dim::Three), 1.0), (Point::xyz(0.1, 0.2, -0.1), 0.6)] {
            let rn = rellich_necas_residual(&f, &c, r, &rules3).map_err(err)?;
            worst = worst.max(rn.harmonic_form / rn.scale);
        }
    }
    ensure(worst <= 1e-10, format!("harmonic-form relative residual {worst:e}"))?;
    let drift = make_field(FieldSpec::DriftExponential { b: [1.0, 0.0, 0.0] }, Dim::Two).map_err(err)?;
    let mut general = 0.0f64;
    for r in [0.25, 0.5, 1.0] {
        let rn = rellich_necas_residual(&drift, &Point::xy(0.1, 0.2), r, &rules2).map_err(err)?;
        general = general.max(rn.general);
    }
    ensure(general <= 1e-8, format!("general residual {general:e} for drift-exp"))?;
    Ok(format!("harmonic form {worst:.2e} (relative, 7 fields), general {general:.2e} (drift-exp)"))
}

fn c3_harnack() -> Outcome {
    let radii = geometric_radii(0.5, 1.0, 11).map_err(err)?;
    let prof = sweep_profile(&cos_k(2), &o2(), &radii, None, &Rules::for_dim(Dim::Two)).map_err(err)?;
    let reps = check_harnack(&prof, 0.5, 1.0, 1e-9).map_err(err)?;
    let h = &reps[0];
    let rel = (h.lhs - h.rhs).abs() / h.rhs;
    ensure(reps.iter().all(|r| r.passed()), format!("{reps:?}"))?;
    ensure(rel <= 1e-9, format!("max I = {}, bound = {}, relative gap {rel:e}", h.lhs, h.rhs))?;
    Ok(format!("max I = {:.12}, bound = {:.12}, relative gap {rel:.2e}", h.lhs, h.rhs))
}

fn solve_laplace(square: Square, h: f64, g: impl Fn(f64, f64) -> f64) -> Result<GridSolution, String> {
    let bvp = Bvp { square, h, equation: BvpEquation::Laplace, boundary: |x: f64, y: f64| Ok(g(x, y)) };
    solve(&bvp, &SolveOptions { tol: 1e-12, ..Default::default() }).map_err(err)
}

fn worst_representation(prof: &RadialProfile, big_r: f64) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for s in prof.samples.iter().filter(|s| s.r < big_r) {
        let rep = representation_I(prof, s.r, big_r, 0.0).map_err(err)?;
        worst = worst.max(rep.lhs / s.i);
    }
    Ok(worst)
}

fn c4_representation() -> Outcome {
    let rules = Rules::for_dim(Dim::Two);
    let radii = geometric_radii(0.1, 1.0, 20).map_err(err)?;
    let mut exact = 0.0f64;
    for k in [1, 2, 3] {
        let prof = sweep_profile(&cos_k(k), &o2(), &radii, None, &rules).map_err(err)?;
        exact = exact.max(worst_representation(&prof, 1.0)?);
    }
    ensure(exact <= 1e-6, format!("homogeneous harmonics: relative error {exact:e}"))?;
    let sol = solve_laplace(Square { lo: -1.0, hi: 1.0 }, 1.0 / 256.0, |x, y| x.exp() * y.cos())?;
    let field = to_field(sol).map_err(err)?;
    let c = Point::xy(0.1, -0.05);
    let radii = geometric_radii(0.1, 0.8, 40).map_err(err)?;
    let prof = sweep_profile(&field, &c, &radii, None, &rules).map_err(err)?;
    ensure(prof.failures.is_empty(), format!("grid sweep failures: {:?}", prof.failures))?;
    let grid = worst_representation(&prof, 0.8)?;
    ensure(grid <= 1e-3, format!("grid solution: relative error {grid:e}"))?;
    Ok(format!("harmonics {exact:.2e}, grid (h = 1/256) {grid:.2e}"))
}

fn c5_vanishing_order() -> Outcome {
    let radii = geometric_radii(0.1, 1.0, 20).map_err(err)?;
    let prof = sweep_profile(&cos_k(2), &o2(), &radii, None, &Rules::for_dim(Dim::Two)).map_err(err)?;
    let (gamma, beta, rep) = vanishing_order(&prof, 1.0, 0.0).map_err(err)?;
    ensure((beta - 4.0).abs() <= 1e-8, format!("beta = {beta}"))?;
    ensure((gamma - PI).abs() <= 1e-8, format!("gamma = {gamma}"))?;
    ensure(rep.margin >= -1e-9, format!("worst margin {:e} at r = {:?}", rep.margin, rep.radius))?;
    Ok(format!("beta = {beta:.12}, gamma = {gamma:.12}, worst margin {:.2e}", rep.margin))
}

fn c6_drift_battery() -> Outcome {
    let c = drift_constants(1.0, 1.0, Dim::Two, 0.9).map_err(err)?;
    let field = make_field(FieldSpec::DriftExponential { b: [1.0, 0.0, 0.0] }, Dim::Two).map_err(err)?;
    let mut lines = Vec::new();
    for center in [o2(), Point::xy(0.3, -0.2)] {
        let radii = geometric_radii(0.02, c.r2, 25).map_err(err)?;
        let prof = sweep_profile(&field, &center, &radii, None, &Rules::for_dim(Dim::Two)).map_err(err)?;
        let reps = check_growth_bound(&prof, &c, 0.0).map_err(err)?;
        for rep in &reps {
            ensure(rep.margin >= -1e-6, format!("{} margin {:e}", rep.check, rep.margin))?;
        }
        lines.push(
            reps.iter().map(|r| format!("{} {:.2e}", r.check.trim_start_matches("growth."), r.margin)).collect::<Vec<_>>().join(", "),
        );
    }
    Ok(format!("r2 = {}, alpha = {}, beta = {}; min margins: {}", c.r2, c.alpha, c.beta, lines.join(" | ")))
}

fn c7_scaling() -> Outcome {
    let rules = Rules::for_dim(Dim::Two);
    let radii = [0.15, 0.3, 0.4];
    let drift = make_field(FieldSpec::DriftExponential { b: [1.0, -0.5, 0.0] }, Dim::Two).map_err(err)?;
    let fields = [cos_k(3), drift];
    let center = Point::xy(0.1, 0.05);
    let mut worst = 0.0f64;
    let mut count = 0;
    for tau in [0.5, 2.0] {
        for f in &fields {
            for (kind, p) in [(FrequencyKind::Classical, None), (FrequencyKind::Drift, None), (FrequencyKind::P, Some(3.0))] {
                for rep in check_scaling(f, &center, tau, &radii, kind, p, &rules, 1e-9).map_err(err)? {
                    ensure(rep.passed(), format!("{rep:?}"))?;
                    worst = worst.max(rep.lhs / rep.tolerance * 1e-9);
                    count += 1;
                }
            }
            for p in [1.5, 3.0] {
                for rep in check_scaling(f, &center, tau, &radii, FrequencyKind::PTilde, Some(p), &rules, 1e-9).map_err(err)? {
                    ensure(rep.passed(), format!("{rep:?}"))?;
                    worst = worst.max(rep.lhs / rep.tolerance * 1e-9);
                    count += 1;
                }
            }
        }
    }
    // tilde law spelled out on one sample
    let u = cos_k(3);
    let v = Scaled { inner: &u, tau: 2.0 };
    let fv = frequency_value(&radial_moments(&v, &center, 0.2, Some(3.0), &rules).map_err(err)?, FrequencyKind::PTilde)
        .map_err(err)?;
    let fu = frequency_value(&radial_moments(&u, &center.scaled(2.0), 0.4, Some(3.0), &rules).map_err(err)?, FrequencyKind::PTilde)
        .map_err(err)?;
    ensure((fv - 2.0 * fu).abs() <= 1e-9 * fv.abs().max(1.0), format!("tilde law: {fv} vs 2 * {fu}"))?;
    Ok(format!("{count} comparisons, worst relative gap {worst:.2e}"))
}

fn c8_weak_doubling() -> Outcome {
    let u = make_field(FieldSpec::Affine { coeffs: [1.0, 0.0, 0.0], constant: 0.0 }, Dim::Two).map_err(err)?;
    let radii = linear_radii(0.2, 0.5, 301).map_err(err)?;
    let prof = sweep_profile(&u, &o2(), &radii, Some(3.0), &Rules::for_dim(Dim::Two)).map_err(err)?;
    let (r_star, rep) = check_weak_doubling(&prof, 4.0).map_err(err)?;
    let ratio = r_star / radii[0];
    let target = 4f64.powf(1.0 / 4.0);
    let rel = (ratio - target).abs() / target;
    ensure(rep.passed(), format!("{rep:?}"))?;
    ensure(rel <= 0.02, format!("r*/r_b = {ratio}, expected {target}"))?;
    Ok(format!("r*/r_b = {ratio:.6} (sqrt 2 = {target:.6}, relative gap {rel:.2e})"))
}

fn c9_solver_orders() -> Outcome {
    let square = Square { lo: -1.0, hi: 1.0 };
    let opts = SolveOptions { tol: 1e-13, ..Default::default() };
    let z4 = cos_k(4);
    let lap = convergence_study(square, BvpEquation::Laplace, 0.125, 3, &z4, &opts).map_err(err)?;
    let ex = make_field(FieldSpec::DriftExponential { b: [1.0, 0.0, 0.0] }, Dim::Two).map_err(err)?;
    let drift = convergence_study(square, BvpEquation::Drift { b: [1.0, 0.0] }, 0.125, 3, &ex, &opts).map_err(err)?;
    for (name, st) in [("laplace", &lap), ("drift", &drift)] {
        ensure(st.orders.iter().all(|o| (o - 2.0).abs() <= 0.2), format!("{name} orders {:?}", st.orders))?;
    }

    let z3 = cos_k(3);
    let z3_err = max_nodal_error(
        &solve(&Bvp { square, h: 1.0 / 16.0, equation: BvpEquation::Laplace, boundary: |x: f64, y: f64| Ok(x * x * x - 3.0 * x * y * y) }, &opts)
            .map_err(err)?,
        &z3,
    )
    .map_err(err)?;

    let g = |x: f64, y: f64| Ok(x.exp() * y.cos());
    let nopts = SolveOptions { tol: 1e-12, ..Default::default() };
    let a = solve(&Bvp { square, h: 0.0625, equation: BvpEquation::Laplace, boundary: g }, &nopts).map_err(err)?;
    let b = solve(&Bvp { square, h: 0.0625, equation: BvpEquation::PLaplace { p: 2.0, epsilon: DEFAULT_EPSILON }, boundary: g }, &nopts)
        .map_err(err)?;
    let p2 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(p2 <= 1e-8, format!("p = 2 vs Laplace: {p2:e}"))?;

    let affine = make_field(FieldSpec::Affine { coeffs: [0.8, -0.6, 0.0], constant: 0.3 }, Dim::Two).map_err(err)?;
    let mut aff = 0.0f64;
    for p in [1.5, 3.0] {
        let bvp = Bvp {
            square: Square { lo: 0.5, hi: 1.5 },
            h: 0.0625,
            equation: BvpEquation::PLaplace { p, epsilon: DEFAULT_EPSILON },
            boundary: |x: f64, y: f64| Ok(affine.eval(&Point::xy(x, y))?.value),
        };
        aff = aff.max(max_nodal_error(&solve(&bvp, &nopts).map_err(err)?, &affine).map_err(err)?);
    }
    ensure(aff <= 1e-10, format!("affine data error {aff:e}"))?;
    let fmt = |v: &[f64]| v.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ");
    Ok(format!(
        "laplace (Re z^4) orders [{}], drift orders [{}], Re z^3 error {z3_err:.1e}, p=2 gap {p2:.1e}, affine error {aff:.1e}",
        fmt(&lap.orders),
        fmt(&drift.orders)
    ))
}

fn c10_monotone_on_grid() -> Outcome {
    let square = Square { lo: -1.0, hi: 1.0 };
    let g = |x: f64, y: f64| x * x * x - 3.0 * x * y * y;
    let radii = geometric_radii(0.3, 0.9, 16).map_err(err)?;
    let rules = Rules::for_dim(Dim::Two);
    let mut profiles = Vec::new();
    for h in [1.0 / 64.0, 1.0 / 128.0] {
        let field = to_field(solve_laplace(square, h, g)?).map_err(err)?;
        profiles.push(sweep_profile(&field, &o2(), &radii, None, &rules).map_err(err)?);
    }
    let coarse = profiles[0].frequencies(FrequencyKind::Classical);
    let fine = profiles[1].frequencies(FrequencyKind::Classical);
    let mut estimate = 0.0f64;
    for (a, b) in coarse.iter().zip(&fine) {
        let (a, b) = (a.as_ref().map_err(err)?, b.as_ref().map_err(err)?);
        estimate = estimate.max((a - b).abs());
    }
    let tol = 10.0 * estimate;
    let rep = check_monotone_F(&profiles[1], tol);
    ensure(rep.passed(), format!("{rep:?}"))?;
    Ok(format!("worst step {:.2e} vs tol {tol:.2e} (h = 1/128, estimate from h = 1/64)", rep.margin))
}

fn c11_poincare() -> Outcome {
    let ramp = make_field(FieldSpec::Ramp { coeffs: [1.0, 0.0, 0.0], power: 1.0 }, Dim::Two).map_err(err)?;
    let (ratio, rep) = poincare_ratio(&ramp, &o2(), 1.0, 0.5, 1.0, &Rules::for_dim(Dim::Two)).map_err(err)?;
    ensure((ratio - 0.25).abs() <= 1e-6, format!("ratio = {ratio}"))?;
    ensure(rep.passed(), format!("{rep:?}"))?;
    Ok(format!("ratio = {ratio:.15}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("degree law", c1_degree_law),
        ("Rellich-Necas", c2_rellich_necas),
        ("Harnack equality", c3_harnack),
        ("representation formula", c4_representation),
        ("vanishing order", c5_vanishing_order),
        ("drift battery", c6_drift_battery),
        ("scaling", c7_scaling),
        ("weak doubling", c8_weak_doubling),
        ("solver orders", c9_solver_orders),
        ("monotone F on grid solution", c10_monotone_on_grid),
        ("Poincare witness", c11_poincare),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
