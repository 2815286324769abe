//! The five commands. Each returns whether every check passed; errors map
//! to exit codes through [`CliError::exit_code`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use freqlab_core::catalog::{catalog_examples, parse_field};
use freqlab_core::frequency::{
    check_growth_bound, check_harnack, check_monotone_F, check_scaling, check_weak_doubling, drift_constants,
    identity_checks_with_floor, poincare_ratio, radial_moments, representation_I, vanishing_order, DriftConstants,
    frequency_value, FrequencyKind, RadialProfile, VerificationReport,
};
use freqlab_core::quadrature::Rules;
use freqlab_core::solver::{solve_with_trace, to_field, Bvp, GridSolution};
use freqlab_core::{make_field, pde_residual, Dim, Equation, Error, Field, FieldSpec, Point, ScalarField};
use rayon::prelude::*;

use crate::config::{Chain, EquationName, ExperimentConfig};
use crate::error::CliError;
use crate::io;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Describe,
    Sweep,
    Verify,
    Solve,
    Doubling,
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dump_grid: Option<PathBuf>,
}

/// Which equation a field solves, deciding which checks apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldClass {
    Harmonic,
    Drift([f64; 3]),
    PLaplace(f64),
    /// No equation (e.g. the ramp); only equation-free checks run.
    Other,
}

impl FieldClass {
    fn of_spec(spec: &FieldSpec) -> FieldClass {
        match spec {
            FieldSpec::HarmonicPolynomial { .. } | FieldSpec::Affine { .. } => FieldClass::Harmonic,
            FieldSpec::DriftExponential { b } => FieldClass::Drift(*b),
            FieldSpec::PRadial { p, .. } => FieldClass::PLaplace(*p),
            FieldSpec::Ramp { .. } | FieldSpec::GridBacked(_) => FieldClass::Other,
        }
    }

    fn of_solver(cfg: &ExperimentConfig) -> FieldClass {
        let s = &cfg.solver;
        match s.equation {
            EquationName::Laplace => FieldClass::Harmonic,
            EquationName::Drift => FieldClass::Drift([s.b[0], s.b[1], 0.0]),
            EquationName::Plaplace if s.p == 2.0 => FieldClass::Harmonic,
            EquationName::Plaplace => FieldClass::PLaplace(s.p),
        }
    }

    fn equation(self) -> Equation {
        match self {
            FieldClass::Harmonic | FieldClass::Other => Equation::Laplace,
            FieldClass::Drift(b) => Equation::Drift { b },
            FieldClass::PLaplace(p) => Equation::PLaplace { p, regularization: None },
        }
    }
}

pub struct Prepared {
    pub field: ScalarField,
    pub class: FieldClass,
    pub center: Point,
    /// Grid spacing when the field is grid-backed.
    pub grid_h: Option<f64>,
}

/// Relative tolerance for grid-backed fields is at least this times `h²`.
pub const GRID_TOL_FACTOR: f64 = 16.0;

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("FREQLAB_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::Usage(format!("FREQLAB_THREADS must be a positive integer, got `{v}`"))
        })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Samples every radius in parallel; results keep radius order.
pub fn parallel_sweep(
    field: &ScalarField,
    center: &Point,
    radii: &[f64],
    p: Option<f64>,
    rules: &Rules,
) -> Result<RadialProfile, CliError> {
    let pool = thread_pool()?;
    let results = pool.install(|| radii.par_iter().map(|&r| (r, radial_moments(field, center, r, p, rules))).collect());
    Ok(RadialProfile::assemble(*center, p, results)?)
}

fn solve_grid(cfg: &ExperimentConfig, dump: Option<&Path>) -> Result<GridSolution, CliError> {
    let s = &cfg.solver;
    let (spec, dim) = parse_field(&s.boundary)?;
    if dim != Dim::Two {
        return Err(CliError::Usage(format!("solver.boundary must be planar, got `{}`", s.boundary)));
    }
    let g = make_field(spec, dim)?;
    let bvp = Bvp { square: s.square(), h: s.h, equation: s.equation(), boundary: |x: f64, y: f64| Ok(g.eval(&Point::xy(x, y))?.value) };
    let (sol, trace) = solve_with_trace(&bvp, &s.options())?;
    println!(
        "solved {:?} on [{}, {}]^2: {}x{} nodes, h = {}, residual {:.3e}, {} iterations",
        s.equation,
        s.domain[0],
        s.domain[1],
        sol.rows(),
        sol.cols(),
        sol.h(),
        sol.residual(),
        sol.iterations()
    );
    if let Some(tr) = trace.newton {
        println!("newton: {} steps, final energy {:.12e}", tr.step_lengths.len(), tr.energies.last().copied().unwrap_or(f64::NAN));
    }
    if let Some(path) = dump {
        let mut buf = Vec::new();
        io::write_grid(&sol, &mut buf).map_err(|e| CliError::io("cannot format grid", e))?;
        io::write_file(path, &buf)?;
        println!("grid written to {}", path.display());
    }
    Ok(sol)
}

fn center_of(cfg: &ExperimentConfig, dim: Dim) -> Result<Point, CliError> {
    let center = match &cfg.field.center {
        Some(c) => Point::new(c).map_err(|_| CliError::Usage("field.center must have 2 or 3 components".into()))?,
        None => Point::origin(dim),
    };
    if center.dim() != dim {
        return Err(CliError::Usage(format!("field.center has {} components but the field is {}-dimensional", center.dim().n(), dim.n())));
    }
    Ok(center)
}

pub fn prepare(cfg: &ExperimentConfig, force_solve: bool, dump: Option<&Path>) -> Result<Prepared, CliError> {
    let spec = cfg.field.spec.trim();
    let (field, class, grid_h) = if force_solve || spec == "solve" {
        let sol = solve_grid(cfg, dump)?;
        let h = sol.h();
        (to_field(sol)?, FieldClass::of_solver(cfg), Some(h))
    } else if let Some(path) = spec.strip_prefix("grid:") {
        let sol = io::read_grid_file(Path::new(path))?;
        let h = sol.h();
        (make_field(FieldSpec::GridBacked(Arc::new(sol)), Dim::Two)?, FieldClass::of_solver(cfg), Some(h))
    } else {
        let (spec, dim) = parse_field(spec)?;
        let class = FieldClass::of_spec(&spec);
        (make_field(spec, dim)?, class, None)
    };
    let center = center_of(cfg, field.dim())?;
    Ok(Prepared { field, class, center, grid_h })
}

fn out_dir(inv: &Invocation, cfg: &ExperimentConfig) -> PathBuf {
    inv.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("freqlab-out"))
}

fn skipped_on(check: &str, e: &Error) -> VerificationReport {
    VerificationReport::skipped(check, e.to_string())
}

/// The verification battery for one profile.
pub fn verify_profile(prep: &Prepared, cfg: &ExperimentConfig, profile: &RadialProfile, rules: &Rules) -> Result<Vec<VerificationReport>, CliError> {
    if let Some((r, e)) = profile.failures.first() {
        return Err(CliError::Usage(format!("radius {r} cannot be sampled: {e}")));
    }
    let s = &profile.samples;
    let mut tol = cfg.tolerance.clone();
    if let Some(h) = prep.grid_h {
        let g = GRID_TOL_FACTOR * h * h;
        for t in [&mut tol.identity, &mut tol.monotone, &mut tol.growth, &mut tol.rellich] {
            *t = t.max(g);
        }
        println!("grid-backed field (h = {h}): relative tolerances raised to at least {g:.3e}");
    }
    let f_scale = s.iter().filter_map(|q| frequency_value(q, FrequencyKind::Classical).ok()).fold(1.0_f64, |m, f| m.max(f.abs()));
    let n = profile.dim.n();
    let (first, last) = (s[0].r, s[s.len() - 1].r);
    let mut out = Vec::new();

    if prep.class != FieldClass::Other {
        out.extend(identity_checks_with_floor(profile, tol.identity)?);
        for q in s {
            let scale = (q.r * q.dsurf).max(f64::MIN_POSITIVE);
            out.push(VerificationReport::identity("rellich_necas.general", q.rn_residual, 0.0, tol.rellich * scale).at(q.r));
            if prep.class == FieldClass::Harmonic {
                out.push(VerificationReport::identity("rellich_necas.harmonic", q.rn_harmonic_form(n), 0.0, tol.rellich * scale).at(q.r));
            }
        }
    }

    if prep.class == FieldClass::Harmonic {
        out.push(check_monotone_F(profile, tol.monotone * f_scale));
        match vanishing_order(profile, last, tol.identity) {
            Ok((_, _, rep)) => out.push(rep),
            Err(e) => out.push(skipped_on("vanishing_order", &e)),
        }
    }

    match check_harnack(profile, first, last, tol.identity) {
        Ok(reps) => out.extend(reps),
        Err(e) => out.push(skipped_on("harnack", &e)),
    }
    for q in &s[..s.len() - 1] {
        match representation_I(profile, q.r, last, tol.identity) {
            Ok(rep) => out.push(rep),
            Err(e) => out.push(skipped_on("representation_I", &e).at(q.r)),
        }
    }

    let mut kinds = vec![(FrequencyKind::Classical, None), (FrequencyKind::Drift, None)];
    if let Some(p) = cfg.field.p {
        kinds.push((FrequencyKind::P, Some(p)));
        kinds.push((FrequencyKind::PTilde, Some(p)));
    }
    let radii = profile.radii();
    for &tau in &cfg.scaling.tau {
        for &(kind, p) in &kinds {
            let name = format!("scaling.{}", kind.name());
            if prep.grid_h.is_some() {
                out.push(VerificationReport::skipped(&name, "scaled balls leave a grid-backed domain").with_meta("tau", tau));
                continue;
            }
            match check_scaling(&prep.field, &prep.center, tau, &radii, kind, p, rules, tol.scaling) {
                Ok(reps) => out.extend(reps),
                Err(e) => out.push(skipped_on(&name, &e).with_meta("tau", tau)),
            }
        }
    }

    if let FieldClass::Drift(b) = prep.class {
        let m = cfg.drift.m.unwrap_or_else(|| (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt());
        let constants = if m == 0.0 {
            DriftConstants::harmonic(profile.dim, cfg.drift.c_p, last)?
        } else {
            drift_constants(m, cfg.drift.c_p, profile.dim, cfg.drift.safety)?
        };
        out.extend(check_growth_bound(profile, &constants, tol.growth)?);
    }

    match poincare_ratio(&prep.field, &prep.center, last, cfg.drift.gamma0, cfg.drift.c_p, rules) {
        Ok((_, rep)) => out.push(rep),
        Err(e @ (Error::Precondition(_) | Error::Degenerate(_))) => out.push(skipped_on("poincare", &e).at(last)),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn load(inv: &Invocation) -> Result<ExperimentConfig, CliError> {
    let path = inv.config.as_ref().ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    ExperimentConfig::load(path)
}

fn write_outputs(dir: &Path, profile: &RadialProfile, reports: Option<&[VerificationReport]>) -> Result<(), CliError> {
    let mut csv = Vec::new();
    io::write_profile_csv(profile, &mut csv)?;
    let csv_path = dir.join("profile.csv");
    io::write_file(&csv_path, &csv)?;
    println!("profile written to {}", csv_path.display());
    if let Some(reps) = reports {
        let path = dir.join("report.txt");
        io::write_file(&path, io::render_report(reps).as_bytes())?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn print_verdict(reports: &[VerificationReport]) -> bool {
    for r in reports.iter().filter(|r| r.failed_check()) {
        eprintln!("failed: {} at r = {:?}: lhs {:e}, rhs {:e}, margin {:e}, tol {:e} {}", r.check, r.radius, r.lhs, r.rhs, r.margin, r.tolerance, r.note);
    }
    println!("{}", io::summary_line(reports));
    reports.iter().all(|r| !r.failed_check())
}

fn sweep_and_maybe_verify(inv: &Invocation, cfg: &ExperimentConfig, prep: &Prepared, verify: bool) -> Result<bool, CliError> {
    let rules = Rules::new(prep.field.dim(), cfg.quadrature())?;
    let radii = cfg.radii()?;
    let profile = parallel_sweep(&prep.field, &prep.center, &radii, cfg.field.p, &rules)?;
    for (r, e) in &profile.failures {
        eprintln!("warning: radius {r} skipped: {e}");
    }
    let dir = out_dir(inv, cfg);
    if !verify {
        write_outputs(&dir, &profile, None)?;
        println!("{} of {} radii sampled", profile.samples.len(), radii.len());
        return Ok(true);
    }
    let reports = verify_profile(prep, cfg, &profile, &rules)?;
    write_outputs(&dir, &profile, Some(&reports))?;
    Ok(print_verdict(&reports))
}

fn describe(inv: &Invocation) -> Result<bool, CliError> {
    println!("field catalog:");
    for name in catalog_examples() {
        let (spec, dim) = parse_field(&name)?;
        let f = make_field(spec, dim)?;
        println!("  {name:<28} {}", f.domain_note());
    }
    println!("  {:<28} grid solution from the [solver] section", "solve");
    println!("  {:<28} grid solution read from a file", "grid:PATH");
    let Some(_) = &inv.config else { return Ok(true) };
    let cfg = load(inv)?;
    let prep = prepare(&cfg, false, inv.dump_grid.as_deref())?;
    let eq = prep.class.equation();
    println!("configured field: {} ({}D), center {:?}", prep.field, prep.field.dim().n(), prep.center.coords());
    println!("domain: {}", prep.field.domain_note());
    let reach = cfg.radii.as_ref().map_or(0.5, |r| 0.5 * r.stop);
    let dirs: [[f64; 3]; 4] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-0.6, 0.8, 0.0], [0.0, -0.6, 0.8]];
    println!("{eq:?} residual spot checks:");
    for d in dirs {
        let x = prep.center.offset(reach, &d);
        match pde_residual(&prep.field, &x, &eq) {
            Ok(v) => println!("  at {:?}: {v:.3e}", x.coords()),
            Err(e) => println!("  at {:?}: n/a ({e})", x.coords()),
        }
    }
    Ok(true)
}

fn doubling(inv: &Invocation, cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let p = cfg.field.p.ok_or_else(|| CliError::Usage("doubling needs field.p".into()))?;
    let prep = prepare(cfg, false, inv.dump_grid.as_deref())?;
    let rules = Rules::new(prep.field.dim(), cfg.quadrature())?;
    let profile = parallel_sweep(&prep.field, &prep.center, &cfg.radii()?, Some(p), &rules)?;
    if let Some((r, e)) = profile.failures.first() {
        return Err(CliError::Usage(format!("radius {r} cannot be sampled: {e}")));
    }
    let (r_star, rep) = check_weak_doubling(&profile, 4.0)?;
    println!("r_b = {}, r_star = {r_star}, ratio {}", profile.samples[0].r, r_star / profile.samples[0].r);
    let reports = [rep];
    write_outputs(&out_dir(inv, cfg), &profile, Some(&reports))?;
    Ok(print_verdict(&reports))
}

/// Runs a command; `Ok(true)` when every check passed.
pub fn run(inv: &Invocation) -> Result<bool, CliError> {
    match inv.command {
        Command::Describe => describe(inv),
        Command::Sweep | Command::Verify => {
            let cfg = load(inv)?;
            let prep = prepare(&cfg, false, inv.dump_grid.as_deref())?;
            sweep_and_maybe_verify(inv, &cfg, &prep, inv.command == Command::Verify)
        }
        Command::Solve => {
            let cfg = load(inv)?;
            let prep = prepare(&cfg, true, inv.dump_grid.as_deref())?;
            match cfg.solver.chain {
                Chain::None => Ok(true),
                Chain::Sweep => sweep_and_maybe_verify(inv, &cfg, &prep, false),
                Chain::Verify => sweep_and_maybe_verify(inv, &cfg, &prep, true),
            }
        }
        Command::Doubling => doubling(inv, &load(inv)?),
    }
}
