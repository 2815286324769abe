//! Experiment configuration: a TOML file of flat `key = value` sections.
//!
//! ```toml
//! [field]
//! spec = "harmonic:2d:k=2:cos"   # catalog name, "solve", or "grid:PATH"
//! center = [0.0, 0.0]
//! p = 3.0                        # optional
//!
//! [radii]
//! start = 0.2
//! stop = 1.0
//! count = 20
//! spacing = "geometric"          # or "linear"
//! ```
//!
//! Other sections: `quad`, `tolerance`, `drift`, `scaling`, `solver`,
//! `output`. Every key has a default except `field.spec` and the radii.

use std::path::{Path, PathBuf};

use freqlab_core::frequency::{geometric_radii, linear_radii, DEFAULT_CP, DEFAULT_GAMMA0, DEFAULT_REL_TOL};
use freqlab_core::quadrature::{QuadratureOrders, DEFAULT_ORDER_2D, DEFAULT_ORDER_3D, DEFAULT_RADIAL_NODES};
use freqlab_core::solver::{BvpEquation, KrylovMethod, SolveOptions, Square, DEFAULT_EPSILON};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: FieldSection,
    pub radii: Option<RadiiSection>,
    #[serde(default)]
    pub quad: QuadSection,
    #[serde(default)]
    pub tolerance: ToleranceSection,
    #[serde(default)]
    pub drift: DriftSection,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub spec: String,
    /// Defaults to the origin.
    pub center: Option<Vec<f64>>,
    pub p: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Geometric,
    Linear,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiSection {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSection {
    pub order2d: usize,
    pub order3d: usize,
    pub radial_nodes: usize,
}

impl Default for QuadSection {
    fn default() -> Self {
        QuadSection { order2d: DEFAULT_ORDER_2D, order3d: DEFAULT_ORDER_3D, radial_nodes: DEFAULT_RADIAL_NODES }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    /// Relative tolerance for identities that hold exactly.
    pub identity: f64,
    /// Tolerance for monotonicity of the classical frequency, relative to max |F|.
    pub monotone: f64,
    /// Relative tolerance for the drift growth bounds.
    pub growth: f64,
    /// Relative tolerance for scaling laws.
    pub scaling: f64,
    /// Relative tolerance for the Rellich–Nečas residual (against `r·Dsurf`).
    pub rellich: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            identity: DEFAULT_REL_TOL,
            monotone: 1e-9,
            growth: 1e-6,
            scaling: DEFAULT_REL_TOL,
            rellich: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftSection {
    /// `‖b‖∞`; defaults to `|b|` of the configured field or solver.
    pub m: Option<f64>,
    pub c_p: f64,
    pub safety: f64,
    pub gamma0: f64,
}

impl Default for DriftSection {
    fn default() -> Self {
        DriftSection { m: None, c_p: DEFAULT_CP, safety: 0.9, gamma0: DEFAULT_GAMMA0 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    pub tau: Vec<f64>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        ScalingSection { tau: vec![0.5, 2.0] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationName {
    #[default]
    Laplace,
    Drift,
    Plaplace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chain {
    #[default]
    None,
    Sweep,
    Verify,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub equation: EquationName,
    /// Catalog name of a planar field supplying the Dirichlet data.
    pub boundary: String,
    pub b: [f64; 2],
    pub p: f64,
    pub epsilon: f64,
    /// The square `[lo, hi]²`.
    pub domain: [f64; 2],
    pub h: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub newton_max_iter: usize,
    pub damping: f64,
    pub chain: Chain,
}

impl Default for SolverSection {
    fn default() -> Self {
        let o = SolveOptions::default();
        SolverSection {
            equation: EquationName::Laplace,
            boundary: "harmonic:2d:k=3:cos".into(),
            b: [0.0, 0.0],
            p: 2.0,
            epsilon: DEFAULT_EPSILON,
            domain: [-1.0, 1.0],
            h: 1.0 / 64.0,
            tol: o.tol,
            max_iter: o.max_iter,
            newton_max_iter: o.newton_max_iter,
            damping: o.damping,
            chain: Chain::None,
        }
    }
}

impl SolverSection {
    pub fn equation(&self) -> BvpEquation {
        match self.equation {
            EquationName::Laplace => BvpEquation::Laplace,
            EquationName::Drift => BvpEquation::Drift { b: self.b },
            EquationName::Plaplace => BvpEquation::PLaplace { p: self.p, epsilon: self.epsilon },
        }
    }

    pub fn square(&self) -> Square {
        Square { lo: self.domain[0], hi: self.domain[1] }
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
            newton_max_iter: self.newton_max_iter,
            method: KrylovMethod::Auto,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if let Some(r) = &self.radii {
            if !(r.start > 0.0) || !(r.stop > r.start) || !r.stop.is_finite() {
                return bad(format!("radii: need 0 < start < stop, got start = {}, stop = {}", r.start, r.stop));
            }
            if r.count < 3 {
                return bad(format!("radii: count must be at least 3, got {}", r.count));
            }
        }
        let t = &self.tolerance;
        for (name, v) in [
            ("identity", t.identity),
            ("monotone", t.monotone),
            ("growth", t.growth),
            ("scaling", t.scaling),
            ("rellich", t.rellich),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("tolerance.{name} must be positive, got {v}"));
            }
        }
        if let Some(p) = self.field.p {
            if !(p > 1.0) || !p.is_finite() {
                return bad(format!("field.p must exceed 1, got {p}"));
            }
        }
        if self.scaling.tau.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return bad("scaling.tau entries must be positive".into());
        }
        Ok(())
    }

    pub fn radii(&self) -> Result<Vec<f64>, CliError> {
        let r = self.radii.as_ref().ok_or_else(|| CliError::Usage("missing [radii] section".into()))?;
        let grid = match r.spacing {
            Spacing::Geometric => geometric_radii(r.start, r.stop, r.count),
            Spacing::Linear => linear_radii(r.start, r.stop, r.count),
        };
        grid.map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn quadrature(&self) -> QuadratureOrders {
        QuadratureOrders { order2d: self.quad.order2d, order3d: self.quad.order3d, radial_nodes: self.quad.radial_nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[field]\nspec = \"harmonic:2d:k=2:cos\"\n\n[radii]\nstart = 0.2\nstop = 1.0\ncount = 5\n";

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.quad.order2d, 128);
        assert_eq!(cfg.radii().unwrap().len(), 5);
        assert_eq!(cfg.solver.equation(), BvpEquation::Laplace);
        assert_eq!(cfg.drift.c_p, 1.0);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            MINIMAL.replace("start = 0.2", "start = 1.0"),
            MINIMAL.replace("count = 5", "count = 2"),
            format!("{MINIMAL}\n[tolerance]\nidentity = 0.0\n"),
            format!("{MINIMAL}\n[bogus]\nx = 1\n"),
            MINIMAL.replace("spec", "name"),
        ] {
            assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Usage(_))), "{text}");
        }
    }

    #[test]
    fn solver_section() {
        let cfg = ExperimentConfig::parse(&format!(
            "{MINIMAL}\n[solver]\nequation = \"plaplace\"\np = 3.0\nepsilon = 1e-4\ndomain = [0.0, 2.0]\nh = 0.125\nchain = \"verify\"\n"
        ))
        .unwrap();
        assert_eq!(cfg.solver.equation(), BvpEquation::PLaplace { p: 3.0, epsilon: 1e-4 });
        assert_eq!(cfg.solver.square(), Square { lo: 0.0, hi: 2.0 });
        assert_eq!(cfg.solver.chain, Chain::Verify);
    }
}
