//! Experiment configuration files.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::borel::QuadratureSpec;
use crate::criterion::{Annulus, CriterionOptions, PowerOptions, DEFAULT_RATIO_WINDOW};
use crate::error::{Error, Result};
use crate::operators::OperatorSequence;
use crate::series::{FunctionExpr, SeqScalar, TaylorPoly, DEFAULT_NODES, DEGREE_CAP};

/// `c_n Phi^n`, for the power-sequence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    pub phi: FunctionExpr,
    pub scalar: SeqScalar,
    /// `[R1, R2]` tried before the grid search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<[f64; 2]>,
    #[serde(default = "default_ratio_window")]
    pub ratio_window: usize,
}

/// Polar sup-norm grid over `|z| <= K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid_radii")]
    pub radii: usize,
    #[serde(default = "default_grid_angles")]
    pub angles: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { radii: default_grid_radii(), angles: default_grid_angles() }
    }
}

/// Options read by individual commands; each is ignored by the others.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandOptions {
    /// Circle radii for `zeros`, and contour radii compared by `inverse`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    /// Largest index for `apply`, `inverse`, `zeros` and `orbit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Evaluation points for `borel`; the sup grid is used when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Complex64>,
    /// Starting vector for `orbit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<TaylorPoly>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

impl Default for CommandOptions {
    fn default() -> Self {
        CommandOptions {
            radii: Vec::new(),
            n: None,
            points: Vec::new(),
            f: None,
            eps: default_eps(),
            horizon: default_horizon(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<OperatorSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus: Option<Annulus>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Radius of the disk `|z| <= K` for sup norms.
    #[serde(rename = "K", default = "default_disk")]
    pub disk: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    /// Samples per circle for extrema and bound matrices.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TaylorPoly>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub options: CommandOptions,
}

fn default_ratio_window() -> usize {
    DEFAULT_RATIO_WINDOW
}
fn default_grid_radii() -> usize {
    8
}
fn default_grid_angles() -> usize {
    64
}
fn default_eps() -> f64 {
    0.5
}
fn default_horizon() -> usize {
    100
}
fn default_n_max() -> usize {
    200
}
fn default_k_max() -> usize {
    50
}
fn default_disk() -> f64 {
    1.0
}
fn default_nodes() -> usize {
    DEFAULT_NODES
}

impl ExperimentConfig {
    pub fn new() -> Self {
        serde_json::from_str("{}").expect("empty config uses defaults")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Every violated constraint, in field order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(seq) = &self.sequence {
            if let Err(e) = seq.expr.validate() {
                out.push(format!("sequence.expr: {e}"));
            }
        }
        if let Some(p) = &self.power {
            if let Err(e) = p.phi.validate() {
                out.push(format!("power.phi: {e}"));
            }
            if let Some([r1, r2]) = p.seed {
                if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
                    out.push(format!("power.seed = [{r1}, {r2}] must satisfy 0 < R1 < R2"));
                }
            }
            if p.ratio_window < 8 {
                out.push(format!("power.ratio_window = {} must be at least 8", p.ratio_window));
            }
        }
        if let Some(a) = &self.annulus {
            out.extend(a.violations());
        }
        if self.n_max == 0 {
            out.push("n_max must be at least 1".into());
        }
        if !(self.disk.is_finite() && self.disk > 0.0) {
            out.push(format!("K = {} must be a positive finite radius", self.disk));
        }
        if let Err(e) = self.quadrature.validate() {
            out.push(format!("quadrature: {e}"));
        }
        if self.nodes < 64 || !self.nodes.is_power_of_two() {
            out.push(format!("nodes = {} must be a power of two >= 64", self.nodes));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if t.degree() > DEGREE_CAP {
                out.push(format!("targets[{i}] has degree {} above {DEGREE_CAP}", t.degree()));
            }
            if !t.is_finite() {
                out.push(format!("targets[{i}] has non-finite coefficients"));
            }
        }
        if self.grid.radii == 0 || self.grid.angles == 0 {
            out.push("grid.radii and grid.angles must be positive".into());
        }
        for (i, r) in self.options.radii.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                out.push(format!("options.radii[{i}] = {r} must be a positive finite radius"));
            }
        }
        if !(self.options.eps > 0.0) {
            out.push(format!("options.eps = {} must be positive", self.options.eps));
        }
        if self.options.horizon < 10 {
            out.push(format!("options.horizon = {} must be at least 10", self.options.horizon));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v.join("; ")))
        }
    }

    pub fn criterion_options(&self) -> CriterionOptions {
        CriterionOptions { nodes: self.nodes, quadrature: self.quadrature, ..CriterionOptions::default() }
    }

    pub fn power_options(&self) -> PowerOptions {
        let mut p = PowerOptions::default();
        if let Some(pc) = &self.power {
            p.ratio_window = pc.ratio_window;
            p.seed = pc.seed.map(|[a, b]| (a, b));
        }
        p
    }

    pub fn require_sequence(&self) -> Result<&OperatorSequence> {
        self.sequence.as_ref().ok_or_else(|| Error::Config("this command needs a `sequence`".into()))
    }

    pub fn require_annulus(&self) -> Result<&Annulus> {
        self.annulus.as_ref().ok_or_else(|| Error::Config("this command needs an `annulus`".into()))
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::new()
    }
}

/// Reads, parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
