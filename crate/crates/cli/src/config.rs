//! Experiment configuration, read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};

use hororadon::functions::{custom_table, gaussian, vertical_bump, zero};
use hororadon::{DecayFunction, QuadratureSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transform,
    Synthesize,
    Reconstruct,
    VerifySupport,
    SolveSelftest,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Transform => "transform",
            Command::Synthesize => "synthesize",
            Command::Reconstruct => "reconstruct",
            Command::VerifySupport => "verify-support",
            Command::SolveSelftest => "solve-selftest",
        })
    }
}

/// A named test function. An empty `center` means the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    GaussianBump {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        width: f64,
        #[serde(default = "half")]
        mean_height: f64,
        #[serde(default = "half")]
        sigma: f64,
    },
    VerticalBump {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        width: f64,
        low: f64,
        high: f64,
    },
    Zero,
    CustomTable {
        #[serde(default = "one")]
        width: f64,
        heights: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> hororadon::Result<DecayFunction> {
        match self {
            FunctionSpec::GaussianBump {
                center,
                width,
                mean_height,
                sigma,
            } => gaussian(n, center.clone(), *width, *mean_height, *sigma),
            FunctionSpec::VerticalBump {
                center,
                width,
                low,
                high,
            } => vertical_bump(n, center.clone(), *width, *low, *high),
            FunctionSpec::Zero => zero(n),
            FunctionSpec::CustomTable { width, heights, values } => {
                custom_table(n, *width, heights.clone(), values.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Number of radii `r = s/2` for datasets.
    pub s_nodes: usize,
    /// Smallest `s`; radii run from `eps/2` to `1/2`.
    pub eps: f64,
    /// Frequencies along the first axis, used when `etas` is empty.
    pub eta_norms: Vec<f64>,
    pub etas: Vec<Vec<f64>>,
    /// Random horocycles for `transform`.
    pub horocycles: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Contacts are drawn from `[-contact_spread, contact_spread]^{n-1}`.
    pub contact_spread: f64,
    /// Random (frequency, radius) pairs for the Fubini check in `synthesize`.
    pub fubini_samples: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            s_nodes: 256,
            eps: 1e-3,
            eta_norms: vec![0.0, 1.0, 2.5],
            etas: Vec::new(),
            horocycles: 10,
            r_min: 0.1,
            r_max: 0.5,
            contact_spread: 1.0,
            fubini_samples: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quadrature {
    pub theta_nodes: usize,
    pub sphere_nodes: usize,
    pub plane_cutoff: f64,
    pub plane_nodes: usize,
    pub tail_tolerance: f64,
    pub certificate_budget: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            theta_nodes: q.theta_nodes,
            sphere_nodes: q.sphere_nodes,
            plane_cutoff: q.plane_cutoff,
            plane_nodes: q.plane_nodes,
            tail_tolerance: q.tail_tolerance,
            certificate_budget: q.certificate_budget,
        }
    }
}

impl Quadrature {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            theta_nodes: self.theta_nodes,
            sphere_nodes: self.sphere_nodes,
            plane_cutoff: self.plane_cutoff,
            plane_nodes: self.plane_nodes,
            tail_tolerance: self.tail_tolerance,
            certificate_budget: self.certificate_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative agreement of the two forward-transform routes.
    pub cross_check: f64,
    /// Relative agreement of exterior data with the height-integral form.
    pub fubini: f64,
    /// Relative L∞ round-trip error; defaults to 5e-2 for n ≤ 3 and 1e-1 above.
    pub round_trip: Option<f64>,
    /// "Numerically zero" for transforms and data.
    pub data: f64,
    /// "Numerically zero" for reconstructed slices.
    pub slice: f64,
    /// Max error of the second-kind self-tests.
    pub solver: f64,
    /// Max error of the Abel self-test.
    pub abel: f64,
    /// Minimum error ratio per halving of the step.
    pub order_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cross_check: 1e-5,
            fubini: 1e-3,
            round_trip: None,
            data: 1e-8,
            slice: 1e-6,
            solver: 1e-4,
            abel: 1e-3,
            order_ratio: 3.5,
        }
    }
}

impl Tolerances {
    pub fn round_trip_for(&self, n: usize) -> f64 {
        self.round_trip.unwrap_or(if n <= 3 { 5e-2 } else { 1e-1 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Support {
    /// The function is claimed to vanish below height `1 + delta`.
    pub delta: f64,
}

impl Default for Support {
    fn default() -> Self {
        Self { delta: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub csv: String,
    pub report: String,
    /// Dataset written by `synthesize` (and by `reconstruct` when it synthesizes).
    pub dataset: String,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            csv: "results.csv".into(),
            report: "report.json".into(),
            dataset: "dataset.txt".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Input {
    /// Dataset to reconstruct from, relative to the config file.
    pub dataset: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub quadrature: Quadrature,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub support: Support,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub input: Input,
    /// Directory of the config file; relative input paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_n() -> usize {
    3
}

/// A configuration problem with the line it refers to, when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of the first `key = ...` assignment (optionally inside `[table]`).
fn find_key(text: &str, table: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let matches_table = match table {
            None => current.is_none(),
            Some(t) => current.as_deref() == Some(t),
        };
        if matches_table {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            ConfigError {
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self, ConfigError>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_toml(&text).map(|mut c| {
            c.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            c
        }))
    }

    fn validate(&self, text: &str) -> Result<(), ConfigError> {
        let err = |table: Option<&str>, key: &str, message: String| ConfigError {
            line: find_key(text, table, key).or_else(|| table.and_then(|t| find_table(text, t))),
            message,
        };
        let n = self.n;
        if !(2..=8).contains(&n) {
            return Err(err(None, "n", format!("n must lie in 2..=8, got {n}")));
        }
        let g = &self.grids;
        let grids = Some("grids");
        if g.s_nodes < 3 {
            return Err(err(grids, "s_nodes", "s_nodes must be at least 3".into()));
        }
        if !(g.eps > 0.0 && g.eps < 1.0) {
            return Err(err(grids, "eps", format!("eps must lie in (0, 1), got {}", g.eps)));
        }
        if let Some(bad) = g.etas.iter().find(|e| e.len() != n - 1) {
            return Err(err(
                grids,
                "etas",
                format!("each frequency needs {} components, got {bad:?}", n - 1),
            ));
        }
        if g.etas.is_empty() && g.eta_norms.is_empty() {
            return Err(err(grids, "eta_norms", "no frequencies given".into()));
        }
        if g.etas.iter().flatten().chain(&g.eta_norms).any(|v| !v.is_finite()) {
            return Err(err(grids, "eta_norms", "frequencies must be finite".into()));
        }
        if !(g.r_min > 0.0 && g.r_max >= g.r_min && g.r_max.is_finite()) {
            return Err(err(grids, "r_min", "need 0 < r_min ≤ r_max".into()));
        }
        if !(g.contact_spread >= 0.0 && g.contact_spread.is_finite()) {
            return Err(err(
                grids,
                "contact_spread",
                "contact_spread must be nonnegative".into(),
            ));
        }
        if self.quadrature.spec().validate().is_err() {
            return Err(ConfigError {
                line: find_table(text, "quadrature"),
                message: format!("invalid quadrature settings: {:?}", self.quadrature),
            });
        }
        let t = &self.tolerances;
        let tol = Some("tolerances");
        for (key, v) in [
            ("cross_check", t.cross_check),
            ("fubini", t.fubini),
            ("round_trip", t.round_trip.unwrap_or(1.0)),
            ("data", t.data),
            ("slice", t.slice),
            ("solver", t.solver),
            ("abel", t.abel),
            ("order_ratio", t.order_ratio),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(err(tol, key, format!("tolerance {key} must be positive, got {v}")));
            }
        }
        if self.support.delta.is_nan() || self.support.delta <= 0.0 {
            return Err(err(Some("support"), "delta", "delta must be positive".into()));
        }
        for (key, v) in [
            ("csv", &self.output.csv),
            ("report", &self.output.report),
            ("dataset", &self.output.dataset),
        ] {
            if v.trim().is_empty() {
                return Err(err(Some("output"), key, format!("output.{key} must not be empty")));
            }
        }
        let needs_function = match self.command {
            Command::Transform | Command::Synthesize | Command::VerifySupport => true,
            Command::Reconstruct => self.input.dataset.is_none(),
            Command::SolveSelftest => false,
        };
        match &self.function {
            None if needs_function => Err(ConfigError {
                line: find_key(text, None, "command"),
                message: format!("command `{}` needs a [function] table", self.command),
            }),
            Some(f) => f.build(n).map(|_| ()).map_err(|e| ConfigError {
                line: find_table(text, "function"),
                message: format!("invalid function: {e}"),
            }),
            None => Ok(()),
        }
    }

    /// Frequencies to process: explicit `etas`, else `eta_norms` along the first axis.
    pub fn etas(&self) -> Vec<Vec<f64>> {
        if !self.grids.etas.is_empty() {
            return self.grids.etas.clone();
        }
        self.grids
            .eta_norms
            .iter()
            .map(|&k| {
                let mut e = vec![0.0; self.n - 1];
                e[0] = k;
                e
            })
            .collect()
    }

    pub fn r_grid(&self) -> Vec<f64> {
        hororadon::quadrature::linspace(0.5 * self.grids.eps, 0.5, self.grids.s_nodes)
    }

    pub fn resolve_input(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

fn find_table(text: &str, table: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            l.trim()
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .map(str::trim)
                == Some(table)
        })
        .map(|i| i + 1)
}
