//! Experiment configuration: parsing, validation and default resolution.

use std::path::Path;

use boolperc_core::measure::{Atom, Segment};
use boolperc_core::pointproc::DEFAULT_POINT_CAP;
use boolperc_core::{RadiusMeasure, TargetSet};
use serde::{Deserialize, Serialize};

/// Experiment kinds understood by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ThetaCurve,
    Derivative,
    Threshold,
    RateBound,
    Slab,
    StabRadius,
    Mecke,
    VolumeFraction,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ThetaCurve => "theta-curve",
            Kind::Derivative => "derivative",
            Kind::Threshold => "threshold",
            Kind::RateBound => "rate-bound",
            Kind::Slab => "slab",
            Kind::StabRadius => "stab-radius",
            Kind::Mecke => "mecke",
            Kind::VolumeFraction => "volume-fraction",
        }
    }
}

/// One component of the radius measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureEntry {
    Atom { r: f64, w: f64 },
    Segment { lo: f64, hi: f64, w: f64 },
}

/// Target set `L`; absent means the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetSpec {
    Point {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Point { center: None }
    }
}

/// Numeric parameters. Which keys are required or allowed depends on the kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tc_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_points: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_alpha: Option<f64>,
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub dimension: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Agreement tolerance in combined standard errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_sigma: Option<f64>,
    /// Hard cap on the expected point count of any single sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_cap: Option<u64>,
    pub measure: Vec<MeasureEntry>,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub params: Params,
}

/// A configuration that failed to parse or validate; `field` names the
/// offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error in `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Best-effort extraction of the key named in a serde message such as
/// "unknown field `foo`" or "missing field `bar`".
fn field_from_message(msg: &str) -> Option<String> {
    for marker in ["unknown field `", "missing field `", "duplicate field `"] {
        if let Some(pos) = msg.find(marker) {
            let rest = &msg[pos + marker.len()..];
            return rest.find('`').map(|end| rest[..end].to_string());
        }
    }
    None
}

fn toml_error(e: toml::de::Error, text: &str) -> ConfigError {
    let msg = e.message().to_string();
    let field = field_from_message(&msg).or_else(|| {
        // the key on the reported line, e.g. `kind = "bogus"`
        let span = e.span()?;
        let line_start = text[..span.start].rfind('\n').map_or(0, |p| p + 1);
        let line = text[line_start..].lines().next()?;
        let key = line
            .split('=')
            .next()?
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']');
        (!key.is_empty()).then(|| key.to_string())
    });
    ConfigError::new(field.unwrap_or_else(|| "<document>".into()), msg.trim())
}

fn json_error(e: serde_json::Error) -> ConfigError {
    let msg = e.to_string();
    let field = field_from_message(&msg)
        .or_else(|| msg.contains("unknown variant").then(|| "kind".to_string()));
    ConfigError::new(field.unwrap_or_else(|| "<document>".into()), msg)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| toml_error(e, text))
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn radius_measure(&self) -> Result<RadiusMeasure, ConfigError> {
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        for e in &self.measure {
            match *e {
                MeasureEntry::Atom { r, w } => atoms.push(Atom {
                    radius: r,
                    weight: w,
                }),
                MeasureEntry::Segment { lo, hi, w } => segments.push(Segment { lo, hi, weight: w }),
            }
        }
        RadiusMeasure::new(atoms, segments).map_err(|e| ConfigError::new("measure", e.to_string()))
    }

    pub fn target_set(&self) -> Result<TargetSet, ConfigError> {
        let d = self.dimension;
        let origin = || vec![0.0; d];
        let set = match &self.target {
            TargetSpec::Point { center } => TargetSet::Point(center.clone().unwrap_or_else(origin)),
            TargetSpec::Ball { center, radius } => TargetSet::Ball {
                center: center.clone().unwrap_or_else(origin),
                radius: *radius,
            },
            TargetSpec::Box { lo, hi } => TargetSet::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
        };
        set.validate(d)
            .map_err(|e| ConfigError::new("target", e.to_string()))?;
        Ok(set)
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1)
    }

    pub fn k_sigma(&self) -> f64 {
        self.k_sigma.unwrap_or(3.0)
    }

    pub fn point_cap(&self) -> u64 {
        self.point_cap.unwrap_or(DEFAULT_POINT_CAP)
    }

    /// Checks the configuration and fills every defaulted key, so that the
    /// result echoes exactly what the run uses.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut c = self.clone();
        if !(1..=8).contains(&c.dimension) {
            return Err(ConfigError::new("dimension", "must lie in 1..=8"));
        }
        if c.measure.is_empty() {
            return Err(ConfigError::new(
                "measure",
                "needs at least one atom or segment",
            ));
        }
        let f = c.radius_measure()?;
        c.target_set()?;
        c.workers = Some(c.workers());
        if c.workers() == 0 {
            return Err(ConfigError::new("workers", "must be at least 1"));
        }
        c.k_sigma = Some(c.k_sigma());
        if !(c.k_sigma() > 0.0 && c.k_sigma().is_finite()) {
            return Err(ConfigError::new("k_sigma", "must be positive and finite"));
        }
        c.point_cap = Some(c.point_cap());
        let b = f.support_bound();
        resolve_params(c.kind, c.dimension, b, &mut c.params)?;
        check_values(&c, &f)?;
        Ok(c)
    }
}

/// Which parameter keys a kind requires and which it accepts with defaults.
fn key_sets(kind: Kind) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        Kind::VolumeFraction => (&["t_grid", "reps"], &[]),
        Kind::Mecke => (&["t", "reps"], &["region_radius", "max_count"]),
        Kind::ThetaCurve => (&["t_grid", "n", "reps"], &[]),
        Kind::Derivative => (&["t", "n", "reps"], &["dt", "mc_points"]),
        Kind::Threshold => (&["sizes", "reps"], &["tol"]),
        Kind::RateBound => (
            &["tc_hat", "n", "reps"],
            &["t_grid", "delta", "power_alpha"],
        ),
        Kind::Slab => (&["t", "k_grid", "reps"], &["side"]),
        Kind::StabRadius => (&["t", "reps"], &["half_width", "k_max"]),
    }
}

fn present_keys(p: &Params) -> Vec<&'static str> {
    let mut keys = Vec::new();
    let mut add = |name: &'static str, set: bool| {
        if set {
            keys.push(name);
        }
    };
    add("t", p.t.is_some());
    add("t_grid", p.t_grid.is_some());
    add("tc_hat", p.tc_hat.is_some());
    add("n", p.n.is_some());
    add("reps", p.reps.is_some());
    add("dt", p.dt.is_some());
    add("delta", p.delta.is_some());
    add("mc_points", p.mc_points.is_some());
    add("sizes", p.sizes.is_some());
    add("k_grid", p.k_grid.is_some());
    add("tol", p.tol.is_some());
    add("side", p.side.is_some());
    add("region_radius", p.region_radius.is_some());
    add("max_count", p.max_count.is_some());
    add("half_width", p.half_width.is_some());
    add("k_max", p.k_max.is_some());
    add("power_alpha", p.power_alpha.is_some());
    keys
}

fn resolve_params(kind: Kind, dim: usize, b: f64, p: &mut Params) -> Result<(), ConfigError> {
    // a single intensity is accepted where a grid is expected
    if kind == Kind::VolumeFraction && p.t_grid.is_none() {
        if let Some(t) = p.t.take() {
            p.t_grid = Some(vec![t]);
        }
    }
    let (required, optional) = key_sets(kind);
    for key in present_keys(p) {
        if !required.contains(&key) && !optional.contains(&key) {
            return Err(ConfigError::new(
                format!("params.{key}"),
                format!("not used by kind `{}`", kind.name()),
            ));
        }
    }
    let present = present_keys(p);
    for key in required {
        if !present.contains(key) {
            return Err(ConfigError::new(
                format!("params.{key}"),
                format!("required by kind `{}`", kind.name()),
            ));
        }
    }
    match kind {
        Kind::Mecke => {
            p.region_radius.get_or_insert(1.0);
            p.max_count.get_or_insert(5);
        }
        Kind::Derivative => {
            let t = p.t.unwrap_or(0.0);
            p.dt.get_or_insert(t / 20.0);
            p.mc_points.get_or_insert(16);
        }
        Kind::Threshold => {
            p.tol.get_or_insert(0.01);
        }
        Kind::RateBound => {
            let tc = p.tc_hat.unwrap_or(0.0);
            p.t_grid
                .get_or_insert_with(|| (1..=5).map(|k| tc * (1.0 + k as f64 / 5.0)).collect());
            p.delta.get_or_insert(b / 50.0);
            p.power_alpha.get_or_insert(1.0);
        }
        Kind::Slab => {
            p.side.get_or_insert(8.0 * b);
        }
        Kind::StabRadius => {
            p.half_width.get_or_insert(14.0);
            p.k_max.get_or_insert(10);
        }
        Kind::VolumeFraction | Kind::ThetaCurve => {}
    }
    if kind == Kind::Slab && dim < 3 {
        return Err(ConfigError::new(
            "dimension",
            "kind `slab` needs dimension >= 3",
        ));
    }
    if kind == Kind::Threshold && dim < 2 {
        return Err(ConfigError::new(
            "dimension",
            "kind `threshold` needs dimension >= 2",
        ));
    }
    Ok(())
}

fn positive(name: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(ConfigError::new(
            format!("params.{name}"),
            format!("must be positive and finite, got {x}"),
        )),
        _ => Ok(()),
    }
}

fn grid(name: &str, v: &Option<Vec<f64>>) -> Result<(), ConfigError> {
    if let Some(g) = v {
        if g.is_empty() {
            return Err(ConfigError::new(
                format!("params.{name}"),
                "must not be empty",
            ));
        }
        for &x in g {
            positive(name, Some(x))?;
        }
        if g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::new(
                format!("params.{name}"),
                "must be strictly increasing",
            ));
        }
    }
    Ok(())
}

fn check_values(c: &ExperimentConfig, f: &RadiusMeasure) -> Result<(), ConfigError> {
    let p = &c.params;
    for (name, v) in [
        ("t", p.t),
        ("tc_hat", p.tc_hat),
        ("n", p.n),
        ("dt", p.dt),
        ("delta", p.delta),
        ("tol", p.tol),
        ("side", p.side),
        ("region_radius", p.region_radius),
        ("half_width", p.half_width),
        ("power_alpha", p.power_alpha),
    ] {
        positive(name, v)?;
    }
    for (name, v) in [
        ("t_grid", &p.t_grid),
        ("sizes", &p.sizes),
        ("k_grid", &p.k_grid),
    ] {
        grid(name, v)?;
    }
    if let Some(r) = p.reps {
        if r < 2 {
            return Err(ConfigError::new("params.reps", "must be at least 2"));
        }
    }
    if p.mc_points == Some(0) {
        return Err(ConfigError::new("params.mc_points", "must be at least 1"));
    }
    if p.k_max == Some(0) {
        return Err(ConfigError::new("params.k_max", "must be at least 1"));
    }
    if let (Some(t), Some(dt)) = (p.t, p.dt) {
        if c.kind == Kind::Derivative && dt > t / 10.0 {
            return Err(ConfigError::new(
                "params.dt",
                format!("must not exceed t/10 = {}", t / 10.0),
            ));
        }
    }
    let b = f.support_bound();
    if let Some(sizes) = &p.sizes {
        if sizes.len() < 3 {
            return Err(ConfigError::new(
                "params.sizes",
                "needs at least three sizes",
            ));
        }
        if sizes[0] < 4.0 * b {
            return Err(ConfigError::new(
                "params.sizes",
                format!("every size must be at least 4b = {}", 4.0 * b),
            ));
        }
    }
    if p.tol.is_some_and(|t| t >= 1.0) {
        return Err(ConfigError::new("params.tol", "must lie in (0, 1)"));
    }
    if p.k_grid.as_ref().is_some_and(|k| k[0] < 2.0 * b) {
        return Err(ConfigError::new(
            "params.k_grid",
            format!("every thickness must be at least 2b = {}", 2.0 * b),
        ));
    }
    if c.kind == Kind::RateBound {
        let tc = p.tc_hat.unwrap_or(0.0);
        if p.t_grid.as_ref().is_some_and(|g| g[0] <= tc) {
            return Err(ConfigError::new(
                "params.t_grid",
                "every grid point must exceed tc_hat",
            ));
        }
    }
    let expected = expected_points(c, f);
    if expected > c.point_cap() as f64 {
        return Err(ConfigError::new(
            "point_cap",
            format!(
                "largest sample expects {expected:.3e} points, cap is {}",
                c.point_cap()
            ),
        ));
    }
    Ok(())
}

/// Expected point count of the largest single sample the run will draw, used
/// to refuse runaway configurations before any sampling starts.
fn expected_points(c: &ExperimentConfig, f: &RadiusMeasure) -> f64 {
    let p = &c.params;
    let d = c.dimension as i32;
    let b = f.support_bound();
    let mass = f.total_mass();
    let t_max = p
        .t_grid
        .as_ref()
        .and_then(|g| g.last().copied())
        .into_iter()
        .chain(p.t)
        .chain(p.tc_hat)
        .fold(0.0, f64::max);
    let half = match c.kind {
        Kind::Mecke => p.region_radius.unwrap_or(1.0) + b,
        Kind::VolumeFraction => 2.0 * b,
        Kind::Threshold => {
            let a = p
                .sizes
                .as_ref()
                .and_then(|s| s.last().copied())
                .unwrap_or(0.0);
            // bracket top is 20 / (κ_d E r^d); the rectangle is 3a long
            let top = 20.0
                / (boolperc_core::math::unit_ball_volume(c.dimension)
                    * f.moment(c.dimension as u32));
            return top * mass * (3.0 * a + 2.0 * b) * (a + 2.0 * b).powi(d - 1);
        }
        Kind::Slab => {
            let k = p
                .k_grid
                .as_ref()
                .and_then(|s| s.last().copied())
                .unwrap_or(0.0);
            let a = p.side.unwrap_or(0.0);
            return t_max * mass * (k + 2.0 * b) * (2.0 * a + 2.0 * b).powi(d - 1);
        }
        Kind::StabRadius => p.half_width.unwrap_or(14.0) + b,
        _ => p.n.unwrap_or(0.0) + 2.0 * b,
    };
    t_max * mass * (2.0 * half).powi(d)
}

/// Documented configuration schema, printed by `boolperc schema`.
pub const SCHEMA: &str = include_str!("schema.json");
