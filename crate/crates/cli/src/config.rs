//! Run configuration: a JSON file, command-line overrides and per-scenario
//! defaults, resolved into one validated [`RunConfig`].
//!
//! Everything that can change results lives in [`ExperimentConfig`], which
//! is echoed into the manifest. Output location and thread count do not
//! affect results and stay out of it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cocontagion::dynamics::{ActivityModel, SimParams, DEFAULT_ATTRACTIVENESS, DEFAULT_MAX_STEPS};
use cocontagion::experiments::{
    default_tau_axis, long_long_pairings, synergy_pairings, Pairing, DEFAULT_SPEED_THRESHOLD,
    DEFAULT_TRIALS,
};
use cocontagion::graphgen::{GraphKind, LayerSpec};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Nodes per layer when the configuration does not say.
pub const DEFAULT_N: usize = 6400;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
/// Rewiring probabilities swept by `beta_sweep` unless configured.
pub const DEFAULT_BETA_AXIS: [f64; 5] = [0.001, 0.005, 0.01, 0.05, 0.1];
/// Rewiring probability of layer A in `beta_sweep` unless configured.
pub const DEFAULT_BETA_A: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SingleTrial,
    TauGrid,
    BetaSweep,
    Synergy,
    LongShort,
    SpeedOrder,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Self::SingleTrial,
        Self::TauGrid,
        Self::BetaSweep,
        Self::Synergy,
        Self::LongShort,
        Self::SpeedOrder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SingleTrial => "single_trial",
            Self::TauGrid => "tau_grid",
            Self::BetaSweep => "beta_sweep",
            Self::Synergy => "synergy",
            Self::LongShort => "long_short",
            Self::SpeedOrder => "speed_order",
        }
    }

    pub fn default_alpha(self) -> f64 {
        match self {
            Self::SingleTrial | Self::BetaSweep => 1.0,
            Self::TauGrid | Self::Synergy | Self::SpeedOrder => 3.0,
            Self::LongShort => 0.5,
        }
    }

    fn default_taus(self) -> (f64, f64) {
        match self {
            Self::Synergy => (0.02, 0.14),
            _ => (0.0, 0.0),
        }
    }

    /// Layer templates for scenarios that run a single pairing.
    fn default_layers(self) -> Option<(LayerSpec, LayerSpec)> {
        let of = LayerSpec::of;
        match self {
            Self::SingleTrial => Some((of(GraphKind::Lat), of(GraphKind::Lat))),
            Self::TauGrid => Some((of(GraphKind::Rrg), of(GraphKind::Erg))),
            Self::BetaSweep => Some((LayerSpec::wsg(DEFAULT_BETA_A), of(GraphKind::Wsg))),
            Self::LongShort => Some((of(GraphKind::Erg), of(GraphKind::Lat))),
            Self::Synergy | Self::SpeedOrder => None,
        }
    }

    fn default_pairings(self) -> Option<Vec<Pairing>> {
        match self {
            Self::Synergy => Some(synergy_pairings()),
            Self::SpeedOrder => Some(long_long_pairings()),
            _ => None,
        }
    }

    fn grid_keys(self) -> &'static [&'static str] {
        match self {
            Self::TauGrid | Self::LongShort => &["tau_a", "tau_b"],
            Self::BetaSweep => &["beta_b", "tau_b"],
            Self::Synergy => &["alpha"],
            Self::SingleTrial | Self::SpeedOrder => &[],
        }
    }

    fn is_grid(self) -> bool {
        !self.grid_keys().is_empty()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|sc| sc.as_str()).collect();
                format!(
                    "unknown scenario {s:?}, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// Worker count: a positive integer or `"auto"` (one per available core).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Count(usize),
}

impl Threads {
    /// The rayon `num_threads` value; 0 lets rayon decide.
    pub fn pool_size(self) -> usize {
        match self {
            Self::Auto => 0,
            Self::Count(n) => n,
        }
    }
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Self::Count(n)),
            _ => Err(format!(
                "threads must be a positive integer or \"auto\", got {s:?}"
            )),
        }
    }
}

impl Serialize for Threads {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Threads {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match Value::deserialize(d)? {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => other.to_string(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Dynamics parameters of a run; the master seed is [`ExperimentConfig::seed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    pub max_steps: u64,
    pub activity: ActivityModel,
    pub dormancy_on_adoption: bool,
}

impl Params {
    pub fn sim(&self, master_seed: u64) -> SimParams {
        SimParams {
            alpha: self.alpha,
            k_a: self.k_a,
            k_b: self.k_b,
            tau_a: self.tau_a,
            tau_b: self.tau_b,
            max_steps: self.max_steps,
            master_seed,
            activity: self.activity,
            dormancy_on_adoption: self.dormancy_on_adoption,
        }
    }
}

/// Sweep axes. Only the axes used by the scenario are present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
}

impl Grids {
    fn get(&self, key: &str) -> Option<&Vec<f64>> {
        match key {
            "tau_a" => self.tau_a.as_ref(),
            "tau_b" => self.tau_b.as_ref(),
            "beta_b" => self.beta_b.as_ref(),
            "alpha" => self.alpha.as_ref(),
            _ => None,
        }
    }

    fn slot(&mut self, key: &str) -> &mut Option<Vec<f64>> {
        match key {
            "tau_a" => &mut self.tau_a,
            "tau_b" => &mut self.tau_b,
            "beta_b" => &mut self.beta_b,
            "alpha" => &mut self.alpha,
            _ => unreachable!("unknown grid {key}"),
        }
    }

    /// An axis the scenario uses; present after resolution.
    pub fn axis(&self, key: &str) -> &[f64] {
        self.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// The result-affecting part of a run configuration, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_a: Option<LayerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_b: Option<LayerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairings: Option<Vec<Pairing>>,
    pub params: Params,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_cells: Option<bool>,
}

impl ExperimentConfig {
    /// The single pairing of scenarios that use `layer_a`/`layer_b`.
    pub fn pairing(&self) -> Option<Pairing> {
        Some(Pairing::new(self.layer_a.clone()?, self.layer_b.clone()?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub output_dir: PathBuf,
    pub threads: Threads,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: Option<f64>,
    k_a: Option<f64>,
    k_b: Option<f64>,
    tau_a: Option<f64>,
    tau_b: Option<f64>,
    max_steps: Option<u64>,
    activity: Option<ActivityModel>,
    dormancy_on_adoption: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Scenario>,
    n: Option<usize>,
    seed: Option<u64>,
    trials: Option<usize>,
    layer_a: Option<LayerSpec>,
    layer_b: Option<LayerSpec>,
    pairings: Option<Vec<Pairing>>,
    params: Option<RawParams>,
    grids: Option<Grids>,
    speed_threshold: Option<f64>,
    emit_cells: Option<bool>,
    output_dir: Option<PathBuf>,
    threads: Option<Threads>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub threads: Option<String>,
    pub out: Option<PathBuf>,
    /// `key=value` assignments; dotted keys reach into nested tables and
    /// values are read as JSON, falling back to a plain string.
    pub set: Vec<String>,
}

/// Maps configuration keys back to where their values came from.
struct Origins<'a> {
    source: &'a str,
    from_flags: Vec<String>,
}

impl Origins<'_> {
    fn err(&self, key: &str, msg: impl Into<String>) -> CliError {
        CliError::Config {
            key: key.to_string(),
            origin: self.origin(key),
            msg: msg.into(),
        }
    }

    fn origin(&self, key: &str) -> String {
        if self.from_flags.iter().any(|f| {
            key == f || key.starts_with(&format!("{f}.")) || key.starts_with(&format!("{f}["))
        }) {
            return "command line".into();
        }
        match key_line(self.source, key) {
            Some(line) => format!("line {line}"),
            None => "defaults".into(),
        }
    }
}

/// Line of the last component of a dotted key in JSON text, found by
/// locating each component in turn. Array indices are skipped.
fn key_line(source: &str, key: &str) -> Option<usize> {
    let mut pos = 0;
    let mut found = None;
    for part in key.split('.') {
        let name = part.split('[').next().unwrap_or(part);
        if name.is_empty() {
            continue;
        }
        let quoted = format!("\"{name}\"");
        loop {
            let at = pos + source[pos..].find(&quoted)?;
            let after = at + quoted.len();
            pos = after;
            if source[after..].trim_start().starts_with(':') {
                found = Some(at);
                break;
            }
        }
    }
    found.map(|at| source[..at].matches('\n').count() + 1)
}

fn set_path(root: &mut Map<String, Value>, key: &str, value: Value) {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap();
    let mut table = root;
    for part in parts {
        let slot = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        if !slot.is_object() {
            *slot = Value::Object(Map::new());
        }
        table = slot.as_object_mut().unwrap();
    }
    table.insert(last.to_string(), value);
}

/// Builds the validated configuration from optional JSON text plus
/// command-line overrides.
pub fn parse_config(source: Option<&str>, overrides: &Overrides) -> Result<RunConfig> {
    let text = source.unwrap_or("");
    let mut root = match source {
        None => Map::new(),
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => map,
            Ok(_) => {
                return Err(CliError::Syntax {
                    line: 1,
                    msg: "config must be a JSON object".into(),
                })
            }
            Err(e) => {
                return Err(CliError::Syntax {
                    line: e.line(),
                    msg: e.to_string(),
                })
            }
        },
    };

    let mut from_flags = Vec::new();
    let mut flag = |root: &mut Map<String, Value>, key: &str, value: Value| {
        set_path(root, key, value);
        from_flags.push(key.to_string());
    };
    if let Some(s) = &overrides.scenario {
        flag(&mut root, "scenario", Value::from(s.as_str()));
    }
    if let Some(seed) = overrides.seed {
        flag(&mut root, "seed", Value::from(seed));
    }
    if let Some(trials) = overrides.trials {
        flag(&mut root, "trials", Value::from(trials));
    }
    if let Some(t) = &overrides.threads {
        flag(&mut root, "threads", Value::from(t.as_str()));
    }
    if let Some(out) = &overrides.out {
        flag(
            &mut root,
            "output_dir",
            Value::from(out.to_string_lossy().into_owned()),
        );
    }
    for assignment in &overrides.set {
        let Some((key, raw)) = assignment.split_once('=') else {
            return Err(CliError::Config {
                key: assignment.clone(),
                origin: "command line".into(),
                msg: "expected --set key=value".into(),
            });
        };
        let key = key.trim();
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::from(raw));
        flag(&mut root, key, value);
    }

    let origins = Origins {
        source: text,
        from_flags,
    };
    let raw: RawConfig = serde_path_to_error::deserialize(Value::Object(root)).map_err(|e| {
        let key = e.path().to_string();
        origins.err(&key, e.into_inner().to_string())
    })?;
    resolve(raw, &origins)
}

fn resolve(raw: RawConfig, origins: &Origins) -> Result<RunConfig> {
    let scenario = raw.scenario.ok_or_else(|| {
        let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.as_str()).collect();
        origins.err(
            "scenario",
            format!("scenario is required, one of {}", names.join(", ")),
        )
    })?;
    let n = raw.n.unwrap_or(DEFAULT_N);
    if n == 0 {
        return Err(origins.err("n", "n must be positive"));
    }

    let trials = match (scenario, raw.trials) {
        (Scenario::SingleTrial, Some(t)) if t != 1 => {
            return Err(origins.err("trials", "single_trial runs exactly one trial"));
        }
        (Scenario::SingleTrial, _) => 1,
        (_, Some(0)) => return Err(origins.err("trials", "trials must be at least 1")),
        (_, t) => t.unwrap_or(DEFAULT_TRIALS),
    };

    let (layer_a, layer_b) = match scenario.default_layers() {
        Some((da, db)) => {
            let a = raw.layer_a.unwrap_or(da);
            let b = raw.layer_b.unwrap_or(db);
            check_layers(scenario, n, &a, &b, origins)?;
            let mut b = b.filled(n);
            if scenario == Scenario::BetaSweep {
                b.beta = None;
            }
            (Some(a.filled(n)), Some(b))
        }
        None => {
            for (key, layer) in [("layer_a", &raw.layer_a), ("layer_b", &raw.layer_b)] {
                if layer.is_some() {
                    return Err(origins.err(
                        key,
                        format!("not used by {scenario}; list layers under `pairings`"),
                    ));
                }
            }
            (None, None)
        }
    };

    let pairings = match scenario.default_pairings() {
        Some(defaults) => {
            let pairings = raw.pairings.unwrap_or(defaults);
            if pairings.is_empty() {
                return Err(origins.err("pairings", "at least one pairing is required"));
            }
            let allowed = synergy_pairings();
            let mut filled = Vec::with_capacity(pairings.len());
            for (i, p) in pairings.iter().enumerate() {
                if scenario == Scenario::Synergy
                    && !allowed
                        .iter()
                        .any(|a| a.a.kind == p.a.kind && a.b.kind == p.b.kind)
                {
                    return Err(origins.err(
                        &format!("pairings[{i}]"),
                        "synergy pairings must be ERG-ERG, ERG-RRG or ERG-PLG",
                    ));
                }
                for (side, layer) in [("a", &p.a), ("b", &p.b)] {
                    layer
                        .resolve(n, 0)
                        .validate()
                        .map_err(|e| origins.err(&format!("pairings[{i}].{side}"), core_msg(e)))?;
                }
                filled.push(Pairing::new(p.a.filled(n), p.b.filled(n)));
            }
            Some(filled)
        }
        None => {
            if raw.pairings.is_some() {
                return Err(origins.err(
                    "pairings",
                    format!("not used by {scenario}; use `layer_a` and `layer_b`"),
                ));
            }
            None
        }
    };

    let params = resolve_params(scenario, raw.params, origins)?;

    let mut grids = raw.grids.unwrap_or_default();
    for key in ["tau_a", "tau_b", "beta_b", "alpha"] {
        let used = scenario.grid_keys().contains(&key);
        let path = format!("grids.{key}");
        if !used {
            if grids.get(key).is_some() {
                return Err(origins.err(&path, format!("not used by {scenario}")));
            }
            continue;
        }
        let values = grids.slot(key).get_or_insert_with(|| match key {
            "beta_b" => DEFAULT_BETA_AXIS.to_vec(),
            "alpha" => vec![params.alpha],
            _ => default_tau_axis(),
        });
        if values.is_empty() {
            return Err(origins.err(&path, "axis must not be empty"));
        }
        let (ok, constraint): (fn(f64) -> bool, &str) = match key {
            "beta_b" => (|v| v > 0.0 && v <= 1.0, "values must lie in (0,1]"),
            "alpha" => (
                |v| v > 0.0 && v.is_finite(),
                "values must be finite and > 0",
            ),
            _ => (|v| (0.0..=1.0).contains(&v), "values must lie in [0,1]"),
        };
        if let Some(bad) = values.iter().find(|v| !ok(**v)) {
            return Err(origins.err(&path, format!("{constraint}, got {bad}")));
        }
    }

    let speed_threshold = match (scenario, raw.speed_threshold) {
        (Scenario::SpeedOrder, t) => {
            let t = t.unwrap_or(DEFAULT_SPEED_THRESHOLD);
            if !(t > 0.0 && t < 1.0) {
                return Err(origins.err(
                    "speed_threshold",
                    format!("speed_threshold must lie in (0,1), got {t}"),
                ));
            }
            Some(t)
        }
        (_, Some(_)) => {
            return Err(origins.err("speed_threshold", format!("not used by {scenario}")))
        }
        (_, None) => None,
    };

    let emit_cells = match (scenario.is_grid(), raw.emit_cells) {
        (true, e) => Some(e.unwrap_or(false)),
        (false, Some(_)) => {
            return Err(origins.err("emit_cells", format!("not used by {scenario}")))
        }
        (false, None) => None,
    };

    Ok(RunConfig {
        experiment: ExperimentConfig {
            scenario,
            n,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            trials,
            layer_a,
            layer_b,
            pairings,
            params,
            grids,
            speed_threshold,
            emit_cells,
        },
        output_dir: raw
            .output_dir
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        threads: raw.threads.unwrap_or_default(),
    })
}

fn check_layers(
    scenario: Scenario,
    n: usize,
    a: &LayerSpec,
    b: &LayerSpec,
    origins: &Origins,
) -> Result<()> {
    match scenario {
        Scenario::BetaSweep => {
            for (key, layer) in [("layer_a", a), ("layer_b", b)] {
                if layer.kind != GraphKind::Wsg {
                    return Err(
                        origins.err(&format!("{key}.kind"), "beta_sweep requires WSG layers")
                    );
                }
            }
            if b.beta.is_some() {
                return Err(
                    origins.err("layer_b.beta", "layer B rewiring is swept by grids.beta_b")
                );
            }
            if a.resolve(n, 0).k != b.resolve(n, 0).k {
                return Err(origins.err(
                    "layer_b.k",
                    "beta_sweep requires equal degree on both layers",
                ));
            }
        }
        Scenario::LongShort => {
            if !matches!(a.kind, GraphKind::Rrg | GraphKind::Erg | GraphKind::Plg) {
                return Err(origins.err(
                    "layer_a.kind",
                    "long_short requires a long-range layer A: RRG, ERG or PLG",
                ));
            }
            if b.kind != GraphKind::Lat {
                return Err(origins.err("layer_b.kind", "long_short requires a LAT layer B"));
            }
        }
        _ => {}
    }
    for (key, layer) in [("layer_a", a), ("layer_b", b)] {
        layer
            .resolve(n, 0)
            .validate()
            .map_err(|e| origins.err(key, core_msg(e)))?;
    }
    Ok(())
}

fn resolve_params(scenario: Scenario, raw: Option<RawParams>, origins: &Origins) -> Result<Params> {
    let (tau_a, tau_b) = scenario.default_taus();
    let raw = raw.unwrap_or(RawParams {
        alpha: None,
        k_a: None,
        k_b: None,
        tau_a: None,
        tau_b: None,
        max_steps: None,
        activity: None,
        dormancy_on_adoption: None,
    });
    let params = Params {
        alpha: raw.alpha.unwrap_or(scenario.default_alpha()),
        k_a: raw.k_a.unwrap_or(DEFAULT_ATTRACTIVENESS),
        k_b: raw.k_b.unwrap_or(DEFAULT_ATTRACTIVENESS),
        tau_a: raw.tau_a.unwrap_or(tau_a),
        tau_b: raw.tau_b.unwrap_or(tau_b),
        max_steps: raw.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        activity: raw.activity.unwrap_or_default(),
        dormancy_on_adoption: raw.dormancy_on_adoption.unwrap_or(true),
    };
    params.sim(0).validate().map_err(|e| {
        let msg = core_msg(e);
        // Parameter messages start with the offending field's name.
        let field = msg.split_whitespace().next().unwrap_or("").to_string();
        origins.err(&format!("params.{field}"), msg)
    })?;
    Ok(params)
}

fn core_msg(e: cocontagion::Error) -> String {
    match e {
        cocontagion::Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

/// Canonical JSON of the effective experiment configuration.
pub fn canonical_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("configuration serializes")
}
