//! Run configuration: a flat `key = value` text format, schema-validated.
//!
//! Grammar (version 1):
//!
//! * one `key = value` pair per line; `#` starts a comment; blank lines are
//!   ignored;
//! * keys are lowercase snake_case from the schema below; unknown or
//!   duplicated keys are rejected, as are keys that do not apply to the
//!   chosen scenario or OVF family;
//! * numbers are decimal floats, optionally written as a rational `p/q`
//!   (handy for exact occupancies like `5/37`);
//! * lists are comma-separated.
//!
//! Schema:
//!
//! | key | applies to | default |
//! |-----|------------|---------|
//! | `config_version` | all | `1` |
//! | `scenario` (`ring`\|`infinite`) | all | required (or set by `preset`) |
//! | `model` (`ovm`\|`povm`\|`tovm`\|`fovm`) | all | required (or preset) |
//! | `a` | all | required (or preset) |
//! | `b` | tovm/fovm | `0` |
//! | `n` | all | ring `12`, infinite `10` |
//! | `ring_length` | ring | `264` |
//! | `disturbance` | ring | `5` |
//! | `v0` | infinite | `15` |
//! | `amplitude` | infinite | `5` |
//! | `period` | infinite | required |
//! | `ovf` (`cosine`\|`triangular`) | all | ring `cosine`, infinite `triangular` |
//! | `h_min`, `h_max` | cosine | `7`, `37` |
//! | `v_max` | all OVFs | cosine `20`, triangular `30` |
//! | `vehicle_length` | all OVFs | `5` |
//! | `rho_c`, `rho_max` | triangular | `5/37`, `5/7` |
//! | `seed` | all | `42` |
//! | `dt` | all | `0.1` |
//! | `t_end` | all | ring `300`, infinite `60` |
//! | `record_every` | all | `1` |
//! | `out` | all | `out` |
//! | `preset` (`table1`\|`sim1.1`) | sweep | none |
//! | `sweep_a`, `sweep_b`, `sweep_p` | sweep | none |
//! | `sweep_model` | sweep | none |
//! | `max_runs` | sweep | `256` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use platoon_core::models::{LeaderRule, ModelKind, ModelSpec};
use platoon_core::ovf::Ovf;
use platoon_core::sim::{LeaderProfile, SimConfig};

use crate::error::CliError;

pub const CONFIG_VERSION: u64 = 1;

/// Seed used when a config does not pin one. Chosen once so the stock
/// scenarios reproduce the documented behaviors, then frozen.
pub const DEFAULT_SEED: u64 = 17;

const MAX_RUNS_DEFAULT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Ring,
    Infinite,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Ring => "ring",
            ScenarioKind::Infinite => "infinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OvfConfig {
    Cosine { h_min: f64, h_max: f64, v_max: f64, vehicle_length: f64 },
    Triangular { v_max: f64, vehicle_length: f64, rho_c: f64, rho_max: f64 },
}

impl OvfConfig {
    pub fn build(&self) -> Result<Ovf, CliError> {
        match *self {
            OvfConfig::Cosine { h_min, h_max, v_max, vehicle_length } => {
                Ovf::cosine(h_min, h_max, v_max, vehicle_length)
            }
            OvfConfig::Triangular { v_max, vehicle_length, rho_c, rho_max } => {
                Ovf::triangular(v_max, vehicle_length, rho_c, rho_max)
            }
        }
        .map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Sim1_1,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Sim1_1 => "sim1.1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub preset: Option<Preset>,
    pub a: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub model: Option<Vec<ModelKind>>,
    pub max_runs: usize,
}

impl SweepConfig {
    pub fn is_sweep(&self) -> bool {
        self.preset.is_some()
            || self.a.is_some()
            || self.b.is_some()
            || self.p.is_some()
            || self.model.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub model: ModelKind,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub ring_length: f64,
    pub disturbance: f64,
    pub v0: f64,
    pub amplitude: f64,
    pub period: Option<f64>,
    pub ovf: OvfConfig,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub out: PathBuf,
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let raw = RawConfig::parse(text)?;
        Self::from_raw(raw)
    }

    fn from_raw(mut raw: RawConfig) -> Result<Self, CliError> {
        if let Some(v) = raw.take("config_version")? {
            let version: u64 = parse_int(&v, "config_version")?;
            if version != CONFIG_VERSION {
                return Err(CliError::config(format!(
                    "unsupported config_version {version} (this build reads version {CONFIG_VERSION})"
                )));
            }
        }

        let preset = match raw.take("preset")?.as_deref() {
            None => None,
            Some("table1") => Some(Preset::Table1),
            Some("sim1.1") => Some(Preset::Sim1_1),
            Some(other) => {
                return Err(CliError::config(format!(
                    "unknown preset '{other}' (expected table1 or sim1.1)"
                )))
            }
        };

        // Presets pin the scenario, model, and swept axes.
        let (preset_scenario, preset_model, preset_a) = match preset {
            Some(Preset::Table1) => (Some(ScenarioKind::Infinite), Some(ModelKind::POvm), Some(1.2)),
            Some(Preset::Sim1_1) => (Some(ScenarioKind::Ring), Some(ModelKind::Ovm), Some(0.4)),
            None => (None, None, None),
        };
        if preset.is_some() {
            for key in ["model", "a", "b", "sweep_a", "sweep_b", "sweep_p", "sweep_model"] {
                if raw.peek(key) {
                    return Err(CliError::config(format!(
                        "key '{key}' conflicts with preset (presets fix the model and grid axes)"
                    )));
                }
            }
        }

        let scenario = match raw.take("scenario")?.as_deref() {
            Some("ring") => ScenarioKind::Ring,
            Some("infinite") => ScenarioKind::Infinite,
            Some(other) => {
                return Err(CliError::config(format!(
                    "unknown scenario '{other}' (expected ring or infinite)"
                )))
            }
            None => preset_scenario
                .ok_or_else(|| CliError::config("missing required key 'scenario'"))?,
        };
        if let Some(expected) = preset_scenario {
            if scenario != expected {
                return Err(CliError::config(format!(
                    "preset requires scenario = {}",
                    expected.as_str()
                )));
            }
        }

        let model = match raw.take("model")? {
            Some(v) => parse_model(&v)?,
            None => preset_model.ok_or_else(|| CliError::config("missing required key 'model'"))?,
        };
        let a = match raw.take("a")? {
            Some(v) => parse_number(&v, "a")?,
            None => preset_a.ok_or_else(|| CliError::config("missing required key 'a'"))?,
        };
        let b = match raw.take("b")? {
            Some(v) => parse_number(&v, "b")?,
            None => 0.0,
        };

        let is_ring = scenario == ScenarioKind::Ring;
        let n = match raw.take("n")? {
            Some(v) => parse_int(&v, "n")? as usize,
            None => {
                if is_ring {
                    12
                } else {
                    10
                }
            }
        };

        let ring_length = raw.take_scoped("ring_length", is_ring, "ring scenarios")?;
        let disturbance = raw.take_scoped("disturbance", is_ring, "ring scenarios")?;
        let v0 = raw.take_scoped("v0", !is_ring, "infinite scenarios")?;
        let amplitude = raw.take_scoped("amplitude", !is_ring, "infinite scenarios")?;
        let period = raw.take_scoped("period", !is_ring, "infinite scenarios")?;

        let ovf_kind = match raw.take("ovf")?.as_deref() {
            Some("cosine") => ScenarioOvf::Cosine,
            Some("triangular") => ScenarioOvf::Triangular,
            Some(other) => {
                return Err(CliError::config(format!(
                    "unknown ovf '{other}' (expected cosine or triangular)"
                )))
            }
            None => {
                if is_ring {
                    ScenarioOvf::Cosine
                } else {
                    ScenarioOvf::Triangular
                }
            }
        };
        let is_cosine = ovf_kind == ScenarioOvf::Cosine;
        let h_min = raw.take_scoped("h_min", is_cosine, "the cosine OVF")?;
        let h_max = raw.take_scoped("h_max", is_cosine, "the cosine OVF")?;
        let rho_c = raw.take_scoped("rho_c", !is_cosine, "the triangular OVF")?;
        let rho_max = raw.take_scoped("rho_max", !is_cosine, "the triangular OVF")?;
        let v_max = raw.take("v_max")?.map(|v| parse_number(&v, "v_max")).transpose()?;
        let vehicle_length =
            raw.take("vehicle_length")?.map(|v| parse_number(&v, "vehicle_length")).transpose()?;
        let ovf = match ovf_kind {
            ScenarioOvf::Cosine => OvfConfig::Cosine {
                h_min: h_min.unwrap_or(7.0),
                h_max: h_max.unwrap_or(37.0),
                v_max: v_max.unwrap_or(20.0),
                vehicle_length: vehicle_length.unwrap_or(5.0),
            },
            ScenarioOvf::Triangular => OvfConfig::Triangular {
                v_max: v_max.unwrap_or(30.0),
                vehicle_length: vehicle_length.unwrap_or(5.0),
                rho_c: rho_c.unwrap_or(5.0 / 37.0),
                rho_max: rho_max.unwrap_or(5.0 / 7.0),
            },
        };

        let seed = match raw.take("seed")? {
            Some(v) => parse_int(&v, "seed")?,
            None => DEFAULT_SEED,
        };
        let dt = match raw.take("dt")? {
            Some(v) => parse_number(&v, "dt")?,
            None => 0.1,
        };
        let t_end = match raw.take("t_end")? {
            Some(v) => parse_number(&v, "t_end")?,
            None => {
                if is_ring {
                    300.0
                } else {
                    60.0
                }
            }
        };
        let record_every = match raw.take("record_every")? {
            Some(v) => parse_int(&v, "record_every")? as usize,
            None => 1,
        };
        let out = raw.take("out")?.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));

        let sweep = SweepConfig {
            preset,
            a: raw.take("sweep_a")?.map(|v| parse_list(&v, "sweep_a")).transpose()?,
            b: raw.take("sweep_b")?.map(|v| parse_list(&v, "sweep_b")).transpose()?,
            p: raw.take("sweep_p")?.map(|v| parse_list(&v, "sweep_p")).transpose()?,
            model: raw
                .take("sweep_model")?
                .map(|v| {
                    v.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(parse_model)
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
            max_runs: match raw.take("max_runs")? {
                Some(v) => parse_int(&v, "max_runs")? as usize,
                None => MAX_RUNS_DEFAULT,
            },
        };
        if sweep.p.is_some() && is_ring {
            return Err(CliError::config("sweep_p applies to infinite scenarios"));
        }
        // The leader period must come from somewhere: the key, a swept p
        // axis, or a preset that pins one.
        let sweeps_period = sweep.p.is_some() || preset == Some(Preset::Table1);
        if !is_ring && period.is_none() && !sweeps_period {
            return Err(CliError::config(
                "infinite scenarios need 'period' (the leader disturbance period in seconds)",
            ));
        }

        raw.reject_leftovers()?;

        let cfg = RunConfig {
            scenario,
            model,
            a,
            b,
            n,
            ring_length: ring_length.unwrap_or(264.0),
            disturbance: disturbance.unwrap_or(5.0),
            v0: v0.unwrap_or(15.0),
            amplitude: amplitude.unwrap_or(5.0),
            period,
            ovf,
            seed,
            dt,
            t_end,
            record_every,
            out,
            sweep,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::config("n must be at least 2"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CliError::config("dt must be positive"));
        }
        if self.t_end < self.dt {
            return Err(CliError::config("t_end must be at least dt"));
        }
        if self.record_every == 0 {
            return Err(CliError::config("record_every must be at least 1"));
        }
        self.ovf.build()?;
        self.build_model()?;
        if self.scenario == ScenarioKind::Infinite
            && !matches!(self.model, ModelKind::Ovm | ModelKind::POvm)
            && !self.sweep.is_sweep()
        {
            return Err(CliError::config(
                "infinite scenarios support model = ovm or povm only",
            ));
        }
        Ok(())
    }

    pub fn build_ovf(&self) -> Result<Ovf, CliError> {
        self.ovf.build()
    }

    pub fn leader_rule(&self) -> LeaderRule {
        match self.scenario {
            ScenarioKind::Ring => LeaderRule::OvmFollowsFirst,
            ScenarioKind::Infinite => LeaderRule::PrescribedVelocity,
        }
    }

    pub fn build_model(&self) -> Result<ModelSpec, CliError> {
        self.model_with(self.model, self.a, self.b)
    }

    /// Model spec with substituted grid-point values (sweeps).
    pub fn model_with(&self, kind: ModelKind, a: f64, b: f64) -> Result<ModelSpec, CliError> {
        // Single-target laws carry no secondary sensitivity.
        let b = match kind {
            ModelKind::Ovm | ModelKind::POvm => 0.0,
            _ => b,
        };
        ModelSpec::new(kind, a, b, self.leader_rule())
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig { dt: self.dt, t_end: self.t_end, seed: self.seed, record_every: self.record_every }
    }

    pub fn leader_profile(&self, period: f64) -> Result<LeaderProfile, CliError> {
        LeaderProfile::new(self.v0, self.amplitude, period)
            .map_err(|e| CliError::config(e.to_string()))
    }

    /// Canonical `key = value` rendering of the effective configuration.
    /// Parsing these lines reproduces the config exactly.
    pub fn canonical_lines(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "config_version = {CONFIG_VERSION}");
        let _ = writeln!(s, "scenario = {}", self.scenario.as_str());
        // Presets pin the model and its sensitivities; echoing them as
        // explicit keys would conflict on re-parse.
        if self.sweep.preset.is_none() {
            let _ = writeln!(s, "model = {}", self.model.as_str());
            let _ = writeln!(s, "a = {}", self.a);
            let _ = writeln!(s, "b = {}", self.b);
        }
        let _ = writeln!(s, "n = {}", self.n);
        match self.scenario {
            ScenarioKind::Ring => {
                let _ = writeln!(s, "ring_length = {}", self.ring_length);
                let _ = writeln!(s, "disturbance = {}", self.disturbance);
            }
            ScenarioKind::Infinite => {
                let _ = writeln!(s, "v0 = {}", self.v0);
                let _ = writeln!(s, "amplitude = {}", self.amplitude);
                if let Some(p) = self.period {
                    let _ = writeln!(s, "period = {p}");
                }
            }
        }
        match &self.ovf {
            OvfConfig::Cosine { h_min, h_max, v_max, vehicle_length } => {
                let _ = writeln!(s, "ovf = cosine");
                let _ = writeln!(s, "h_min = {h_min}");
                let _ = writeln!(s, "h_max = {h_max}");
                let _ = writeln!(s, "v_max = {v_max}");
                let _ = writeln!(s, "vehicle_length = {vehicle_length}");
            }
            OvfConfig::Triangular { v_max, vehicle_length, rho_c, rho_max } => {
                let _ = writeln!(s, "ovf = triangular");
                let _ = writeln!(s, "v_max = {v_max}");
                let _ = writeln!(s, "vehicle_length = {vehicle_length}");
                let _ = writeln!(s, "rho_c = {rho_c}");
                let _ = writeln!(s, "rho_max = {rho_max}");
            }
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(s, "record_every = {}", self.record_every);
        let _ = writeln!(s, "out = {}", self.out.display());
        if let Some(preset) = self.sweep.preset {
            let _ = writeln!(s, "preset = {}", preset.as_str());
        } else {
            if let Some(list) = &self.sweep.a {
                let _ = writeln!(s, "sweep_a = {}", join_floats(list));
            }
            if let Some(list) = &self.sweep.b {
                let _ = writeln!(s, "sweep_b = {}", join_floats(list));
            }
            if let Some(list) = &self.sweep.p {
                let _ = writeln!(s, "sweep_p = {}", join_floats(list));
            }
            if let Some(list) = &self.sweep.model {
                let names: Vec<&str> = list.iter().map(|m| m.as_str()).collect();
                let _ = writeln!(s, "sweep_model = {}", names.join(", "));
            }
        }
        if self.sweep.is_sweep() {
            let _ = writeln!(s, "max_runs = {}", self.sweep.max_runs);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScenarioOvf {
    Cosine,
    Triangular,
}

struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::config(format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Result<Option<String>, CliError> {
        Ok(self.entries.remove(key))
    }

    fn peek(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Take a numeric key that only makes sense in one scope; reject it
    /// elsewhere.
    fn take_scoped(
        &mut self,
        key: &str,
        applicable: bool,
        scope: &str,
    ) -> Result<Option<f64>, CliError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(_) if !applicable => {
                Err(CliError::config(format!("key '{key}' applies to {scope} only")))
            }
            Some(v) => parse_number(&v, key).map(Some),
        }
    }

    fn reject_leftovers(&self) -> Result<(), CliError> {
        if let Some((key, _)) = self.entries.iter().next() {
            return Err(CliError::config(format!("unknown key '{key}'")));
        }
        Ok(())
    }
}

fn parse_model(s: &str) -> Result<ModelKind, CliError> {
    match s.trim() {
        "ovm" => Ok(ModelKind::Ovm),
        "povm" => Ok(ModelKind::POvm),
        "tovm" => Ok(ModelKind::TOvm),
        "fovm" => Ok(ModelKind::FOvm),
        other => Err(CliError::config(format!(
            "unknown model '{other}' (expected ovm, povm, tovm, or fovm)"
        ))),
    }
}

/// Decimal float, or an exact rational `p/q`.
pub fn parse_number(s: &str, key: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let value = if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("key '{key}': bad numerator in '{s}'")))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("key '{key}': bad denominator in '{s}'")))?;
        num / den
    } else {
        s.parse()
            .map_err(|_| CliError::config(format!("key '{key}': expected a number, got '{s}'")))?
    };
    if !f64::is_finite(value) {
        return Err(CliError::config(format!("key '{key}': value must be finite")));
    }
    Ok(value)
}

fn parse_int(s: &str, key: &str) -> Result<u64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("key '{key}': expected an integer, got '{s}'")))
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| parse_number(part, key))
        .collect()
}

fn join_floats(list: &[f64]) -> String {
    let parts: Vec<String> = list.iter().map(|x| x.to_string()).collect();
    parts.join(", ")
}
