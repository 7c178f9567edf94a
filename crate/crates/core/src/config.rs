//! Simulation configuration and its flat `key = value` file format.
//!
//! Lines hold one `key = value` pair; `#` starts a comment. Every key is
//! optional and unknown keys are rejected. Energies use the units in the key
//! name (`_nj`, `_pj`), lists are comma separated.
//!
//! ```text
//! # denser deployment, shorter run
//! nodes = 200
//! rounds = 400
//! max_sleep = auto
//! segment_probs = 0.9, 0.85, 0.8, 0.75, 0.7
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::coverage::{self, Rounding, DEFAULT_DUTY_FRACTION, DEFAULT_TARGET_COVERAGE};
use crate::deployment::{
    build_probe_grid, FieldConfig, DEFAULT_GRID_SPACING_M, DEFAULT_INITIAL_ENERGY_J,
};
use crate::error::{Error, Result};
use crate::protocol::{ProtocolKind, ProtocolPolicy, DEFAULT_SEGMENT_PROBS};
use crate::radio::{RadioParams, BITS_PER_BYTE};

pub const DEFAULT_NODES: usize = 150;
pub const DEFAULT_ROUNDS: u64 = 800;

pub const KEYS: &[&str] = &[
    "nodes",
    "initial_energy_j",
    "rounds",
    "field_x_min",
    "field_y_min",
    "field_x_max",
    "field_y_max",
    "bs_x",
    "bs_y",
    "sensing_range_m",
    "radio_range_m",
    "e_elec_nj_per_bit",
    "eps_fs_pj",
    "eps_mp_pj",
    "d0_m",
    "e_da_nj",
    "packet_bytes",
    "p_leach",
    "segments",
    "segment_probs",
    "d_max_m",
    "max_sleep",
    "target_coverage",
    "duty_fraction",
    "frames_per_round",
    "grid_spacing_m",
    "seeds",
    "energy_drain",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxSleep {
    /// Derive from the coverage target via the analytic density bound.
    Auto,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub field: FieldConfig,
    pub n_nodes: usize,
    pub initial_energy: f64,
    pub rounds: u64,
    pub radio: RadioParams,
    /// Protocol parameters; `policy.max_sleep` is kept resolved from
    /// `max_sleep`.
    pub policy: ProtocolPolicy,
    pub max_sleep: MaxSleep,
    pub target_coverage: f64,
    pub duty_fraction: f64,
    pub grid_spacing: f64,
    pub seeds: Vec<u64>,
    /// When false, nodes never lose energy. Used to observe pure election
    /// rotation.
    pub energy_drain: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let mut cfg = Self {
            field: FieldConfig::default(),
            n_nodes: DEFAULT_NODES,
            initial_energy: DEFAULT_INITIAL_ENERGY_J,
            rounds: DEFAULT_ROUNDS,
            radio: RadioParams::default(),
            policy: ProtocolPolicy::default(),
            max_sleep: MaxSleep::Auto,
            target_coverage: DEFAULT_TARGET_COVERAGE,
            duty_fraction: DEFAULT_DUTY_FRACTION,
            grid_spacing: DEFAULT_GRID_SPACING_M,
            seeds: vec![1],
            energy_drain: true,
        };
        cfg.resolve_max_sleep()
            .expect("default coverage target is valid");
        cfg
    }
}

impl SimulationConfig {
    pub fn policy_for(&self, kind: ProtocolKind) -> ProtocolPolicy {
        self.policy.clone().with_kind(kind)
    }

    /// Recomputes `policy.max_sleep` from the `max_sleep` setting.
    pub fn resolve_max_sleep(&mut self) -> Result<u64> {
        let resolved = match self.max_sleep {
            MaxSleep::Fixed(n) => n,
            MaxSleep::Auto => coverage::max_sleep_count(
                self.n_nodes as u64,
                self.field.area(),
                self.target_coverage,
                self.field.sensing_range,
                self.duty_fraction,
                Rounding::Floor,
            )
            .map_err(|e| Error::config("max_sleep", e.to_string()))?,
        };
        self.policy.max_sleep = resolved;
        Ok(resolved)
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.radio.validate()?;
        self.policy.validate()?;
        if self.n_nodes == 0 {
            return Err(Error::config("nodes", "must be at least 1"));
        }
        if !(self.initial_energy.is_finite() && self.initial_energy > 0.0) {
            return Err(Error::config("initial_energy_j", "must be positive"));
        }
        if !(self.target_coverage > 0.0 && self.target_coverage < 1.0) {
            return Err(Error::config("target_coverage", "must lie in (0, 1)"));
        }
        if !(self.duty_fraction > 0.0 && self.duty_fraction <= 1.0) {
            return Err(Error::config("duty_fraction", "must lie in (0, 1]"));
        }
        build_probe_grid(&self.field, self.grid_spacing)?;
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let lines: BTreeMap<String, usize> =
            entries.iter().map(|e| (e.key.clone(), e.line)).collect();
        let mut cfg = Self::default();
        let mut segments: Option<(usize, usize)> = None;
        let mut probs_given = false;

        for Entry { key, value, line } in &entries {
            let line = *line;
            match key.as_str() {
                "nodes" => cfg.n_nodes = parse(key, value, line)?,
                "initial_energy_j" => cfg.initial_energy = parse(key, value, line)?,
                "rounds" => cfg.rounds = parse(key, value, line)?,
                "field_x_min" => cfg.field.x_min = parse(key, value, line)?,
                "field_y_min" => cfg.field.y_min = parse(key, value, line)?,
                "field_x_max" => cfg.field.x_max = parse(key, value, line)?,
                "field_y_max" => cfg.field.y_max = parse(key, value, line)?,
                "bs_x" => cfg.field.bs_position.x = parse(key, value, line)?,
                "bs_y" => cfg.field.bs_position.y = parse(key, value, line)?,
                "sensing_range_m" => cfg.field.sensing_range = parse(key, value, line)?,
                "radio_range_m" => cfg.field.radio_range = parse(key, value, line)?,
                "e_elec_nj_per_bit" => cfg.radio.e_elec = parse::<f64>(key, value, line)? * 1e-9,
                "eps_fs_pj" => cfg.radio.eps_fs = parse::<f64>(key, value, line)? * 1e-12,
                "eps_mp_pj" => cfg.radio.eps_mp = parse::<f64>(key, value, line)? * 1e-12,
                "d0_m" => cfg.radio.d0 = parse(key, value, line)?,
                "e_da_nj" => cfg.radio.e_da = parse::<f64>(key, value, line)? * 1e-9,
                "packet_bytes" => {
                    let bytes: u64 = parse(key, value, line)?;
                    cfg.radio.packet_bits = bytes.checked_mul(BITS_PER_BYTE).ok_or_else(|| {
                        at_line(Error::config(key, "too large"), line)
                    })?;
                }
                "p_leach" => cfg.policy.p_leach = parse(key, value, line)?,
                "segments" => segments = Some((parse(key, value, line)?, line)),
                "segment_probs" => {
                    cfg.policy.segment_probs = parse_list(key, value, line)?;
                    probs_given = true;
                }
                "d_max_m" => cfg.policy.d_max = parse(key, value, line)?,
                "max_sleep" => {
                    cfg.max_sleep = if value.eq_ignore_ascii_case("auto") {
                        MaxSleep::Auto
                    } else {
                        MaxSleep::Fixed(parse(key, value, line)?)
                    }
                }
                "target_coverage" => cfg.target_coverage = parse(key, value, line)?,
                "duty_fraction" => cfg.duty_fraction = parse(key, value, line)?,
                "frames_per_round" => cfg.policy.frames_per_round = parse(key, value, line)?,
                "grid_spacing_m" => cfg.grid_spacing = parse(key, value, line)?,
                "seeds" => cfg.seeds = parse_list(key, value, line)?,
                "energy_drain" => cfg.energy_drain = parse(key, value, line)?,
                other => {
                    return Err(Error::Config {
                        key: other.to_string(),
                        line: Some(line),
                        message: format!("unknown key; expected one of: {}", KEYS.join(", ")),
                    })
                }
            }
        }

        if let Some((k, line)) = segments {
            if probs_given && k != cfg.policy.segment_probs.len() {
                return Err(at_line(
                    Error::config(
                        "segment_probs",
                        format!(
                            "lists {} probabilities but segments = {k}",
                            cfg.policy.segment_probs.len()
                        ),
                    ),
                    lines["segment_probs"],
                ));
            }
            if !probs_given && k != DEFAULT_SEGMENT_PROBS.len() {
                return Err(at_line(
                    Error::config(
                        "segments",
                        format!("{k} segments need an explicit segment_probs list"),
                    ),
                    line,
                ));
            }
        }

        let attach = |e: Error| match e {
            Error::Config { key, line: None, message } => {
                let line = lines.get(&key).copied();
                Error::Config { key, line, message }
            }
            other => other,
        };
        cfg.validate().map_err(attach)?;
        cfg.resolve_max_sleep().map_err(attach)?;
        Ok(cfg)
    }
}

impl FromStr for SimulationConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// Reads and validates a config file. Keys absent from the file keep their
/// defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.parse()
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                message: "missing key before `=`".into(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::Config {
                key: key.to_string(),
                line: Some(line),
                message: "given more than once".into(),
            });
        }
        out.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(out)
}

fn at_line(err: Error, line: usize) -> Error {
    match err {
        Error::Config { key, message, .. } => Error::Config {
            key,
            line: Some(line),
            message,
        },
        other => other,
    }
}

fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        key: key.to_string(),
        line: Some(line),
        message: format!("cannot parse `{value}`"),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(Error::Config {
            key: key.to_string(),
            line: Some(line),
            message: "empty list element".into(),
        });
    }
    items.into_iter().map(|s| parse(key, s, line)).collect()
}
