//! JSON sweep configuration.
//!
//! ```json
//! {
//!   "alpha": 3.0,
//!   "noise_db": -40.0,
//!   "tiers": [
//!     { "lambda": 1.0, "power": 25.0, "beta_db": 5.0, "m": 1 },
//!     { "lambda": 5.0, "power": 1.0, "beta_db": 1.0, "m": 1 }
//!   ],
//!   "sweep": { "variable": "beta1_db", "start": 1.0, "stop": 20.0, "points": 10,
//!              "methods": ["closed", "reference", "mc"] },
//!   "sim": { "n_geometry": 10000, "n_fading": 100, "seed": 1 }
//! }
//! ```

use std::path::Path;

use hetnet_core::model::MAX_NAKAGAMI_M;
use hetnet_core::{NetworkParams, TierParams, Violation, Violations};
use serde::Deserialize;

use crate::CliError;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Threshold of the first tier, in dB.
    Beta1Db,
    NoiseDb,
    /// Nakagami shapes of all tiers, one list per point.
    NakagamiPair,
}

/// Evaluation methods, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Closed,
    Rayleigh,
    Reference,
    Mc,
}

impl MethodName {
    pub fn column(self) -> &'static str {
        match self {
            MethodName::Closed => "closed",
            MethodName::Rayleigh => "rayleigh",
            MethodName::Reference => "reference",
            MethodName::Mc => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Sweep values; dB for the threshold and noise sweeps.
    pub values: Vec<f64>,
    /// Nakagami shapes per point for [`SweepVariable::NakagamiPair`].
    pub pairs: Vec<Vec<u32>>,
    /// Sorted, without duplicates.
    pub methods: Vec<MethodName>,
}

impl SweepSpec {
    pub fn has(&self, method: MethodName) -> bool {
        self.methods.contains(&method)
    }

    pub fn len(&self) -> usize {
        match self.variable {
            SweepVariable::NakagamiPair => self.pairs.len(),
            _ => self.values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    pub n_geometry: usize,
    pub n_fading: usize,
    pub seed: u64,
    /// Defaults to a disk holding a few hundred base stations on average.
    #[serde(default)]
    pub region_radius: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            n_geometry: 10_000,
            n_fading: 100,
            seed: 1,
            region_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: NetworkParams,
    pub sweep: SweepSpec,
    pub sim: SimSettings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTier {
    lambda: f64,
    power: f64,
    beta_db: f64,
    m: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: SweepVariable,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    methods: Vec<MethodName>,
    pairs: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    alpha: f64,
    noise_db: f64,
    tiers: Vec<RawTier>,
    sweep: RawSweep,
    #[serde(default)]
    sim: SimSettings,
}

pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Parses and validates a configuration document, reporting every violation
/// with its field path.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let raw: RawConfig = serde_json::from_str(text)?;
    let mut v = Vec::new();

    let params = NetworkParams::new(
        raw.alpha,
        db_to_linear(raw.noise_db),
        raw.tiers
            .iter()
            .map(|t| TierParams::new(t.lambda, t.power, db_to_linear(t.beta_db), t.m))
            .collect(),
    );
    if let Err(e) = params.validate() {
        v.extend(
            e.0.into_iter()
                .map(|x| Violation::new(config_path(&x.field), x.message)),
        );
    }
    let k = raw.tiers.len();

    let s = &raw.sweep;
    let mut methods = s.methods.clone();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        v.push(Violation::new("sweep.methods", "at least one method is required"));
    }

    let mut values = Vec::new();
    let mut pairs = Vec::new();
    match s.variable {
        SweepVariable::Beta1Db | SweepVariable::NoiseDb => {
            let (start, stop, points) = (s.start, s.stop, s.points);
            for (name, present) in [
                ("start", start.is_some()),
                ("stop", stop.is_some()),
                ("points", points.is_some()),
            ] {
                if !present {
                    v.push(Violation::new(format!("sweep.{name}"), "required for dB sweeps"));
                }
            }
            if s.pairs.is_some() {
                v.push(Violation::new("sweep.pairs", "only used by nakagami_pair sweeps"));
            }
            if let (Some(start), Some(stop), Some(points)) = (start, stop, points) {
                if start >= stop {
                    v.push(Violation::new(
                        "sweep.stop",
                        format!("must exceed start ({start} >= {stop})"),
                    ));
                }
                if points < 2 {
                    v.push(Violation::new("sweep.points", "at least two points are required"));
                }
                if s.variable == SweepVariable::Beta1Db && start <= 0.0 {
                    v.push(Violation::new("sweep.start", "thresholds must exceed 0 dB"));
                }
                if !(start.is_finite() && stop.is_finite()) {
                    v.push(Violation::new("sweep.start", "sweep bounds must be finite"));
                }
                if points >= 2 {
                    values = (0..points)
                        .map(|j| start + (stop - start) * j as f64 / (points - 1) as f64)
                        .collect();
                }
            }
        }
        SweepVariable::NakagamiPair => {
            for (name, present) in [
                ("start", s.start.is_some()),
                ("stop", s.stop.is_some()),
                ("points", s.points.is_some()),
            ] {
                if present {
                    v.push(Violation::new(
                        format!("sweep.{name}"),
                        "not used by nakagami_pair sweeps",
                    ));
                }
            }
            match &s.pairs {
                None => v.push(Violation::new("sweep.pairs", "required for nakagami_pair sweeps")),
                Some(p) if p.is_empty() => v.push(Violation::new("sweep.pairs", "at least one pair is required")),
                Some(p) => {
                    for (n, pair) in p.iter().enumerate() {
                        if pair.len() != k {
                            v.push(Violation::new(
                                format!("sweep.pairs[{n}]"),
                                format!("expected one shape per tier ({k}), got {}", pair.len()),
                            ));
                        }
                        if pair.iter().any(|&m| m == 0 || m > MAX_NAKAGAMI_M) {
                            v.push(Violation::new(
                                format!("sweep.pairs[{n}]"),
                                format!("Nakagami shapes must be in 1..={MAX_NAKAGAMI_M}"),
                            ));
                        }
                    }
                    pairs = p.clone();
                }
            }
        }
    }

    if methods.contains(&MethodName::Rayleigh) {
        let rayleigh = match s.variable {
            SweepVariable::NakagamiPair => pairs.iter().all(|p| p.iter().all(|&m| m == 1)),
            _ => raw.tiers.iter().all(|t| t.m == 1),
        };
        if !rayleigh {
            v.push(Violation::new("sweep.methods", "rayleigh requires m = 1 on every tier"));
        }
    }

    let sim = raw.sim;
    if sim.n_geometry < 2 {
        v.push(Violation::new(
            "sim.n_geometry",
            "at least two geometries are needed for a standard error",
        ));
    }
    if sim.n_fading == 0 {
        v.push(Violation::new(
            "sim.n_fading",
            "at least one fading draw per geometry is required",
        ));
    }
    if let Some(r) = sim.region_radius {
        if !(r > 0.0 && r.is_finite()) {
            v.push(Violation::new("sim.region_radius", "radius must be positive"));
        }
    }

    if !v.is_empty() {
        return Err(CliError::Invalid(Violations(v)));
    }
    Ok(Config {
        params,
        sweep: SweepSpec {
            variable: s.variable,
            values,
            pairs,
            methods,
        },
        sim,
    })
}

/// Maps a model field path onto the configuration key it came from.
fn config_path(field: &str) -> String {
    let (prefix, leaf) = match field.rfind('.') {
        Some(dot) => (&field[..=dot], &field[dot + 1..]),
        None => ("", field),
    };
    let leaf = match leaf {
        "noise" => "noise_db",
        "density" => "lambda",
        "threshold" => "beta_db",
        "nakagami_m" => "m",
        other => other,
    };
    format!("{prefix}{leaf}")
}
