use hetnet_core::mcsim::{self, VariantEstimate};
use hetnet_core::{
    average_rate, coverage_probability, coverage_rayleigh, coverage_reference, rate_rayleigh, rate_reference, Error,
    Estimate, NetworkParams, SimConfig, Variant,
};
use rayon::prelude::*;

use crate::config::{db_to_linear, Config, MethodName, SweepVariable};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Coverage,
    /// Average rate conditioned on coverage, in nats.
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub metric: Metric,
    /// Repeat the simulation on a disk of twice the radius.
    pub radius_check: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepPoint {
    Db(f64),
    Shapes(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub point: SweepPoint,
    pub closed: Option<f64>,
    pub rayleigh: Option<f64>,
    pub reference: Option<f64>,
    pub mc: Option<Estimate>,
    /// Monte Carlo mean on the doubled disk.
    pub mc_2r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub methods: Vec<MethodName>,
    pub options: RunOptions,
    pub rows: Vec<OutputRow>,
}

impl SweepTable {
    /// Largest `|mc_2r - mc|` over the sweep.
    pub fn max_radius_drift(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| Some((r.mc_2r? - r.mc?.mean).abs()))
            .reduce(f64::max)
    }
}

fn params_at(config: &Config, index: usize) -> NetworkParams {
    let mut p = config.params.clone();
    match config.sweep.variable {
        SweepVariable::Beta1Db => p.tiers[0].threshold = db_to_linear(config.sweep.values[index]),
        SweepVariable::NoiseDb => p.noise = db_to_linear(config.sweep.values[index]),
        SweepVariable::NakagamiPair => {
            for (t, &m) in p.tiers.iter_mut().zip(&config.sweep.pairs[index]) {
                t.nakagami_m = m;
            }
        }
    }
    p
}

fn evaluate(method: MethodName, metric: Metric, p: &NetworkParams) -> Result<f64, Error> {
    match (metric, method) {
        (Metric::Coverage, MethodName::Closed) => Ok(coverage_probability(p)?.value),
        (Metric::Coverage, MethodName::Rayleigh) => Ok(coverage_rayleigh(p)?.value),
        (Metric::Coverage, MethodName::Reference) => Ok(coverage_reference(p)?.value),
        (Metric::Rate, MethodName::Closed) => Ok(average_rate(p)?.value),
        (Metric::Rate, MethodName::Rayleigh) => Ok(rate_rayleigh(p)?.value),
        (Metric::Rate, MethodName::Reference) => Ok(rate_reference(p)?.value),
        (_, MethodName::Mc) => unreachable!("simulation runs per sweep, not per point"),
    }
}

fn sim_config(config: &Config, p: &NetworkParams, radius_scale: f64) -> SimConfig {
    let s = &config.sim;
    let sim = SimConfig::new(p, s.n_geometry, s.n_fading, s.seed);
    let radius = s.region_radius.unwrap_or(sim.region_radius);
    sim.with_radius(radius * radius_scale)
}

fn pick(metric: Metric, v: &VariantEstimate) -> Result<Estimate, Error> {
    match metric {
        Metric::Coverage => Ok(v.coverage),
        Metric::Rate => v.rate.ok_or(Error::NoCoveredTrials),
    }
}

/// Monte Carlo estimates for every sweep point. Threshold and noise sweeps
/// share one set of draws; each shape pair is a separate run with the same
/// seed.
fn simulate_sweep(config: &Config, metric: Metric, radius_scale: f64) -> Result<Vec<Estimate>, Error> {
    let n = config.sweep.len();
    match config.sweep.variable {
        SweepVariable::NakagamiPair => (0..n)
            .map(|i| {
                let p = params_at(config, i);
                let sim = sim_config(config, &p, radius_scale);
                pick(metric, &mcsim::simulate(&p, &sim, &[Variant::of(&p)])?[0])
            })
            .collect(),
        _ => {
            let p = &config.params;
            let variants: Vec<Variant> = (0..n).map(|i| Variant::of(&params_at(config, i))).collect();
            let sim = sim_config(config, p, radius_scale);
            mcsim::simulate(p, &sim, &variants)?
                .iter()
                .map(|v| pick(metric, v))
                .collect()
        }
    }
}

/// Evaluates every requested method at every sweep point.
pub fn run_sweep(config: &Config, options: RunOptions) -> Result<SweepTable, CliError> {
    let sweep = &config.sweep;
    let analytic: Vec<MethodName> = sweep.methods.iter().copied().filter(|&m| m != MethodName::Mc).collect();

    let values: Vec<Vec<f64>> = (0..sweep.len())
        .into_par_iter()
        .map(|i| {
            let p = params_at(config, i);
            analytic.iter().map(|&m| evaluate(m, options.metric, &p)).collect()
        })
        .collect::<Result<_, Error>>()?;

    let (mc, mc_2r) = if sweep.has(MethodName::Mc) {
        let mc = simulate_sweep(config, options.metric, 1.0)?;
        let wide = if options.radius_check {
            Some(simulate_sweep(config, options.metric, 2.0)?)
        } else {
            None
        };
        (Some(mc), wide)
    } else {
        (None, None)
    };

    let rows = (0..sweep.len())
        .map(|i| {
            let get = |m: MethodName| analytic.iter().position(|&a| a == m).map(|j| values[i][j]);
            OutputRow {
                point: match sweep.variable {
                    SweepVariable::NakagamiPair => SweepPoint::Shapes(sweep.pairs[i].clone()),
                    _ => SweepPoint::Db(sweep.values[i]),
                },
                closed: get(MethodName::Closed),
                rayleigh: get(MethodName::Rayleigh),
                reference: get(MethodName::Reference),
                mc: mc.as_ref().map(|v| v[i]),
                mc_2r: mc_2r.as_ref().map(|v| v[i].mean),
            }
        })
        .collect();

    let table = SweepTable {
        variable: sweep.variable,
        methods: sweep.methods.clone(),
        options,
        rows,
    };
    if let Some(drift) = table.max_radius_drift() {
        log::info!("largest change from doubling the simulation radius: {drift:.3e}");
        if drift > 1e-3 {
            log::warn!("doubling the simulation radius moved an estimate by {drift:.3e}");
        }
    }
    Ok(table)
}
