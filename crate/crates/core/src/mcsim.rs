//! Seeded Monte Carlo oracle for coverage and conditional rate.
//!
//! Each geometry realization places every tier's base stations as a Poisson
//! process in a disk of radius `R` around the typical user, then draws
//! `n_fading` independent Gamma(M_i, 1) fading snapshots on that geometry.
//!
//! Reproducibility: every (geometry, tier) pair owns two ChaCha streams, one
//! for positions and one for fading, keyed by the seed. Points are generated
//! in order of increasing distance and fading is drawn base station by base
//! station, so a larger disk extends a realization without changing what is
//! inside the smaller one. Geometry tallies are reduced in index order, so
//! results do not depend on the rayon schedule.
//!
//! Interference from outside the disk is replaced by its mean,
//! `Σ_i λ_i P_i M_i 2π R^(2-α) / (α - 2)`, unless disabled.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result, Violation, Violations};
use crate::model::NetworkParams;

/// Expected number of base stations inside the default simulation disk.
pub const DEFAULT_MEAN_STATIONS: f64 = 400.0;

/// Below this many trials an estimate is flagged as unreliable.
pub const MIN_RECOMMENDED_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub region_radius: f64,
    pub n_geometry: usize,
    pub n_fading: usize,
    pub seed: u64,
    /// Add the mean out-of-disk interference to every SINR denominator.
    pub tail_compensation: bool,
}

impl SimConfig {
    /// Configuration with the default radius for `params`.
    pub fn new(params: &NetworkParams, n_geometry: usize, n_fading: usize, seed: u64) -> Self {
        Self {
            region_radius: default_radius(params),
            n_geometry,
            n_fading,
            seed,
            tail_compensation: true,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.region_radius = radius;
        self
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Vec::new();
        if !self.region_radius.is_finite() || self.region_radius <= 0.0 {
            v.push(Violation::new("sim.region_radius", "radius must be positive"));
        }
        if self.n_geometry < 2 {
            v.push(Violation::new(
                "sim.n_geometry",
                "at least two geometries are needed for a standard error",
            ));
        }
        if self.n_fading == 0 {
            v.push(Violation::new(
                "sim.n_fading",
                "at least one fading draw per geometry is required",
            ));
        }
        if v.is_empty() {
            if self.n_geometry * self.n_fading < MIN_RECOMMENDED_TRIALS {
                log::warn!(
                    "only {} Monte Carlo trials; estimates will be noisy",
                    self.n_geometry * self.n_fading
                );
            }
            Ok(())
        } else {
            Err(Violations(v))
        }
    }
}

/// Radius holding [`DEFAULT_MEAN_STATIONS`] base stations on average.
pub fn default_radius(params: &NetworkParams) -> f64 {
    let total: f64 = params.tiers.iter().map(|t| t.density).sum();
    (DEFAULT_MEAN_STATIONS / (PI * total)).sqrt()
}

/// Mean interference from base stations beyond `radius`.
pub fn background_interference(params: &NetworkParams, radius: f64) -> f64 {
    let per_area: f64 = params
        .tiers
        .iter()
        .map(|t| t.density * t.power * t.nakagami_m as f64)
        .sum();
    per_area * 2.0 * PI * radius.powf(2.0 - params.alpha) / (params.alpha - 2.0)
}

/// Base-station distances from the user, per tier, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub tiers: Vec<Vec<f64>>,
    /// Deterministic interference added for the region outside the disk.
    pub background: f64,
}

impl Realization {
    pub fn num_stations(&self) -> usize {
        self.tiers.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error from the spread of per-geometry results.
    pub std_error: f64,
    /// Trials contributing to `mean`.
    pub n_samples: usize,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn contains(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Mean of `ln(1 + max SINR)` over covered trials, in nats.
    pub rate: Estimate,
    pub coverage: Estimate,
}

/// Thresholds and noise overriding those of the base network. Several
/// variants evaluated in one run share geometry and fading draws.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub thresholds: Vec<f64>,
    pub noise: f64,
}

impl Variant {
    pub fn of(params: &NetworkParams) -> Self {
        Self {
            thresholds: params.tiers.iter().map(|t| t.threshold).collect(),
            noise: params.noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantEstimate {
    pub coverage: Estimate,
    /// `None` when no trial was covered.
    pub rate: Option<Estimate>,
}

const KIND_POSITIONS: u64 = 0;
const KIND_FADING: u64 = 1;

fn stream_rng(seed: u64, geometry: u64, tiers: usize, tier: usize, kind: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((geometry * tiers as u64 + tier as u64) * 2 + kind);
    rng
}

/// Draws one geometry realization. Each tier's points are the arrivals of a
/// unit-rate process in `λ π d²`, stopped at the disk edge: the count is
/// Poisson(λ π R²) and the distances are those of i.i.d. uniform points in
/// the disk, delivered in sorted order.
pub fn sample_geometry(params: &NetworkParams, sim: &SimConfig, stream_index: u64) -> Realization {
    let k = params.num_tiers();
    let area = PI * sim.region_radius * sim.region_radius;
    let tiers = params
        .tiers
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut rng = stream_rng(sim.seed, stream_index, k, i, KIND_POSITIONS);
            let mut distances = Vec::new();
            let mut covered = 0.0;
            loop {
                let step: f64 = Exp1.sample(&mut rng);
                covered += step / t.density;
                if covered > area {
                    break;
                }
                distances.push((covered / PI).sqrt());
            }
            distances
        })
        .collect();
    Realization {
        tiers,
        background: if sim.tail_compensation {
            background_interference(params, sim.region_radius)
        } else {
            0.0
        },
    }
}

#[inline]
fn gamma_integer_shape<R: rand::Rng + ?Sized>(shape: u32, rng: &mut R) -> f64 {
    let mut h = 0.0;
    for _ in 0..shape {
        let e: f64 = Exp1.sample(rng);
        h += e;
    }
    h
}

/// SINR at the user from every base station of one snapshot. `fading[i][b]`
/// is the fading power of base station `b` of tier `i`. The interference for
/// a base station is everything received except its own signal, plus the
/// realization's background term.
pub fn snapshot_sinrs(params: &NetworkParams, real: &Realization, fading: &[Vec<f64>]) -> Vec<(usize, f64)> {
    let mut signals = Vec::with_capacity(real.num_stations());
    for (i, (dists, fades)) in real.tiers.iter().zip(fading).enumerate() {
        let p = params.tiers[i].power;
        for (d, h) in dists.iter().zip(fades) {
            signals.push((i, p * h * d.powf(-params.alpha)));
        }
    }
    // Interference from prefix and suffix sums, so a dominant signal is never
    // subtracted back out of the total.
    let mut suffix = vec![0.0; signals.len() + 1];
    for b in (0..signals.len()).rev() {
        suffix[b] = suffix[b + 1] + signals[b].1;
    }
    let mut prefix = 0.0;
    let mut out = Vec::with_capacity(signals.len());
    for (b, &(i, s)) in signals.iter().enumerate() {
        let interference = prefix + suffix[b + 1] + real.background;
        out.push((i, s / (interference + params.noise)));
        prefix += s;
    }
    out
}

/// The coverage event: some base station exceeds its own tier's threshold.
pub fn is_covered(params: &NetworkParams, sinrs: &[(usize, f64)]) -> bool {
    sinrs.iter().any(|&(i, sinr)| sinr > params.tiers[i].threshold)
}

/// Per geometry and variant: covered trials and the sum of ln(1 + SINR)
/// over them.
type Tally = Vec<(u32, f64)>;

fn geometry_tally(params: &NetworkParams, sim: &SimConfig, variants: &[Variant], g: u64) -> Tally {
    let k = params.num_tiers();
    let nf = sim.n_fading;
    let real = sample_geometry(params, sim, g);

    // Only the strongest station of a tier can cover: for fixed total power
    // SINR is increasing in the station's own signal.
    let mut total = vec![real.background; nf];
    let mut tier_max = vec![vec![0.0f64; nf]; k];
    for (i, dists) in real.tiers.iter().enumerate() {
        let tier = &params.tiers[i];
        let mut rng = stream_rng(sim.seed, g, k, i, KIND_FADING);
        let best = &mut tier_max[i];
        for &d in dists {
            let base = tier.power * d.powf(-params.alpha);
            for j in 0..nf {
                let s = base * gamma_integer_shape(tier.nakagami_m, &mut rng);
                total[j] += s;
                if s > best[j] {
                    best[j] = s;
                }
            }
        }
    }

    variants
        .iter()
        .map(|v| {
            let mut covered = 0u32;
            let mut rate_sum = 0.0;
            for j in 0..nf {
                let mut hit = false;
                let mut strongest = 0.0f64;
                for (maxes, &threshold) in tier_max.iter().zip(&v.thresholds) {
                    let s = maxes[j];
                    if s > 0.0 && s / (total[j] - s + v.noise) > threshold {
                        hit = true;
                    }
                    strongest = strongest.max(s);
                }
                if hit {
                    covered += 1;
                    rate_sum += (strongest / (total[j] - strongest + v.noise)).ln_1p();
                }
            }
            (covered, rate_sum)
        })
        .collect()
}

fn check_inputs(params: &NetworkParams, sim: &SimConfig, variants: &[Variant]) -> Result<()> {
    params.ensure_valid()?;
    sim.validate().map_err(Error::Invalid)?;
    for (n, v) in variants.iter().enumerate() {
        let mut probe = params.clone();
        if v.thresholds.len() != params.num_tiers() {
            return Err(Error::Invalid(Violations(vec![Violation::new(
                format!("variants[{n}].thresholds"),
                format!("expected {} thresholds, got {}", params.num_tiers(), v.thresholds.len()),
            )])));
        }
        for (t, &b) in probe.tiers.iter_mut().zip(&v.thresholds) {
            t.threshold = b;
        }
        probe.noise = v.noise;
        probe.ensure_valid()?;
    }
    Ok(())
}

/// Runs the simulation once and evaluates every variant on the shared draws.
pub fn simulate(params: &NetworkParams, sim: &SimConfig, variants: &[Variant]) -> Result<Vec<VariantEstimate>> {
    check_inputs(params, sim, variants)?;
    let tallies: Vec<Tally> = (0..sim.n_geometry as u64)
        .into_par_iter()
        .map(|g| geometry_tally(params, sim, variants, g))
        .collect();

    let n = sim.n_geometry as f64;
    let nf = sim.n_fading as f64;
    Ok((0..variants.len())
        .map(|vi| {
            let coverage = {
                let mean = tallies.iter().map(|t| t[vi].0 as f64 / nf).sum::<f64>() / n;
                let ss: f64 = tallies.iter().map(|t| (t[vi].0 as f64 / nf - mean).powi(2)).sum();
                Estimate {
                    mean,
                    std_error: (ss / (n - 1.0) / n).sqrt(),
                    n_samples: sim.n_geometry * sim.n_fading,
                }
            };
            let covered: f64 = tallies.iter().map(|t| t[vi].0 as f64).sum();
            let rate = (covered > 0.0).then(|| {
                // Ratio estimator over geometry clusters.
                let r = tallies.iter().map(|t| t[vi].1).sum::<f64>() / covered;
                let ss: f64 = tallies.iter().map(|t| (t[vi].1 - r * t[vi].0 as f64).powi(2)).sum();
                let mean_covered = covered / n;
                Estimate {
                    mean: r,
                    std_error: (ss / (n * (n - 1.0))).sqrt() / mean_covered,
                    n_samples: covered as usize,
                }
            });
            VariantEstimate { coverage, rate }
        })
        .collect())
}

/// Fraction of trials in which some base station of some tier exceeds that
/// tier's threshold.
pub fn mc_coverage(params: &NetworkParams, sim: &SimConfig) -> Result<Estimate> {
    Ok(simulate(params, sim, &[Variant::of(params)])?[0].coverage)
}

/// `E[ln(1 + max SINR) | covered]`, with the coverage estimate alongside.
pub fn mc_conditional_rate(params: &NetworkParams, sim: &SimConfig) -> Result<RateEstimate> {
    let out = simulate(params, sim, &[Variant::of(params)])?[0];
    Ok(RateEstimate {
        rate: out.rate.ok_or(Error::NoCoveredTrials)?,
        coverage: out.coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TierParams;

    fn two_tier(m: [u32; 2]) -> NetworkParams {
        NetworkParams::new(
            3.0,
            1e-4,
            vec![
                TierParams::new(1.0, 25.0, 3.16, m[0]),
                TierParams::new(5.0, 1.0, 1.2589, m[1]),
            ],
        )
    }

    #[test]
    fn geometry_is_deterministic_and_sorted() {
        let p = two_tier([1, 1]);
        let sim = SimConfig::new(&p, 10, 10, 42);
        let a = sample_geometry(&p, &sim, 3);
        assert_eq!(a, sample_geometry(&p, &sim, 3));
        assert_ne!(a, sample_geometry(&p, &sim, 4));
        for t in &a.tiers {
            assert!(t.windows(2).all(|w| w[0] <= w[1]));
            assert!(t.iter().all(|&d| d > 0.0 && d <= sim.region_radius));
        }
    }

    #[test]
    fn larger_disk_extends_realization() {
        let p = two_tier([1, 1]);
        let sim = SimConfig::new(&p, 10, 10, 9);
        let big = sim.clone().with_radius(2.0 * sim.region_radius);
        let a = sample_geometry(&p, &sim, 0);
        let b = sample_geometry(&p, &big, 0);
        for (x, y) in a.tiers.iter().zip(&b.tiers) {
            assert_eq!(&y[..x.len()], &x[..]);
            assert!(y.len() >= x.len());
        }
    }

    #[test]
    fn vanishing_density_gives_empty_realization() {
        let p = NetworkParams::new(3.0, 1.0, vec![TierParams::new(1e-12, 1.0, 2.0, 1)]);
        let sim = SimConfig::new(&p, 10, 10, 1).with_radius(1.0);
        assert!(sample_geometry(&p, &sim, 0).tiers[0].is_empty());
    }

    #[test]
    fn lone_station_sinr_is_snr() {
        let p = NetworkParams::new(4.0, 0.5, vec![TierParams::new(1.0, 2.0, 2.0, 1)]);
        let real = Realization {
            tiers: vec![vec![1.5]],
            background: 0.0,
        };
        let s = snapshot_sinrs(&p, &real, &[vec![0.7]]);
        assert_eq!(s.len(), 1);
        assert!((s[0].1 - 2.0 * 0.7 * 1.5f64.powi(-4) / 0.5).abs() < 1e-15);
    }

    #[test]
    fn symmetric_pair_has_unit_sir() {
        let p = NetworkParams::new(3.0, 1e-300, vec![TierParams::new(1.0, 1.0, 2.0, 1)]);
        let real = Realization {
            tiers: vec![vec![1.0, 1.0]],
            background: 0.0,
        };
        for (_, sinr) in snapshot_sinrs(&p, &real, &[vec![1.0, 1.0]]) {
            assert!((sinr - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn union_uses_per_tier_thresholds() {
        let mut p = two_tier([1, 1]);
        p.tiers[0].threshold = 10.0;
        p.tiers[1].threshold = 2.0;
        // Tier 0 station with SINR 3 and no tier 1 station above 2.
        let sinrs = [(0, 3.0), (1, 0.2)];
        assert!(!is_covered(&p, &sinrs));
        assert!(sinrs.iter().map(|s| s.1).fold(0.0, f64::max) > 2.0);
        assert!(is_covered(&p, &[(0, 3.0), (1, 2.5)]));
        assert!(is_covered(&p, &[(0, 11.0)]));
    }

    #[test]
    fn impossible_threshold_never_covers() {
        let mut p = two_tier([1, 1]);
        p.tiers[0].threshold = 1e12;
        p.tiers[1].threshold = 1e12;
        let sim = SimConfig::new(&p, 50, 20, 5);
        let e = mc_coverage(&p, &sim).unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(matches!(mc_conditional_rate(&p, &sim), Err(Error::NoCoveredTrials)));
    }

    #[test]
    fn variants_match_individual_runs() {
        let p = two_tier([2, 1]);
        let sim = SimConfig::new(&p, 40, 20, 77);
        let mut q = p.clone();
        q.tiers[0].threshold = 6.0;
        q.noise = 0.3;
        let joint = simulate(&p, &sim, &[Variant::of(&p), Variant::of(&q)]).unwrap();
        assert_eq!(joint[0].coverage, mc_coverage(&p, &sim).unwrap());
        assert_eq!(joint[1].coverage, mc_coverage(&q, &sim).unwrap());
        assert_eq!(joint[1].rate.unwrap(), mc_conditional_rate(&q, &sim).unwrap().rate);
    }

    #[test]
    fn bad_inputs_rejected() {
        let p = two_tier([1, 1]);
        let mut sim = SimConfig::new(&p, 1, 0, 5);
        sim.region_radius = -1.0;
        let Err(Error::Invalid(v)) = mc_coverage(&p, &sim) else {
            panic!("expected validation failure")
        };
        assert_eq!(v.len(), 3);
        let sim = SimConfig::new(&p, 10, 10, 5);
        let bad = Variant {
            thresholds: vec![2.0],
            noise: 1.0,
        };
        assert!(simulate(&p, &sim, &[bad]).is_err());
    }
}
