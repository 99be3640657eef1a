use std::f64::consts::PI;

use hetnet_core::mcsim::{sample_geometry, simulate, snapshot_sinrs};
use hetnet_core::{
    average_rate, coverage_probability, mc_conditional_rate, mc_coverage, NetworkParams, Realization, SimConfig,
    TierParams, Variant,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fig_config(m: [u32; 2], beta1: f64) -> NetworkParams {
    NetworkParams::new(
        3.0,
        1e-4,
        vec![
            TierParams::new(1.0, 25.0, beta1, m[0]),
            TierParams::new(5.0, 1.0, 1.2589, m[1]),
        ],
    )
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn station_counts_are_poisson() {
    let p = NetworkParams::new(3.0, 1e-3, vec![TierParams::new(1.0, 1.0, 2.0, 1)]);
    let radius = (100.0 / PI).sqrt();
    let sim = SimConfig::new(&p, 10_000, 1, 17).with_radius(radius);
    let counts: Vec<f64> = (0..10_000)
        .map(|g| sample_geometry(&p, &sim, g).num_stations() as f64)
        .collect();
    let (mean, var) = mean_and_variance(&counts);
    assert!((mean - 100.0).abs() < 3.0 * (100.0f64 / 10_000.0).sqrt(), "mean {mean}");
    let ratio = var / mean;
    assert!((0.95..=1.05).contains(&ratio), "variance/mean {ratio}");
}

#[test]
fn counts_follow_each_tier_density() {
    let p = fig_config([1, 1], 2.0);
    let sim = SimConfig::new(&p, 2000, 1, 3).with_radius(3.0);
    let mut totals = [0.0; 2];
    for g in 0..2000 {
        let real = sample_geometry(&p, &sim, g);
        for (t, d) in totals.iter_mut().zip(&real.tiers) {
            *t += d.len() as f64;
        }
    }
    for (i, total) in totals.iter().enumerate() {
        let expected = p.tiers[i].density * PI * 9.0;
        let mean = total / 2000.0;
        assert!(
            (mean - expected).abs() < 4.0 * (expected / 2000.0).sqrt(),
            "tier {i}: {mean} vs {expected}"
        );
    }
}

#[test]
fn distances_are_uniform_in_the_disk() {
    let p = NetworkParams::new(3.0, 1e-3, vec![TierParams::new(2.0, 1.0, 2.0, 1)]);
    let radius = 5.0;
    let sim = SimConfig::new(&p, 2, 1, 23).with_radius(radius);
    let mut inner = 0usize;
    let mut total = 0usize;
    let mut bins = [0usize; 10];
    for g in 0..500 {
        for &d in &sample_geometry(&p, &sim, g).tiers[0] {
            assert!(d > 0.0 && d <= radius);
            total += 1;
            if d <= radius / 2.0 {
                inner += 1;
            }
            // equal-area annuli
            bins[((d / radius).powi(2) * 10.0).min(9.0) as usize] += 1;
        }
    }
    let frac = inner as f64 / total as f64;
    let se = (0.25 * 0.75 / total as f64).sqrt();
    assert!((frac - 0.25).abs() < 4.0 * se, "fraction inside R/2: {frac}");

    let expected = total as f64 / 10.0;
    let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
    // 9 degrees of freedom, 99.9th percentile
    assert!(chi2 < 27.88, "chi2 {chi2}");
}

#[test]
fn sinr_denominators_match_brute_force() {
    let p = NetworkParams::new(
        3.5,
        0.02,
        vec![TierParams::new(1.0, 10.0, 2.0, 1), TierParams::new(3.0, 1.0, 1.5, 2)],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let n0 = rng.random_range(0..=3usize);
        let n1 = 5 - n0;
        let real = Realization {
            tiers: vec![
                (0..n0).map(|_| rng.random_range(0.1..4.0)).collect(),
                (0..n1).map(|_| rng.random_range(0.1..4.0)).collect(),
            ],
            background: rng.random_range(0.0..0.1),
        };
        let fading: Vec<Vec<f64>> = real
            .tiers
            .iter()
            .map(|d| d.iter().map(|_| rng.random_range(0.01..3.0)).collect())
            .collect();
        let sinrs = snapshot_sinrs(&p, &real, &fading);
        assert_eq!(sinrs.len(), 5);

        let mut stations = Vec::new();
        for (i, (d, h)) in real.tiers.iter().zip(&fading).enumerate() {
            for (&d, &h) in d.iter().zip(h) {
                stations.push((i, p.tiers[i].power * h * d.powf(-p.alpha)));
            }
        }
        for (b, &(tier, sinr)) in sinrs.iter().enumerate() {
            let mut interference = real.background;
            for (j, &(_, s)) in stations.iter().enumerate() {
                if j != b {
                    interference += s;
                }
            }
            let expected = stations[b].1 / (interference + p.noise);
            assert_eq!(tier, stations[b].0);
            assert!(((sinr - expected) / expected).abs() < 1e-13);
        }
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let p = fig_config([2, 3], 3.16);
    let sim = SimConfig::new(&p, 300, 20, 42);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_conditional_rate(&p, &sim).unwrap())
    };
    let one = run(1);
    for threads in [2, 5] {
        let other = run(threads);
        assert_eq!(one.coverage.mean.to_bits(), other.coverage.mean.to_bits());
        assert_eq!(one.coverage.std_error.to_bits(), other.coverage.std_error.to_bits());
        assert_eq!(one.rate.mean.to_bits(), other.rate.mean.to_bits());
        assert_eq!(one.rate.std_error.to_bits(), other.rate.std_error.to_bits());
    }
}

#[test]
fn doubling_the_radius_barely_moves_coverage() {
    for m in [[1, 1], [2, 3]] {
        let p = fig_config(m, 3.16);
        let sim = SimConfig::new(&p, 2000, 20, 8);
        let base = mc_coverage(&p, &sim).unwrap();
        let wide = mc_coverage(&p, &sim.clone().with_radius(2.0 * sim.region_radius)).unwrap();
        assert!(
            (wide.mean - base.mean).abs() < 1e-3,
            "m={m:?}: {} vs {}",
            base.mean,
            wide.mean
        );
    }
}

#[test]
fn coverage_agrees_with_closed_form() {
    for m in [[1, 1], [2, 3]] {
        let p = fig_config(m, 3.16);
        let est = mc_coverage(&p, &SimConfig::new(&p, 3000, 40, 5)).unwrap();
        let closed = coverage_probability(&p).unwrap().value;
        assert!(
            est.contains(closed, 3.0),
            "m={m:?}: closed {closed}, mc {} ± {}",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn rate_agrees_with_closed_form() {
    let p = fig_config([1, 1], 3.16);
    let est = mc_conditional_rate(&p, &SimConfig::new(&p, 3000, 40, 6)).unwrap();
    let closed = average_rate(&p).unwrap().value;
    assert!(
        est.rate.contains(closed, 3.0),
        "closed {closed}, mc {} ± {}",
        est.rate.mean,
        est.rate.std_error
    );
}

#[test]
fn higher_threshold_raises_conditional_rate() {
    let p = fig_config([1, 1], 2.0);
    let sim = SimConfig::new(&p, 1000, 20, 12);
    let variants = [
        Variant::of(&p),
        Variant {
            thresholds: vec![10.0, 1.2589],
            noise: p.noise,
        },
    ];
    let out = simulate(&p, &sim, &variants).unwrap();
    let low = out[0].rate.unwrap();
    let high = out[1].rate.unwrap();
    assert!(high.mean > low.mean + 3.0 * high.std_error.max(low.std_error));
    assert!(out[1].coverage.mean < out[0].coverage.mean);
}
