//! Coverage computed from the SINR model directly, without the per-tier
//! kernel expansion: the serving fading tail is integrated against the
//! interference Laplace transform, and the transform itself comes from a
//! radial quadrature of the PPP functional.

use std::f64::consts::PI;

use hetnet_core::quad::{self, QuadOptions};
use hetnet_core::{coverage_probability, coverage_reference, interference_constant, NetworkParams, TierParams};
use num_complex::Complex64;

fn fig_config(m: [u32; 2], beta1: f64, noise: f64) -> NetworkParams {
    NetworkParams::new(
        3.0,
        noise,
        vec![
            TierParams::new(1.0, 25.0, beta1, m[0]),
            TierParams::new(5.0, 1.0, 1.2589, m[1]),
        ],
    )
}

/// `2π ∫₀^∞ (1 - (1 + P r^-α)^-M) r dr`
fn radial_interference_mass(alpha: f64, power: f64, m: u32) -> f64 {
    let r = quad::integrate_to_infinity(
        |r: f64| {
            let x = power * r.powf(-alpha);
            -(-(m as f64) * x.ln_1p()).exp_m1() * r
        },
        0.0,
        QuadOptions::with_rel_tol(1e-12),
    )
    .unwrap();
    2.0 * PI * r.value
}

fn radial_constant(params: &NetworkParams) -> f64 {
    params
        .tiers
        .iter()
        .map(|t| t.density * radial_interference_mass(params.alpha, t.power, t.nakagami_m))
        .sum()
}

/// `E[exp(-s I)]` for real `s`, by the inner radial integral at that `s`.
fn laplace_interference(params: &NetworkParams, s: f64) -> f64 {
    let exponent: f64 = params
        .tiers
        .iter()
        .map(|t| {
            let inner = quad::integrate_to_infinity(
                |r: f64| r * s * t.power / (r.powf(params.alpha) + s * t.power),
                0.0,
                QuadOptions::with_rel_tol(1e-12),
            )
            .unwrap();
            t.density * 2.0 * PI * inner.value
        })
        .sum();
    (-exponent).exp()
}

fn outer_integral(f: impl Fn(f64) -> f64) -> f64 {
    quad::integrate_to_infinity(|rho: f64| rho * f(rho), 0.0, QuadOptions::with_rel_tol(1e-11))
        .unwrap()
        .value
}

/// Rayleigh interferers and serving links: a two-dimensional quadrature in
/// the serving distance and the interferer distance.
fn rayleigh_coverage_2d(params: &NetworkParams) -> f64 {
    assert!(params.is_rayleigh());
    params
        .tiers
        .iter()
        .map(|t| {
            2.0 * PI
                * t.density
                * outer_integral(|rho| {
                    let s = t.threshold * rho.powf(params.alpha) / t.power;
                    (-s * params.noise).exp() * laplace_interference(params, s)
                })
        })
        .sum()
}

/// `P(h > s Y)` for `h ~ Γ(M, 1)` and `Y = σ² + I` equals
/// `Σ_{k<M} (-s)^k L^(k)(s) / k!` with `L` the Laplace transform of `Y`.
/// The Taylor coefficients come from the trapezoid rule on a circle of
/// radius `s/8`, well inside the right half plane where `L` is analytic.
fn gamma_tail_expectation(noise: f64, a: f64, delta: f64, s: f64, m: u32) -> f64 {
    const N: usize = 64;
    let laplace = |z: Complex64| (-z * noise - a * z.powf(delta)).exp();
    let radius = 0.125 * s;
    let mut total = 0.0;
    for k in 0..m as i32 {
        let mut coeff = Complex64::new(0.0, 0.0);
        for n in 0..N {
            let theta = 2.0 * PI * n as f64 / N as f64;
            let w = Complex64::from_polar(radius, theta);
            coeff += laplace(s + w) * w.powi(-k);
        }
        coeff /= N as f64;
        total += (-s).powi(k) * coeff.re;
    }
    total
}

fn nakagami_coverage_contour(params: &NetworkParams) -> f64 {
    let a = radial_constant(params);
    let delta = params.delta();
    params
        .tiers
        .iter()
        .map(|t| {
            2.0 * PI
                * t.density
                * outer_integral(|rho| {
                    let s = t.threshold * rho.powf(params.alpha) / t.power;
                    gamma_tail_expectation(params.noise, a, delta, s, t.nakagami_m)
                })
        })
        .sum()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn interference_constant_matches_radial_quadrature() {
    for m in [[1, 1], [2, 3], [3, 3], [1, 6]] {
        for alpha in [2.5, 3.0, 4.0] {
            let mut p = fig_config(m, 3.16, 1e-4);
            p.alpha = alpha;
            let a = interference_constant(&p).unwrap();
            let oracle = radial_constant(&p);
            assert!(rel(a, oracle) < 1e-9, "m={m:?} alpha={alpha}: {a} vs {oracle}");
        }
    }
}

#[test]
fn contour_oracle_reduces_to_real_laplace_for_rayleigh() {
    let p = fig_config([1, 1], 2.0, 1e-2);
    let a = radial_constant(&p);
    for s in [1e-4, 1e-3, 0.01, 0.05, 0.3, 2.0, 15.0] {
        let direct = (-s * p.noise).exp() * laplace_interference(&p, s);
        let contour = gamma_tail_expectation(p.noise, a, p.delta(), s, 1);
        assert!(
            (contour - direct).abs() < 1e-10 * direct + 1e-15,
            "s = {s}: {contour} vs {direct}"
        );
    }
}

#[test]
fn rayleigh_reference_matches_two_dimensional_quadrature() {
    for (beta1, noise) in [(1.2589, 1e-4), (3.16, 1e-2), (10.0, 1e-3), (100.0, 0.5)] {
        let p = fig_config([1, 1], beta1, noise);
        let oracle = rayleigh_coverage_2d(&p);
        let reference = coverage_reference(&p).unwrap().value;
        assert!(
            rel(reference, oracle) < 1e-7,
            "beta1={beta1} noise={noise}: {reference} vs {oracle}"
        );
        let closed = coverage_probability(&p).unwrap().value;
        assert!(
            rel(closed, oracle) < 5e-3,
            "beta1={beta1} noise={noise}: {closed} vs {oracle}"
        );
    }
}

#[test]
fn nakagami_reference_matches_contour_oracle() {
    for (m, beta1, noise) in [
        ([2, 2], 10.0, 1e-4),
        ([2, 3], 3.16, 1e-3),
        ([3, 3], 1.5, 1e-2),
        ([1, 4], 20.0, 0.1),
        ([4, 1], 5.0, 1e-4),
    ] {
        let p = fig_config(m, beta1, noise);
        let oracle = nakagami_coverage_contour(&p);
        let reference = coverage_reference(&p).unwrap().value;
        assert!(
            rel(reference, oracle) < 1e-7,
            "m={m:?} beta1={beta1}: {reference} vs {oracle}"
        );
    }
}

#[test]
fn three_tier_reference_matches_contour_oracle() {
    let p = NetworkParams::new(
        4.0,
        1e-3,
        vec![
            TierParams::new(0.5, 40.0, 2.0, 2),
            TierParams::new(2.0, 4.0, 1.5, 1),
            TierParams::new(8.0, 1.0, 1.1, 3),
        ],
    );
    let oracle = nakagami_coverage_contour(&p);
    let reference = coverage_reference(&p).unwrap().value;
    assert!(rel(reference, oracle) < 1e-7, "{reference} vs {oracle}");
}
