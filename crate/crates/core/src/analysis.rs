//! Coverage probability, conditional SINR tail and average rate.
//!
//! For thresholds above 0 dB at most one base station can exceed its tier's
//! threshold, so coverage is a sum of per-tier terms
//! `π λ_i P_i^(2/α) β_i^(-2/α) ℐ_i`. The rate is the integral of the
//! conditional tail `P(SINR > y | covered)` against `1/(1+y)`, which the
//! per-tier constants `𝒜_i` evaluate in closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, Kernel, NetworkParams};
use crate::pla;
use crate::quad::{self, QuadOptions};
use crate::specfun::gamma;

/// Slack allowed outside `[0, 1]` before a coverage value is treated as a
/// formula failure rather than rounding.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    RayleighClosedForm,
    QuadratureReference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub value: f64,
    pub method: Method,
}

/// Average rate in nats per channel use, conditioned on coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub value: f64,
    pub method: Method,
}

fn clamp_probability(value: f64, method: Method) -> Result<CoverageResult> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        return Err(Error::ProbabilityOutOfRange { value });
    }
    Ok(CoverageResult {
        value: value.clamp(0.0, 1.0),
        method,
    })
}

fn require_rayleigh(params: &NetworkParams, operation: &'static str) -> Result<()> {
    match params.tiers.iter().enumerate().find(|(_, t)| t.nakagami_m != 1) {
        Some((tier, t)) => Err(Error::NotRayleigh {
            operation,
            tier,
            m: t.nakagami_m,
        }),
        None => Ok(()),
    }
}

/// `λ_i P_i^(2/α) t^(-2/α)` for threshold `t`.
fn tier_weight(params: &NetworkParams, i: usize, threshold: f64) -> f64 {
    params.tier_mass(i) * threshold.powf(-params.delta())
}

fn coverage_from(params: &NetworkParams, script_i: &[f64]) -> f64 {
    script_i
        .iter()
        .enumerate()
        .map(|(i, s)| PI * tier_weight(params, i, params.tiers[i].threshold) * s)
        .sum()
}

/// Closed-form coverage probability with the piecewise-linear kernels.
pub fn coverage_probability(params: &NetworkParams) -> Result<CoverageResult> {
    let d = DerivedConstants::compute(params)?;
    clamp_probability(coverage_from(params, &d.script_i), Method::ClosedForm)
}

/// Coverage when every tier sees Rayleigh fading, written with the
/// incomplete gammas expanded into exponentials:
///
/// ```text
/// Σ_i π λ_i P_i^δ β_i^-δ / V · [ (1 - e^{-w x1}) + c (e^{-w x1} - e^{-w x2})
///                                + m { e^{-w x1}(x1 + 1/w) - e^{-w x2}(x2 + 1/w) } ]
/// ```
/// with `V = (2π/α) Γ(δ) Γ(1-δ) Σ λ_m P_m^δ`, `U = σ²` and `w = V / U^δ`.
pub fn coverage_rayleigh(params: &NetworkParams) -> Result<CoverageResult> {
    params.ensure_valid()?;
    require_rayleigh(params, "coverage_rayleigh")?;
    let delta = params.delta();
    let total_mass: f64 = (0..params.num_tiers()).map(|i| params.tier_mass(i)).sum();
    let v = 2.0 * PI / params.alpha * gamma(delta) * gamma(1.0 - delta) * total_mass;
    let pla = pla::pla_coefficients(params.alpha)?;
    let w = v / params.noise.powf(delta);
    let e1 = (-w * pla.x1).exp();
    let e2 = (-w * pla.x2).exp();
    let bracket =
        -(-w * pla.x1).exp_m1() + pla.c * (e1 - e2) + pla.m * (e1 * (pla.x1 + 1.0 / w) - e2 * (pla.x2 + 1.0 / w));
    let pc: f64 = (0..params.num_tiers())
        .map(|i| PI * tier_weight(params, i, params.tiers[i].threshold) / v * bracket)
        .sum();
    clamp_probability(pc, Method::RayleighClosedForm)
}

/// Coverage from the same per-tier sums, but with every `t`-integral
/// evaluated by adaptive quadrature instead of the piecewise-linear closed
/// form. This is the reference the closed form is measured against.
pub fn coverage_reference(params: &NetworkParams) -> Result<CoverageResult> {
    let d = DerivedConstants::compute_with(params, Kernel::Exact)?;
    clamp_probability(coverage_from(params, &d.script_i), Method::QuadratureReference)
}

fn ccdf_from(params: &NetworkParams, script_i: &[f64], y: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, s) in script_i.iter().enumerate() {
        let beta = params.tiers[i].threshold;
        num += tier_weight(params, i, beta.max(y)) * s;
        den += tier_weight(params, i, beta) * s;
    }
    if y <= params.tiers.iter().map(|t| t.threshold).fold(f64::INFINITY, f64::min) {
        return 1.0;
    }
    num / den
}

/// `P(max SINR > y | covered)`: the ratio of coverage at thresholds
/// `max(y, β_i)` to coverage at `β_i`.
pub fn conditional_ccdf(params: &NetworkParams, y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::domain(
            "conditional_ccdf",
            format!("y must be non-negative, got {y}"),
        ));
    }
    let d = DerivedConstants::compute(params)?;
    Ok(ccdf_from(params, &d.script_i, y))
}

fn rate_from(params: &NetworkParams, d: &DerivedConstants) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..params.num_tiers() {
        let w = tier_weight(params, i, params.tiers[i].threshold) * d.script_i[i];
        num += w * d.rate_constants[i];
        den += w;
    }
    num / den
}

/// Closed-form average rate: the `ℐ_i`-weighted mean of the `𝒜_i`.
pub fn average_rate(params: &NetworkParams) -> Result<RateResult> {
    let d = DerivedConstants::compute(params)?;
    Ok(RateResult {
        value: rate_from(params, &d),
        method: Method::ClosedForm,
    })
}

/// Rayleigh special case of [`average_rate`]. The kernels are equal across
/// tiers and cancel, so the result does not depend on the noise power.
pub fn rate_rayleigh(params: &NetworkParams) -> Result<RateResult> {
    params.ensure_valid()?;
    require_rayleigh(params, "rate_rayleigh")?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, t) in params.tiers.iter().enumerate() {
        let w = tier_weight(params, i, t.threshold);
        num += w * crate::model::rate_constant_for(params.alpha, t.threshold)?;
        den += w;
    }
    Ok(RateResult {
        value: num / den,
        method: Method::RayleighClosedForm,
    })
}

/// Average rate by direct quadrature of `∫₀^∞ P(X > y | covered) / (1 + y) dy`
/// using the closed-form conditional tail.
pub fn rate_reference(params: &NetworkParams) -> Result<RateResult> {
    let d = DerivedConstants::compute(params)?;
    let integrand = |y: f64| ccdf_from(params, &d.script_i, y) / (1.0 + y);

    let mut knots: Vec<f64> = params.tiers.iter().map(|t| t.threshold).collect();
    knots.push(0.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let head = quad::integrate_with_breaks(integrand, &knots, QuadOptions::with_rel_tol(1e-12))?;

    // Tail beyond the largest threshold, mapped onto (0, 1] by y = b / u.
    let b = knots[knots.len() - 1];
    let tail = quad::tanh_sinh(|u: f64| integrand(b / u) * b / (u * u), 0.0, 1.0, 1e-11)?;

    Ok(RateResult {
        value: head.value + tail.value,
        method: Method::QuadratureReference,
    })
}
