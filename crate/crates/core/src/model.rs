//! Network configuration and the constants the closed forms are built from.

use std::f64::consts::PI;

use crate::error::{Error, Result, Violation, Violations};
use crate::pla::{self, PlaCoefficients};
use crate::specfun::{self, BellTable};

/// Largest Nakagami shape accepted. The tier kernel is an alternating sum
/// with O(M³) terms; beyond this double precision is not trustworthy.
pub const MAX_NAKAGAMI_M: u32 = 16;

/// Ratio of the largest term to the kernel value above which a loss of
/// significance warning is emitted.
pub const CANCELLATION_WARN_RATIO: f64 = 1e6;

/// One class of base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    /// Base stations per unit area.
    pub density: f64,
    /// Transmit power, linear.
    pub power: f64,
    /// SINR threshold, linear. Must exceed 1.
    pub threshold: f64,
    /// Nakagami shape `M`; fading power is Gamma(M, 1).
    pub nakagami_m: u32,
}

impl TierParams {
    pub fn new(density: f64, power: f64, threshold: f64, nakagami_m: u32) -> Self {
        Self {
            density,
            power,
            threshold,
            nakagami_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Path-loss exponent, shared by all tiers.
    pub alpha: f64,
    /// Noise power, linear.
    pub noise: f64,
    pub tiers: Vec<TierParams>,
}

impl NetworkParams {
    pub fn new(alpha: f64, noise: f64, tiers: Vec<TierParams>) -> Self {
        Self { alpha, noise, tiers }
    }

    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    /// `2/α`.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    pub fn is_rayleigh(&self) -> bool {
        self.tiers.iter().all(|t| t.nakagami_m == 1)
    }

    /// `λ_i P_i^(2/α)`, the weight a tier carries in interference and
    /// association.
    pub fn tier_mass(&self, index: usize) -> f64 {
        let t = &self.tiers[index];
        t.density * t.power.powf(self.delta())
    }

    /// Checks every standing assumption and reports all violations.
    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Vec::new();
        if !self.alpha.is_finite() || self.alpha <= 2.0 {
            v.push(Violation::new(
                "alpha",
                format!("alpha must exceed 2 (got {})", self.alpha),
            ));
        }
        if !self.noise.is_finite() || self.noise <= 0.0 {
            v.push(Violation::new(
                "noise",
                format!("noise power must be positive (got {})", self.noise),
            ));
        }
        if self.tiers.is_empty() {
            v.push(Violation::new("tiers", "at least one tier is required"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            if !t.density.is_finite() || t.density <= 0.0 {
                v.push(Violation::new(
                    format!("tiers[{i}].density"),
                    format!("density must be positive (got {})", t.density),
                ));
            }
            if !t.power.is_finite() || t.power <= 0.0 {
                v.push(Violation::new(
                    format!("tiers[{i}].power"),
                    format!("power must be positive (got {})", t.power),
                ));
            }
            if !t.threshold.is_finite() || t.threshold <= 1.0 {
                v.push(Violation::new(
                    format!("tiers[{i}].threshold"),
                    format!(
                        "SINR threshold must exceed 1 (0 dB) so that at most one base station can cover the user (got {})",
                        t.threshold
                    ),
                ));
            }
            if t.nakagami_m == 0 || t.nakagami_m > MAX_NAKAGAMI_M {
                v.push(Violation::new(
                    format!("tiers[{i}].nakagami_m"),
                    format!("Nakagami shape must be in 1..={MAX_NAKAGAMI_M} (got {})", t.nakagami_m),
                ));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Violations(v))
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        self.validate().map_err(Error::Invalid)
    }

    pub(crate) fn check_tier(&self, index: usize) -> Result<()> {
        if index < self.tiers.len() {
            Ok(())
        } else {
            Err(Error::TierIndex {
                index,
                tiers: self.tiers.len(),
            })
        }
    }
}

/// Laplace-transform constant `A` of the aggregate interference:
///
/// ```text
/// A = Σ_m λ_m P_m^(2/α) Σ_{p=1}^{M_m} C(M_m, p) (2π/α) B(M_m - p + 2/α, p - 2/α)
/// ```
pub fn interference_constant(params: &NetworkParams) -> Result<f64> {
    params.ensure_valid()?;
    let delta = params.delta();
    let mut total = 0.0;
    for (i, t) in params.tiers.iter().enumerate() {
        let m = t.nakagami_m;
        let mut inner = 0.0;
        for p in 1..=m {
            inner += specfun::binomial(m, p) * specfun::beta_function(m as f64 - p as f64 + delta, p as f64 - delta)?;
        }
        total += params.tier_mass(i) * PI * delta * inner;
    }
    Ok(total)
}

/// Which evaluation of the inner `t`-integral a tier kernel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// Piecewise-linear closed form.
    Pla,
    /// Adaptive quadrature of the exact integral.
    Exact,
}

/// A tier kernel value together with its largest summand magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierKernel {
    pub value: f64,
    pub largest_term: f64,
}

impl TierKernel {
    /// How many times larger the biggest alternating term is than the sum.
    pub fn cancellation_ratio(&self) -> f64 {
        self.largest_term / self.value.abs()
    }
}

/// Shared inputs for evaluating several tier kernels of the same network.
pub(crate) struct KernelContext {
    alpha: f64,
    noise: f64,
    a: f64,
    pla: PlaCoefficients,
    bell: BellTable,
}

impl KernelContext {
    pub(crate) fn new(params: &NetworkParams, a: f64) -> Result<Self> {
        let max_l = params.tiers.iter().map(|t| t.nakagami_m - 1).max().unwrap_or(0);
        let d = specfun::d_values(params.alpha, max_l.max(1))?;
        Ok(Self {
            alpha: params.alpha,
            noise: params.noise,
            a,
            pla: pla::pla_coefficients(params.alpha)?,
            bell: BellTable::new(&d, max_l),
        })
    }

    /// ```text
    /// Σ_{k<M} 1/k! Σ_{l≤k} C(k,l) (σ²)^(k-l) (-1)^l Σ_{r≤l} (-A)^r B_{l,r}(D_1..D_{l-r+1}) J(σ², A, r + α(k-l)/2)
    /// ```
    pub(crate) fn evaluate(&self, nakagami_m: u32, kernel: Kernel) -> Result<TierKernel> {
        let mut value = 0.0;
        let mut largest: f64 = 0.0;
        for k in 0..nakagami_m {
            let inv_k_fact = 1.0 / specfun::factorial(k);
            for l in 0..=k {
                let outer = inv_k_fact
                    * specfun::binomial(k, l)
                    * self.noise.powi((k - l) as i32)
                    * if l % 2 == 0 { 1.0 } else { -1.0 };
                for r in 0..=l {
                    let power = r as f64 + 0.5 * self.alpha * (k - l) as f64;
                    let j = match kernel {
                        Kernel::Pla => pla::approx_kernel_with(&self.pla, self.noise, self.a, power)?,
                        Kernel::Exact => pla::exact_gamma_kernel_integral(self.noise, self.a, power, self.alpha)?,
                    };
                    let term = outer * (-self.a).powi(r as i32) * self.bell.get(l, r) * j;
                    largest = largest.max(term.abs());
                    value += term;
                }
            }
        }
        let out = TierKernel {
            value,
            largest_term: largest,
        };
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveKernel { m: nakagami_m, value });
        }
        if out.cancellation_ratio() > CANCELLATION_WARN_RATIO {
            log::warn!(
                "tier kernel for M = {nakagami_m}: largest term is {:.2e} times the result; expect loss of significance",
                out.cancellation_ratio()
            );
        }
        Ok(out)
    }
}

/// Per-tier coverage kernel `ℐ_i`, built by substituting the piecewise-linear
/// kernel into the polar-reduced coverage sum. Depends on the tier only
/// through its Nakagami shape.
pub fn tier_script_i(params: &NetworkParams, tier_index: usize) -> Result<f64> {
    tier_kernel(params, tier_index, Kernel::Pla).map(|k| k.value)
}

/// [`tier_script_i`] with a choice of inner-integral evaluation and the
/// cancellation diagnostics.
pub fn tier_kernel(params: &NetworkParams, tier_index: usize, kernel: Kernel) -> Result<TierKernel> {
    params.ensure_valid()?;
    params.check_tier(tier_index)?;
    let a = interference_constant(params)?;
    KernelContext::new(params, a)?.evaluate(params.tiers[tier_index].nakagami_m, kernel)
}

/// Per-tier rate constant `𝒜_i = ln(1+β_i) + (α/2) ₂F₁(1, 2/α; 1+2/α; -1/β_i)`,
/// in nats.
pub fn rate_constant(params: &NetworkParams, tier_index: usize) -> Result<f64> {
    params.ensure_valid()?;
    params.check_tier(tier_index)?;
    rate_constant_for(params.alpha, params.tiers[tier_index].threshold)
}

pub(crate) fn rate_constant_for(alpha: f64, threshold: f64) -> Result<f64> {
    Ok(threshold.ln_1p() + 0.5 * alpha * specfun::hyp2f1_rate(alpha, threshold)?)
}

/// Everything the closed-form coverage and rate need, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants {
    pub a_constant: f64,
    /// `ℐ_i` per tier.
    pub script_i: Vec<f64>,
    /// `𝒜_i` per tier.
    pub rate_constants: Vec<f64>,
    /// `D_1 … D_{max M - 1}` (at least `D_1`).
    pub d_values: Vec<f64>,
}

impl DerivedConstants {
    pub fn compute(params: &NetworkParams) -> Result<Self> {
        Self::compute_with(params, Kernel::Pla)
    }

    pub fn compute_with(params: &NetworkParams, kernel: Kernel) -> Result<Self> {
        params.ensure_valid()?;
        let a = interference_constant(params)?;
        let ctx = KernelContext::new(params, a)?;
        // Tiers sharing a shape share a kernel value.
        let mut cache: Vec<(u32, f64)> = Vec::new();
        let mut script_i = Vec::with_capacity(params.tiers.len());
        for t in &params.tiers {
            let v = match cache.iter().find(|(m, _)| *m == t.nakagami_m) {
                Some(&(_, v)) => v,
                None => {
                    let v = ctx.evaluate(t.nakagami_m, kernel)?.value;
                    cache.push((t.nakagami_m, v));
                    v
                }
            };
            script_i.push(v);
        }
        let rate_constants = params
            .tiers
            .iter()
            .map(|t| rate_constant_for(params.alpha, t.threshold))
            .collect::<Result<Vec<_>>>()?;
        let max_m = params.tiers.iter().map(|t| t.nakagami_m).max().unwrap_or(1);
        Ok(Self {
            a_constant: a,
            script_i,
            rate_constants,
            d_values: specfun::d_values(params.alpha, (max_m - 1).max(1))?,
        })
    }
}
