//! Coverage probability and average rate for the downlink of a K-tier
//! Poisson heterogeneous network with Nakagami-m fading and noise.
//!
//! The closed forms approximate `exp(-x^(α/2))` by a piecewise-linear
//! surrogate, which turns every radial integral into incomplete gamma
//! functions. Two oracles check them: quadrature of the same sums with the
//! exact integrals ([`analysis::coverage_reference`]) and a seeded Monte
//! Carlo simulation of the network ([`mcsim`]).

pub mod analysis;
pub mod error;
pub mod mcsim;
pub mod model;
pub mod pla;
pub mod quad;
pub mod specfun;

pub use analysis::{
    average_rate, conditional_ccdf, coverage_probability, coverage_rayleigh, coverage_reference, rate_rayleigh,
    rate_reference, CoverageResult, Method, RateResult,
};
pub use error::{Error, Result, Violation, Violations};
pub use mcsim::{
    mc_conditional_rate, mc_coverage, Estimate, RateEstimate, Realization, SimConfig, Variant, VariantEstimate,
};
pub use model::{
    interference_constant, rate_constant, tier_script_i, DerivedConstants, Kernel, NetworkParams, TierParams,
};
pub use pla::{approx_gamma_kernel_integral, exact_gamma_kernel_integral, pla_coefficients, PlaCoefficients};
