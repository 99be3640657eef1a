//! Fixtures shared by the benchmarks.

use hetnet_core::{NetworkParams, TierParams};

/// Two-tier figure network: α = 3, P₁ = 25 P₂, λ₂ = 5 λ₁, β₂ = 1 dB.
pub fn figure_network(m: [u32; 2], beta1: f64, noise: f64) -> NetworkParams {
    NetworkParams::new(
        3.0,
        noise,
        vec![
            TierParams::new(1.0, 25.0, beta1, m[0]),
            TierParams::new(5.0, 1.0, 1.2589, m[1]),
        ],
    )
}
