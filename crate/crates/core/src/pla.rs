//! Piecewise-linear surrogate for `exp(-x^(α/2))` and the closed-form
//! approximation it yields for the kernel integral
//!
//! ```text
//! J(U, V, p) = ∫₀^∞ exp(-V t - U t^(α/2)) t^p dt.
//! ```
//!
//! The surrogate is 1 up to `x1`, the tangent line at the inflection point
//! `x0` between `x1` and `x2`, and 0 beyond `x2`. Substituting it after the
//! change of variable `t = y / U^(2/α)` leaves three incomplete gamma
//! functions.
//!
//! The kernel exponent is taken as a real `p >= 0` (`t^p`) rather than the
//! half-integer `n/2`, because the coverage sums produce `r + α(k-l)/2`.

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::specfun::lower_incomplete_gamma;

/// Largest `x` for which `exp(-x)` is still a normal double.
const UNDERFLOW_EXPONENT: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaCoefficients {
    pub alpha: f64,
    /// Slope of the tangent at the inflection point (negative).
    pub m: f64,
    /// Intercept of the tangent line.
    pub c: f64,
    /// Inflection point of `exp(-x^(α/2))`.
    pub x0: f64,
    /// Left knot, where the tangent reaches 1.
    pub x1: f64,
    /// Right knot, where the tangent reaches 0.
    pub x2: f64,
}

fn check_alpha(function: &'static str, alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("alpha must exceed 2, got {alpha}")))
    }
}

/// Knots and tangent line of the piecewise-linear surrogate.
pub fn pla_coefficients(alpha: f64) -> Result<PlaCoefficients> {
    check_alpha("pla_coefficients", alpha)?;
    let delta = 2.0 / alpha;
    let gap = 1.0 - delta;
    let x0 = gap.powf(delta);
    let m = -0.5 * alpha * gap.powf(gap) * (-gap).exp();
    let c = 0.5 * alpha * (-gap).exp();
    Ok(PlaCoefficients {
        alpha,
        m,
        c,
        x0,
        x1: (1.0 - c) / m,
        x2: -c / m,
    })
}

impl PlaCoefficients {
    /// Value of the surrogate at `x >= 0`.
    pub fn surrogate(&self, x: f64) -> f64 {
        if x <= self.x1 {
            1.0
        } else if x < self.x2 {
            self.m * x + self.c
        } else {
            0.0
        }
    }

    /// The function being approximated, `exp(-x^(α/2))`.
    pub fn target(&self, x: f64) -> f64 {
        (-x.powf(0.5 * self.alpha)).exp()
    }
}

fn check_kernel_args(function: &'static str, u: f64, v: f64, power: f64, alpha: f64) -> Result<()> {
    check_alpha(function, alpha)?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(function, format!("U must be positive, got {u}")));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain(function, format!("V must be positive, got {v}")));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::domain(
            function,
            format!("exponent must be non-negative, got {power}"),
        ));
    }
    Ok(())
}

/// Closed-form approximation of `∫₀^∞ exp(-V t - U t^(α/2)) t^p dt`:
///
/// ```text
/// V^-(p+1) [ γ(p+1, w x1) + c {γ(p+1, w x2) - γ(p+1, w x1)}
///            + (m/w) {γ(p+2, w x2) - γ(p+2, w x1)} ],   w = V / U^(2/α).
/// ```
pub fn approx_gamma_kernel_integral(u: f64, v: f64, power: f64, alpha: f64) -> Result<f64> {
    check_kernel_args("approx_gamma_kernel_integral", u, v, power, alpha)?;
    let pla = pla_coefficients(alpha)?;
    approx_kernel_with(&pla, u, v, power)
}

pub(crate) fn approx_kernel_with(pla: &PlaCoefficients, u: f64, v: f64, power: f64) -> Result<f64> {
    let w = v / u.powf(2.0 / pla.alpha);
    let s1 = power + 1.0;
    let s2 = power + 2.0;
    let g1_lo = lower_incomplete_gamma(s1, w * pla.x1)?;
    let g1_hi = lower_incomplete_gamma(s1, w * pla.x2)?;
    let g2_lo = lower_incomplete_gamma(s2, w * pla.x1)?;
    let g2_hi = lower_incomplete_gamma(s2, w * pla.x2)?;
    let bracket = g1_lo + pla.c * (g1_hi - g1_lo) + pla.m / w * (g2_hi - g2_lo);
    Ok(v.powf(-s1) * bracket)
}

/// Point where `V t + U t^(α/2)` reaches `level`.
fn exponent_crossing(u: f64, v: f64, alpha: f64, level: f64) -> f64 {
    let g = |t: f64| v * t + u * t.powf(0.5 * alpha);
    // Each term alone reaching `level` brackets the root.
    let mut hi = (level / v).min((level / u).powf(2.0 / alpha));
    let mut lo = 0.0;
    if g(hi) < level {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Partition of `[0, t*]` used by the exact kernel, where `t*` is the
/// double-precision underflow point of the exponent. Interior break points
/// sit where the exponent crosses a few fixed levels and at the peak of
/// `t^p e^{-Vt}`, so adaptive refinement starts near the mass.
fn kernel_partition(u: f64, v: f64, power: f64, alpha: f64) -> Vec<f64> {
    let mut points = vec![0.0];
    for level in [0.25, 1.0, 4.0, 16.0, 64.0, 256.0, UNDERFLOW_EXPONENT] {
        points.push(exponent_crossing(u, v, alpha, level));
    }
    let end = points[points.len() - 1];
    let peak = power / v;
    if peak > 0.0 && peak < end {
        points.push(peak);
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()));
    points
}

fn kernel_integrand(u: f64, v: f64, power: f64, alpha: f64) -> impl Fn(f64) -> f64 {
    let half_alpha = 0.5 * alpha;
    move |t: f64| {
        if t <= 0.0 {
            return if power == 0.0 { 1.0 } else { 0.0 };
        }
        // Evaluated in log space so large powers cannot overflow.
        (power * t.ln() - v * t - u * t.powf(half_alpha)).exp()
    }
}

/// Reference value of the kernel integral by adaptive Gauss-Kronrod
/// quadrature, relative tolerance 1e-10. The range is truncated where the
/// exponent reaches 745, beyond which `exp` underflows.
pub fn exact_gamma_kernel_integral(u: f64, v: f64, power: f64, alpha: f64) -> Result<f64> {
    check_kernel_args("exact_gamma_kernel_integral", u, v, power, alpha)?;
    let points = kernel_partition(u, v, power, alpha);
    let r = quad::integrate_with_breaks(
        kernel_integrand(u, v, power, alpha),
        &points,
        QuadOptions::with_rel_tol(1e-10),
    )?;
    Ok(r.value)
}

/// The same reference integral by tanh-sinh quadrature on each piece of the
/// partition. Independent of the Gauss-Kronrod route; the two are compared
/// in tests.
pub fn exact_gamma_kernel_integral_tanh_sinh(u: f64, v: f64, power: f64, alpha: f64) -> Result<f64> {
    check_kernel_args("exact_gamma_kernel_integral_tanh_sinh", u, v, power, alpha)?;
    let points = kernel_partition(u, v, power, alpha);
    let f = kernel_integrand(u, v, power, alpha);
    let mut total = 0.0;
    for w in points.windows(2) {
        total += quad::tanh_sinh(&f, w[0], w[1], 1e-12)?.value;
    }
    Ok(total)
}
