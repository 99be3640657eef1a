//! Scalar special functions: incomplete gamma, Beta, the Gauss
//! hypergeometric case needed by the rate constant, and partial Bell
//! polynomials.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `Γ(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `n!` as a float. Exact for `n <= 18`, correctly rounded beyond.
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient by the multiplicative formula; exact for the small
/// arguments the coverage sums produce.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Lower incomplete gamma function `γ(s, x) = ∫₀ˣ t^(s-1) e^(-t) dt`.
///
/// Series expansion below `x = s + 1`, Lentz continued fraction for the
/// complement above it.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(
            "lower_incomplete_gamma",
            format!("shape must be positive, got {s}"),
        ));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "lower_incomplete_gamma",
            format!("x must be non-negative, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(gamma(s));
    }
    if x < s + 1.0 {
        Ok(gamma_series(s, x))
    } else {
        Ok((gamma(s) - upper_gamma_fraction(s, x)).max(0.0))
    }
}

fn gamma_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..10_000 {
        term *= x / (s + n as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    (s * x.ln() - x).exp() * sum
}

fn upper_gamma_fraction(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * x.ln() - x).exp() * h
}

/// Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` through log-gamma.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "beta_function",
            format!("arguments must be positive, got ({a}, {b})"),
        ));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

const SERIES_TOL: f64 = 1e-16;
const SERIES_CAP: usize = 100_000;

fn check_rate_args(function: &'static str, alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Error::domain(function, format!("alpha must exceed 2, got {alpha}")));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::domain(
            function,
            format!("threshold must be positive, got {beta}"),
        ));
    }
    Ok(())
}

/// `₂F₁(1, 2/α; 1 + 2/α; -1/β)`, the hypergeometric factor of the per-tier
/// rate constant. Lies in `(0, 1]`.
///
/// The argument `z = -1/β` is handled in three bands, each by a series whose
/// ratio is at most 2/3 in magnitude:
/// * `β >= 2`: the defining series in `z`;
/// * `1/2 <= β < 2`: Pfaff transformation to argument `1/(1+β)`;
/// * `β < 1/2`: reflection through `∫₀^∞ y^(-δ)/(1+y) dy = π/sin(πδ)`,
///   leaving a series in `-β`.
pub fn hyp2f1_rate(alpha: f64, beta: f64) -> Result<f64> {
    check_rate_args("hyp2f1_rate", alpha, beta)?;
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let delta = 2.0 / alpha;

    let value = if beta >= 2.0 {
        // Σ δ/(δ+n) zⁿ
        let z = -1.0 / beta;
        let mut power = 1.0;
        let mut sum = 0.0;
        for n in 0..SERIES_CAP {
            let term = delta / (delta + n as f64) * power;
            sum += term;
            if term.abs() < SERIES_TOL * sum.abs() {
                break;
            }
            power *= z;
        }
        sum
    } else if beta >= 0.5 {
        // (1-z)^(-δ) ₂F₁(δ, δ; 1+δ; z/(z-1))
        let zeta = 1.0 / (1.0 + beta);
        let mut coeff = 1.0;
        let mut sum = 1.0;
        for n in 0..SERIES_CAP {
            let nf = n as f64;
            coeff *= (delta + nf) * (delta + nf) / ((1.0 + delta + nf) * (nf + 1.0)) * zeta;
            sum += coeff;
            if coeff < SERIES_TOL * sum {
                break;
            }
        }
        (1.0 + 1.0 / beta).powf(-delta) * sum
    } else {
        let mut power = 1.0;
        let mut sum = 0.0;
        for n in 0..SERIES_CAP {
            let term = (1.0 - delta) / (1.0 - delta + n as f64) * power;
            sum += term;
            if term.abs() < SERIES_TOL * sum.abs() {
                break;
            }
            power *= -beta;
        }
        let head = beta.powf(1.0 - delta) / (1.0 - delta) * sum;
        delta * beta.powf(delta) * (PI / (PI * delta).sin() - head)
    };
    Ok(value)
}

/// Quadrature route to the same quantity as [`hyp2f1_rate`].
///
/// `₂F₁(1, δ; 1+δ; -1/β) = δ β^δ ∫_β^∞ y^(-δ)/(1+y) dy`; substituting
/// `y = β v^(-α/2)` turns the tail integral into `β ∫₀¹ dv / (β + v^(α/2))`,
/// which has a smooth integrand.
pub fn hyp2f1_rate_quadrature(alpha: f64, beta: f64) -> Result<f64> {
    check_rate_args("hyp2f1_rate_quadrature", alpha, beta)?;
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let half_alpha = 0.5 * alpha;
    let r = quad::integrate(
        |v: f64| 1.0 / (beta + v.powf(half_alpha)),
        0.0,
        1.0,
        QuadOptions::with_rel_tol(1e-13),
    )?;
    Ok(beta * r.value)
}

/// Falling product `D_t = Π_{q=0}^{t-1} (2/α - q)`, the `t`-th derivative
/// coefficient of `s^(2/α)`.
pub fn d_sequence(alpha: f64, t: u32) -> Result<f64> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Error::domain("d_sequence", format!("alpha must exceed 2, got {alpha}")));
    }
    if t == 0 {
        return Err(Error::domain("d_sequence", "t must be at least 1"));
    }
    let delta = 2.0 / alpha;
    Ok((0..t).map(|q| delta - q as f64).product())
}

/// `D_1, …, D_count`.
pub fn d_values(alpha: f64, count: u32) -> Result<Vec<f64>> {
    (1..=count).map(|t| d_sequence(alpha, t)).collect()
}

/// Arguments `x_1 … x_{l-r+1}` of a partial Bell polynomial `B_{l,r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellArguments(Vec<f64>);

impl BellArguments {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for BellArguments {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Partial (incomplete exponential) Bell polynomial `B_{l,r}(x_1, …, x_{l-r+1})`.
///
/// `args` must hold exactly `l - r + 1` values. `B_{0,0}` involves no
/// argument, so an empty slice is also accepted for it.
pub fn partial_bell(l: u32, r: u32, args: &BellArguments) -> Result<f64> {
    if r > l {
        return Err(Error::domain("partial_bell", format!("r = {r} exceeds l = {l}")));
    }
    let expected = (l - r + 1) as usize;
    let empty_ok = l == 0 && args.is_empty();
    if args.len() != expected && !empty_ok {
        return Err(Error::domain(
            "partial_bell",
            format!("B_({l},{r}) takes {expected} arguments, got {}", args.len()),
        ));
    }
    if l == 0 {
        return Ok(1.0);
    }
    let mut xs = args.values().to_vec();
    xs.resize(l as usize, 0.0);
    Ok(BellTable::new(&xs, l).get(l, r))
}

/// Triangle of partial Bell polynomials `B_{n,k}` for `n <= max_l`, all with
/// the same argument sequence. Built once by the recurrence
/// `B_{n,k} = Σ_{i=1}^{n-k+1} C(n-1, i-1) x_i B_{n-i,k-1}`.
#[derive(Debug, Clone)]
pub struct BellTable {
    rows: Vec<Vec<f64>>,
}

impl BellTable {
    /// `xs` must provide at least `max_l` values (only `x_1 … x_{max_l}` are
    /// ever touched).
    pub fn new(xs: &[f64], max_l: u32) -> Self {
        let max_l = max_l as usize;
        assert!(
            xs.len() >= max_l || max_l == 0,
            "need {max_l} Bell arguments, got {}",
            xs.len()
        );
        let mut rows = vec![vec![0.0; max_l + 1]; max_l + 1];
        rows[0][0] = 1.0;
        for n in 1..=max_l {
            for k in 1..=n {
                let mut acc = 0.0;
                for i in 1..=(n - k + 1) {
                    acc += binomial((n - 1) as u32, (i - 1) as u32) * xs[i - 1] * rows[n - i][k - 1];
                }
                rows[n][k] = acc;
            }
        }
        Self { rows }
    }

    pub fn max_l(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn get(&self, l: u32, r: u32) -> f64 {
        if r > l {
            return 0.0;
        }
        self.rows[l as usize][r as usize]
    }
}
