//! Numerical integration used by the reference (non-approximated) routes.
//!
//! Two independent schemes are provided so that oracles can be cross-checked
//! against each other: globally adaptive Gauss-Kronrod (7/15 point pair,
//! QUADPACK-style error rescaling) and double-exponential tanh-sinh.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let err = (res_kronrod - res_gauss) * half;
    Segment {
        a,
        b,
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * scale, res_asc * scale),
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Like [`integrate`], but starts from the partition given by `points`
/// (sorted, at least two entries). Useful where the integrand has kinks or
/// peaks at known locations.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::domain("integrate", "need at least two break points"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integrate", "break points must be finite"));
    }
    let lower = points[0];
    let upper = points[points.len() - 1];

    let mut segments: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error,
                evaluations,
            });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error,
                evaluations,
            });
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty partition");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval can no longer be split in double precision.
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error,
                evaluations,
            });
        }
        segments.push(kronrod15(&f, seg.a, mid));
        segments.push(kronrod15(&f, mid, seg.b));
        evaluations += 30;
    }
}

/// Adaptive Gauss-Kronrod over `[a, inf)` using the map `x = a + (1 - s) / s`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    let g = |s: f64| {
        let x = a + (1.0 - s) / s;
        f(x) / (s * s)
    };
    integrate(g, 0.0, 1.0, opts)
}

/// Tanh-sinh (double exponential) quadrature over the finite interval
/// `[a, b]`. Refines by halving the step until successive levels agree to
/// `rel_tol`. Endpoint singularities of algebraic type are handled well;
/// nodes that round onto an endpoint are skipped.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    const T_MAX: f64 = 4.0;
    const MAX_LEVEL: u32 = 12;

    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::domain("tanh_sinh", format!("invalid interval [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;

    // Contribution of the abscissa pair at +t and -t (or the centre at t = 0).
    let mut pair = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u) * half;
        if t == 0.0 {
            evaluations += 1;
            return w * f(a + half);
        }
        // Distance of the node from its nearest endpoint, computed without
        // cancellation.
        let d = (b - a) / (1.0 + (2.0 * u).exp());
        let mut s = 0.0;
        let left = a + d;
        let right = b - d;
        if left > a && left < b {
            s += f(left);
            evaluations += 1;
        }
        if right < b && right > a {
            s += f(right);
            evaluations += 1;
        }
        w * s
    };

    let mut h = 1.0;
    let mut sum = pair(0.0);
    let mut t = h;
    while t <= T_MAX {
        sum += pair(t);
        t += h;
    }
    let mut estimate = h * sum;
    let mut last_diff = f64::INFINITY;

    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += pair(t);
            t += 2.0 * h;
        }
        let next = h * sum;
        last_diff = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        if last_diff <= rel_tol * estimate.abs() {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: last_diff,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        lower: a,
        upper: b,
        estimate,
        error: last_diff,
        evaluations,
    })
}
