//! Adaptive Gauss–Kronrod (10/21 point) quadrature for vector-valued complex
//! integrands on finite and semi-infinite intervals.
//!
//! Semi-infinite ranges are mapped onto `(0, 1]` with `x = a + (1 - s) / s`.
//! The 21-point Kronrod nodes never touch `s = 0`, so the mapped integrand is
//! never evaluated at the singular endpoint.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge on [{lo}, {hi}]: error estimate {error:e} exceeds \
         tolerance {tolerance:e} after {intervals} subintervals"
    )]
    NotConverged {
        lo: f64,
        hi: f64,
        error: f64,
        tolerance: f64,
        intervals: usize,
    },
    #[error("non-finite integrand value at x = {0}")]
    NonFinite(f64),
}

/// Integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    Finite(f64, f64),
    /// `[a, +inf)`
    Above(f64),
    /// `(-inf, b]`
    Below(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals kept by the adaptive bisection.
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub value: [Complex64; N],
    pub error: f64,
    pub evaluations: usize,
}

impl<const N: usize> QuadResult<N> {
    pub fn zero() -> Self {
        Self {
            value: [Complex64::new(0.0, 0.0); N],
            error: 0.0,
            evaluations: 0,
        }
    }

    /// Accumulates another partial result (e.g. a separate piece of a split range).
    pub fn absorb(&mut self, other: &QuadResult<N>) {
        for (a, b) in self.value.iter_mut().zip(other.value.iter()) {
            *a += *b;
        }
        self.error += other.error;
        self.evaluations += other.evaluations;
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_089_116_463,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes and weights of the 10-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_10() -> ([f64; 10], [f64; 10]) {
    let mut x = [0.0; 10];
    let mut w = [0.0; 10];
    for k in 0..5 {
        x[2 * k] = -XGK[2 * k + 1];
        x[2 * k + 1] = XGK[2 * k + 1];
        w[2 * k] = WG[k];
        w[2 * k + 1] = WG[k];
    }
    (x, w)
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    lo: f64,
    hi: f64,
    value: [Complex64; N],
    error: f64,
}

fn max_norm<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

fn gk21<const N: usize, F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment<N>, QuadratureError>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let zero = Complex64::new(0.0, 0.0);
    let mut kronrod = [zero; N];
    let mut gauss = [zero; N];

    let mut eval = |x: f64| -> Result<[Complex64; N], QuadratureError> {
        let v = f(x);
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuadratureError::NonFinite(x));
        }
        Ok(v)
    };

    let fc = eval(center)?;
    for i in 0..N {
        kronrod[i] = fc[i] * WGK[10];
    }
    for (j, (&x, &w)) in XGK[..10].iter().zip(WGK[..10].iter()).enumerate() {
        let dx = half * x;
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            kronrod[i] += s * w;
            if j % 2 == 1 {
                gauss[i] += s * WG[j / 2];
            }
        }
    }
    let mut diff = [zero; N];
    for i in 0..N {
        kronrod[i] *= half;
        gauss[i] *= half;
        diff[i] = kronrod[i] - gauss[i];
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod,
        error: max_norm(&diff),
    })
}

fn adaptive<const N: usize, F>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: &QuadratureOptions,
) -> Result<QuadResult<N>, QuadratureError>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let zero = Complex64::new(0.0, 0.0);
    if lo == hi {
        return Ok(QuadResult {
            value: [zero; N],
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![gk21(&mut f, lo, hi)?];
    let mut evaluations = 21;
    loop {
        let mut total = [zero; N];
        let mut error = 0.0;
        let mut worst = 0;
        for (k, s) in segments.iter().enumerate() {
            for i in 0..N {
                total[i] += s.value[i];
            }
            error += s.error;
            if s.error > segments[worst].error {
                worst = k;
            }
        }
        let tolerance = opts.abs_tol.max(opts.rel_tol * max_norm(&total));
        if error <= tolerance {
            return Ok(QuadResult {
                value: total,
                error,
                evaluations,
            });
        }
        let w = segments[worst];
        let mid = 0.5 * (w.lo + w.hi);
        if segments.len() >= opts.max_intervals || mid <= w.lo || mid >= w.hi {
            return Err(QuadratureError::NotConverged {
                lo,
                hi,
                error,
                tolerance,
                intervals: segments.len(),
            });
        }
        let left = gk21(&mut f, w.lo, mid)?;
        let right = gk21(&mut f, mid, w.hi)?;
        evaluations += 42;
        segments[worst] = left;
        segments.push(right);
    }
}

/// Integrates `f` over `range` to within `max(abs_tol, rel_tol * |I|)` in the
/// max-norm over components.
pub fn integrate<const N: usize, F>(
    mut f: F,
    range: Range,
    opts: &QuadratureOptions,
) -> Result<QuadResult<N>, QuadratureError>
where
    F: FnMut(f64) -> [Complex64; N],
{
    match range {
        Range::Finite(a, b) => adaptive(f, a, b, opts),
        Range::Above(a) => adaptive(
            |s: f64| {
                let jac = 1.0 / (s * s);
                let mut v = f(a + (1.0 - s) / s);
                v.iter_mut().for_each(|z| *z *= jac);
                v
            },
            0.0,
            1.0,
            opts,
        ),
        Range::Below(b) => adaptive(
            |s: f64| {
                let jac = 1.0 / (s * s);
                let mut v = f(b - (1.0 - s) / s);
                v.iter_mut().for_each(|z| *z *= jac);
                v
            },
            0.0,
            1.0,
            opts,
        ),
    }
}

/// Scalar real convenience wrapper.
pub fn integrate_real<F>(
    mut f: F,
    range: Range,
    opts: &QuadratureOptions,
) -> Result<(f64, f64), QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x| [Complex64::new(f(x), 0.0)], range, opts)?;
    Ok((r.value[0].re, r.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let opts = QuadratureOptions::default();
        let (v, _) = integrate_real(|x| x.powi(5) - 3.0 * x * x, Range::Finite(-1.0, 2.0), &opts)
            .unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn lorentzian_full_line() {
        let opts = QuadratureOptions::default();
        let lor = |x: f64| 1.0 / (PI * (1.0 + (x - 3.0).powi(2)));
        let (lo, _) = integrate_real(lor, Range::Below(3.0), &opts).unwrap();
        let (hi, _) = integrate_real(lor, Range::Above(3.0), &opts).unwrap();
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_sinc() {
        // int_0^inf sin(10x)/x dx = pi/2
        let opts = QuadratureOptions {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_intervals: 20000,
        };
        let (v, _) = integrate_real(
            |x| if x == 0.0 { 10.0 } else { (10.0 * x).sin() / x * (-x * 1e-3).exp() },
            Range::Finite(0.0, 40_000.0),
            &opts,
        )
        .unwrap();
        assert!((v - (1e4_f64).atan()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadratureOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate_real(|x| (1000.0 * x).sin(), Range::Finite(0.0, 10.0), &opts);
        assert!(matches!(err, Err(QuadratureError::NotConverged { .. })));
    }

    #[test]
    fn gauss_legendre_integrates_degree_19() {
        let (x, w) = gauss_legendre_10();
        let s: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }
}
