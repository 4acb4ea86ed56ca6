//! Bosonic bath: spectral densities, thermal occupation, the memory kernels
//! `Gamma_l(t)`, `Gamma'_l(t)` and the time-dependent decay rates.
//!
//! In the continuum limit the kernels of channel `l` (target frequency
//! `w_l = omega + l omega_s`) are
//!
//! ```text
//! Gamma_l(t)  = int dw J(w) n(w)     (e^{i(w - w_l)t} - 1) / (i(w - w_l))
//! Gamma'_l(t) = int dw J(w) (n(w)+1) (e^{i(w - w_l)t} - 1) / (i(w - w_l))
//! ```
//!
//! `Gamma'_l` is assembled as a vacuum part over the full support of `J` plus
//! the thermal part `Gamma_l`. The thermal part is integrated over a window
//! around the spectral weight (`[w0 - K lambda, inf)` for the Lorentzian),
//! which must stay away from `w = 0` where `n(w) J(w)` is not integrable for a
//! spectral density with `J(0) > 0`.
//!
//! Unbounded tails are not integrated along the real axis, where the factor
//! `e^{iwt}` oscillates without end. The kernel integrand is analytic in the
//! upper half-plane away from the poles of `J` (which lie over the core
//! window), so each tail is moved onto a vertical ray `a + iy`, `y >= 0`, along
//! which `e^{iwt}` decays like `e^{-yt}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::effective::{ChiralQubitParams, DressedCoefficients};
use crate::quadrature::{self, QuadResult, QuadratureError, QuadratureOptions, Range};

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BathError {
    #[error("Bose occupation is undefined at non-positive frequency {0}")]
    NonPositiveFrequency(f64),
    #[error("invalid bath parameter: {0}")]
    Invalid(String),
    #[error(
        "thermal window of the Lorentzian reaches w <= 0 (w0 - K lambda = {0}); \
         n(w) J(w) is not integrable there"
    )]
    InfraredDivergence(f64),
    #[error("kernel quadrature failed at t = {time}: {source}")]
    QuadratureFailure {
        time: f64,
        #[source]
        source: QuadratureError,
    },
    #[error("time grid must be ascending and start at 0")]
    BadTimeGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    /// `J(w) = alpha^2 lambda^2 / (2 pi ((w - w0)^2 + lambda^2))` on the full line.
    Lorentzian { alpha: f64, lambda: f64, omega0: f64 },
    /// `J(w) = gamma w e^{-w / w_c}` for `w > 0`.
    Ohmic { gamma_rate: f64, omega_c: f64 },
    /// Cavity-filtered density of the mapped model,
    /// `J(w) = 2 alpha w w0^4 / ((w0^2 - w^2)^2 + (2 pi gamma w w0)^2)` for `w > 0`.
    CavityEffective { alpha: f64, omega0: f64, gamma_rate: f64 },
}

/// `alpha = 8 gamma g^2 / w0`.
pub fn effective_alpha(g: f64, gamma_rate: f64, omega0: f64) -> f64 {
    8.0 * gamma_rate * g * g / omega0
}

impl SpectralDensity {
    pub fn cavity_from_coupling(g: f64, gamma_rate: f64, omega0: f64) -> Self {
        SpectralDensity::CavityEffective {
            alpha: effective_alpha(g, gamma_rate, omega0),
            omega0,
            gamma_rate,
        }
    }

    pub fn validate(&self) -> Result<(), BathError> {
        let bad = |what: &str| Err(BathError::Invalid(what.to_string()));
        match *self {
            SpectralDensity::Lorentzian { alpha, lambda, omega0 } => {
                if !alpha.is_finite() || !omega0.is_finite() {
                    return bad("Lorentzian alpha and omega0 must be finite");
                }
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return bad("Lorentzian width lambda must be positive");
                }
            }
            SpectralDensity::Ohmic { gamma_rate, omega_c } => {
                if !(gamma_rate >= 0.0 && gamma_rate.is_finite()) {
                    return bad("Ohmic gamma must be >= 0");
                }
                if !(omega_c > 0.0 && omega_c.is_finite()) {
                    return bad("Ohmic cutoff must be positive");
                }
            }
            SpectralDensity::CavityEffective { alpha, omega0, gamma_rate } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return bad("cavity alpha must be >= 0");
                }
                if !(omega0 > 0.0 && omega0.is_finite()) {
                    return bad("cavity frequency must be positive");
                }
                if !(gamma_rate > 0.0 && gamma_rate.is_finite()) {
                    return bad("cavity decay rate must be positive");
                }
            }
        }
        Ok(())
    }

    /// Pointwise `J(w)`.
    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            SpectralDensity::Lorentzian { alpha, lambda, omega0 } => {
                let dw = w - omega0;
                alpha * alpha * lambda * lambda / (2.0 * PI * (dw * dw + lambda * lambda))
            }
            SpectralDensity::Ohmic { gamma_rate, omega_c } => {
                if w <= 0.0 {
                    0.0
                } else {
                    gamma_rate * w * (-w / omega_c).exp()
                }
            }
            SpectralDensity::CavityEffective { alpha, omega0, gamma_rate } => {
                if w <= 0.0 {
                    0.0
                } else {
                    let w04 = omega0.powi(4);
                    let a = omega0 * omega0 - w * w;
                    let b = 2.0 * PI * gamma_rate * w * omega0;
                    2.0 * alpha * w * w04 / (a * a + b * b)
                }
            }
        }
    }

    /// Analytic continuation of `J` off the real axis, used on the tail rays.
    /// Only the rational families continue; the Ohmic form has no tail piece.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        if z.im == 0.0 {
            return cx(self.eval(z.re));
        }
        match *self {
            SpectralDensity::Lorentzian { alpha, lambda, omega0 } => {
                let dw = z - omega0;
                cx(alpha * alpha * lambda * lambda) / ((dw * dw + lambda * lambda) * (2.0 * PI))
            }
            SpectralDensity::Ohmic { gamma_rate, omega_c } => z * gamma_rate * (-z / omega_c).exp(),
            SpectralDensity::CavityEffective { alpha, omega0, gamma_rate } => {
                let a = omega0 * omega0 - z * z;
                let b = z * (2.0 * PI * gamma_rate * omega0);
                z * (2.0 * alpha * omega0.powi(4)) / (a * a + b * b)
            }
        }
    }

    /// Pieces covering the support of `J`: a core window plus unbounded tails.
    pub fn support_pieces(&self, window_multiplier: f64) -> Vec<Piece> {
        match *self {
            SpectralDensity::Lorentzian { lambda, omega0, .. } => {
                let lo = omega0 - window_multiplier * lambda;
                let hi = omega0 + window_multiplier * lambda;
                vec![Piece::LowerTail(lo), Piece::Real(lo, hi), Piece::UpperTail(hi)]
            }
            SpectralDensity::Ohmic { omega_c, .. } => {
                // (1 + x) e^{-x} < 1e-10 beyond x = 26.
                vec![Piece::Real(0.0, 30.0 * omega_c)]
            }
            SpectralDensity::CavityEffective { omega0, .. } => {
                vec![Piece::Real(0.0, 2.0 * omega0), Piece::UpperTail(2.0 * omega0)]
            }
        }
    }

    /// `int J(w) dw` over the support.
    pub fn total_mass(&self) -> f64 {
        match *self {
            SpectralDensity::Lorentzian { alpha, lambda, .. } => 0.5 * alpha * alpha * lambda,
            SpectralDensity::Ohmic { gamma_rate, omega_c } => gamma_rate * omega_c * omega_c,
            SpectralDensity::CavityEffective { .. } => {
                let opts = QuadratureOptions::default();
                integrate_pieces(&self.support_pieces(50.0), |z| [self.eval_complex(z)], &opts)
                    .map(|r| r.value[0].re)
                    .unwrap_or(f64::NAN)
            }
        }
    }
}

/// A piece of a frequency integral over the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// `[a, b]` on the real axis.
    Real(f64, f64),
    /// Stands in for `[a, inf)`: evaluated as `i int_0^inf f(a + iy) dy`.
    UpperTail(f64),
    /// Stands in for `(-inf, b]`: evaluated as `-i int_0^inf f(b + iy) dy`.
    LowerTail(f64),
}

/// Integrates an integrand analytic in the upper half-plane over `pieces`.
pub fn integrate_pieces<const N: usize>(
    pieces: &[Piece],
    f: impl Fn(Complex64) -> [Complex64; N],
    opts: &QuadratureOptions,
) -> Result<QuadResult<N>, QuadratureError> {
    let mut total = QuadResult::zero();
    for piece in pieces {
        let part = match *piece {
            Piece::Real(a, b) => quadrature::integrate(|w| f(cx(w)), Range::Finite(a, b), opts)?,
            Piece::UpperTail(a) => quadrature::integrate(
                |y| f(Complex64::new(a, y)).map(|v| v * Complex64::i()),
                Range::Above(0.0),
                opts,
            )?,
            Piece::LowerTail(b) => quadrature::integrate(
                |y| f(Complex64::new(b, y)).map(|v| -v * Complex64::i()),
                Range::Above(0.0),
                opts,
            )?,
        };
        total.absorb(&part);
    }
    Ok(total)
}

/// `1 / (e^{w/T} - 1)`, exactly 0 at `T = 0`.
pub fn mean_occupation(w: f64, temperature: f64) -> Result<f64, BathError> {
    if !(w > 0.0) {
        return Err(BathError::NonPositiveFrequency(w));
    }
    if temperature < 0.0 || !temperature.is_finite() {
        return Err(BathError::Invalid(format!("temperature {temperature} must be >= 0")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (w / temperature).exp_m1())
}

/// Settings of the frequency quadrature behind the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    /// Half-width of the core window in units of the spectral width.
    pub window_multiplier: f64,
    /// Absolute tolerance in units of `t * int J`.
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            window_multiplier: 50.0,
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    pub spectral: SpectralDensity,
    /// `k_B T` in the same energy unit as the frequencies.
    pub temperature: f64,
    pub quadrature: KernelQuadrature,
}

impl BathConfig {
    pub fn new(spectral: SpectralDensity, temperature: f64) -> Self {
        Self {
            spectral,
            temperature,
            quadrature: KernelQuadrature::default(),
        }
    }

    pub fn validate(&self) -> Result<(), BathError> {
        self.spectral.validate()?;
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(BathError::Invalid(format!(
                "temperature {} must be finite and >= 0",
                self.temperature
            )));
        }
        let q = &self.quadrature;
        if !(q.window_multiplier > 0.0 && q.abs_tol > 0.0 && q.rel_tol >= 0.0 && q.max_intervals > 0) {
            return Err(BathError::Invalid("quadrature settings must be positive".into()));
        }
        Ok(())
    }

    /// Regime diagnostics that do not prevent a run.
    pub fn warnings(&self, params: &ChiralQubitParams) -> Vec<String> {
        let mut out = Vec::new();
        if self.temperature >= params.omega_so.abs() && self.temperature > 0.0 {
            out.push(format!(
                "temperature {} is not below omega_so = {} (low-temperature regime)",
                self.temperature, params.omega_so
            ));
        }
        if let SpectralDensity::Lorentzian { alpha, .. } = self.spectral {
            if alpha * alpha > 0.1 * params.omega_s {
                out.push(format!(
                    "alpha^2 = {} is not small against omega_s = {} (weak coupling)",
                    alpha * alpha,
                    params.omega_s
                ));
            }
        }
        out
    }

    /// Pieces over which the thermal part `int J n (...)` is integrated.
    fn thermal_pieces(&self) -> Result<Vec<Piece>, BathError> {
        let k = self.quadrature.window_multiplier;
        match self.spectral {
            SpectralDensity::Lorentzian { lambda, omega0, .. } => {
                let lo = omega0 - k * lambda;
                if lo <= 0.0 {
                    return Err(BathError::InfraredDivergence(lo));
                }
                let hi = omega0 + k * lambda;
                Ok(vec![Piece::Real(lo, hi), Piece::UpperTail(hi)])
            }
            other => Ok(other.support_pieces(k)),
        }
    }
}

/// Memory channel: target frequency `omega + l omega_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Zero,
    Plus,
    Minus,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Zero, Channel::Plus, Channel::Minus];

    pub fn index(self) -> usize {
        match self {
            Channel::Zero => 0,
            Channel::Plus => 1,
            Channel::Minus => 2,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Channel::Zero => 0.0,
            Channel::Plus => 1.0,
            Channel::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Channel::Zero => "0",
            Channel::Plus => "plus",
            Channel::Minus => "minus",
        }
    }

    pub fn target_frequency(self, params: &ChiralQubitParams) -> f64 {
        params.omega + self.sign() * params.omega_s
    }
}

/// `(e^{ixt} - 1) / (ix)`, continuous through `x = 0`.
pub fn memory_factor(x: f64, t: f64) -> Complex64 {
    let z = x * t;
    if z.abs() < 1e-6 {
        return Complex64::new(t * (1.0 - z * z / 6.0), t * z / 2.0);
    }
    let half = (0.5 * z).sin();
    Complex64::new(z.sin() / x, 2.0 * half * half / x)
}

/// [`memory_factor`] for complex `x`, written as `2 e^{iz/2} sin(z/2) / x`
/// to avoid the cancellation in `e^{iz} - 1`.
pub fn memory_factor_complex(x: Complex64, t: f64) -> Complex64 {
    if x.im == 0.0 {
        return memory_factor(x.re, t);
    }
    let z = x * t;
    if z.norm() < 1e-6 {
        return (cx(1.0) + z * Complex64::new(0.0, 0.5) - z * z / 6.0) * t;
    }
    if z.norm() > 1.0 {
        // Far from zero there is no cancellation, and the product form would
        // overflow for large Im z.
        return ((z * Complex64::i()).exp() - 1.0) / (x * Complex64::i());
    }
    let half = z * 0.5;
    (half * Complex64::i()).exp() * half.sin() * 2.0 / x
}

fn occupation_complex(z: Complex64, temperature: f64) -> Complex64 {
    if z.im == 0.0 {
        cx(1.0 / (z.re / temperature).exp_m1())
    } else {
        cx(1.0) / ((z / temperature).exp() - 1.0)
    }
}

/// Asymptotic value `pi J(w_l) (n(w_l) + 1)` of `Re Gamma'_l`; `n = 0` for `w_l <= 0`.
pub fn markov_limit(spectral: &SpectralDensity, temperature: f64, w: f64) -> f64 {
    let n = if w > 0.0 {
        mean_occupation(w, temperature).unwrap_or(0.0)
    } else {
        0.0
    };
    PI * spectral.eval(w) * (n + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRates {
    pub z: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Kernels per channel on a time grid, plus the derived rates once
/// [`decay_rates`] has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub times: Vec<f64>,
    /// Indexed by [`Channel::index`].
    pub gamma: [Vec<Complex64>; 3],
    pub gamma_prime: [Vec<Complex64>; 3],
    /// Quadrature error estimate per time (max over channels and kernels).
    pub error: Vec<f64>,
    /// Total integrand evaluations.
    pub evaluations: usize,
    pub rates: Option<DecayRates>,
}

impl KernelTable {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn gamma(&self, ch: Channel) -> &[Complex64] {
        &self.gamma[ch.index()]
    }

    pub fn gamma_prime(&self, ch: Channel) -> &[Complex64] {
        &self.gamma_prime[ch.index()]
    }
}

struct TimePoint {
    gamma: [Complex64; 3],
    gamma_prime: [Complex64; 3],
    error: f64,
    evaluations: usize,
}

fn kernels_at(
    bath: &BathConfig,
    targets: [f64; 3],
    t: f64,
    vacuum_pieces: &[Piece],
    thermal_pieces: &[Piece],
    mass: f64,
) -> Result<TimePoint, BathError> {
    let zero = Complex64::new(0.0, 0.0);
    if t == 0.0 {
        return Ok(TimePoint {
            gamma: [zero; 3],
            gamma_prime: [zero; 3],
            error: 0.0,
            evaluations: 0,
        });
    }
    let q = &bath.quadrature;
    let opts = QuadratureOptions {
        abs_tol: (q.abs_tol * mass * t).max(f64::MIN_POSITIVE),
        rel_tol: q.rel_tol,
        max_intervals: q.max_intervals,
    };
    let spectral = bath.spectral;
    let fail = |source| BathError::QuadratureFailure { time: t, source };

    let vacuum = integrate_pieces(
        vacuum_pieces,
        |w| {
            let j = spectral.eval_complex(w);
            targets.map(|wl| memory_factor_complex(w - wl, t) * j)
        },
        &opts,
    )
    .map_err(fail)?;

    let (gamma, th_err, th_evals) = if bath.temperature == 0.0 {
        // n = 0 identically: the thermal kernels are exactly zero.
        ([zero; 3], 0.0, 0)
    } else {
        let temperature = bath.temperature;
        let thermal = integrate_pieces(
            thermal_pieces,
            |w| {
                let jn = spectral.eval_complex(w) * occupation_complex(w, temperature);
                targets.map(|wl| memory_factor_complex(w - wl, t) * jn)
            },
            &opts,
        )
        .map_err(fail)?;
        (thermal.value, thermal.error, thermal.evaluations)
    };

    let mut gamma_prime = vacuum.value;
    for (gp, g) in gamma_prime.iter_mut().zip(gamma.iter()) {
        *gp += *g;
    }
    Ok(TimePoint {
        gamma,
        gamma_prime,
        error: vacuum.error + th_err,
        evaluations: vacuum.evaluations + th_evals,
    })
}

/// Tabulates `Gamma_l(t)` and `Gamma'_l(t)` for all three channels.
pub fn compute_kernels(
    bath: &BathConfig,
    params: &ChiralQubitParams,
    times: &[f64],
) -> Result<KernelTable, BathError> {
    bath.validate()?;
    if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BathError::BadTimeGrid);
    }
    let targets = Channel::ALL.map(|c| c.target_frequency(params));
    let vacuum_pieces = bath.spectral.support_pieces(bath.quadrature.window_multiplier);
    let thermal_pieces = if bath.temperature > 0.0 {
        bath.thermal_pieces()?
    } else {
        Vec::new()
    };

    let mass = bath.spectral.total_mass().abs();
    let points: Vec<TimePoint> = times
        .par_iter()
        .map(|&t| kernels_at(bath, targets, t, &vacuum_pieces, &thermal_pieces, mass))
        .collect::<Result<_, _>>()?;

    let column = |f: &dyn Fn(&TimePoint) -> Complex64| points.iter().map(f).collect::<Vec<_>>();
    Ok(KernelTable {
        times: times.to_vec(),
        gamma: std::array::from_fn(|k| column(&|p| p.gamma[k])),
        gamma_prime: std::array::from_fn(|k| column(&|p| p.gamma_prime[k])),
        error: points.iter().map(|p| p.error).collect(),
        evaluations: points.iter().map(|p| p.evaluations).sum(),
        rates: None,
    })
}

/// Rates at one time from the kernels of that time.
pub fn rates_from_kernels(
    gamma: &[Complex64; 3],
    gamma_prime: &[Complex64; 3],
    coeffs: &DressedCoefficients,
) -> (f64, f64, f64) {
    let d0 = coeffs.c_z;
    let dp = coeffs.c_plus;
    let dm = -coeffs.c_minus;
    let (z, p, m) = (Channel::Zero.index(), Channel::Plus.index(), Channel::Minus.index());
    let gz = 2.0 * d0 * d0 * (gamma[z].re + gamma_prime[z].re);
    let gp = 2.0 * dp * dp * gamma[p].re + 2.0 * dm * dm * gamma_prime[m].re;
    let gm = 2.0 * dm * dm * gamma[m].re + 2.0 * dp * dp * gamma_prime[p].re;
    (gz, gp, gm)
}

/// Fills in `gamma_z`, `gamma_+`, `gamma_-` on the table's grid.
pub fn decay_rates(mut kernels: KernelTable, coeffs: &DressedCoefficients) -> KernelTable {
    let n = kernels.len();
    let mut rates = DecayRates {
        z: Vec::with_capacity(n),
        plus: Vec::with_capacity(n),
        minus: Vec::with_capacity(n),
    };
    for k in 0..n {
        let g = std::array::from_fn(|c| kernels.gamma[c][k]);
        let gp = std::array::from_fn(|c| kernels.gamma_prime[c][k]);
        let (z, p, m) = rates_from_kernels(&g, &gp, coeffs);
        rates.z.push(z);
        rates.plus.push(p);
        rates.minus.push(m);
    }
    kernels.rates = Some(rates);
    kernels
}
