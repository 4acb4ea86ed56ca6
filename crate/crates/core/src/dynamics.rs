//! Time-local second-order propagation of the dressed-basis density matrix.
//!
//! The generator is `-i[H, rho]` plus Lindblad dissipators with the
//! time-dependent rates `gamma_z`, `gamma_+`, `gamma_-` and, optionally, the
//! non-secular cross terms. The Lamb shift is not included.
//!
//! Kernels are tabulated once on a grid fine enough to resolve their fastest
//! oscillation and interpolated with [`CubicSeries`]; the integrator is an
//! adaptive Dormand–Prince 5(4) pair that lands exactly on every output time.
//!
//! The integrated variable is `U(t)^dag rho U(t)` with `U = e^{-iHt}`: the
//! generator is applied to `rho` itself and the result rotated back, so the
//! equation is unchanged while the free precession at `omega_s` is carried
//! exactly by `U` instead of by the step size.

use num_complex::Complex64;
use thiserror::Error;

use crate::bath::{self, BathConfig, BathError, Channel, KernelTable, SpectralDensity};
use crate::effective::{c, dressed_interaction_coefficients, ops, ChiralQubitParams, Op2};
use crate::interp::CubicSeries;
use crate::observables::entropy_from_eigenvalues;
use crate::quadrature::gauss_legendre_10;

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_POSITIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid time grid: {0}")]
    BadTimeGrid(String),
    #[error("integrator failed at t = {time}: step {step:e} below minimum")]
    IntegratorFailure { time: f64, step: f64 },
    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),
    #[error("non-secular term needs tabulated kernels, but the schedule only has rates")]
    MissingKernels,
    #[error("invalid propagation options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Bath(#[from] BathError),
}

/// A 2x2 density matrix in the dressed basis `{|up>, |down>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    m: Op2,
}

impl DensityMatrix2 {
    /// Checks Hermiticity, unit trace and positivity to the default tolerances.
    pub fn new(m: Op2) -> Result<Self, DynamicsError> {
        Self::with_tolerance(m, DEFAULT_POSITIVITY_TOLERANCE)
    }

    pub fn with_tolerance(m: Op2, positivity_tolerance: f64) -> Result<Self, DynamicsError> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DynamicsError::InvalidState("non-finite entry".into()));
        }
        let rho = Self { m };
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(DynamicsError::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = rho.trace_error();
        if tr > TRACE_TOLERANCE {
            return Err(DynamicsError::InvalidState(format!("trace differs from 1 by {tr:e}")));
        }
        let low = rho.eigenvalues()[0];
        if low < -positivity_tolerance {
            return Err(DynamicsError::InvalidState(format!("eigenvalue {low:e} is negative")));
        }
        Ok(rho)
    }

    pub fn from_matrix_unchecked(m: Op2) -> Self {
        Self { m }
    }

    pub fn up() -> Self {
        Self::from_matrix_unchecked(Op2::new(c(1.0), c(0.0), c(0.0), c(0.0)))
    }

    pub fn down() -> Self {
        Self::from_matrix_unchecked(Op2::new(c(0.0), c(0.0), c(0.0), c(1.0)))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_matrix_unchecked(Op2::identity() * c(0.5))
    }

    pub fn matrix(&self) -> &Op2 {
        &self.m
    }

    pub fn trace_error(&self) -> f64 {
        (self.m.trace() - c(1.0)).norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.m - self.m.adjoint()).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[(0, 0)].re;
        let d = self.m[(1, 1)].re;
        let b = 0.5 * (self.m[(0, 1)] + self.m[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let r = (0.5 * (a - d)).hypot(b.norm());
        [mean - r, mean + r]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub include_nonsecular: bool,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// First trial step; `None` picks one from the dressed splitting.
    pub initial_step: Option<f64>,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub positivity_tolerance: f64,
    /// Kernel grid spacing times the fastest kernel frequency.
    pub kernel_resolution: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            include_nonsecular: false,
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            initial_step: None,
            min_step: 1e-14,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
            positivity_tolerance: DEFAULT_POSITIVITY_TOLERANCE,
            kernel_resolution: 0.1,
        }
    }
}

impl PropagationOptions {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(DynamicsError::InvalidOptions("tolerances must be positive"));
        }
        if !positive(self.min_step) || !(self.max_step >= self.min_step) {
            return Err(DynamicsError::InvalidOptions("need 0 < min_step <= max_step"));
        }
        if !(self.positivity_tolerance >= 0.0) {
            return Err(DynamicsError::InvalidOptions("positivity tolerance must be >= 0"));
        }
        if !positive(self.kernel_resolution) || !self.kernel_resolution.is_finite() {
            return Err(DynamicsError::InvalidOptions("kernel resolution must be positive"));
        }
        Ok(())
    }
}

/// Dressed weights `delta_0`, `delta_+`, `delta_-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub zero: f64,
    pub plus: f64,
    pub minus: f64,
}

impl Weights {
    pub fn from_params(p: &ChiralQubitParams) -> Self {
        Self {
            zero: p.delta_zero,
            plus: p.delta_plus,
            minus: p.delta_minus,
        }
    }
}

/// Interpolated kernels: re and im of `Gamma_l` then of `Gamma'_l`, per channel.
#[derive(Debug, Clone, PartialEq)]
struct KernelSeries {
    gamma: [[CubicSeries; 2]; 3],
    gamma_prime: [[CubicSeries; 2]; 3],
    weights: Weights,
}

/// Rates (and optionally kernels) as smooth functions of time.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    rates: [CubicSeries; 3],
    kernels: Option<KernelSeries>,
}

fn check_grid(times: &[f64]) -> Result<(), DynamicsError> {
    if times.is_empty() {
        return Err(DynamicsError::BadTimeGrid("empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times[0] < 0.0 {
        return Err(DynamicsError::BadTimeGrid("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DynamicsError::BadTimeGrid("times must be strictly ascending".into()));
    }
    Ok(())
}

impl RateSchedule {
    /// Tabulated rates `(gamma_z, gamma_+, gamma_-)` on `times`.
    pub fn from_rates(times: &[f64], z: &[f64], plus: &[f64], minus: &[f64]) -> Result<Self, DynamicsError> {
        check_grid(times)?;
        if times.len() < 2 || [z.len(), plus.len(), minus.len()].iter().any(|&n| n != times.len()) {
            return Err(DynamicsError::BadTimeGrid("need >= 2 knots and one rate per knot".into()));
        }
        Ok(Self {
            rates: [z, plus, minus].map(|v| CubicSeries::new(times, v)),
            kernels: None,
        })
    }

    /// Rates held fixed on `[0, t_end]`.
    pub fn constant(rates: [f64; 3], t_end: f64) -> Self {
        let times = [0.0, t_end.max(f64::MIN_POSITIVE)];
        Self {
            rates: rates.map(|r| CubicSeries::new(&times, &[r, r])),
            kernels: None,
        }
    }

    pub fn from_kernels(table: &KernelTable, params: &ChiralQubitParams) -> Result<Self, DynamicsError> {
        check_grid(&table.times)?;
        if table.len() < 2 {
            return Err(DynamicsError::BadTimeGrid("need >= 2 kernel knots".into()));
        }
        let coeffs = dressed_interaction_coefficients(params);
        let t = &table.times;
        let (mut z, mut plus, mut minus) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..table.len() {
            let g = std::array::from_fn(|ch| table.gamma[ch][k]);
            let gp = std::array::from_fn(|ch| table.gamma_prime[ch][k]);
            let (rz, rp, rm) = bath::rates_from_kernels(&g, &gp, &coeffs);
            z.push(rz);
            plus.push(rp);
            minus.push(rm);
        }
        let split = |col: &Vec<Complex64>| {
            let re: Vec<f64> = col.iter().map(|v| v.re).collect();
            let im: Vec<f64> = col.iter().map(|v| v.im).collect();
            [CubicSeries::new(t, &re), CubicSeries::new(t, &im)]
        };
        Ok(Self {
            rates: [&z, &plus, &minus].map(|v| CubicSeries::new(t, v)),
            kernels: Some(KernelSeries {
                gamma: std::array::from_fn(|ch| split(&table.gamma[ch])),
                gamma_prime: std::array::from_fn(|ch| split(&table.gamma_prime[ch])),
                weights: Weights::from_params(params),
            }),
        })
    }

    pub fn knots(&self) -> &[f64] {
        self.rates[0].knots()
    }

    pub fn t_end(&self) -> f64 {
        *self.knots().last().expect("nonempty schedule")
    }

    /// `(gamma_z, gamma_+, gamma_-)` at `t`.
    pub fn rates_at(&self, t: f64) -> [f64; 3] {
        self.rates.each_ref().map(|s| s.eval(t))
    }

    pub fn rate_series(&self) -> &[CubicSeries; 3] {
        &self.rates
    }

    pub fn has_kernels(&self) -> bool {
        self.kernels.is_some()
    }

    /// `(Gamma_l, Gamma'_l)` at `t`, ordered as [`Channel::ALL`].
    pub fn kernels_at(&self, t: f64) -> Option<([Complex64; 3], [Complex64; 3], Weights)> {
        self.kernels.as_ref().map(|k| {
            let ev = |s: &[CubicSeries; 2]| Complex64::new(s[0].eval(t), s[1].eval(t));
            (k.gamma.each_ref().map(ev), k.gamma_prime.each_ref().map(ev), k.weights)
        })
    }
}

fn dissipator(op: &Op2, rho: &Op2) -> Op2 {
    let dag = op.adjoint();
    let n = dag * op;
    op * rho * dag - (n * rho + rho * n) * c(0.5)
}

/// `-i[H, rho] + sum_m gamma_m D[C_m] rho` with `C_z`, `C_+ = |up><down|`,
/// `C_- = |down><up|`; `rates` is `(gamma_z, gamma_+, gamma_-)`.
pub fn lindblad_generator(rho: &Op2, rates: [f64; 3], h: &Op2) -> Op2 {
    let mut out = (h * rho - rho * h) * Complex64::new(0.0, -1.0);
    let [gz, gp, gm] = rates;
    if gz != 0.0 {
        out += dissipator(&ops::sigma_z(), rho) * c(gz);
    }
    if gp != 0.0 {
        out += dissipator(&ops::raising(), rho) * c(gp);
    }
    if gm != 0.0 {
        out += dissipator(&ops::lowering(), rho) * c(gm);
    }
    out
}

/// `a rho b - rho b a`
fn pair(a: &Op2, rho: &Op2, b: &Op2) -> Op2 {
    a * rho * b - rho * b * a
}

/// Non-secular cross terms plus their Hermitian conjugate. `gamma` and
/// `gamma_prime` are ordered as [`Channel::ALL`].
pub fn nonsecular_term(rho: &Op2, gamma: &[Complex64; 3], gamma_prime: &[Complex64; 3], w: &Weights) -> Op2 {
    let (cz, cp, cm) = (ops::sigma_z(), ops::raising(), ops::lowering());
    let (d0, dp, dm) = (w.zero, w.plus, w.minus);
    let (z, p, m) = (Channel::Zero.index(), Channel::Plus.index(), Channel::Minus.index());
    let r = rho;

    let x = (pair(&cz, r, &cm) * c(d0 * dp) - pair(&cz, r, &cp) * c(d0 * dm)) * gamma[z]
        + (pair(&cp, r, &cz) * c(d0 * dp) - pair(&cp, r, &cp) * c(dp * dm)) * gamma[p]
        - (pair(&cm, r, &cz) * c(d0 * dm) + pair(&cm, r, &cm) * c(dp * dm)) * gamma[m]
        + (pair(&cm, r, &cz) * c(d0 * dp) - pair(&cp, r, &cz) * c(d0 * dm)) * gamma_prime[z]
        + (pair(&cz, r, &cp) * c(d0 * dp) - pair(&cp, r, &cp) * c(dp * dm)) * gamma_prime[p]
        - (pair(&cz, r, &cm) * c(d0 * dm) + pair(&cm, r, &cm) * c(dp * dm)) * gamma_prime[m];
    x + x.adjoint()
}

/// `diag(omega_s / 2, -omega_s / 2)`.
pub fn dressed_hamiltonian(omega_s: f64) -> Op2 {
    Op2::new(c(0.5 * omega_s), c(0.0), c(0.0), c(-0.5 * omega_s))
}

/// The full right-hand side at time `t`.
pub fn generator(
    t: f64,
    rho: &Op2,
    h: &Op2,
    schedule: &RateSchedule,
    include_nonsecular: bool,
) -> Result<Op2, DynamicsError> {
    let mut out = lindblad_generator(rho, schedule.rates_at(t), h);
    if include_nonsecular {
        let (g, gp, w) = schedule.kernels_at(t).ok_or(DynamicsError::MissingKernels)?;
        out += nonsecular_term(rho, &g, &gp, &w);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityViolation {
    pub time: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix2>,
    pub polarization: Vec<f64>,
    pub entropy: Vec<f64>,
    /// `(gamma_z, gamma_+, gamma_-)` at each output time.
    pub rates: Vec<[f64; 3]>,
    /// Output times whose smallest eigenvalue fell below `-positivity_tolerance`.
    pub violations: Vec<PositivityViolation>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn max_trace_error(&self) -> f64 {
        self.states.iter().map(|s| s.trace_error()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states.iter().map(|s| s.hermiticity_error()).fold(0.0, f64::max)
    }

    /// Most negative eigenvalue over all output times, or 0.
    pub fn min_eigenvalue(&self) -> f64 {
        self.states.iter().map(|s| s.eigenvalues()[0]).fold(0.0, f64::min)
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// `U(t) = e^{-iHt}` for `H = diag(omega_s/2, -omega_s/2)`, as its diagonal.
fn free_evolution(omega_s: f64, t: f64) -> [Complex64; 2] {
    let phase = Complex64::from_polar(1.0, -0.5 * omega_s * t);
    [phase, phase.conj()]
}

/// `U y U^dag` for diagonal `U`.
fn conjugate(u: [Complex64; 2], y: &Op2) -> Op2 {
    Op2::new(
        y[(0, 0)],
        u[0] * y[(0, 1)] * u[1].conj(),
        u[1] * y[(1, 0)] * u[0].conj(),
        y[(1, 1)],
    )
}

struct Stepper<'a> {
    omega_s: f64,
    schedule: &'a RateSchedule,
    opts: &'a PropagationOptions,
    accepted: usize,
    rejected: usize,
}

impl Stepper<'_> {
    /// Rotating-frame derivative: `U^dag L_t[U y U^dag] U`.
    fn rhs(&self, t: f64, y: &Op2) -> Result<Op2, DynamicsError> {
        let u = free_evolution(self.omega_s, t);
        let rho = conjugate(u, y);
        let d = generator(t, &rho, &Op2::zeros(), self.schedule, self.opts.include_nonsecular)?;
        Ok(conjugate([u[0].conj(), u[1].conj()], &d))
    }

    /// One trial step of size `dt`; returns the new state, its derivative and
    /// the scaled error norm.
    fn trial(&self, t: f64, y: &Op2, k1: &Op2, dt: f64) -> Result<(Op2, Op2, f64), DynamicsError> {
        let mut k = [*k1; 7];
        for s in 1..6 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s - 1][j] != 0.0 {
                    ys += kj * c(dt * A[s - 1][j]);
                }
            }
            k[s] = self.rhs(t + C[s] * dt, &ys)?;
        }
        let mut y_new = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            if A[5][j] != 0.0 {
                y_new += kj * c(dt * A[5][j]);
            }
        }
        k[6] = self.rhs(t + dt, &y_new)?;
        let mut err = Op2::zeros();
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err += kj * c(dt * E[j]);
            }
        }
        let mut norm = 0.0_f64;
        for i in 0..4 {
            let scale = self.opts.abs_tol + self.opts.rel_tol * y[i].norm().max(y_new[i].norm());
            norm = norm.max(err[i].norm() / scale);
        }
        Ok((y_new, k[6], norm))
    }

    /// Advances from `t` to exactly `t_out`.
    fn advance(&mut self, t: &mut f64, y: &mut Op2, k1: &mut Op2, dt: &mut f64, t_out: f64) -> Result<(), DynamicsError> {
        while *t < t_out {
            if self.accepted + self.rejected >= self.opts.max_steps {
                return Err(DynamicsError::TooManySteps(self.opts.max_steps));
            }
            let remaining = t_out - *t;
            let last = *dt >= remaining;
            let step = if last { remaining } else { *dt };
            let (y_new, k_new, norm) = self.trial(*t, y, k1, step)?;
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if norm <= 1.0 {
                *t = if last { t_out } else { *t + step };
                *y = y_new;
                *k1 = k_new;
                self.accepted += 1;
                if !last || factor > 1.0 {
                    *dt = (step * factor).min(self.opts.max_step);
                }
            } else {
                self.rejected += 1;
                *dt = step * factor.min(1.0);
                if *dt < self.opts.min_step {
                    return Err(DynamicsError::IntegratorFailure { time: *t, step: *dt });
                }
            }
        }
        Ok(())
    }
}

/// Propagates `rho0` from `times[0]` through every output time.
pub fn propagate_with(
    rho0: &DensityMatrix2,
    schedule: &RateSchedule,
    omega_s: f64,
    times: &[f64],
    opts: &PropagationOptions,
) -> Result<Trajectory, DynamicsError> {
    opts.validate()?;
    check_grid(times)?;
    if opts.include_nonsecular && !schedule.has_kernels() {
        return Err(DynamicsError::MissingKernels);
    }
    let mut stepper = Stepper {
        omega_s,
        schedule,
        opts,
        accepted: 0,
        rejected: 0,
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        polarization: Vec::with_capacity(times.len()),
        entropy: Vec::with_capacity(times.len()),
        rates: Vec::with_capacity(times.len()),
        violations: Vec::new(),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut t = times[0];
    let u0 = free_evolution(omega_s, t);
    let mut y = conjugate([u0[0].conj(), u0[1].conj()], rho0.matrix());
    let mut k1 = stepper.rhs(t, &y)?;
    let mut dt = opts
        .initial_step
        .unwrap_or(1e-3)
        .clamp(opts.min_step, opts.max_step);
    let knots = schedule.knots();
    for &t_out in times {
        // Rate knots are breakpoints: the interpolant is only C1 across them.
        let mut next = knots.partition_point(|&k| k <= t);
        while next < knots.len() && knots[next] < t_out {
            stepper.advance(&mut t, &mut y, &mut k1, &mut dt, knots[next])?;
            k1 = stepper.rhs(t, &y)?;
            next += 1;
        }
        stepper.advance(&mut t, &mut y, &mut k1, &mut dt, t_out)?;
        let rho = DensityMatrix2::from_matrix_unchecked(conjugate(free_evolution(omega_s, t_out), &y));
        let eigs = rho.eigenvalues();
        if eigs[0] < -opts.positivity_tolerance {
            traj.violations.push(PositivityViolation {
                time: t_out,
                min_eigenvalue: eigs[0],
            });
        }
        traj.times.push(t_out);
        traj.polarization.push(rho.m[(0, 0)].re - rho.m[(1, 1)].re);
        traj.entropy.push(entropy_from_eigenvalues(eigs));
        traj.rates.push(schedule.rates_at(t_out));
        traj.states.push(rho);
    }
    traj.accepted_steps = stepper.accepted;
    traj.rejected_steps = stepper.rejected;
    Ok(traj)
}

/// Fastest oscillation frequency of the kernels: the largest distance from a
/// target `omega + l omega_s` to where the spectral weight sits.
pub fn kernel_frequency(spectral: &SpectralDensity, params: &ChiralQubitParams) -> f64 {
    let targets = Channel::ALL.map(|ch| ch.target_frequency(params));
    let (lo, hi) = match *spectral {
        SpectralDensity::Lorentzian { lambda, omega0, .. } => (omega0 - lambda, omega0 + lambda),
        SpectralDensity::Ohmic { omega_c, .. } => (0.0, omega_c),
        SpectralDensity::CavityEffective { omega0, .. } => (0.0, omega0),
    };
    targets
        .iter()
        .map(|&w| (w - lo).abs().max((w - hi).abs()))
        .fold(0.0, f64::max)
        .max(hi - lo)
}

/// Grid from 0 to `horizon` containing every output time in range, with each
/// interval split evenly so no spacing exceeds `max_spacing`.
pub fn kernel_grid(times: &[f64], horizon: f64, max_spacing: f64) -> Vec<f64> {
    let mut anchors: Vec<f64> = std::iter::once(0.0)
        .chain(times.iter().copied().filter(|&t| t > 0.0 && t < horizon))
        .chain(std::iter::once(horizon))
        .collect();
    anchors.dedup();
    let mut out = vec![0.0];
    for w in anchors.windows(2) {
        let n = ((w[1] - w[0]) / max_spacing).ceil().max(1.0) as usize;
        for k in 1..n {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
        out.push(w[1]);
    }
    out
}

/// Upper bound on kernel grid points accepted by [`build_schedule`].
pub const MAX_KERNEL_POINTS: usize = 2_000_000;

/// Kernels on `[0, horizon]` on the grid used by [`build_schedule`], without
/// rates. They depend on `params` only through `omega` and `omega_s`, so one
/// table serves every `Delta_so / omega_s` at fixed drive frequency and splitting.
pub fn tabulate_kernels(
    bath: &BathConfig,
    params: &ChiralQubitParams,
    times: &[f64],
    horizon: f64,
    opts: &PropagationOptions,
) -> Result<KernelTable, DynamicsError> {
    opts.validate()?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(DynamicsError::BadTimeGrid("horizon must be positive".into()));
    }
    let spacing = opts.kernel_resolution / kernel_frequency(&bath.spectral, params).max(1e-300);
    if horizon / spacing > MAX_KERNEL_POINTS as f64 {
        return Err(DynamicsError::BadTimeGrid(format!(
            "kernel grid would need more than {MAX_KERNEL_POINTS} points"
        )));
    }
    let grid = kernel_grid(times, horizon, spacing);
    Ok(bath::compute_kernels(bath, params, &grid)?)
}

/// Rates for `params` from a table made by [`tabulate_kernels`] with the same
/// `omega` and `omega_s`.
pub fn schedule_from_table(
    table: KernelTable,
    params: &ChiralQubitParams,
) -> Result<(RateSchedule, KernelTable), DynamicsError> {
    let table = bath::decay_rates(table, &dressed_interaction_coefficients(params));
    let schedule = RateSchedule::from_kernels(&table, params)?;
    Ok((schedule, table))
}

/// Tabulates kernels on `[0, horizon]` and wraps them in a schedule.
pub fn build_schedule(
    bath: &BathConfig,
    params: &ChiralQubitParams,
    times: &[f64],
    horizon: f64,
    opts: &PropagationOptions,
) -> Result<(RateSchedule, KernelTable), DynamicsError> {
    let table = tabulate_kernels(bath, params, times, horizon, opts)?;
    schedule_from_table(table, params)
}

/// Tabulates kernels up to the last output time and propagates.
pub fn propagate(
    rho0: &DensityMatrix2,
    bath: &BathConfig,
    params: &ChiralQubitParams,
    times: &[f64],
    opts: &PropagationOptions,
) -> Result<Trajectory, DynamicsError> {
    check_grid(times)?;
    let horizon = times[times.len() - 1];
    if horizon == 0.0 {
        let schedule = RateSchedule::constant([0.0; 3], 1.0);
        return propagate_with(rho0, &schedule, params.omega_s, times, &PropagationOptions {
            include_nonsecular: false,
            ..*opts
        });
    }
    let (schedule, _) = build_schedule(bath, params, times, horizon, opts)?;
    propagate_with(rho0, &schedule, params.omega_s, times, opts)
}

/// Closed-form polarization for an initial value `p0` under the secular
/// rates: `P = e^{-f} [p0 + int_0^t e^{f} (gamma_+ - gamma_-)]` with
/// `f = int_0^t (gamma_+ + gamma_-)`.
///
/// `f` is integrated exactly on the interpolant; the outer integral uses
/// 10-point Gauss–Legendre on each knot interval.
pub fn analytic_polarization_from(p0: f64, schedule: &RateSchedule, times: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    check_grid(times)?;
    let knots = schedule.knots();
    if knots[0] != 0.0 {
        return Err(DynamicsError::BadTimeGrid("schedule must start at t = 0".into()));
    }
    if times[times.len() - 1] > schedule.t_end() * (1.0 + 1e-12) {
        return Err(DynamicsError::BadTimeGrid("times extend past the schedule".into()));
    }
    let [_, plus, minus] = schedule.rate_series();
    let sum_values: Vec<f64> = plus.values().iter().zip(minus.values()).map(|(a, b)| a + b).collect();
    let total = CubicSeries::new(knots, &sum_values);
    let f_knots = total.cumulative();
    let f = |t: f64| {
        let k = total.segment(t);
        f_knots[k] + total.partial_integral(k, t)
    };
    let (gx, gw) = gauss_legendre_10();
    let outer = |a: f64, b: f64| -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        gx.iter()
            .zip(gw.iter())
            .map(|(&x, &w)| {
                let s = mid + half * x;
                w * f(s).exp() * (plus.eval(s) - minus.eval(s))
            })
            .sum::<f64>()
            * half
    };

    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    let mut pos = 0.0;
    let mut knot = 1;
    for &t in times {
        while knot < knots.len() && knots[knot] <= t {
            acc += outer(pos, knots[knot]);
            pos = knots[knot];
            knot += 1;
        }
        let partial = if t > pos { outer(pos, t) } else { 0.0 };
        out.push((-f(t)).exp() * (p0 + acc + partial));
    }
    Ok(out)
}

/// [`analytic_polarization_from`] with full initial polarization.
pub fn analytic_polarization(schedule: &RateSchedule, times: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    analytic_polarization_from(1.0, schedule, times)
}
