//! Exact evolution of the qubit coupled to a handful of discrete bath modes.
//!
//! The continuum `J` is cut into equal-mass bins; each bin becomes one mode at
//! the bin's centroid frequency with `g^2` equal to the bin mass. In the frame
//! rotating at the drive frequency the total Hamiltonian is
//!
//! `H = (omega_s/2) C_z + sum_j (omega_j - omega) b_j^dag b_j
//!      + sum_j g_j (b_j^dag X + b_j X^dag)`,
//!
//! with `X = delta_0 C_z + delta_+ C_- - delta_- C_+`. It is real symmetric and
//! time independent, so one eigendecomposition gives the state at every time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::bath::{decay_rates, memory_factor, Channel, KernelTable, SpectralDensity};
use crate::effective::{dressed_interaction_coefficients, ChiralQubitParams};
use crate::quadrature::{self, QuadratureError, QuadratureOptions, Range};

pub const MAX_MODES: usize = 8;
pub const MAX_FOCK_CUTOFF: usize = 3;
pub const MAX_DIMENSION: usize = 4096;
/// Largest fraction of the spectral mass allowed outside the window.
pub const MAX_TAIL_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("window error: {0}")]
    WindowError(String),
    #[error("Hilbert space dimension {dimension} exceeds {MAX_DIMENSION} (or mode/cutoff bounds)")]
    DimensionError { dimension: usize },
    #[error("invalid oracle input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub coupling: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    pub modes: Vec<Mode>,
    pub fock_cutoff: usize,
}

impl DiscretizedBath {
    pub fn total_coupling(&self) -> f64 {
        self.modes.iter().map(|m| m.coupling * m.coupling).sum()
    }

    pub fn dimension(&self) -> Option<usize> {
        let per_mode = self.fock_cutoff + 1;
        self.modes
            .iter()
            .try_fold(2usize, |d, _| d.checked_mul(per_mode))
    }
}

/// A window holding all but a small fraction of the mass of `J`.
pub fn default_window(spectral: &SpectralDensity) -> (f64, f64) {
    match *spectral {
        // Tail fraction 2 / (pi K) = 6.4e-4 at K = 1000.
        SpectralDensity::Lorentzian { lambda, omega0, .. } => (omega0 - 1000.0 * lambda, omega0 + 1000.0 * lambda),
        SpectralDensity::Ohmic { omega_c, .. } => (0.0, 30.0 * omega_c),
        SpectralDensity::CavityEffective { omega0, .. } => (0.0, 100.0 * omega0),
    }
}

fn opts() -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

fn mass_between(spectral: &SpectralDensity, a: f64, b: f64) -> Result<f64, OracleError> {
    Ok(quadrature::integrate_real(|w| spectral.eval(w), Range::Finite(a, b), &opts())?.0)
}

/// Equal-mass discretization of `spectral` on `window` into `n` modes.
pub fn discretize(
    spectral: &SpectralDensity,
    n: usize,
    window: (f64, f64),
    fock_cutoff: usize,
) -> Result<DiscretizedBath, OracleError> {
    if n == 0 || n > MAX_MODES || fock_cutoff > MAX_FOCK_CUTOFF {
        return Err(OracleError::DimensionError {
            dimension: 2 * (fock_cutoff + 1).saturating_pow(n as u32),
        });
    }
    let (a, b) = window;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(OracleError::WindowError(format!("bad window [{a}, {b}]")));
    }
    let inside = mass_between(spectral, a, b)?;
    let total = spectral.total_mass();
    if !(inside > 0.0) {
        return Err(OracleError::WindowError("no spectral mass in window".into()));
    }
    let tail = (total - inside) / total;
    if tail > MAX_TAIL_FRACTION {
        return Err(OracleError::WindowError(format!(
            "window [{a}, {b}] leaves {tail:.3e} of the spectral mass outside"
        )));
    }

    let mut edges = vec![a];
    for k in 1..n {
        let target = inside * k as f64 / n as f64;
        let (mut lo, mut hi) = (*edges.last().unwrap(), b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mass_between(spectral, a, mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        edges.push(0.5 * (lo + hi));
    }
    edges.push(b);

    let mut modes = Vec::with_capacity(n);
    for w in edges.windows(2) {
        let mass = mass_between(spectral, w[0], w[1])?;
        let first = quadrature::integrate_real(|x| x * spectral.eval(x), Range::Finite(w[0], w[1]), &opts())?.0;
        if !(mass > 0.0) {
            return Err(OracleError::WindowError(format!("empty bin [{}, {}]", w[0], w[1])));
        }
        modes.push(Mode {
            coupling: mass.sqrt(),
            frequency: first / mass,
        });
    }
    Ok(DiscretizedBath { modes, fock_cutoff })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// `|up>` in the dressed basis.
    DressedUp,
    /// `|chi+, 1/2>`, written in the dressed basis.
    ChiralPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactEvolution {
    pub times: Vec<f64>,
    pub polarization: Vec<f64>,
    /// Largest deviation of the total state norm from 1.
    pub norm_error: f64,
    /// Largest deviation of the reduced-state trace from 1.
    pub trace_error: f64,
}

/// Total Hamiltonian in the product basis `system (slow) x modes`, mode 0 the
/// least significant digit.
pub fn total_hamiltonian(params: &ChiralQubitParams, bath: &DiscretizedBath) -> Result<DMatrix<f64>, OracleError> {
    let dim = bath
        .dimension()
        .filter(|&d| d <= MAX_DIMENSION && bath.modes.len() <= MAX_MODES && bath.fock_cutoff <= MAX_FOCK_CUTOFF)
        .ok_or(OracleError::DimensionError {
            dimension: bath.dimension().unwrap_or(usize::MAX),
        })?;
    let levels = bath.fock_cutoff + 1;
    let nb = dim / 2;
    // X in the dressed basis (row, column), index 0 = up.
    let x = [
        [params.delta_zero, -params.delta_minus],
        [params.delta_plus, -params.delta_zero],
    ];
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let occupation = |b: usize, j: usize| (b / levels.pow(j as u32)) % levels;
    for s in 0..2 {
        for b in 0..nb {
            let i = s * nb + b;
            let mut e = if s == 0 { 0.5 } else { -0.5 } * params.omega_s;
            for (j, m) in bath.modes.iter().enumerate() {
                e += (m.frequency - params.omega) * occupation(b, j) as f64;
            }
            h[(i, i)] = e;
        }
    }
    for (j, m) in bath.modes.iter().enumerate() {
        let stride = levels.pow(j as u32);
        for b in 0..nb {
            let n = occupation(b, j);
            if n + 1 >= levels {
                continue;
            }
            // <n+1| b^dag |n> = sqrt(n+1); b^dag X couples (s', b+stride) <- (s, b).
            let amp = m.coupling * ((n + 1) as f64).sqrt();
            for s in 0..2 {
                for sp in 0..2 {
                    let v = amp * x[sp][s];
                    if v != 0.0 {
                        let row = sp * nb + b + stride;
                        let col = s * nb + b;
                        h[(row, col)] += v;
                        h[(col, row)] += v;
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Exact reduced polarization `<C_z>` with the bath starting in its vacuum.
pub fn exact_evolve(
    params: &ChiralQubitParams,
    bath: &DiscretizedBath,
    times: &[f64],
    initial: InitialState,
) -> Result<ExactEvolution, OracleError> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(OracleError::Invalid("non-finite time".into()));
    }
    let h = total_hamiltonian(params, bath)?;
    let dim = h.nrows();
    let nb = dim / 2;
    let mut psi0 = DVector::<f64>::zeros(dim);
    match initial {
        InitialState::DressedUp => psi0[0] = 1.0,
        InitialState::ChiralPlus => {
            psi0[0] = params.delta_plus.sqrt();
            psi0[nb] = -params.delta_minus.sqrt();
        }
    }
    let eig = h.symmetric_eigen();
    let coeffs = eig.eigenvectors.transpose() * &psi0;

    let mut out = ExactEvolution {
        times: times.to_vec(),
        polarization: Vec::with_capacity(times.len()),
        norm_error: 0.0,
        trace_error: 0.0,
    };
    for &t in times {
        let phased: DVector<Complex64> = DVector::from_iterator(
            dim,
            coeffs
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(&c, &e)| Complex64::from_polar(c, -e * t)),
        );
        let vectors = eig.eigenvectors.map(|v| Complex64::new(v, 0.0));
        let psi = vectors * phased;
        let up: f64 = psi.rows(0, nb).iter().map(|z| z.norm_sqr()).sum();
        let down: f64 = psi.rows(nb, nb).iter().map(|z| z.norm_sqr()).sum();
        out.norm_error = out.norm_error.max((up + down - 1.0).abs());
        out.trace_error = out.trace_error.max((up + down - 1.0).abs());
        out.polarization.push(up - down);
    }
    Ok(out)
}

/// Zero-temperature kernels of the discrete bath itself:
/// `Gamma'_l(t) = sum_j g_j^2 (e^{i(omega_j - omega_l)t} - 1) / (i(omega_j - omega_l))`
/// and `Gamma_l = 0`. Rates are filled in.
pub fn discrete_kernels(params: &ChiralQubitParams, bath: &DiscretizedBath, times: &[f64]) -> KernelTable {
    let zero = Complex64::new(0.0, 0.0);
    let targets = Channel::ALL.map(|ch| ch.target_frequency(params));
    let gamma_prime = targets.map(|wl| {
        times
            .iter()
            .map(|&t| {
                bath.modes
                    .iter()
                    .map(|m| memory_factor(m.frequency - wl, t) * (m.coupling * m.coupling))
                    .sum()
            })
            .collect()
    });
    let table = KernelTable {
        times: times.to_vec(),
        gamma: std::array::from_fn(|_| vec![zero; times.len()]),
        gamma_prime,
        error: vec![0.0; times.len()],
        evaluations: 0,
        rates: None,
    };
    decay_rates(table, &dressed_interaction_coefficients(params))
}
