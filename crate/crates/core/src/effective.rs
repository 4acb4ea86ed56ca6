//! Driven chirality qubit in the frame rotating with the electric drive, and the
//! dressed basis that diagonalizes it.
//!
//! In the chirality basis `{|chi+, 1/2>, |chi-, 1/2>}` the rotating-frame
//! Hamiltonian is `(Delta_so C_z + d eps C_x) / 2` with Pauli-normalized
//! `C_x = C_+ + C_-`, so that its splitting is
//! `omega_s = sqrt(Delta_so^2 + d^2 eps^2)`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use thiserror::Error;

pub type Op2 = Matrix2<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EffectiveError {
    #[error("dressed splitting omega_s vanishes (resonant drive with zero field)")]
    ZeroSplitting,
    #[error("invalid qubit parameter: {0}")]
    Invalid(&'static str),
}

/// Parameters of the driven chirality qubit plus the derived dressed-basis
/// quantities. Construct with [`make_params`] or [`ChiralQubitParams::from_ratios`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralQubitParams {
    pub omega_so: f64,
    pub omega: f64,
    pub eps: f64,
    pub d: f64,
    /// Drive phase; every scenario uses 0.
    pub beta: f64,
    pub delta_so: f64,
    pub omega_s: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub delta_zero: f64,
}

pub fn make_params(
    omega_so: f64,
    omega: f64,
    eps: f64,
    d: f64,
    beta: f64,
) -> Result<ChiralQubitParams, EffectiveError> {
    for v in [omega_so, omega, eps, d, beta] {
        if !v.is_finite() {
            return Err(EffectiveError::Invalid("non-finite value"));
        }
    }
    if eps < 0.0 {
        return Err(EffectiveError::Invalid("field magnitude eps must be >= 0"));
    }
    if d < 0.0 {
        return Err(EffectiveError::Invalid("dipole strength d must be >= 0"));
    }
    let delta_so = omega_so - omega;
    let coupling = d * eps;
    let omega_s = delta_so.hypot(coupling);
    if omega_s == 0.0 {
        return Err(EffectiveError::ZeroSplitting);
    }
    // The smaller weight is written as c^2 / (2 w_s (w_s + |D|)) so it keeps
    // full relative precision when the drive is weak.
    let small = 0.5 * coupling * coupling / (omega_s * (omega_s + delta_so.abs()));
    let (delta_plus, delta_minus) = if delta_so >= 0.0 {
        (1.0 - small, small)
    } else {
        (small, 1.0 - small)
    };
    // Equal to sqrt(delta_plus * delta_minus) without the cancellation.
    let delta_zero = 0.5 * coupling / omega_s;
    Ok(ChiralQubitParams {
        omega_so,
        omega,
        eps,
        d,
        beta,
        delta_so,
        omega_s,
        delta_plus,
        delta_minus,
        delta_zero,
    })
}

impl ChiralQubitParams {
    /// Parameters from the dressed splitting `omega_s`, the ratio
    /// `Delta_so / omega_s` and the drive frequency, with `d = 1`.
    pub fn from_ratios(omega_s: f64, delta_ratio: f64, omega: f64) -> Result<Self, EffectiveError> {
        if !(-1.0..=1.0).contains(&delta_ratio) {
            return Err(EffectiveError::Invalid("Delta_so/omega_s must lie in [-1, 1]"));
        }
        if !(omega_s > 0.0) {
            return Err(EffectiveError::ZeroSplitting);
        }
        let delta_so = delta_ratio * omega_s;
        let coupling = omega_s * (1.0 - delta_ratio * delta_ratio).sqrt();
        make_params(omega + delta_so, omega, coupling, 1.0, 0.0)
    }

    pub fn delta_ratio(&self) -> f64 {
        self.delta_so / self.omega_s
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Pauli-style chirality operators in a two-level basis (upper level first).
pub mod ops {
    use super::{c, Op2};

    pub fn identity() -> Op2 {
        Op2::identity()
    }
    pub fn sigma_z() -> Op2 {
        Op2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
    }
    pub fn sigma_x() -> Op2 {
        Op2::new(c(0.0), c(1.0), c(1.0), c(0.0))
    }
    pub fn sigma_y() -> Op2 {
        let i = num_complex::Complex64::i();
        Op2::new(c(0.0), -i, i, c(0.0))
    }
    /// `|upper><lower|`
    pub fn raising() -> Op2 {
        Op2::new(c(0.0), c(1.0), c(0.0), c(0.0))
    }
    /// `|lower><upper|`
    pub fn lowering() -> Op2 {
        Op2::new(c(0.0), c(0.0), c(1.0), c(0.0))
    }
}

/// Rotating-frame Hamiltonian in the chirality basis.
pub fn chirality_hamiltonian(params: &ChiralQubitParams) -> Op2 {
    (ops::sigma_z() * c(params.delta_so) + ops::sigma_x() * c(params.d * params.eps)) * c(0.5)
}

/// Unitary whose columns are `|psi+>` and `|psi->` in the chirality basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedBasis {
    pub transformation: Op2,
}

impl DressedBasis {
    pub fn new(params: &ChiralQubitParams) -> Self {
        let a = params.delta_plus.sqrt();
        let b = params.delta_minus.sqrt();
        // |psi+> = ( a, b), |psi-> = (-b, a); det U = 1.
        Self {
            transformation: Op2::new(c(a), c(-b), c(b), c(a)),
        }
    }

    /// `U^dag A U`: an operator from the chirality basis to the dressed basis.
    pub fn to_dressed(&self, op: &Op2) -> Op2 {
        self.transformation.adjoint() * op * self.transformation
    }

    pub fn to_chirality(&self, op: &Op2) -> Op2 {
        self.transformation * op * self.transformation.adjoint()
    }

    pub fn psi_plus(&self) -> Vector2<Complex64> {
        self.transformation.column(0).into()
    }

    pub fn psi_minus(&self) -> Vector2<Complex64> {
        self.transformation.column(1).into()
    }
}

/// `diag(+omega_s/2, -omega_s/2)` in the `|up>, |down>` dressed ordering.
pub fn dressed_hamiltonian(params: &ChiralQubitParams) -> Matrix2<f64> {
    Matrix2::new(0.5 * params.omega_s, 0.0, 0.0, -0.5 * params.omega_s)
}

/// Coefficients of the dressed operators in the bath-coupled system operator
/// `B^dag = c_z Cz + c_plus e^{i w_s t} C+ + c_minus e^{-i w_s t} C-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedCoefficients {
    pub c_z: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

pub fn dressed_interaction_coefficients(params: &ChiralQubitParams) -> DressedCoefficients {
    DressedCoefficients {
        c_z: params.delta_zero,
        c_plus: params.delta_plus,
        c_minus: -params.delta_minus,
    }
}
