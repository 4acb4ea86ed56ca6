//! Polarization, von Neumann entropy, Bloch-sphere states and the pointer-state
//! scan.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::bath::BathConfig;
use crate::dynamics::{self, DensityMatrix2, DynamicsError, PropagationOptions, RateSchedule};
use crate::effective::{c, ChiralQubitParams, Op2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("invalid state: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    InvalidState { eigenvalue: f64, tolerance: f64 },
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// `Tr[rho C_z] = rho_00 - rho_11`.
pub fn polarization(rho: &DensityMatrix2) -> f64 {
    let m = rho.matrix();
    m[(0, 0)].re - m[(1, 1)].re
}

/// `-sum u ln u` with `0 ln 0 = 0`; negative eigenvalues are clamped to zero.
pub fn entropy_from_eigenvalues(eigenvalues: [f64; 2]) -> f64 {
    eigenvalues
        .iter()
        .map(|&u| if u > 0.0 { -u * u.ln() } else { 0.0 })
        .sum::<f64>()
        .clamp(0.0, std::f64::consts::LN_2)
}

/// Von Neumann entropy in nats. Eigenvalues down to `-tolerance` are treated as
/// zero; anything more negative is rejected.
pub fn von_neumann_entropy(rho: &DensityMatrix2, tolerance: f64) -> Result<f64, ObservableError> {
    let eigs = rho.eigenvalues();
    if eigs[0] < -tolerance {
        return Err(ObservableError::InvalidState {
            eigenvalue: eigs[0],
            tolerance,
        });
    }
    Ok(entropy_from_eigenvalues(eigs))
}

/// `Tr[rho^2]`.
pub fn purity(rho: &DensityMatrix2) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub theta: f64,
    pub phi: f64,
}

impl BlochState {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        }
    }

    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// `(I + V.C) / 2` with `C = (sigma_x, sigma_y, sigma_z)` in the dressed basis.
pub fn bloch_to_state(b: &BlochState) -> DensityMatrix2 {
    let [x, y, z] = b.vector();
    let off = Complex64::new(x, -y) * 0.5;
    let m = Op2::new(c(0.5 * (1.0 + z)), off, off.conj(), c(0.5 * (1.0 - z)));
    DensityMatrix2::from_matrix_unchecked(m)
}

/// Bloch vector and purity of a state.
pub fn state_to_bloch(rho: &DensityMatrix2) -> ([f64; 3], f64) {
    let m = rho.matrix();
    let off = m[(1, 0)];
    let v = [2.0 * off.re, 2.0 * off.im, m[(0, 0)].re - m[(1, 1)].re];
    (v, purity(rho))
}

/// How a trajectory's entropy is reduced to one score per initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointerMeasure {
    /// Trapezoidal time average over the horizon.
    Mean,
    Max,
    Final,
}

impl PointerMeasure {
    pub fn label(self) -> &'static str {
        match self {
            PointerMeasure::Mean => "mean",
            PointerMeasure::Max => "max",
            PointerMeasure::Final => "final",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mean" => Some(PointerMeasure::Mean),
            "max" => Some(PointerMeasure::Max),
            "final" => Some(PointerMeasure::Final),
            _ => None,
        }
    }

    pub fn reduce(self, times: &[f64], entropy: &[f64]) -> f64 {
        match self {
            PointerMeasure::Mean => {
                let span = times[times.len() - 1] - times[0];
                if span <= 0.0 {
                    return entropy[0];
                }
                let area: f64 = times
                    .windows(2)
                    .zip(entropy.windows(2))
                    .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
                    .sum();
                area / span
            }
            PointerMeasure::Max => entropy.iter().cloned().fold(0.0, f64::max),
            PointerMeasure::Final => entropy[entropy.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointerScanOptions {
    pub theta_grid: Vec<f64>,
    /// Azimuths to scan; the default is `[0]`.
    pub phi_grid: Vec<f64>,
    pub measure: PointerMeasure,
    /// Output times; the last one is the horizon.
    pub times: Vec<f64>,
    pub propagation: PropagationOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointerScanResult {
    /// One row per `(theta, phi)` in scan order, phi varying fastest.
    pub states: Vec<BlochState>,
    pub scores: Vec<f64>,
    pub theta_p: f64,
    pub phi_p: f64,
    pub horizon: f64,
    pub measure: PointerMeasure,
}

/// Scores must agree to this absolute tolerance to count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the smallest score; ties go to the earliest entry.
pub fn argmin_with_ties(scores: &[f64]) -> Option<usize> {
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    scores.iter().position(|&s| s <= min + TIE_TOLERANCE)
}

/// Scan initial Bloch states against a precomputed rate schedule.
pub fn pointer_scan_with(
    schedule: &RateSchedule,
    params: &ChiralQubitParams,
    opts: &PointerScanOptions,
) -> Result<PointerScanResult, ObservableError> {
    if opts.theta_grid.is_empty() || opts.phi_grid.is_empty() {
        return Err(ObservableError::InvalidScan("empty theta or phi grid".into()));
    }
    if opts.times.len() < 2 {
        return Err(ObservableError::InvalidScan("need at least two output times".into()));
    }
    let states: Vec<BlochState> = opts
        .theta_grid
        .iter()
        .flat_map(|&th| opts.phi_grid.iter().map(move |&ph| BlochState::new(th, ph)))
        .collect();
    let scores = states
        .par_iter()
        .map(|b| {
            let traj = dynamics::propagate_with(
                &bloch_to_state(b),
                schedule,
                params.omega_s,
                &opts.times,
                &opts.propagation,
            )?;
            Ok(opts.measure.reduce(&traj.times, &traj.entropy))
        })
        .collect::<Result<Vec<f64>, ObservableError>>()?;
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(ObservableError::InvalidScan(format!("non-finite score {bad}")));
    }
    let best = argmin_with_ties(&scores).expect("nonempty scores");
    Ok(PointerScanResult {
        theta_p: states[best].theta,
        phi_p: states[best].phi,
        states,
        scores,
        horizon: opts.times[opts.times.len() - 1],
        measure: opts.measure,
    })
}

/// Computes the kernels for `bath` once, then scans.
pub fn pointer_scan(
    bath: &BathConfig,
    params: &ChiralQubitParams,
    opts: &PointerScanOptions,
) -> Result<PointerScanResult, ObservableError> {
    let horizon = opts.times.last().copied().unwrap_or(0.0);
    let (schedule, _) = dynamics::build_schedule(bath, params, &opts.times, horizon, &opts.propagation)?;
    pointer_scan_with(&schedule, params, opts)
}

/// `n` evenly spaced points on `[0, pi]`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| PI * (k as f64 / (n - 1) as f64)).collect(),
    }
}
