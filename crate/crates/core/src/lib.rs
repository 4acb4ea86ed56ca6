//! Finite-temperature, non-Markovian decoherence of an electrically driven
//! chirality qubit (the low-energy doublet of a spin-1/2 triangle) coupled to a
//! bosonic bath.
//!
//! The pipeline runs bottom-up:
//!
//! * [`microscopic`]: exact diagonalization of the trimer and the spin-orbit
//!   splitting of the chirality doublet.
//! * [`effective`]: the driven two-level Hamiltonian and its dressed basis.
//! * [`bath`]: spectral densities, memory kernels and decay rates.
//! * [`dynamics`]: second-order time-convolutionless propagation.
//! * [`observables`]: polarization, von Neumann entropy and pointer states.
//! * [`oracle`]: exact evolution with a few discrete bath modes.

pub mod bath;
pub mod dynamics;
pub mod effective;
pub mod interp;
pub mod microscopic;
pub mod observables;
pub mod oracle;
pub mod quadrature;

pub use bath::{BathConfig, BathError, Channel, KernelTable, SpectralDensity};
pub use dynamics::{DensityMatrix2, DynamicsError, PropagationOptions, RateSchedule, Trajectory};
pub use effective::{make_params, ChiralQubitParams, EffectiveError};
pub use microscopic::{TrimerParams, TrimerSpectrum};
pub use observables::{BlochState, PointerMeasure, PointerScanResult};
