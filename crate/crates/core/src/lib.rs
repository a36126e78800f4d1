//! Open-system dynamics of damped harmonic oscillators in the Gaussian
//! sector of a quantum dynamical semigroup.
//!
//! * [`params`]: oscillator, thermal and environment parameters with their
//!   positivity checks.
//! * [`single_mode`]: moments, uncertainty function, degree of quantum
//!   decoherence, density matrices and time scales for one oscillator.
//! * [`two_mode`]: covariance dynamics of two independent oscillators in a
//!   common environment, including the stationary Lyapunov state.
//! * [`separability`]: Simon separability test and the entanglement window
//!   of the asymptotic state.
//!
//! All quantities are dimensionless unless a mass, frequency or `hbar` is
//! set explicitly. Temperature enters only through `C = coth(ħω / 2kT)`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod params;
pub mod separability;
pub mod single_mode;
pub mod two_mode;

pub use error::{Error, Result};
pub use params::{
    build_initial_state, gibbs_coefficients, validate_single_mode, validate_two_mode, Check,
    OscillatorParams, SingleModeEnv, ThermalParams, TwoModeEnvironment, ValidationReport,
};
pub use separability::{
    block_decompose, entanglement_window, is_separable, scan_s, simon_s, simon_special,
    BlockDecomposition, ScanRecord, ScanStatus, Separability, Window, WindowMembership,
};
pub use single_mode::{GaussianState1D, Time};
pub use two_mode::{CovarianceMatrix4, DiffusionMatrix, DriftMatrix, TwoModeDynamics};
