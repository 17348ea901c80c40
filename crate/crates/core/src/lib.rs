//! Simulation and calibration toolkit for single-step GHZ-state generation
//! with superconducting qubits in two coupled microwave cavities.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: dense/sparse complex operators on composite
//!   qubit ⊗ truncated-boson spaces, Kronecker products and exponentials.
//! - [`device`]: hardware and drive parameter sets, normal modes and the
//!   rotating-wave validity check.
//! - [`bessel`] and [`calibration`]: the drive-homogenisation solver that
//!   equalises every effective qubit-cavity coupling.
//! - [`hamiltonian`]: the full time-dependent interaction-picture model, the
//!   single-mode effective model, the collective reduced model, its closed-form
//!   propagator, and the dissipation channels.
//! - [`dynamics`]: fixed-step RK4 / adaptive integration of the Lindblad and
//!   Schrödinger equations with observable recording.
//! - [`ghz`]: analytic GHZ targets, frame handling and fidelities.
//!
//! All numerics are generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix the double-precision types used by
//! the command-line front end.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod calibration;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod ghz;
pub mod hamiltonian;
pub mod quantum;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

pub type Operator = quantum::OperatorMatrix<f64>;
pub type Ket = quantum::StateVector<f64>;
pub type Density = quantum::DensityMatrix<f64>;
pub type Sparse = quantum::SparseMatrix<f64>;

pub type Device = device::DeviceParams<f64>;
pub type Drive = device::DriveParams<f64>;
pub type Validity = device::ValidityReport<f64>;
pub type Calibration = calibration::CalibrationResult<f64>;

pub type Hamiltonian = hamiltonian::TermHamiltonian<f64>;
pub type Collapse = hamiltonian::CollapseSet<f64>;
pub type Propagator = hamiltonian::AnalyticPropagator<f64>;

pub type Integration = dynamics::IntegrationConfig<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type Ghz = ghz::GhzTarget<f64>;

/// Single-precision operator, mostly useful for quick exploratory runs.
pub type Operator32 = quantum::OperatorMatrix<f32>;
pub type Ket32 = quantum::StateVector<f32>;
