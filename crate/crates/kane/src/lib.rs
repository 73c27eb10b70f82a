//! Pulse-level simulator and gate-calibration toolkit for the Kane
//! phosphorus-in-silicon two-qubit model.
//!
//! The crate is organized around the physical pipeline:
//!
//! * [`model`] — physical constants and Hamiltonian constructors for the
//!   electron–nuclear spin pair (4-dim per site, 16-dim for two sites),
//! * [`spectra`] — closed-form eigensystems (single site, symmetry blocks of
//!   the two-qubit Hamiltonian, rotating frame) cross-checked against a dense
//!   Jacobi eigensolver,
//! * [`profiles`] — the piecewise pulse shapes for the hyperfine and exchange
//!   controls and the adiabatic phase integrals over them,
//! * [`propagate`] — time-ordered Schrödinger propagation and the rotating
//!   frame transform,
//! * [`design`] — gate calibration solvers (Z rotation, X rotation timing,
//!   controlled-Z),
//! * [`analysis`] — fidelity, thermal-state, and logical-gate analyses.
//!
//! The numeric substrate ([`numeric`]) is generic over the scalar type; the
//! physics layer works in the concrete [`Real`]/[`C64`] aliases below with
//! energies in meV and times in ps.

pub mod analysis;
pub mod design;
pub mod error;
pub mod model;
pub mod numeric;
pub mod profiles;
pub mod propagate;
pub mod spectra;
pub mod units;

/// Scalar type used by the physics layer.
pub type Real = f64;
/// Complex amplitude type used by the physics layer.
pub type C64 = num_complex::Complex<Real>;

pub use error::KaneError;
pub use model::{ModelParams, Operator, StateVector};
