//! Gauge-equivalence toolkit for finite-dimensional time-dependent
//! Hamiltonians, with a realification pipeline that turns quantum dynamics
//! into coupled second-order real systems and synthesizes them into passive
//! electrical networks.
//!
//! The crate is organized around four layers:
//!
//! * [`quantum`]: Hamiltonian specifications `H(t) = sum_k f_k(t) H_k`,
//!   state evolution and propagators on uniform time grids.
//! * [`gauge`]: invertible frames `omega(t)` acting by
//!   `H -> omega H omega^-1 + i omega_dot omega^-1`, one-sided and
//!   transitive connector solutions, and transport of states and
//!   propagators between frames.
//! * [`realify`]: the splitting of `i psi_dot = H psi` into coupled and
//!   (when available) decoupled second-order real systems.
//! * [`network`]: synthesis of those real systems into RLC ladder networks,
//!   netlist emission, simulation, and the quantum-to-circuit round trip.
//!
//! The command-line surface in [`commands`] wires scenarios (JSON
//! descriptions of a generator pair, grid and initial state) through these
//! layers and writes CSV paths plus a machine-readable report.

pub mod error;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod quantum;
pub mod sample;

pub mod gauge;
pub mod network;
pub mod realify;

pub mod csvout;
pub mod report;
pub mod scenario;

pub mod commands;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use linalg::{CMatrix, CVector, RMatrix, RVector};
