//! Tunneling spectra of a large spin in a symmetric crystal field.
//!
//! A spin J whose classical energy has N degenerate minima related by a point
//! group tunnels between them. The low-energy multiplet is then described by an
//! N×N hopping matrix whose phases are Berry phases, i.e. J times the solid
//! angle enclosed by closed tunneling loops. This crate builds those effective
//! models, checks them against exact diagonalization of the full (2J+1)-dimensional
//! crystal-field Hamiltonian, classifies the multiplets with double-group
//! representation theory, evaluates WKB actions and computes thermodynamic and
//! dynamic observables.
//!
//! Modules, bottom up:
//! - [`spin_algebra`]: spin matrices, Stevens operators, cubic and icosahedral invariants.
//! - [`geometry`]: the symmetric site configurations C(G,p) with edges and plaquettes.
//! - [`berry_effective`]: gauge fixing, effective Hamiltonians, closed-form spectra.
//! - [`group_rep`]: double-group character tables and irrep decomposition.
//! - [`exact_spectrum`]: dense diagonalization, multiplet detection, φ sweeps.
//! - [`semiclassics`]: imaginary-time geodesic actions.
//! - [`observables`]: susceptibility, magnetization oscillations, order-of-magnitude estimators.

pub mod berry_effective;
pub mod error;
pub mod exact_spectrum;
pub mod geometry;
pub mod group_rep;
pub mod linalg;
pub mod observables;
pub mod semiclassics;
pub mod spin_algebra;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use linalg::CMatrix;
pub use spin_algebra::SpinValue;
