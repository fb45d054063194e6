//! Bound-state energies, quantum Hamilton–Jacobi fields and the WKB residual
//! for five one-dimensional benchmark potentials.

pub mod action;
pub mod eigensolver;
pub mod error;
pub mod formulas;
pub mod numerics;
pub mod potentials;
pub mod qhje;
pub mod tables;

pub use action::{classical_action, corrected_energy, residual_route_b, wkb_energy, CaseTag, ResidualReport};
pub use error::{Error, Result};
pub use potentials::{Family, PotentialModel, TurningPair};
