//! Local unitary invariants and canonical forms for three fermions with six single-particle modes
//! and for three qubits.

#![allow(clippy::needless_range_loop)]

pub mod canonform;
pub mod error;
pub mod exterior;
pub mod gme;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod rdm;
pub mod region;
pub mod scalar;

pub use error::{Error, Result};
pub use exterior::{ThreeFermionState, ThreeQubitState, UnitaryMatrix6, W6Point};
pub use scalar::{Ext, Real, C64};
