//! SIC-POVM probability representation of finite-dimensional quantum mechanics.
//!
//! States are mapped to probability vectors over the outcomes of a
//! symmetric informationally complete measurement, and the Born rule and
//! unitary evolution are evaluated directly on those vectors. The
//! conventional density-matrix calculus in [`quantum`] is kept alongside
//! as the reference every probability-space computation is checked against.

pub mod dualtrack;
pub mod error;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod search;
pub mod sic;
pub mod urgleichung;

pub use error::{Error, Result};
