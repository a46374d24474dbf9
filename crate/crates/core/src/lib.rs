//! Numerical toolkit for measures of macroscopic quantumness.
//!
//! Bosonic states live in truncated Fock spaces ([`fock`]), qubit ensembles in
//! dense spin spaces ([`spin`]). Standard states and preparation schemes are in
//! [`states`], characteristic-function machinery in [`phase_space`], and the
//! individual measures in [`measures`].
//!
//! Quadratures follow `x = a + a^dagger`, so a coherent state has unit variance.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod optim;
pub mod phase_space;
pub mod report;
pub mod spin;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64 as C64;
pub use report::MeasureReport;
