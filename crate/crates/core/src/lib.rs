//! Pseudo-Hermitian analysis of finite-dimensional, possibly nondiagonalizable
//! complex operators.

pub mod antisym;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod jordan;
pub mod numfield;
pub mod pseudoherm;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
pub use numfield::{ComplexMatrix, TolerancePolicy, C64};
