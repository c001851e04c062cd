//! Finite-time measurement of a two-level system coupled to a thermal Ohmic
//! bath: closed-form noiseless propagators, bath correlation kernels, the
//! hybrid master-equation solver, the superoperator-splitting solver and a
//! weak-measurement experiment model.

pub mod bath;
pub mod error;
pub mod experiment;
pub mod hybrid;
pub mod noiseless;
pub mod qubit;
pub mod splitting;

pub use error::{Error, Result};
pub use noiseless::{Component, ModelParams, Temperature};
pub use qubit::{make_density, Basis, DensityMatrix, Mat2, C64};
