//! Ohmic bath: spectral density, correlation kernels, frequency quadrature,
//! complex log-Gamma and the splitting influence weights.

pub mod gamma;
pub mod kernels;
pub mod quadrature;
pub mod weights;

pub use gamma::log_gamma_complex;
pub use kernels::{
    amplitude_kernels, ohmic_j, phase_kernel, BathSamples, KernelKind, KernelTable, SpectralDensity,
};
pub use weights::{splitting_weights, splitting_weights_with, SinArgument, WeightMatrix, WeightOptions};
