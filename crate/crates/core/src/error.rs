use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not positive: |rho12|^2 = {coherence_sq} exceeds rho11*(1-rho11) = {bound}")]
    Positivity { coherence_sq: f64, bound: f64 },

    #[error("{name} = {value} is outside its allowed range")]
    Range { name: &'static str, value: f64 },

    #[error("basis mismatch: expected {expected}, found {found}")]
    Basis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("log-gamma pole at z = {0}")]
    Pole(f64),

    #[error("step size {dt} exceeds the stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    #[error("splitting run with N = {0} exceeds the cap of {max}", max = crate::splitting::MAX_STEPS)]
    Cap(usize),

    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
