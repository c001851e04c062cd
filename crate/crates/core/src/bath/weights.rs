//! Pairwise influence weights of the splitting sum.
//!
//! A sign sequence q ∈ {±1}^N carries the bath weight exp(Σ_{m,n} q_m q_n W_{mn}),
//! the double sum running over all ordered pairs including m = n. W depends on
//! |m − n| only, so N integrals give the whole matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{omega_coth, SpectralDensity};
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::noiseless::Temperature;

/// Which time enters the sin² factor of the finite-temperature exponent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SinArgument {
    /// sin²(ωΔt/2): consistent with the zero-temperature product formula.
    #[default]
    Step,
    /// sin²(ωt/2) with t = NΔt, the literal reading kept for comparison.
    TotalTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightOptions {
    pub sin_argument: SinArgument,
    /// Lower limit of the frequency integral.
    pub lower: f64,
    /// Evaluate the zero-temperature case by quadrature instead of the closed form.
    pub force_quadrature: bool,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions {
            sin_argument: SinArgument::Step,
            lower: 0.0,
            force_quadrature: false,
        }
    }
}

/// Symmetric Toeplitz N×N matrix stored by its first row.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    row: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_toeplitz(row: Vec<f64>) -> Self {
        assert!(!row.is_empty(), "weight matrix needs N >= 1");
        WeightMatrix { row }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_toeplitz(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.row.len()
    }

    /// W_d for lag d = |m − n|.
    pub fn lag(&self, d: usize) -> f64 {
        self.row[d]
    }

    pub fn toeplitz(&self) -> &[f64] {
        &self.row
    }

    #[inline]
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.row[m.abs_diff(n)]
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n).map(|m| (0..n).map(|k| self.entry(m, k)).collect()).collect()
    }

    /// Σ_{m,n} q_m q_n W_{mn} for a sequence of ±1.
    pub fn log_weight(&self, q: &[i8]) -> f64 {
        assert_eq!(q.len(), self.n());
        let mut s = 0.0;
        for (m, &qm) in q.iter().enumerate() {
            for (k, &qk) in q.iter().enumerate() {
                s += (qm * qk) as f64 * self.entry(m, k);
            }
        }
        s
    }
}

/// Closed zero-temperature lag weight −η ln{1 + [2u + 1 − 2d²]/(u + d²)²}, u = (ω_cΔt)^{−2}.
pub fn zero_temperature_weight(d: usize, dt: f64, sd: &SpectralDensity) -> f64 {
    let u = (sd.omega_c * dt).powi(-2);
    let d2 = (d * d) as f64;
    -sd.eta * (1.0 + (2.0 * u + 1.0 - 2.0 * d2) / (u + d2).powi(2)).ln()
}

/// −8η ∫ e^{−ω/ω_c} cos(dωΔt) coth(βω/2) sin²(ωa/2)/ω dω, with a = Δt or NΔt.
pub fn weight_integral(d: usize, n: usize, dt: f64, sd: &SpectralDensity, temp: Temperature, opts: &WeightOptions) -> Result<f64> {
    let a = match opts.sin_argument {
        SinArgument::Step => dt,
        SinArgument::TotalTime => n as f64 * dt,
    };
    let lag = d as f64 * dt;
    let wc = sd.omega_c;
    let v = integrate(
        |w| {
            let s = (0.5 * w * a).sin() / w;
            [(-w / wc).exp() * omega_coth(w, temp) * (w * lag).cos() * s * s]
        },
        opts.lower,
        sd.upper(),
        sd.panels(lag + a),
    )?;
    Ok(-8.0 * sd.eta * v[0])
}

pub fn splitting_weights(n: usize, dt: f64, sd: &SpectralDensity, temp: Temperature) -> Result<WeightMatrix> {
    splitting_weights_with(n, dt, sd, temp, &WeightOptions::default())
}

pub fn splitting_weights_with(
    n: usize,
    dt: f64,
    sd: &SpectralDensity,
    temp: Temperature,
    opts: &WeightOptions,
) -> Result<WeightMatrix> {
    if n == 0 {
        return Err(Error::Domain("splitting weights need N >= 1".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Range { name: "dt", value: dt });
    }
    if sd.eta == 0.0 {
        return Ok(WeightMatrix::zeros(n));
    }
    let closed = temp == Temperature::Zero && opts.sin_argument == SinArgument::Step && !opts.force_quadrature;
    let row = if closed {
        (0..n).map(|d| zero_temperature_weight(d, dt, sd)).collect()
    } else {
        (0..n)
            .into_par_iter()
            .map(|d| weight_integral(d, n, dt, sd, temp, opts))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(WeightMatrix::from_toeplitz(row))
}
