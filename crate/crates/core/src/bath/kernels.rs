//! Ohmic spectral density and the bath correlation kernels.
//!
//! Every kernel splits into a temperature-independent vacuum part with a
//! closed form, η ω_c² / (1 − iω_c s)², and a thermal part
//! X(s) = ∫ J(ω) n̄(ω) e^{iωs} dω that needs quadrature:
//!
//! * phase damping   ∫ J [coth(βω/2) cos ωs + i sin ωs] = vacuum + 2 Re X
//! * emission        ∫ J (n̄ + 1) e^{iωs}                = vacuum + X
//! * absorption      ∫ J n̄ e^{−iωs}                     = conj X

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::noiseless::Temperature;
use crate::qubit::C64;

/// Frequency cutoff of every bath integral, in units of ω_c.
pub const OMEGA_MAX: f64 = 40.0;
const BOSE_SERIES: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub eta: f64,
    pub omega_c: f64,
}

impl SpectralDensity {
    pub fn new(eta: f64, omega_c: f64) -> Self {
        SpectralDensity { eta, omega_c }
    }

    #[inline]
    pub fn j(&self, omega: f64) -> f64 {
        self.eta * omega * (-omega / self.omega_c).exp()
    }

    pub(crate) fn upper(&self) -> f64 {
        OMEGA_MAX * self.omega_c
    }

    pub(crate) fn panels(&self, s: f64) -> usize {
        16usize.max((4.0 * s.abs() * self.omega_c).ceil() as usize)
    }
}

impl From<&crate::noiseless::ModelParams> for SpectralDensity {
    fn from(p: &crate::noiseless::ModelParams) -> Self {
        SpectralDensity::new(p.eta, p.omega_c)
    }
}

/// J(ω) = η ω e^{−ω/ω_c}.
pub fn ohmic_j(omega: f64, sd: &SpectralDensity) -> Result<f64> {
    if omega < 0.0 || omega.is_nan() {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(sd.j(omega))
}

/// ω n̄(ω) = ω / (e^{βω} − 1), finite at ω = 0.
#[inline]
pub fn omega_nbar(omega: f64, temp: Temperature) -> f64 {
    match temp {
        Temperature::Zero => 0.0,
        Temperature::Beta(b) => {
            let x = b * omega;
            if x < BOSE_SERIES {
                (1.0 - 0.5 * x + x * x / 12.0) / b
            } else {
                omega / x.exp_m1()
            }
        }
    }
}

/// ω coth(βω/2) = ω (2n̄ + 1), tending to 2/β at ω = 0.
#[inline]
pub fn omega_coth(omega: f64, temp: Temperature) -> f64 {
    2.0 * omega_nbar(omega, temp) + omega
}

/// Vacuum part η ω_c² / (1 − iω_c s)².
pub fn vacuum_kernel(s: f64, sd: &SpectralDensity) -> C64 {
    let d = C64::new(1.0, -sd.omega_c * s);
    sd.eta * sd.omega_c * sd.omega_c / (d * d)
}

/// Thermal part X(s) = ∫ J(ω) n̄(ω) e^{iωs} dω; zero at T = 0.
pub fn thermal_kernel(s: f64, sd: &SpectralDensity, temp: Temperature) -> Result<C64> {
    if temp == Temperature::Zero || sd.eta == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let wc = sd.omega_c;
    let v = integrate(
        |w| {
            let a = sd.eta * (-w / wc).exp() * omega_nbar(w, temp);
            let (sn, cs) = (w * s).sin_cos();
            [a * cs, a * sn]
        },
        0.0,
        sd.upper(),
        sd.panels(s),
    )?;
    Ok(C64::new(v[0], v[1]))
}

/// ∫ J(ω) [coth(βω/2) cos ωs + i sin ωs] dω.
pub fn phase_kernel(s: f64, sd: &SpectralDensity, temp: Temperature) -> Result<C64> {
    let x = thermal_kernel(s, sd, temp)?;
    Ok(vacuum_kernel(s, sd) + 2.0 * x.re)
}

/// The phase-damping kernel integrated directly with coth in the integrand,
/// from a chosen lower frequency limit.
pub fn phase_kernel_quad(s: f64, sd: &SpectralDensity, temp: Temperature, lower: f64) -> Result<C64> {
    let wc = sd.omega_c;
    let v = integrate(
        |w| {
            let e = sd.eta * (-w / wc).exp();
            let (sn, cs) = (w * s).sin_cos();
            [e * omega_coth(w, temp) * cs, e * w * sn]
        },
        lower,
        sd.upper(),
        sd.panels(s),
    )?;
    Ok(C64::new(v[0], v[1]))
}

/// (ν_em, ν_abs) = (∫ J (n̄+1) e^{iωs} dω, ∫ J n̄ e^{−iωs} dω).
pub fn amplitude_kernels(s: f64, sd: &SpectralDensity, temp: Temperature) -> Result<(C64, C64)> {
    let x = thermal_kernel(s, sd, temp)?;
    Ok((vacuum_kernel(s, sd) + x, x.conj()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    PhaseDamping,
    AmplitudeEmission,
    AmplitudeAbsorption,
}

/// Vacuum and thermal parts sampled at s = kΔt, k = 0..=n. Every kernel kind
/// is read off the same two arrays; negative lags are complex conjugates.
#[derive(Clone, Debug)]
pub struct BathSamples {
    dt: f64,
    vacuum: Vec<C64>,
    thermal: Vec<C64>,
}

impl BathSamples {
    pub fn build(sd: &SpectralDensity, temp: Temperature, dt: f64, n: usize) -> Result<Self> {
        let vacuum = (0..=n).map(|k| vacuum_kernel(k as f64 * dt, sd)).collect();
        let thermal = (0..=n)
            .into_par_iter()
            .map(|k| thermal_kernel(k as f64 * dt, sd, temp))
            .collect::<Result<Vec<_>>>()?;
        Ok(BathSamples { dt, vacuum, thermal })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.vacuum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vacuum.is_empty()
    }

    #[inline]
    fn parts(&self, k: isize) -> (C64, C64) {
        let i = k.unsigned_abs();
        let (v, x) = (self.vacuum[i], self.thermal[i]);
        if k < 0 {
            (v.conj(), x.conj())
        } else {
            (v, x)
        }
    }

    pub fn kernel(&self, kind: KernelKind, k: isize) -> C64 {
        let (v, x) = self.parts(k);
        match kind {
            KernelKind::PhaseDamping => v + 2.0 * x.re,
            KernelKind::AmplitudeEmission => v + x,
            KernelKind::AmplitudeAbsorption => x.conj(),
        }
    }

    /// κ(s) = ∫ J coth(βω/2) e^{iωs} dω = ν_em(s) + conj ν_abs(s).
    pub fn coth_kernel(&self, k: isize) -> C64 {
        let (v, x) = self.parts(k);
        v + 2.0 * x
    }
}

#[derive(Clone, Debug)]
pub struct KernelTable {
    pub dt: f64,
    pub values: Vec<C64>,
    pub kind: KernelKind,
}

impl KernelTable {
    pub fn build(kind: KernelKind, sd: &SpectralDensity, temp: Temperature, dt: f64, n: usize) -> Result<Self> {
        let samples = BathSamples::build(sd, temp, dt, n)?;
        Ok(Self::from_samples(kind, &samples))
    }

    pub fn from_samples(kind: KernelKind, samples: &BathSamples) -> Self {
        let values = (0..samples.len() as isize).map(|k| samples.kernel(kind, k)).collect();
        KernelTable {
            dt: samples.dt(),
            values,
            kind,
        }
    }
}
