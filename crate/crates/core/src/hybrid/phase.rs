//! Phase damping (bath coupled through σ_z).

use super::memory::{memory_integral, rk4_linear, LinearCoef, Sampled};
use super::{assemble_with, Interaction, RState, Scenario, Trajectory};
use crate::bath::gamma::log_gamma_complex;
use crate::bath::kernels::{omega_coth, BathSamples, KernelKind, SpectralDensity};
use crate::bath::quadrature::integrate;
use crate::error::Result;
use crate::noiseless::{Component, OmegaBranch, Temperature};
use crate::qubit::{pauli, Mat2, C64, I};

/// ln of the pure-dephasing factor, −4η ∫ e^{−ω/ω_c} coth(βω/2) (1 − cos ωt)/ω dω,
/// by direct frequency quadrature. Valid at any temperature including T = 0.
pub fn pd_log_decoherence_quadrature(t: f64, sd: &SpectralDensity, temp: Temperature) -> Result<f64> {
    if sd.eta == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let wc = sd.omega_c;
    let v = integrate(
        |w| {
            let s = (0.5 * w * t).sin() / w;
            [(-w / wc).exp() * omega_coth(w, temp) * 2.0 * s * s]
        },
        0.0,
        sd.upper(),
        sd.panels(t),
    )?;
    Ok(-4.0 * sd.eta * v[0])
}

/// The same exponent through Γ functions, 2η ln of
/// |Γ(a+iy)|²|Γ(a+1+iy)|² / (Γ(a)²Γ(a+1)²), a = 1/(ω_cβ), y = t/β.
pub fn pd_log_decoherence_gamma(t: f64, sd: &SpectralDensity, beta: f64) -> Result<f64> {
    let a = 1.0 / (sd.omega_c * beta);
    let y = t / beta;
    let lg = |x: f64, y: f64| log_gamma_complex(C64::new(x, y)).map(|z| z.re);
    let ratio = 2.0 * (lg(a, y)? - lg(a, 0.0)?) + 2.0 * (lg(a + 1.0, y)? - lg(a + 1.0, 0.0)?);
    Ok(2.0 * sd.eta * ratio)
}

/// σ_z measurement: populations frozen, coherence multiplied by the
/// pure-dephasing factor and the noiseless decay.
pub fn solve_pd_z(sc: &Scenario) -> Result<Trajectory> {
    sc.require(Interaction::PhaseDamping, Component::Z)?;
    let warnings = sc.check()?;
    let sd = SpectralDensity::from(&sc.params);
    let times = sc.times();
    let r0 = RState::from_density(&sc.rho0);
    let r = times
        .iter()
        .map(|&t| {
            let ln_d = match sc.params.temperature {
                Temperature::Zero => pd_log_decoherence_quadrature(t, &sd, Temperature::Zero)?,
                Temperature::Beta(b) => pd_log_decoherence_gamma(t, &sd, b)?,
            };
            let d = ln_d.exp();
            Ok(RState {
                r12: r0.r12 * d,
                r21: r0.r21 * d,
                ..r0
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_with(&r, &times, &sc.params, Component::Z, warnings))
}

/// σ_x measurement: (R₁₂, R₂₁) obey dR/dt = −4 ∫₀^t ReC(t−t') N(t,t') dt' R with
/// N = e^{−Bt} σ_z e^{B(t−t')} σ_z e^{Bt'}, which is the matrix
/// [[Q₁, Q₂], [Q₂*, Q₁*]] built from the noiseless coherence propagator.
pub fn solve_pd_x(sc: &Scenario) -> Result<Trajectory> {
    sc.require(Interaction::PhaseDamping, Component::X)?;
    let warnings = sc.check()?;
    let p = &sc.params;
    let sd = SpectralDensity::from(p);
    let n = sc.n_steps;
    let dt = sc.dt();
    let h = 0.5 * dt;
    let m = 2 * n;
    let samples = BathSamples::build(&sd, p.temperature, h, m)?;
    let branch = OmegaBranch::from_params(p);
    let g = p.rate();
    let bmat = Mat2::new(I * (-2.0 * p.omega0), C64::new(g, 0.0), C64::new(g, 0.0), I * (2.0 * p.omega0));
    let e = Sampled::new(m + 1, h, |s| Mat2::identity().scale(branch.cosh(s)) + bmat.scale(branch.sinhc(s)));
    let sz = pauli::sigma_z();
    let coef: Vec<LinearCoef> = (0..=m)
        .map(|j| {
            let left = e.at(-(j as isize)) * sz;
            let inner: Mat2 = memory_integral(j, h, |i| {
                let k = j as isize - i as isize;
                let c = samples.kernel(KernelKind::PhaseDamping, k).re;
                (e.at(k) * sz * e.at(i as isize)) * c
            });
            LinearCoef {
                a: (left * inner) * -4.0,
                b: [C64::new(0.0, 0.0); 2],
            }
        })
        .collect();
    let r0 = RState::from_density(&sc.rho0);
    let ys = rk4_linear([r0.r12, r0.r21], dt, &coef);
    let r: Vec<RState> = ys
        .iter()
        .map(|y| RState {
            r11: r0.r11,
            r12: y[0],
            r21: y[1],
        })
        .collect();
    Ok(assemble_with(&r, &sc.times(), p, Component::X, warnings))
}
