//! Amplitude damping (bath coupled through σ₊, σ₋).
//!
//! Kernels: ν_em(τ) = ∫J(n̄+1)e^{iωτ}, ν_abs(τ) = ∫J n̄ e^{−iωτ} and
//! κ(τ) = ∫J coth(βω/2) e^{iωτ} = ν_em(τ) + conj ν_abs(τ).

use super::memory::{memory_integral, rk4_linear, LinearCoef, Sampled};
use super::{assemble_with, to_measured_basis, Interaction, RState, Scenario, Trajectory, SOLVER_ID};
use crate::bath::kernels::{BathSamples, KernelKind, SpectralDensity};
use crate::error::Result;
use crate::noiseless::{Component, OmegaBranch};
use crate::qubit::{DensityMatrix, Mat2, C64, I, ZERO};

fn bath_samples(sc: &Scenario) -> Result<(BathSamples, f64)> {
    let h = 0.5 * sc.dt();
    let sd = SpectralDensity::from(&sc.params);
    Ok((BathSamples::build(&sd, sc.params.temperature, h, 2 * sc.n_steps)?, h))
}

/// σ_z measurement.
///
/// dR₁₁/dt = 2(1 − R₁₁) g(t) − 2R₁₁ l(t) with
/// g(t) = ∫₀^t Re[e^{2iω₀τ} ν_abs(τ)] e^{−2λ²τ} dτ and
/// l(t) = ∫₀^t Re[e^{2iω₀τ} conj ν_em(τ)] e^{−2λ²τ} dτ;
/// R₁₂(t) = R₁₂(0) exp{−∫₀^t (t − τ) conj κ(τ) e^{(2λ² + 2iω₀)τ} dτ}.
pub fn solve_ad_z(sc: &Scenario) -> Result<Trajectory> {
    sc.require(Interaction::AmplitudeDamping, Component::Z)?;
    let warnings = sc.check()?;
    let p = &sc.params;
    let (samples, h) = bath_samples(sc)?;
    let m = 2 * sc.n_steps;
    let g2 = p.rate();
    let rot = |i: usize| {
        let tau = i as f64 * h;
        C64::new(0.0, 2.0 * p.omega0 * tau).exp() * (-2.0 * g2 * tau).exp()
    };
    let gain: Vec<f64> = (0..=m)
        .map(|i| (rot(i) * samples.kernel(KernelKind::AmplitudeAbsorption, i as isize)).re)
        .collect();
    let loss: Vec<f64> = (0..=m)
        .map(|i| (rot(i) * samples.kernel(KernelKind::AmplitudeEmission, i as isize).conj()).re)
        .collect();
    let coef: Vec<LinearCoef> = (0..=m)
        .map(|j| {
            let g = memory_integral(j, h, |i| gain[i]);
            let l = memory_integral(j, h, |i| loss[i]);
            LinearCoef {
                a: Mat2::new(C64::new(-2.0 * (g + l), 0.0), ZERO, ZERO, ZERO),
                b: [C64::new(2.0 * g, 0.0), ZERO],
            }
        })
        .collect();
    let r11 = rk4_linear([C64::new(sc.rho0.rho11(), 0.0), ZERO], sc.dt(), &coef);

    // The coherence exponent and the noiseless factor e^{−(2λ² + 2iω₀)t} are
    // combined before exponentiating; R₁₂ alone can overflow at large λ²t.
    let rate = C64::new(2.0 * g2, 2.0 * p.omega0);
    let growth: Vec<C64> = (0..=m)
        .map(|i| samples.coth_kernel(i as isize).conj() * (rate * (i as f64 * h)).exp())
        .collect();
    let rho12_0 = sc.rho0.rho12();
    let times = sc.times();
    let states: Vec<DensityMatrix> = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let j = 2 * k;
            let phi: C64 = memory_integral(j, h, |i| growth[i] * (t - i as f64 * h));
            let c = if rho12_0 == ZERO {
                ZERO
            } else {
                rho12_0 * (-phi - rate * t).exp()
            };
            let r = r11[k][0].re;
            let mat = Mat2::new(C64::new(r, 0.0), c, c.conj(), C64::new(1.0 - r, 0.0));
            to_measured_basis(mat, Component::Z)
        })
        .collect();
    Ok(Trajectory::from_states(&times, &states, Component::Z.basis(), SOLVER_ID, warnings))
}

/// σ_x measurement, with a₁ = (1 + e^{−2λ²s})/2, a₂ = (1 − e^{−2λ²s})/2,
/// b₁ = e^{−λ²s}[cosh Ωs − 2iω₀ sinh(Ωs)/Ω], b₂ = λ² e^{−λ²s} sinh(Ωs)/Ω.
///
/// Populations: dR₁₁/dt = A₁₁ R₁₁ + A₂₂ R₂₂,
/// A₁₁ = 2e^{2λ²t} ∫₀^t Re{a₂(t') b₁*(τ) ν_abs(τ) − a₁(t') b₁(τ) ν_em(τ)} dt', τ = t − t',
/// and A₂₂ the same with a₁ ↔ a₂.
/// Coherences: dR₁₂/dt = X₁ R₁₂ + X₂ R₂₁ with
/// X₁ = −∫₀^t e^{−2λ²τ}[b₁(−t)b₁(t') conj κ(τ) + b₂(−t)b₂(t') κ(τ)] dt',
/// X₂ = −∫₀^t e^{−2λ²τ}[b₁(−t)b₂(t') conj κ(τ) + b₁*(t')b₂(−t) κ(τ)] dt'.
pub fn solve_ad_x(sc: &Scenario) -> Result<Trajectory> {
    sc.require(Interaction::AmplitudeDamping, Component::X)?;
    let warnings = sc.check()?;
    let p = &sc.params;
    let (samples, h) = bath_samples(sc)?;
    let m = 2 * sc.n_steps;
    let g2 = p.rate();
    let branch = OmegaBranch::from_params(p);
    let w = I * (2.0 * p.omega0);
    let span = m + 2;
    let a1 = Sampled::new(span, h, |s| 0.5 * (1.0 + (-2.0 * g2 * s).exp()));
    let a2 = Sampled::new(span, h, |s| 0.5 * (1.0 - (-2.0 * g2 * s).exp()));
    let b1 = Sampled::new(span, h, |s| (branch.cosh(s) - w * branch.sinhc(s)) * (-g2 * s).exp());
    let b2 = Sampled::new(span, h, |s| branch.sinhc(s) * (g2 * (-g2 * s).exp()));
    let damp = Sampled::new(span, h, |s| (-2.0 * g2 * s).exp());

    // packed as [[A₁₁, A₂₂], [X₁, X₂]]
    let packed: Vec<Mat2> = (0..=m)
        .map(|j| {
            let jt = j as isize;
            let (b1m, b2m) = (b1.at(-jt), b2.at(-jt));
            let integral: Mat2 = memory_integral(j, h, |i| {
                let ti = i as isize;
                let k = jt - ti;
                let nu_abs = samples.kernel(KernelKind::AmplitudeAbsorption, k);
                let nu_em = samples.kernel(KernelKind::AmplitudeEmission, k);
                let kappa = samples.coth_kernel(k);
                let (u, v) = (b1.at(k).conj() * nu_abs, b1.at(k) * nu_em);
                let p11 = (u * a2.at(ti) - v * a1.at(ti)).re;
                let p22 = (u * a1.at(ti) - v * a2.at(ti)).re;
                let d = damp.at(k);
                let x1 = (b1m * b1.at(ti) * kappa.conj() + b2m * b2.at(ti) * kappa) * d;
                let x2 = (b1m * b2.at(ti) * kappa.conj() + b1.at(ti).conj() * b2m * kappa) * d;
                Mat2::new(C64::new(p11, 0.0), C64::new(p22, 0.0), x1, x2)
            });
            let grow = 2.0 * (2.0 * g2 * j as f64 * h).exp();
            Mat2::new(integral.get(0, 0) * grow, integral.get(0, 1) * grow, -integral.get(1, 0), -integral.get(1, 1))
        })
        .collect();

    let pop: Vec<LinearCoef> = packed
        .iter()
        .map(|c| LinearCoef {
            a: Mat2::new(c.get(0, 0) - c.get(0, 1), ZERO, ZERO, ZERO),
            b: [c.get(0, 1), ZERO],
        })
        .collect();
    let coh: Vec<LinearCoef> = packed
        .iter()
        .map(|c| {
            let (x1, x2) = (c.get(1, 0), c.get(1, 1));
            LinearCoef {
                a: Mat2::new(x1, x2, x2.conj(), x1.conj()),
                b: [ZERO; 2],
            }
        })
        .collect();
    let r0 = RState::from_density(&sc.rho0);
    let dt = sc.dt();
    let ys_pop = rk4_linear([C64::new(r0.r11, 0.0), ZERO], dt, &pop);
    let ys_coh = rk4_linear([r0.r12, r0.r21], dt, &coh);
    let r: Vec<RState> = ys_pop
        .iter()
        .zip(&ys_coh)
        .map(|(a, b)| RState {
            r11: a[0].re,
            r12: b[0],
            r21: b[1],
        })
        .collect();
    Ok(assemble_with(&r, &sc.times(), p, Component::X, warnings))
}
