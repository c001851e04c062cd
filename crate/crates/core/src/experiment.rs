//! Weak-measurement test of the apparatus model.
//!
//! A first apparatus measures σ_θ = cos θ σ_z + sin θ σ_x for a time τ, leaving
//! a fraction b(τ) = e^{−2λ²τ} of the coherence in its eigenbasis; a second,
//! strong measurement of σ_z follows. The tilt is called θ here because β is
//! the inverse temperature elsewhere in the crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noiseless::{propagate_x_meas, ModelParams};
use crate::qubit::{make_density, pauli, Basis, DensityMatrix, Mat2, C64};

const ANGLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakMeasSetting {
    pub theta: f64,
    pub b: f64,
    pub tau: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSample {
    pub tau: f64,
    pub b_hat: f64,
    pub sigma: f64,
}

pub fn sigma_theta(theta: f64) -> Mat2 {
    pauli::sigma_z() * theta.cos() + pauli::sigma_x() * theta.sin()
}

/// ρ → ½(1+b)ρ + ½(1−b) σ_θ ρ σ_θ.
pub fn apply_weak_meas(rho: &DensityMatrix, s: &WeakMeasSetting) -> DensityMatrix {
    let sg = sigma_theta(s.theta);
    let m = *rho.matrix() * (0.5 * (1.0 + s.b)) + (sg * *rho.matrix() * sg) * (0.5 * (1.0 - s.b));
    DensityMatrix::from_matrix_unchecked(m, rho.basis())
}

/// ⟨σ_z⟩ after the weak measurement (no free evolution in between):
/// [cos²θ + b sin²θ]⟨σ_z⟩ + ½(1−b) sin 2θ ⟨σ_x⟩.
pub fn expected_sigma_z(rho: &DensityMatrix, s: &WeakMeasSetting) -> f64 {
    let (sz, sx) = (rho.expectation(&pauli::sigma_z()), rho.expectation(&pauli::sigma_x()));
    let (sn, cs) = s.theta.sin_cos();
    (cs * cs + s.b * sn * sn) * sz + 0.5 * (1.0 - s.b) * (2.0 * s.theta).sin() * sx
}

/// Constants of ⟨σ_z⟩(τ) = A + b(τ) C for a known initial state.
fn affine_in_b(rho: &DensityMatrix, theta: f64) -> (f64, f64) {
    let (sz, sx) = (rho.expectation(&pauli::sigma_z()), rho.expectation(&pauli::sigma_x()));
    let (sn, cs) = theta.sin_cos();
    let half_sin2 = 0.5 * (2.0 * theta).sin();
    (cs * cs * sz + half_sin2 * sx, sn * sn * sz - half_sin2 * sx)
}

/// b(τ) = e^{−2λ²τ}.
pub fn b_of_tau(lambda: f64, tau: f64) -> f64 {
    (-2.0 * lambda * lambda * tau).exp()
}

/// Coherence survival read off the noiseless propagator: a σ_z eigenstate
/// measured along σ_x keeps the fraction |ρ₁₂^{(x)}(τ)| / |ρ₁₂^{(x)}(0)|.
pub fn b_from_lindblad(lambda: f64, tau: f64) -> f64 {
    let rho0 = make_density(1.0, C64::new(0.0, 0.0), Basis::Z).expect("pure state");
    let p = ModelParams {
        lambda,
        ..ModelParams::default()
    };
    let x0 = rho0.to_x_basis().expect("z basis");
    let x1 = propagate_x_meas(&rho0, &p, tau).to_x_basis().expect("z basis");
    x1.rho12().norm() / x0.rho12().norm()
}

/// Change in ⟨σ_z⟩ between a negligible (b = 1) and a complete (b = 0) first
/// measurement: |sin²θ ⟨σ_z⟩ − ½ sin 2θ ⟨σ_x⟩|.
pub fn discriminator_delta_z(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    if theta.sin().abs() < ANGLE_TOL {
        return Err(Error::Domain(format!("theta = {theta} is a multiple of pi")));
    }
    let weak = WeakMeasSetting { theta, b: 1.0, tau: 0.0 };
    let strong = WeakMeasSetting { b: 0.0, ..weak };
    Ok((expected_sigma_z(rho, &weak) - expected_sigma_z(rho, &strong)).abs())
}

/// Slope of −ln b̂ against 2τ through the origin. With every σ > 0 the
/// points carry delta-method weights b̂²/σ² and the standard error is the
/// known-variance one; otherwise the fit is unweighted and the error comes
/// from the residuals.
pub fn fit_lambda_squared(samples: &[BSample]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 samples, got {}", samples.len())));
    }
    if let Some(s) = samples.iter().find(|s| !(s.b_hat > 0.0)) {
        return Err(Error::Fit(format!("b_hat = {} at tau = {} is not positive", s.b_hat, s.tau)));
    }
    let tau0 = samples[0].tau;
    if samples.iter().all(|s| s.tau == tau0) {
        return Err(Error::Fit("all tau values are equal".into()));
    }
    let weighted = samples.iter().all(|s| s.sigma > 0.0);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for s in samples {
        let (x, y) = (2.0 * s.tau, -s.b_hat.ln());
        let w = if weighted { (s.b_hat / s.sigma).powi(2) } else { 1.0 };
        sxx += w * x * x;
        sxy += w * x * y;
    }
    if sxx == 0.0 {
        return Err(Error::Fit("all tau values are zero".into()));
    }
    let slope = sxy / sxx;
    let stderr = if weighted {
        (1.0 / sxx).sqrt()
    } else {
        let rss: f64 = samples
            .iter()
            .map(|s| (-s.b_hat.ln() - slope * 2.0 * s.tau).powi(2))
            .sum();
        (rss / (samples.len() - 1) as f64 / sxx).sqrt()
    };
    Ok((slope, stderr))
}

/// Simulated runs of the protocol: at each τ, `shots` strong σ_z outcomes are
/// drawn with P(+1) = (1 + ⟨σ_z⟩(τ))/2 and inverted to b̂.
pub fn synthesize_experiment(
    lambda: f64,
    theta: f64,
    rho0: &DensityMatrix,
    tau_grid: &[f64],
    shots: u64,
    seed: u64,
) -> Result<Vec<BSample>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let (a, c) = affine_in_b(rho0, theta);
    if c.abs() < ANGLE_TOL {
        return Err(Error::Domain(format!(
            "the design cannot resolve b: <sigma_z>(tau) does not depend on b at theta = {theta} for this state"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shots as f64;
    tau_grid
        .iter()
        .map(|&tau| {
            let b = b_of_tau(lambda, tau);
            let e = expected_sigma_z(rho0, &WeakMeasSetting { theta, b, tau });
            let p_up = (0.5 * (1.0 + e)).clamp(0.0, 1.0);
            let ups = Binomial::new(shots, p_up)
                .map_err(|err| Error::Domain(format!("binomial: {err}")))?
                .sample(&mut rng);
            let p_hat = ups as f64 / n;
            let e_hat = 2.0 * p_hat - 1.0;
            let pc = p_hat.clamp(0.5 / n, 1.0 - 0.5 / n);
            Ok(BSample {
                tau,
                b_hat: (e_hat - a) / c,
                sigma: 2.0 * (pc * (1.0 - pc) / n).sqrt() / c.abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_distr::Normal;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

    fn up() -> DensityMatrix {
        make_density(1.0, C64::new(0.0, 0.0), Basis::Z).unwrap()
    }

    #[test]
    fn identity_and_full_dephasing() {
        let rho = make_density(0.7, C64::new(0.1, 0.2), Basis::Z).unwrap();
        let out = apply_weak_meas(&rho, &WeakMeasSetting { theta: 0.3, b: 1.0, tau: 0.0 });
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-16);
        let out = apply_weak_meas(&up(), &WeakMeasSetting { theta: FRAC_PI_2, b: 0.0, tau: 1.0 });
        assert_abs_diff_eq!(out.rho11(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.rho12().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn populations_in_measured_basis_are_kept() {
        let rho = make_density(0.6, C64::new(-0.15, 0.3), Basis::Z).unwrap();
        let theta: f64 = 0.7;
        // rotation taking σ_z eigenvectors to σ_θ eigenvectors
        let (s, c) = (0.5 * theta).sin_cos();
        let u = Mat2::new(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0));
        let to_theta = |m: &Mat2| u.dagger() * *m * u;
        let sg = sigma_theta(theta);
        assert!(to_theta(&sg).max_abs_diff(&pauli::sigma_z()) < 1e-15);
        for b in [0.0, 0.4, 0.9] {
            let out = apply_weak_meas(&rho, &WeakMeasSetting { theta, b, tau: 0.0 });
            let (r0, r1) = (to_theta(rho.matrix()), to_theta(out.matrix()));
            assert_abs_diff_eq!(r0.get(0, 0).re, r1.get(0, 0).re, epsilon = 1e-14);
            assert!((r1.get(0, 1) - r0.get(0, 1) * b).norm() < 1e-14);
        }
    }

    #[test]
    fn expectation_formula() {
        let rho = make_density(0.8, C64::new(0.25, 0.1), Basis::Z).unwrap();
        let sz = rho.expectation(&pauli::sigma_z());
        let s = WeakMeasSetting { theta: FRAC_PI_2, b: 0.37, tau: 0.0 };
        assert_abs_diff_eq!(expected_sigma_z(&rho, &s), 0.37 * sz, epsilon = 1e-15);
        let s = WeakMeasSetting { theta: 1.1, b: 1.0, tau: 0.0 };
        assert_abs_diff_eq!(expected_sigma_z(&rho, &s), sz, epsilon = 1e-15);
        let s = WeakMeasSetting { theta: FRAC_PI_4, b: 0.0, tau: 0.0 };
        assert_abs_diff_eq!(expected_sigma_z(&up(), &s), 0.5, epsilon = 1e-15);
        let direct = apply_weak_meas(&up(), &s).expectation(&pauli::sigma_z());
        assert_abs_diff_eq!(direct, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn b_values() {
        assert_eq!(b_of_tau(1.3, 0.0), 1.0);
        assert_abs_diff_eq!(b_of_tau(1.0, LN_2 / 2.0), 0.5, epsilon = 1e-15);
        for (l, t) in [(0.4, 0.3), (1.0, 1.0), (2.1, 0.05)] {
            assert!((b_from_lindblad(l, t) - b_of_tau(l, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn discriminator() {
        let rho = make_density(0.9, C64::new(0.0, 0.0), Basis::Z).unwrap();
        assert_abs_diff_eq!(discriminator_delta_z(&rho, FRAC_PI_2).unwrap(), 0.8, epsilon = 1e-15);
        let mixed = make_density(0.5, C64::new(0.0, 0.2), Basis::Z).unwrap();
        assert_abs_diff_eq!(discriminator_delta_z(&mixed, 0.9).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(discriminator_delta_z(&up(), FRAC_PI_4).unwrap(), 0.5, epsilon = 1e-15);
        assert!(discriminator_delta_z(&up(), std::f64::consts::PI).is_err());
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let samples: Vec<BSample> = (1..=10)
            .map(|k| {
                let tau = 0.1 * k as f64;
                BSample { tau, b_hat: b_of_tau(1.2, tau), sigma: 0.0 }
            })
            .collect();
        let (l2, se) = fit_lambda_squared(&samples).unwrap();
        assert_abs_diff_eq!(l2, 1.44, epsilon = 1e-10);
        assert!(se < 1e-10);
        let scaled: Vec<BSample> = samples.iter().map(|s| BSample { tau: 3.0 * s.tau, ..*s }).collect();
        assert_abs_diff_eq!(fit_lambda_squared(&scaled).unwrap().0, 1.44 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn fit_errors() {
        let one = [BSample { tau: 0.1, b_hat: 0.9, sigma: 0.01 }];
        assert!(matches!(fit_lambda_squared(&one), Err(Error::Fit(_))));
        let neg = [one[0], BSample { tau: 0.2, b_hat: -0.1, sigma: 0.01 }];
        assert!(matches!(fit_lambda_squared(&neg), Err(Error::Fit(_))));
        let same = [one[0], one[0]];
        assert!(matches!(fit_lambda_squared(&same), Err(Error::Fit(_))));
    }

    #[test]
    fn monte_carlo_calibration() {
        let taus: Vec<f64> = (1..=50).map(|k| 0.02 * k as f64).collect();
        let noise = Normal::new(0.0, 0.01).unwrap();
        let trials = 400;
        let mut inside = 0;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<BSample> = taus
                .iter()
                .map(|&tau| BSample {
                    tau,
                    b_hat: b_of_tau(1.0, tau) + noise.sample(&mut rng),
                    sigma: 0.01,
                })
                .collect();
            let (l2, se) = fit_lambda_squared(&samples).unwrap();
            if (l2 - 1.0).abs() <= 3.0 * se {
                inside += 1;
            }
        }
        assert!(inside as f64 >= 0.99 * trials as f64, "{inside}/{trials}");
    }

    #[test]
    fn synthesis_is_reproducible_and_consistent() {
        let taus = [0.1, 0.3, 0.5];
        let a = synthesize_experiment(1.0, FRAC_PI_2, &up(), &taus, 10_000_000, 7).unwrap();
        let b = synthesize_experiment(1.0, FRAC_PI_2, &up(), &taus, 10_000_000, 7).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!((s.b_hat - b_of_tau(1.0, s.tau)).abs() < 1e-3);
        }
        let c = synthesize_experiment(1.0, FRAC_PI_2, &up(), &taus, 100, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthesis_rejects_blind_design() {
        let rho = make_density(0.5, C64::new(0.3, 0.0), Basis::Z).unwrap();
        assert!(matches!(
            synthesize_experiment(1.0, FRAC_PI_2, &rho, &[0.1], 100, 1),
            Err(Error::Domain(_))
        ));
    }
}
