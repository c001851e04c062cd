//! Shared fixtures for the benchmarks and the timing test.

use std::time::{Duration, Instant};

use ftmeas_core::bath::{splitting_weights, SpectralDensity, WeightMatrix};
use ftmeas_core::hybrid::{Interaction, Scenario};
use ftmeas_core::noiseless::c_factors;
use ftmeas_core::{make_density, Basis, Component, ModelParams, Temperature, C64};

pub fn pd_params(eta: f64) -> ModelParams {
    ModelParams {
        lambda: 1.0,
        eta,
        omega0: 0.5,
        omega_c: 1.0,
        temperature: Temperature::Beta(2.0),
    }
}

/// Thermal weights and step factors for an N-step splitting run over t = 1.
pub fn splitting_inputs(n: usize) -> (WeightMatrix, C64, C64) {
    let p = pd_params(0.25);
    let dt = 1.0 / n as f64;
    let w = splitting_weights(n, dt, &SpectralDensity::from(&p), p.temperature).expect("weights");
    let (cp, cm) = c_factors(&p, dt);
    (w, cp, cm)
}

pub fn hybrid_scenario(interaction: Interaction, component: Component, n_steps: usize) -> Scenario {
    Scenario {
        interaction,
        component,
        params: pd_params(0.1),
        rho0: make_density(0.7, C64::new(0.2, -0.3), Basis::Z).expect("valid state"),
        t_final: 2.0,
        n_steps,
    }
}

/// Fastest of `reps` timings of `f`.
pub fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .min()
        .expect("at least one repetition")
}
