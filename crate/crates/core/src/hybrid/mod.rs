//! Hybrid master equation: Markovian apparatus, second-order bath.
//!
//! The solvers work on R(t) = e^{−Ŝt} ρ(t), where e^{Ŝt} is the noiseless
//! propagator of the measured component, and re-dress R at output.

mod amplitude;
pub mod memory;
mod phase;

use serde::{Deserialize, Serialize};

pub use amplitude::{solve_ad_x, solve_ad_z};
pub use phase::{pd_log_decoherence_gamma, pd_log_decoherence_quadrature, solve_pd_x, solve_pd_z};

use crate::error::{Error, Result};
use crate::noiseless::{Component, ModelParams};
use crate::qubit::{Basis, DensityMatrix, Mat2, C64, POSITIVITY_TOL};

/// Solver identifier written to trajectories.
pub const SOLVER_ID: &str = "hybrid";
/// Coupling above which the second-order bath treatment is flagged.
pub const ETA_VALIDITY: f64 = 0.2;
const DT_RECOMMENDED: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    PhaseDamping,
    AmplitudeDamping,
}

impl Interaction {
    pub fn short(self) -> &'static str {
        match self {
            Interaction::PhaseDamping => "PD",
            Interaction::AmplitudeDamping => "AD",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub interaction: Interaction,
    pub component: Component,
    pub params: ModelParams,
    pub rho0: DensityMatrix,
    pub t_final: f64,
    pub n_steps: usize,
}

impl Scenario {
    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.n_steps).map(|k| k as f64 * dt).collect()
    }

    /// Validate the scenario and return non-fatal warnings.
    pub fn check(&self) -> Result<Vec<String>> {
        self.params.validate()?;
        if self.rho0.basis() != Basis::Z {
            return Err(Error::Basis {
                expected: Basis::Z.name(),
                found: self.rho0.basis().name(),
            });
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Range {
                name: "t_final",
                value: self.t_final,
            });
        }
        if self.n_steps < 2 {
            return Err(Error::Range {
                name: "n_steps",
                value: self.n_steps as f64,
            });
        }
        let p = &self.params;
        let mut warnings = Vec::new();
        let stepped = !(self.interaction == Interaction::PhaseDamping && self.component == Component::Z);
        if stepped {
            let dt = self.dt();
            let fastest = p.rate().max(2.0 * p.omega0).max(p.omega_c);
            if dt * fastest > 1.0 {
                return Err(Error::StepSize { dt, bound: 1.0 / fastest });
            }
            let recommended = DT_RECOMMENDED / p.rate().max(p.omega0).max(p.omega_c);
            if dt > recommended {
                warnings.push(format!("dt = {dt} exceeds the recommended {recommended}"));
            }
        }
        if p.eta > ETA_VALIDITY {
            warnings.push(format!(
                "eta = {} is above {ETA_VALIDITY}; the second-order bath treatment may be unreliable",
                p.eta
            ));
        }
        Ok(warnings)
    }

    fn require(&self, interaction: Interaction, component: Component) -> Result<()> {
        if self.interaction != interaction || self.component != component {
            return Err(Error::Domain(format!(
                "scenario is {}/{:?}, solver expects {}/{:?}",
                self.interaction.short(),
                self.component,
                interaction.short(),
                component
            )));
        }
        Ok(())
    }
}

/// Interaction-picture state R(t) = e^{−Ŝt} ρ(t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RState {
    pub r11: f64,
    pub r12: C64,
    pub r21: C64,
}

impl RState {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        RState {
            r11: rho.rho11(),
            r12: rho.rho12(),
            r21: rho.rho21(),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            C64::new(self.r11, 0.0),
            self.r12,
            self.r21,
            C64::new(1.0 - self.r11, 0.0),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_time: f64,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn new(warnings: Vec<String>) -> Self {
        Diagnostics {
            min_eigenvalue: f64::INFINITY,
            warnings,
            ..Diagnostics::default()
        }
    }

    fn observe(&mut self, t: f64, rho: &DensityMatrix) {
        self.max_trace_error = self.max_trace_error.max(rho.trace_error());
        self.max_hermiticity_error = self.max_hermiticity_error.max(rho.hermiticity_error());
        let e = rho.min_eigenvalue();
        if e < self.min_eigenvalue || e.is_nan() {
            self.min_eigenvalue = e;
            self.min_eigenvalue_time = t;
        }
    }

    fn finish(&mut self) {
        if self.min_eigenvalue < POSITIVITY_TOL || self.min_eigenvalue.is_nan() {
            self.warnings.push(format!(
                "positivity violated: min eigenvalue {} at t = {}",
                self.min_eigenvalue, self.min_eigenvalue_time
            ));
        }
        if !self.max_trace_error.is_finite() || !self.max_hermiticity_error.is_finite() {
            self.warnings.push("non-finite state entries".to_string());
        }
    }

    /// True when no sample broke trace or Hermiticity at `tol`.
    pub fn is_clean(&self, tol: f64) -> bool {
        self.max_trace_error < tol && self.max_hermiticity_error < tol
    }
}

/// Time series of (ρ₁₁, ρ₁₂) in a declared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub rho11: Vec<f64>,
    pub rho12: Vec<C64>,
    pub basis: Basis,
    pub solver_id: String,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    /// Build from full density matrices, all in `basis`.
    pub fn from_states(times: &[f64], states: &[DensityMatrix], basis: Basis, solver_id: &str, warnings: Vec<String>) -> Self {
        assert_eq!(times.len(), states.len());
        let mut diag = Diagnostics::new(warnings);
        for (t, s) in times.iter().zip(states) {
            debug_assert_eq!(s.basis(), basis);
            diag.observe(*t, s);
        }
        diag.finish();
        Trajectory {
            times: times.to_vec(),
            rho11: states.iter().map(|s| s.rho11()).collect(),
            rho12: states.iter().map(|s| s.rho12()).collect(),
            basis,
            solver_id: solver_id.to_string(),
            diagnostics: diag,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Re-dress in the measured component's eigenbasis after the z → x
/// conversion when needed.
fn to_measured_basis(rho_z: Mat2, component: Component) -> DensityMatrix {
    let rho = DensityMatrix::from_matrix_unchecked(rho_z, Basis::Z);
    match component {
        Component::Z => rho,
        Component::X => rho.to_x_basis().expect("state is in the z basis"),
    }
}

/// ρ(t) = e^{Ŝt} R(t) at every sample, in the eigenbasis of the measured component.
pub fn assemble_rho(r: &[RState], times: &[f64], p: &ModelParams, component: Component) -> Trajectory {
    assemble_with(r, times, p, component, Vec::new())
}

fn assemble_with(r: &[RState], times: &[f64], p: &ModelParams, component: Component, warnings: Vec<String>) -> Trajectory {
    let states: Vec<DensityMatrix> = r
        .iter()
        .zip(times)
        .map(|(ri, &t)| to_measured_basis(component.propagate_matrix(&ri.matrix(), p, t), component))
        .collect();
    Trajectory::from_states(times, &states, component.basis(), SOLVER_ID, warnings)
}

/// e^{−Ŝt} ρ for a state in the z basis.
pub fn to_interaction_picture(rho: &DensityMatrix, p: &ModelParams, component: Component, t: f64) -> RState {
    let m = component.propagate_matrix(rho.matrix(), p, -t);
    RState {
        r11: m.get(0, 0).re,
        r12: m.get(0, 1),
        r21: m.get(1, 0),
    }
}

/// Dispatch on interaction and measured component.
pub fn solve(sc: &Scenario) -> Result<Trajectory> {
    match (sc.interaction, sc.component) {
        (Interaction::PhaseDamping, Component::Z) => solve_pd_z(sc),
        (Interaction::PhaseDamping, Component::X) => solve_pd_x(sc),
        (Interaction::AmplitudeDamping, Component::Z) => solve_ad_z(sc),
        (Interaction::AmplitudeDamping, Component::X) => solve_ad_x(sc),
    }
}
