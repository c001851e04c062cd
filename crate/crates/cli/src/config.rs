//! Run configuration: a TOML file with `[model]`, `[scenario]`, `[sweep]`,
//! `[output]` and `[experiment]` sections. Unknown keys are rejected.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use ftmeas_core::hybrid::Interaction;
use ftmeas_core::splitting::{Strategy, MAX_STEPS};
use ftmeas_core::{make_density, Basis, Component, DensityMatrix, Error as CoreError, ModelParams, Temperature, C64};

use crate::error::{CliError, Result};

/// Upper bound on the size of a sweep cross-product.
pub const MAX_SWEEP: usize = 10_000;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default, skip_serializing_if = "SweepSection::is_empty")]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub lambda: f64,
    pub eta: f64,
    pub omega0: f64,
    pub omega_c: f64,
    /// T in units of ω (k_B = 1); 0 selects the zero-temperature limit.
    pub temperature: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            lambda: 0.0,
            eta: 0.0,
            omega0: 0.0,
            omega_c: 1.0,
            temperature: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionName {
    #[serde(rename = "PD", alias = "pd")]
    PhaseDamping,
    #[serde(rename = "AD", alias = "ad")]
    AmplitudeDamping,
}

impl From<InteractionName> for Interaction {
    fn from(i: InteractionName) -> Self {
        match i {
            InteractionName::PhaseDamping => Interaction::PhaseDamping,
            InteractionName::AmplitudeDamping => Interaction::AmplitudeDamping,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentName {
    #[serde(rename = "z", alias = "Z")]
    Z,
    #[serde(rename = "x", alias = "X")]
    X,
}

impl From<ComponentName> for Component {
    fn from(c: ComponentName) -> Self {
        match c {
            ComponentName::Z => Component::Z,
            ComponentName::X => Component::X,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Hybrid,
    Splitting,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    #[default]
    Gray,
    Brute,
}

impl From<StrategyName> for Strategy {
    fn from(s: StrategyName) -> Self {
        match s {
            StrategyName::Gray => Strategy::GrayCode,
            StrategyName::Brute => Strategy::BruteForce,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<ComponentName>,
    /// Initial state in the z basis; defaults depend on the scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho11: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho12_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho12_im: Option<f64>,
    pub t_final: f64,
    pub n_steps: usize,
    pub solver: SolverChoice,
    /// N of the splitting solver; its step is t_final / N.
    pub splitting_steps: usize,
    pub strategy: StrategyName,
    /// Use sin²(ωNΔt/2) in the splitting weights instead of sin²(ωΔt/2).
    pub literal_total_time: bool,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            interaction: None,
            component: None,
            rho11: None,
            rho12_re: None,
            rho12_im: None,
            t_final: 10.0,
            n_steps: 2000,
            solver: SolverChoice::Hybrid,
            splitting_steps: 16,
            strategy: StrategyName::Gray,
            literal_total_time: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub omega0: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub temperature: Vec<f64>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty() && self.eta.is_empty() && self.omega0.is_empty() && self.temperature.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub prefix: String,
    /// Coherence fraction defining the measurement duration t_M, reported per run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".into(),
            prefix: "run".into(),
            f: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub lambda: f64,
    /// Tilt of the first apparatus from the z axis.
    pub theta: f64,
    pub rho11: f64,
    pub rho12_re: f64,
    pub rho12_im: f64,
    /// Explicit exposure times; when empty, `tau_points` evenly spaced values
    /// ending at `tau_max` are used.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_points: Option<usize>,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            lambda: 1.0,
            theta: FRAC_PI_2,
            rho11: 1.0,
            rho12_re: 0.0,
            rho12_im: 0.0,
            tau: Vec::new(),
            tau_max: None,
            tau_points: None,
            shots: 10_000,
            seed: 0,
        }
    }
}

impl ExperimentSection {
    pub fn rho0(&self) -> Result<DensityMatrix> {
        density(self.rho11, self.rho12_re, self.rho12_im)
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        if !self.tau.is_empty() {
            return self.tau.clone();
        }
        match (self.tau_max, self.tau_points) {
            (Some(max), Some(n)) => (1..=n).map(|k| max * k as f64 / n as f64).collect(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        finite_nonneg("experiment.lambda", self.lambda)?;
        if !self.theta.is_finite() {
            return Err(CliError::validation("experiment.theta", "must be finite"));
        }
        self.rho0()?;
        if self.shots == 0 {
            return Err(CliError::validation("experiment.shots", "must be at least 1"));
        }
        if let Some(n) = self.tau_points {
            if n < 2 {
                return Err(CliError::validation("experiment.tau_points", "need at least 2 points"));
            }
        }
        if let Some(m) = self.tau_max {
            if !(m > 0.0) || !m.is_finite() {
                return Err(CliError::validation("experiment.tau_max", "must be positive"));
            }
        }
        let grid = self.tau_grid();
        if grid.len() < 2 {
            return Err(CliError::validation("experiment.tau", "give `tau` or both `tau_max` and `tau_points`"));
        }
        if let Some(t) = grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(CliError::validation("experiment.tau", format!("{t} is not a valid time")));
        }
        if grid.iter().all(|&t| t == grid[0]) {
            return Err(CliError::validation("experiment.tau", "all times are equal"));
        }
        Ok(())
    }
}

/// One point of the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunPoint {
    pub index: usize,
    pub params: ModelParams,
}

impl RunConfig {
    /// Cross-product of the sweep axes, λ outermost, then η, ω₀, T.
    pub fn runs(&self) -> Result<Vec<RunPoint>> {
        let m = &self.model;
        let axis = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        let (lambdas, etas, omegas, temps) = (
            axis(&self.sweep.lambda, m.lambda),
            axis(&self.sweep.eta, m.eta),
            axis(&self.sweep.omega0, m.omega0),
            axis(&self.sweep.temperature, m.temperature),
        );
        let total = lambdas.len() * etas.len() * omegas.len() * temps.len();
        if total > MAX_SWEEP {
            return Err(CliError::validation("sweep", format!("{total} runs exceed the limit of {MAX_SWEEP}")));
        }
        let mut out = Vec::with_capacity(total);
        for &lambda in &lambdas {
            for &eta in &etas {
                for &omega0 in &omegas {
                    for &t in &temps {
                        let temperature = Temperature::from_temperature(t).map_err(field_error)?;
                        let params = ModelParams {
                            lambda,
                            eta,
                            omega0,
                            omega_c: m.omega_c,
                            temperature,
                        };
                        params.validate().map_err(field_error)?;
                        out.push(RunPoint { index: out.len(), params });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn interaction(&self) -> Result<Interaction> {
        self.scenario
            .interaction
            .map(Interaction::from)
            .ok_or_else(|| CliError::validation("scenario.interaction", "required (\"PD\" or \"AD\")"))
    }

    pub fn component(&self) -> Result<Component> {
        self.scenario
            .component
            .map(Component::from)
            .ok_or_else(|| CliError::validation("scenario.component", "required (\"z\" or \"x\")"))
    }

    pub fn rho0(&self) -> Result<DensityMatrix> {
        let s = &self.scenario;
        density(s.rho11.unwrap_or(0.5), s.rho12_re.unwrap_or(0.0), s.rho12_im.unwrap_or(0.0))
    }

    /// Fill scenario-dependent defaults: ρ₀ = |0⟩ for amplitude damping,
    /// |+⟩ otherwise.
    fn resolve(&mut self) {
        let s = &mut self.scenario;
        if s.rho11.is_none() && s.rho12_re.is_none() && s.rho12_im.is_none() {
            let (r11, r12) = match s.interaction {
                Some(InteractionName::AmplitudeDamping) => (1.0, 0.0),
                _ => (0.5, 0.5),
            };
            s.rho11 = Some(r11);
            s.rho12_re = Some(r12);
            s.rho12_im = Some(0.0);
        } else {
            s.rho11.get_or_insert(0.5);
            s.rho12_re.get_or_insert(0.0);
            s.rho12_im.get_or_insert(0.0);
        }
    }

    fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        if !(s.t_final > 0.0) || !s.t_final.is_finite() {
            return Err(CliError::validation("scenario.t_final", "must be positive and finite"));
        }
        if s.n_steps < 2 {
            return Err(CliError::validation("scenario.n_steps", "must be at least 2"));
        }
        if s.splitting_steps == 0 || s.splitting_steps > MAX_STEPS {
            return Err(CliError::validation(
                "scenario.splitting_steps",
                format!("must lie in 1..={MAX_STEPS}"),
            ));
        }
        self.rho0()?;
        if let Some(f) = self.output.f {
            if !(f > 0.0 && f < 1.0) {
                return Err(CliError::validation("output.f", "must lie in (0, 1)"));
            }
        }
        if self.output.prefix.is_empty() {
            return Err(CliError::validation("output.prefix", "must not be empty"));
        }
        self.runs()?;
        if let Some(e) = &self.experiment {
            e.validate()?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

fn finite_nonneg(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(field, format!("{v} must be finite and non-negative")))
    }
}

fn density(r11: f64, re: f64, im: f64) -> Result<DensityMatrix> {
    make_density(r11, C64::new(re, im), Basis::Z).map_err(|e| match e {
        CoreError::Positivity { .. } => CliError::validation("rho12", e.to_string()),
        _ => CliError::validation("rho11", e.to_string()),
    })
}

/// Core range errors name the offending parameter.
pub(crate) fn field_error(e: CoreError) -> CliError {
    match e {
        CoreError::Range { name, .. } => CliError::validation(name, e.to_string()),
        CoreError::StepSize { .. } => CliError::validation("scenario.n_steps", e.to_string()),
        other => CliError::validation("model", other.to_string()),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    cfg.resolve();
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[model]\nlambda = 1.0\neta = 0.25\n\n[scenario]\ninteraction = \"PD\"\ncomponent = \"x\"\n";

    #[test]
    fn minimal_config_takes_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scenario.t_final, 10.0);
        assert_eq!(c.scenario.n_steps, 2000);
        assert_eq!(c.model.omega_c, 1.0);
        assert_eq!(c.model.temperature, 0.0);
        assert_eq!(c.model.omega0, 0.0);
        assert_eq!((c.scenario.rho11, c.scenario.rho12_re), (Some(0.5), Some(0.5)));
        assert_eq!(c.scenario.solver, SolverChoice::Hybrid);
        let runs = c.runs().unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].params.temperature, Temperature::Zero);
    }

    #[test]
    fn amplitude_damping_starts_excited() {
        let c = parse_config("[scenario]\ninteraction = \"AD\"\ncomponent = \"z\"\n").unwrap();
        assert_eq!((c.scenario.rho11, c.scenario.rho12_re), (Some(1.0), Some(0.0)));
    }

    #[test]
    fn negative_cutoff_names_the_field() {
        let err = parse_config("[model]\nomega_c = -1.0\n").unwrap_err();
        match err {
            CliError::Validation { field, .. } => assert_eq!(field, "omega_c"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = parse_config("[model]\nlambda = 1.0\nlamda = 2.0\n").unwrap_err();
        match err {
            CliError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("lamda"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("[model\n"), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn sweep_order_is_lambda_major() {
        let c = parse_config("[sweep]\nlambda = [0.5, 1.0, 2.0]\neta = [0.25, 0.5]\n").unwrap();
        let got: Vec<(f64, f64)> = c.runs().unwrap().iter().map(|r| (r.params.lambda, r.params.eta)).collect();
        let mut want = Vec::new();
        for l in [0.5, 1.0, 2.0] {
            for e in [0.25, 0.5] {
                want.push((l, e));
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn oversized_sweep_is_rejected() {
        let axis: Vec<String> = (0..101).map(|k| format!("{}.0", k)).collect();
        let text = format!("[sweep]\nlambda = [{0}]\neta = [{0}]\n", axis.join(", "));
        assert!(matches!(parse_config(&text), Err(CliError::Validation { field, .. }) if field == "sweep"));
    }

    #[test]
    fn invalid_state_and_fraction() {
        let bad = "[scenario]\nrho11 = 0.5\nrho12_re = 0.6\n";
        assert!(matches!(parse_config(bad), Err(CliError::Validation { field, .. }) if field == "rho12"));
        let bad = "[output]\nf = 1.5\n";
        assert!(matches!(parse_config(bad), Err(CliError::Validation { field, .. }) if field == "output.f"));
    }

    #[test]
    fn serialization_round_trips() {
        let text = "[model]\nlambda = 0.3\neta = 0.1\ntemperature = 0.7\n\n[scenario]\ninteraction = \"AD\"\ncomponent = \"x\"\nrho11 = 0.25\nsolver = \"hybrid\"\n\n[sweep]\nomega0 = [0.0, 0.1]\n\n[output]\ndir = \"x\"\nf = 0.1\n\n[experiment]\nlambda = 1.2\ntau_max = 0.5\ntau_points = 50\nseed = 7\n";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(c, again);
        let d = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&d.to_toml()).unwrap(), d);
    }
}
