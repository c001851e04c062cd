//! Dispatch of configured runs to the solvers.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use ftmeas_core::bath::{SinArgument, WeightOptions};
use ftmeas_core::hybrid::{self, Diagnostics, Interaction, Scenario, Trajectory};
use ftmeas_core::noiseless::measurement_duration;
use ftmeas_core::splitting::{self, SplittingRun};
use ftmeas_core::{Component, DensityMatrix, ModelParams, C64};

use crate::config::{field_error, RunConfig, RunPoint, SolverChoice};
use crate::error::{CliError, Result};
use crate::output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Hybrid,
    Splitting,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Hybrid => hybrid::SOLVER_ID,
            SolverKind::Splitting => splitting::SOLVER_ID,
        }
    }
}

/// One solver applied to one sweep point.
#[derive(Clone, Debug)]
pub struct Job {
    pub point: RunPoint,
    pub solver: SolverKind,
    pub scenario: Scenario,
    pub splitting: Option<SplittingRun>,
}

impl Job {
    pub fn label(&self) -> String {
        format!("{:04}/{}", self.point.index, self.solver.name())
    }

    pub fn solve(&self) -> Result<Trajectory> {
        let res = match (self.solver, &self.splitting) {
            (SolverKind::Splitting, Some(run)) => splitting::solve_pd_x_trajectory(run),
            _ => hybrid::solve(&self.scenario),
        };
        res.map_err(|source| CliError::Solver {
            run: self.label(),
            source,
        })
    }
}

fn solvers(choice: SolverChoice) -> Vec<SolverKind> {
    match choice {
        SolverChoice::Hybrid => vec![SolverKind::Hybrid],
        SolverChoice::Splitting => vec![SolverKind::Splitting],
        SolverChoice::Both => vec![SolverKind::Hybrid, SolverKind::Splitting],
    }
}

/// Validate every run of the sweep against its solver and lay out the jobs.
pub fn plan(cfg: &RunConfig, choice: SolverChoice) -> Result<Vec<Job>> {
    let interaction = cfg.interaction()?;
    let component = cfg.component()?;
    let rho0 = cfg.rho0()?;
    let s = &cfg.scenario;
    let kinds = solvers(choice);
    let wants_splitting = kinds.contains(&SolverKind::Splitting);
    if wants_splitting && (interaction != Interaction::PhaseDamping || component != Component::X) {
        return Err(CliError::Unsupported(format!(
            "the splitting solver covers only PD with an x measurement, not {}/{}",
            interaction.short(),
            component.basis().name().to_ascii_lowercase()
        )));
    }
    if kinds.len() == 2 && !s.n_steps.is_multiple_of(s.splitting_steps) {
        return Err(CliError::validation(
            "scenario.n_steps",
            format!(
                "must be a multiple of splitting_steps = {} so both solvers share a grid",
                s.splitting_steps
            ),
        ));
    }
    let mut jobs = Vec::new();
    for point in cfg.runs()? {
        let scenario = Scenario {
            interaction,
            component,
            params: point.params,
            rho0,
            t_final: s.t_final,
            n_steps: s.n_steps,
        };
        for &solver in &kinds {
            let split = match solver {
                SolverKind::Hybrid => {
                    scenario.check().map_err(field_error)?;
                    None
                }
                SolverKind::Splitting => Some(SplittingRun {
                    strategy: s.strategy.into(),
                    weights: WeightOptions {
                        sin_argument: if s.literal_total_time {
                            SinArgument::TotalTime
                        } else {
                            SinArgument::Step
                        },
                        ..WeightOptions::default()
                    },
                    ..SplittingRun::new(s.splitting_steps, s.t_final / s.splitting_steps as f64, point.params, rho0)
                }),
            };
            jobs.push(Job {
                point,
                solver,
                scenario,
                splitting: split,
            });
        }
    }
    Ok(jobs)
}

#[derive(Clone, Debug, Serialize)]
struct ParamsEcho {
    lambda: f64,
    eta: f64,
    omega0: f64,
    omega_c: f64,
    temperature: f64,
    beta: Option<f64>,
}

impl From<&ModelParams> for ParamsEcho {
    fn from(p: &ModelParams) -> Self {
        ParamsEcho {
            lambda: p.lambda,
            eta: p.eta,
            omega0: p.omega0,
            omega_c: p.omega_c,
            temperature: p.temperature.temperature(),
            beta: p.temperature.beta(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct StateEcho {
    rho11: f64,
    rho12_re: f64,
    rho12_im: f64,
}

impl From<&DensityMatrix> for StateEcho {
    fn from(r: &DensityMatrix) -> Self {
        StateEcho {
            rho11: r.rho11(),
            rho12_re: r.rho12().re,
            rho12_im: r.rho12().im,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    run: usize,
    solver: &'static str,
    interaction: &'static str,
    component: &'static str,
    basis: String,
    params: ParamsEcho,
    rho0: StateEcho,
    t_final: f64,
    n_steps: usize,
    dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    splitting: Option<SplittingEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_m: Option<f64>,
    samples_valid: bool,
    diagnostics: &'a Diagnostics,
}

#[derive(Clone, Debug, Serialize)]
struct SplittingEcho {
    n: usize,
    dt: f64,
    strategy: String,
    literal_total_time: bool,
}

/// Output of one job: where it went and what it produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub label: String,
    pub csv: PathBuf,
    pub trajectory: Trajectory,
    pub t_m: Option<f64>,
}

fn csv_path(cfg: &RunConfig, job: &Job) -> PathBuf {
    Path::new(&cfg.output.dir).join(format!("{}_{:04}_{}.csv", cfg.output.prefix, job.point.index, job.solver.name()))
}

fn write_job(cfg: &RunConfig, job: &Job, tr: &Trajectory) -> Result<(PathBuf, Option<f64>)> {
    let path = csv_path(cfg, job);
    output::write_trajectory(&path, tr)?;
    let t_m = cfg
        .output
        .f
        .and_then(|f| measurement_duration(job.point.params.lambda, f).ok());
    let (n_steps, dt) = match &job.splitting {
        Some(r) => (r.n, r.dt),
        None => (job.scenario.n_steps, job.scenario.dt()),
    };
    let meta = Sidecar {
        tool: "ftmeas",
        version: env!("CARGO_PKG_VERSION"),
        run: job.point.index,
        solver: job.solver.name(),
        interaction: job.scenario.interaction.short(),
        component: match job.scenario.component {
            Component::Z => "z",
            Component::X => "x",
        },
        basis: tr.basis.name().to_ascii_lowercase(),
        params: (&job.point.params).into(),
        rho0: (&job.scenario.rho0).into(),
        t_final: job.scenario.t_final,
        n_steps,
        dt,
        splitting: job.splitting.as_ref().map(|r| SplittingEcho {
            n: r.n,
            dt: r.dt,
            strategy: format!("{:?}", r.strategy),
            literal_total_time: r.weights.sin_argument == SinArgument::TotalTime,
        }),
        t_m,
        samples_valid: output::samples_valid(&tr.diagnostics),
        diagnostics: &tr.diagnostics,
    };
    output::write_json(&output::sidecar_path(&path), &meta)?;
    Ok((path, t_m))
}

/// Solve every job in parallel, one file pair per job. The result order
/// follows the plan regardless of scheduling.
pub fn execute(cfg: &RunConfig, jobs: &[Job]) -> Result<Vec<RunOutput>> {
    output::ensure_dir(Path::new(&cfg.output.dir))?;
    jobs.par_iter()
        .map(|job| {
            let tr = job.solve()?;
            let (csv, t_m) = write_job(cfg, job, &tr)?;
            Ok(RunOutput {
                label: job.label(),
                csv,
                trajectory: tr,
                t_m,
            })
        })
        .collect::<Vec<Result<RunOutput>>>()
        .into_iter()
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<Vec<RunOutput>> {
    let jobs = plan(cfg, cfg.scenario.solver)?;
    execute(cfg, &jobs)
}

/// Pointwise differences between the two solvers at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub run: usize,
    pub lambda: f64,
    pub eta: f64,
    pub omega0: f64,
    pub temperature: f64,
    /// ρ₁₁ in the measured (x) basis.
    pub max_rho11: f64,
    pub rms_rho11: f64,
    /// |ρ₁₂| in the measured (x) basis.
    pub max_abs_rho12: f64,
    pub rms_abs_rho12: f64,
    /// |ρ₁₂| in the z basis, the coherence the x measurement destroys.
    pub max_abs_rho12_z: f64,
    pub rms_abs_rho12_z: f64,
}

/// ρ₁₂ in the z basis from a state given in the x basis.
pub fn z_coherence(rho11_x: f64, rho12_x: C64) -> C64 {
    C64::new(rho11_x - 0.5, -rho12_x.im)
}

fn max_rms(d: &[f64]) -> (f64, f64) {
    let max = d.iter().cloned().fold(0.0, f64::max);
    let rms = (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt();
    (max, rms)
}

/// Differences on the splitting grid, where the hybrid grid is a refinement.
pub fn compare_trajectories(hybrid: &Trajectory, split: &Trajectory) -> [(f64, f64); 3] {
    let stride = (hybrid.len() - 1) / (split.len() - 1);
    let (mut d11, mut d12, mut dz) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..split.len() {
        let j = k * stride;
        d11.push((hybrid.rho11[j] - split.rho11[k]).abs());
        d12.push((hybrid.rho12[j].norm() - split.rho12[k].norm()).abs());
        let zh = z_coherence(hybrid.rho11[j], hybrid.rho12[j]).norm();
        let zs = z_coherence(split.rho11[k], split.rho12[k]).norm();
        dz.push((zh - zs).abs());
    }
    [max_rms(&d11), max_rms(&d12), max_rms(&dz)]
}

pub fn compare(cfg: &RunConfig) -> Result<Vec<CompareRow>> {
    if cfg.interaction()? == Interaction::AmplitudeDamping {
        return Err(CliError::Unsupported(
            "compare needs both solvers, and the splitting solver does not cover amplitude damping".into(),
        ));
    }
    let jobs = plan(cfg, SolverChoice::Both)?;
    let outs = execute(cfg, &jobs)?;
    let rows: Vec<CompareRow> = jobs
        .chunks(2)
        .zip(outs.chunks(2))
        .map(|(j, o)| {
            let p = &j[0].point.params;
            let [a, b, c] = compare_trajectories(&o[0].trajectory, &o[1].trajectory);
            CompareRow {
                run: j[0].point.index,
                lambda: p.lambda,
                eta: p.eta,
                omega0: p.omega0,
                temperature: p.temperature.temperature(),
                max_rho11: a.0,
                rms_rho11: a.1,
                max_abs_rho12: b.0,
                rms_abs_rho12: b.1,
                max_abs_rho12_z: c.0,
                rms_abs_rho12_z: c.1,
            }
        })
        .collect();
    let path = Path::new(&cfg.output.dir).join(format!("{}_compare.csv", cfg.output.prefix));
    let mut w = csv::Writer::from_path(&path).map_err(|source| CliError::Csv {
        path: path.clone(),
        source,
    })?;
    w.write_record([
        "run",
        "lambda",
        "eta",
        "omega0",
        "temperature",
        "max_rho11",
        "rms_rho11",
        "max_abs_rho12",
        "rms_abs_rho12",
        "max_abs_rho12_z",
        "rms_abs_rho12_z",
    ])
    .and_then(|_| {
        rows.iter().try_for_each(|r| {
            let mut rec = vec![r.run.to_string()];
            rec.extend(
                [
                    r.lambda,
                    r.eta,
                    r.omega0,
                    r.temperature,
                    r.max_rho11,
                    r.rms_rho11,
                    r.max_abs_rho12,
                    r.rms_abs_rho12,
                    r.max_abs_rho12_z,
                    r.rms_abs_rho12_z,
                ]
                .map(output::fmt_f64),
            );
            w.write_record(rec)
        })
    })
    .map_err(|source| CliError::Csv {
        path: path.clone(),
        source,
    })?;
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(rows)
}
