use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ftmeas_cli::experiment::run_experiment;
use ftmeas_cli::output::fmt_f64;
use ftmeas_cli::runner::{compare, run};
use ftmeas_cli::{load_config, CliError};
use ftmeas_core::noiseless::measurement_duration;

/// Finite-time measurement of a qubit coupled to an Ohmic bath.
#[derive(Parser)]
#[command(name = "ftmeas", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every run of a configuration and write CSV trajectories.
    Run { config: PathBuf },
    /// Run hybrid and splitting solvers side by side and report differences.
    Compare { config: PathBuf },
    /// Synthesize weak-measurement data and fit λ².
    Experiment { config: PathBuf },
    /// Measurement duration t_M = −ln f / (2λ²).
    Tm {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        f: f64,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            for out in run(&cfg)? {
                let d = &out.trajectory.diagnostics;
                for w in &d.warnings {
                    eprintln!("warning: run {}: {w}", out.label);
                }
                match out.t_m {
                    Some(t) => println!("{} -> {} (t_M = {})", out.label, out.csv.display(), fmt_f64(t)),
                    None => println!("{} -> {}", out.label, out.csv.display()),
                }
            }
        }
        Command::Compare { config } => {
            let cfg = load_config(&config)?;
            println!("run,lambda,eta,max_abs_rho12_z,rms_abs_rho12_z,max_abs_rho12,max_rho11");
            for r in compare(&cfg)? {
                println!(
                    "{:04},{},{},{},{},{},{}",
                    r.run,
                    r.lambda,
                    r.eta,
                    fmt_f64(r.max_abs_rho12_z),
                    fmt_f64(r.rms_abs_rho12_z),
                    fmt_f64(r.max_abs_rho12),
                    fmt_f64(r.max_rho11)
                );
            }
        }
        Command::Experiment { config } => {
            let cfg = load_config(&config)?;
            let r = run_experiment(&cfg)?;
            println!("samples -> {}", r.csv.display());
            println!(
                "lambda^2 = {} +/- {} (true {}, {:.2} stderr)",
                fmt_f64(r.lambda_sq_hat),
                fmt_f64(r.stderr),
                fmt_f64(r.lambda_sq_true),
                r.z_score()
            );
        }
        Command::Tm { lambda, f } => {
            let t = measurement_duration(lambda, f).map_err(|e| {
                let field = if lambda > 0.0 && lambda.is_finite() { "f" } else { "lambda" };
                CliError::validation(field, e.to_string())
            })?;
            println!("t_M = {}", fmt_f64(t));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
