//! CSV trajectories and their JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use ftmeas_core::experiment::BSample;
use ftmeas_core::hybrid::{Diagnostics, Trajectory};
use ftmeas_core::qubit::POSITIVITY_TOL;

use crate::error::{CliError, Result};

pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "rho11", "re_rho12", "im_rho12", "abs_rho12", "basis", "solver"];
pub const BSAMPLE_HEADER: [&str; 3] = ["tau", "b_hat", "sigma"];

/// Samples must satisfy trace and Hermiticity to this tolerance to be
/// reported as valid.
pub const SAMPLE_TOL: f64 = 1e-10;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_trajectory(path: &Path, tr: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err(path))?;
    let basis = tr.basis.name().to_ascii_lowercase();
    for k in 0..tr.len() {
        let c = tr.rho12[k];
        w.write_record([
            fmt_f64(tr.times[k]),
            fmt_f64(tr.rho11[k]),
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(c.norm()),
            basis.clone(),
            tr.solver_id.clone(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_bsamples(path: &Path, samples: &[BSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(BSAMPLE_HEADER).map_err(csv_err(path))?;
    for s in samples {
        w.write_record([fmt_f64(s.tau), fmt_f64(s.b_hat), fmt_f64(s.sigma)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_bsamples(path: &Path) -> Result<Vec<BSample>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("metadata serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `<stem>.json` next to `<stem>.csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Whether every sample met the density-matrix invariants.
pub fn samples_valid(d: &Diagnostics) -> bool {
    d.is_clean(SAMPLE_TOL) && d.min_eigenvalue >= POSITIVITY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, 123456.789] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
