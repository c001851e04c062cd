//! Complex log-Gamma by the Lanczos approximation (g = 7, 9 terms).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qubit::C64;

const G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// ln Γ(z). For Re z ≥ ½ the result is the continuous branch that is real on
/// the positive axis; the left half-plane goes through the reflection formula.
pub fn log_gamma_complex(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        return Ok(C64::new(PI.ln(), 0.0) - s.ln() - log_gamma_complex(C64::new(1.0, 0.0) - z)?);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    Ok(C64::new(HALF_LN_TWO_PI, 0.0) + (z + 0.5) * t.ln() - t + x.ln())
}

/// ln Γ(x) for real x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(log_gamma_complex(C64::new(x, 0.0))?.re)
}
