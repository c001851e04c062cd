//! Closed-form evolution of the system plus apparatus without environment,
//! the per-step matrices of the splitting method, and the measurement
//! duration estimate.
//!
//! Units: ħ = k_B = 1, so λ² is a rate and every frequency is an inverse time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{Basis, DensityMatrix, Mat2, C64, I, ONE, ZERO};

/// Bath temperature. Zero temperature is kept as a sentinel so that the Bose
/// factors can be taken analytically instead of through a huge β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Temperature {
    Zero,
    /// Inverse temperature β = 1/T.
    Beta(f64),
}

impl Temperature {
    /// `T = 0` maps to the sentinel, anything else to β = 1/T.
    pub fn from_temperature(t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Range {
                name: "temperature",
                value: t,
            });
        }
        Ok(if t == 0.0 {
            Temperature::Zero
        } else {
            Temperature::Beta(1.0 / t)
        })
    }

    pub fn beta(self) -> Option<f64> {
        match self {
            Temperature::Zero => None,
            Temperature::Beta(b) => Some(b),
        }
    }

    pub fn temperature(self) -> f64 {
        match self {
            Temperature::Zero => 0.0,
            Temperature::Beta(b) => 1.0 / b,
        }
    }
}

/// Which σ component the apparatus measures (the Lindblad operator is λσ_j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Z,
    X,
}

impl Component {
    /// Eigenbasis of the measured observable.
    pub fn basis(self) -> Basis {
        match self {
            Component::Z => Basis::Z,
            Component::X => Basis::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// System–apparatus coupling (λ² is the measurement rate).
    pub lambda: f64,
    /// Dimensionless system–bath coupling.
    pub eta: f64,
    /// System frequency, H_S = ω₀σ_z.
    pub omega0: f64,
    /// Ohmic cutoff.
    pub omega_c: f64,
    pub temperature: Temperature,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            lambda: 0.0,
            eta: 0.0,
            omega0: 0.0,
            omega_c: 1.0,
            temperature: Temperature::Zero,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64, ok: bool| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(Error::Range { name, value })
            }
        };
        check("lambda", self.lambda, self.lambda >= 0.0)?;
        check("eta", self.eta, self.eta >= 0.0)?;
        check("omega0", self.omega0, self.omega0 >= 0.0)?;
        check("omega_c", self.omega_c, self.omega_c > 0.0)?;
        if let Temperature::Beta(b) = self.temperature {
            check("beta", b, b > 0.0)?;
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.lambda * self.lambda
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Hyperbolic,
    Degenerate,
    Oscillatory,
}

/// Ω = √(λ⁴ − 4ω₀²) taken as a complex square root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaBranch {
    pub omega: C64,
    pub regime: Regime,
}

const DEGENERATE_REL: f64 = 1e-9;
const TAYLOR_SWITCH: f64 = 1e-6;

impl OmegaBranch {
    pub fn new(lambda: f64, omega0: f64) -> Self {
        let l2 = lambda * lambda;
        let sq = l2 * l2 - 4.0 * omega0 * omega0;
        let omega = C64::new(sq, 0.0).sqrt();
        let scale = l2.max(2.0 * omega0);
        let regime = if (l2 - 2.0 * omega0).abs() <= DEGENERATE_REL * scale {
            Regime::Degenerate
        } else if l2 > 2.0 * omega0 {
            Regime::Hyperbolic
        } else {
            Regime::Oscillatory
        };
        OmegaBranch { omega, regime }
    }

    pub fn from_params(p: &ModelParams) -> Self {
        Self::new(p.lambda, p.omega0)
    }

    pub fn cosh(&self, t: f64) -> C64 {
        (self.omega * t).cosh()
    }

    /// sinh(Ωt)/Ω, with a Taylor series near Ωt = 0.
    pub fn sinhc(&self, t: f64) -> C64 {
        let x = self.omega * t;
        if x.norm() < TAYLOR_SWITCH {
            let x2 = x * x;
            (ONE + x2 / 6.0 + x2 * x2 / 120.0) * t
        } else {
            x.sinh() / self.omega
        }
    }
}

/// e^{(B - λ²)t} acting on (ρ₁₂, ρ₂₁) for the σ_x measurement,
/// B = [[-2iω₀, λ²], [λ², 2iω₀]].
pub(crate) fn x_meas_coherence_matrix(p: &ModelParams, t: f64) -> Mat2 {
    let branch = OmegaBranch::from_params(p);
    let ch = branch.cosh(t);
    let sc = branch.sinhc(t);
    let w = I * (2.0 * p.omega0);
    let decay = C64::new((-p.rate() * t).exp(), 0.0);
    Mat2::new(ch - w * sc, sc * p.rate(), sc * p.rate(), ch + w * sc).scale(decay)
}

impl Component {
    /// Apply e^{Ŝt} to an arbitrary 2×2 matrix in the σ_z basis. Negative `t`
    /// applies the inverse map.
    pub fn propagate_matrix(self, m: &Mat2, p: &ModelParams, t: f64) -> Mat2 {
        let g = p.rate();
        match self {
            Component::Z => {
                let f = C64::new(0.0, -2.0 * p.omega0 * t).exp() * (-2.0 * g * t).exp();
                Mat2::new(m.get(0, 0), m.get(0, 1) * f, m.get(1, 0) * f.conj(), m.get(1, 1))
            }
            Component::X => {
                let relax = (-2.0 * g * t).exp();
                let half = C64::new(0.5, 0.0);
                let p11 = half + (m.get(0, 0) - half) * relax;
                let p22 = half + (m.get(1, 1) - half) * relax;
                let [c12, c21] = x_meas_coherence_matrix(p, t).apply([m.get(0, 1), m.get(1, 0)]);
                Mat2::new(p11, c12, c21, p22)
            }
        }
    }
}

fn require_z(rho: &DensityMatrix) {
    debug_assert_eq!(rho.basis(), Basis::Z, "noiseless propagators work in the σ_z basis");
}

/// Noiseless evolution for L = λσ_z: populations frozen, coherence damped and rotated.
pub fn propagate_z_meas(rho0: &DensityMatrix, p: &ModelParams, t: f64) -> DensityMatrix {
    require_z(rho0);
    DensityMatrix::from_matrix_unchecked(Component::Z.propagate_matrix(rho0.matrix(), p, t), Basis::Z)
}

/// Noiseless evolution for L = λσ_x, written in the σ_z basis.
pub fn propagate_x_meas(rho0: &DensityMatrix, p: &ModelParams, t: f64) -> DensityMatrix {
    require_z(rho0);
    DensityMatrix::from_matrix_unchecked(Component::X.propagate_matrix(rho0.matrix(), p, t), Basis::Z)
}

/// Per-step matrices A₊, A₋ of the splitting method; A₊ + A₋ = e^{BΔt}.
pub fn step_matrices(p: &ModelParams, dt: f64) -> (Mat2, Mat2) {
    let (cp, cm) = c_factors(p, dt);
    let cm = C64::new(cm.re, 0.0);
    let plus = Mat2::new(cp, cm, ZERO, ZERO);
    let minus = Mat2::new(ZERO, ZERO, cm, cp.conj());
    (plus, minus)
}

/// c₊ = cosh(ΩΔt) − 2iω₀ sinh(ΩΔt)/Ω and c₋ = λ² sinh(ΩΔt)/Ω.
///
/// cosh(ΩΔt) and sinh(ΩΔt)/Ω are real on both branches of Ω, so c₋ is real
/// and the second row of A₋ carries the plain conjugate of c₊.
pub fn c_factors(p: &ModelParams, dt: f64) -> (C64, C64) {
    let branch = OmegaBranch::from_params(p);
    let ch = C64::new(branch.cosh(dt).re, 0.0);
    let sc = C64::new(branch.sinhc(dt).re, 0.0);
    (ch - I * (2.0 * p.omega0) * sc, sc * p.rate())
}

/// Time after which the noiseless σ_z-measurement coherence has fallen to a
/// fraction `f` of its initial modulus: t_M = −ln f / (2λ²).
pub fn measurement_duration(lambda: f64, f: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("measurement duration needs lambda > 0, got {lambda}")));
    }
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain(format!("fraction f must lie in (0, 1), got {f}")));
    }
    Ok(-f.ln() / (2.0 * lambda * lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::make_density;
    use approx::assert_abs_diff_eq;

    fn params(lambda: f64, omega0: f64) -> ModelParams {
        ModelParams {
            lambda,
            omega0,
            ..ModelParams::default()
        }
    }

    /// Classical RK4 on the noiseless Lindblad equation dρ/dt = -iω₀[σz,ρ] + λ²(LρL − ρ).
    fn rk4_oracle(rho: Mat2, p: &ModelParams, l: Mat2, t: f64, steps: usize) -> Mat2 {
        let sz = crate::qubit::pauli::sigma_z();
        let h = sz.scale(C64::new(p.omega0, 0.0));
        let rhs = |r: Mat2| -> Mat2 {
            let comm = (h * r - r * h).scale(-I);
            comm + (l * r * l - r) * p.rate()
        };
        let dt = t / steps as f64;
        let mut r = rho;
        for _ in 0..steps {
            let k1 = rhs(r);
            let k2 = rhs(r + k1 * (dt / 2.0));
            let k3 = rhs(r + k2 * (dt / 2.0));
            let k4 = rhs(r + k3 * dt);
            r = r + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        r
    }

    #[test]
    fn z_meas_no_dynamics() {
        let rho = make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap();
        let out = propagate_z_meas(&rho, &params(0.0, 0.0), 3.7);
        assert_eq!(out.rho12(), C64::new(0.5, 0.0));
    }

    #[test]
    fn z_meas_halving_time() {
        let rho = make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap();
        let out = propagate_z_meas(&rho, &params(1.0, 0.0), std::f64::consts::LN_2 / 2.0);
        assert_abs_diff_eq!(out.rho12().re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn z_meas_matches_rk4() {
        let p = params(1.0, 1.0);
        let rho = make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap();
        let out = propagate_z_meas(&rho, &p, 0.3);
        let oracle = rk4_oracle(*rho.matrix(), &p, crate::qubit::pauli::sigma_z(), 0.3, 3000);
        let expected = C64::new(0.0, -0.6).exp() * 0.5 * (-0.6f64).exp();
        assert!((out.rho12() - expected).norm() < 1e-14);
        assert!((out.rho12() - oracle.get(0, 1)).norm() < 1e-12);
    }

    #[test]
    fn x_meas_fixed_point() {
        let rho = make_density(0.5, ZERO, Basis::Z).unwrap();
        for (l, w) in [(1.0, 0.0), (0.3, 2.0), (2.0, 0.5)] {
            let out = propagate_x_meas(&rho, &params(l, w), 1.7);
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn x_meas_relaxes_population() {
        let rho = make_density(1.0, ZERO, Basis::Z).unwrap();
        let out = propagate_x_meas(&rho, &params(1.0, 0.0), 40.0);
        assert_abs_diff_eq!(out.rho11(), 0.5, epsilon = 1e-15);
        let mid = propagate_x_meas(&rho, &params(1.0, 0.0), 0.4);
        assert_abs_diff_eq!(mid.rho11(), 0.5 + 0.5 * (-0.8f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn x_meas_matches_rk4_across_regimes() {
        let rho = make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap();
        // oscillatory, hyperbolic, degenerate
        for (l, w) in [(1.0, 1.0), (2.0, 0.5), (1.0, 0.5)] {
            let p = params(l, w);
            let out = propagate_x_meas(&rho, &p, 0.5);
            let oracle = rk4_oracle(*rho.matrix(), &p, crate::qubit::pauli::sigma_x(), 0.5, 4000);
            assert!(out.matrix().max_abs_diff(&oracle) < 1e-10, "λ={l} ω₀={w}");
        }
    }

    #[test]
    fn regime_classification() {
        assert_eq!(OmegaBranch::new(2.0, 0.5).regime, Regime::Hyperbolic);
        assert_eq!(OmegaBranch::new(1.0, 0.5).regime, Regime::Degenerate);
        assert_eq!(OmegaBranch::new(1.0, 1.0).regime, Regime::Oscillatory);
        let b = OmegaBranch::new(1.3, 0.4);
        let expect = 1.3f64.powi(4) - 4.0 * 0.16;
        assert!(((b.omega * b.omega).re - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn degenerate_branch_is_continuous() {
        let rho = make_density(0.7, C64::new(0.2, -0.3), Basis::Z).unwrap();
        let omega0 = 0.5;
        let lam = |s: f64| (2.0 * omega0 * s).sqrt();
        let t = 2.3;
        let a = propagate_x_meas(&rho, &params(lam(1.0 + 1e-7), omega0), t);
        let b = propagate_x_meas(&rho, &params(lam(1.0 - 1e-7), omega0), t);
        let c = propagate_x_meas(&rho, &params(lam(1.0), omega0), t);
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-6);
        assert!(a.matrix().max_abs_diff(c.matrix()) < 1e-6);
    }

    #[test]
    fn step_matrices_reduce_at_zero_frequency() {
        let (ap, am) = step_matrices(&params(1.0, 0.0), 1.0);
        let (c, s) = (1.0f64.cosh(), 1.0f64.sinh());
        let expect_p = Mat2::new(C64::new(c, 0.0), C64::new(s, 0.0), ZERO, ZERO);
        let expect_m = Mat2::new(ZERO, ZERO, C64::new(s, 0.0), C64::new(c, 0.0));
        assert!(ap.max_abs_diff(&expect_p) < 1e-14);
        assert!(am.max_abs_diff(&expect_m) < 1e-14);
    }

    #[test]
    fn step_matrices_free_rotation() {
        let t = 0.37;
        let (ap, am) = step_matrices(&params(0.0, 1.0), t);
        let phase = C64::new(0.0, -2.0 * t).exp();
        assert!((ap.get(0, 0) - phase).norm() < 1e-14);
        assert!(ap.get(0, 1).norm() < 1e-15);
        assert!((am.get(1, 1) - phase.conj()).norm() < 1e-14);
    }

    #[test]
    fn step_matrices_sum_to_noiseless_step() {
        let p = params(0.9, 0.7);
        let dt = 0.2;
        let n = 13;
        let (ap, am) = step_matrices(&p, dt);
        let mut m = Mat2::identity();
        for _ in 0..n {
            m = (ap + am) * m;
        }
        let m = m.scale(C64::new((-p.rate() * dt * n as f64).exp(), 0.0));
        let rho = make_density(0.5, C64::new(0.3, 0.25), Basis::Z).unwrap();
        let v = m.apply([rho.rho12(), rho.rho21()]);
        let exact = propagate_x_meas(&rho, &p, dt * n as f64);
        assert!((v[0] - exact.rho12()).norm() < 1e-12);
        assert!((v[1] - exact.rho21()).norm() < 1e-12);
    }

    #[test]
    fn c_factors_limits() {
        let (cp, cm) = c_factors(&params(1.0, 0.0), 1.0);
        assert_abs_diff_eq!(cp.re, 1.0f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(cm.re, 1.0f64.sinh(), epsilon = 1e-14);
        let (_, cm) = c_factors(&params(0.0, 0.8), 0.3);
        assert_eq!(cm, ZERO);
    }

    #[test]
    fn collapsed_product_of_three() {
        // A_a A_b = c(a,b) σx^{(1-ab)/2} A_b applied twice, against the raw product
        let p = params(0.8, 0.45);
        let dt = 0.31;
        let (ap, am) = step_matrices(&p, dt);
        let (cp, cm) = c_factors(&p, dt);
        let pick = |q: i8| if q > 0 { ap } else { am };
        let c = |a: i8, b: i8| {
            if a != b {
                cm
            } else if a > 0 {
                cp
            } else {
                cp.conj()
            }
        };
        let sx = crate::qubit::pauli::sigma_x();
        for q1 in [1i8, -1] {
            for q2 in [1i8, -1] {
                for q3 in [1i8, -1] {
                    let raw = pick(q1) * pick(q2) * pick(q3);
                    let mut collapsed = pick(q3).scale(c(q1, q2) * c(q2, q3));
                    if q1 != q3 {
                        collapsed = sx * collapsed;
                    }
                    assert!(raw.max_abs_diff(&collapsed) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn measurement_duration_values() {
        assert_abs_diff_eq!(measurement_duration(1.0, (-2.0f64).exp()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(measurement_duration(2.0, 0.5).unwrap(), std::f64::consts::LN_2 / 8.0, epsilon = 1e-15);
        assert!(measurement_duration(0.0, 0.5).is_err());
        assert!(measurement_duration(1.0, 1.0).is_err());
        assert!(measurement_duration(1.0, 0.0).is_err());
    }

    #[test]
    fn measurement_duration_round_trip() {
        let lam = 1.3;
        let f = 0.1;
        let t = measurement_duration(lam, f).unwrap();
        let rho = make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap();
        let out = propagate_z_meas(&rho, &params(lam, 0.4), t);
        assert_abs_diff_eq!(out.rho12().norm() / 0.5, f, epsilon = 1e-12);
    }
}
