//! Two-level algebra: 2×2 complex matrices, Pauli operators, density
//! matrices tagged with the basis they are written in.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-12;

/// Positivity floor below which a state is reported as unphysical.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// Dense 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zeros() -> Self {
        Mat2::default()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(C64::new(s, 0.0))
    }
}

/// Pauli matrices and ladder operators.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> Mat2 {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Mat2 {
        Mat2::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Mat2 {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// Raising operator |0⟩⟨1| = (σ_x + iσ_y)/2.
    pub fn sigma_plus() -> Mat2 {
        Mat2::new(ZERO, ONE, ZERO, ZERO)
    }

    pub fn sigma_minus() -> Mat2 {
        Mat2::new(ZERO, ZERO, ONE, ZERO)
    }
}

/// Basis a state is written in: σ_z eigenstates or σ_x eigenstates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Z => "Z",
            Basis::X => "X",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Change-of-basis matrix between σ_z and σ_x eigenstates; it is its own inverse.
pub fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

/// State of the two-level system, tagged with its basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
    basis: Basis,
}

/// Build a validated density matrix from its two independent entries.
pub fn make_density(rho11: f64, rho12: C64, basis: Basis) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&rho11) || !rho11.is_finite() {
        return Err(Error::Range {
            name: "rho11",
            value: rho11,
        });
    }
    let bound = rho11 * (1.0 - rho11);
    let coherence_sq = rho12.norm_sqr();
    if !coherence_sq.is_finite() || coherence_sq > bound + PURITY_TOL {
        return Err(Error::Positivity {
            coherence_sq,
            bound,
        });
    }
    Ok(DensityMatrix {
        m: Mat2::new(C64::new(rho11, 0.0), rho12, rho12.conj(), C64::new(1.0 - rho11, 0.0)),
        basis,
    })
}

impl DensityMatrix {
    /// Wrap a matrix without validation. Solver outputs pass through here so
    /// that invariant violations become diagnostics rather than failures.
    pub fn from_matrix_unchecked(m: Mat2, basis: Basis) -> Self {
        DensityMatrix { m, basis }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn rho11(&self) -> f64 {
        self.m.get(0, 0).re
    }

    pub fn rho22(&self) -> f64 {
        self.m.get(1, 1).re
    }

    pub fn rho12(&self) -> C64 {
        self.m.get(0, 1)
    }

    pub fn rho21(&self) -> C64 {
        self.m.get(1, 0)
    }

    /// M ρ M with M the σ_z → σ_x change of basis.
    pub fn to_x_basis(&self) -> Result<DensityMatrix> {
        if self.basis != Basis::Z {
            return Err(Error::Basis {
                expected: Basis::Z.name(),
                found: self.basis.name(),
            });
        }
        let h = hadamard();
        Ok(DensityMatrix {
            m: h * self.m * h,
            basis: Basis::X,
        })
    }

    /// Smaller eigenvalue, closed form for a Hermitian 2×2 matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.m.get(0, 0).re;
        let d = self.m.get(1, 1).re;
        let off = 0.5 * (self.m.get(0, 1) + self.m.get(1, 0).conj());
        0.5 * (a + d - ((a - d).powi(2) + 4.0 * off.norm_sqr()).sqrt())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.m.max_abs_diff(&self.m.dagger())
    }

    pub fn trace_error(&self) -> f64 {
        (self.m.trace() - ONE).norm()
    }

    /// True when the Hermiticity and trace invariants hold at their tolerances.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_error() < HERMITIAN_TOL
            && self.trace_error() < TRACE_TOL
            && self.min_eigenvalue() >= POSITIVITY_TOL
    }

    /// Expectation value Tr(ρ A).
    pub fn expectation(&self, a: &Mat2) -> f64 {
        (self.m * *a).trace().re
    }
}
