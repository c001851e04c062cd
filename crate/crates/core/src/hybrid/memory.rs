//! Memory integrals on the half-step grid and the fixed-step RK4 driver.
//!
//! Coefficients are sampled at t_j = j·h with h = Δt/2, so every RK4 stage
//! (t, t + Δt/2, t + Δt) lands on a sample. The integral ∫₀^{t_j} f(t') dt'
//! uses composite Simpson, finished with the 3/8 rule when j is odd; the
//! single interval j = 1 uses the three-point rule (5f₀ + 8f₁ − f₂)h/12.

use std::ops::{Add, Mul};

use crate::qubit::{Mat2, C64};

/// ∫₀^{jh} f(t') dt' from samples f(i) = f(ih). For j = 1 the sample i = 2
/// lies past the upper limit.
pub fn memory_integral<T, F>(j: usize, h: f64, mut f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(usize) -> T,
{
    match j {
        0 => T::default(),
        1 => (f(0) * 5.0 + f(1) * 8.0 + f(2) * -1.0) * (h / 12.0),
        _ => {
            let simpson_end = if j.is_multiple_of(2) { j } else { j - 3 };
            let mut acc = T::default();
            if simpson_end > 0 {
                acc = f(0) + f(simpson_end);
                for i in 1..simpson_end {
                    acc = acc + f(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc = acc * (h / 3.0);
            }
            if simpson_end < j {
                let m = simpson_end;
                let tail = f(m) + f(m + 1) * 3.0 + f(m + 2) * 3.0 + f(m + 3);
                acc = acc + tail * (3.0 * h / 8.0);
            }
            acc
        }
    }
}

/// Linear system dy/dt = A(t) y + b(t) for a complex 2-vector.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinearCoef {
    pub a: Mat2,
    pub b: [C64; 2],
}

impl LinearCoef {
    #[inline]
    fn rhs(&self, y: [C64; 2]) -> [C64; 2] {
        let ay = self.a.apply(y);
        [ay[0] + self.b[0], ay[1] + self.b[1]]
    }
}

#[inline]
fn axpy(y: [C64; 2], s: f64, k: [C64; 2]) -> [C64; 2] {
    [y[0] + k[0] * s, y[1] + k[1] * s]
}

/// Classical RK4 with step Δt = 2h over `coef.len() = 2n + 1` half-grid
/// coefficients; returns the n + 1 full-grid states.
pub fn rk4_linear(y0: [C64; 2], dt: f64, coef: &[LinearCoef]) -> Vec<[C64; 2]> {
    assert!(coef.len() % 2 == 1, "half-grid coefficient count must be odd");
    let n = coef.len() / 2;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(y);
    for k in 0..n {
        let (c0, c1, c2) = (&coef[2 * k], &coef[2 * k + 1], &coef[2 * k + 2]);
        let k1 = c0.rhs(y);
        let k2 = c1.rhs(axpy(y, 0.5 * dt, k1));
        let k3 = c1.rhs(axpy(y, 0.5 * dt, k2));
        let k4 = c2.rhs(axpy(y, dt, k3));
        for i in 0..2 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        out.push(y);
    }
    out
}

/// Values of a function on the symmetric index range −m..=m of a uniform grid.
pub struct Sampled<T> {
    offset: usize,
    values: Vec<T>,
}

impl<T: Copy> Sampled<T> {
    pub fn new(m: usize, h: f64, f: impl Fn(f64) -> T) -> Self {
        let values = (0..=2 * m).map(|i| f((i as isize - m as isize) as f64 * h)).collect();
        Sampled { offset: m, values }
    }

    #[inline]
    pub fn at(&self, k: isize) -> T {
        self.values[(k + self.offset as isize) as usize]
    }
}
