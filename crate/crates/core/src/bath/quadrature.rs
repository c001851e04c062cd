//! Composite Gauss–Legendre quadrature with panel doubling.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Points per panel.
pub const GL_ORDER: usize = 16;
const REL_TOL: f64 = 1e-9;
const MAX_DOUBLINGS: u32 = 10;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Fixed composite rule: `panels` equal panels of `GL_ORDER` points.
/// Returns the integral and the integral of the componentwise modulus.
pub fn composite<const M: usize, F>(f: &F, a: f64, b: f64, panels: usize) -> ([f64; M], [f64; M])
where
    F: Fn(f64) -> [f64; M],
{
    let (x, w) = rule();
    let h = (b - a) / panels as f64;
    let mut sum = [0.0; M];
    let mut abs = [0.0; M];
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(w) {
            let v = f(mid + 0.5 * h * xi);
            for k in 0..M {
                sum[k] += wi * v[k];
                abs[k] += wi * v[k].abs();
            }
        }
    }
    for k in 0..M {
        sum[k] *= 0.5 * h;
        abs[k] *= 0.5 * h;
    }
    (sum, abs)
}

/// Double the panel count from `panels` until two successive estimates agree
/// to 1e-9 relative to max(|I|, ∫|f|) in every component.
pub fn integrate<const M: usize, F>(f: F, a: f64, b: f64, panels: usize) -> Result<[f64; M]>
where
    F: Fn(f64) -> [f64; M],
{
    let mut n = panels.max(1);
    let (mut prev, _) = composite(&f, a, b, n);
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let (cur, abs) = composite(&f, a, b, n);
        let ok = (0..M).all(|k| {
            let scale = cur[k].abs().max(abs[k]);
            (cur[k] - prev[k]).abs() <= REL_TOL * scale || scale == 0.0
        });
        if ok {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no convergence on [{a}, {b}] after {n} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // degree 2n-1 = 31 is exact
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(s, 2.0 / 31.0, epsilon = 1e-14);
    }

    #[test]
    fn exponential_moment() {
        let v = integrate(|x| [x * (-x).exp()], 0.0, 40.0, 16).unwrap();
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫₀^40 e^{-x} cos(10x) dx = 1/101 (up to e^{-40})
        let v = integrate(|x| [(-x).exp() * (10.0 * x).cos()], 0.0, 40.0, 16).unwrap();
        assert_relative_eq!(v[0], 1.0 / 101.0, epsilon = 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x: f64| [(1e6 * x * x).sin()], 0.0, 40.0, 1);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
