//! Superoperator splitting for phase damping under a σ_x measurement.
//!
//! The coherence vector v = (ρ₁₂, ρ₂₁) after N steps of length Δt is
//!
//!   v(t) = e^{−λ²t} Σ_q w(q) A_{q₁} ⋯ A_{q_N} v(0),   w(q) = exp(Σ_{m,n} q_m q_n W_{mn}),
//!
//! and each product collapses to [Π_n c(q_n, q_{n+1})] e_{q₁} r_{q_N}ᵀ with
//! A_q = e_q r_qᵀ, r₊ = (c₊, c₋), r₋ = (c₋, c̄₊), and pair factor c₊, c̄₊ or c₋
//! for (+,+), (−,−) or differing signs. Only the end signs and three pair
//! counts matter, so sequences are folded into four class sums S[q₁][q_N].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::kernels::SpectralDensity;
use crate::bath::weights::{splitting_weights_with, WeightMatrix, WeightOptions};
use crate::error::{Error, Result};
use crate::hybrid::Trajectory;
use crate::noiseless::{c_factors, ModelParams};
use crate::qubit::{Basis, DensityMatrix, Mat2, C64};

/// Hard cap on the number of steps (2^24 sequences).
pub const MAX_STEPS: usize = 24;
pub const SOLVER_ID: &str = "splitting";
const SEGMENTS: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    BruteForce,
    #[default]
    GrayCode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplittingRun {
    pub n: usize,
    pub dt: f64,
    pub params: ModelParams,
    pub rho0: DensityMatrix,
    pub strategy: Strategy,
    pub weights: WeightOptions,
}

impl SplittingRun {
    pub fn new(n: usize, dt: f64, params: ModelParams, rho0: DensityMatrix) -> Self {
        SplittingRun {
            n,
            dt,
            params,
            rho0,
            strategy: Strategy::GrayCode,
            weights: WeightOptions::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.n > MAX_STEPS {
            return Err(Error::Cap(self.n));
        }
        if self.n == 0 {
            return Err(Error::Range { name: "N", value: 0.0 });
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Range { name: "dt", value: self.dt });
        }
        if self.rho0.basis() != Basis::Z {
            return Err(Error::Basis {
                expected: Basis::Z.name(),
                found: self.rho0.basis().name(),
            });
        }
        self.params.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplittingResult {
    pub t: f64,
    pub rho11: f64,
    pub rho12: C64,
    pub rho21: C64,
}

impl SplittingResult {
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(
            Mat2::new(C64::new(self.rho11, 0.0), self.rho12, self.rho21, C64::new(1.0 - self.rho11, 0.0)),
            Basis::Z,
        )
    }
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Compensated) {
        self.add(other.sum);
        self.add(other.c);
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Compensated accumulators for the four (q₁, q_N) classes, real and imaginary parts.
#[derive(Clone, Copy, Debug, Default)]
struct ClassSums([Compensated; 8]);

impl ClassSums {
    #[inline]
    fn add(&mut self, first_neg: bool, last_neg: bool, z: C64) {
        let slot = 4 * first_neg as usize + 2 * last_neg as usize;
        self.0[slot].add(z.re);
        self.0[slot + 1].add(z.im);
    }

    fn merge(&mut self, other: &ClassSums) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.merge(b);
        }
    }

    /// S[a][b] with index 0 for +, 1 for −.
    fn matrix(&self) -> Mat2 {
        let v = |s: usize| C64::new(self.0[s].value(), self.0[s + 1].value());
        Mat2::new(v(0), v(2), v(4), v(6))
    }
}

/// Powers c^k, k = 0..=n, of the three pair factors.
struct PairPowers {
    pp: Vec<C64>,
    mm: Vec<C64>,
    diff: Vec<C64>,
}

impl PairPowers {
    fn new(cp: C64, cm: C64, n: usize) -> Self {
        let powers = |c: C64| {
            let mut v = Vec::with_capacity(n + 1);
            let mut x = C64::new(1.0, 0.0);
            for _ in 0..=n {
                v.push(x);
                x *= c;
            }
            v
        };
        PairPowers {
            pp: powers(cp),
            mm: powers(cp.conj()),
            diff: powers(cm),
        }
    }

    #[inline]
    fn product(&self, counts: [usize; 3]) -> C64 {
        self.pp[counts[0]] * self.mm[counts[1]] * self.diff[counts[2]]
    }
}

#[inline]
fn pair_class(a: i8, b: i8) -> usize {
    match (a, b) {
        (1, 1) => 0,
        (-1, -1) => 1,
        _ => 2,
    }
}

fn signs_of(bits: u64, n: usize) -> Vec<i8> {
    (0..n).map(|k| if bits >> k & 1 == 0 { 1 } else { -1 }).collect()
}

fn pair_counts(q: &[i8]) -> [usize; 3] {
    let mut c = [0usize; 3];
    for w in q.windows(2) {
        c[pair_class(w[0], w[1])] += 1;
    }
    c
}

fn segment_bounds(total: u64) -> Vec<(u64, u64)> {
    let segs = (SEGMENTS as u64).min(total);
    (0..segs).map(|s| (s * total / segs, (s + 1) * total / segs)).collect()
}

fn brute_segment(w: &WeightMatrix, pw: &PairPowers, lo: u64, hi: u64) -> ClassSums {
    let n = w.n();
    let mut acc = ClassSums::default();
    for bits in lo..hi {
        let q = signs_of(bits, n);
        let term = pw.product(pair_counts(&q)) * w.log_weight(&q).exp();
        acc.add(q[0] < 0, q[n - 1] < 0, term);
    }
    acc
}

fn gray_segment(w: &WeightMatrix, pw: &PairPowers, lo: u64, hi: u64) -> ClassSums {
    let n = w.n();
    let mut acc = ClassSums::default();
    let mut q = signs_of(lo ^ (lo >> 1), n);
    let mut log_w = w.log_weight(&q);
    // field h_k = Σ_{m≠k} q_m W_km
    let mut field: Vec<f64> = (0..n)
        .map(|k| (0..n).filter(|&m| m != k).map(|m| q[m] as f64 * w.entry(k, m)).sum())
        .collect();
    let mut counts = pair_counts(&q);
    let row = w.toeplitz();
    let mut i = lo;
    loop {
        acc.add(q[0] < 0, q[n - 1] < 0, pw.product(counts) * log_w.exp());
        i += 1;
        if i >= hi {
            break;
        }
        let k = i.trailing_zeros() as usize;
        let old = q[k];
        log_w -= 4.0 * old as f64 * field[k];
        let shift = -2.0 * old as f64;
        for (m, f) in field.iter_mut().enumerate() {
            if m != k {
                *f += shift * row[m.abs_diff(k)];
            }
        }
        if k > 0 {
            counts[pair_class(q[k - 1], old)] -= 1;
            counts[pair_class(q[k - 1], -old)] += 1;
        }
        if k + 1 < n {
            counts[pair_class(old, q[k + 1])] -= 1;
            counts[pair_class(-old, q[k + 1])] += 1;
        }
        q[k] = -old;
    }
    acc
}

/// Σ_q w(q) Π c over all 2^N sequences, folded into S[q₁][q_N]
/// (index 0 for +1, 1 for −1).
pub fn sequence_sum(weights: &WeightMatrix, cp: C64, cm: C64, strategy: Strategy) -> Result<Mat2> {
    let n = weights.n();
    if n > MAX_STEPS {
        return Err(Error::Cap(n));
    }
    let pw = PairPowers::new(cp, cm, n);
    let total = 1u64 << n;
    let parts: Vec<ClassSums> = segment_bounds(total)
        .into_par_iter()
        .map(|(lo, hi)| match strategy {
            Strategy::BruteForce => brute_segment(weights, &pw, lo, hi),
            Strategy::GrayCode => gray_segment(weights, &pw, lo, hi),
        })
        .collect();
    let mut acc = ClassSums::default();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.matrix())
}

/// Collapse the class sums into the 2×2 map acting on (ρ₁₂, ρ₂₁):
/// M = Σ_{a,b} S[a][b] e_a r_bᵀ.
pub fn coherence_map(s: &Mat2, cp: C64, cm: C64) -> Mat2 {
    let r = [[cp, cm], [cm, cp.conj()]];
    let mut m = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for col in 0..2 {
                m.0[a][col] += s.get(a, b) * r[b][col];
            }
        }
    }
    m
}

fn evaluate(run: &SplittingRun, n: usize, weights: &WeightMatrix) -> Result<SplittingResult> {
    let p = &run.params;
    let (cp, cm) = c_factors(p, run.dt);
    let s = sequence_sum(weights, cp, cm, run.strategy)?;
    let t = n as f64 * run.dt;
    let map = coherence_map(&s, cp, cm).scale(C64::new((-p.rate() * t).exp(), 0.0));
    let v = map.apply([run.rho0.rho12(), run.rho0.rho21()]);
    Ok(SplittingResult {
        t,
        rho11: 0.5 + (run.rho0.rho11() - 0.5) * (-2.0 * p.rate() * t).exp(),
        rho12: v[0],
        rho21: v[1],
    })
}

fn weights_for(run: &SplittingRun, n: usize) -> Result<WeightMatrix> {
    splitting_weights_with(n, run.dt, &SpectralDensity::from(&run.params), run.params.temperature, &run.weights)
}

/// State after N steps. Populations follow the noiseless relaxation, which
/// is exact here: a σ_z bath leaves the z populations untouched.
pub fn solve_pd_x_exact(run: &SplittingRun) -> Result<SplittingResult> {
    run.check()?;
    let w = weights_for(run, run.n)?;
    evaluate(run, run.n, &w)
}

/// States after k = 0..=N steps, as a trajectory in the σ_x basis.
pub fn solve_pd_x_trajectory(run: &SplittingRun) -> Result<Trajectory> {
    run.check()?;
    let full = weights_for(run, run.n)?;
    let mut states = vec![run.rho0.to_x_basis()?];
    let mut times = vec![0.0];
    for k in 1..=run.n {
        let w = match run.weights.sin_argument {
            crate::bath::SinArgument::Step => WeightMatrix::from_toeplitz(full.toeplitz()[..k].to_vec()),
            crate::bath::SinArgument::TotalTime => weights_for(run, k)?,
        };
        let r = evaluate(run, k, &w)?;
        times.push(r.t);
        states.push(r.density().to_x_basis()?);
    }
    Ok(Trajectory::from_states(&times, &states, Basis::X, SOLVER_ID, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::weights::splitting_weights;
    use crate::noiseless::{propagate_x_meas, step_matrices, Temperature};
    use crate::qubit::make_density;

    fn plus() -> DensityMatrix {
        make_density(0.5, C64::new(0.5, 0.0), Basis::Z).unwrap()
    }

    /// Literal sum of weighted 2×2 matrix products over all sequences.
    fn matrix_oracle(p: &ModelParams, dt: f64, w: &WeightMatrix) -> Mat2 {
        let n = w.n();
        let (ap, am) = step_matrices(p, dt);
        let mut total = Mat2::zeros();
        for bits in 0..1u64 << n {
            let q = signs_of(bits, n);
            let mut prod = Mat2::identity();
            for &s in &q {
                prod = prod * if s > 0 { ap } else { am };
            }
            total = total + prod.scale(C64::new(w.log_weight(&q).exp(), 0.0));
        }
        total
    }

    #[test]
    fn gray_matches_brute_exhaustively() {
        let (cp, cm) = (C64::new(0.9, -0.3), C64::new(0.2, 0.0));
        for n in 1..=8 {
            let row: Vec<f64> = (0..n).map(|d| -0.1 / (1.0 + d as f64) + 0.01 * d as f64).collect();
            let w = WeightMatrix::from_toeplitz(row);
            let a = sequence_sum(&w, cp, cm, Strategy::BruteForce).unwrap();
            let b = sequence_sum(&w, cp, cm, Strategy::GrayCode).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn collapsed_sum_matches_matrix_products() {
        let p = ModelParams {
            lambda: 0.8,
            omega0: 0.4,
            ..ModelParams::default()
        };
        let dt = 0.2;
        let (cp, cm) = c_factors(&p, dt);
        let w = WeightMatrix::from_toeplitz(vec![-0.05, 0.02, -0.01]);
        let s = sequence_sum(&w, cp, cm, Strategy::GrayCode).unwrap();
        let m = coherence_map(&s, cp, cm);
        assert!(m.max_abs_diff(&matrix_oracle(&p, dt, &w)) < 1e-13);
    }

    #[test]
    fn two_steps_with_single_coupling() {
        // W₀ = 0, W₁ = a: sequences (++), (−−) carry e^{2a}, mixed ones e^{−2a}
        let a = 0.3;
        let w = WeightMatrix::from_toeplitz(vec![0.0, a]);
        let (cp, cm) = (C64::new(0.7, 0.2), C64::new(0.4, 0.0));
        let s = sequence_sum(&w, cp, cm, Strategy::GrayCode).unwrap();
        let same = (2.0 * a).exp();
        let mixed = (-2.0 * a).exp();
        assert!((s.get(0, 0) - cp * same).norm() < 1e-15);
        assert!((s.get(1, 1) - cp.conj() * same).norm() < 1e-15);
        assert!((s.get(0, 1) - cm * mixed).norm() < 1e-15);
        assert!((s.get(1, 0) - cm * mixed).norm() < 1e-15);
    }

    #[test]
    fn no_bath_reproduces_noiseless_propagator() {
        let rho = make_density(0.8, C64::new(0.1, 0.3), Basis::Z).unwrap();
        for (lambda, omega0) in [(1.0, 0.0), (0.5, 1.0), (2.0, 1.0)] {
            let p = ModelParams {
                lambda,
                omega0,
                temperature: Temperature::Beta(1.0),
                ..ModelParams::default()
            };
            let run = SplittingRun::new(10, 0.1, p, rho);
            let r = solve_pd_x_exact(&run).unwrap();
            let e = propagate_x_meas(&rho, &p, 1.0);
            assert!((r.rho12 - e.rho12()).norm() < 1e-10);
            assert!((r.rho21 - e.rho21()).norm() < 1e-10);
            assert!((r.rho11 - e.rho11()).abs() < 1e-14);
        }
    }

    #[test]
    fn single_step_thermal_factor() {
        let p = ModelParams {
            lambda: 0.0,
            eta: 0.2,
            temperature: Temperature::Beta(2.0),
            ..ModelParams::default()
        };
        let run = SplittingRun::new(1, 0.4, p, plus());
        let r = solve_pd_x_exact(&run).unwrap();
        let w = splitting_weights(1, 0.4, &SpectralDensity::new(0.2, 1.0), Temperature::Beta(2.0)).unwrap();
        assert!((r.rho12 - C64::new(0.5 * w.lag(0).exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn output_is_hermitian() {
        let rho = make_density(0.3, C64::new(-0.2, 0.35), Basis::Z).unwrap();
        let p = ModelParams {
            lambda: 0.9,
            eta: 0.3,
            omega0: 0.7,
            temperature: Temperature::Beta(0.7),
            ..ModelParams::default()
        };
        let r = solve_pd_x_exact(&SplittingRun::new(9, 0.15, p, rho)).unwrap();
        assert!((r.rho21 - r.rho12.conj()).norm() < 1e-11);
    }

    #[test]
    fn trotter_convergence() {
        let p = ModelParams {
            lambda: 1.0,
            eta: 0.25,
            ..ModelParams::default()
        };
        let a = solve_pd_x_exact(&SplittingRun::new(12, 1.0 / 12.0, p, plus())).unwrap();
        let b = solve_pd_x_exact(&SplittingRun::new(24, 1.0 / 24.0, p, plus())).unwrap();
        assert!((a.rho12 - b.rho12).norm() < 0.02 * b.rho12.norm());
    }

    #[test]
    fn cap_is_enforced() {
        let run = SplittingRun::new(25, 0.1, ModelParams::default(), plus());
        assert_eq!(solve_pd_x_exact(&run), Err(Error::Cap(25)));
    }

    #[test]
    fn trajectory_shares_weights() {
        let p = ModelParams {
            lambda: 1.0,
            eta: 0.1,
            ..ModelParams::default()
        };
        let run = SplittingRun::new(6, 0.1, p, plus());
        let tr = solve_pd_x_trajectory(&run).unwrap();
        assert_eq!(tr.len(), 7);
        let last = solve_pd_x_exact(&run).unwrap().density().to_x_basis().unwrap();
        assert!((tr.rho11[6] - last.rho11()).abs() < 1e-15);
        let mid = solve_pd_x_exact(&SplittingRun { n: 3, ..run }).unwrap().density().to_x_basis().unwrap();
        assert!((tr.rho11[3] - mid.rho11()).abs() < 1e-15);
    }
}
