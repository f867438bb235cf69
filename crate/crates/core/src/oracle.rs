//! Reference integrator for the truncated Fourier system in the interaction
//! picture.
//!
//! For `|n| ≤ N` the coefficients `a(n, t)` evolve by
//! `da/dt = e^{in³t} NL(e^{-in³t} a)(n)`, where all convolution indices are
//! restricted to `[-N, N]` and `NL` is one of
//!
//! - `mkdv`: `-(in/3) Σ_{n1+n2+n3=n} û(n1) û(n2) û(n3)`
//! - `modified_mkdv`: `-(in/3) Σ*_{all nk ≠ n} û(n1) û(n2) û(n3) + in û(n)² û(-n)`.
//!
//! The phase factor makes every triple carry `e^{iσ(n1,n2,n3)t}`. Time stepping is
//! classical fourth-order Runge–Kutta with a compensated state update.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::cis;
use crate::par::*;
use crate::spectral::{l2_mass, CoeffSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Mkdv,
    ModifiedMkdv,
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Equation::Mkdv => "mkdv",
            Equation::ModifiedMkdv => "modified_mkdv",
        })
    }
}

impl std::str::FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mkdv" => Ok(Equation::Mkdv),
            "modified_mkdv" | "modified-mkdv" => Ok(Equation::ModifiedMkdv),
            other => Err(Error::InvalidParameter(format!("unknown equation {other:?}"))),
        }
    }
}

/// Truncated cubic convolution `Σ_{n1+n2+n3=n, |nk| ≤ N} u(n1) u(n2) u(n3)` for `|n| ≤ N`.
fn cubic_convolution(u: &CoeffSeq) -> Vec<Complex64> {
    let n_max = u.cutoff() as i64;
    let zero = Complex64::new(0.0, 0.0);
    // u * u on [-2N, 2N]
    let square: Vec<Complex64> = (-2 * n_max..=2 * n_max)
        .map(|m| {
            let lo = (m - n_max).max(-n_max);
            let hi = (m + n_max).min(n_max);
            (lo..=hi).fold(zero, |acc, k| acc + u.get(k) * u.get(m - k))
        })
        .collect();
    (-n_max..=n_max)
        .into_par_iter()
        .map(|n| {
            (-n_max..=n_max).fold(zero, |acc, k| {
                let m = n - k;
                if m.abs() > 2 * n_max {
                    acc
                } else {
                    acc + square[(m + 2 * n_max) as usize] * u.get(k)
                }
            })
        })
        .collect()
}

/// `NL(u)` at fixed coefficients, no dispersive phases.
pub fn nonlinearity(u: &CoeffSeq, equation: Equation) -> CoeffSeq {
    let full = cubic_convolution(u);
    let cutoff = u.cutoff();
    match equation {
        Equation::Mkdv => CoeffSeq::from_fn(cutoff, |n| {
            let i = (n + cutoff as i64) as usize;
            Complex64::new(0.0, -(n as f64) / 3.0) * full[i]
        }),
        Equation::ModifiedMkdv => {
            // star sum by inclusion–exclusion on the events nk = n
            let mean: Complex64 = u.modes().map(|(m, z)| z * u.get(-m)).sum();
            CoeffSeq::from_fn(cutoff, |n| {
                let i = (n + cutoff as i64) as usize;
                let un = u.get(n);
                let diag = un * un * u.get(-n);
                let mut star = full[i] - 3.0 * un * mean + 3.0 * diag;
                if n == 0 {
                    star -= un * un * un;
                }
                let nf = n as f64;
                Complex64::new(0.0, -nf / 3.0) * star + Complex64::new(0.0, nf) * diag
            })
        }
    }
}

/// `da/dt` at time `t`: `e^{in³t} NL(e^{-in³t} a)(n)`, phases from exact integer `n³`.
pub fn oracle_rhs(a: &CoeffSeq, equation: Equation, t: f64) -> CoeffSeq {
    let phase = |n: i64| cis(((n as i128).pow(3) as f64) * t);
    let u = CoeffSeq::from_fn(a.cutoff(), |n| a.get(n) * phase(n).conj());
    let nl = nonlinearity(&u, equation);
    CoeffSeq::from_fn(a.cutoff(), |n| nl.get(n) * phase(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub cutoff: usize,
    pub dt: f64,
    pub equation: Equation,
    pub steps: usize,
}

impl OracleConfig {
    /// Largest admissible step for the cutoff: `0.5 / (1 + N³)`.
    pub fn step_limit(cutoff: usize) -> f64 {
        0.5 / (1.0 + (cutoff as f64).powi(3))
    }

    /// Configuration reaching time `t` in steps of (nearly) `dt`.
    ///
    /// The step count is rounded and `dt` adjusted so that `steps·dt = t` exactly.
    pub fn for_horizon(cutoff: usize, dt: f64, equation: Equation, t: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("dt = {dt}, t = {t}")));
        }
        let steps = (t / dt).round().max(if t > 0.0 { 1.0 } else { 0.0 }) as usize;
        let dt = if steps == 0 { dt } else { t / steps as f64 };
        let cfg = Self { cutoff, dt, equation, steps };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step {}", self.dt)));
        }
        let limit = Self::step_limit(self.cutoff);
        if self.dt > limit {
            return Err(Error::StabilityGuard { dt: self.dt, limit });
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// States `a(·, t_j)` at `t_j = j·dt`, including the initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoeffSeq>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> &CoeffSeq {
        &self.states[0]
    }

    pub fn last(&self) -> &CoeffSeq {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold the initial time")
    }

    /// Largest Hermitian defect along the trajectory.
    pub fn hermitian_defect(&self) -> f64 {
        self.states.iter().map(CoeffSeq::hermitian_defect).fold(0.0, f64::max)
    }

    /// CSV with columns `t, n, re, im`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv output: {e}"));
        out.write_record(["t", "n", "re", "im"]).map_err(io)?;
        for (t, state) in self.times.iter().zip(&self.states) {
            for (n, z) in state.modes() {
                out.write_record([t.to_string(), n.to_string(), z.re.to_string(), z.im.to_string()]).map_err(io)?;
            }
        }
        out.flush().map_err(|e| Error::InvalidParameter(format!("csv output: {e}")))?;
        Ok(())
    }
}

/// Integrates `a0` for `cfg.steps` steps; `t` must equal `cfg.steps·cfg.dt`.
pub fn oracle_solve(a0: &CoeffSeq, cfg: &OracleConfig, t: f64) -> Result<Trajectory> {
    cfg.validate()?;
    if a0.cutoff() != cfg.cutoff {
        return Err(Error::CutoffMismatch { expected: cfg.cutoff, got: a0.cutoff() });
    }
    let horizon = cfg.horizon();
    if (horizon - t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} differs from steps·dt = {horizon}")));
    }
    let mut times = Vec::with_capacity(cfg.steps + 1);
    let mut states = Vec::with_capacity(cfg.steps + 1);
    times.push(0.0);
    states.push(a0.clone());
    let mut state: Vec<Complex64> = a0.values().to_vec();
    let mut compensation = vec![Complex64::new(0.0, 0.0); state.len()];
    let h = cfg.dt;
    let eq = cfg.equation;
    let seq = |v: Vec<Complex64>| CoeffSeq::from_values(cfg.cutoff, v).expect("2N+1 values");
    let axpy = |x: &[Complex64], k: &CoeffSeq, w: f64| -> CoeffSeq {
        seq(x.iter().zip(k.values()).map(|(a, b)| a + b * w).collect())
    };
    for step in 0..cfg.steps {
        let t0 = step as f64 * h;
        let t_half = (step as f64 + 0.5) * h;
        let t1 = (step + 1) as f64 * h;
        let current = seq(state.clone());
        let k1 = oracle_rhs(&current, eq, t0);
        let k2 = oracle_rhs(&axpy(&state, &k1, 0.5 * h), eq, t_half);
        let k3 = oracle_rhs(&axpy(&state, &k2, 0.5 * h), eq, t_half);
        let k4 = oracle_rhs(&axpy(&state, &k3, h), eq, t1);
        for i in 0..state.len() {
            let increment = (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i]) * (h / 6.0);
            let y = increment - compensation[i];
            let sum = state[i] + y;
            compensation[i] = (sum - state[i]) - y;
            state[i] = sum;
        }
        times.push(t1);
        states.push(seq(state.clone()));
    }
    Ok(Trajectory { times, states })
}

/// `max_j |Σ|a(t_j)|² - Σ|a(0)|²|`.
pub fn invariant_drift(trajectory: &Trajectory) -> f64 {
    let m0 = l2_mass(trajectory.initial());
    trajectory.states.iter().map(|a| (l2_mass(a) - m0).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::{classify_triple, sigma};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cosine(cutoff: usize, eps: f64) -> CoeffSeq {
        let mut a = CoeffSeq::zeros(cutoff);
        a.set(1, c(eps / 2.0, 0.0));
        a.set(-1, c(eps / 2.0, 0.0));
        a
    }

    fn sample(cutoff: usize, seed: u64) -> CoeffSeq {
        let mut state = seed ^ 0x9E37_79B9_7F4A_7C15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CoeffSeq::from_fn(cutoff, |_| c(next(), next()))
    }

    /// Triple loop over every ordered triple in the window.
    fn brute_rhs(a: &CoeffSeq, eq: Equation, t: f64) -> CoeffSeq {
        let n_max = a.cutoff() as i64;
        CoeffSeq::from_fn(a.cutoff(), |n| {
            let mut acc = c(0.0, 0.0);
            for n1 in -n_max..=n_max {
                for n2 in -n_max..=n_max {
                    let n3 = n - n1 - n2;
                    if n3.abs() > n_max {
                        continue;
                    }
                    let prod = a.get(n1) * a.get(n2) * a.get(n3);
                    let s = sigma(n1, n2, n3).unwrap() as f64;
                    let phase = cis(s * t);
                    match eq {
                        Equation::Mkdv => acc += c(0.0, -(n as f64) / 3.0) * phase * prod,
                        Equation::ModifiedMkdv => match classify_triple(n, [n1, n2, n3]) {
                            Some(false) => acc += c(0.0, -(n as f64) / 3.0) * phase * prod,
                            Some(true) => acc += c(0.0, n as f64) * prod,
                            None => {}
                        },
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn zero_data_zero_rhs() {
        let z = CoeffSeq::zeros(5);
        for eq in [Equation::Mkdv, Equation::ModifiedMkdv] {
            assert!(oracle_rhs(&z, eq, 0.3).is_zero());
        }
    }

    #[test]
    fn lone_delta_has_no_modified_nonlinearity() {
        let a = CoeffSeq::delta(2, 1, c(0.3, -0.2));
        let out = oracle_rhs(&a, Equation::ModifiedMkdv, 0.7);
        assert!(out.sup_norm() < 1e-17, "{}", out.sup_norm());
    }

    #[test]
    fn cosine_rhs_at_three() {
        let eps = 0.1;
        let a = cosine(4, eps);
        let t = 0.25;
        let out = oracle_rhs(&a, Equation::ModifiedMkdv, t);
        let expected = c(0.0, -1.0) * eps.powi(3) / 8.0 * cis(24.0 * t);
        assert!((out.get(3) - expected).norm() < 1e-17);
    }

    #[test]
    fn matches_brute_force_triple_loop() {
        for seed in 0..4 {
            let a = sample(4, seed);
            for eq in [Equation::Mkdv, Equation::ModifiedMkdv] {
                for t in [0.0, 0.013, 0.4] {
                    let fast = oracle_rhs(&a, eq, t);
                    let brute = brute_rhs(&a, eq, t);
                    assert!(fast.sup_distance(&brute) < 1e-13, "{eq} t={t}");
                }
            }
        }
    }

    #[test]
    fn zero_trajectory() {
        let cfg = OracleConfig::for_horizon(4, 1e-3, Equation::ModifiedMkdv, 0.05).unwrap();
        let traj = oracle_solve(&CoeffSeq::zeros(4), &cfg, 0.05).unwrap();
        assert!(traj.states.iter().all(CoeffSeq::is_zero));
        assert_eq!(invariant_drift(&traj), 0.0);
    }

    #[test]
    fn linear_regime_is_stationary() {
        let a = cosine(6, 1e-6);
        let cfg = OracleConfig::for_horizon(6, 1e-3, Equation::ModifiedMkdv, 0.5).unwrap();
        let traj = oracle_solve(&a, &cfg, 0.5).unwrap();
        assert!(traj.last().sup_distance(&a) < 1e-17);
    }

    #[test]
    fn guard_and_horizon_checks() {
        let bad = OracleConfig { cutoff: 16, dt: 1e-3, equation: Equation::Mkdv, steps: 10 };
        assert!(matches!(bad.validate(), Err(Error::StabilityGuard { .. })));
        let cfg = OracleConfig::for_horizon(4, 1e-3, Equation::Mkdv, 0.01).unwrap();
        assert!(oracle_solve(&CoeffSeq::zeros(4), &cfg, 0.02).is_err());
        assert!(oracle_solve(&CoeffSeq::zeros(5), &cfg, 0.01).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = OracleConfig::for_horizon(1, 0.01, Equation::Mkdv, 0.01).unwrap();
        let traj = oracle_solve(&cosine(1, 0.1), &cfg, 0.01).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,n,re,im");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,-1,0.05,"));
    }

    #[test]
    fn equation_names() {
        assert_eq!(serde_json::to_string(&Equation::ModifiedMkdv).unwrap(), "\"modified_mkdv\"");
        assert_eq!("mkdv".parse::<Equation>().unwrap(), Equation::Mkdv);
    }
}
