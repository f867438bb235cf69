//! The tree series `a(n, t) = a(n, 0) + Σ_T S_T(t)(a0, …, a0)(n)` truncated at
//! trees with at most `K` internal nodes.
//!
//! All trees with `k` internal nodes are summed at once: the depth-`k`
//! function `D_k` is the node step applied to `(D_{k1}, D_{k2}, D_{k3})` summed
//! over `k1 + k2 + k3 = k - 1`, starting from `D_0 = a0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilinear::operator::{node_step, TreeTimeFunction};
use crate::numerics::cumulative_simpson;
use crate::oracle::{oracle_rhs, Equation};
use crate::spectral::{gauge_shift, l2_mass, weighted_norm, CoeffSeq, NormIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub cutoff: usize,
    pub max_internal: usize,
    pub times: Vec<f64>,
    pub norm: NormIndex,
    pub project_internal: bool,
    pub c_bound: f64,
}

impl SeriesConfig {
    /// `(s, p) = (1/2, 2)`, projected, `C = 16`.
    pub fn new(cutoff: usize, max_internal: usize, times: Vec<f64>) -> Self {
        Self {
            cutoff,
            max_internal,
            times,
            norm: NormIndex::new(0.5, 2.0).expect("valid norm"),
            project_internal: true,
            c_bound: 16.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&t) = self.times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::TimeOutOfRange(t));
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::UnorderedTimes);
        }
        if !(self.c_bound > 0.0) {
            return Err(Error::InvalidParameter(format!("C = {}", self.c_bound)));
        }
        Ok(())
    }
}

/// Convergence certificate for the initial norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub initial_norm: f64,
    pub radius: f64,
    pub within_radius: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSolution {
    pub config: SeriesConfig,
    pub equation: Equation,
    pub times: Vec<f64>,
    pub states: Vec<CoeffSeq>,
    /// `depth_norms[i][k]`: norm of the sum of all depth-`k` terms at `times[i]`.
    pub depth_norms: Vec<Vec<f64>>,
    pub certificate: Certificate,
    pub warning: Option<String>,
}

/// `t_max = min(1, 1/(4 C ‖a0‖⁴))`, so that `√(C t_max) ‖a0‖² ≤ 1/2`.
pub fn radius_certificate(norm0: f64, c: f64) -> f64 {
    if norm0 == 0.0 {
        return 1.0;
    }
    (1.0 / (4.0 * c * norm0.powi(4))).min(1.0)
}

/// `Σ_{k=0}^{K} (C t)^{k/2} R^{2k+1}`.
pub fn geometric_envelope(radius: f64, t: f64, c: f64, max_internal: usize) -> f64 {
    (0..=max_internal as i32).map(|k| (c * t).powf(k as f64 / 2.0) * radius.powi(2 * k + 1)).sum()
}

/// `Σ_{k=0}^{K} (2k+1) (C t)^{k/2} R^{2k}`, the Lipschitz constant of the
/// truncated majorant series on the ball of radius `R`.
pub fn lipschitz_envelope(radius: f64, t: f64, c: f64, max_internal: usize) -> f64 {
    (0..=max_internal as i32).map(|k| (2 * k + 1) as f64 * (c * t).powf(k as f64 / 2.0) * radius.powi(2 * k)).sum()
}

/// The depth functions `D_0, …, D_K` for fixed initial data.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    cutoff: usize,
    depths: Vec<TreeTimeFunction>,
}

impl SeriesExpansion {
    pub fn new(a0: &CoeffSeq, max_internal: usize, project_internal: bool) -> Self {
        let cutoff = a0.cutoff();
        let range = |k: usize| if project_internal { cutoff } else { (2 * k + 1) * cutoff };
        let mut depths = vec![TreeTimeFunction::constant(a0, cutoff)];
        for k in 1..=max_internal {
            let mut triples = Vec::new();
            for k1 in 0..k {
                for k2 in 0..k - k1 {
                    let k3 = k - 1 - k1 - k2;
                    triples.push([&depths[k1], &depths[k2], &depths[k3]]);
                }
            }
            let next = node_step(&triples, range(k));
            depths.push(next);
        }
        Self { cutoff, depths }
    }

    pub fn max_internal(&self) -> usize {
        self.depths.len() - 1
    }

    pub fn depth(&self, k: usize) -> &TreeTimeFunction {
        &self.depths[k]
    }

    /// Sum of all depth-`k` terms at time `t`, on `|n| ≤ N`.
    pub fn depth_term(&self, k: usize, t: f64) -> CoeffSeq {
        self.depths[k].eval(t, self.cutoff)
    }

    /// Partial sum over depths `0..=k_max` at time `t`.
    pub fn partial_sum(&self, k_max: usize, t: f64) -> CoeffSeq {
        let terms: Vec<CoeffSeq> = (0..=k_max.min(self.max_internal())).map(|k| self.depth_term(k, t)).collect();
        // smallest terms first
        CoeffSeq::from_fn(self.cutoff, |n| terms.iter().rev().map(|a| a.get(n)).sum())
    }
}

/// Evaluates the series for the modified equation at every configured time.
pub fn solve_series(a0: &CoeffSeq, cfg: &SeriesConfig) -> Result<SeriesSolution> {
    cfg.validate()?;
    if a0.cutoff() != cfg.cutoff {
        return Err(Error::CutoffMismatch { expected: cfg.cutoff, got: a0.cutoff() });
    }
    let expansion = SeriesExpansion::new(a0, cfg.max_internal, cfg.project_internal);
    let mut states = Vec::with_capacity(cfg.times.len());
    let mut depth_norms = Vec::with_capacity(cfg.times.len());
    for &t in &cfg.times {
        if t == 0.0 {
            states.push(a0.clone());
            let mut norms = vec![0.0; cfg.max_internal + 1];
            norms[0] = weighted_norm(a0, cfg.norm);
            depth_norms.push(norms);
            continue;
        }
        let terms: Vec<CoeffSeq> = (0..=cfg.max_internal).map(|k| expansion.depth_term(k, t)).collect();
        depth_norms.push(terms.iter().map(|a| weighted_norm(a, cfg.norm)).collect());
        states.push(CoeffSeq::from_fn(cfg.cutoff, |n| terms.iter().rev().map(|a| a.get(n)).sum()));
    }
    let initial_norm = weighted_norm(a0, cfg.norm);
    let radius = radius_certificate(initial_norm, cfg.c_bound);
    let within_radius = cfg.times.iter().all(|&t| t <= radius);
    let warning = (!within_radius)
        .then(|| format!("times beyond the certified radius {radius:.6e} for initial norm {initial_norm:.6e}"));
    Ok(SeriesSolution {
        config: cfg.clone(),
        equation: Equation::ModifiedMkdv,
        times: cfg.times.clone(),
        states,
        depth_norms,
        certificate: Certificate { initial_norm, radius, within_radius },
        warning,
    })
}

/// `max_{n, t_i} |a(n, t_i) - a(n, 0) - ∫_0^{t_i} RHS(a(s), s)(n) ds|` with
/// cumulative Simpson quadrature on the solution's time grid.
///
/// The grid must be uniform, start at 0 and hold at least 9 points.
pub fn ode_residual(sol: &SeriesSolution, a0: &CoeffSeq) -> Result<f64> {
    let times = &sol.times;
    if times.len() < 9 {
        return Err(Error::GridRejected(format!("{} points, need at least 9", times.len())));
    }
    if times[0] != 0.0 {
        return Err(Error::GridRejected(format!("grid starts at {}", times[0])));
    }
    let h = times[times.len() - 1] / (times.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::GridRejected("zero-length grid".into()));
    }
    if let Some((i, t)) = times.iter().enumerate().find(|(i, &t)| (t - *i as f64 * h).abs() > 1e-9 * h) {
        return Err(Error::GridRejected(format!("point {i} at {t} is off the uniform grid")));
    }
    let rhs: Vec<CoeffSeq> = sol.states.iter().zip(times).map(|(a, &t)| oracle_rhs(a, sol.equation, t)).collect();
    let mut worst: f64 = 0.0;
    for (idx, _) in a0.values().iter().enumerate() {
        let samples: Vec<_> = rhs.iter().map(|r| r.values()[idx]).collect();
        let integral = cumulative_simpson(&samples, h);
        for (i, state) in sol.states.iter().enumerate() {
            let defect = state.values()[idx] - a0.values()[idx] - integral[i];
            worst = worst.max(defect.norm());
        }
    }
    Ok(worst)
}

/// Series for the modified equation followed by the gauge map back to the
/// unmodified equation: `a(n, t) ↦ e^{-inct} a(n, t)` with `c = Σ|a0(n)|²`.
pub fn solve_mkdv_gauged(a0: &CoeffSeq, cfg: &SeriesConfig) -> Result<SeriesSolution> {
    if !a0.is_real_field(1e-12) {
        return Err(Error::NonHermitian(a0.hermitian_defect()));
    }
    let mut sol = solve_series(a0, cfg)?;
    let c = l2_mass(a0);
    for (state, &t) in sol.states.iter_mut().zip(&sol.times) {
        *state = gauge_shift(state, -c, t);
    }
    sol.equation = Equation::Mkdv;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cosine(cutoff: usize, eps: f64) -> CoeffSeq {
        let mut a = CoeffSeq::zeros(cutoff);
        a.set(1, Complex64::new(eps / 2.0, 0.0));
        a.set(-1, Complex64::new(eps / 2.0, 0.0));
        a
    }

    fn grid(t: f64, points: usize) -> Vec<f64> {
        (0..points).map(|i| t * i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn depth_zero_is_identity() {
        let a = cosine(4, 0.3);
        let sol = solve_series(&a, &SeriesConfig::new(4, 0, vec![0.0, 0.2, 0.9])).unwrap();
        assert!(sol.states.iter().all(|s| s == &a));
    }

    #[test]
    fn zero_data() {
        let z = CoeffSeq::zeros(3);
        let sol = solve_series(&z, &SeriesConfig::new(3, 3, vec![0.0, 0.5])).unwrap();
        assert!(sol.states.iter().all(CoeffSeq::is_zero));
        assert!(sol.depth_norms.iter().flatten().all(|&x| x == 0.0));
        assert_eq!(sol.certificate.radius, 1.0);
        let gauged = solve_mkdv_gauged(&z, &SeriesConfig::new(3, 2, vec![0.0, 0.5])).unwrap();
        assert!(gauged.states.iter().all(CoeffSeq::is_zero));
    }

    #[test]
    fn certificate_examples() {
        assert_eq!(radius_certificate(0.0, 16.0), 1.0);
        assert_eq!(radius_certificate(1.0, 16.0), 1.0 / 64.0);
        assert_eq!(radius_certificate(0.1, 16.0), 1.0);
        let t = radius_certificate(1.3, 16.0);
        assert!(geometric_envelope(1.3, t, 16.0, 60) <= 2.0 * 1.3);
    }

    #[test]
    fn config_validation() {
        let a = cosine(2, 0.1);
        assert_eq!(solve_series(&a, &SeriesConfig::new(2, 1, vec![0.2, 0.1])), Err(Error::UnorderedTimes));
        assert_eq!(solve_series(&a, &SeriesConfig::new(2, 1, vec![1.5])), Err(Error::TimeOutOfRange(1.5)));
        assert!(solve_series(&a, &SeriesConfig::new(3, 1, vec![0.1])).is_err());
    }

    #[test]
    fn warning_beyond_radius() {
        let a = cosine(2, 4.0);
        let sol = solve_series(&a, &SeriesConfig::new(2, 1, vec![0.0, 0.5])).unwrap();
        assert!(!sol.certificate.within_radius);
        assert!(sol.warning.is_some());
    }

    #[test]
    fn residual_rejects_coarse_grids() {
        let a = cosine(2, 0.1);
        let sol = solve_series(&a, &SeriesConfig::new(2, 1, grid(0.1, 5))).unwrap();
        assert!(matches!(ode_residual(&sol, &a), Err(Error::GridRejected(_))));
        let sol = solve_series(&a, &SeriesConfig::new(2, 1, vec![0.0, 0.01, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09]))
            .unwrap();
        assert!(matches!(ode_residual(&sol, &a), Err(Error::GridRejected(_))));
    }

    #[test]
    fn residual_of_zero_data_is_zero() {
        let z = CoeffSeq::zeros(3);
        let sol = solve_series(&z, &SeriesConfig::new(3, 2, grid(0.1, 9))).unwrap();
        assert_eq!(ode_residual(&sol, &z).unwrap(), 0.0);
    }

    #[test]
    fn residual_falls_with_depth() {
        let a = cosine(4, 0.4);
        let times = grid(0.05, 33);
        let residuals: Vec<f64> = (1..=3)
            .map(|k| {
                let sol = solve_series(&a, &SeriesConfig::new(4, k, times.clone())).unwrap();
                ode_residual(&sol, &a).unwrap()
            })
            .collect();
        assert!(residuals[1] < residuals[0] && residuals[2] < residuals[1], "{residuals:?}");
    }

    #[test]
    fn gauged_solver_rejects_complex_fields() {
        let a = CoeffSeq::delta(2, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(solve_mkdv_gauged(&a, &SeriesConfig::new(2, 1, vec![0.1])), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn gauged_solution_starts_at_data() {
        let a = cosine(3, 0.2);
        let sol = solve_mkdv_gauged(&a, &SeriesConfig::new(3, 2, vec![0.0, 0.1])).unwrap();
        assert_eq!(sol.states[0], a);
        assert_eq!(sol.equation, Equation::Mkdv);
    }
}
