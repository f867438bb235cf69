use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mkdv_series::multilinear::{integral_bound, integral_exact, parity_bounds, scan_rows, Kernel, Pair};
use mkdv_series::oracle::{invariant_drift, oracle_solve};
use mkdv_series::series::{ode_residual, radius_certificate, solve_mkdv_gauged, solve_series};
use mkdv_series::spectral::{gauge_shift, l2_mass, weighted_norm};
use mkdv_series::tree::enumerate_trees;
use mkdv_series::{CoeffSeq, Equation, IndexAssignment, NormIndex, OracleConfig, SeriesConfig, SeriesSolution};

use crate::data::load_initial_data;
use crate::error::CliError;
use crate::params::{ExperimentKind, ExperimentSpec};
use crate::{Assertion, Outputs};

pub fn run(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    log::info!("running {} with {:?}", spec.kind, spec.parameters);
    match spec.kind {
        ExperimentKind::Convergence => convergence(spec),
        ExperimentKind::LemmaBound => lemma_bound(spec),
        ExperimentKind::KernelNorms => kernel_norms(spec),
        ExperimentKind::OracleCompare => oracle_compare(spec),
        ExperimentKind::GaugeCheck => gauge_check(spec),
        ExperimentKind::Residual => residual(spec),
    }
}

fn csv_bytes<R: Serialize>(name: &str, rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let err = |e: csv::Error| CliError::Output { path: name.to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Output { path: name.to_string(), message: e.to_string() })
}

fn json_bytes<T: Serialize>(name: &str, value: &T) -> Result<Vec<u8>, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Output { path: name.to_string(), message: e.to_string() })?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// `x / y` with `0 / 0 = 0`.
fn ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / y
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn series_for(a0: &CoeffSeq, cfg: &SeriesConfig, equation: Equation) -> Result<SeriesSolution, CliError> {
    Ok(match equation {
        Equation::ModifiedMkdv => solve_series(a0, cfg)?,
        Equation::Mkdv => solve_mkdv_gauged(a0, cfg)?,
    })
}

#[derive(Serialize)]
struct ConvergenceRow {
    t: f64,
    k: usize,
    depth_norm: f64,
    envelope: f64,
    ratio_to_previous: Option<f64>,
    certified: bool,
}

fn convergence(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let cutoff: usize = spec.get("N")?;
    let k_max: usize = spec.get("K")?;
    let c: f64 = spec.get("C")?;
    let idx = NormIndex::new(spec.get("s")?, spec.get("p")?)?;
    let ratio_limit: f64 = spec.get("ratio_limit")?;
    let a0 = load_initial_data(spec.raw("data"), cutoff)?;
    let r = weighted_norm(&a0, idx);
    let cert = radius_certificate(r, c);
    let times = spec
        .raw("t")
        .split(',')
        .map(|item| match item.trim() {
            "cert" => Ok(cert),
            other => other.parse::<f64>().map_err(|e| CliError::Invalid(format!("parameter t: {other:?}: {e}"))),
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let mut cfg = SeriesConfig::new(cutoff, k_max, times);
    cfg.norm = idx;
    cfg.c_bound = c;
    let sol = solve_series(&a0, &cfg)?;

    let mut rows = Vec::new();
    for (&t, norms) in sol.times.iter().zip(&sol.depth_norms) {
        for (k, &norm) in norms.iter().enumerate() {
            rows.push(ConvergenceRow {
                t,
                k,
                depth_norm: norm,
                envelope: (c * t).powf(k as f64 / 2.0) * r.powi(2 * k as i32 + 1),
                ratio_to_previous: (k > 0 && norms[k - 1] > 0.0).then(|| norm / norms[k - 1]),
                certified: t <= cert,
            });
        }
    }
    let certified: Vec<&ConvergenceRow> = rows.iter().filter(|row| row.certified && row.k > 0).collect();
    let mut out = Outputs::default();
    out.measurements.insert("initial_norm".into(), r);
    out.measurements.insert("certified_time".into(), cert);
    out.assertions.push(Assertion::at_most(
        "depth_norm_over_envelope",
        max_of(certified.iter().map(|row| ratio(row.depth_norm, row.envelope))),
        1.0,
    ));
    out.assertions.push(Assertion::at_most(
        "successive_depth_ratio",
        max_of(certified.iter().filter_map(|row| row.ratio_to_previous)),
        ratio_limit,
    ));
    out.files.push(("convergence.csv".into(), csv_bytes("convergence.csv", &rows)?));
    out.files.push(("solution.json".into(), json_bytes("solution.json", &sol)?));
    Ok(out)
}

#[derive(Serialize)]
struct LemmaRow {
    tree: String,
    k: usize,
    sample: usize,
    leaves: String,
    sigma_profile: String,
    t: f64,
    abs_integral: f64,
    bound: f64,
    ratio: f64,
    parity_odd: f64,
    parity_even: f64,
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn lemma_bound(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let k_max: usize = spec.get("K")?;
    let samples: usize = spec.get("samples")?;
    let range: i64 = spec.get("range")?;
    let times: Vec<f64> = spec.list("t")?;
    let c: f64 = spec.get("C")?;
    let seed: u64 = spec.get("seed")?;
    if range < 1 {
        return Err(CliError::Invalid("range must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut parity_excess: f64 = 0.0;
    for k in 1..=k_max {
        for tree in enumerate_trees(k) {
            let mut accepted = 0;
            let mut attempts = 0usize;
            while accepted < samples {
                attempts += 1;
                if attempts > 1000 * samples.max(1) {
                    return Err(CliError::Invalid(format!(
                        "too few admissible assignments for {tree} in range {range}"
                    )));
                }
                let leaves: Vec<i64> = (0..tree.leaf_count()).map(|_| rng.random_range(-range..=range)).collect();
                let Ok(a) = IndexAssignment::from_leaf_labels(&tree, &leaves) else {
                    continue;
                };
                for &t in &times {
                    let abs_integral = integral_exact(&tree, &a, t)?.norm();
                    let bound = integral_bound(&a, t, c);
                    let (parity_odd, parity_even) = parity_bounds(&a, t);
                    parity_excess = parity_excess.max(ratio(abs_integral, parity_odd.min(parity_even)));
                    rows.push(LemmaRow {
                        tree: tree.encoding(),
                        k,
                        sample: accepted,
                        leaves: join(&leaves),
                        sigma_profile: join(&a.sigma_profile()),
                        t,
                        abs_integral,
                        bound,
                        ratio: ratio(abs_integral, bound),
                        parity_odd,
                        parity_even,
                    });
                }
                accepted += 1;
            }
        }
    }
    let mut out = Outputs::default();
    out.measurements.insert("checks".into(), rows.len() as f64);
    out.assertions.push(Assertion::at_most("integral_over_bound", max_of(rows.iter().map(|r| r.ratio)), 1.0));
    out.assertions.push(Assertion::at_most("integral_over_parity_bound", parity_excess, 1.0));
    out.files.push(("lemma_bound.csv".into(), csv_bytes("lemma_bound.csv", &rows)?));
    Ok(out)
}

fn kernel_norms(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let s: f64 = spec.get("s")?;
    let p: f64 = spec.get("p")?;
    NormIndex::new(s, p)?;
    let ns: Vec<i64> = spec.list("n")?;
    let box_factor: usize = spec.get("box")?;
    let pair: Pair = spec.get("pair")?;
    let kernel: Kernel = spec.get("kernel")?;
    let growth_limit: f64 = spec.get("growth_limit")?;
    if ns.is_empty() || box_factor == 0 {
        return Err(CliError::Invalid("need at least one n and box >= 1".into()));
    }
    let rows = scan_rows(&ns, s, p, pair, box_factor, kernel);
    let norms: Vec<f64> = rows.iter().map(|r| r.norm).collect();
    let growth = ratio(max_of(norms.iter().copied()), norms[0]);
    // consecutive increments should shrink if the scan is levelling off
    let increments: Vec<f64> = norms.windows(2).map(|w| w[1] - w[0]).collect();
    let increment_ratio = max_of(increments.windows(2).map(|w| match (w[0] > 0.0, w[1] > 0.0) {
        (_, false) => 0.0,
        (true, true) => w[1] / w[0],
        (false, true) => f64::INFINITY,
    }));
    let mut out = Outputs::default();
    out.measurements.insert("growth".into(), growth);
    out.assertions.push(Assertion::at_most("max_norm_over_first", growth, growth_limit));
    out.assertions.push(Assertion::at_most("increment_ratio", increment_ratio, 1.0));
    out.files.push(("kernel_norms.csv".into(), csv_bytes("kernel_norms.csv", &rows)?));
    Ok(out)
}

#[derive(Serialize)]
struct CompareRow {
    t: f64,
    oracle_dt: f64,
    oracle_steps: usize,
    sup_error: f64,
    l2_drift: f64,
    hermitian_defect_series: f64,
    hermitian_defect_oracle: f64,
}

fn oracle_compare(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let cutoff: usize = spec.get("N")?;
    let k_max: usize = spec.get("K")?;
    let times: Vec<f64> = spec.list("t")?;
    let dt: f64 = spec.get("dt")?;
    let equation: Equation = spec.get("equation")?;
    let project: bool = spec.get("project")?;
    let tol: f64 = spec.get("tol")?;
    let drift_tol: f64 = spec.get("drift_tol")?;
    let a0 = load_initial_data(spec.raw("data"), cutoff)?;

    let mut cfg = SeriesConfig::new(cutoff, k_max, times);
    cfg.project_internal = project;
    let sol = series_for(&a0, &cfg, equation)?;

    let mut rows = Vec::new();
    let mut last = None;
    for (&t, state) in sol.times.iter().zip(&sol.states) {
        let oc = OracleConfig::for_horizon(cutoff, dt, equation, t)?;
        let traj = oracle_solve(&a0, &oc, t)?;
        rows.push(CompareRow {
            t,
            oracle_dt: oc.dt,
            oracle_steps: oc.steps,
            sup_error: state.sup_distance(traj.last()),
            l2_drift: invariant_drift(&traj),
            hermitian_defect_series: state.hermitian_defect(),
            hermitian_defect_oracle: traj.last().hermitian_defect(),
        });
        last = Some(traj);
    }
    let mut out = Outputs::default();
    if let [.., a, b] = rows.as_slice() {
        let order = (b.sup_error / a.sup_error).ln() / (b.t / a.t).ln();
        if order.is_finite() {
            out.measurements.insert("observed_order".into(), order);
        }
    }
    out.assertions.push(Assertion::at_most("sup_error", max_of(rows.iter().map(|r| r.sup_error)), tol));
    out.assertions.push(Assertion::at_most("l2_drift", max_of(rows.iter().map(|r| r.l2_drift)), drift_tol));
    out.files.push(("oracle_compare.csv".into(), csv_bytes("oracle_compare.csv", &rows)?));
    out.files.push(("solution.json".into(), json_bytes("solution.json", &sol)?));
    if let Some(traj) = last {
        let mut buf = Vec::new();
        traj.write_csv(&mut buf)?;
        out.files.push(("oracle_trajectory.csv".into(), buf));
    }
    Ok(out)
}

#[derive(Serialize)]
struct GaugeRow {
    t: f64,
    sup_error: f64,
}

fn gauge_check(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let cutoff: usize = spec.get("N")?;
    let t: f64 = spec.get("t")?;
    let dt: f64 = spec.get("dt")?;
    let tol: f64 = spec.get("tol")?;
    let a0 = load_initial_data(spec.raw("data"), cutoff)?;
    let c = l2_mass(&a0);
    let plain = oracle_solve(&a0, &OracleConfig::for_horizon(cutoff, dt, Equation::Mkdv, t)?, t)?;
    let modified = oracle_solve(&a0, &OracleConfig::for_horizon(cutoff, dt, Equation::ModifiedMkdv, t)?, t)?;
    let rows: Vec<GaugeRow> = plain
        .times
        .iter()
        .zip(plain.states.iter().zip(&modified.states))
        .map(|(&s, (x, y))| GaugeRow { t: s, sup_error: x.sup_distance(&gauge_shift(y, -c, s)) })
        .collect();
    let mut out = Outputs::default();
    out.measurements.insert("gauge_speed".into(), c);
    out.assertions.push(Assertion::at_most("sup_error", max_of(rows.iter().map(|r| r.sup_error)), tol));
    out.files.push(("gauge_check.csv".into(), csv_bytes("gauge_check.csv", &rows)?));
    Ok(out)
}

#[derive(Serialize)]
struct ResidualRow {
    k: usize,
    residual: f64,
}

fn residual(spec: &ExperimentSpec) -> Result<Outputs, CliError> {
    let cutoff: usize = spec.get("N")?;
    let k_max: usize = spec.get("K")?;
    let t: f64 = spec.get("t")?;
    let points: usize = spec.get("points")?;
    let equation: Equation = spec.get("equation")?;
    let tol: f64 = spec.get("tol")?;
    if points < 2 {
        return Err(CliError::Invalid("points must be at least 2".into()));
    }
    let a0 = load_initial_data(spec.raw("data"), cutoff)?;
    let times: Vec<f64> = (0..points).map(|i| t * i as f64 / (points - 1) as f64).collect();
    let mut rows = Vec::new();
    let mut deepest = None;
    for k in 0..=k_max {
        let sol = series_for(&a0, &SeriesConfig::new(cutoff, k, times.clone()), equation)?;
        rows.push(ResidualRow { k, residual: ode_residual(&sol, &a0)? });
        deepest = Some(sol);
    }
    let mut out = Outputs::default();
    let last = rows.last().map_or(0.0, |r| r.residual);
    out.assertions.push(Assertion::at_most("residual_at_max_depth", last, tol));
    out.files.push(("residual.csv".into(), csv_bytes("residual.csv", &rows)?));
    if let Some(sol) = deepest {
        out.files.push(("solution.json".into(), json_bytes("solution.json", &sol)?));
    }
    Ok(out)
}
