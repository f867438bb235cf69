//! Experiment kinds and their `key=value` parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Convergence,
    LemmaBound,
    KernelNorms,
    OracleCompare,
    GaugeCheck,
    Residual,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Convergence,
        ExperimentKind::LemmaBound,
        ExperimentKind::KernelNorms,
        ExperimentKind::OracleCompare,
        ExperimentKind::GaugeCheck,
        ExperimentKind::Residual,
    ];

    /// Accepted keys with defaults and a one-line description.
    pub fn parameters(self) -> &'static [ParamDoc] {
        match self {
            ExperimentKind::Convergence => CONVERGENCE,
            ExperimentKind::LemmaBound => LEMMA_BOUND,
            ExperimentKind::KernelNorms => KERNEL_NORMS,
            ExperimentKind::OracleCompare => ORACLE_COMPARE,
            ExperimentKind::GaugeCheck => GAUGE_CHECK,
            ExperimentKind::Residual => RESIDUAL,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::LemmaBound => "lemma-bound",
            ExperimentKind::KernelNorms => "kernel-norms",
            ExperimentKind::OracleCompare => "oracle-compare",
            ExperimentKind::GaugeCheck => "gauge-check",
            ExperimentKind::Residual => "residual",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamDoc {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn doc(key: &'static str, default: &'static str, help: &'static str) -> ParamDoc {
    ParamDoc { key, default, help }
}

const CONVERGENCE: &[ParamDoc] = &[
    doc("data", "random_fl(0.5,2,1,1)", "initial data: builtin or path"),
    doc("N", "8", "mode cutoff"),
    doc("K", "3", "maximum internal nodes"),
    doc("t", "cert", "comma-separated times; `cert` is the certified radius"),
    doc("C", "16", "integral bound constant"),
    doc("s", "0.5", "regularity of the data norm"),
    doc("p", "2", "integrability of the data norm"),
    doc("ratio_limit", "0.5", "bound on successive depth-norm ratios"),
];

const LEMMA_BOUND: &[ParamDoc] = &[
    doc("K", "3", "trees with 1..=K internal nodes"),
    doc("samples", "1000", "admissible assignments per tree"),
    doc("range", "16", "leaf modes drawn from [-range, range]"),
    doc("t", "0.01,0.1,1", "comma-separated times"),
    doc("C", "16", "integral bound constant"),
    doc("seed", "7", "sampler seed"),
];

const KERNEL_NORMS: &[ParamDoc] = &[
    doc("s", "0.5", "regularity"),
    doc("p", "2", "integrability (`inf` allowed)"),
    doc("n", "4,16,64,256", "output modes to scan"),
    doc("box", "10", "summation box radius as a multiple of n"),
    doc("pair", "12", "free index pair: 12, 13 or 23"),
    doc("kernel", "m1", "full, m1 or m2"),
    doc("growth_limit", "1.1", "bound on max norm / norm at the first n"),
];

const ORACLE_COMPARE: &[ParamDoc] = &[
    doc("data", "cosine(0.1)", "initial data: builtin or path"),
    doc("N", "6", "mode cutoff"),
    doc("K", "3", "maximum internal nodes"),
    doc("t", "0.005,0.01,0.02", "comma-separated times"),
    doc("dt", "1e-5", "oracle step"),
    doc("equation", "modified_mkdv", "mkdv or modified_mkdv"),
    doc("project", "true", "project internal nodes to the window"),
    doc("tol", "1e-6", "sup-mode error tolerance"),
    doc("drift_tol", "1e-8", "oracle L2 drift tolerance"),
];

const GAUGE_CHECK: &[ParamDoc] = &[
    doc("data", "cosine(0.1)", "initial data: builtin or path"),
    doc("N", "16", "mode cutoff"),
    doc("t", "0.5", "horizon"),
    doc("dt", "1e-4", "oracle step"),
    doc("tol", "1e-6", "sup-mode error tolerance"),
];

const RESIDUAL: &[ParamDoc] = &[
    doc("data", "cosine(0.1)", "initial data: builtin or path"),
    doc("N", "8", "mode cutoff"),
    doc("K", "3", "maximum internal nodes"),
    doc("t", "0.05", "horizon"),
    doc("points", "33", "uniform grid points on [0, t]"),
    doc("equation", "modified_mkdv", "mkdv or modified_mkdv"),
    doc("tol", "1e-6", "residual tolerance at depth K"),
];

/// A validated experiment request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Every accepted key, defaults filled in.
    pub parameters: BTreeMap<String, String>,
}

impl ExperimentSpec {
    /// Rejects unknown and repeated keys.
    pub fn new<I, K, V>(kind: ExperimentKind, overrides: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let docs = kind.parameters();
        let mut parameters: BTreeMap<String, String> =
            docs.iter().map(|d| (d.key.to_string(), d.default.to_string())).collect();
        let mut seen = Vec::new();
        for (k, v) in overrides {
            let (k, v) = (k.into(), v.into());
            if !parameters.contains_key(&k) {
                let known: Vec<&str> = docs.iter().map(|d| d.key).collect();
                return Err(CliError::Invalid(format!(
                    "unknown parameter {k:?} for {kind}; accepted: {}",
                    known.join(", ")
                )));
            }
            if seen.contains(&k) {
                return Err(CliError::Invalid(format!("parameter {k:?} given twice")));
            }
            seen.push(k.clone());
            parameters.insert(k, v);
        }
        Ok(Self { kind, parameters })
    }

    /// Parses `key=value` strings.
    pub fn from_pairs(kind: ExperimentKind, pairs: &[String]) -> Result<Self, CliError> {
        let split: Result<Vec<(String, String)>, CliError> = pairs
            .iter()
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| CliError::Invalid(format!("expected key=value, got {p:?}")))
            })
            .collect();
        Self::new(kind, split?)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.parameters
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("{key} is not a parameter of {}", self.kind))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse().map_err(|e| CliError::Invalid(format!("parameter {key}={raw:?}: {e}")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key);
        raw.split(',')
            .map(|item| {
                item.trim().parse().map_err(|e| CliError::Invalid(format!("parameter {key}: item {item:?}: {e}")))
            })
            .collect()
    }
}
