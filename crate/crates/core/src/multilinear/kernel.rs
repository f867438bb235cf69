//! Trilinear kernels on the lattice `n1 + n2 + n3 = n` and their slice norms.
//!
//! In weighted form the majorant reads
//! `⟨n⟩^s S̃(a)(n) = Σ m(n1,n2,n3) Π ⟨nk⟩^s |ak(nk)|`, so bounds on
//! `sup_n ‖m(n, ·)‖_{l^{p'}}` over a pair of free indices give bounds on `S̃`
//! in `l^{s,p}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{bracket, NeumaierSum};
use crate::par::*;
use crate::resonance::{classify_triple, sigma};
use crate::spectral::dual_exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `⟨n⟩^s |n| / (⟨σ⟩^{1/2} Π⟨nk⟩^s)` on admissible triples, zero elsewhere.
    Full,
    /// `⟨n⟩^s |n| / Π (⟨nk⟩^s ⟨n - nk⟩^{1/2})` when every `nk ≠ n`.
    M1,
    /// `|n| / ⟨n⟩^{2s}` on `(n, -n, n)`.
    M2,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Full => "full",
            Kernel::M1 => "m1",
            Kernel::M2 => "m2",
        })
    }
}

impl std::str::FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Kernel::Full),
            "m1" => Ok(Kernel::M1),
            "m2" => Ok(Kernel::M2),
            other => Err(format!("unknown kernel {other:?}")),
        }
    }
}

/// Which two of `(n1, n2, n3)` are summed freely; the third is `n` minus both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "12")]
    P12,
    #[serde(rename = "13")]
    P13,
    #[serde(rename = "23")]
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// Places free indices `(x, y)` and the dependent index `z` into `(n1, n2, n3)`.
    #[inline]
    fn place(self, x: i64, y: i64, z: i64) -> (i64, i64, i64) {
        match self {
            Pair::P12 => (x, y, z),
            Pair::P13 => (x, z, y),
            Pair::P23 => (z, x, y),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        })
    }
}

impl std::str::FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim_matches(|c| c == '(' || c == ')').replace(',', "").as_str() {
            "12" => Ok(Pair::P12),
            "13" => Ok(Pair::P13),
            "23" => Ok(Pair::P23),
            other => Err(format!("unknown index pair {other:?}")),
        }
    }
}

/// `|n| / ⟨n⟩^{2s}`.
#[inline]
pub fn diagonal_value(n: i64, s: f64) -> f64 {
    let x = n as f64;
    x.abs() / bracket(x).powf(2.0 * s)
}

/// Kernel value at `(n1, n2, n3)` with `n = n1 + n2 + n3`.
pub fn kernel_value(n1: i64, n2: i64, n3: i64, s: f64, which: Kernel) -> f64 {
    let n = n1 + n2 + n3;
    let nf = n as f64;
    let weights = || -> f64 { [n1, n2, n3].iter().map(|&k| bracket(k as f64).powf(s)).product() };
    match which {
        Kernel::Full => match classify_triple(n, [n1, n2, n3]) {
            None => 0.0,
            Some(true) => diagonal_value(n, s),
            Some(false) => {
                let sig = sigma(n1, n2, n3).expect("lattice point within the overflow bound") as f64;
                bracket(nf).powf(s) * nf.abs() / (bracket(sig).sqrt() * weights())
            }
        },
        Kernel::M1 => {
            if n1 == n || n2 == n || n3 == n {
                return 0.0;
            }
            let gaps: f64 = [n1, n2, n3].iter().map(|&k| bracket((n - k) as f64).sqrt()).product();
            bracket(nf).powf(s) * nf.abs() / (weights() * gaps)
        }
        Kernel::M2 => {
            if n1 == n && n2 == -n && n3 == n {
                diagonal_value(n, s)
            } else {
                0.0
            }
        }
    }
}

/// Tabulated `⟨x⟩^{-s}` and `⟨x⟩^{-1/2}` for `|x| ≤ reach`.
struct Tables {
    reach: i64,
    inv_weight: Vec<f64>,
    inv_root: Vec<f64>,
}

impl Tables {
    fn new(reach: i64, s: f64) -> Self {
        let xs = (-reach..=reach).map(|x| bracket(x as f64));
        Self {
            reach,
            inv_weight: xs.clone().map(|b| b.powf(-s)).collect(),
            inv_root: xs.map(|b| 1.0 / b.sqrt()).collect(),
        }
    }

    #[inline]
    fn weight(&self, x: i64) -> f64 {
        self.inv_weight[(x + self.reach) as usize]
    }

    #[inline]
    fn root(&self, x: i64) -> f64 {
        self.inv_root[(x + self.reach) as usize]
    }
}

/// `‖m(n, ·)‖_{l^{p'}}` over the free pair in `[-M, M]²`, the third index
/// fixed by `n1 + n2 + n3 = n`.
///
/// Rows are reduced with compensated sums and combined in row order, so the
/// value does not depend on the worker count.
pub fn kernel_norm_scan(n: i64, s: f64, p: f64, pair: Pair, box_radius: usize, kernel: Kernel) -> f64 {
    let m = box_radius as i64;
    let q = dual_exponent(p);
    let reach = 2 * m + 2 * n.abs();
    let tables = Tables::new(reach, s);
    let prefactor = bracket(n as f64).powf(s) * (n as f64).abs();
    let point = |x: i64, y: i64| -> f64 {
        let (n1, n2, n3) = pair.place(x, y, n - x - y);
        match kernel {
            Kernel::M1 => {
                if n1 == n || n2 == n || n3 == n {
                    return 0.0;
                }
                prefactor
                    * tables.weight(n1)
                    * tables.weight(n2)
                    * tables.weight(n3)
                    * tables.root(n - n1)
                    * tables.root(n - n2)
                    * tables.root(n - n3)
            }
            _ => kernel_value(n1, n2, n3, s, kernel),
        }
    };
    let rows: Vec<f64> = (-m..=m)
        .into_par_iter()
        .map(|x| {
            if q.is_infinite() {
                (-m..=m).map(|y| point(x, y)).fold(0.0, f64::max)
            } else {
                (-m..=m).map(|y| point(x, y)).filter(|&v| v > 0.0).map(|v| v.powf(q)).collect::<NeumaierSum>().value()
            }
        })
        .collect();
    if q.is_infinite() {
        rows.into_iter().fold(0.0, f64::max)
    } else {
        rows.into_iter().collect::<NeumaierSum>().value().powf(1.0 / q)
    }
}

/// One line of a norm scan: `n, s, p, pair, M, norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScanRow {
    pub n: i64,
    pub s: f64,
    pub p: f64,
    pub pair: Pair,
    #[serde(rename = "M")]
    pub box_radius: usize,
    pub norm: f64,
}

/// Scans each `n` with `M = box_factor · n` and returns rows in input order.
pub fn scan_rows(ns: &[i64], s: f64, p: f64, pair: Pair, box_factor: usize, kernel: Kernel) -> Vec<NormScanRow> {
    ns.iter()
        .map(|&n| {
            let box_radius = box_factor * n.unsigned_abs() as usize;
            NormScanRow { n, s, p, pair, box_radius, norm: kernel_norm_scan(n, s, p, pair, box_radius, kernel) }
        })
        .collect()
}

/// `B = max_{|n| ≤ N} ‖m(n, ·)‖_{l^{p'}}` for the full kernel with all three
/// indices in `[-N, N]`.
///
/// For inputs supported in `[-N, N]` and output modes `|n| ≤ N`,
/// `‖S̃(a1, a2, a3)‖_{s,p} ≤ B Π ‖ak‖_{s,p}`.
pub fn majorant_bound_constant(s: f64, p: f64, cutoff: usize) -> f64 {
    let r = cutoff as i64;
    let q = dual_exponent(p);
    let norms: Vec<f64> = (-r..=r)
        .into_par_iter()
        .map(|n| {
            let values = (-r..=r).flat_map(|x| (-r..=r).map(move |y| (x, y))).filter_map(|(x, y)| {
                let z = n - x - y;
                (z.abs() <= r).then(|| kernel_value(x, y, z, s, Kernel::Full))
            });
            if q.is_infinite() {
                values.fold(0.0, f64::max)
            } else {
                values.map(|v| v.powf(q)).collect::<NeumaierSum>().value().powf(1.0 / q)
            }
        })
        .collect();
    norms.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m2_examples() {
        let v = kernel_value(5, -5, 5, 0.5, Kernel::M2);
        assert!((v - 5.0 / 26f64.sqrt()).abs() < 1e-15);
        assert!(v < 1.0);
        assert_eq!(kernel_value(5, 5, -5, 0.5, Kernel::M2), 0.0);
        assert!((kernel_value(-3, 3, -3, 0.5, Kernel::M2) - 3.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn m1_vanishes_off_region() {
        for n1 in -4..=4 {
            for n in -4..=4 {
                // n2 = n forces n3 = -n1
                assert_eq!(kernel_value(n1, n, -n1, 0.5, Kernel::M1), 0.0);
            }
        }
    }

    #[test]
    fn full_kernel_dual_path() {
        let s = 0.5;
        let b = |x: f64| (1.0 + x * x).sqrt();
        let independent =
            b(6.0).powf(s) * 6.0 / (b(180.0).powf(0.5) * b(1.0).powf(s) * b(2.0).powf(s) * b(3.0).powf(s));
        assert!((kernel_value(1, 2, 3, s, Kernel::Full) - independent).abs() < 1e-15);
    }

    #[test]
    fn full_kernel_on_diagonal_is_m2() {
        for n in -6..=6 {
            assert_eq!(kernel_value(n, -n, n, 0.7, Kernel::Full), kernel_value(n, -n, n, 0.7, Kernel::M2));
            if n != 0 {
                assert_eq!(kernel_value(-n, n, n, 0.7, Kernel::Full), 0.0);
            }
        }
    }

    #[test]
    fn m2_slice_is_a_single_point() {
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let v = kernel_norm_scan(7, 0.5, p, Pair::P12, 20, Kernel::M2);
            assert!((v - 7.0 / 50f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_slice() {
        assert_eq!(kernel_norm_scan(0, 0.5, 2.0, Pair::P12, 10, Kernel::M1), 0.0);
    }

    #[test]
    fn tabulated_scan_matches_pointwise_sum() {
        let (n, s, p, m) = (3, 0.5, 2.0, 9);
        for pair in Pair::ALL {
            let mut brute = 0.0;
            for x in -m..=m {
                for y in -m..=m {
                    let (a, b, c) = pair.place(x, y, n - x - y);
                    brute += kernel_value(a, b, c, s, Kernel::M1).powi(2);
                }
            }
            let scanned = kernel_norm_scan(n, s, p, pair, m as usize, Kernel::M1);
            assert!((scanned - brute.sqrt()).abs() < 1e-13 * scanned);
        }
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("12".parse::<Pair>(), Ok(Pair::P12));
        assert_eq!("(1,3)".parse::<Pair>(), Ok(Pair::P13));
        assert!("14".parse::<Pair>().is_err());
    }
}
