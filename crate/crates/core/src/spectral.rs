//! Fourier coefficient sequences on the torus.
//!
//! Coefficients follow `û(n) = (1/2π)∫ u(x) e^{-inx} dx`, so `u = Σ û(n) e^{inx}`,
//! products of functions are plain convolutions of coefficients, and
//! `(1/2π)‖u‖²_{L²} = Σ |û(n)|²`.

use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bracket, cis, compensated_sum};

/// Complex amplitudes on the modes `n ∈ [-N, N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoeffSeqRepr", into = "CoeffSeqRepr")]
pub struct CoeffSeq {
    cutoff: usize,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffSeqRepr {
    cutoff: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<CoeffSeq> for CoeffSeqRepr {
    fn from(seq: CoeffSeq) -> Self {
        Self {
            cutoff: seq.cutoff,
            re: seq.values.iter().map(|z| z.re).collect(),
            im: seq.values.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<CoeffSeqRepr> for CoeffSeq {
    type Error = Error;

    fn try_from(repr: CoeffSeqRepr) -> Result<Self> {
        if repr.re.len() != repr.im.len() {
            return Err(Error::InvalidParameter(format!(
                "re has {} entries but im has {}",
                repr.re.len(),
                repr.im.len()
            )));
        }
        let values = repr.re.into_iter().zip(repr.im).map(|(re, im)| Complex64::new(re, im)).collect();
        CoeffSeq::from_values(repr.cutoff, values)
    }
}

impl CoeffSeq {
    pub fn zeros(cutoff: usize) -> Self {
        Self { cutoff, values: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1] }
    }

    /// Builds a sequence from its values ordered `n = -N..=N`.
    pub fn from_values(cutoff: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * cutoff + 1 {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff} needs {} values, got {}",
                2 * cutoff + 1,
                values.len()
            )));
        }
        Ok(Self { cutoff, values })
    }

    pub fn from_fn(cutoff: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let n_max = cutoff as i64;
        Self { cutoff, values: (-n_max..=n_max).map(&mut f).collect() }
    }

    /// A single mode `n` with amplitude `amplitude`.
    ///
    /// Panics if `|n|` exceeds the cutoff.
    pub fn delta(cutoff: usize, n: i64, amplitude: Complex64) -> Self {
        let mut seq = Self::zeros(cutoff);
        seq.set(n, amplitude);
        seq
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Values ordered `n = -N..=N`.
    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn index_of(&self, n: i64) -> Option<usize> {
        if n.unsigned_abs() as usize <= self.cutoff {
            Some((n + self.cutoff as i64) as usize)
        } else {
            None
        }
    }

    /// Amplitude of mode `n`; zero outside the stored range.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        self.index_of(n).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, n: i64, value: Complex64) {
        let i = self.index_of(n).unwrap_or_else(|| panic!("mode {n} outside cutoff {}", self.cutoff));
        self.values[i] = value;
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.cutoff as i64;
        self.values.iter().enumerate().map(move |(i, &z)| (i as i64 - offset, z))
    }

    /// Modes with nonzero amplitude, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.modes().filter(|(_, z)| *z != Complex64::new(0.0, 0.0)).map(|(n, _)| n).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// `max_n |a(-n) - conj(a(n))|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.modes().map(|(n, z)| (self.get(-n) - z.conj()).norm()).fold(0.0, f64::max)
    }

    /// True when `a(-n) = conj(a(n))` up to `tol` relative to the largest amplitude.
    pub fn is_real_field(&self, tol: f64) -> bool {
        let scale = self.sup_norm().max(f64::MIN_POSITIVE);
        self.hermitian_defect() <= tol * scale
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_n |a(n) - b(n)|` over the union of both mode ranges.
    pub fn sup_distance(&self, other: &CoeffSeq) -> f64 {
        let n_max = self.cutoff.max(other.cutoff) as i64;
        (-n_max..=n_max).map(|n| (self.get(n) - other.get(n)).norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { cutoff: self.cutoff, values: self.values.iter().map(|z| z * factor).collect() }
    }

    /// Same modes on a different cutoff: zero-padded or truncated.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        Self::from_fn(cutoff, |n| self.get(n))
    }

    pub fn weighted_norm(&self, idx: NormIndex) -> f64 {
        weighted_norm(self, idx)
    }

    pub fn l2_mass(&self) -> f64 {
        l2_mass(self)
    }
}

impl Add for &CoeffSeq {
    type Output = CoeffSeq;

    fn add(self, rhs: &CoeffSeq) -> CoeffSeq {
        let cutoff = self.cutoff.max(rhs.cutoff);
        CoeffSeq::from_fn(cutoff, |n| self.get(n) + rhs.get(n))
    }
}

impl Sub for &CoeffSeq {
    type Output = CoeffSeq;

    fn sub(self, rhs: &CoeffSeq) -> CoeffSeq {
        let cutoff = self.cutoff.max(rhs.cutoff);
        CoeffSeq::from_fn(cutoff, |n| self.get(n) - rhs.get(n))
    }
}

/// Weight exponent `s` and summability index `p ∈ [1, ∞]` of `𝓕L^{s,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormIndex {
    pub s: f64,
    pub p: f64,
}

impl NormIndex {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidNorm(format!("weight exponent {s} is not finite")));
        }
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNorm(format!("p = {p} is not in [1, inf]")));
        }
        Ok(Self { s, p })
    }

    /// Conjugate exponent `p' = p/(p-1)`, with `1' = ∞` and `∞' = 1`.
    pub fn dual(&self) -> f64 {
        dual_exponent(self.p)
    }

    /// `s ≥ 1/2` and `p'(s + 1/4) > 1`.
    pub fn satisfies_hypothesis(&self) -> bool {
        let dual = self.dual();
        let product = if dual.is_infinite() {
            if self.s + 0.25 > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            dual * (self.s + 0.25)
        };
        self.s >= 0.5 && product > 1.0
    }
}

pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `(Σ_n ⟨n⟩^{sp}|a(n)|^p)^{1/p}`, or `sup_n ⟨n⟩^s|a(n)|` when `p = ∞`.
pub fn weighted_norm(a: &CoeffSeq, idx: NormIndex) -> f64 {
    let weighted: Vec<f64> = a.modes().map(|(n, z)| bracket(n as f64).powf(idx.s) * z.norm()).collect();
    lp_norm(&weighted, idx.p)
}

/// `l^p` norm of nonnegative entries, rescaled by the maximum to avoid overflow.
pub(crate) fn lp_norm(entries: &[f64], p: f64) -> f64 {
    let max = entries.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return compensated_sum(entries.iter().copied());
    }
    max * compensated_sum(entries.iter().map(|w| (w / max).powf(p))).powf(1.0 / p)
}

/// `T_M`: keep modes with `|n| ≤ min(M, N)`; the cutoff shrinks to `min(M, N)`.
pub fn truncate_modes(a: &CoeffSeq, m: usize) -> CoeffSeq {
    a.with_cutoff(m.min(a.cutoff()))
}

/// `Σ_n |a(n)|²`, equal to `(1/2π)∫u²` for real `u`.
pub fn l2_mass(a: &CoeffSeq) -> f64 {
    compensated_sum(a.values().iter().map(|z| z.norm_sqr()))
}

/// Spatial translation by `c·t`: `a(n) ↦ e^{inct} a(n)`.
pub fn gauge_shift(a: &CoeffSeq, c: f64, t: f64) -> CoeffSeq {
    CoeffSeq::from_fn(a.cutoff(), |n| a.get(n) * cis(n as f64 * c * t))
}
