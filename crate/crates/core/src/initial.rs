//! Built-in initial data.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::bracket;
use crate::spectral::{weighted_norm, CoeffSeq, NormIndex};

/// Coefficients of `ε cos x`: amplitude `ε/2` at `n = ±1`.
pub fn cosine(eps: f64, cutoff: usize) -> Result<CoeffSeq> {
    if cutoff < 1 {
        return Err(Error::InvalidParameter("cosine data needs cutoff >= 1".into()));
    }
    let mut a = CoeffSeq::zeros(cutoff);
    a.set(1, Complex64::new(eps / 2.0, 0.0));
    a.set(-1, Complex64::new(eps / 2.0, 0.0));
    Ok(a)
}

/// A single mode `n` with the given amplitude.
pub fn delta(n: i64, amplitude: Complex64, cutoff: usize) -> Result<CoeffSeq> {
    if n.unsigned_abs() as usize > cutoff {
        return Err(Error::InvalidParameter(format!("mode {n} outside cutoff {cutoff}")));
    }
    Ok(CoeffSeq::delta(cutoff, n, amplitude))
}

/// Random real-field data with `‖a‖_{s,p} = R`.
///
/// Amplitudes are `⟨n⟩^{-s-1/p-0.01}` with uniform phases on `n > 0`, mirrored
/// by conjugation to `n < 0`; the zero mode gets a random sign. The result is
/// then rescaled to norm `R`.
pub fn random_fl(cutoff: usize, s: f64, p: f64, radius: f64, seed: u64) -> Result<CoeffSeq> {
    let idx = NormIndex::new(s, p)?;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("radius {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decay = -s - 1.0 / p - 0.01;
    let mut a = CoeffSeq::zeros(cutoff);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    a.set(0, Complex64::new(sign, 0.0));
    for n in 1..=cutoff as i64 {
        let z = Complex64::from_polar(bracket(n as f64).powf(decay), rng.random_range(0.0..TAU));
        a.set(n, z);
        a.set(-n, z.conj());
    }
    let norm = weighted_norm(&a, idx);
    Ok(a.scaled(Complex64::new(radius / norm, 0.0)))
}
