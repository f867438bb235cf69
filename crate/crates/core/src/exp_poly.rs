//! Exact calculus for exponential polynomials `f(s) = Σ c·s^m·e^{iωs}`.
//!
//! Frequencies are exact integers, so a resonant (`ω = 0`) term is detected
//! by integer equality and integrates to a higher power of `s` rather than
//! through a division by a small number. Coefficients are `f64` complex.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::numerics::cis;

pub type Frequency = i128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub power: u32,
    pub freq: Frequency,
}

impl Term {
    #[inline]
    fn key(&self) -> (Frequency, u32) {
        (self.freq, self.power)
    }
}

/// Normalized: sorted by `(ω, m)`, one term per key, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `e^{iωs}`.
    pub fn exp(freq: Frequency) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), 0, freq)
    }

    /// `c·s^m·e^{iωs}`.
    pub fn monomial(coeff: Complex64, power: u32, freq: Frequency) -> Self {
        Self::from_terms(vec![Term { coeff, power, freq }])
    }

    /// Normalizes an arbitrary list of terms.
    pub fn from_terms(mut terms: Vec<Term>) -> Self {
        terms.sort_by_key(Term::key);
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.key() == term.key() => last.coeff += term.coeff,
                _ => {
                    if merged.last().is_some_and(|t| t.coeff == ZERO) {
                        merged.pop();
                    }
                    merged.push(term);
                }
            }
        }
        if merged.last().is_some_and(|t| t.coeff == ZERO) {
            merged.pop();
        }
        Self { terms: merged }
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[inline]
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_power(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        if factor == ZERO {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|t| Term { coeff: t.coeff * factor, ..*t }).collect())
    }

    /// Multiplies by `e^{iωs}`; the key order is preserved.
    pub fn shift_freq(&self, freq: Frequency) -> Self {
        Self { terms: self.terms.iter().map(|t| Term { freq: t.freq + freq, ..*t }).collect() }
    }

    /// Raw product terms `factor·e^{iωs}·self·other`, unnormalized.
    pub(crate) fn push_product(&self, other: &ExpPoly, factor: Complex64, freq: Frequency, out: &mut Vec<Term>) {
        for a in &self.terms {
            let ca = a.coeff * factor;
            out.extend(other.terms.iter().map(|b| Term {
                coeff: ca * b.coeff,
                power: a.power + b.power,
                freq: a.freq + b.freq + freq,
            }));
        }
    }

    pub fn add(&self, other: &ExpPoly) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        terms.extend_from_slice(&self.terms);
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn mul(&self, other: &ExpPoly) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        self.push_product(other, Complex64::new(1.0, 0.0), 0, &mut terms);
        Self::from_terms(terms)
    }

    /// `F(x) = ∫_0^x f(s) ds`.
    ///
    /// For `ω ≠ 0`, `∫_0^x s^m e^{iωs} ds = Σ_{r=0}^{m} f_r x^{m-r} e^{iωx} - f_m` with
    /// `f_0 = 1/(iω)` and `f_{r+1} = -(m-r) f_r/(iω)`. For `ω = 0` the power rises.
    pub fn integrate(&self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * 2 + 1);
        for t in &self.terms {
            if t.freq == 0 {
                out.push(Term { coeff: t.coeff / f64::from(t.power + 1), power: t.power + 1, freq: 0 });
                continue;
            }
            let i_omega = Complex64::new(0.0, t.freq as f64);
            let mut f = t.coeff / i_omega;
            for r in 0..=t.power {
                out.push(Term { coeff: f, power: t.power - r, freq: t.freq });
                if r < t.power {
                    f = f * -f64::from(t.power - r) / i_omega;
                }
            }
            out.push(Term { coeff: -f, power: 0, freq: 0 });
        }
        Self::from_terms(out)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = ZERO;
        let mut current: Option<(Frequency, Complex64)> = None;
        for t in &self.terms {
            let phase = match current {
                Some((freq, phase)) if freq == t.freq => phase,
                _ => {
                    let phase = cis(t.freq as f64 * x);
                    current = Some((t.freq, phase));
                    phase
                }
            };
            acc += t.coeff * phase * x.powi(t.power as i32);
        }
        acc
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;

    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::add(self, rhs)
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;

    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::add(self, &-rhs)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;

    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::mul(self, rhs)
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;

    fn neg(self) -> ExpPoly {
        ExpPoly { terms: self.terms.iter().map(|t| Term { coeff: -t.coeff, ..*t }).collect() }
    }
}

/// Debug form: `(re, im, m, ω)` quadruples sorted by `(ω, m)`.
impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for t in &self.terms {
            seq.serialize_element(&(t.coeff.re, t.coeff.im, t.power, t.freq))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Gauss–Legendre (5 points per panel) on `[0, x]`.
    fn quadrature(f: impl Fn(f64) -> Complex64, x: f64, panels: usize) -> Complex64 {
        const NODES: [f64; 5] =
            [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let h = x / panels as f64;
        let mut acc = c(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (node, w) in NODES.iter().zip(WEIGHTS) {
                acc += f(mid + 0.5 * h * node) * (0.5 * h * w);
            }
        }
        acc
    }

    #[test]
    fn addition_examples() {
        let f = ExpPoly::monomial(c(0.3, -1.0), 2, 6);
        assert_eq!(&f + &ExpPoly::zero(), f);
        let e = ExpPoly::exp(1);
        let doubled = &e + &e;
        assert_eq!(doubled.terms(), &[Term { coeff: c(2.0, 0.0), power: 0, freq: 1 }]);
        assert!((&e + &e.scale(c(-1.0, 0.0))).is_zero());
        assert!((&e - &e).is_zero());
    }

    #[test]
    fn multiplication_examples() {
        let f = ExpPoly::monomial(c(1.0, 0.0), 1, 1);
        let prod = &f * &ExpPoly::exp(2);
        assert_eq!(prod.terms(), &[Term { coeff: c(1.0, 0.0), power: 1, freq: 3 }]);
        let g = ExpPoly::monomial(c(0.5, 0.25), 3, -9);
        assert_eq!(&g * &ExpPoly::one(), g);

        let minus_one = ExpPoly::constant(c(-1.0, 0.0));
        let left = &ExpPoly::exp(1) + &minus_one;
        let right = &ExpPoly::exp(-1) + &minus_one;
        let expected = ExpPoly::from_terms(vec![
            Term { coeff: c(-1.0, 0.0), power: 0, freq: -1 },
            Term { coeff: c(2.0, 0.0), power: 0, freq: 0 },
            Term { coeff: c(-1.0, 0.0), power: 0, freq: 1 },
        ]);
        assert_eq!(&left * &right, expected);
    }

    #[test]
    fn integrate_pure_exponential() {
        let sigma = 180;
        let f = ExpPoly::exp(sigma).integrate();
        for &x in &[0.0, 0.01, 0.37, 1.0] {
            let expected = (cis(sigma as f64 * x) - 1.0) / c(0.0, sigma as f64);
            assert!((f.eval(x) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn integrate_constant_is_identity_map() {
        let f = ExpPoly::one().integrate();
        assert_eq!(f.terms(), &[Term { coeff: c(1.0, 0.0), power: 1, freq: 0 }]);
        assert_eq!(f.eval(0.7), c(0.7, 0.0));
    }

    #[test]
    fn integrate_polynomial_exponential_against_quadrature() {
        let f = ExpPoly::monomial(c(1.0, 0.0), 1, 1);
        let antiderivative = f.integrate();
        for &x in &[0.3, 0.7, 1.0] {
            let q = quadrature(|s| c(s, 0.0) * cis(s), x, 64);
            assert!((antiderivative.eval(x) - q).norm() <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ExpPoly::zero().eval(0.42), c(0.0, 0.0));
        assert_eq!(ExpPoly::exp(7).eval(0.0), c(1.0, 0.0));
        let f = ExpPoly::exp(180).integrate();
        let q = quadrature(|s| cis(180.0 * s), 0.01, 64);
        assert!((f.eval(0.01) - q).norm() <= 1e-12);
    }

    #[test]
    fn debug_serialization_is_sorted_by_frequency_then_power() {
        let f = ExpPoly::from_terms(vec![
            Term { coeff: c(1.0, 0.0), power: 0, freq: 3 },
            Term { coeff: c(0.0, 2.0), power: 2, freq: -3 },
            Term { coeff: c(0.5, 0.0), power: 1, freq: -3 },
        ]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "[[0.5,0.0,1,-3],[0.0,2.0,2,-3],[1.0,0.0,0,3]]");
    }

    fn arb_poly() -> impl Strategy<Value = ExpPoly> {
        prop::collection::vec(((-2.0..2.0f64), (-2.0..2.0f64), 0u32..4, -4i128..=4), 0..6).prop_map(|raw| {
            ExpPoly::from_terms(
                raw.into_iter().map(|(re, im, power, f)| Term { coeff: c(re, im), power, freq: 3 * f }).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn antiderivative_vanishes_at_origin(f in arb_poly()) {
            prop_assert!(f.integrate().eval(0.0).norm() < 1e-12);
        }

        #[test]
        fn derivative_of_antiderivative_recovers_integrand(f in arb_poly(), x in 0.0..1.0f64) {
            let big_f = f.integrate();
            let h = 1e-6;
            let fd = (big_f.eval(x + h) - big_f.eval(x)) / h;
            let exact = f.eval(x + 0.5 * h);
            let scale = f.terms().iter().map(|t| t.coeff.norm()).sum::<f64>().max(1.0);
            prop_assert!((fd - exact).norm() <= 1e-5 * scale, "{fd} vs {exact}");
        }

        #[test]
        fn integration_is_linear(f in arb_poly(), g in arb_poly(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
            let combo = &f.scale(c(a, 0.0)) + &g.scale(c(0.0, b));
            let lhs = combo.integrate();
            let rhs = &f.integrate().scale(c(a, 0.0)) + &g.integrate().scale(c(0.0, b));
            for x in [0.1, 0.5, 0.9] {
                prop_assert!((lhs.eval(x) - rhs.eval(x)).norm() <= 1e-12);
            }
            let keys_l: Vec<_> = lhs.terms().iter().map(|t| (t.freq, t.power)).collect();
            let keys_r: Vec<_> = rhs.terms().iter().map(|t| (t.freq, t.power)).collect();
            for key in &keys_l {
                prop_assert!(keys_r.contains(key));
            }
        }
    }
}
