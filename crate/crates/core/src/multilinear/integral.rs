//! `I_T(t, j) = ∫_{R(T,t)} Π_v e^{iσ(j,v) s_v} ds` over
//! `R(T,t) = {0 ≤ s_child ≤ s_parent ≤ t}`.
//!
//! The integral is evaluated bottom-up: an internal node contributes
//! `F_v(x) = ∫_0^x e^{iσ_v s} Π_{internal children c} F_c(s) ds` and the
//! root is evaluated at `t`. Every step is exact exponential-polynomial
//! calculus.

use dashmap::DashMap;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::numerics::bracket;
use crate::resonance::IndexAssignment;
use crate::tree::TernaryTree;

/// `F_root` as an exponential polynomial in the root time, given `σ` at the
/// internal nodes in preorder.
///
/// Panics if `profile` does not have one entry per internal node.
pub fn integral_poly(tree: &TernaryTree, profile: &[i128]) -> ExpPoly {
    let internal = tree.internal_nodes();
    assert_eq!(internal.len(), profile.len(), "one σ per internal node");
    if internal.is_empty() {
        return ExpPoly::one();
    }
    let mut slot = vec![usize::MAX; tree.len()];
    for (i, &v) in internal.iter().enumerate() {
        slot[v] = i;
    }
    let mut polys: Vec<Option<ExpPoly>> = vec![None; internal.len()];
    for (i, &v) in internal.iter().enumerate().rev() {
        let mut integrand = ExpPoly::exp(profile[i]);
        for c in tree.children(v).expect("internal node") {
            if tree.is_internal(c) {
                let child = polys[slot[c]].take().expect("children are processed first");
                integrand = integrand.mul(&child);
            }
        }
        polys[i] = Some(integrand.integrate());
    }
    polys[0].take().expect("root polynomial")
}

fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange(t))
    }
}

/// Exact `I_T(t, j)`. Zero at `t = 0` for every tree with an internal node.
pub fn integral_exact(tree: &TernaryTree, assignment: &IndexAssignment<'_>, t: f64) -> Result<Complex64> {
    if !std::ptr::eq(tree, assignment.tree()) && tree != assignment.tree() {
        return Err(Error::TreeMismatch);
    }
    check_time(t)?;
    Ok(evaluate_profile(tree, &assignment.sigma_profile(), t))
}

fn evaluate_profile(tree: &TernaryTree, profile: &[i128], t: f64) -> Complex64 {
    if profile.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    integral_poly(tree, profile).eval(t)
}

/// Memoized `I_T(t, ·)` for a fixed tree and time, keyed by the `σ` profile.
///
/// Safe to share between workers; values are pure functions of the key.
pub struct IntegralMemo<'t> {
    tree: &'t TernaryTree,
    t: f64,
    cache: DashMap<Vec<i128>, Complex64>,
}

impl<'t> IntegralMemo<'t> {
    pub fn new(tree: &'t TernaryTree, t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(Self { tree, t, cache: DashMap::new() })
    }

    pub fn get(&self, assignment: &IndexAssignment<'_>) -> Complex64 {
        let profile = assignment.sigma_profile();
        if let Some(hit) = self.cache.get(&profile) {
            return *hit;
        }
        let value = evaluate_profile(self.tree, &profile, self.t);
        self.cache.insert(profile, value);
        value
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

/// `(Ct)^{k/2} Π_v ⟨σ(j,v)⟩^{-1/2}`.
pub fn integral_bound(assignment: &IndexAssignment<'_>, t: f64, c: f64) -> f64 {
    let profile = assignment.sigma_profile();
    let k = profile.len() as f64;
    let decay: f64 = profile.iter().map(|&s| bracket(s as f64).powf(-0.5)).product();
    (c * t).powf(k / 2.0) * decay
}

/// The two parity bounds `2^k t^{|E|} Π_{v∈O} w(σ_v)` and `2^k t^{|O|} Π_{v∈E} w(σ_v)`,
/// where `O`/`E` are the internal nodes at odd/even level.
///
/// `w(σ) = 1/|σ|` for `σ ≠ 0` and `w(0) = 1`: integrating out one node gives
/// `(e^{iσ b} - e^{iσ a})/(iσ)`, of modulus at most `2/|σ|`, or an interval
/// length at most `t ≤ 1` when resonant.
pub fn parity_bounds(assignment: &IndexAssignment<'_>, t: f64) -> (f64, f64) {
    let tree = assignment.tree();
    let (odd, even) = tree.odd_even_partition();
    let k = (odd.len() + even.len()) as i32;
    let decay = |nodes: &[usize]| -> f64 {
        nodes
            .iter()
            .map(|&v| match assignment.sigma(v).expect("internal") {
                0 => 1.0,
                s => 1.0 / (s as f64).abs(),
            })
            .product()
    };
    let scale = 2f64.powi(k);
    (scale * t.powi(even.len() as i32) * decay(&odd), scale * t.powi(odd.len() as i32) * decay(&even))
}
