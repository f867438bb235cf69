//! Tree operators `S_T` and their positive majorants.
//!
//! Two evaluation paths are provided. [`apply_tree_operator`] sums over index
//! assignments exactly as the operator is defined. [`TreeEvaluator`] works on
//! the recursive structure instead: with leaves held at the data `a`, the map
//! `s ↦ S_T(s)(a)(n)` is an exponential polynomial in `s` obtained from the
//! three subtree functions by one trilinear node step
//!
//! `F(n, s) = ∫_0^s Σ_{n1+n2+n3=n} κ(n; n1,n2,n3) e^{iσ s'} F1(n1,s') F2(n2,s') F3(n3,s') ds'`
//!
//! with the sum restricted to admissible triples. The node step is linear in
//! each argument, so sums of tree functions can be pushed through it.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exp_poly::{ExpPoly, Term};
use crate::multilinear::integral::IntegralMemo;
use crate::numerics::{bracket, ComplexSum, NeumaierSum};
use crate::par::*;
use crate::resonance::{classify_triple, enumerate_assignments_within, node_coefficient, sigma};
use crate::spectral::CoeffSeq;
use crate::tree::TernaryTree;

fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange(t))
    }
}

fn check_leaves(tree: &TernaryTree, leaf_data: &[CoeffSeq], cutoff: usize) -> Result<()> {
    if leaf_data.len() != tree.leaf_count() {
        return Err(Error::LeafCountMismatch { expected: tree.leaf_count(), got: leaf_data.len() });
    }
    if let Some(bad) = leaf_data.iter().find(|a| a.cutoff() != cutoff) {
        return Err(Error::CutoffMismatch { expected: cutoff, got: bad.cutoff() });
    }
    Ok(())
}

fn union_support(data: &[CoeffSeq]) -> Vec<i64> {
    let mut support: Vec<i64> = data.iter().flat_map(CoeffSeq::support).collect();
    support.sort_unstable();
    support.dedup();
    support
}

/// `S_T(t)(a_v)(n)` for `|n| ≤ N` by direct summation over `J(T)`.
///
/// Leaves are matched to `leaf_data` in preorder. Only assignments whose
/// leaf labels lie in the joint support of the data are visited.
pub fn apply_tree_operator(
    tree: &TernaryTree,
    leaf_data: &[CoeffSeq],
    t: f64,
    cutoff: usize,
    project_internal: bool,
) -> Result<CoeffSeq> {
    check_leaves(tree, leaf_data, cutoff)?;
    check_time(t)?;
    let support = union_support(leaf_data);
    let leaves = tree.leaves();
    let memo = IntegralMemo::new(tree, t)?;
    let n_max = cutoff as i64;
    let values: Vec<Complex64> = (-n_max..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = ComplexSum::new();
            for a in enumerate_assignments_within(tree, n, cutoff, project_internal, &support) {
                let data: Complex64 = leaves.iter().zip(leaf_data).map(|(&v, seq)| seq.get(a.label(v))).product();
                if data == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc.add(a.expansion_coefficient() * data * memo.get(&a));
            }
            acc.value()
        })
        .collect();
    CoeffSeq::from_values(cutoff, values)
}

/// `s ↦ F(n, s)` for `|n| ≤ range`, one exponential polynomial per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeTimeFunction {
    range: usize,
    modes: Vec<ExpPoly>,
}

impl TreeTimeFunction {
    /// Time-independent data, zero-padded or truncated to `range`.
    pub fn constant(data: &CoeffSeq, range: usize) -> Self {
        let r = range as i64;
        Self {
            range,
            modes: (-r..=r)
                .map(|n| {
                    let z = data.get(n);
                    if z == Complex64::new(0.0, 0.0) {
                        ExpPoly::zero()
                    } else {
                        ExpPoly::constant(z)
                    }
                })
                .collect(),
        }
    }

    pub fn zero(range: usize) -> Self {
        Self { range, modes: vec![ExpPoly::zero(); 2 * range + 1] }
    }

    #[inline]
    pub fn range(&self) -> usize {
        self.range
    }

    /// The polynomial at mode `n`, or `None` outside the range.
    #[inline]
    pub fn mode(&self, n: i64) -> Option<&ExpPoly> {
        let i = n + self.range as i64;
        if i < 0 {
            return None;
        }
        self.modes.get(i as usize)
    }

    pub fn max_term_count(&self) -> usize {
        self.modes.iter().map(ExpPoly::term_count).max().unwrap_or(0)
    }

    pub fn total_term_count(&self) -> usize {
        self.modes.iter().map(ExpPoly::term_count).sum()
    }

    /// Values at time `t` on the modes `|n| ≤ cutoff`.
    pub fn eval(&self, t: f64, cutoff: usize) -> CoeffSeq {
        CoeffSeq::from_fn(cutoff, |n| self.mode(n).map_or(Complex64::new(0.0, 0.0), |p| p.eval(t)))
    }

    pub fn add_assign(&mut self, other: &TreeTimeFunction) {
        let r = self.range as i64;
        for (i, poly) in self.modes.iter_mut().enumerate() {
            if let Some(q) = other.mode(i as i64 - r) {
                if !q.is_zero() {
                    *poly = poly.add(q);
                }
            }
        }
    }

    /// Modes carrying a nonzero polynomial.
    fn nonzero(&self) -> Vec<i64> {
        let r = self.range as i64;
        self.modes.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, _)| i as i64 - r).collect()
    }
}

/// `F1(n1)·F2(n2)` for every nonzero pair, keyed by `(n1, n2)`.
type PairTable = Vec<(i64, i64, ExpPoly)>;

/// One node step summed over several argument triples, producing modes `|n| ≤ range`.
pub fn node_step(triples: &[[&TreeTimeFunction; 3]], range: usize) -> TreeTimeFunction {
    // Pairwise products F1(n1)·F2(n2) are shared by every output mode.
    let tables: Vec<(PairTable, &TreeTimeFunction)> = triples
        .iter()
        .map(|[f1, f2, f3]| {
            let s1 = f1.nonzero();
            let s2 = f2.nonzero();
            let pairs: Vec<(i64, i64)> = s1.iter().flat_map(|&a| s2.iter().map(move |&b| (a, b))).collect();
            let products = pairs
                .into_par_iter()
                .map(|(a, b)| {
                    let p = f1.mode(a).expect("in range").mul(f2.mode(b).expect("in range"));
                    (a, b, p)
                })
                .collect();
            (products, *f3)
        })
        .collect();
    let r = range as i64;
    let modes = (-r..=r)
        .into_par_iter()
        .map(|n| {
            let mut raw: Vec<Term> = Vec::new();
            for (products, f3) in &tables {
                for (n1, n2, p12) in products {
                    let n3 = n - n1 - n2;
                    let Some(p3) = f3.mode(n3) else { continue };
                    if p3.is_zero() {
                        continue;
                    }
                    let Some(resonant) = classify_triple(n, [*n1, *n2, n3]) else {
                        continue;
                    };
                    let freq = sigma(*n1, *n2, n3).expect("modes are far below the overflow bound");
                    p12.push_product(p3, node_coefficient(n, resonant), freq, &mut raw);
                }
            }
            if raw.is_empty() {
                ExpPoly::zero()
            } else {
                ExpPoly::from_terms(raw).integrate()
            }
        })
        .collect();
    TreeTimeFunction { range, modes }
}

/// Symbolic evaluator of `s ↦ S_T(s)(a, …, a)` with the same data on every leaf.
///
/// Subtree functions are cached by shape, so enumerating all trees of a given
/// size reuses every smaller tree.
pub struct TreeEvaluator {
    cutoff: usize,
    project_internal: bool,
    leaf: Arc<TreeTimeFunction>,
    cache: HashMap<(String, usize), Arc<TreeTimeFunction>>,
}

impl TreeEvaluator {
    pub fn new(data: &CoeffSeq, project_internal: bool) -> Self {
        let cutoff = data.cutoff();
        Self {
            cutoff,
            project_internal,
            leaf: Arc::new(TreeTimeFunction::constant(data, cutoff)),
            cache: HashMap::new(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Range of labels a subtree root can take.
    fn subtree_range(&self, tree: &TernaryTree) -> usize {
        if self.project_internal {
            self.cutoff
        } else {
            self.cutoff * tree.leaf_count()
        }
    }

    /// `s ↦ S_T(s)(n)` for `|n| ≤ N`.
    pub fn function(&mut self, tree: &TernaryTree) -> Arc<TreeTimeFunction> {
        self.function_with_range(tree, self.cutoff)
    }

    fn function_with_range(&mut self, tree: &TernaryTree, range: usize) -> Arc<TreeTimeFunction> {
        if !tree.is_internal(0) {
            return Arc::clone(&self.leaf);
        }
        let key = (tree.encoding(), range);
        if let Some(hit) = self.cache.get(&key) {
            return Arc::clone(hit);
        }
        let [t1, t2, t3] = tree.split_subtrees().expect("root is internal");
        let f1 = self.function_with_range(&t1, self.subtree_range(&t1));
        let f2 = self.function_with_range(&t2, self.subtree_range(&t2));
        let f3 = self.function_with_range(&t3, self.subtree_range(&t3));
        let out = Arc::new(node_step(&[[&f1, &f2, &f3]], range));
        self.cache.insert(key, Arc::clone(&out));
        out
    }

    /// `S_T(t)(a, …, a)` on `|n| ≤ N`.
    pub fn apply(&mut self, tree: &TernaryTree, t: f64) -> Result<CoeffSeq> {
        check_time(t)?;
        Ok(self.function(tree).eval(t, self.cutoff))
    }
}

fn magnitudes(a: &CoeffSeq) -> Vec<(i64, f64)> {
    a.modes().filter(|(_, z)| *z != Complex64::new(0.0, 0.0)).map(|(n, z)| (n, z.norm())).collect()
}

/// `S̃(a1, a2, a3)` with the common cutoff of the inputs.
pub fn majorant_apply(a1: &CoeffSeq, a2: &CoeffSeq, a3: &CoeffSeq) -> Result<CoeffSeq> {
    let cutoff = a1.cutoff();
    for a in [a2, a3] {
        if a.cutoff() != cutoff {
            return Err(Error::CutoffMismatch { expected: cutoff, got: a.cutoff() });
        }
    }
    Ok(majorant_apply_with_cutoff(a1, a2, a3, cutoff))
}

/// `S̃(a1, a2, a3)(n)` for `|n| ≤ out_cutoff`:
///
/// `Σ_{n1+n2+n3=n, all ni ≠ n} |n| ⟨σ⟩^{-1/2} Π|ai(ni)| + |n| |a1(n)| |a2(-n)| |a3(n)|`.
///
/// Inputs may have different cutoffs; the output is real and nonnegative.
pub fn majorant_apply_with_cutoff(a1: &CoeffSeq, a2: &CoeffSeq, a3: &CoeffSeq, out_cutoff: usize) -> CoeffSeq {
    let m1 = magnitudes(a1);
    let m2 = magnitudes(a2);
    let r = out_cutoff as i64;
    let values: Vec<Complex64> = (-r..=r)
        .into_par_iter()
        .map(|n| {
            let weight = n.unsigned_abs() as f64;
            if weight == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = NeumaierSum::new();
            for &(n1, x1) in &m1 {
                if n1 == n {
                    continue;
                }
                for &(n2, x2) in &m2 {
                    let n3 = n - n1 - n2;
                    if n2 == n || n3 == n {
                        continue;
                    }
                    let x3 = a3.get(n3).norm();
                    if x3 == 0.0 {
                        continue;
                    }
                    let s = sigma(n1, n2, n3).expect("modes are far below the overflow bound");
                    acc.add(weight / bracket(s as f64).sqrt() * x1 * x2 * x3);
                }
            }
            acc.add(weight * a1.get(n).norm() * a2.get(-n).norm() * a3.get(n).norm());
            Complex64::new(acc.value(), 0.0)
        })
        .collect();
    CoeffSeq::from_values(out_cutoff, values).expect("2N+1 values")
}

/// `S̃_T(a_v)` by recursive composition of [`majorant_apply_with_cutoff`]
/// over the subtrees.
pub fn tree_majorant(
    tree: &TernaryTree,
    leaf_data: &[CoeffSeq],
    cutoff: usize,
    project_internal: bool,
) -> Result<CoeffSeq> {
    check_leaves(tree, leaf_data, cutoff)?;
    let mut next_leaf = 0;
    Ok(compose(tree, 0, leaf_data, &mut next_leaf, cutoff, cutoff, project_internal))
}

fn compose(
    tree: &TernaryTree,
    v: usize,
    leaf_data: &[CoeffSeq],
    next_leaf: &mut usize,
    cutoff: usize,
    range: usize,
    project_internal: bool,
) -> CoeffSeq {
    let Some(children) = tree.children(v) else {
        let a = &leaf_data[*next_leaf];
        *next_leaf += 1;
        return CoeffSeq::from_fn(range, |n| Complex64::new(a.get(n).norm(), 0.0));
    };
    let args = children.map(|c| {
        let sub_range = if project_internal || !tree.is_internal(c) {
            cutoff
        } else {
            cutoff * tree.subtree(c).expect("valid child").leaf_count()
        };
        compose(tree, c, leaf_data, next_leaf, cutoff, sub_range, project_internal)
    });
    majorant_apply_with_cutoff(&args[0], &args[1], &args[2], range)
}

/// `S̃_T(a_v)(n) = Σ_{j ∈ J(T), j(T)=n} Π_u ⟨σ(j,u)⟩^{-1/2} |j_u| Π_v |a_v(j_v)|` by direct summation.
pub fn tree_majorant_by_assignments(
    tree: &TernaryTree,
    leaf_data: &[CoeffSeq],
    cutoff: usize,
    project_internal: bool,
) -> Result<CoeffSeq> {
    check_leaves(tree, leaf_data, cutoff)?;
    let support = union_support(leaf_data);
    let leaves = tree.leaves();
    let internal = tree.internal_nodes();
    let n_max = cutoff as i64;
    let values: Vec<Complex64> = (-n_max..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = NeumaierSum::new();
            for a in enumerate_assignments_within(tree, n, cutoff, project_internal, &support) {
                let data: f64 = leaves.iter().zip(leaf_data).map(|(&v, seq)| seq.get(a.label(v)).norm()).product();
                if data == 0.0 {
                    continue;
                }
                let weight: f64 = internal
                    .iter()
                    .map(|&u| {
                        let s = a.sigma(u).expect("internal") as f64;
                        a.label(u).unsigned_abs() as f64 / bracket(s).sqrt()
                    })
                    .product();
                acc.add(weight * data);
            }
            Complex64::new(acc.value(), 0.0)
        })
        .collect();
    CoeffSeq::from_values(cutoff, values)
}
