//! Resonance function, admissible index assignments on trees and their
//! expansion coefficients.
//!
//! An assignment labels every node of a tree with an integer mode. At each
//! internal node `v` with children `v1, v2, v3` the label is the sum of the
//! children's labels and either no child repeats the parent's label
//! (nonresonant, `σ ≠ 0`) or the children read `(j, -j, j)` (resonant, `σ = 0`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tree::TernaryTree;

/// `σ(n1, n2, n3) = (n1+n2+n3)³ - n1³ - n2³ - n3³ = 3(n1+n2)(n2+n3)(n3+n1)`,
/// evaluated in the factored form with 128-bit checked arithmetic.
pub fn sigma(n1: i64, n2: i64, n3: i64) -> Result<i128> {
    let (a, b, c) = (n1 as i128, n2 as i128, n3 as i128);
    (a + b)
        .checked_mul(b + c)
        .and_then(|x| x.checked_mul(c + a))
        .and_then(|x| x.checked_mul(3))
        .ok_or(Error::SigmaOverflow(n1, n2, n3))
}

/// Classifies the ordered triple below a node labelled `parent`.
///
/// Returns `Some(false)` for a nonresonant triple, `Some(true)` for the
/// resonant pattern `(j, -j, j)` and `None` when the triple is excluded.
#[inline]
pub fn classify_triple(parent: i64, children: [i64; 3]) -> Option<bool> {
    let [a, b, c] = children;
    if a != parent && b != parent && c != parent {
        Some(false)
    } else if a == parent && b == -parent && c == parent {
        Some(true)
    } else {
        None
    }
}

/// Per-node factor of the expansion: `-i·j/3` when nonresonant, `+i·j` when resonant.
#[inline]
pub fn node_coefficient(label: i64, resonant: bool) -> Complex64 {
    if resonant {
        Complex64::new(0.0, label as f64)
    } else {
        Complex64::new(0.0, -(label as f64) / 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeResonance {
    pub sigma: i128,
    pub resonant: bool,
}

/// An element `j` of `J(T)` together with `σ(j, v)` and the branch taken at
/// every internal node.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexAssignment<'t> {
    tree: &'t TernaryTree,
    labels: Vec<i64>,
    nodes: Vec<Option<NodeResonance>>,
}

impl<'t> IndexAssignment<'t> {
    /// Derives internal labels from leaf labels (given in preorder leaf order)
    /// and checks admissibility.
    pub fn from_leaf_labels(tree: &'t TernaryTree, leaf_labels: &[i64]) -> Result<Self> {
        if leaf_labels.len() != tree.leaf_count() {
            return Err(Error::LeafCountMismatch { expected: tree.leaf_count(), got: leaf_labels.len() });
        }
        let mut labels = vec![0i64; tree.len()];
        for (&v, &j) in tree.leaves().iter().zip(leaf_labels) {
            labels[v] = j;
        }
        for v in (0..tree.len()).rev() {
            if let Some([a, b, c]) = tree.children(v) {
                labels[v] = labels[a] + labels[b] + labels[c];
            }
        }
        Self::from_labels(tree, labels)
    }

    /// Validates a full labelling.
    pub fn from_labels(tree: &'t TernaryTree, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != tree.len() {
            return Err(Error::Inadmissible(format!("{} labels for a tree with {} nodes", labels.len(), tree.len())));
        }
        let mut nodes = vec![None; tree.len()];
        for v in 0..tree.len() {
            let Some([a, b, c]) = tree.children(v) else {
                continue;
            };
            let triple = [labels[a], labels[b], labels[c]];
            if labels[v] != triple.iter().sum::<i64>() {
                return Err(Error::Inadmissible(format!("node {v}: label {} is not the sum of {triple:?}", labels[v])));
            }
            let resonant = classify_triple(labels[v], triple).ok_or_else(|| {
                Error::Inadmissible(format!("node {v}: excluded triple {triple:?} below {}", labels[v]))
            })?;
            let sigma = sigma(triple[0], triple[1], triple[2])?;
            debug_assert_eq!(resonant, sigma == 0);
            nodes[v] = Some(NodeResonance { sigma, resonant });
        }
        Ok(Self { tree, labels, nodes })
    }

    #[inline]
    pub fn tree(&self) -> &'t TernaryTree {
        self.tree
    }

    #[inline]
    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, v: usize) -> i64 {
        self.labels[v]
    }

    /// `j(T)`.
    #[inline]
    pub fn root_label(&self) -> i64 {
        self.labels[0]
    }

    pub fn leaf_labels(&self) -> Vec<i64> {
        self.tree.leaves().into_iter().map(|v| self.labels[v]).collect()
    }

    /// `σ(j, v)` for internal `v`, `None` at leaves.
    #[inline]
    pub fn sigma(&self, v: usize) -> Option<i128> {
        self.nodes[v].map(|n| n.sigma)
    }

    #[inline]
    pub fn is_resonant(&self, v: usize) -> Option<bool> {
        self.nodes[v].map(|n| n.resonant)
    }

    /// `σ` at internal nodes in preorder; `I_T` depends on `j` only through this.
    pub fn sigma_profile(&self) -> Vec<i128> {
        self.nodes.iter().flatten().map(|n| n.sigma).collect()
    }

    /// Product of the per-node factors over all internal nodes.
    pub fn expansion_coefficient(&self) -> Complex64 {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(v, node)| node.map(|n| node_coefficient(self.labels[v], n.resonant)))
            .product()
    }
}

/// Every `j ∈ J(T)` with `j(T) = n` and all leaf labels in `[-N, N]`.
///
/// With `project_internal` the internal labels must also lie in `[-N, N]`.
/// Assignments come out in lexicographic order of the leaf tuple.
pub fn enumerate_assignments(tree: &TernaryTree, n: i64, cutoff: usize, project_internal: bool) -> Assignments<'_> {
    let range: Vec<i64> = (-(cutoff as i64)..=cutoff as i64).collect();
    Assignments::new(tree, n, cutoff, project_internal, range)
}

/// As [`enumerate_assignments`], restricted to leaf labels drawn from `support`.
///
/// Used when the leaf data vanish outside a known set of modes: assignments
/// with a leaf outside the support contribute zero.
pub fn enumerate_assignments_within<'t>(
    tree: &'t TernaryTree,
    n: i64,
    cutoff: usize,
    project_internal: bool,
    support: &[i64],
) -> Assignments<'t> {
    let mut values: Vec<i64> = support.iter().copied().filter(|j| j.unsigned_abs() as usize <= cutoff).collect();
    values.sort_unstable();
    values.dedup();
    Assignments::new(tree, n, cutoff, project_internal, values)
}

pub struct Assignments<'t> {
    tree: &'t TernaryTree,
    leaves: Vec<usize>,
    target: i64,
    cutoff: i64,
    project_internal: bool,
    values: Vec<i64>,
    digits: Vec<usize>,
    exhausted: bool,
}

impl<'t> Assignments<'t> {
    fn new(tree: &'t TernaryTree, target: i64, cutoff: usize, project_internal: bool, values: Vec<i64>) -> Self {
        let leaves = tree.leaves();
        let free = leaves.len() - 1;
        Self {
            tree,
            exhausted: values.is_empty() || target.unsigned_abs() as usize > cutoff,
            leaves,
            target,
            cutoff: cutoff as i64,
            project_internal,
            values,
            digits: vec![0; free],
        }
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.values.len() {
                return;
            }
            *d = 0;
        }
        self.exhausted = true;
    }

    fn candidate(&self) -> Option<IndexAssignment<'t>> {
        let partial: i64 = self.digits.iter().map(|&d| self.values[d]).sum();
        let last = self.target - partial;
        if last.abs() > self.cutoff || self.values.binary_search(&last).is_err() {
            return None;
        }
        let mut labels = vec![0i64; self.tree.len()];
        for (&v, &d) in self.leaves.iter().zip(&self.digits) {
            labels[v] = self.values[d];
        }
        labels[*self.leaves.last().expect("trees have a leaf")] = last;
        let mut nodes = vec![None; self.tree.len()];
        for v in (0..self.tree.len()).rev() {
            let Some([a, b, c]) = self.tree.children(v) else {
                continue;
            };
            let triple = [labels[a], labels[b], labels[c]];
            let label = triple[0] + triple[1] + triple[2];
            if self.project_internal && label.abs() > self.cutoff {
                return None;
            }
            let resonant = classify_triple(label, triple)?;
            let sigma = sigma(triple[0], triple[1], triple[2]).ok()?;
            labels[v] = label;
            nodes[v] = Some(NodeResonance { sigma, resonant });
        }
        Some(IndexAssignment { tree: self.tree, labels, nodes })
    }
}

impl<'t> Iterator for Assignments<'t> {
    type Item = IndexAssignment<'t>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.exhausted {
            let found = self.candidate();
            self.advance();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}
