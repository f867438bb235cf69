//! Ordered rooted trees in which every node has zero or three children.
//!
//! Nodes are numbered in preorder with the root at id 0, so every child has
//! a larger id than its parent. A tree with `k` internal nodes has `3k + 1`
//! nodes and `2k + 1` leaves.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TernaryTree {
    internal: Vec<bool>,
    parent: Vec<Option<usize>>,
    children: Vec<Option<[usize; 3]>>,
}

impl TernaryTree {
    /// The single-leaf tree.
    pub fn leaf() -> Self {
        Self::from_shape(vec![false]).expect("single leaf is a valid tree")
    }

    /// Root with three leaf children.
    pub fn cherry() -> Self {
        Self::from_shape(vec![true, false, false, false]).expect("valid tree")
    }

    /// Parses a preorder string over `I` (internal) and `L` (leaf), e.g. `"ILLL"`.
    pub fn from_preorder(encoding: &str) -> Result<Self> {
        let shape = encoding
            .chars()
            .map(|ch| match ch {
                'I' => Ok(true),
                'L' => Ok(false),
                _ => Err(Error::InvalidTreeEncoding(encoding.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_shape(shape).map_err(|_| Error::InvalidTreeEncoding(encoding.to_string()))
    }

    fn from_shape(internal: Vec<bool>) -> Result<Self> {
        let len = internal.len();
        let mut parent = vec![None; len];
        let mut children: Vec<Option<[usize; 3]>> = vec![None; len];
        // (node, number of children attached so far)
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (id, &is_internal) in internal.iter().enumerate() {
            if id > 0 {
                let Some((p, filled)) = open.last_mut() else {
                    // the tree closed before the encoding ended
                    return Err(Error::InvalidTreeEncoding(render(&internal)));
                };
                let p = *p;
                children[p].get_or_insert([0; 3])[*filled] = id;
                *filled += 1;
                parent[id] = Some(p);
                if *filled == 3 {
                    open.pop();
                }
            }
            if is_internal {
                open.push((id, 0));
            }
        }
        if len == 0 || !open.is_empty() {
            return Err(Error::InvalidTreeEncoding(render(&internal)));
        }
        Ok(Self { internal, parent, children })
    }

    /// Preorder `I`/`L` encoding.
    pub fn encoding(&self) -> String {
        render(&self.internal)
    }

    /// Preorder child counts, e.g. `"3000"`; the canonical sort key.
    pub fn child_count_string(&self) -> String {
        self.internal.iter().map(|&b| if b { '3' } else { '0' }).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.internal.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `|T⁰|`.
    pub fn internal_count(&self) -> usize {
        self.internal.iter().filter(|&&b| b).count()
    }

    /// `|T^∞|`.
    pub fn leaf_count(&self) -> usize {
        self.len() - self.internal_count()
    }

    #[inline]
    pub fn is_internal(&self, v: usize) -> bool {
        self.internal[v]
    }

    #[inline]
    pub fn children(&self, v: usize) -> Option<[usize; 3]> {
        self.children[v]
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Leaf ids in preorder.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.internal[v]).collect()
    }

    /// Internal ids in preorder.
    pub fn internal_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.internal[v]).collect()
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidNode { id: v, len: self.len() })
        }
    }

    /// Length of the path from the root to `v`.
    pub fn node_level(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        let mut level = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            level += 1;
            cur = p;
        }
        Ok(level)
    }

    fn levels(&self) -> Vec<usize> {
        let mut levels = vec![0; self.len()];
        for v in 1..self.len() {
            levels[v] = levels[self.parent[v].expect("non-root has a parent")] + 1;
        }
        levels
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Internal nodes split by level parity: `(odd, even)`.
    pub fn odd_even_partition(&self) -> (Vec<usize>, Vec<usize>) {
        let levels = self.levels();
        self.internal_nodes().into_iter().partition(|&v| levels[v] % 2 == 1)
    }

    fn subtree_end(&self, v: usize) -> usize {
        // preorder: the subtree of v is the contiguous block starting at v
        let mut pending = 1usize;
        let mut cur = v;
        while pending > 0 {
            pending -= 1;
            if self.internal[cur] {
                pending += 3;
            }
            cur += 1;
        }
        cur
    }

    /// The subtree rooted at `v`, re-indexed from 0.
    pub fn subtree(&self, v: usize) -> Result<TernaryTree> {
        self.check(v)?;
        Self::from_shape(self.internal[v..self.subtree_end(v)].to_vec())
    }

    /// The three subtrees rooted at the root's children.
    pub fn split_subtrees(&self) -> Result<[TernaryTree; 3]> {
        let [a, b, c] = self.children[0].ok_or(Error::LeafRoot)?;
        Ok([self.subtree(a)?, self.subtree(b)?, self.subtree(c)?])
    }

    /// A new root whose ordered children are `first`, `second`, `third`.
    pub fn graft(first: &TernaryTree, second: &TernaryTree, third: &TernaryTree) -> TernaryTree {
        let mut shape = Vec::with_capacity(1 + first.len() + second.len() + third.len());
        shape.push(true);
        for t in [first, second, third] {
            shape.extend_from_slice(&t.internal);
        }
        Self::from_shape(shape).expect("grafting valid trees yields a valid tree")
    }
}

fn render(internal: &[bool]) -> String {
    internal.iter().map(|&b| if b { 'I' } else { 'L' }).collect()
}

impl fmt::Debug for TernaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryTree({})", self.encoding())
    }
}

impl fmt::Display for TernaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

/// All ordered ternary trees with exactly `k` internal nodes, sorted
/// lexicographically by their preorder child-count strings (leaf before
/// internal at the first difference).
pub fn enumerate_trees(k: usize) -> Vec<TernaryTree> {
    let mut out = Vec::new();
    let mut shape = Vec::with_capacity(3 * k + 1);
    extend_shapes(&mut shape, k, 1, &mut out);
    out
}

/// Trees grouped by internal count, `0..=k_max`.
pub fn enumerate_trees_up_to(k_max: usize) -> Vec<Vec<TernaryTree>> {
    (0..=k_max).map(enumerate_trees).collect()
}

fn extend_shapes(shape: &mut Vec<bool>, internal_left: usize, open: usize, out: &mut Vec<TernaryTree>) {
    if open == 0 {
        if internal_left == 0 {
            out.push(TernaryTree::from_shape(shape.clone()).expect("generated shapes are valid"));
        }
        return;
    }
    // a leaf closes a slot; it must not close the last one while internal nodes remain
    if open > 1 || internal_left == 0 {
        shape.push(false);
        extend_shapes(shape, internal_left, open - 1, out);
        shape.pop();
    }
    if internal_left > 0 {
        shape.push(true);
        extend_shapes(shape, internal_left - 1, open + 2, out);
        shape.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_trees(0), vec![TernaryTree::leaf()]);
        assert_eq!(enumerate_trees(1), vec![TernaryTree::cherry()]);
        let sizes: Vec<usize> = (0..=4).map(|k| enumerate_trees(k).len()).collect();
        assert_eq!(sizes, vec![1, 1, 3, 12, 55]);
    }

    /// Every string over {0,3} of length 3k+1 that parses as a tree.
    fn brute_force(k: usize) -> HashSet<String> {
        let len = 3 * k + 1;
        (0u32..1 << len)
            .map(|mask| (0..len).map(|i| if mask >> (len - 1 - i) & 1 == 1 { 'I' } else { 'L' }).collect::<String>())
            .filter(|s| s.chars().filter(|&c| c == 'I').count() == k)
            .filter(|s| TernaryTree::from_preorder(s).is_ok())
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force_and_is_sorted() {
        for k in 0..=5 {
            let trees = enumerate_trees(k);
            let keys: Vec<String> = trees.iter().map(|t| t.child_count_string()).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            assert_eq!(keys, sorted, "k = {k} not in canonical order");
            let set: HashSet<String> = trees.iter().map(|t| t.encoding()).collect();
            assert_eq!(set.len(), trees.len(), "duplicates at k = {k}");
            assert_eq!(set, brute_force(k));
            for t in &trees {
                assert_eq!(t.internal_count(), k);
                assert_eq!(t.len(), 3 * k + 1);
                assert_eq!(t.leaf_count(), 2 * k + 1);
                for v in 0..t.len() {
                    match t.children(v) {
                        Some(ch) => {
                            assert!(t.is_internal(v));
                            for c in ch {
                                assert_eq!(t.parent(c), Some(v));
                                assert!(c > v);
                            }
                        }
                        None => assert!(!t.is_internal(v)),
                    }
                }
            }
        }
    }

    #[test]
    fn encoding_round_trip_and_rejections() {
        let t = TernaryTree::from_preorder("IILLLLL").unwrap();
        assert_eq!(t.encoding(), "IILLLLL");
        assert_eq!(t.child_count_string(), "3300000");
        for bad in ["", "I", "LL", "ILL", "ILLLL", "IXLL", "LILLL"] {
            assert!(TernaryTree::from_preorder(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn levels() {
        let t = TernaryTree::from_preorder("IILLLLL").unwrap();
        assert_eq!(t.node_level(0), Ok(0));
        assert_eq!(t.node_level(1), Ok(1));
        assert_eq!(t.node_level(2), Ok(2));
        assert_eq!(t.node_level(6), Ok(1));
        assert!(matches!(t.node_level(7), Err(Error::InvalidNode { id: 7, len: 7 })));
        for tree in enumerate_trees(2) {
            let internal_child = tree.internal_nodes()[1];
            let grandchild = tree.children(internal_child).unwrap()[0];
            assert_eq!(tree.node_level(grandchild), Ok(2));
        }
        assert_eq!(t.height(), 2);
        assert_eq!(TernaryTree::leaf().height(), 0);
    }

    #[test]
    fn parity_partition() {
        let (odd, even) = TernaryTree::cherry().odd_even_partition();
        assert!(odd.is_empty());
        assert_eq!(even, vec![0]);

        let t = TernaryTree::from_preorder("ILILLLL").unwrap();
        let (odd, even) = t.odd_even_partition();
        assert_eq!(odd, vec![2]);
        assert_eq!(even, vec![0]);

        for k in 0..=5 {
            for tree in enumerate_trees(k) {
                let (odd, even) = tree.odd_even_partition();
                assert_eq!(odd.len() + even.len(), k);
                assert!(odd.iter().all(|v| !even.contains(v)));
            }
        }
    }

    #[test]
    fn split_examples() {
        let [a, b, c] = TernaryTree::cherry().split_subtrees().unwrap();
        assert_eq!([a, b, c], [TernaryTree::leaf(), TernaryTree::leaf(), TernaryTree::leaf()]);
        let t = TernaryTree::from_preorder("IILLLLL").unwrap();
        let [a, b, c] = t.split_subtrees().unwrap();
        assert_eq!(a, TernaryTree::cherry());
        assert_eq!(b, TernaryTree::leaf());
        assert_eq!(c, TernaryTree::leaf());
        assert_eq!(TernaryTree::leaf().split_subtrees(), Err(Error::LeafRoot));
    }

    #[test]
    fn split_and_graft_form_a_bijection() {
        for k in 1..=4 {
            let trees = enumerate_trees(k);
            let mut triples = HashSet::new();
            for t in &trees {
                let [a, b, c] = t.split_subtrees().unwrap();
                assert_eq!(a.internal_count() + b.internal_count() + c.internal_count(), k - 1);
                let regrown = TernaryTree::graft(&a, &b, &c);
                assert_eq!(&regrown, t);
                assert!(triples.insert((a.encoding(), b.encoding(), c.encoding())));
            }
            // every triple with total k-1 appears exactly once
            let mut expected = 0;
            for k1 in 0..k {
                for k2 in 0..k - k1 {
                    let k3 = k - 1 - k1 - k2;
                    expected += enumerate_trees(k1).len() * enumerate_trees(k2).len() * enumerate_trees(k3).len();
                }
            }
            assert_eq!(triples.len(), expected);
        }
    }
}
