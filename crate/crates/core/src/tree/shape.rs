//! Complete binary tree shapes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::label::NodeLabel;
use crate::error::{Error, Result};

/// Largest internal-node count accepted by the exact shape oracles.
pub const MAX_EXACT_SIZE: usize = 8;

/// A finite complete binary tree, stored by its leaves in pre-order.
///
/// Internal nodes are exactly the strict prefixes of the leaves.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryTreeShape {
    leaves: Vec<NodeLabel>,
}

impl BinaryTreeShape {
    /// The tree `{∅}`, whose only leaf is the root.
    pub fn root() -> Self {
        BinaryTreeShape {
            leaves: vec![NodeLabel::ROOT],
        }
    }

    /// Builds a shape from its leaves, checking completeness.
    pub fn from_leaves(mut leaves: Vec<NodeLabel>) -> Result<Self> {
        leaves.sort();
        leaves.dedup();
        let shape = BinaryTreeShape { leaves };
        shape.validate()?;
        Ok(shape)
    }

    /// Builds a shape from its internal nodes (ancestor closed).
    pub fn from_internal(internal: &[NodeLabel]) -> Result<Self> {
        let set: BTreeSet<NodeLabel> = internal.iter().copied().collect();
        for u in &set {
            if let Some(p) = u.parent() {
                if !set.contains(&p) {
                    return Err(Error::Format(format!("internal node {u} has no parent {p}")));
                }
            }
        }
        if set.is_empty() {
            return Ok(Self::root());
        }
        let mut leaves = Vec::with_capacity(set.len() + 1);
        for u in &set {
            for b in 0..2 {
                let c = u.child(b);
                if !set.contains(&c) {
                    leaves.push(c);
                }
            }
        }
        Self::from_leaves(leaves)
    }

    /// Leaves sorted in pre-order.
    pub fn leaves(&self) -> &[NodeLabel] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Number of internal nodes `n`; the tree has `n + 1` leaves.
    pub fn internal_count(&self) -> usize {
        self.leaves.len() - 1
    }

    pub fn internal_nodes(&self) -> Vec<NodeLabel> {
        let mut set = BTreeSet::new();
        for &l in &self.leaves {
            let mut u = l;
            while let Some(p) = u.parent() {
                if !set.insert(p) {
                    break;
                }
                u = p;
            }
        }
        set.into_iter().collect()
    }

    /// All nodes, internal and leaves, in pre-order.
    pub fn nodes(&self) -> Vec<NodeLabel> {
        let mut v = self.internal_nodes();
        v.extend_from_slice(&self.leaves);
        v.sort();
        v
    }

    pub fn is_leaf(&self, u: NodeLabel) -> bool {
        self.leaves.binary_search(&u).is_ok()
    }

    /// Leaf depths in pre-order.
    pub fn leaf_depths(&self) -> Vec<u8> {
        self.leaves.iter().map(|l| l.depth()).collect()
    }

    /// Profile: entry `k` counts the leaves at depth `k`.
    pub fn profile(&self) -> Vec<u64> {
        profile_of(self.leaves.iter().map(|l| l.depth()))
    }

    pub fn height(&self) -> u8 {
        self.leaves.iter().map(|l| l.depth()).max().unwrap_or(0)
    }

    /// Replaces the leaf `u` by the internal node `u` with children `u0`, `u1`.
    pub fn insert_at(&self, u: NodeLabel) -> Result<Self> {
        let i = self
            .leaves
            .binary_search(&u)
            .map_err(|_| Error::Precondition(format!("{u} is not a leaf")))?;
        let mut leaves = Vec::with_capacity(self.leaves.len() + 1);
        leaves.extend_from_slice(&self.leaves[..i]);
        leaves.push(u.child(0));
        leaves.push(u.child(1));
        leaves.extend_from_slice(&self.leaves[i + 1..]);
        Ok(BinaryTreeShape { leaves })
    }

    /// The `n + 1` shapes reachable by one insertion, in leaf order.
    pub fn one_step_children(&self) -> Vec<Self> {
        self.leaves
            .iter()
            .map(|&u| self.insert_at(u).expect("leaf"))
            .collect()
    }

    /// Pre-order code: `1` for an internal node, `0` for a leaf.
    pub fn encode(&self) -> String {
        let mut out = String::with_capacity(2 * self.leaves.len());
        let mut stack = vec![NodeLabel::ROOT];
        while let Some(u) = stack.pop() {
            if self.is_leaf(u) {
                out.push('0');
            } else {
                out.push('1');
                stack.push(u.child(1));
                stack.push(u.child(0));
            }
        }
        out
    }

    pub fn decode(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        let mut pos = 0usize;
        let mut leaves = Vec::new();
        fn walk(
            bytes: &[u8],
            pos: &mut usize,
            u: NodeLabel,
            leaves: &mut Vec<NodeLabel>,
        ) -> Result<()> {
            match bytes.get(*pos) {
                Some(b'0') => {
                    *pos += 1;
                    leaves.push(u);
                    Ok(())
                }
                Some(b'1') => {
                    *pos += 1;
                    if u.depth() >= super::label::MAX_LABEL_DEPTH {
                        return Err(Error::Format("shape code too deep".into()));
                    }
                    walk(bytes, pos, u.child(0), leaves)?;
                    walk(bytes, pos, u.child(1), leaves)
                }
                _ => Err(Error::Format("truncated shape code".into())),
            }
        }
        walk(bytes, &mut pos, NodeLabel::ROOT, &mut leaves)?;
        if pos != bytes.len() {
            return Err(Error::Format("trailing characters in shape code".into()));
        }
        Ok(BinaryTreeShape { leaves })
    }

    fn validate(&self) -> Result<()> {
        if self.leaves.is_empty() {
            return Err(Error::Format("a shape needs at least one leaf".into()));
        }
        // A prefix-free leaf set is complete iff its Kraft sum is exactly one.
        let mut kraft = 0u128;
        let max = self.height();
        if max > 120 {
            return Err(Error::Format("shape too deep to validate".into()));
        }
        for w in self.leaves.windows(2) {
            if w[0].is_prefix_of(w[1]) {
                return Err(Error::Format(format!("{} is an ancestor of {}", w[0], w[1])));
            }
        }
        for l in &self.leaves {
            kraft += 1u128 << (max - l.depth());
        }
        if kraft != 1u128 << max {
            return Err(Error::Format("leaf set is not a complete binary tree".into()));
        }
        Ok(())
    }

    /// Internal-node count of the subtree rooted at each internal node.
    pub fn subtree_sizes(&self) -> HashMap<NodeLabel, usize> {
        let mut sizes: HashMap<NodeLabel, usize> = HashMap::new();
        for u in self.internal_nodes() {
            let mut v = Some(u);
            while let Some(w) = v {
                *sizes.entry(w).or_insert(0) += 1;
                v = w.parent();
            }
        }
        sizes
    }
}

pub(crate) fn profile_of(depths: impl Iterator<Item = u8>) -> Vec<u64> {
    let mut prof = Vec::new();
    for d in depths {
        let d = d as usize;
        if prof.len() <= d {
            prof.resize(d + 1, 0);
        }
        prof[d] += 1;
    }
    prof
}

impl fmt::Display for BinaryTreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for BinaryTreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTreeShape({})", self.encode())
    }
}

/// Exact probability that the uniform-leaf-insertion tree with `n` internal
/// nodes has this shape: the product over internal nodes of one over the
/// internal size of the subtree they root.
pub fn shape_probability(shape: &BinaryTreeShape) -> Result<f64> {
    let n = shape.internal_count();
    if n > MAX_EXACT_SIZE {
        return Err(Error::Range(format!(
            "shape has {n} internal nodes, exact oracle supports at most {MAX_EXACT_SIZE}"
        )));
    }
    Ok(shape
        .subtree_sizes()
        .values()
        .map(|&s| 1.0 / s as f64)
        .product())
}

/// All complete binary tree shapes with `n` internal nodes, in code order.
pub fn all_shapes(n: usize) -> Result<Vec<BinaryTreeShape>> {
    if n > MAX_EXACT_SIZE {
        return Err(Error::Range(format!("n = {n} exceeds {MAX_EXACT_SIZE}")));
    }
    fn codes(n: usize, memo: &mut Vec<Option<Vec<String>>>) -> Vec<String> {
        if let Some(v) = &memo[n] {
            return v.clone();
        }
        let v = if n == 0 {
            vec!["0".to_string()]
        } else {
            let mut v = Vec::new();
            for left in 0..n {
                let ls = codes(left, memo);
                let rs = codes(n - 1 - left, memo);
                for l in &ls {
                    for r in &rs {
                        v.push(format!("1{l}{r}"));
                    }
                }
            }
            v
        };
        memo[n] = Some(v.clone());
        v
    }
    let mut memo = vec![None; n + 1];
    let mut shapes: Vec<BinaryTreeShape> = codes(n, &mut memo)
        .iter()
        .map(|c| BinaryTreeShape::decode(c).expect("generated code"))
        .collect();
    shapes.sort_by_key(|s| s.encode());
    Ok(shapes)
}

/// Shape distribution by brute force over every sequence of leaf choices.
///
/// There are `(n)!` sequences (`k + 1` choices at step `k`), each equally likely.
pub fn enumerate_insertion_orders(n: usize) -> Result<HashMap<String, f64>> {
    if n > MAX_EXACT_SIZE {
        return Err(Error::Range(format!("n = {n} exceeds {MAX_EXACT_SIZE}")));
    }
    let mut level: HashMap<BinaryTreeShape, u64> = HashMap::new();
    level.insert(BinaryTreeShape::root(), 1);
    for _ in 0..n {
        let mut next: HashMap<BinaryTreeShape, u64> = HashMap::new();
        for (shape, count) in level {
            for child in shape.one_step_children() {
                *next.entry(child).or_insert(0) += count;
            }
        }
        level = next;
    }
    let total: u64 = (1..=n as u64).product();
    Ok(level
        .into_iter()
        .map(|(s, c)| (s.encode(), c as f64 / total as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> NodeLabel {
        s.parse().unwrap()
    }

    #[test]
    fn first_tree() {
        let t1 = BinaryTreeShape::root().insert_at(NodeLabel::ROOT).unwrap();
        assert_eq!(t1.leaves(), &[l("0"), l("1")]);
        assert_eq!(t1.internal_count(), 1);
        assert_eq!(shape_probability(&t1).unwrap(), 1.0);
        assert_eq!(t1.encode(), "100");
    }

    #[test]
    fn second_tree_depths() {
        let t1 = BinaryTreeShape::decode("100").unwrap();
        for t2 in t1.one_step_children() {
            let mut d = t2.leaf_depths();
            d.sort();
            assert_eq!(d, vec![1, 2, 2]);
            assert_eq!(shape_probability(&t2).unwrap(), 0.5);
        }
    }

    #[test]
    fn catalan_counts_and_normalization() {
        let cat = [1, 1, 2, 5, 14, 42, 132];
        for (n, &c) in cat.iter().enumerate() {
            let shapes = all_shapes(n).unwrap();
            assert_eq!(shapes.len(), c);
            let s: f64 = shapes.iter().map(|s| shape_probability(s).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_formula_matches_enumeration() {
        for n in 0..=6 {
            let exact = enumerate_insertion_orders(n).unwrap();
            for shape in all_shapes(n).unwrap() {
                let p = shape_probability(&shape).unwrap();
                let q = exact.get(&shape.encode()).copied().unwrap_or(0.0);
                assert!((p - q).abs() < 1e-14, "{shape}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn rejects_incomplete() {
        assert!(BinaryTreeShape::from_leaves(vec![l("0"), l("10")]).is_err());
        assert!(BinaryTreeShape::from_leaves(vec![l("0"), l("00"), l("1")]).is_err());
        assert!(BinaryTreeShape::from_internal(&[l("0")]).is_err());
    }

    #[test]
    fn internal_and_leaves() {
        let s = BinaryTreeShape::from_internal(&[NodeLabel::ROOT, l("0"), l("00")]).unwrap();
        assert_eq!(s.leaf_depths(), vec![3, 3, 2, 1]);
        assert_eq!(s.profile(), vec![0, 1, 1, 2]);
        assert_eq!(s.nodes().len(), 7);
        assert_eq!(BinaryTreeShape::decode(&s.encode()).unwrap(), s);
    }

    #[test]
    fn oracle_size_limit() {
        assert!(all_shapes(9).is_err());
        let mut s = BinaryTreeShape::root();
        for _ in 0..9 {
            let leaf = s.leaves()[0];
            s = s.insert_at(leaf).unwrap();
        }
        assert!(matches!(shape_probability(&s), Err(Error::Range(_))));
    }
}
