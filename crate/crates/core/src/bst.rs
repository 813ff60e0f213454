//! Random binary search trees grown by uniform leaf insertion.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::tree::{BinaryTreeShape, NodeLabel, MAX_LABEL_DEPTH};

/// The sequence `𝒯_0 ⊂ 𝒯_1 ⊂ …`: each step picks one of the `n + 1` leaves
/// uniformly and makes it internal.
#[derive(Clone, Debug)]
pub struct BstProcess {
    rng: ChaCha8Rng,
    leaves: Vec<NodeLabel>,
    profile: Vec<u64>,
}

impl BstProcess {
    pub fn new(seed: u64) -> Self {
        BstProcess {
            rng: stream(seed, "bst", 0),
            leaves: vec![NodeLabel::ROOT],
            profile: vec![1],
        }
    }

    /// Number of internal nodes `n`.
    pub fn size(&self) -> usize {
        self.leaves.len() - 1
    }

    /// Leaf counts per depth.
    pub fn profile(&self) -> &[u64] {
        &self.profile
    }

    /// Leaves in insertion order (not sorted).
    pub fn leaves(&self) -> &[NodeLabel] {
        &self.leaves
    }

    pub fn step(&mut self) -> Result<NodeLabel> {
        let i = self.rng.random_range(0..self.leaves.len());
        let u = self.leaves[i];
        if u.depth() >= MAX_LABEL_DEPTH {
            return Err(Error::Resource {
                what: "tree depth",
                limit: u64::from(MAX_LABEL_DEPTH),
            });
        }
        self.leaves[i] = u.child(0);
        self.leaves.push(u.child(1));
        let d = u.depth() as usize;
        self.profile[d] -= 1;
        if self.profile.len() <= d + 1 {
            self.profile.push(0);
        }
        self.profile[d + 1] += 2;
        Ok(u)
    }

    /// Grows the tree until it has `n` internal nodes.
    pub fn grow_to(&mut self, n: usize) -> Result<()> {
        while self.size() < n {
            self.step()?;
        }
        Ok(())
    }

    pub fn shape(&self) -> BinaryTreeShape {
        BinaryTreeShape::from_leaves(self.leaves.clone()).expect("insertion keeps the tree complete")
    }
}

/// `𝒯_1, …, 𝒯_n` for the given seed.
pub fn simulate_bst(seed: u64, n: usize) -> Result<Vec<BinaryTreeShape>> {
    if n == 0 {
        return Err(Error::Precondition("simulate_bst needs n >= 1".into()));
    }
    let mut p = BstProcess::new(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        p.step()?;
        out.push(p.shape());
    }
    Ok(out)
}

/// Leaf-depth profile of `𝒯_n` without materializing intermediate shapes.
pub fn bst_profile(seed: u64, n: usize) -> Result<Vec<u64>> {
    let mut p = BstProcess::new(seed);
    p.grow_to(n)?;
    Ok(p.profile().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::shape_probability;
    use std::collections::HashMap;

    /// Binary search tree built by inserting the keys of a random permutation.
    fn permutation_bst(seed: u64, n: usize) -> BinaryTreeShape {
        let mut rng = stream(seed, "perm", 0);
        let mut keys: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            keys.swap(i, j);
        }
        let mut nodes: Vec<(u32, NodeLabel)> = Vec::new();
        for &k in &keys {
            let mut u = NodeLabel::ROOT;
            while let Some(&(key, _)) = nodes.iter().find(|(_, l)| *l == u) {
                u = u.child(u8::from(k > key));
            }
            nodes.push((k, u));
        }
        let internal: Vec<NodeLabel> = nodes.iter().map(|(_, l)| *l).collect();
        BinaryTreeShape::from_internal(&internal).unwrap()
    }

    #[test]
    fn first_two_trees() {
        for seed in 0..20 {
            let seq = simulate_bst(seed, 2).unwrap();
            assert_eq!(seq[0].encode(), "100");
            let mut d = seq[1].leaf_depths();
            d.sort();
            assert_eq!(d, vec![1, 2, 2]);
        }
    }

    #[test]
    fn nested_sequence() {
        let seq = simulate_bst(3, 30).unwrap();
        for (k, s) in seq.iter().enumerate() {
            assert_eq!(s.internal_count(), k + 1);
            if k > 0 {
                let prev: std::collections::BTreeSet<_> =
                    seq[k - 1].internal_nodes().into_iter().collect();
                let cur: std::collections::BTreeSet<_> = s.internal_nodes().into_iter().collect();
                assert!(prev.is_subset(&cur));
            }
        }
    }

    #[test]
    fn profile_tracks_shape() {
        let mut p = BstProcess::new(8);
        p.grow_to(200).unwrap();
        assert_eq!(p.profile(), p.shape().profile().as_slice());
        assert_eq!(p.profile().iter().sum::<u64>(), 201);
    }

    #[test]
    fn permutation_model_agrees() {
        let n = 3;
        let reps = 20_000;
        let mut a: HashMap<String, u32> = HashMap::new();
        let mut b: HashMap<String, u32> = HashMap::new();
        for s in 0..reps {
            *a.entry(simulate_bst(s, n).unwrap()[n - 1].encode()).or_default() += 1;
            *b.entry(permutation_bst(s, n).encode()).or_default() += 1;
        }
        for shape in crate::tree::all_shapes(n).unwrap() {
            let p = shape_probability(&shape).unwrap();
            let sd = (p * (1.0 - p) / reps as f64).sqrt();
            for m in [&a, &b] {
                let f = *m.get(&shape.encode()).unwrap_or(&0) as f64 / reps as f64;
                assert!((f - p).abs() < 5.0 * sd, "{shape}: {f} vs {p}");
            }
        }
    }
}
