//! Split ratios `U^(v)` of the fragmentation view.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::tree::NodeLabel;
use crate::yule::YulePath;

/// Deepest generation stored densely.
pub const MAX_RATIO_DEPTH: u8 = 30;

/// Ratios for every node of depth `1..=g`, stored in breadth-first order.
///
/// Only the left child of each pair is estimated; the right child is set to
/// the complement, so siblings always sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitRatios {
    depth: u8,
    values: Vec<f64>,
    sample_size: u64,
}

impl SplitRatios {
    /// Builds ratios from left-child values, one per node of depth `0..g`
    /// in breadth-first order: `left[i]` is the ratio of the left child of node `i`.
    pub fn from_left_values(g: u8, left: &[f64], sample_size: u64) -> Result<Self> {
        if g > MAX_RATIO_DEPTH {
            return Err(Error::Range(format!("ratio depth {g} exceeds {MAX_RATIO_DEPTH}")));
        }
        let parents = (1usize << g) - 1;
        if left.len() != parents {
            return Err(Error::Precondition(format!(
                "expected {parents} left ratios for depth {g}, got {}",
                left.len()
            )));
        }
        let mut values = vec![1.0; (1usize << (g + 1)) - 1];
        for (i, &r) in left.iter().enumerate() {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Precondition(format!("ratio {r} is not in (0, 1)")));
            }
            values[2 * i + 1] = r;
            values[2 * i + 2] = 1.0 - r;
        }
        Ok(SplitRatios {
            depth: g,
            values,
            sample_size,
        })
    }

    /// Independent uniform splits, the law of the limiting ratios.
    pub fn sample_uniform(seed: u64, g: u8) -> Result<Self> {
        if g > MAX_RATIO_DEPTH {
            return Err(Error::Range(format!("ratio depth {g} exceeds {MAX_RATIO_DEPTH}")));
        }
        let mut rng = stream(seed, "bisection", u64::from(g));
        let left: Vec<f64> = (0..(1usize << g) - 1)
            .map(|_| crate::rng::open01(rng.random()))
            .collect();
        Self::from_left_values(g, &left, u64::MAX)
    }

    /// Generation up to which ratios are populated.
    pub fn estimation_depth(&self) -> u8 {
        self.depth
    }

    /// Smallest leaf count among the subtrees whose split was estimated.
    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    pub fn ratio(&self, v: NodeLabel) -> Option<f64> {
        if v.is_root() || v.depth() > self.depth {
            return None;
        }
        v.bfs_index().map(|i| self.values[i as usize])
    }

    /// Ratios in breadth-first order (index 0 is the root, set to 1).
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Finite-time estimate of the ratios from subtree leaf counts at time `t`.
pub fn split_ratios(path: &YulePath, g: u8, t: f64) -> Result<SplitRatios> {
    if g == 0 || g > MAX_RATIO_DEPTH {
        return Err(Error::Range(format!("ratio depth must be in 1..={MAX_RATIO_DEPTH}, got {g}")));
    }
    let counts = path.subtree_leaf_counts(t, g)?;
    let parents = (1usize << g) - 1;
    let mut left = Vec::with_capacity(parents);
    let mut sample = u64::MAX;
    for i in 0..parents {
        let (n, n0) = (counts[i], counts[2 * i + 1]);
        if n0 == 0 || n0 >= n {
            return Err(Error::Precondition(format!(
                "subtree at index {} has no leaves at t = {t}",
                if n0 == 0 { 2 * i + 1 } else { 2 * i + 2 }
            )));
        }
        sample = sample.min(n);
        left.push(n0 as f64 / n as f64);
    }
    SplitRatios::from_left_values(g, &left, sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yule::{simulate_yule, Stop};

    #[test]
    fn first_split_is_half() {
        let p = simulate_yule(2, Stop::LeafCount(1)).unwrap();
        let tau1 = p.jump_time(1).unwrap();
        let r = split_ratios(&p, 1, tau1).unwrap();
        assert_eq!(r.ratio("0".parse().unwrap()), Some(0.5));
        assert_eq!(r.sample_size(), 2);
    }

    #[test]
    fn siblings_complement() {
        let p = simulate_yule(31, Stop::Generation(4)).unwrap();
        let t = p.generation_births(4).unwrap().into_iter().fold(0.0, f64::max) + 0.5;
        let p = p.extend(Stop::Time(t + 0.5)).unwrap();
        let r = split_ratios(&p, 4, t).unwrap();
        for d in 1..=4u8 {
            for b in 0..(1u128 << (d - 1)) {
                let v0 = NodeLabel::from_bits(b << 1, d).unwrap();
                let v1 = v0.sibling().unwrap();
                let (a, c) = (r.ratio(v0).unwrap(), r.ratio(v1).unwrap());
                assert_eq!(a + c, 1.0);
                assert!(a > 0.0 && a < 1.0);
            }
        }
    }

    #[test]
    fn unborn_generation_rejected() {
        let p = simulate_yule(31, Stop::Time(3.0)).unwrap();
        assert!(matches!(
            split_ratios(&p, 12, 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uniform_sampler() {
        let r = SplitRatios::sample_uniform(4, 10).unwrap();
        let left: Vec<f64> = (0..1023).map(|i| r.values()[2 * i + 1]).collect();
        let mean = left.iter().sum::<f64>() / left.len() as f64;
        assert!((mean - 0.5).abs() < 0.04);
    }
}
