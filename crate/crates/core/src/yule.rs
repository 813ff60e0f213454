//! Yule trees built from per-node exponential lifetimes.
//!
//! Every node `u` carries an exponential(1) lifetime drawn from the keyed hash
//! of `(seed, u)`. The root is born at time 0 and the two children of `u` are
//! born when `u` dies. Nodes are realized lazily: only the part of the infinite
//! tree needed by the requested stops is materialized, and `valid_horizon`
//! records the first instant at which an unrealized node could matter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rng::node_lifetime;
use crate::tree::{BinaryTreeShape, NodeLabel, MAX_LABEL_DEPTH};

const NONE: u32 = u32::MAX;
const MAGIC: &[u8; 4] = b"YUL1";

pub const DEFAULT_MAX_DEPTH: u8 = 96;
pub const DEFAULT_MAX_NODES: u64 = 100_000_000;

/// When to stop realizing a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stop {
    /// Every individual born by time `t`.
    Time(f64),
    /// Up to the instant the `n + 1`-th leaf appears.
    LeafCount(u64),
    /// Every node of depth at most `g`.
    Generation(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YuleLimits {
    pub max_depth: u8,
    pub max_nodes: u64,
}

impl Default for YuleLimits {
    fn default() -> Self {
        YuleLimits {
            max_depth: DEFAULT_MAX_DEPTH,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    label: NodeLabel,
    birth: f64,
    life: f64,
    first_child: u32,
}

impl Node {
    #[inline]
    fn death(&self) -> f64 {
        self.birth + self.life
    }
}

#[derive(Clone, Debug)]
pub struct YulePath {
    seed: u64,
    limits: YuleLimits,
    nodes: Vec<Node>,
    horizon: f64,
    complete_depth: u8,
}

impl YulePath {
    pub fn simulate(seed: u64, stop: Stop, limits: YuleLimits) -> Result<Self> {
        check_stop(stop)?;
        if limits.max_depth > MAX_LABEL_DEPTH {
            return Err(Error::config(
                "max_depth",
                format!("at most {MAX_LABEL_DEPTH}"),
            ));
        }
        let root = Node {
            label: NodeLabel::ROOT,
            birth: 0.0,
            life: node_lifetime(seed, NodeLabel::ROOT),
            first_child: NONE,
        };
        let mut path = YulePath {
            seed,
            limits,
            nodes: vec![root],
            horizon: 0.0,
            complete_depth: 0,
        };
        path.realize(stop)?;
        Ok(path)
    }

    /// Realizes more of the same tree. Already realized nodes are unchanged.
    pub fn extend(mut self, stop: Stop) -> Result<Self> {
        check_stop(stop)?;
        self.realize(stop)?;
        Ok(self)
    }

    fn realize(&mut self, stop: Stop) -> Result<()> {
        match stop {
            Stop::Time(t) => {
                let mut stack = vec![0u32];
                while let Some(i) = stack.pop() {
                    let n = &self.nodes[i as usize];
                    if n.death() <= t {
                        let c = self.expand(i)?;
                        stack.push(c);
                        stack.push(c + 1);
                    }
                }
            }
            Stop::Generation(g) => {
                let mut stack = vec![0u32];
                while let Some(i) = stack.pop() {
                    if self.nodes[i as usize].label.depth() < g {
                        let c = self.expand(i)?;
                        stack.push(c);
                        stack.push(c + 1);
                    }
                }
            }
            Stop::LeafCount(n) => {
                let mut heap = BinaryHeap::new();
                heap.push(Event::of(&self.nodes[0], 0));
                let mut alive = 1u64;
                while alive < n + 1 {
                    let ev = heap.pop().expect("population never dies out");
                    let c = self.expand(ev.index)?;
                    alive += 1;
                    heap.push(Event::of(&self.nodes[c as usize], c));
                    heap.push(Event::of(&self.nodes[c as usize + 1], c + 1));
                }
            }
        }
        self.refresh();
        Ok(())
    }

    /// Realizes the two children of node `i` if needed; returns the first child index.
    fn expand(&mut self, i: u32) -> Result<u32> {
        let node = &self.nodes[i as usize];
        if node.first_child != NONE {
            return Ok(node.first_child);
        }
        if node.label.depth() >= self.limits.max_depth {
            return Err(Error::Resource {
                what: "tree depth",
                limit: u64::from(self.limits.max_depth),
            });
        }
        if self.nodes.len() as u64 + 2 > self.limits.max_nodes {
            return Err(Error::Resource {
                what: "node count",
                limit: self.limits.max_nodes,
            });
        }
        let birth = node.death();
        let label = node.label;
        let c = self.nodes.len() as u32;
        for b in 0..2 {
            let l = label.child(b);
            self.nodes.push(Node {
                label: l,
                birth,
                life: node_lifetime(self.seed, l),
                first_child: NONE,
            });
        }
        self.nodes[i as usize].first_child = c;
        Ok(c)
    }

    fn refresh(&mut self) {
        let mut horizon = f64::INFINITY;
        let mut complete = u8::MAX;
        for n in &self.nodes {
            if n.first_child == NONE {
                horizon = horizon.min(n.death());
                complete = complete.min(n.label.depth());
            }
        }
        self.horizon = horizon;
        self.complete_depth = complete;
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn limits(&self) -> YuleLimits {
        self.limits
    }

    pub fn max_depth(&self) -> u8 {
        self.limits.max_depth
    }

    /// Number of realized nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Alive-set queries are exact for `t < valid_horizon()`.
    pub fn valid_horizon(&self) -> f64 {
        self.horizon
    }

    /// Largest `g` such that every node of depth at most `g` is realized.
    pub fn complete_depth(&self) -> u8 {
        self.complete_depth
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::Range(format!("time must be nonnegative, got {t}")));
        }
        if t >= self.horizon {
            return Err(Error::Horizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Walks the nodes alive at `t` in pre-order.
    fn for_each_alive(&self, t: f64, mut f: impl FnMut(&Node)) {
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if n.death() <= t {
                stack.push(n.first_child + 1);
                stack.push(n.first_child);
            } else {
                f(n);
            }
        }
    }

    /// `(u, |u|)` for every `u` with `S^u <= t < S^u + life(u)`, in pre-order.
    pub fn alive_set(&self, t: f64) -> Result<Vec<(NodeLabel, u8)>> {
        self.check_time(t)?;
        let mut out = Vec::new();
        self.for_each_alive(t, |n| out.push((n.label, n.label.depth())));
        Ok(out)
    }

    /// Alive counts per depth at time `t`.
    pub fn alive_profile(&self, t: f64) -> Result<Vec<u64>> {
        self.check_time(t)?;
        let mut prof: Vec<u64> = Vec::new();
        self.for_each_alive(t, |n| {
            let d = n.label.depth() as usize;
            if prof.len() <= d {
                prof.resize(d + 1, 0);
            }
            prof[d] += 1;
        });
        Ok(prof)
    }

    /// Population size `N_t`.
    pub fn population(&self, t: f64) -> Result<u64> {
        self.check_time(t)?;
        let mut n = 0u64;
        self.for_each_alive(t, |_| n += 1);
        Ok(n)
    }

    /// The tree formed by the individuals alive at `t` (as leaves).
    pub fn shape_at(&self, t: f64) -> Result<BinaryTreeShape> {
        let leaves = self.alive_set(t)?.into_iter().map(|(u, _)| u).collect();
        BinaryTreeShape::from_leaves(leaves)
    }

    /// `τ_0 = 0 < τ_1 < …`: every split time below the valid horizon.
    pub fn jump_times(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .nodes
            .iter()
            .filter(|n| n.first_child != NONE && n.death() < self.horizon)
            .map(|n| n.death())
            .collect();
        v.push(0.0);
        v.sort_by(f64::total_cmp);
        v
    }

    /// `τ_n`, the instant the `n + 1`-th leaf appears.
    pub fn jump_time(&self, n: usize) -> Result<f64> {
        let taus = self.jump_times();
        taus.get(n).copied().ok_or_else(|| {
            Error::Range(format!(
                "τ_{n} is beyond the realized horizon ({} jumps known)",
                taus.len() - 1
            ))
        })
    }

    /// The tree stopped at `τ_n`.
    pub fn shape_at_jump(&self, n: usize) -> Result<BinaryTreeShape> {
        let t = self.jump_time(n)?;
        self.shape_at(t)
    }

    fn check_generation(&self, g: u8) -> Result<()> {
        if g > self.limits.max_depth || g > self.complete_depth {
            return Err(Error::Range(format!(
                "generation {g} not fully realized (complete to {}, cap {})",
                self.complete_depth, self.limits.max_depth
            )));
        }
        Ok(())
    }

    /// `(u, S^u)` for the `2^g` nodes of generation `g`, in label order.
    pub fn generation_line(&self, g: u8) -> Result<Vec<(NodeLabel, f64)>> {
        self.check_generation(g)?;
        let mut out = Vec::with_capacity(1usize << g.min(40));
        self.walk_generation(g, |n| out.push((n.label, n.birth)));
        Ok(out)
    }

    /// Saturation times `S^u` over generation `g`, in label order.
    pub fn generation_births(&self, g: u8) -> Result<Vec<f64>> {
        self.check_generation(g)?;
        let mut out = Vec::with_capacity(1usize << g.min(40));
        self.walk_generation(g, |n| out.push(n.birth));
        Ok(out)
    }

    fn walk_generation(&self, g: u8, mut f: impl FnMut(&Node)) {
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if n.label.depth() == g {
                f(n);
            } else {
                stack.push(n.first_child + 1);
                stack.push(n.first_child);
            }
        }
    }

    /// Saturation time of a realized node.
    pub fn saturation(&self, u: NodeLabel) -> Option<f64> {
        let mut i = 0u32;
        for k in 0..u.depth() {
            let c = self.nodes[i as usize].first_child;
            if c == NONE {
                return None;
            }
            i = c + u32::from(u.bit(k));
        }
        Some(self.nodes[i as usize].birth)
    }

    /// Leaf counts at time `t` of the subtrees rooted at every node of depth
    /// at most `g`, in breadth-first order (index `2^d - 1 + bits`).
    pub fn subtree_leaf_counts(&self, t: f64, g: u8) -> Result<Vec<u64>> {
        self.check_time(t)?;
        if g >= 40 {
            return Err(Error::Range(format!("generation {g} too deep for dense counts")));
        }
        let mut counts = vec![0u64; (1usize << (g + 1)) - 1];
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if n.label.depth() <= g && n.birth > t {
                return Err(Error::Precondition(format!(
                    "node {} is born at {} after t = {t}",
                    n.label, n.birth
                )));
            }
            if n.death() <= t {
                stack.push(n.first_child + 1);
                stack.push(n.first_child);
            } else {
                let d = n.label.depth().min(g);
                let top = n.label.prefix(d);
                if top.depth() < g {
                    // An individual alive above depth g means a depth-g node is unborn.
                    return Err(Error::Precondition(format!(
                        "node {} is still alive at t = {t}, generation {g} is not born",
                        n.label
                    )));
                }
                let mut v = top;
                loop {
                    counts[v.bfs_index().expect("shallow") as usize] += 1;
                    match v.parent() {
                        Some(p) => v = p,
                        None => break,
                    }
                }
            }
        }
        Ok(counts)
    }

    /// Flat binary layout: `YUL1`, seed (u64 LE), max depth (u32 LE), node
    /// count (u64 LE), then per node in breadth-first label order the lifetime
    /// (f64 LE) and an expanded flag (u8).
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (self.nodes[a].label, self.nodes[b].label);
            x.depth().cmp(&y.depth()).then(x.bits().cmp(&y.bits()))
        });
        let mut buf = Vec::with_capacity(24 + 9 * self.nodes.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.extend_from_slice(&u32::from(self.limits.max_depth).to_le_bytes());
        buf.extend_from_slice(&(self.nodes.len() as u64).to_le_bytes());
        for i in order {
            let n = &self.nodes[i];
            buf.extend_from_slice(&n.life.to_le_bytes());
            buf.push(u8::from(n.first_child != NONE));
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut head = [0u8; 24];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic, not a Yule path file".into()));
        }
        let seed = u64::from_le_bytes(head[4..12].try_into().unwrap());
        let max_depth = u32::from_le_bytes(head[12..16].try_into().unwrap());
        let count = u64::from_le_bytes(head[16..24].try_into().unwrap());
        if max_depth > u32::from(MAX_LABEL_DEPTH) {
            return Err(Error::Format(format!("max depth {max_depth} too large")));
        }
        let limits = YuleLimits {
            max_depth: max_depth as u8,
            max_nodes: DEFAULT_MAX_NODES.max(count),
        };
        if count == 0 || count > limits.max_nodes {
            return Err(Error::Format(format!("implausible node count {count}")));
        }
        let mut body = vec![0u8; 9 * count as usize];
        r.read_exact(&mut body)?;
        let mut nodes: Vec<Node> = Vec::with_capacity(count as usize);
        let mut parents: Vec<u32> = Vec::with_capacity(count as usize);
        for (k, rec) in body.chunks_exact(9).enumerate() {
            let life = f64::from_le_bytes(rec[..8].try_into().unwrap());
            let expanded = rec[8] != 0;
            if !(life > 0.0 && life.is_finite()) {
                return Err(Error::Format(format!("bad lifetime {life} at record {k}")));
            }
            let (label, birth) = if k == 0 {
                (NodeLabel::ROOT, 0.0)
            } else {
                // Children of expanded nodes appear in breadth-first order.
                let slot = k - 1;
                let p = *parents
                    .get(slot / 2)
                    .ok_or_else(|| Error::Format("record without an expanded parent".into()))?
                    as usize;
                let parent = &nodes[p];
                (parent.label.child((slot % 2) as u8), parent.death())
            };
            if label.depth() > limits.max_depth {
                return Err(Error::Format("node deeper than the declared max depth".into()));
            }
            if expanded {
                parents.push(k as u32);
            }
            nodes.push(Node {
                label,
                birth,
                life,
                first_child: NONE,
            });
        }
        if parents.len() * 2 + 1 != nodes.len() {
            return Err(Error::Format("expanded flags disagree with node count".into()));
        }
        for (j, &p) in parents.iter().enumerate() {
            nodes[p as usize].first_child = (2 * j + 1) as u32;
        }
        let mut path = YulePath {
            seed,
            limits,
            nodes,
            horizon: 0.0,
            complete_depth: 0,
        };
        path.refresh();
        Ok(path)
    }
}

fn check_stop(stop: Stop) -> Result<()> {
    match stop {
        Stop::Time(t) if !(t > 0.0 && t.is_finite()) => {
            Err(Error::Precondition(format!("stop time must be positive, got {t}")))
        }
        Stop::LeafCount(0) => Err(Error::Precondition("leaf count stop needs n >= 1".into())),
        Stop::Generation(0) => Err(Error::Precondition("generation stop needs g >= 1".into())),
        _ => Ok(()),
    }
}

/// Realizes a path with the default caps.
pub fn simulate_yule(seed: u64, stop: Stop) -> Result<YulePath> {
    YulePath::simulate(seed, stop, YuleLimits::default())
}

#[derive(Clone, Copy)]
struct Event {
    time: f64,
    index: u32,
}

impl Event {
    fn of(n: &Node, index: u32) -> Self {
        Event {
            time: n.death(),
            index,
        }
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
// Min-heap on time; ties broken by index for determinism.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.index.cmp(&self.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_stop() {
        let p = simulate_yule(11, Stop::LeafCount(1)).unwrap();
        let tau1 = p.jump_time(1).unwrap();
        assert_eq!(p.population(0.0).unwrap(), 1);
        assert_eq!(p.population(tau1 * 0.999).unwrap(), 1);
        assert_eq!(p.population(tau1).unwrap(), 2);
        assert_eq!(p.alive_set(0.0).unwrap(), vec![(NodeLabel::ROOT, 0)]);
    }

    #[test]
    fn first_generation() {
        let p = simulate_yule(5, Stop::Generation(1)).unwrap();
        let line = p.generation_line(1).unwrap();
        assert_eq!(line.len(), 2);
        assert_eq!(line[0].1, line[1].1);
        assert_eq!(line[0].1, p.jump_time(1).unwrap());
        assert_eq!(p.generation_line(0).unwrap(), vec![(NodeLabel::ROOT, 0.0)]);
        assert!(p.generation_line(2).is_err());
    }

    #[test]
    fn horizon_guard() {
        let p = simulate_yule(3, Stop::Time(2.0)).unwrap();
        assert!(p.valid_horizon() > 2.0);
        assert!(matches!(
            p.alive_set(p.valid_horizon()),
            Err(Error::Horizon { .. })
        ));
    }

    #[test]
    fn jumps_count_splits() {
        let p = simulate_yule(9, Stop::LeafCount(50)).unwrap();
        let taus = p.jump_times();
        assert!(taus.len() >= 51);
        for (n, &t) in taus.iter().enumerate().take(51) {
            assert_eq!(p.population(t).unwrap(), n as u64 + 1);
            // Distinct saturation times strictly below τ_n number exactly n.
            assert_eq!(taus.iter().filter(|&&s| s < t).count(), n);
        }
    }

    #[test]
    fn stops_realize_the_same_tree() {
        let a = simulate_yule(21, Stop::Time(4.0)).unwrap();
        let b = simulate_yule(21, Stop::Generation(6)).unwrap();
        let b = b.extend(Stop::Time(4.0)).unwrap();
        for t in [0.5, 1.5, 3.0, 3.999] {
            assert_eq!(a.alive_set(t).unwrap(), b.alive_set(t).unwrap());
        }
        let line_a = a.extend(Stop::Generation(6)).unwrap().generation_line(6).unwrap();
        assert_eq!(line_a, b.generation_line(6).unwrap());
    }

    #[test]
    fn depth_cap_is_a_resource_error() {
        let limits = YuleLimits {
            max_depth: 3,
            max_nodes: DEFAULT_MAX_NODES,
        };
        let r = YulePath::simulate(1, Stop::Generation(5), limits);
        assert!(matches!(r, Err(Error::Resource { .. })));
        let limits = YuleLimits {
            max_depth: 40,
            max_nodes: 100,
        };
        let r = YulePath::simulate(1, Stop::LeafCount(1000), limits);
        assert!(matches!(r, Err(Error::Resource { .. })));
    }

    #[test]
    fn round_trip_serialization() {
        let p = simulate_yule(77, Stop::Time(3.0))
            .unwrap()
            .extend(Stop::Generation(4))
            .unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"YUL1");
        let q = YulePath::read_from(buf.as_slice()).unwrap();
        assert_eq!(q.node_count(), p.node_count());
        assert_eq!(q.valid_horizon(), p.valid_horizon());
        assert_eq!(q.alive_set(2.9).unwrap(), p.alive_set(2.9).unwrap());
        assert_eq!(q.generation_line(4).unwrap(), p.generation_line(4).unwrap());
        let mut again = Vec::new();
        q.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
        assert!(YulePath::read_from(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn subtree_counts() {
        let p = simulate_yule(4, Stop::Time(6.0)).unwrap();
        let c = p.subtree_leaf_counts(5.0, 2).unwrap();
        assert_eq!(c[0], p.population(5.0).unwrap());
        assert_eq!(c[0], c[1] + c[2]);
        assert_eq!(c[1], c[3] + c[4]);
        assert_eq!(c[2], c[5] + c[6]);
        let tau1 = p.jump_time(1).unwrap();
        assert_eq!(p.subtree_leaf_counts(tau1, 1).unwrap(), vec![2, 1, 1]);
    }

    #[test]
    fn rejects_bad_stops() {
        assert!(simulate_yule(1, Stop::Time(0.0)).is_err());
        assert!(simulate_yule(1, Stop::LeafCount(0)).is_err());
        assert!(simulate_yule(1, Stop::Generation(0)).is_err());
    }
}
