//! Node labels: finite words over `{0, 1}`.
//!
//! A label stores its bits most-significant-first in a `u128`, so the first
//! letter of the word is the highest of the `depth` low bits. The root is the
//! empty word.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Largest depth a label can carry.
pub const MAX_LABEL_DEPTH: u8 = 127;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeLabel {
    bits: u128,
    depth: u8,
}

impl NodeLabel {
    pub const ROOT: NodeLabel = NodeLabel { bits: 0, depth: 0 };

    /// Builds a label from the `depth` low bits of `bits`, first letter highest.
    pub fn from_bits(bits: u128, depth: u8) -> Option<Self> {
        if depth > MAX_LABEL_DEPTH {
            return None;
        }
        if depth < 128 && bits >> depth != 0 {
            return None;
        }
        Some(NodeLabel { bits, depth })
    }

    pub fn from_word(word: &[u8]) -> Option<Self> {
        let mut label = NodeLabel::ROOT;
        for &b in word {
            if b > 1 || label.depth == MAX_LABEL_DEPTH {
                return None;
            }
            label = label.child(b);
        }
        Some(label)
    }

    #[inline]
    pub fn depth(self) -> u8 {
        self.depth
    }

    #[inline]
    pub fn bits(self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.depth == 0
    }

    /// Appends one letter. Panics past [`MAX_LABEL_DEPTH`].
    #[inline]
    pub fn child(self, bit: u8) -> Self {
        assert!(self.depth < MAX_LABEL_DEPTH, "label depth overflow");
        NodeLabel {
            bits: (self.bits << 1) | u128::from(bit & 1),
            depth: self.depth + 1,
        }
    }

    #[inline]
    pub fn parent(self) -> Option<Self> {
        if self.depth == 0 {
            None
        } else {
            Some(NodeLabel {
                bits: self.bits >> 1,
                depth: self.depth - 1,
            })
        }
    }

    #[inline]
    pub fn sibling(self) -> Option<Self> {
        if self.depth == 0 {
            None
        } else {
            Some(NodeLabel {
                bits: self.bits ^ 1,
                depth: self.depth,
            })
        }
    }

    /// Last letter of the word; `None` for the root.
    #[inline]
    pub fn last_bit(self) -> Option<u8> {
        (self.depth > 0).then_some((self.bits & 1) as u8)
    }

    /// Letter at position `i` (0-based from the root).
    pub fn bit(self, i: u8) -> u8 {
        assert!(i < self.depth);
        ((self.bits >> (self.depth - 1 - i)) & 1) as u8
    }

    /// The ancestor at depth `d` (the prefix of length `d`).
    pub fn prefix(self, d: u8) -> Self {
        assert!(d <= self.depth);
        NodeLabel {
            bits: self.bits >> (self.depth - d),
            depth: d,
        }
    }

    /// `true` if `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(self, other: NodeLabel) -> bool {
        self.depth <= other.depth && other.prefix(self.depth) == self
    }

    /// Injective 128-bit code of the label: word bits shifted past a 7-bit depth tag.
    #[inline]
    pub fn code(self) -> u128 {
        (self.bits << 7) | u128::from(self.depth)
    }

    /// Position in breadth-first order (root = 0), defined for depth < 64.
    pub fn bfs_index(self) -> Option<u64> {
        if self.depth >= 64 {
            return None;
        }
        Some((1u64 << self.depth) - 1 + self.bits as u64)
    }

    pub fn word(self) -> Vec<u8> {
        (0..self.depth).map(|i| self.bit(i)).collect()
    }

    fn left_aligned(self) -> u128 {
        if self.depth == 0 {
            0
        } else {
            self.bits << (128 - u32::from(self.depth))
        }
    }
}

/// Lexicographic (pre-order) order on words: a prefix sorts before its extensions.
impl Ord for NodeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.left_aligned()
            .cmp(&other.left_aligned())
            .then(self.depth.cmp(&other.depth))
    }
}

impl PartialOrd for NodeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            return f.write_str("∅");
        }
        for i in 0..self.depth {
            f.write_str(if self.bit(i) == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeLabel({self})")
    }
}

impl FromStr for NodeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "∅" || s.is_empty() {
            return Ok(NodeLabel::ROOT);
        }
        let word: Option<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect();
        word.and_then(|w| NodeLabel::from_word(&w))
            .ok_or_else(|| Error::Format(format!("not a binary word: {s:?}")))
    }
}
