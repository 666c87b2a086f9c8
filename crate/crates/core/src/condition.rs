//! Forcing conditions and partitions.
//!
//! A condition is a finite partial map `N -> {0,1}`, a basic open of Cantor
//! space. `q` extends `p` when `p ⊆ q`. A partition `p ◁ S` is generated by
//! repeatedly splitting a condition at an index outside its domain; we keep
//! the split tree as a witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn from_u8(b: u8) -> Option<Bit> {
        match b {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("index {index} is already in the domain of {condition}")]
    KeyPresent { index: u64, condition: Condition },
    #[error("{condition} does not extend the partition root {root}")]
    NotAnExtension { condition: Condition, root: Condition },
    #[error("invalid condition literal: {0}")]
    Syntax(String),
}

/// Finite partial function from naturals to bits.
///
/// Backed by a `BTreeMap`, so equal conditions have equal representations and
/// iterate in ascending key order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    bits: BTreeMap<u64, Bit>,
}

impl Condition {
    /// The empty condition `∅`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from pairs; fails if an index is repeated.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, Bit)>) -> Result<Self, ConditionError> {
        let mut c = Condition::new();
        for (n, b) in pairs {
            c = c.extend(n, b)?;
        }
        Ok(c)
    }

    pub fn get(&self, n: u64) -> Option<Bit> {
        self.bits.get(&n).copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.bits.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Bit)> + '_ {
        self.bits.iter().map(|(k, v)| (*k, *v))
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.keys().copied()
    }

    /// `self ⩽ p`: every `(n, b)` in `p` is in `self`.
    pub fn extends(&self, p: &Condition) -> bool {
        p.bits.iter().all(|(k, v)| self.bits.get(k) == Some(v))
    }

    pub fn compatible(&self, other: &Condition) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .bits
            .iter()
            .all(|(k, v)| large.bits.get(k).is_none_or(|w| w == v))
    }

    /// `pq`, defined when the two agree on their shared keys.
    pub fn join(&self, other: &Condition) -> Option<Condition> {
        if !self.compatible(other) {
            return None;
        }
        let mut bits = self.bits.clone();
        bits.extend(other.bits.iter().map(|(k, v)| (*k, *v)));
        Some(Condition { bits })
    }

    /// `p(n ↦ b)`; requires `n ∉ dom(p)`.
    pub fn extend(&self, n: u64, b: Bit) -> Result<Condition, ConditionError> {
        if self.contains(n) {
            return Err(ConditionError::KeyPresent {
                index: n,
                condition: self.clone(),
            });
        }
        let mut bits = self.bits.clone();
        bits.insert(n, b);
        Ok(Condition { bits })
    }

    /// Both children `p(n ↦ 0)`, `p(n ↦ 1)`.
    pub fn split(&self, n: u64) -> Result<[Condition; 2], ConditionError> {
        Ok([self.extend(n, Bit::Zero)?, self.extend(n, Bit::One)?])
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for Condition {
    type Err = ConditionError;

    /// Parses `{n=b, …}`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| ConditionError::Syntax(format!("expected `{{…}}`, got `{s}`")))?;
        if inner.is_empty() {
            return Ok(Condition::new());
        }
        let mut c = Condition::new();
        for entry in inner.split(',') {
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| ConditionError::Syntax(format!("expected `n=b`, got `{entry}`")))?;
            let k: u64 = k
                .parse()
                .map_err(|_| ConditionError::Syntax(format!("bad index `{k}`")))?;
            let b = match v {
                "0" => Bit::Zero,
                "1" => Bit::One,
                _ => return Err(ConditionError::Syntax(format!("bad bit `{v}`"))),
            };
            c = c.extend(k, b)?;
        }
        Ok(c)
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Derivation tree of `p ◁ S`: a leaf, or a split at an index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SplitTree {
    Leaf,
    Split {
        index: u64,
        zero: Box<SplitTree>,
        one: Box<SplitTree>,
    },
}

impl SplitTree {
    pub fn split(index: u64, zero: SplitTree, one: SplitTree) -> SplitTree {
        SplitTree::Split {
            index,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SplitTree::Leaf => 0,
            SplitTree::Split { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            SplitTree::Leaf => 1,
            SplitTree::Split { zero, one, .. } => zero.leaf_count() + one.leaf_count(),
        }
    }

    /// Check every split index is fresh for the condition it splits.
    fn validate(&self, at: &Condition) -> Result<(), ConditionError> {
        match self {
            SplitTree::Leaf => Ok(()),
            SplitTree::Split { index, zero, one } => {
                let [c0, c1] = at.split(*index)?;
                zero.validate(&c0)?;
                one.validate(&c1)
            }
        }
    }

    fn collect_leaves(&self, at: &Condition, out: &mut Vec<Condition>) {
        match self {
            SplitTree::Leaf => out.push(at.clone()),
            SplitTree::Split { index, zero, one } => {
                let [c0, c1] = at
                    .split(*index)
                    .expect("split tree validated at construction");
                zero.collect_leaves(&c0, out);
                one.collect_leaves(&c1, out);
            }
        }
    }
}

/// A partition `root ◁ leaves` together with its split-tree witness.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    root: Condition,
    tree: SplitTree,
}

impl Partition {
    /// `p ◁ {p}`.
    pub fn trivial(root: Condition) -> Self {
        Partition {
            root,
            tree: SplitTree::Leaf,
        }
    }

    /// `p ◁ {p(n↦0), p(n↦1)}`.
    pub fn split(root: Condition, index: u64) -> Result<Self, ConditionError> {
        Self::from_tree(root, SplitTree::split(index, SplitTree::Leaf, SplitTree::Leaf))
    }

    pub fn from_tree(root: Condition, tree: SplitTree) -> Result<Self, ConditionError> {
        tree.validate(&root)?;
        Ok(Partition { root, tree })
    }

    pub fn root(&self) -> &Condition {
        &self.root
    }

    pub fn tree(&self) -> &SplitTree {
        &self.tree
    }

    /// Leaves in tree order (`0` branch first).
    pub fn leaves(&self) -> Vec<Condition> {
        let mut out = Vec::with_capacity(self.tree.leaf_count());
        self.tree.collect_leaves(&self.root, &mut out);
        out
    }

    /// The leaf reached by choosing bit `1` at every split.
    pub fn all_ones_leaf(&self) -> Condition {
        let mut at = self.root.clone();
        let mut node = &self.tree;
        while let SplitTree::Split { index, one, .. } = node {
            at = at
                .extend(*index, Bit::One)
                .expect("split tree validated at construction");
            node = one;
        }
        at
    }

    /// Restrict to an extension `s` of the root:
    /// `s ◁ {sq | q ∈ S compatible with s}`.
    pub fn restrict(&self, s: &Condition) -> Result<Partition, ConditionError> {
        if !s.extends(&self.root) {
            return Err(ConditionError::NotAnExtension {
                condition: s.clone(),
                root: self.root.clone(),
            });
        }
        let tree = restrict_tree(&self.tree, s);
        Partition::from_tree(s.clone(), tree)
    }
}

fn restrict_tree(tree: &SplitTree, s: &Condition) -> SplitTree {
    match tree {
        SplitTree::Leaf => SplitTree::Leaf,
        SplitTree::Split { index, zero, one } => match s.get(*index) {
            Some(Bit::Zero) => restrict_tree(zero, s),
            Some(Bit::One) => restrict_tree(one, s),
            None => SplitTree::split(*index, restrict_tree(zero, s), restrict_tree(one, s)),
        },
    }
}

/// Free-function form of [`Partition::restrict`].
pub fn restrict_partition(s: &Condition, partition: &Partition) -> Result<Partition, ConditionError> {
    partition.restrict(s)
}

/// Decide `p ◁ S` for an arbitrary finite set of conditions.
pub fn is_partition(p: &Condition, leaves: &[Condition]) -> bool {
    find_partition(p, leaves).is_some()
}

/// Search for a split tree deriving `p ◁ S`.
///
/// Split indices are drawn from keys that every member of `S` defines but
/// `p` does not; any derivation can be reordered to split on such a key
/// first, so the search never needs to backtrack past one candidate that
/// fails, but all candidates are tried anyway.
pub fn find_partition(p: &Condition, leaves: &[Condition]) -> Option<Partition> {
    let set: BTreeSet<Condition> = leaves.iter().cloned().collect();
    if set.is_empty() || !set.iter().all(|q| q.extends(p)) {
        return None;
    }
    let tree = search(p, &set)?;
    Some(Partition {
        root: p.clone(),
        tree,
    })
}

fn search(p: &Condition, set: &BTreeSet<Condition>) -> Option<SplitTree> {
    if set.len() == 1 && set.contains(p) {
        return Some(SplitTree::Leaf);
    }
    let first = set.iter().next()?;
    let candidates = first
        .domain()
        .filter(|n| !p.contains(*n) && set.iter().all(|q| q.contains(*n)));
    for n in candidates {
        let (s0, s1): (BTreeSet<_>, BTreeSet<_>) =
            set.iter().cloned().partition(|q| q.get(n) == Some(Bit::Zero));
        if s0.is_empty() || s1.is_empty() {
            continue;
        }
        let [p0, p1] = p.split(n).ok()?;
        if let (Some(t0), Some(t1)) = (search(&p0, &s0), search(&p1, &s1)) {
            return Some(SplitTree::split(n, t0, t1));
        }
    }
    None
}
