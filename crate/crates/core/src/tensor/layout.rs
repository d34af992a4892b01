use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Tape carrying the evolving (computed) copy of each node.
pub const COMPUTED: u8 = 0;
/// Tape carrying the input (uncomputed) copy of each node.
pub const UNCOMPUTED: u8 = 1;

/// One tensor factor: a node on a given tape.
///
/// Field order fixes the canonical order: ascending node, then ascending tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub node: usize,
    pub tape: u8,
}

impl Slot {
    pub const fn new(tape: u8, node: usize) -> Self {
        Slot { node, tape }
    }

    pub const fn node(node: usize) -> Self {
        Slot { node, tape: 0 }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(tape {}, node {})", self.tape, self.node)
    }
}

/// An ordered set of slots, always kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Support(Vec<Slot>);

impl Support {
    pub fn new(slots: impl IntoIterator<Item = Slot>) -> Result<Self> {
        let mut v: Vec<Slot> = slots.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSlot(w[0]));
        }
        Ok(Support(v))
    }

    /// Slots for `nodes` on one tape; duplicates in `nodes` are merged.
    pub fn on_tape(tape: u8, nodes: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = nodes.into_iter().collect();
        Support(set.into_iter().map(|n| Slot::new(tape, n)).collect())
    }

    pub fn nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        Self::on_tape(0, nodes)
    }

    pub fn single(slot: Slot) -> Self {
        Support(vec![slot])
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, slot: &Slot) -> bool {
        self.0.binary_search(slot).is_ok()
    }

    pub fn is_subset(&self, other: &Support) -> bool {
        self.0.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &Support) -> bool {
        self.0.iter().any(|s| other.contains(s))
    }

    pub fn union(&self, other: &Support) -> Support {
        let set: BTreeSet<Slot> = self.0.iter().chain(other.0.iter()).copied().collect();
        Support(set.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Slot> {
        self.0.iter()
    }
}

impl<'a> IntoIterator for &'a Support {
    type Item = &'a Slot;
    type IntoIter = std::slice::Iter<'a, Slot>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Tensor-product structure of a finite space: canonical slots with their dims.
///
/// Basis indices are mixed-radix with the first slot most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl SpaceLayout {
    pub fn new(entries: impl IntoIterator<Item = (Slot, usize)>) -> Result<Self> {
        let mut entries: Vec<(Slot, usize)> = entries.into_iter().collect();
        entries.sort_unstable_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateSlot(w[0].0));
        }
        if entries.iter().any(|e| e.1 == 0) {
            return Err(Error::ZeroDimension);
        }
        let slots: Vec<Slot> = entries.iter().map(|e| e.0).collect();
        let dims: Vec<usize> = entries.iter().map(|e| e.1).collect();
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total_dim = dims.iter().product();
        Ok(SpaceLayout {
            slots,
            dims,
            strides,
            total_dim,
        })
    }

    /// Nodes `0..dims.len()` on tape 0.
    pub fn qudits(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().enumerate().map(|(n, &d)| (Slot::node(n), d)))
    }

    /// A single anonymous factor of dimension `dim` (slot (0, 0)).
    pub fn flat(dim: usize) -> Result<Self> {
        Self::new([(Slot::node(0), dim)])
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn position(&self, slot: &Slot) -> Option<usize> {
        self.slots.binary_search(slot).ok()
    }

    pub fn dim_of(&self, slot: &Slot) -> Option<usize> {
        self.position(slot).map(|p| self.dims[p])
    }

    pub fn support(&self) -> Support {
        Support(self.slots.clone())
    }

    pub fn sub_layout(&self, support: &Support) -> Result<SpaceLayout> {
        let entries = support
            .iter()
            .map(|s| self.dim_of(s).map(|d| (*s, d)).ok_or(Error::UnknownSlot(*s)))
            .collect::<Result<Vec<_>>>()?;
        SpaceLayout::new(entries)
    }

    /// Complement of `support` within this layout.
    pub fn complement(&self, support: &Support) -> Support {
        Support(
            self.slots
                .iter()
                .filter(|s| !support.contains(s))
                .copied()
                .collect(),
        )
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    /// Splits full indices into (support part, remainder part) offsets.
    pub fn split(&self, support: &Support) -> Result<IndexSplit> {
        let mut positions = Vec::with_capacity(support.len());
        for s in support {
            positions.push(self.position(s).ok_or(Error::UnknownSlot(*s))?);
        }
        let rest: Vec<usize> = (0..self.len()).filter(|p| !positions.contains(p)).collect();
        let radix = |ps: &[usize]| {
            mixed_radix_offsets(ps.iter().map(|&p| (self.strides[p], self.dims[p])))
        };
        Ok(IndexSplit {
            sub: radix(&positions),
            rest: radix(&rest),
        })
    }
}

/// Full index = `sub[a] + rest[r]`, with `a` ranging over the support's
/// basis (canonical mixed radix) and `r` over the complement's.
#[derive(Debug, Clone)]
pub struct IndexSplit {
    pub sub: Vec<usize>,
    pub rest: Vec<usize>,
}

/// Offsets of every digit combination, first factor most significant.
pub(crate) fn mixed_radix_offsets(factors: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut out = vec![0usize];
    for (stride, dim) in factors {
        out = out
            .iter()
            .flat_map(|&o| (0..dim).map(move |d| o + d * stride))
            .collect();
    }
    out
}
