//! Subsets of a finite event set, encoded as bit masks (event `k` ↔ bit `k`).

use std::collections::HashSet;
use std::fmt;

use crate::error::{KopulaError, Result};
use crate::scalar::Scalar;

/// Largest supported number of events; tables hold `2^N` entries.
pub const MAX_EVENTS: usize = 24;

/// The event set 𝔛 = {x_0, …, x_{N−1}}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventSetContext {
    n: usize,
    labels: Option<Vec<String>>,
}

impl EventSetContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_EVENTS {
            return Err(KopulaError::Context(format!(
                "number of events {n} outside 1..={MAX_EVENTS}"
            )));
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut ctx = Self::new(labels.len())?;
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(KopulaError::Context("event labels are not unique".into()));
        }
        if labels.iter().any(|l| l.is_empty() || l.contains('&')) {
            return Err(KopulaError::Context(
                "event labels must be nonempty and must not contain '&'".into(),
            ));
        }
        ctx.labels = Some(labels);
        Ok(ctx)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subsets, `2^N`.
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn full(&self) -> SubsetIndex {
        SubsetIndex::full(self.n)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, k: usize) -> String {
        match &self.labels {
            Some(l) => l[k].clone(),
            None => format!("x{k}"),
        }
    }

    /// Label such as `x0&x2`; the empty subset is `{}`.
    pub fn subset_label(&self, s: SubsetIndex) -> String {
        if s.is_empty() {
            return "{}".into();
        }
        s.events().map(|k| self.label(k)).collect::<Vec<_>>().join("&")
    }

    pub fn parse_subset(&self, text: &str) -> Result<SubsetIndex> {
        let text = text.trim();
        if text == "{}" || text.is_empty() {
            return Ok(SubsetIndex::EMPTY);
        }
        let mut mask = 0u32;
        for part in text.split('&') {
            let part = part.trim();
            let k = (0..self.n)
                .find(|&k| self.label(k) == part)
                .ok_or_else(|| KopulaError::Parse(format!("unknown event label '{part}'")))?;
            mask |= 1 << k;
        }
        Ok(SubsetIndex(mask))
    }

    pub fn check_mask(&self, s: SubsetIndex) -> Result<()> {
        if (s.0 as usize) < self.size() {
            Ok(())
        } else {
            Err(KopulaError::Context(format!(
                "subset mask {:#b} out of range for {} events",
                s.0, self.n
            )))
        }
    }

    pub fn subsets(&self) -> impl Iterator<Item = SubsetIndex> {
        (0..self.size() as u32).map(SubsetIndex)
    }
}

/// A subset X ⊆ 𝔛 as an inclusion mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex(pub u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub fn full(n: usize) -> Self {
        SubsetIndex(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(k: usize) -> Self {
        SubsetIndex(1 << k)
    }

    pub fn from_events<I: IntoIterator<Item = usize>>(events: I) -> Self {
        SubsetIndex(events.into_iter().fold(0, |m, k| m | (1 << k)))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetIndex) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn union(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 & !other.0)
    }

    pub fn sym_diff(self, other: SubsetIndex) -> Self {
        SubsetIndex(self.0 ^ other.0)
    }

    /// Complement within an `n`-event set.
    pub fn complement(self, n: usize) -> Self {
        SubsetIndex(!self.0 & Self::full(n).0)
    }

    pub fn with(self, k: usize) -> Self {
        SubsetIndex(self.0 | 1 << k)
    }

    pub fn without(self, k: usize) -> Self {
        SubsetIndex(self.0 & !(1 << k))
    }

    /// Member events in ascending order.
    pub fn events(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |k| m >> k & 1 == 1)
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.events().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "x{k}")?;
        }
        write!(f, "}}")
    }
}

/// Packs the bits of `full` selected by `mask` into the low bits.
pub fn extract_bits(full: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut j = 0;
    for k in 0..32 {
        if mask >> k & 1 == 1 {
            out |= (full >> k & 1) << j;
            j += 1;
        }
    }
    out
}

/// Spreads the low bits of `compact` over the positions set in `mask`.
pub fn deposit_bits(compact: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut j = 0;
    for k in 0..32 {
        if mask >> k & 1 == 1 {
            out |= (compact >> j & 1) << k;
            j += 1;
        }
    }
    out
}

/// Coordinates with a lazily applied complement mask.
///
/// Coordinate `k` reads as `1 − base[k]` when `k` is in the complement mask.
/// Composing complement masks is a XOR, so complementing twice returns the
/// original coordinates bit for bit.
#[derive(Clone, Debug)]
pub struct FlipCoords<T> {
    base: Vec<T>,
    flipped: SubsetIndex,
}

impl<T: Scalar> FlipCoords<T> {
    pub fn new(base: Vec<T>) -> Self {
        Self { base, flipped: SubsetIndex::EMPTY }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn get(&self, k: usize) -> T {
        if self.flipped.contains(k) {
            T::one() - self.base[k]
        } else {
            self.base[k]
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        (0..self.base.len()).map(|k| self.get(k)).collect()
    }

    /// Keeps the coordinates in `keep` and complements the rest.
    pub fn phenomenon(&self, keep: SubsetIndex) -> Self {
        let n = self.base.len();
        Self {
            base: self.base.clone(),
            flipped: self.flipped.sym_diff(keep.complement(n)),
        }
    }
}

impl<T: Scalar> PartialEq for FlipCoords<T> {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && (0..self.len()).all(|k| self.get(k) == other.get(k))
    }
}
