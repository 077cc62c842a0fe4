use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const WORD: usize = 64;

/// A set of vertex ids drawn from a host graph with `universe` vertices.
///
/// Stored as a dense bitset; iteration is always in ascending id order, which
/// is what makes every "lowest id first" choice in the engine deterministic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            universe,
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn singleton(universe: usize, v: usize) -> Self {
        let mut s = Self::new(universe);
        s.insert(v);
        s
    }

    /// Panics if an id is outside the universe.
    pub fn from_iter_in<I: IntoIterator<Item = usize>>(universe: usize, iter: I) -> Self {
        let mut s = Self::new(universe);
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v / WORD] & (1u64 << (v % WORD)) != 0
    }

    /// Returns true if `v` was newly inserted.
    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let (w, b) = (v / WORD, 1u64 << (v % WORD));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.universe {
            return false;
        }
        let (w, b) = (v / WORD, 1u64 << (v % WORD));
        let present = self.words[w] & b != 0;
        self.words[w] &= !b;
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        !self.is_disjoint(other)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(other.words.iter().chain(std::iter::repeat(&0))).all(|(a, b)| a & !b == 0)
    }

    /// Complement within the universe.
    pub fn complement(&self) -> VertexSet {
        let mut s = VertexSet::full(self.universe);
        s.difference_with(self);
        s
    }

    fn check_universe(&self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe, "vertex sets over different hosts");
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

// Serialized as a plain sorted id list; the universe comes from the host graph.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Ids as read from JSON, before the host graph is known.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdList(pub Vec<usize>);

impl<'de> Deserialize<'de> for IdList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<usize>::deserialize(d).map(IdList)
    }
}

impl Serialize for IdList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl From<&VertexSet> for IdList {
    fn from(s: &VertexSet) -> Self {
        IdList(s.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut a = VertexSet::new(130);
        assert!(a.insert(3));
        assert!(!a.insert(3));
        a.insert(64);
        a.insert(129);
        assert_eq!(a.to_vec(), vec![3, 64, 129]);
        assert_eq!(a.len(), 3);
        assert!(a.remove(64));
        assert!(!a.contains(64));
        assert_eq!(a.first(), Some(3));
        assert_eq!(a.complement().len(), 128);
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(xs in proptest::collection::vec(0usize..100, 0..40),
                                        ys in proptest::collection::vec(0usize..100, 0..40)) {
            use std::collections::BTreeSet;
            let a = VertexSet::from_iter_in(100, xs.iter().copied());
            let b = VertexSet::from_iter_in(100, ys.iter().copied());
            let sa: BTreeSet<usize> = xs.into_iter().collect();
            let sb: BTreeSet<usize> = ys.into_iter().collect();
            prop_assert_eq!(a.union(&b).to_vec(), sa.union(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.intersection(&b).to_vec(), sa.intersection(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.difference(&b).to_vec(), sa.difference(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.is_disjoint(&b), sa.is_disjoint(&sb));
            prop_assert_eq!(a.is_subset(&b), sa.is_subset(&sb));
        }
    }
}
