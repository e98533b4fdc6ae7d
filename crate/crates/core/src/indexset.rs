//! Fixed-universe index sets over `[n] = {0, .., n-1}`.

use bitvec::prelude::*;
use std::fmt;

/// A subset of `[n]` backed by a bit vector.
///
/// All binary operations require both operands to share the same universe
/// size; mixing universes is a programming error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    bits: BitVec<u64, Lsb0>,
}

impl IndexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            bits: bitvec![u64, Lsb0; 0; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            bits: bitvec![u64, Lsb0; 1; n],
        }
    }

    /// Builds a set from member indices. Panics if an index is `>= n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut set = Self::empty(n);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_predicate<F: FnMut(usize) -> bool>(n: usize, mut pred: F) -> Self {
        let mut set = Self::empty(n);
        for i in 0..n {
            if pred(i) {
                set.bits.set(i, true);
            }
        }
        set
    }

    /// Size of the universe, not the number of members.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.get(i).map(|b| *b).unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        assert!(
            i < self.universe(),
            "index {i} outside universe {}",
            self.universe()
        );
        self.bits.set(i, true);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.check(other);
        let mut bits = self.bits.clone();
        bits |= other.bits.as_bitslice();
        Self { bits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.check(other);
        let mut bits = self.bits.clone();
        bits &= other.bits.as_bitslice();
        Self { bits }
    }

    /// `self \ other`
    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    /// `[n] \ self`
    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits.clone(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.universe(),
            other.universe(),
            "index sets over different universes"
        );
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet[n={}]", self.universe())?;
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let a = IndexSet::from_indices(70, [0, 3, 64, 69]);
        let b = IndexSet::from_indices(70, [3, 5, 69]);
        assert_eq!(
            a.union(&b).iter().collect::<Vec<_>>(),
            vec![0, 3, 5, 64, 69]
        );
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3, 69]);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![0, 64]);
        assert_eq!(a.complement().len(), 66);
        assert!(a.intersection(&b).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(a.difference(&b).is_disjoint(&b));
    }

    #[test]
    fn complement_respects_universe() {
        // non-multiple-of-64 tail must not leak extra members
        let e = IndexSet::empty(5);
        assert_eq!(e.complement().len(), 5);
        assert_eq!(e.complement(), IndexSet::full(5));
    }

    #[test]
    #[should_panic]
    fn insert_out_of_range() {
        IndexSet::empty(4).insert(4);
    }
}
