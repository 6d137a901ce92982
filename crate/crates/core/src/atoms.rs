use fixedbitset::FixedBitSet;
use std::fmt;

/// Atom handle. Explicit structures use dense indices; rainbow frames use a
/// packed code of the underlying coloured graph.
pub type AtomId = u64;

/// Element of the complex algebra: a set of atoms over one structure, stored as
/// a fixed-width bit vector indexed by dense atom position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetOfAtoms {
    bits: FixedBitSet,
}

impl SetOfAtoms {
    pub fn empty(width: usize) -> Self {
        SetOfAtoms {
            bits: FixedBitSet::with_capacity(width),
        }
    }

    pub fn full(width: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(width);
        bits.insert_range(..);
        SetOfAtoms { bits }
    }

    pub fn singleton(width: usize, a: usize) -> Self {
        let mut s = Self::empty(width);
        s.insert(a);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, it: I) -> Self {
        let mut s = Self::empty(width);
        for a in it {
            s.insert(a);
        }
        s
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, a: usize) -> bool {
        a < self.bits.len() && self.bits.contains(a)
    }

    /// Panics if `a` is outside the width.
    pub fn insert(&mut self, a: usize) {
        assert!(a < self.bits.len(), "atom {a} outside set width {}", self.bits.len());
        self.bits.insert(a);
    }

    pub fn remove(&mut self, a: usize) {
        if a < self.bits.len() {
            self.bits.set(a, false);
        }
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn union_with(&mut self, other: &SetOfAtoms) {
        debug_assert_eq!(self.width(), other.width());
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &SetOfAtoms) {
        debug_assert_eq!(self.width(), other.width());
        self.bits.intersect_with(&other.bits);
    }

    pub fn union(&self, other: &SetOfAtoms) -> SetOfAtoms {
        let mut r = self.clone();
        r.union_with(other);
        r
    }

    pub fn intersection(&self, other: &SetOfAtoms) -> SetOfAtoms {
        let mut r = self.clone();
        r.intersect_with(other);
        r
    }

    pub fn difference(&self, other: &SetOfAtoms) -> SetOfAtoms {
        let mut r = self.clone();
        r.bits.difference_with(&other.bits);
        r
    }

    pub fn complement(&self) -> SetOfAtoms {
        let mut r = self.clone();
        r.bits.toggle_range(..);
        r
    }

    pub fn is_subset(&self, other: &SetOfAtoms) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &SetOfAtoms) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for SetOfAtoms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Index of the unordered pair `{i, j}` (i != j) among the pairs of `0..n`,
/// in the order (0,1), (0,2), ..., (1,2), ...
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_dense() {
        for n in 2..7 {
            let idx: Vec<usize> = pairs(n).map(|(i, j)| pair_index(n, i, j)).collect();
            assert_eq!(idx, (0..pair_count(n)).collect::<Vec<_>>());
            for (i, j) in pairs(n) {
                assert_eq!(pair_index(n, i, j), pair_index(n, j, i));
            }
        }
    }

    #[test]
    fn set_ops_stay_in_width() {
        let a = SetOfAtoms::from_indices(10, [1, 3, 5]);
        let b = SetOfAtoms::from_indices(10, [3, 4]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 3, 4, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.complement().len(), 7);
        assert_eq!(a.complement().width(), 10);
        assert!(SetOfAtoms::full(10).complement().is_empty());
    }
}
