//! Fixed-width sets of processes.

use std::fmt;

const WORD: usize = 64;

/// A subset of `{0, .., universe-1}` stored as a packed bit vector.
///
/// Bits at positions `>= universe` are always zero, so structural equality
/// coincides with set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessSet {
    universe: usize,
    words: Vec<u64>,
}

impl ProcessSet {
    pub fn empty(universe: usize) -> Self {
        ProcessSet {
            universe,
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = ProcessSet {
            universe,
            words: vec![u64::MAX; universe.div_ceil(WORD)],
        };
        s.clear_tail();
        s
    }

    pub fn singleton(universe: usize, p: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(p);
        s
    }

    pub fn from_iter_in<I: IntoIterator<Item = usize>>(universe: usize, items: I) -> Self {
        let mut s = Self::empty(universe);
        for p in items {
            s.insert(p);
        }
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.universe % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the ambient universe (not the cardinality).
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, p: usize) -> bool {
        p < self.universe && self.words[p / WORD] & (1 << (p % WORD)) != 0
    }

    /// Panics if `p` lies outside the universe.
    pub fn insert(&mut self, p: usize) {
        assert!(p < self.universe, "process {p} outside universe {}", self.universe);
        self.words[p / WORD] |= 1 << (p % WORD);
    }

    pub fn remove(&mut self, p: usize) {
        if p < self.universe {
            self.words[p / WORD] &= !(1 << (p % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(self.universe)
    }

    fn check_universe(&self, other: &Self) {
        assert_eq!(
            self.universe, other.universe,
            "process sets over different universes"
        );
    }

    pub fn union_with(&mut self, other: &Self) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.union_with(other);
        r
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.intersect_with(other);
        r
    }

    pub fn complement(&self) -> Self {
        let mut r = ProcessSet {
            universe: self.universe,
            words: self.words.iter().map(|w| !w).collect(),
        };
        r.clear_tail();
        r
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }
}

impl fmt::Debug for ProcessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_masks_tail_bits() {
        for n in [0, 1, 5, 63, 64, 65, 130] {
            let f = ProcessSet::full(n);
            assert_eq!(f.len(), n);
            assert!(f.complement().is_empty());
            assert_eq!(ProcessSet::empty(n).complement(), f);
        }
    }

    #[test]
    fn iter_is_sorted() {
        let s = ProcessSet::from_iter_in(200, [150, 3, 64, 0, 199]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 150, 199]);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn subset_and_ops() {
        let a = ProcessSet::from_iter_in(10, [1, 2]);
        let b = ProcessSet::from_iter_in(10, [1, 2, 7]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(a.union(&b), b);
        assert_eq!(a.intersection(&b), a);
        assert!(a.intersects(&b));
        let mut c = b.clone();
        c.remove(7);
        assert_eq!(c, a);
    }
}
