use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A finite set of state indices stored as a bitset.
///
/// Trailing zero words are trimmed, so equal sets have equal
/// representations. Sets are ordered as binary numbers (bit `i` has
/// weight `2^i`), which is the enumeration order of subsets.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct StateSet {
    words: SmallVec<[u64; 2]>,
}

impl StateSet {
    pub fn new() -> Self {
        StateSet::default()
    }

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = StateSet::new();
        let whole = n / 64;
        s.words.resize(whole, u64::MAX);
        if n % 64 != 0 {
            s.words.push((1u64 << (n % 64)) - 1);
        }
        s
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = StateSet::new();
        s.insert(i);
        s
    }

    /// Subset with the given bits for the first 64 states.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = StateSet::new();
        s.words.push(mask);
        s.trim();
        s
    }

    /// Low 64 bits; the set must live in a carrier of at most 64 states.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.words.len() <= 1);
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        let w = i / 64;
        if w < self.words.len() {
            self.words[w] &= !(1 << (i % 64));
            self.trim();
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// One past the largest element, or 0.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + 64 - w.leading_zeros() as usize,
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let (long, short) =
            if self.words.len() >= other.words.len() { (self, other) } else { (other, self) };
        let mut s = long.clone();
        for (a, b) in s.words.iter_mut().zip(&short.words) {
            *a |= b;
        }
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = StateSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s.trim();
        s
    }

    /// Complement within `{0, …, n-1}`.
    pub fn complement(&self, n: usize) -> StateSet {
        StateSet::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Preimage `{x | f(x) ∈ self}` of a map given as a table.
    pub fn preimage(&self, f: &[usize]) -> StateSet {
        let mut s = StateSet::new();
        for (x, y) in f.iter().enumerate() {
            if self.contains(*y) {
                s.insert(x);
            }
        }
        s
    }

    /// Image `f[self]`.
    pub fn image(&self, f: &[usize]) -> StateSet {
        self.iter().map(|x| f[x]).collect()
    }

    /// All subsets of an `n`-element carrier in binary-counter order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = StateSet> {
        assert!(n < 64, "subset enumeration needs fewer than 64 states");
        (0..1u64 << n).map(StateSet::from_mask)
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = StateSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Ord for StateSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for StateSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
