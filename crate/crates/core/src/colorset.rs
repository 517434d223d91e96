//! Fixed-width color sets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest palette a [`ColorSet`] can hold.
pub const MAX_COLORS: usize = 256;

const WORDS: usize = MAX_COLORS / 64;

/// A subset of the palette `{0, .., q-1}` stored as a 256-bit bitset.
///
/// Set algebra is word-parallel; iteration yields colors in ascending order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ColorSet {
    words: [u64; WORDS],
}

impl ColorSet {
    pub const fn empty() -> Self {
        Self { words: [0; WORDS] }
    }

    /// The full palette `[q]`.
    pub fn full(q: usize) -> Self {
        assert!(q <= MAX_COLORS, "palette of {q} colors exceeds {MAX_COLORS}");
        let mut set = Self::empty();
        for (i, word) in set.words.iter_mut().enumerate() {
            let lo = i * 64;
            if q >= lo + 64 {
                *word = u64::MAX;
            } else if q > lo {
                *word = (1u64 << (q - lo)) - 1;
            }
        }
        set
    }

    pub fn singleton(color: usize) -> Self {
        let mut set = Self::empty();
        set.insert(color);
        set
    }

    pub fn insert(&mut self, color: usize) {
        assert!(color < MAX_COLORS, "color {color} out of range");
        self.words[color / 64] |= 1u64 << (color % 64);
    }

    pub fn remove(&mut self, color: usize) {
        if color < MAX_COLORS {
            self.words[color / 64] &= !(1u64 << (color % 64));
        }
    }

    pub fn contains(&self, color: usize) -> bool {
        color < MAX_COLORS && self.words[color / 64] & (1u64 << (color % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    /// `[q] \ self`.
    pub fn complement(&self, q: usize) -> Self {
        Self::full(q).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The `k`-th smallest member (0-based).
    pub fn nth(&self, mut k: usize) -> Option<usize> {
        for (i, &word) in self.words.iter().enumerate() {
            let ones = word.count_ones() as usize;
            if k < ones {
                let mut w = word;
                for _ in 0..k {
                    w &= w - 1;
                }
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
            k -= ones;
        }
        None
    }

    pub fn iter(&self) -> Iter {
        Iter {
            words: self.words,
            index: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let mut words = [0u64; WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            *w = f(self.words[i], other.words[i]);
        }
        Self { words }
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ColorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = Self::empty();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl IntoIterator for &ColorSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter {
    words: [u64; WORDS],
    index: usize,
}

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.index < WORDS {
            let w = self.words[self.index];
            if w != 0 {
                self.words[self.index] = w & (w - 1);
                return Some(self.index * 64 + w.trailing_zeros() as usize);
            }
            self.index += 1;
        }
        None
    }
}

impl Serialize for ColorSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ColorSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let colors = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = colors.iter().find(|&&c| c >= MAX_COLORS) {
            return Err(serde::de::Error::custom(format!("color {bad} out of range")));
        }
        Ok(colors.into_iter().collect())
    }
}
