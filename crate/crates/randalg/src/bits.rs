//! Fixed-width bitsets backed by little-endian u64 words.
//!
//! Adjacency rows and set-system sets are bitsets; common neighbourhoods
//! and set intersections reduce to word-wise ANDs over them. Bits at or
//! beyond `len` are kept zero so that equality and popcounts stay
//! canonical.

/// A fixed-length bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// All bits below `len` set.
    pub fn all_ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(len)];
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Bitset { len, words }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut b = Bitset::new(len);
        for &i in indices {
            b.set(i);
        }
        b
    }

    /// Wraps raw words; fails if the tail bits beyond `len` are not zero.
    pub fn from_words(len: usize, words: Vec<u64>) -> Option<Self> {
        if words.len() != word_count(len) {
            return None;
        }
        if !len.is_multiple_of(64) {
            let mask = (1u64 << (len % 64)) - 1;
            if let Some(&last) = words.last() {
                if last & !mask != 0 {
                    return None;
                }
            }
        }
        Some(Bitset { len, words })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn and_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Popcount of the AND without materializing it.
    pub fn and_count(&self, other: &Bitset) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn is_subset_of(&self, other: &Bitset) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Popcount restricted to `range` (used for super-node windows).
    pub fn count_in_range(&self, range: std::ops::Range<usize>) -> u64 {
        debug_assert!(range.end <= self.len);
        let mut total = 0u64;
        let (start, end) = (range.start, range.end);
        if start >= end {
            return 0;
        }
        let (ws, we) = (start / 64, (end - 1) / 64);
        for wi in ws..=we {
            let mut w = self.words[wi];
            if wi == ws {
                w &= u64::MAX << (start % 64);
            }
            if wi == we && end % 64 != 0 {
                w &= (1u64 << (end % 64)) - 1;
            }
            total += w.count_ones() as u64;
        }
        total
    }
}

/// AND of all rows; the empty intersection is the full set.
pub fn intersect_all(len: usize, rows: &[&Bitset]) -> Bitset {
    let mut acc = Bitset::all_ones(len);
    for row in rows {
        acc.and_assign(row);
    }
    acc
}
