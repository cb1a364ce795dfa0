//! Fixed-length bitsets backing every exact set computation.

use std::fmt;

use rayon::prelude::*;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bitset {
            words: vec![!0; len.div_ceil(WORD)],
            len,
        };
        b.trim();
        b
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut b = Bitset::new(len);
        for i in indices {
            b.insert(i);
        }
        b
    }

    /// `{i < len : pred(i)}`, built a word at a time in parallel.
    pub fn from_predicate<F: Fn(usize) -> bool + Sync>(len: usize, pred: F) -> Self {
        let words = (0..len.div_ceil(WORD))
            .into_par_iter()
            .map(|w| {
                let base = w * WORD;
                (0..WORD.min(len - base)).fold(0u64, |acc, j| acc | ((pred(base + j) as u64) << j))
            })
            .collect();
        Bitset { words, len }
    }

    /// Bits from little-endian words; bits past `len` are dropped.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        let mut b = Bitset { words, len };
        b.trim();
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    /// Sets bits `lo, lo+step, ...` up to and including `hi`.
    pub fn insert_progression(&mut self, lo: usize, hi: usize, step: usize) {
        assert!(step > 0);
        if step == 1 {
            self.insert_range(lo, hi);
            return;
        }
        let mut i = lo;
        while i <= hi && i < self.len {
            self.words[i / WORD] |= 1 << (i % WORD);
            i += step;
        }
    }

    /// Sets every bit in the inclusive range `[lo, hi]`.
    pub fn insert_range(&mut self, lo: usize, hi: usize) {
        if lo > hi || lo >= self.len {
            return;
        }
        let hi = hi.min(self.len - 1);
        let (lw, hw) = (lo / WORD, hi / WORD);
        let lmask = !0u64 << (lo % WORD);
        let hmask = !0u64 >> (WORD - 1 - hi % WORD);
        if lw == hw {
            self.words[lw] |= lmask & hmask;
        } else {
            self.words[lw] |= lmask;
            for w in &mut self.words[lw + 1..hw] {
                *w = !0;
            }
            self.words[hw] |= hmask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in the inclusive range `[lo, hi]`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        if lo > hi || lo >= self.len {
            return 0;
        }
        let hi = hi.min(self.len - 1);
        let (lw, hw) = (lo / WORD, hi / WORD);
        let lmask = !0u64 << (lo % WORD);
        let hmask = !0u64 >> (WORD - 1 - hi % WORD);
        if lw == hw {
            return (self.words[lw] & lmask & hmask).count_ones() as usize;
        }
        let mut c = (self.words[lw] & lmask).count_ones() as usize;
        c += self.words[lw + 1..hw]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>();
        c + (self.words[hw] & hmask).count_ones() as usize
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    fn check_len(&self, other: &Bitset) {
        assert_eq!(self.len, other.len, "bitset length mismatch");
    }

    pub fn union_with(&mut self, other: &Bitset) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Bitset) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bitset) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn symmetric_difference_with(&mut self, other: &Bitset) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn complement(&self) -> Bitset {
        let mut c = Bitset {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        c.trim();
        c
    }

    pub fn is_subset(&self, other: &Bitset) -> bool {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `self |= other << shift`, where bits shifted past either end are dropped.
    /// A negative shift moves bits toward index 0.
    pub fn or_shifted(&mut self, other: &Bitset, shift: isize) {
        let n = self.words.len();
        let m = other.words.len();
        if shift >= 0 {
            let (ws, bs) = (shift as usize / WORD, shift as usize % WORD);
            for j in 0..m {
                let w = other.words[j];
                if w == 0 {
                    continue;
                }
                let t = j + ws;
                if t >= n {
                    break;
                }
                self.words[t] |= w << bs;
                if bs != 0 && t + 1 < n {
                    self.words[t + 1] |= w >> (WORD - bs);
                }
            }
        } else {
            let s = shift.unsigned_abs();
            let (ws, bs) = (s / WORD, s % WORD);
            for j in ws..m {
                let w = other.words[j];
                if w == 0 {
                    continue;
                }
                let t = j - ws;
                if t >= n {
                    break;
                }
                self.words[t] |= w >> bs;
                if bs != 0 && t >= 1 {
                    self.words[t - 1] |= w << (WORD - bs);
                }
            }
        }
        self.trim();
    }

    /// Bits `[start, start + len)` as a new bitset; positions past the end read as 0.
    pub fn slice(&self, start: usize, len: usize) -> Bitset {
        let (sw, sb) = (start / WORD, start % WORD);
        let read = |i: usize| self.words.get(i).copied().unwrap_or(0);
        let words = (0..len.div_ceil(WORD))
            .map(|k| {
                let lo = read(sw + k);
                if sb == 0 {
                    lo
                } else {
                    lo >> sb | read(sw + k + 1) << (WORD - sb)
                }
            })
            .collect();
        let mut b = Bitset::from_words(words, len);
        // drop anything read from beyond self.len
        if start + len > self.len {
            let keep = self.len.saturating_sub(start);
            for i in keep..len {
                b.remove(i);
            }
        }
        b
    }

    /// Reverses bit order: bit `i` moves to `len - 1 - i`.
    pub fn reversed(&self) -> Bitset {
        Bitset::from_indices(self.len, self.iter_ones().map(|i| self.len - 1 - i))
    }

    /// First set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / WORD;
        let mut w = self.words[wi] & (!0u64 << (from % WORD));
        loop {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    /// First clear bit at or after `from`, or `len` if there is none.
    pub fn next_zero(&self, from: usize) -> usize {
        if from >= self.len {
            return self.len;
        }
        let mut wi = from / WORD;
        let mut w = !self.words[wi] & (!0u64 << (from % WORD));
        loop {
            if w != 0 {
                return (wi * WORD + w.trailing_zeros() as usize).min(self.len);
            }
            wi += 1;
            if wi == self.words.len() {
                return self.len;
            }
            w = !self.words[wi];
        }
    }

    /// Maximal runs of set bits as `(start, length)`, in increasing order.
    pub fn runs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut pos = 0;
        std::iter::from_fn(move || {
            let start = self.next_one(pos)?;
            let end = self.next_zero(start);
            pos = end;
            Some((start, end - start))
        })
    }

    /// Length of the longest run of consecutive set bits, with its start
    /// (the earliest among equals).
    pub fn longest_run(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for (start, len) in self.runs() {
            if len > best.0 {
                best = (len, start);
            }
        }
        best
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter_ones()).finish()
    }
}

/// Prefix popcounts for constant-time range counts on a frozen bitset.
#[derive(Clone, Debug)]
pub struct RankIndex {
    before: Vec<u64>,
}

impl RankIndex {
    pub fn build(bits: &Bitset) -> Self {
        let mut before = Vec::with_capacity(bits.words.len() + 1);
        let mut acc = 0u64;
        before.push(0);
        for w in &bits.words {
            acc += w.count_ones() as u64;
            before.push(acc);
        }
        RankIndex { before }
    }

    /// Set bits strictly before position `i`.
    pub fn rank(&self, bits: &Bitset, i: usize) -> usize {
        let i = i.min(bits.len);
        let (w, b) = (i / WORD, i % WORD);
        let mut r = self.before[w] as usize;
        if b != 0 {
            r += (bits.words[w] & ((1u64 << b) - 1)).count_ones() as usize;
        }
        r
    }

    /// Set bits in the inclusive range `[lo, hi]`.
    pub fn count(&self, bits: &Bitset, lo: usize, hi: usize) -> usize {
        if lo > hi {
            return 0;
        }
        self.rank(bits, hi + 1) - self.rank(bits, lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranges_and_runs() {
        let mut b = Bitset::new(200);
        b.insert_range(60, 130);
        assert_eq!(b.count_ones(), 71);
        assert_eq!(b.count_range(0, 59), 0);
        assert_eq!(b.count_range(64, 127), 64);
        assert_eq!(b.longest_run(), (71, 60));
        b.insert_progression(150, 199, 7);
        assert_eq!(b.count_range(150, 199), 8);
        let idx = RankIndex::build(&b);
        assert_eq!(idx.count(&b, 0, 199), b.count_ones());
        assert_eq!(idx.count(&b, 61, 150), 71);
    }

    #[test]
    fn complement_is_trimmed() {
        let b = Bitset::from_indices(70, [0, 69]);
        let c = b.complement();
        assert_eq!(c.count_ones(), 68);
        assert!(!c.contains(69));
    }

    proptest! {
        #[test]
        fn shift_matches_naive(idx in proptest::collection::vec(0usize..300, 0..40), shift in -320isize..320) {
            let src = Bitset::from_indices(300, idx.iter().copied());
            let mut got = Bitset::new(300);
            got.or_shifted(&src, shift);
            let want = Bitset::from_indices(
                300,
                idx.iter().filter_map(|&i| {
                    let j = i as isize + shift;
                    (0..300).contains(&j).then_some(j as usize)
                }),
            );
            prop_assert_eq!(got, want);
        }

        #[test]
        fn rank_matches_count_range(idx in proptest::collection::vec(0usize..500, 0..80), lo in 0usize..500, span in 0usize..500) {
            let b = Bitset::from_indices(500, idx);
            let r = RankIndex::build(&b);
            let hi = (lo + span).min(499);
            prop_assert_eq!(r.count(&b, lo, hi), b.count_range(lo, hi));
        }
    }

    proptest! {
        #[test]
        fn slice_matches_naive(idx in proptest::collection::vec(0usize..300, 0..200), start in 0usize..320, len in 0usize..200) {
            let b = Bitset::from_indices(300, idx);
            let s = b.slice(start, len);
            for i in 0..len {
                prop_assert_eq!(s.contains(i), start + i < 300 && b.contains(start + i));
            }
        }
    }

    proptest! {
        #[test]
        fn runs_match_naive_scan(idx in proptest::collection::vec(0usize..300, 0..200)) {
            let b = Bitset::from_indices(300, idx);
            let mut naive = Vec::new();
            let mut i = 0;
            while i < 300 {
                if b.contains(i) {
                    let s = i;
                    while i < 300 && b.contains(i) {
                        i += 1;
                    }
                    naive.push((s, i - s));
                } else {
                    i += 1;
                }
            }
            prop_assert_eq!(b.runs().collect::<Vec<_>>(), naive);
        }
    }
}
