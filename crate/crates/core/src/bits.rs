//! Plain bit vector with constant-time `rank1`.

/// Fixed-length bit vector. `rank1` is only valid after [`BitVec::build_rank`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
    // cumulative popcount before each 512-bit block
    blocks: Vec<u64>,
}

const BLOCK_WORDS: usize = 8;

impl BitVec {
    pub fn new(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
            blocks: Vec::new(),
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bv = BitVec::default();
        for b in bits {
            bv.push(b);
        }
        bv
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
        self.blocks.clear();
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn build_rank(&mut self) {
        self.blocks.clear();
        let mut acc = 0u64;
        for chunk in self.words.chunks(BLOCK_WORDS) {
            self.blocks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        self.blocks.push(acc);
    }

    /// Number of set bits in `[0, i)`.
    pub fn rank1(&self, i: usize) -> usize {
        assert!(!self.blocks.is_empty() || self.words.is_empty(), "rank support not built");
        debug_assert!(i <= self.len);
        let word = i / 64;
        let block = word / BLOCK_WORDS;
        let mut r = self.blocks.get(block).copied().unwrap_or(0);
        for w in &self.words[block * BLOCK_WORDS..word] {
            r += w.count_ones() as u64;
        }
        if !i.is_multiple_of(64) {
            r += (self.words[word] & ((1u64 << (i % 64)) - 1)).count_ones() as u64;
        }
        r as usize
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        BitVec {
            words,
            len,
            blocks: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_prefix_count() {
        let bits: Vec<bool> = (0..1500).map(|i| (i * 7 + i / 3) % 5 == 0).collect();
        let mut bv = BitVec::from_bools(bits.iter().copied());
        bv.build_rank();
        let mut acc = 0;
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(bv.rank1(i), acc, "rank at {i}");
            acc += b as usize;
        }
        assert_eq!(bv.rank1(bits.len()), acc);
        assert_eq!(bv.count_ones(), acc);
    }

    #[test]
    fn set_and_clear() {
        let mut bv = BitVec::new(70);
        bv.set(69, true);
        bv.set(3, true);
        bv.set(3, false);
        assert_eq!(bv.ones().collect::<Vec<_>>(), vec![69]);
    }
}
