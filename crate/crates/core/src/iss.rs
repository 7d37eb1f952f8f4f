//! Symbol classification and the generalized induced suffix sort over a
//! phrase dictionary.

use std::cmp::Ordering;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::parser::Dictionary;
use crate::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolType {
    L,
    S,
    /// Leftmost S-type: S-type preceded by an L-type symbol of the same unit.
    Lms,
}

impl SymbolType {
    #[inline]
    pub fn is_s(self) -> bool {
        !matches!(self, SymbolType::L)
    }
}

pub type TypeSequence = Vec<SymbolType>;

/// Classifies `symbols` right to left.
///
/// Positions for which `unit_end` holds close a comparison unit: they are
/// S-type like a sentinel and the symbol after them starts a fresh unit,
/// which can never be LMS.
pub fn classify(symbols: &[Symbol], unit_end: impl Fn(usize) -> bool) -> TypeSequence {
    let n = symbols.len();
    let mut types = vec![SymbolType::S; n];
    if n == 0 {
        return types;
    }
    for j in (0..n - 1).rev() {
        if unit_end(j) {
            continue;
        }
        let s = match symbols[j].cmp(&symbols[j + 1]) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => types[j + 1].is_s(),
        };
        types[j] = if s { SymbolType::S } else { SymbolType::L };
    }
    for j in 1..n {
        if types[j] == SymbolType::S && types[j - 1] == SymbolType::L && !unit_end(j - 1) {
            types[j] = SymbolType::Lms;
        }
    }
    types
}

/// The order induced suffix sorting gives to phrase suffixes: symbol by
/// symbol, a proper prefix ranks *above* its extensions, and identical
/// strings keep the order of their phrases (`tie`).
pub fn lms_compare(x: &[Symbol], y: &[Symbol], tie: (usize, usize)) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match a.cmp(b) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    match x.len().cmp(&y.len()) {
        Ordering::Equal => tie.0.cmp(&tie.1),
        Ordering::Less => Ordering::Greater,
        Ordering::Greater => Ordering::Less,
    }
}

/// Suffix array over every suffix of every dictionary phrase.
///
/// Each entry is a position of the phrase store shifted left by one; the low
/// bit marks the first entry of a run of identical suffix strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedSA {
    entries: Vec<u64>,
}

impl GeneralizedSA {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn position(&self, i: usize) -> usize {
        (self.entries[i] >> 1) as usize
    }

    #[inline]
    pub fn is_range_start(&self, i: usize) -> bool {
        self.entries[i] & 1 == 1
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| (e >> 1) as usize)
    }

    pub fn raw(&self) -> &[u64] {
        &self.entries
    }

    /// Half-open index ranges of identical suffix strings, in order.
    pub fn ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.entries.len();
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= n {
                return None;
            }
            let start = i;
            i += 1;
            while i < n && !self.is_range_start(i) {
                i += 1;
            }
            Some((start, i))
        })
    }
}

const UNSET: u64 = u64::MAX;
const S_FLAG: u32 = 1 << 31;
const NO_PRED: u32 = u32::MAX;

/// Sorts all phrase suffixes of `dict` by induced sorting.
///
/// Phrase-final symbols seed the tails of their buckets, L-type suffixes are
/// induced left to right and S-type suffixes right to left. Suffixes that
/// start a phrase are placed but never induce. Identical strings are
/// detected while inducing, so range boundaries come for free.
pub fn build_generalized_sa(dict: &Dictionary) -> Result<GeneralizedSA> {
    let store = dict.store();
    let n = store.len();
    if dict.phrase_count() == 0 {
        return Err(Error::InvalidDictionary("no phrases".into()));
    }
    let sigma = *store.iter().max().unwrap() as usize;
    if store.contains(&0) {
        return Err(Error::InvalidDictionary("symbol 0 inside a phrase".into()));
    }
    if sigma >= S_FLAG as usize {
        return Err(Error::InvalidDictionary(format!("alphabet of {sigma} symbols is too large")));
    }

    // types, validated against the phrase structure
    let mut is_s = BitVec::new(n);
    let mut phrase_start = BitVec::new(n);
    let mut tails = vec![0usize; sigma + 1];
    for p in 0..dict.phrase_count() {
        let (a, b) = (dict.phrase_start(p), dict.phrase_end(p));
        phrase_start.set(a, true);
        is_s.set(b, true);
        tails[store[b] as usize] += 1;
        for j in (a..b).rev() {
            let s = store[j] < store[j + 1] || (store[j] == store[j + 1] && is_s.get(j + 1));
            is_s.set(j, s);
            if !s && is_s.get(j + 1) && j + 1 < b {
                return Err(Error::InvalidDictionary(format!(
                    "phrase {p} has an interior LMS position at offset {}",
                    j + 1 - a
                )));
            }
        }
    }

    // left symbol of each position with its S flag, or NO_PRED at a phrase start
    let pred: Vec<u32> = (0..n)
        .map(|pos| {
            if phrase_start.get(pos) {
                NO_PRED
            } else {
                store[pos - 1] | if is_s.get(pos - 1) { S_FLAG } else { 0 }
            }
        })
        .collect();
    drop(is_s);
    drop(phrase_start);

    let mut bucket_start = vec![0usize; sigma + 2];
    for &c in store {
        bucket_start[c as usize + 1] += 1;
    }
    for c in 1..bucket_start.len() {
        bucket_start[c] += bucket_start[c - 1];
    }
    let bucket_end = |c: usize| bucket_start[c + 1];

    let mut sa = vec![UNSET; n];
    let mut eq_prev = BitVec::new(n);

    // seed: phrase ends at bucket tails, in phrase order
    let mut tail_ptr: Vec<usize> = (0..=sigma).map(|c| bucket_end(c) - tails[c]).collect();
    for p in 0..dict.phrase_count() {
        let b = dict.phrase_end(p);
        let c = store[b] as usize;
        let t = tail_ptr[c];
        sa[t] = b as u64;
        eq_prev.set(t, t > bucket_end(c) - tails[c]);
        tail_ptr[c] += 1;
    }

    // L-pass
    let mut head: Vec<usize> = bucket_start[..=sigma].to_vec();
    let mut last_range = vec![0u64; sigma + 1];
    let mut range_id = 0u64;
    for u in 0..n {
        let e = sa[u];
        if e == UNSET {
            continue;
        }
        if !eq_prev.get(u) {
            range_id += 1;
        }
        let pr = pred[e as usize];
        if pr & S_FLAG == 0 {
            let c = pr as usize;
            let h = head[c];
            sa[h] = e - 1;
            eq_prev.set(h, h > bucket_start[c] && last_range[c] == range_id);
            last_range[c] = range_id;
            head[c] += 1;
        }
    }

    // S-pass
    let s_end: Vec<usize> = (0..=sigma).map(|c| bucket_end(c) - tails[c]).collect();
    let mut s_ptr = s_end.clone();
    last_range.iter_mut().for_each(|r| *r = 0);
    range_id = 0;
    for u in (0..n).rev() {
        if u + 1 == n || !eq_prev.get(u + 1) {
            range_id += 1;
        }
        let e = sa[u];
        if e == UNSET {
            return Err(Error::InvalidDictionary(format!(
                "suffix array slot {u} was never filled"
            )));
        }
        let pr = pred[e as usize];
        if pr != NO_PRED && pr & S_FLAG != 0 {
            let c = (pr & !S_FLAG) as usize;
            s_ptr[c] -= 1;
            let t = s_ptr[c];
            if t < head[c] {
                return Err(Error::InvalidDictionary("S-type bucket overflow".into()));
            }
            sa[t] = e - 1;
            if t + 1 < s_end[c] {
                eq_prev.set(t + 1, last_range[c] == range_id);
            }
            eq_prev.set(t, false);
            last_range[c] = range_id;
        }
    }

    let entries = sa
        .iter()
        .enumerate()
        .map(|(u, &e)| {
            if e == UNSET {
                Err(Error::InvalidDictionary(format!("slot {u} left empty")))
            } else {
                Ok((e << 1) | (!eq_prev.get(u)) as u64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneralizedSA { entries })
}
