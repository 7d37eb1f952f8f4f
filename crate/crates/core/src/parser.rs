//! One parsing round: phrase extraction, the dictionary, the preliminary BWT,
//! dictionary compression and the next text.

use indexmap::IndexMap;
use rustc_hash::FxBuildHasher;

use crate::alphabet::{is_marked, TextLevel};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::iss::{build_generalized_sa, GeneralizedSA};
use crate::rle::{Run, RunSequence, EMPTY};
use crate::Symbol;

/// Phrases of a text in order of first occurrence (right-to-left scan).
///
/// Values start as occurrence counts and are rewritten to ranks by
/// [`rank_phrases`].
#[derive(Clone, Debug, Default)]
pub struct PhraseTable {
    map: IndexMap<Box<[Symbol]>, u64, FxBuildHasher>,
    suffix_of_t: BitVec,
    ranked: bool,
}

impl PhraseTable {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, phrase: &[Symbol]) -> Option<u64> {
        self.map.get(phrase).copied()
    }

    /// Phrases with their current values, in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.map.iter().map(|(k, &v)| (&**k, v))
    }

    pub fn is_ranked(&self) -> bool {
        self.ranked
    }

    /// Whether the `i`-th phrase ends a string of the collection.
    pub fn is_suffix_of_t(&self, i: usize) -> bool {
        self.suffix_of_t.get(i)
    }

    fn record(&mut self, phrase: &[Symbol], ends_string: bool) {
        if let Some(v) = self.map.get_mut(phrase) {
            *v += 1;
        } else {
            self.map.insert(phrase.into(), 1);
            self.suffix_of_t.push(ends_string);
        }
    }
}

/// Cuts a text into phrases while it is fed right to left.
///
/// Phrases are LMS substrings, except that a suffix symbol (one whose flag is
/// set) always closes the phrase on its right and the leading part of each
/// string forms a phrase of its own.
struct PhraseSplitter<'a> {
    flags: &'a BitVec,
    // current phrase, reversed
    rev: Vec<Symbol>,
    scratch: Vec<Symbol>,
    next: Option<(Symbol, bool)>,
}

impl<'a> PhraseSplitter<'a> {
    fn new(flags: &'a BitVec) -> Self {
        PhraseSplitter {
            flags,
            rev: Vec::new(),
            scratch: Vec::new(),
            next: None,
        }
    }

    fn flush(&mut self, emit: &mut impl FnMut(&[Symbol], bool) -> Result<()>) -> Result<()> {
        if self.rev.is_empty() {
            return Ok(());
        }
        self.scratch.clear();
        self.scratch.extend(self.rev.iter().rev());
        let ends_string = is_marked(self.flags, *self.scratch.last().unwrap());
        emit(&self.scratch, ends_string)
    }

    #[inline]
    fn push(&mut self, sym: Symbol, emit: &mut impl FnMut(&[Symbol], bool) -> Result<()>) -> Result<()> {
        if sym == 0 || sym as usize > self.flags.len() {
            return Err(Error::SymbolOutOfRange {
                symbol: sym as u64,
                sigma: self.flags.len() as u64,
            });
        }
        if is_marked(self.flags, sym) {
            self.flush(emit)?;
            self.rev.clear();
            self.rev.push(sym);
            self.next = Some((sym, true));
            return Ok(());
        }
        let Some((next, next_s)) = self.next else {
            return Err(Error::corrupt("text does not end with a string-final symbol"));
        };
        let is_s = sym < next || (sym == next && next_s);
        if !is_s && next_s && self.rev.len() > 1 {
            // the symbol to the right is LMS: close the phrase there
            self.flush(emit)?;
            self.rev.clear();
            self.rev.push(next);
        }
        self.rev.push(sym);
        self.next = Some((sym, is_s));
        Ok(())
    }

    fn finish(mut self, emit: &mut impl FnMut(&[Symbol], bool) -> Result<()>) -> Result<()> {
        self.flush(emit)
    }
}

/// Splits a text given right to left, handing each phrase (left to right)
/// to `emit` together with whether it ends a string.
pub fn split_phrases_rev<I>(rev_symbols: I, suffix_flags: &BitVec, mut emit: impl FnMut(&[Symbol], bool) -> Result<()>) -> Result<()>
where
    I: IntoIterator<Item = Result<Symbol>>,
{
    let mut splitter = PhraseSplitter::new(suffix_flags);
    for s in rev_symbols {
        splitter.push(s?, &mut emit)?;
    }
    splitter.finish(&mut emit)
}

/// Builds the phrase table of `text` from a right-to-left scan.
pub fn scan_phrases(text: &TextLevel) -> PhraseTable {
    scan_phrases_rev(text.symbols.iter().rev().map(|&s| Ok(s)), &text.suffix_flags)
        .expect("in-memory text levels are validated on construction")
}

pub fn scan_phrases_rev<I>(rev_symbols: I, suffix_flags: &BitVec) -> Result<PhraseTable>
where
    I: IntoIterator<Item = Result<Symbol>>,
{
    let mut table = PhraseTable::default();
    split_phrases_rev(rev_symbols, suffix_flags, |p, ends| {
        table.record(p, ends);
        Ok(())
    })?;
    Ok(table)
}

/// Concatenated phrase store with boundary marks and per-phrase data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    store: Vec<Symbol>,
    boundaries: BitVec,
    starts: Vec<usize>,
    freqs: Vec<u64>,
    suffix_of_t: BitVec,
}

impl Default for Dictionary {
    fn default() -> Self {
        Dictionary {
            store: Vec::new(),
            boundaries: BitVec::default(),
            starts: vec![0],
            freqs: Vec::new(),
            suffix_of_t: BitVec::default(),
        }
    }
}

impl Dictionary {
    pub fn from_phrases(phrases: &[Vec<Symbol>], freqs: &[u64], suffix_of_t: &[bool]) -> Result<Self> {
        if phrases.len() != freqs.len() || phrases.len() != suffix_of_t.len() {
            return Err(Error::InvalidDictionary("per-phrase vectors disagree in length".into()));
        }
        let mut d = Dictionary::default();
        for ((p, &f), &s) in phrases.iter().zip(freqs).zip(suffix_of_t) {
            d.push_phrase(p, f, s)?;
        }
        d.boundaries.build_rank();
        Ok(d)
    }

    pub(crate) fn push_phrase(&mut self, phrase: &[Symbol], freq: u64, suffix_of_t: bool) -> Result<()> {
        if phrase.is_empty() {
            return Err(Error::InvalidDictionary("empty phrase".into()));
        }
        self.store.extend_from_slice(phrase);
        self.boundaries.push(true);
        for _ in 1..phrase.len() {
            self.boundaries.push(false);
        }
        self.starts.push(self.store.len());
        self.freqs.push(freq);
        self.suffix_of_t.push(suffix_of_t);
        Ok(())
    }

    /// The concatenated phrases.
    pub fn store(&self) -> &[Symbol] {
        &self.store
    }

    /// One bit per store position, set at phrase starts.
    pub fn boundaries(&self) -> &BitVec {
        &self.boundaries
    }

    pub fn phrase_count(&self) -> usize {
        self.freqs.len()
    }

    pub fn phrase(&self, p: usize) -> &[Symbol] {
        &self.store[self.starts[p]..self.starts[p + 1]]
    }

    #[inline]
    pub fn phrase_start(&self, p: usize) -> usize {
        self.starts[p]
    }

    /// Last position (inclusive) of phrase `p`.
    #[inline]
    pub fn phrase_end(&self, p: usize) -> usize {
        self.starts[p + 1] - 1
    }

    /// Phrase index of a store position, via rank over the boundaries.
    #[inline]
    pub fn phrase_of(&self, pos: usize) -> usize {
        self.boundaries.rank1(pos + 1) - 1
    }

    #[inline]
    pub fn is_phrase_start(&self, pos: usize) -> bool {
        self.boundaries.get(pos)
    }

    pub fn freq(&self, p: usize) -> u64 {
        self.freqs[p]
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    pub fn is_suffix_of_t(&self, p: usize) -> bool {
        self.suffix_of_t.get(p)
    }

    fn seal(&mut self) {
        self.boundaries.build_rank();
    }
}

/// Lays the phrases of `table` out in insertion order.
pub fn build_dictionary(table: &PhraseTable) -> Result<Dictionary> {
    if table.is_empty() {
        return Err(Error::InvalidDictionary("empty phrase table".into()));
    }
    if table.is_ranked() {
        return Err(Error::InvalidDictionary("phrase table already holds ranks".into()));
    }
    let mut d = Dictionary::default();
    d.store.reserve(table.iter().map(|(p, _)| p.len()).sum());
    for (i, (phrase, freq)) in table.iter().enumerate() {
        d.push_phrase(phrase, freq, table.is_suffix_of_t(i))?;
    }
    d.seal();
    Ok(d)
}

/// An undecided pBWT entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyEntry {
    /// Number of text positions covered.
    pub len: u64,
    /// Suffix array range of the suffix string.
    pub sa_range: (usize, usize),
    /// The phrase equal to the suffix string, if any.
    pub full_phrase: Option<usize>,
    /// Whether the string also occurs as a proper suffix.
    pub has_proper: bool,
}

/// Preliminary BWT of one round.
#[derive(Clone, Debug)]
pub struct Pbwt {
    pub runs: RunSequence,
    /// Empty entries in emission order; entry `b - 1` is rank `b` of the next alphabet.
    pub empties: Vec<EmptyEntry>,
    /// Per store position, the rank of its suffix string when that string is
    /// a left-maximal suffix (an empty entry that occurs as a proper suffix), else 0.
    pub left_maximal_rank: Vec<Symbol>,
}

impl Pbwt {
    /// σ of the next round.
    pub fn empty_count(&self) -> usize {
        self.empties.len()
    }
}

/// Scans the equal-suffix ranges of `sa` and emits one run per kept range.
pub fn build_pbwt(dict: &Dictionary, sa: &GeneralizedSA) -> Result<Pbwt> {
    if sa.len() != dict.store().len() {
        return Err(Error::InvalidDictionary("suffix array does not match the dictionary".into()));
    }
    let store = dict.store();
    // Per position: phrase index in the high half, left symbol (0 at a phrase start) in the low half.
    let mut cells = Vec::with_capacity(store.len());
    for p in 0..dict.phrase_count() {
        let start = dict.phrase_start(p);
        cells.push((p as u64) << 32);
        cells.extend(store[start..dict.phrase_end(p)].iter().map(|&l| (p as u64) << 32 | l as u64));
    }
    let mut runs = RunSequence::new();
    let mut empties = Vec::new();
    let mut left_maximal_rank = vec![0; store.len()];
    for (s, e) in sa.ranges() {
        let rep = sa.position(s);
        let phrase = (cells[rep] >> 32) as usize;
        let suffix_len = dict.phrase_end(phrase) - rep + 1;
        if suffix_len == 1 && !dict.is_suffix_of_t(phrase) {
            continue;
        }
        let mut len = 0u64;
        let mut full_phrase = None;
        let mut has_proper = false;
        let mut left: Option<Symbol> = None;
        let mut mixed = false;
        for i in s..e {
            let cell = cells[sa.position(i)];
            let p = (cell >> 32) as usize;
            len += dict.freq(p);
            let l = cell as Symbol;
            if l == EMPTY {
                full_phrase = Some(p);
                mixed = true;
            } else {
                has_proper = true;
                match left {
                    None => left = Some(l),
                    Some(x) if x != l => mixed = true,
                    _ => {}
                }
            }
        }
        if len == 0 {
            continue;
        }
        if mixed {
            runs.push(Run::new(EMPTY, len));
            empties.push(EmptyEntry {
                len,
                sa_range: (s, e),
                full_phrase,
                has_proper,
            });
            if has_proper {
                let rank = empties.len() as Symbol;
                for i in s..e {
                    left_maximal_rank[sa.position(i)] = rank;
                }
            }
        } else {
            runs.push(Run::new(left.expect("a non-empty range has a left symbol"), len));
        }
    }
    Ok(Pbwt {
        runs,
        empties,
        left_maximal_rank,
    })
}

/// Appends every left-maximal suffix that is not already a phrase.
///
/// Returns the phrase index that owns each empty entry.
pub fn expand_dictionary(dict: &mut Dictionary, sa: &GeneralizedSA, pbwt: &mut Pbwt) -> Result<Vec<usize>> {
    let mut owners = Vec::with_capacity(pbwt.empties.len());
    let mut added = Vec::new();
    for entry in &pbwt.empties {
        match entry.full_phrase {
            Some(p) => owners.push(p),
            None => {
                let rep = sa.position(entry.sa_range.0);
                let src = dict.phrase_of(rep);
                added.push((rep, dict.phrase_end(src), dict.is_suffix_of_t(src)));
                owners.push(dict.phrase_count() + added.len() - 1);
            }
        }
    }
    let mut suffix = Vec::new();
    for (rep, end, ends_string) in added {
        suffix.clear();
        suffix.extend_from_slice(&dict.store()[rep..=end]);
        pbwt.left_maximal_rank.extend_from_within(rep..=end);
        dict.push_phrase(&suffix, 0, ends_string)?;
    }
    dict.seal();
    Ok(owners)
}

/// The dictionary after ranking: phrase `b - 1` has rank `b`.
#[derive(Clone, Debug)]
pub struct RankedDictionary {
    pub dict: Dictionary,
    /// V: rank `b` occurs as a proper suffix of some phrase.
    pub proper_suffix: BitVec,
    /// Per store position of `dict`, the left-maximal rank of its suffix (0 if none).
    pub suffix_rank: Vec<Symbol>,
    /// Rank of each phrase of the unranked dictionary.
    pub ranks: Vec<Symbol>,
}

impl RankedDictionary {
    pub fn sigma_next(&self) -> usize {
        self.dict.phrase_count()
    }
}

/// Assigns each phrase the ordinal of its empty entry, reorders the
/// dictionary by rank and rewrites the table values from counts to ranks.
pub fn rank_phrases(dict: &Dictionary, pbwt: &Pbwt, owners: &[usize], table: &mut PhraseTable) -> Result<RankedDictionary> {
    let mut ranks = vec![0 as Symbol; dict.phrase_count()];
    for (b, &p) in owners.iter().enumerate() {
        ranks[p] = b as Symbol + 1;
    }
    if let Some(p) = ranks.iter().position(|&r| r == 0) {
        return Err(Error::corrupt(format!("phrase {p} produced no empty entry")));
    }
    if table.len() > dict.phrase_count() {
        return Err(Error::corrupt("phrase table larger than the dictionary"));
    }
    let mut ranked = Dictionary::default();
    ranked.store.reserve(dict.store().len());
    let mut suffix_rank = Vec::with_capacity(dict.store().len());
    let mut proper_suffix = BitVec::new(owners.len());
    for (b, &p) in owners.iter().enumerate() {
        ranked.push_phrase(dict.phrase(p), dict.freq(p), dict.is_suffix_of_t(p))?;
        suffix_rank.extend_from_slice(&pbwt.left_maximal_rank[dict.phrase_start(p)..=dict.phrase_end(p)]);
        proper_suffix.set(b, pbwt.empties[b].has_proper);
    }
    ranked.seal();
    for (i, v) in table.map.values_mut().enumerate() {
        *v = ranks[i] as u64;
    }
    table.ranked = true;
    Ok(RankedDictionary {
        dict: ranked,
        proper_suffix,
        suffix_rank,
        ranks,
    })
}

/// Second slot of a compressed phrase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Next {
    /// Rank of the longest proper suffix that is itself left-maximal.
    Rank(Symbol),
    /// Symbol of the current alphabet that closes the chain.
    Terminal(Symbol),
}

/// A phrase reduced to its left context and a pointer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pair {
    /// Left context of the suffix `next` points at, or [`EMPTY`] for terminals.
    pub left: Symbol,
    pub next: Next,
}

/// The grammar-compressed dictionary kept for the induction phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedDict {
    /// `pairs[b - 1]` encodes rank `b`.
    pub pairs: Vec<Pair>,
    /// V: rank `b` occurs as a proper suffix inside some phrase.
    pub proper_suffix: BitVec,
    pub suffix_of_t: BitVec,
}

impl CompressedDict {
    pub fn sigma_next(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn pair(&self, rank: Symbol) -> Option<&Pair> {
        self.pairs.get((rank as usize).wrapping_sub(1))
    }

    #[inline]
    pub fn is_proper_suffix(&self, rank: Symbol) -> bool {
        is_marked(&self.proper_suffix, rank)
    }
}

/// Replaces each phrase by (left context, rank) of its longest proper
/// suffix that is left-maximal, or by (dummy, terminal) when there is none.
///
/// The terminal is the phrase's last symbol when the phrase ends a string and
/// the second-to-last otherwise (the last one is shared with the next phrase).
pub fn compress_dictionary(ranked: &RankedDictionary) -> Result<CompressedDict> {
    let dict = &ranked.dict;
    let mut pairs = Vec::with_capacity(dict.phrase_count());
    for p in 0..dict.phrase_count() {
        let (a, z) = (dict.phrase_start(p), dict.phrase_end(p));
        let hit = (a + 1..=z).find(|&pos| ranked.suffix_rank[pos] != 0);
        let pair = match hit {
            Some(pos) => Pair {
                left: dict.store()[pos - 1],
                next: Next::Rank(ranked.suffix_rank[pos]),
            },
            None if dict.is_suffix_of_t(p) => Pair {
                left: EMPTY,
                next: Next::Terminal(dict.store()[z]),
            },
            None if z > a => Pair {
                left: EMPTY,
                next: Next::Terminal(dict.store()[z - 1]),
            },
            None => {
                return Err(Error::InvalidDictionary(format!(
                    "phrase {p} has length one but does not end a string"
                )))
            }
        };
        pairs.push(pair);
    }
    let suffix_of_t = BitVec::from_bools((0..dict.phrase_count()).map(|p| dict.is_suffix_of_t(p)));
    Ok(CompressedDict {
        pairs,
        proper_suffix: ranked.proper_suffix.clone(),
        suffix_of_t,
    })
}

/// Replaces every phrase occurrence of a text given right to left by its
/// rank, handing the ranks to `emit` right to left.
pub fn build_parse_rev<I>(rev_symbols: I, suffix_flags: &BitVec, table: &PhraseTable, mut emit: impl FnMut(Symbol) -> Result<()>) -> Result<()>
where
    I: IntoIterator<Item = Result<Symbol>>,
{
    if !table.is_ranked() {
        return Err(Error::InvalidDictionary("phrase table values are not ranks yet".into()));
    }
    split_phrases_rev(rev_symbols, suffix_flags, |p, _| {
        let rank = table
            .get(p)
            .ok_or_else(|| Error::corrupt("phrase missing from the table on the second scan"))?;
        emit(rank as Symbol)
    })
}

/// Suffix marks of the next round: rank `b` is marked when its phrase ends a string.
pub fn next_suffix_flags(cdict: &CompressedDict) -> BitVec {
    cdict.suffix_of_t.clone()
}

/// Builds the next text level.
pub fn build_parse(text: &TextLevel, table: &PhraseTable, cdict: &CompressedDict) -> Result<TextLevel> {
    let mut rev = Vec::with_capacity(text.len() / 2 + 1);
    build_parse_rev(text.symbols.iter().rev().map(|&s| Ok(s)), &text.suffix_flags, table, |r| {
        rev.push(r);
        Ok(())
    })?;
    rev.reverse();
    TextLevel::new(
        text.level + 1,
        rev,
        cdict.sigma_next() as Symbol,
        text.k,
        next_suffix_flags(cdict),
    )
}

/// Everything a parsing round produces besides the next text.
#[derive(Clone, Debug)]
pub struct Round {
    pub pbwt: RunSequence,
    pub cdict: CompressedDict,
    pub ranked: RankedDictionary,
    /// Symbols in the dictionary before expansion.
    pub dict_symbols: usize,
    /// Phrases before expansion.
    pub dict_phrases: usize,
}

/// Runs the in-memory part of a round on a freshly scanned table. On return
/// the table holds ranks and is ready for [`build_parse_rev`].
pub fn process_round(table: &mut PhraseTable) -> Result<Round> {
    let mut dict = build_dictionary(table)?;
    let dict_symbols = dict.store().len();
    let dict_phrases = dict.phrase_count();
    let sa = build_generalized_sa(&dict)?;
    let mut pbwt = build_pbwt(&dict, &sa)?;
    let owners = expand_dictionary(&mut dict, &sa, &mut pbwt)?;
    let ranked = rank_phrases(&dict, &pbwt, &owners, table)?;
    let cdict = compress_dictionary(&ranked)?;
    Ok(Round {
        pbwt: pbwt.runs,
        cdict,
        ranked,
        dict_symbols,
        dict_phrases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ingest, StringCollection};

    const A: Symbol = 2;
    const C: Symbol = 3;
    const G: Symbol = 4;
    const T: Symbol = 5;
    const D: Symbol = 1;

    fn example_text() -> TextLevel {
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        ingest(&c, b'$').unwrap().0
    }

    fn table_map(t: &PhraseTable) -> Vec<(Vec<Symbol>, u64)> {
        let mut v: Vec<_> = t.iter().map(|(p, f)| (p.to_vec(), f)).collect();
        v.sort();
        v
    }

    #[test]
    fn example_phrases() {
        let t = scan_phrases(&example_text());
        let mut expected = vec![
            (vec![G, T, A], 2),
            (vec![A, C, C, D], 2),
            (vec![A, A, T, A], 1),
            (vec![A, G, T, A], 1),
        ];
        expected.sort();
        assert_eq!(table_map(&t), expected);
        // first occurrence from the right is acc$
        assert_eq!(t.iter().next().unwrap().0, &[A, C, C, D]);
    }

    #[test]
    fn single_string_phrase() {
        let c = StringCollection::from_strs(&["a"]).unwrap();
        let t = scan_phrases(&ingest(&c, b'$').unwrap().0);
        assert_eq!(table_map(&t), vec![(vec![2, 1], 1)]);
    }

    #[test]
    fn repeated_string_phrase() {
        let c = StringCollection::from_strs(&["ab", "ab"]).unwrap();
        let t = scan_phrases(&ingest(&c, b'$').unwrap().0);
        assert_eq!(table_map(&t), vec![(vec![2, 3, 1], 2)]);
    }

    #[test]
    fn example_dictionary_layout() {
        let t = scan_phrases(&example_text());
        let d = build_dictionary(&t).unwrap();
        assert_eq!(d.store().len(), 15);
        assert_eq!(d.phrase_count(), 4);
        assert_eq!(d.boundaries().count_ones(), 4);
        for p in 0..4 {
            let ends = d.phrase(p).last() == Some(&D);
            assert_eq!(d.is_suffix_of_t(p), ends);
            for pos in d.phrase_start(p)..=d.phrase_end(p) {
                assert_eq!(d.phrase_of(pos), p);
            }
        }
    }

    #[test]
    fn singleton_dictionary() {
        let c = StringCollection::from_strs(&["a"]).unwrap();
        let (text, _) = ingest(&c, b'$').unwrap();
        let mut table = scan_phrases(&text);
        let d = build_dictionary(&table).unwrap();
        assert_eq!(d.store(), &[2, 1]);
        assert_eq!(d.boundaries().iter().collect::<Vec<_>>(), vec![true, false]);
        assert_eq!(d.freqs(), &[1]);
        let round = process_round(&mut table).unwrap();
        assert_eq!(round.pbwt.runs(), &[Run::new(2, 1), Run::new(EMPTY, 1)]);
        assert_eq!(round.ranked.ranks, vec![1]);
        assert_eq!(round.cdict.proper_suffix.iter().collect::<Vec<_>>(), vec![false]);
        let next = build_parse(&text, &table, &round.cdict).unwrap();
        assert_eq!(next.symbols, vec![1]);
        assert!(next.is_final());
    }

    #[test]
    fn repeated_string_parse_is_final() {
        let c = StringCollection::from_strs(&["ab", "ab"]).unwrap();
        let (text, _) = ingest(&c, b'$').unwrap();
        let mut table = scan_phrases(&text);
        let round = process_round(&mut table).unwrap();
        let next = build_parse(&text, &table, &round.cdict).unwrap();
        assert_eq!(next.symbols, vec![1, 1]);
        assert!(next.is_final());
    }

    #[test]
    fn example_round() {
        let text = example_text();
        let mut table = scan_phrases(&text);
        let round = process_round(&mut table).unwrap();
        let runs: Vec<(Symbol, u64)> = round.pbwt.iter_runs().map(|r| (r.symbol, r.len)).collect();
        assert_eq!(
            runs,
            vec![(C, 2), (0, 1), (0, 2), (0, 1), (A, 1), (C, 2), (A, 2), (0, 3), (0, 4)]
        );
        assert_eq!(round.pbwt.total(), 18);
        let ranked = &round.ranked.dict;
        let order: Vec<&[Symbol]> = (0..ranked.phrase_count()).map(|p| ranked.phrase(p)).collect();
        assert_eq!(
            order,
            vec![&[A, A, T, A][..], &[A, C, C, D], &[A, G, T, A], &[G, T, A], &[T, A]]
        );
        assert_eq!(
            round.cdict.proper_suffix.iter().collect::<Vec<_>>(),
            vec![false, false, false, true, true]
        );
        let p = |left, next| Pair { left, next };
        assert_eq!(
            round.cdict.pairs,
            vec![
                p(A, Next::Rank(5)),
                p(EMPTY, Next::Terminal(D)),
                p(A, Next::Rank(4)),
                p(G, Next::Rank(5)),
                p(EMPTY, Next::Terminal(T)),
            ]
        );
        let next = build_parse(&text, &table, &round.cdict).unwrap();
        assert_eq!(next.symbols, vec![4, 2, 4, 1, 3, 2]);
        assert_eq!(next.sigma, 5);
        assert_eq!(next.suffix_flags.ones().collect::<Vec<_>>(), vec![1]);
        assert!(!next.is_final());
    }

    #[test]
    fn expansion_only_adds_proper_left_maximal_suffixes() {
        let text = example_text();
        let table = scan_phrases(&text);
        let mut dict = build_dictionary(&table).unwrap();
        let sa = build_generalized_sa(&dict).unwrap();
        let mut pbwt = build_pbwt(&dict, &sa).unwrap();
        let before = dict.phrase_count();
        expand_dictionary(&mut dict, &sa, &mut pbwt).unwrap();
        let added: Vec<&[Symbol]> = (before..dict.phrase_count()).map(|p| dict.phrase(p)).collect();
        assert_eq!(added, vec![&[T, A][..]]);
        assert!(!dict.is_suffix_of_t(before));

        // every string distinct with distinct left contexts: nothing to add
        let c = StringCollection::from_strs(&["ab"]).unwrap();
        let table = scan_phrases(&ingest(&c, b'$').unwrap().0);
        let mut dict = build_dictionary(&table).unwrap();
        let sa = build_generalized_sa(&dict).unwrap();
        let mut pbwt = build_pbwt(&dict, &sa).unwrap();
        let snapshot = dict.clone();
        expand_dictionary(&mut dict, &sa, &mut pbwt).unwrap();
        assert_eq!(dict, snapshot);
    }

    #[test]
    fn full_phrase_that_is_also_a_suffix_is_empty() {
        // "ba$" and "a$" with the same left context 'b' for the proper suffix a$:
        // a$ is a full phrase too, so its range cannot be decided
        let c = StringCollection::from_strs(&["ba", "a"]).unwrap();
        let text = ingest(&c, b'$').unwrap().0;
        let table = scan_phrases(&text);
        let dict = build_dictionary(&table).unwrap();
        let sa = build_generalized_sa(&dict).unwrap();
        let pbwt = build_pbwt(&dict, &sa).unwrap();
        let a_dollar = pbwt
            .empties
            .iter()
            .find(|e| e.full_phrase.map(|p| dict.phrase(p) == [2, 1]).unwrap_or(false))
            .expect("a$ must produce an empty entry");
        assert!(a_dollar.has_proper);
    }

    #[test]
    fn parse_requires_ranks() {
        let text = example_text();
        let table = scan_phrases(&text);
        assert!(build_parse_rev(text.symbols.iter().rev().map(|&s| Ok(s)), &text.suffix_flags, &table, |_| Ok(())).is_err());
    }
}
