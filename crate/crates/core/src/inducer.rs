//! Induces the BWT of one level from the BWT of the level above.

use crate::alphabet::TextLevel;
use crate::error::{Error, Result};
use crate::parser::{CompressedDict, Next};
use crate::rle::{Run, RunCursor, RunSequence, EMPTY};
use crate::Symbol;

/// BWT of the last level: every string is a single symbol, and the string
/// start rows carry the string end symbols in string order.
pub fn base_bwt(text: &TextLevel) -> Result<RunSequence> {
    if !text.is_final() {
        return Err(Error::NotFinal {
            len: text.len() as u64,
            k: text.k as u64,
        });
    }
    Ok(RunSequence::from_symbols(text.symbols.iter().copied()))
}

/// Per-rank run buffers, laid out in one flat array.
#[derive(Clone, Debug, Default)]
pub struct Buckets {
    offsets: Vec<usize>,
    fill: Vec<usize>,
    runs: Vec<Run>,
}

impl Buckets {
    /// Runs stored for rank `b`.
    pub fn bucket(&self, b: Symbol) -> &[Run] {
        let b = b as usize;
        &self.runs[self.offsets[b - 1]..self.fill[b - 1]]
    }

    /// Capacity reserved over all buckets, in runs.
    pub fn capacity(&self) -> usize {
        self.runs.len()
    }

    fn push(&mut self, b: Symbol, run: Run) -> Result<()> {
        let i = b as usize - 1;
        if self.fill[i] == self.offsets[i + 1] {
            return Err(Error::corrupt(format!("bucket {b} overflows its computed size")));
        }
        self.runs[self.fill[i]] = run;
        self.fill[i] += 1;
        Ok(())
    }
}

fn check_symbol(s: Symbol, cdict: &CompressedDict) -> Result<()> {
    if s == 0 || s as usize > cdict.sigma_next() {
        return Err(Error::SymbolOutOfRange {
            symbol: s as u64,
            sigma: cdict.sigma_next() as u64,
        });
    }
    Ok(())
}

/// Visits every proper suffix on the chain of `b` as `(bucket, left)`, then
/// returns the terminal symbol.
#[inline]
fn walk_chain(cdict: &CompressedDict, b: Symbol, mut visit: impl FnMut(Symbol, Symbol) -> Result<()>) -> Result<Symbol> {
    let mut cur = b;
    // every step moves to a strictly shorter suffix
    for _ in 0..=cdict.sigma_next() {
        let pair = cdict
            .pair(cur)
            .ok_or_else(|| Error::corrupt(format!("rank {cur} has no pair")))?;
        match pair.next {
            Next::Terminal(t) => return Ok(t),
            Next::Rank(o) => {
                check_symbol(o, cdict)?;
                visit(o, pair.left)?;
                cur = o;
            }
        }
    }
    Err(Error::corrupt(format!("suffix chain of rank {b} does not terminate")))
}

/// Counts runs per symbol of the upper BWT and reserves bucket space,
/// walking each distinct symbol's chain once.
pub fn size_buckets<I>(bwt_next: I, cdict: &CompressedDict) -> Result<Buckets>
where
    I: IntoIterator<Item = Result<Run>>,
{
    let sigma = cdict.sigma_next();
    let mut runs_of = vec![0usize; sigma];
    for r in bwt_next {
        let r = r?;
        check_symbol(r.symbol, cdict)?;
        runs_of[r.symbol as usize - 1] += 1;
    }
    let mut sizes = vec![0usize; sigma];
    for b in 1..=sigma as Symbol {
        let c = runs_of[b as usize - 1];
        if c == 0 {
            continue;
        }
        if cdict.is_proper_suffix(b) {
            sizes[b as usize - 1] += c;
        }
        walk_chain(cdict, b, |o, _| {
            sizes[o as usize - 1] += c;
            Ok(())
        })?;
    }
    let mut offsets = Vec::with_capacity(sigma + 1);
    let mut acc = 0;
    offsets.push(0);
    for s in &sizes {
        acc += s;
        offsets.push(acc);
    }
    Ok(Buckets {
        fill: offsets[..sigma].to_vec(),
        offsets,
        runs: vec![Run::new(EMPTY, 0); acc],
    })
}

/// Fills the buckets from the upper BWT and emits its transformed copy, in
/// which each symbol is replaced by the terminal of its chain.
///
/// Returns the number of chain steps taken.
pub fn induce<I>(bwt_next: I, cdict: &CompressedDict, buckets: &mut Buckets, mut transformed: impl FnMut(Run) -> Result<()>) -> Result<u64>
where
    I: IntoIterator<Item = Result<Run>>,
{
    let mut steps = 0u64;
    for r in bwt_next {
        let Run { symbol: b, len } = r?;
        check_symbol(b, cdict)?;
        if cdict.is_proper_suffix(b) {
            buckets.push(b, Run::new(EMPTY, len))?;
        }
        let t = walk_chain(cdict, b, |o, left| {
            steps += 1;
            buckets.push(o, Run::new(left, len))
        })?;
        transformed(Run::new(t, len))?;
    }
    Ok(steps)
}

/// Resolves the empty entries of `pbwt` and emits the BWT of this level.
pub fn merge<P, T>(pbwt: P, cdict: &CompressedDict, buckets: &Buckets, transformed: T, mut out: impl FnMut(Run) -> Result<()>) -> Result<()>
where
    P: IntoIterator<Item = Result<Run>>,
    T: IntoIterator<Item = Result<Run>>,
{
    let mut tr = RunCursor::new(transformed.into_iter());
    let mut b: Symbol = 0;
    for r in pbwt {
        let r = r?;
        if r.symbol != EMPTY {
            out(r)?;
            continue;
        }
        b += 1;
        check_symbol(b, cdict)?;
        if !cdict.is_proper_suffix(b) {
            tr.take(r.len, &mut out)?;
            continue;
        }
        let mut emitted = 0u64;
        for &e in buckets.bucket(b) {
            emitted += e.len;
            if e.symbol == EMPTY {
                tr.take(e.len, &mut out)?;
            } else {
                out(e)?;
            }
        }
        if emitted != r.len {
            return Err(Error::corrupt(format!(
                "bucket {b} holds {emitted} entries but the preliminary BWT expects {}",
                r.len
            )));
        }
    }
    if b as usize != cdict.sigma_next() {
        return Err(Error::corrupt(format!(
            "preliminary BWT has {b} empty runs for an alphabet of {}",
            cdict.sigma_next()
        )));
    }
    if !tr.is_exhausted()? {
        return Err(Error::corrupt("transformed BWT not fully consumed"));
    }
    Ok(())
}

/// One induction step in memory.
pub fn induce_level(pbwt: &RunSequence, cdict: &CompressedDict, bwt_next: &RunSequence) -> Result<RunSequence> {
    let ok = |r: Run| Ok(r);
    let mut buckets = size_buckets(bwt_next.iter_runs().map(ok), cdict)?;
    let mut transformed = RunSequence::new();
    induce(bwt_next.iter_runs().map(ok), cdict, &mut buckets, |r| {
        transformed.push(r);
        Ok(())
    })?;
    let mut bwt = RunSequence::with_capacity(pbwt.run_count());
    merge(pbwt.iter_runs().map(ok), cdict, &buckets, transformed.iter_runs().map(ok), |r| {
        bwt.push(r);
        Ok(())
    })?;
    Ok(bwt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{build_parse, process_round, scan_phrases};
    use crate::{ingest, StringCollection};

    fn build(strings: &[&str]) -> (RunSequence, crate::SymbolMap) {
        let c = StringCollection::from_strs(strings).unwrap();
        let (mut text, map) = ingest(&c, b'$').unwrap();
        let mut rounds = Vec::new();
        while !text.is_final() {
            let mut table = scan_phrases(&text);
            let round = process_round(&mut table).unwrap();
            text = build_parse(&text, &table, &round.cdict).unwrap();
            rounds.push(round);
        }
        let mut bwt = base_bwt(&text).unwrap();
        for round in rounds.iter().rev() {
            bwt = induce_level(&round.pbwt, &round.cdict, &bwt).unwrap();
        }
        (bwt, map)
    }

    fn bwt_string(strings: &[&str]) -> String {
        let (bwt, map) = build(strings);
        String::from_utf8(map.decode(&bwt.to_symbols()).unwrap()).unwrap()
    }

    #[test]
    fn base_requires_final_text() {
        let c = StringCollection::from_strs(&["ab"]).unwrap();
        let (text, _) = ingest(&c, b'$').unwrap();
        assert!(matches!(base_bwt(&text), Err(Error::NotFinal { .. })));
    }

    #[test]
    fn base_is_text() {
        let flags = crate::BitVec::from_bools([true, true, true]);
        let t = TextLevel::new(3, vec![3, 1, 2], 3, 3, flags).unwrap();
        assert_eq!(base_bwt(&t).unwrap().to_symbols(), vec![3, 1, 2]);
    }

    fn naive(strings: &[&str]) -> String {
        let c = StringCollection::from_strs(strings).unwrap();
        String::from_utf8(crate::oracle::bcr_bwt_naive(&c, b'$').unwrap()).unwrap()
    }

    #[test]
    fn matches_naive_on_small_collections() {
        let cases: &[&[&str]] = &[
            &["gtacc", "gtaatagtacc"],
            &["a"],
            &["ab", "ab"],
            &["ca", "ba"],
            &["a", "a", "a"],
            &["banana", "ananas", "nab"],
            &["aaaa", "aa", "a"],
            &["abracadabra", "cadabra", "abra", "b"],
        ];
        for &c in cases {
            assert_eq!(bwt_string(c), naive(c), "{c:?}");
        }
    }

    #[test]
    fn merge_detects_short_transformed() {
        let text = {
            let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
            ingest(&c, b'$').unwrap().0
        };
        let mut table = scan_phrases(&text);
        let round = process_round(&mut table).unwrap();
        let buckets = Buckets::default();
        let short = [Ok(Run::new(2, 1))];
        let pbwt = round.pbwt.iter_runs().map(Ok);
        assert!(merge(pbwt, &round.cdict, &buckets, short, |_| Ok(())).is_err());
    }

    #[test]
    fn out_of_range_symbol_rejected() {
        let text = {
            let c = StringCollection::from_strs(&["ab"]).unwrap();
            ingest(&c, b'$').unwrap().0
        };
        let mut table = scan_phrases(&text);
        let round = process_round(&mut table).unwrap();
        let bad = RunSequence::from_symbols([9]);
        assert!(induce_level(&round.pbwt, &round.cdict, &bad).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(512))]
        #[test]
        fn matches_naive(v in proptest::collection::vec(proptest::collection::vec(b'a'..b'd', 1..20), 1..10)) {
            let strs: Vec<&str> = v.iter().map(|s| std::str::from_utf8(s).unwrap()).collect();
            proptest::prop_assert_eq!(bwt_string(&strs), naive(&strs));
        }
    }

    fn example_round() -> crate::parser::Round {
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        let text = ingest(&c, b'$').unwrap().0;
        let mut table = scan_phrases(&text);
        process_round(&mut table).unwrap()
    }

    fn bucket_len(b: &Buckets, s: Symbol) -> u64 {
        b.bucket(s).iter().map(|r| r.len).sum()
    }

    #[test]
    fn one_run_sizes_its_chain() {
        let round = example_round();
        // rank 3 (agta) chains to 4 (gta) and then 5 (ta)
        let upper = || [Ok(Run::new(3, 5))];
        let mut b = size_buckets(upper(), &round.cdict).unwrap();
        assert_eq!(b.capacity(), 2);
        let mut tr = Vec::new();
        induce(upper(), &round.cdict, &mut b, |r| {
            tr.push(r);
            Ok(())
        })
        .unwrap();
        assert_eq!(b.bucket(4), &[Run::new(2, 5)]);
        assert_eq!(b.bucket(5), &[Run::new(4, 5)]);
        assert_eq!(tr, vec![Run::new(5, 5)]);
    }

    #[test]
    fn example_chains() {
        let round = example_round();
        let walk = |s: Symbol| {
            let mut b = size_buckets([Ok(Run::new(s, 1))], &round.cdict).unwrap();
            let mut tr = Vec::new();
            induce([Ok(Run::new(s, 1))], &round.cdict, &mut b, |r| {
                tr.push(r.symbol);
                Ok(())
            })
            .unwrap();
            let writes: Vec<(Symbol, Vec<Run>)> = (1..=5).map(|o| (o, b.bucket(o).to_vec())).filter(|(_, v)| !v.is_empty()).collect();
            (writes, tr[0])
        };
        let (g, a, t, d) = (4, 2, 5, 1);
        // gta: dummy slot in its own bucket, g-run into ta, terminal t
        assert_eq!(walk(4), (vec![(4, vec![Run::new(EMPTY, 1)]), (5, vec![Run::new(g, 1)])], t));
        // acc$: terminal at once
        assert_eq!(walk(2), (vec![], d));
        // aata: a-run into ta, terminal t
        assert_eq!(walk(1), (vec![(5, vec![Run::new(a, 1)])], t));
    }

    #[test]
    fn example_bucket_lengths() {
        let round = example_round();
        let empties: Vec<u64> = round.pbwt.iter_runs().filter(|r| r.symbol == EMPTY).map(|r| r.len).collect();
        assert_eq!(empties, vec![1, 2, 1, 3, 4]);
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        let trace = crate::pipeline::grl_bwt_trace(&c, b'$').unwrap();
        let bwt2 = &trace.bwts[1];
        let mut b = size_buckets(bwt2.iter_runs().map(Ok), &round.cdict).unwrap();
        let mut tr = RunSequence::new();
        induce(bwt2.iter_runs().map(Ok), &round.cdict, &mut b, |r| {
            tr.push(r);
            Ok(())
        })
        .unwrap();
        // only the ranks with V set own buckets, and they fill their empty entries exactly
        for s in 1..=3 {
            assert!(b.bucket(s).is_empty());
        }
        assert_eq!(bucket_len(&b, 4), 3);
        assert_eq!(bucket_len(&b, 5), 4);
        // ta never occurs in the parse: its bucket has no dummy slot
        assert!(b.bucket(5).iter().all(|r| r.symbol != EMPTY));
        assert_eq!(tr.total(), bwt2.total());
    }

    #[test]
    fn merge_copies_transformed_for_unset_ranks() {
        // an alphabet with V unset everywhere copies `transformed` straight through
        let cdict = CompressedDict {
            pairs: vec![
                crate::parser::Pair {
                    left: EMPTY,
                    next: Next::Terminal(1),
                };
                1
            ],
            proper_suffix: crate::BitVec::from_bools([false]),
            suffix_of_t: crate::BitVec::from_bools([true]),
        };
        let pbwt = [Ok(Run::new(3, 1)), Ok(Run::new(EMPTY, 2))];
        let mut out = Vec::new();
        merge(pbwt, &cdict, &Buckets::default(), [Ok(Run::new(1, 2))], |r| {
            out.push(r);
            Ok(())
        })
        .unwrap();
        assert_eq!(out, vec![Run::new(3, 1), Run::new(1, 2)]);
    }
}
