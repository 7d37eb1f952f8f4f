//! Run-length encoded symbol sequences.
//!
//! The same type holds partial BWTs (where symbol [`EMPTY`] marks an entry
//! that the dictionary alone cannot decide), complete BWTs, and the
//! induction buckets.

use crate::error::{Error, Result};
use crate::Symbol;

/// Marker for undecided pBWT entries and induction placeholders.
pub const EMPTY: Symbol = 0;

/// A maximal run of `len` copies of `symbol`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub symbol: Symbol,
    pub len: u64,
}

impl Run {
    #[inline]
    pub fn new(symbol: Symbol, len: u64) -> Self {
        Run { symbol, len }
    }
}

/// Sequence of maximal runs. Adjacent runs carry distinct symbols, except
/// that [`EMPTY`] runs are never merged: each stands for one undecided entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSequence {
    runs: Vec<Run>,
    total: u64,
}

impl RunSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(runs: usize) -> Self {
        RunSequence {
            runs: Vec::with_capacity(runs),
            total: 0,
        }
    }

    /// Appends `len` copies of `symbol`, extending the last run when possible.
    pub fn append_run(&mut self, symbol: Symbol, len: u64) -> Result<()> {
        if len == 0 {
            return Err(Error::ZeroLengthRun);
        }
        self.push(Run::new(symbol, len));
        Ok(())
    }

    #[inline]
    pub(crate) fn push(&mut self, run: Run) {
        debug_assert!(run.len > 0);
        self.total += run.len;
        match self.runs.last_mut() {
            Some(last) if last.symbol == run.symbol && run.symbol != EMPTY => last.len += run.len,
            _ => self.runs.push(run),
        }
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        let mut seq = RunSequence::new();
        for s in symbols {
            seq.push(Run::new(s, 1));
        }
        seq
    }

    /// Builds a sequence from arbitrary runs, merging equal neighbours.
    pub fn from_runs<I: IntoIterator<Item = Run>>(runs: I) -> Result<Self> {
        let mut seq = RunSequence::new();
        for r in runs {
            seq.append_run(r.symbol, r.len)?;
        }
        Ok(seq)
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn iter_runs(&self) -> impl Iterator<Item = Run> + '_ {
        self.runs.iter().copied()
    }

    pub fn iter_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.symbol, r.len as usize))
    }

    pub fn to_symbols(&self) -> Vec<Symbol> {
        self.iter_symbols().collect()
    }

    /// Sum of run lengths.
    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }
}

impl<'a> IntoIterator for &'a RunSequence {
    type Item = &'a Run;
    type IntoIter = std::slice::Iter<'a, Run>;
    fn into_iter(self) -> Self::IntoIter {
        self.runs.iter()
    }
}

/// Pulls `len` symbols out of a run stream, splitting runs as needed.
pub(crate) struct RunCursor<I> {
    inner: I,
    pending: Option<Run>,
}

impl<I: Iterator<Item = Result<Run>>> RunCursor<I> {
    pub(crate) fn new(inner: I) -> Self {
        RunCursor {
            inner,
            pending: None,
        }
    }

    /// Takes exactly `len` symbols, handing each piece to `out`.
    pub(crate) fn take(&mut self, mut len: u64, mut out: impl FnMut(Run) -> Result<()>) -> Result<()> {
        while len > 0 {
            let run = match self.pending.take() {
                Some(r) => r,
                None => match self.inner.next() {
                    Some(r) => r?,
                    None => {
                        return Err(Error::corrupt(format!(
                            "run stream exhausted with {len} symbols still requested"
                        )))
                    }
                },
            };
            if run.len > len {
                out(Run::new(run.symbol, len))?;
                self.pending = Some(Run::new(run.symbol, run.len - len));
                len = 0;
            } else {
                len -= run.len;
                out(run)?;
            }
        }
        Ok(())
    }

    /// True when every symbol has been consumed.
    pub(crate) fn is_exhausted(&mut self) -> Result<bool> {
        if self.pending.is_some() {
            return Ok(false);
        }
        match self.inner.next() {
            None => Ok(true),
            Some(r) => {
                self.pending = Some(r?);
                Ok(false)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn append_extends_last_run() {
        let mut s = RunSequence::from_runs([Run::new(2, 3)]).unwrap();
        s.append_run(2, 1).unwrap();
        assert_eq!(s.runs(), &[Run::new(2, 4)]);
        assert_eq!(s.total(), 4);
    }

    #[test]
    fn append_to_empty() {
        let mut s = RunSequence::new();
        s.append_run(3, 2).unwrap();
        assert_eq!(s.runs(), &[Run::new(3, 2)]);
    }

    #[test]
    fn alternation_never_merges() {
        let mut s = RunSequence::new();
        s.append_run(2, 1).unwrap();
        s.append_run(3, 1).unwrap();
        s.append_run(2, 1).unwrap();
        assert_eq!(s.run_count(), 3);
        assert_eq!(s.total(), 3);
    }

    #[test]
    fn zero_length_is_rejected() {
        let mut s = RunSequence::new();
        assert!(matches!(s.append_run(2, 0), Err(Error::ZeroLengthRun)));
    }

    #[test]
    fn decode_runs() {
        let s = RunSequence::from_runs([Run::new(2, 2), Run::new(3, 1)]).unwrap();
        assert_eq!(s.to_symbols(), vec![2, 2, 3]);
        let e = RunSequence::from_runs([Run::new(EMPTY, 3)]).unwrap();
        assert_eq!(e.to_symbols(), vec![EMPTY; 3]);
    }

    #[test]
    fn cursor_splits_runs() {
        let s = RunSequence::from_symbols([1, 1, 1, 2, 2]);
        let mut c = RunCursor::new(s.iter_runs().map(Ok));
        let mut got = vec![];
        c.take(2, |r| {
            got.push(r);
            Ok(())
        })
        .unwrap();
        c.take(2, |r| {
            got.push(r);
            Ok(())
        })
        .unwrap();
        assert_eq!(got, vec![Run::new(1, 2), Run::new(1, 1), Run::new(2, 1)]);
        assert!(!c.is_exhausted().unwrap());
        assert!(c.take(2, |_| Ok(())).is_err());
    }

    #[test]
    fn empty_runs_stay_separate() {
        let mut s = RunSequence::new();
        s.append_run(EMPTY, 2).unwrap();
        s.append_run(EMPTY, 1).unwrap();
        s.append_run(3, 1).unwrap();
        s.append_run(3, 4).unwrap();
        assert_eq!(s.runs(), &[Run::new(EMPTY, 2), Run::new(EMPTY, 1), Run::new(3, 5)]);
        assert_eq!(s.total(), 8);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(v in proptest::collection::vec(1u32..4, 0..200)) {
            let s = RunSequence::from_symbols(v.iter().copied());
            prop_assert_eq!(s.to_symbols(), v.clone());
            let again = RunSequence::from_symbols(s.iter_symbols());
            prop_assert_eq!(&again, &s);
            let changes = v.windows(2).filter(|w| w[0] != w[1]).count();
            let expected = if v.is_empty() { 0 } else { changes + 1 };
            prop_assert_eq!(s.run_count(), expected);
            prop_assert!(s.runs().windows(2).all(|w| w[0].symbol != w[1].symbol));
        }
    }
}
