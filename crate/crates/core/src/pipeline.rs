//! End-to-end construction: parsing rounds until every string is a single
//! symbol, then induction back to level 1.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{debug, info};

use crate::alphabet::{ingest, StringCollection, SymbolMap, TextLevel, SENTINEL};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::inducer::{base_bwt, induce, induce_level, merge, size_buckets};
use crate::io::{
    create_buffered, open_buffered, read_cdict, read_symbols, write_cdict, write_symbol, RlbwtFile, RunReader,
    RunWriter, SymbolReader, TempLayout,
};
use crate::parser::{build_parse, build_parse_rev, process_round, scan_phrases, scan_phrases_rev, Round};
use crate::rle::{Run, RunSequence};

/// Environment variable naming the default directory for temporary files.
pub const TMPDIR_ENV: &str = "GRLBWT_TMPDIR";

#[derive(Clone, Debug)]
pub struct Config {
    /// Parent of the per-build temporary directory; defaults to
    /// `$GRLBWT_TMPDIR`, then the system temporary directory.
    pub tmp_dir: Option<PathBuf>,
    /// Buffer size for every temporary file stream.
    pub buffer_bytes: usize,
    /// Leave the temporary directory in place after the build.
    pub keep_temp: bool,
    pub separator: u8,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tmp_dir: None,
            buffer_bytes: 8 << 20,
            keep_temp: false,
            separator: b'$',
        }
    }
}

impl Config {
    fn tmp_parent(&self) -> PathBuf {
        self.tmp_dir
            .clone()
            .or_else(|| std::env::var_os(TMPDIR_ENV).map(PathBuf::from))
            .unwrap_or_else(std::env::temp_dir)
    }
}

/// Per-level numbers of one build.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    /// |T^i|
    pub text_len: u64,
    /// σ^i
    pub sigma: u64,
    /// Phrases and symbols of the dictionary before expansion (0 on the last level).
    pub phrases: u64,
    pub dict_symbols: u64,
    pub pbwt_runs: u64,
    pub bwt_runs: u64,
    pub chain_steps: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub k: u64,
    /// Total length including one separator per string.
    pub n: u64,
    /// Number of text levels (the last one has one symbol per string).
    pub h: usize,
    pub levels: Vec<LevelStats>,
    /// Temporary directory, when it was kept.
    pub temp_dir: Option<PathBuf>,
}

impl Report {
    pub fn bwt_runs(&self) -> u64 {
        self.levels.first().map(|l| l.bwt_runs).unwrap_or(0)
    }
}

fn stream(path: &Path, buffer_bytes: usize) -> Result<RunReader<std::io::BufReader<fs::File>>> {
    Ok(RunReader::new(open_buffered(path, buffer_bytes)?))
}

fn remove(path: &Path, keep: bool) -> Result<()> {
    if keep {
        return Ok(());
    }
    fs::remove_file(path).map_err(|e| Error::io(format!("removing {}", path.display()), e))
}

/// Builds the BCR BWT of `collection`, keeping round data in temporary files.
pub fn grl_bwt(collection: &StringCollection, config: &Config) -> Result<(RlbwtFile, Report)> {
    let parent = config.tmp_parent();
    fs::create_dir_all(&parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    let tmp = tempfile::Builder::new()
        .prefix("grlbwt-")
        .tempdir_in(&parent)
        .map_err(|e| Error::io(format!("creating a temporary directory in {}", parent.display()), e))?;
    let layout = TempLayout {
        dir: tmp.path().to_path_buf(),
    };
    let result = build_on_disk(collection, config, &layout);
    let kept = if config.keep_temp {
        Some(tmp.keep())
    } else {
        tmp.close()
            .map_err(|e| Error::io(format!("removing {}", layout.dir.display()), e))?;
        None
    };
    let (file, mut report) = result?;
    report.temp_dir = kept;
    Ok((file, report))
}

fn build_on_disk(collection: &StringCollection, config: &Config, layout: &TempLayout) -> Result<(RlbwtFile, Report)> {
    let buf = config.buffer_bytes.max(4096);
    let keep = config.keep_temp;
    let map = SymbolMap::from_collection(collection, config.separator)?;
    let k = collection.k() as u64;
    let n = collection.text_len();

    // level 1, stored right to left
    {
        let mut w = create_buffered(&layout.file(1, "text"), buf)?;
        for s in collection.strings().iter().rev() {
            write_symbol(&mut w, SENTINEL)?;
            for &b in s.iter().rev() {
                write_symbol(&mut w, map.symbol(b).expect("byte collected into the map"))?;
            }
        }
        w.flush().map_err(|e| Error::io("writing level 1 text", e))?;
    }
    let mut flags = BitVec::new(map.sigma() as usize);
    flags.set(0, true);
    let mut sigma = map.sigma() as u64;
    let mut text_len = n;
    let mut levels = Vec::new();
    let mut level = 1;
    while text_len != k {
        let text_path = layout.file(level, "text");
        let started = Instant::now();
        let mut table = scan_phrases_rev(SymbolReader::new(open_buffered(&text_path, buf)?), &flags)?;
        let scanned = started.elapsed();
        let round = process_round(&mut table)?;
        let processed = started.elapsed();
        let mut pw = RunWriter::new(create_buffered(&layout.file(level, "pbwt"), buf)?);
        for r in round.pbwt.iter_runs() {
            pw.push(r)?;
        }
        pw.finish()?;
        write_cdict(create_buffered(&layout.file(level, "cdict"), buf)?, &round.cdict)?;

        let mut next_len = 0u64;
        let mut w = create_buffered(&layout.file(level + 1, "text"), buf)?;
        build_parse_rev(SymbolReader::new(open_buffered(&text_path, buf)?), &flags, &table, |r| {
            next_len += 1;
            write_symbol(&mut w, r)
        })?;
        w.flush().map_err(|e| Error::io("writing parse", e))?;
        drop(w);
        remove(&text_path, keep)?;

        debug!(
            "level {level}: n={text_len} sigma={sigma} phrases={} dict={} pbwt runs={} scan {:?} round {:?} total {:?}",
            round.dict_phrases,
            round.dict_symbols,
            round.pbwt.run_count(),
            scanned,
            processed - scanned,
            started.elapsed()
        );
        levels.push(LevelStats {
            level,
            text_len,
            sigma,
            phrases: round.dict_phrases as u64,
            dict_symbols: round.dict_symbols as u64,
            pbwt_runs: round.pbwt.run_count() as u64,
            ..Default::default()
        });
        if next_len >= text_len {
            return Err(Error::corrupt(format!("level {level} did not shrink the text")));
        }
        flags = round.cdict.suffix_of_t.clone();
        sigma = round.cdict.sigma_next() as u64;
        text_len = next_len;
        level += 1;
    }
    let h = level;
    levels.push(LevelStats {
        level: h,
        text_len,
        sigma,
        ..Default::default()
    });

    // base case: the reversed final text, read back in string order
    {
        let mut last = read_symbols(&layout.file(h, "text"), buf)?;
        last.reverse();
        let mut w = RunWriter::new(create_buffered(&layout.file(h, "bwt"), buf)?);
        for s in last {
            w.push(Run::new(s, 1))?;
        }
        let (runs, _, _) = w.finish()?;
        levels[h - 1].bwt_runs = runs;
        remove(&layout.file(h, "text"), keep)?;
    }

    for i in (1..h).rev() {
        let started = Instant::now();
        let upper = layout.file(i + 1, "bwt");
        let cdict = read_cdict(open_buffered(&layout.file(i, "cdict"), buf)?)?;
        let mut buckets = size_buckets(stream(&upper, buf)?, &cdict)?;
        let tpath = layout.file(i, "transformed");
        let mut tw = RunWriter::new(create_buffered(&tpath, buf)?);
        let steps = induce(stream(&upper, buf)?, &cdict, &mut buckets, |r| tw.push(r))?;
        tw.finish()?;
        let mut bw = RunWriter::new(create_buffered(&layout.file(i, "bwt"), buf)?);
        merge(stream(&layout.file(i, "pbwt"), buf)?, &cdict, &buckets, stream(&tpath, buf)?, |r| bw.push(r))?;
        let (runs, total, _) = bw.finish()?;
        if total != levels[i - 1].text_len {
            return Err(Error::corrupt(format!(
                "level {i} BWT has {total} entries for a text of {}",
                levels[i - 1].text_len
            )));
        }
        levels[i - 1].bwt_runs = runs;
        levels[i - 1].chain_steps = steps;
        for kind in ["transformed", "pbwt", "cdict"] {
            remove(&layout.file(i, kind), keep)?;
        }
        remove(&upper, keep)?;
        debug!("level {i}: bwt runs={runs} chain steps={steps} induction {:?}", started.elapsed());
    }

    let runs = stream(&layout.file(1, "bwt"), buf)?.collect::<Result<Vec<_>>>()?;
    let runs = RunSequence::from_runs(runs)?;
    remove(&layout.file(1, "bwt"), keep)?;
    info!("built BWT of {n} symbols in {} runs, {h} levels", runs.run_count());
    let report = Report {
        k,
        n,
        h,
        levels,
        temp_dir: None,
    };
    Ok((RlbwtFile { k, map, runs }, report))
}

/// Every intermediate of an in-memory build.
#[derive(Clone, Debug)]
pub struct Trace {
    pub map: SymbolMap,
    /// `texts[i]` is the text of level `i + 1`.
    pub texts: Vec<TextLevel>,
    /// `rounds[i]` parses `texts[i]` into `texts[i + 1]`.
    pub rounds: Vec<Round>,
    /// `bwts[i]` is the BWT of `texts[i]`.
    pub bwts: Vec<RunSequence>,
}

impl Trace {
    pub fn h(&self) -> usize {
        self.texts.len()
    }

    pub fn bwt(&self) -> &RunSequence {
        &self.bwts[0]
    }
}

/// The same construction with everything in memory.
pub fn grl_bwt_trace(collection: &StringCollection, separator: u8) -> Result<Trace> {
    let (mut text, map) = ingest(collection, separator)?;
    let mut texts = Vec::new();
    let mut rounds = Vec::new();
    while !text.is_final() {
        let mut table = scan_phrases(&text);
        let round = process_round(&mut table)?;
        let next = build_parse(&text, &table, &round.cdict)?;
        if next.len() >= text.len() {
            return Err(Error::corrupt(format!("level {} did not shrink the text", text.level)));
        }
        texts.push(std::mem::replace(&mut text, next));
        rounds.push(round);
    }
    let mut bwts = vec![base_bwt(&text)?];
    texts.push(text);
    for round in rounds.iter().rev() {
        let upper = bwts.last().expect("base BWT present");
        let bwt = induce_level(&round.pbwt, &round.cdict, upper)?;
        bwts.push(bwt);
    }
    bwts.reverse();
    Ok(Trace {
        map,
        texts,
        rounds,
        bwts,
    })
}

/// In-memory build returning the BWT as bytes.
pub fn bcr_bwt(collection: &StringCollection, separator: u8) -> Result<Vec<u8>> {
    let trace = grl_bwt_trace(collection, separator)?;
    trace.map.decode(&trace.bwt().to_symbols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bcr_bwt_naive;

    fn config(dir: &Path) -> Config {
        Config {
            tmp_dir: Some(dir.to_path_buf()),
            buffer_bytes: 64,
            ..Config::default()
        }
    }

    #[test]
    fn disk_matches_memory_and_naive() {
        let dir = tempfile::tempdir().unwrap();
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc", "acgt", "a", "gtacc"]).unwrap();
        let (file, report) = grl_bwt(&c, &config(dir.path())).unwrap();
        let naive = bcr_bwt_naive(&c, b'$').unwrap();
        assert_eq!(file.to_bytes().unwrap(), naive);
        assert_eq!(bcr_bwt(&c, b'$').unwrap(), naive);
        assert_eq!(report.n, naive.len() as u64);
        assert_eq!(report.levels.len(), report.h);
        assert_eq!(report.levels[0].text_len, report.n);
        assert_eq!(report.levels[report.h - 1].text_len, 5);
        assert_eq!(report.bwt_runs(), file.runs.run_count() as u64);
        // nothing left behind
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn example_has_four_levels() {
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        let trace = grl_bwt_trace(&c, b'$').unwrap();
        assert_eq!(trace.h(), 4);
        let lens: Vec<usize> = trace.texts.iter().map(|t| t.len()).collect();
        assert_eq!(lens, vec![18, 6, 3, 2]);
        assert_eq!(trace.bwts[2].to_symbols(), vec![3, 4, 1]);
        assert_eq!(trace.bwts[3].to_symbols(), vec![2, 1]);
    }

    #[test]
    fn keep_temp_leaves_round_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = StringCollection::from_strs(&["abab", "baba"]).unwrap();
        let cfg = Config {
            keep_temp: true,
            ..config(dir.path())
        };
        let (_, report) = grl_bwt(&c, &cfg).unwrap();
        let kept = report.temp_dir.expect("kept directory");
        assert!(kept.join("round1.pbwt").exists());
        assert!(kept.join("round1.bwt").exists());
    }

    #[test]
    fn symbols_expand_to_their_strings() {
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        let trace = grl_bwt_trace(&c, b'$').unwrap();
        let stack: Vec<_> = trace.rounds.iter().map(|r| r.ranked.dict.clone()).collect();
        let expand = |level, s| crate::alphabet::expand_symbol(&stack, &trace.map, level, s).unwrap();
        assert_eq!(expand(2, 2), b"acc$");
        assert_eq!(expand(2, 5), b"ta");
        let last = &trace.texts[trace.h() - 1];
        assert_eq!(expand(trace.h(), last.symbols[0]), b"gtacc$");
        assert_eq!(expand(trace.h(), last.symbols[1]), b"gtaatagtacc$");
        // the second string spans two level 3 symbols that share one level 2 symbol
        let t3 = &trace.texts[2].symbols;
        assert_eq!(t3.len(), 3);
        assert_eq!(expand(3, t3[0]), b"gtacc$");
        assert!(b"gtaatagtacc$".starts_with(&expand(3, t3[1])));
        assert!(b"gtaatagtacc$".ends_with(&expand(3, t3[2])));
    }

    #[test]
    fn repetitive_input_has_few_runs() {
        let s = "gattacagattacaccatg";
        let strs = vec![s; 100];
        let c = StringCollection::from_strs(&strs).unwrap();
        let trace = grl_bwt_trace(&c, b'$').unwrap();
        let naive = RunSequence::from_symbols(trace.map.encode(&bcr_bwt_naive(&c, b'$').unwrap()).unwrap());
        assert_eq!(trace.bwt().run_count(), naive.run_count());
        assert!(trace.bwt().run_count() * 10 < c.text_len() as usize);
    }

    #[test]
    fn every_level_shrinks() {
        let c = StringCollection::from_strs(&["abracadabra", "abracadabra", "cadabra", "z"]).unwrap();
        let trace = grl_bwt_trace(&c, b'$').unwrap();
        assert!(trace.texts.windows(2).all(|w| w[1].len() < w[0].len()));
        let n = c.text_len() as f64;
        assert!(trace.h() as f64 <= n.log2().ceil() + 2.0);
    }
}
