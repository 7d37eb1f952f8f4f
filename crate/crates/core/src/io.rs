//! Input parsing, the run-length BWT file and the temporary round files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::alphabet::{StringCollection, SymbolMap, SENTINEL};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::parser::{CompressedDict, Next, Pair};
use crate::rle::{Run, RunSequence, EMPTY};
use crate::Symbol;

/// How strings are laid out in an input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// One string per line (`\n` or `\r\n`).
    Lines,
    /// FASTA records; headers are dropped and sequence lines joined.
    Fasta,
    /// Strings delimited by the separator byte.
    Raw,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(InputFormat::Lines),
            "fasta" => Ok(InputFormat::Fasta),
            "raw" => Ok(InputFormat::Raw),
            other => Err(Error::Format(format!("unknown input format `{other}`"))),
        }
    }
}

fn input_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Input {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Splits `data` into strings. `path` is only used in error messages.
pub fn parse_collection(data: &[u8], format: InputFormat, separator: u8, path: &Path) -> Result<StringCollection> {
    let mut strings = Vec::new();
    match format {
        InputFormat::Lines => {
            let body = data.strip_suffix(b"\n").unwrap_or(data);
            if body.is_empty() {
                return Err(Error::EmptyCollection);
            }
            for (i, line) in body.split(|&b| b == b'\n').enumerate() {
                let line = line.strip_suffix(b"\r").unwrap_or(line);
                if line.is_empty() {
                    return Err(input_err(path, i + 1, "empty string"));
                }
                if let Some(off) = line.iter().position(|&b| b == separator) {
                    return Err(input_err(
                        path,
                        i + 1,
                        format!("separator byte {separator:#04x} at column {}", off + 1),
                    ));
                }
                strings.push(line.to_vec());
            }
        }
        InputFormat::Fasta => {
            let mut current: Option<(usize, Vec<u8>)> = None;
            for (i, line) in data.split(|&b| b == b'\n').enumerate() {
                let line = line.strip_suffix(b"\r").unwrap_or(line);
                if line.first() == Some(&b'>') {
                    if let Some((start, seq)) = current.take() {
                        if seq.is_empty() {
                            return Err(input_err(path, start, "record without sequence"));
                        }
                        strings.push(seq);
                    }
                    current = Some((i + 1, Vec::new()));
                } else if !line.is_empty() {
                    let Some((_, seq)) = current.as_mut() else {
                        return Err(input_err(path, i + 1, "sequence data before the first header"));
                    };
                    if let Some(off) = line.iter().position(|&b| b == separator) {
                        return Err(input_err(
                            path,
                            i + 1,
                            format!("separator byte {separator:#04x} at column {}", off + 1),
                        ));
                    }
                    seq.extend_from_slice(line);
                }
            }
            if let Some((start, seq)) = current {
                if seq.is_empty() {
                    return Err(input_err(path, start, "record without sequence"));
                }
                strings.push(seq);
            }
        }
        InputFormat::Raw => {
            let body = data.strip_suffix(&[separator]).unwrap_or(data);
            if body.is_empty() {
                return Err(Error::EmptyCollection);
            }
            for (i, s) in body.split(|&b| b == separator).enumerate() {
                if s.is_empty() {
                    return Err(input_err(path, i + 1, "empty string"));
                }
                strings.push(s.to_vec());
            }
        }
    }
    StringCollection::new(strings)
}

pub fn read_collection(path: &Path, format: InputFormat, separator: u8) -> Result<StringCollection> {
    let data = std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_collection(&data, format, separator, path)
}

/// Writes the strings one per line (or separator-terminated for `Raw`).
pub fn write_collection(mut w: impl Write, strings: &[Vec<u8>], format: InputFormat, separator: u8) -> io::Result<()> {
    for (i, s) in strings.iter().enumerate() {
        match format {
            InputFormat::Lines => {
                w.write_all(s)?;
                w.write_all(b"\n")?;
            }
            InputFormat::Fasta => {
                writeln!(w, ">{}", i + 1)?;
                w.write_all(s)?;
                w.write_all(b"\n")?;
            }
            InputFormat::Raw => {
                w.write_all(s)?;
                w.write_all(&[separator])?;
            }
        }
    }
    w.flush()
}

fn read_varint(r: &mut impl BufRead) -> Result<Option<u64>> {
    match r.fill_buf() {
        Ok([]) => return Ok(None),
        Ok(_) => {}
        Err(e) => return Err(Error::io("reading run stream", e)),
    }
    leb128::read::unsigned(r).map(Some).map_err(|e| match e {
        leb128::read::Error::IoError(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
            Error::Format("truncated varint".into())
        }
        leb128::read::Error::IoError(e) => Error::io("reading run stream", e),
        leb128::read::Error::Overflow => Error::Format("varint overflows 64 bits".into()),
    })
}

fn read_varint_required(r: &mut impl BufRead) -> Result<u64> {
    read_varint(r)?.ok_or_else(|| Error::Format("truncated run stream".into()))
}

/// Serializes runs as (symbol, length) varint pairs, merging equal
/// neighbours except [`EMPTY`].
pub struct RunWriter<W: Write> {
    inner: W,
    pending: Option<Run>,
    runs: u64,
    total: u64,
}

impl<W: Write> RunWriter<W> {
    pub fn new(inner: W) -> Self {
        RunWriter {
            inner,
            pending: None,
            runs: 0,
            total: 0,
        }
    }

    fn write_run(&mut self, r: Run) -> Result<()> {
        let ctx = |e| Error::io("writing run stream", e);
        leb128::write::unsigned(&mut self.inner, r.symbol as u64).map_err(ctx)?;
        leb128::write::unsigned(&mut self.inner, r.len).map_err(ctx)?;
        self.runs += 1;
        Ok(())
    }

    pub fn push(&mut self, r: Run) -> Result<()> {
        if r.len == 0 {
            return Err(Error::ZeroLengthRun);
        }
        self.total += r.len;
        match &mut self.pending {
            Some(p) if p.symbol == r.symbol && r.symbol != EMPTY => p.len += r.len,
            _ => {
                if let Some(p) = self.pending.replace(r) {
                    self.write_run(p)?;
                }
            }
        }
        Ok(())
    }

    /// Flushes and returns (runs written, symbols written, writer).
    pub fn finish(mut self) -> Result<(u64, u64, W)> {
        if let Some(p) = self.pending.take() {
            self.write_run(p)?;
        }
        self.inner.flush().map_err(|e| Error::io("flushing run stream", e))?;
        Ok((self.runs, self.total, self.inner))
    }
}

/// Reads runs written by [`RunWriter`] until end of input.
pub struct RunReader<R: BufRead> {
    inner: R,
    done: bool,
}

impl<R: BufRead> RunReader<R> {
    pub fn new(inner: R) -> Self {
        RunReader { inner, done: false }
    }

    fn next_run(&mut self) -> Result<Option<Run>> {
        let Some(sym) = read_varint(&mut self.inner)? else {
            return Ok(None);
        };
        let len = read_varint_required(&mut self.inner)?;
        if len == 0 {
            return Err(Error::ZeroLengthRun);
        }
        let symbol = Symbol::try_from(sym).map_err(|_| Error::Format(format!("symbol {sym} exceeds 32 bits")))?;
        Ok(Some(Run::new(symbol, len)))
    }
}

impl<R: BufRead> Iterator for RunReader<R> {
    type Item = Result<Run>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_run() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Little-endian `u32` symbols, in file order.
pub struct SymbolReader<R: BufRead> {
    inner: R,
    done: bool,
}

impl<R: BufRead> SymbolReader<R> {
    pub fn new(inner: R) -> Self {
        SymbolReader { inner, done: false }
    }

    fn next_symbol(&mut self) -> Result<Option<Symbol>> {
        let buf = self.inner.fill_buf().map_err(|e| Error::io("reading symbol file", e))?;
        if buf.len() >= 4 {
            let s = u32::from_le_bytes(buf[..4].try_into().expect("four bytes"));
            self.inner.consume(4);
            return Ok(Some(s));
        }
        if buf.is_empty() {
            return Ok(None);
        }
        // a symbol straddling the buffer boundary
        let mut word = [0u8; 4];
        self.inner.read_exact(&mut word).map_err(|e| {
            if e.kind() == io::ErrorKind::UnexpectedEof {
                Error::Format("symbol file length is not a multiple of 4".into())
            } else {
                Error::io("reading symbol file", e)
            }
        })?;
        Ok(Some(u32::from_le_bytes(word)))
    }
}

impl<R: BufRead> Iterator for SymbolReader<R> {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let r = self.next_symbol();
        if !matches!(r, Ok(Some(_))) {
            self.done = true;
        }
        r.transpose()
    }
}

pub fn write_symbol(w: &mut impl Write, s: Symbol) -> Result<()> {
    w.write_all(&s.to_le_bytes()).map_err(|e| Error::io("writing symbol file", e))
}

pub fn open_buffered(path: &Path, buffer_bytes: usize) -> Result<BufReader<File>> {
    let f = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    Ok(BufReader::with_capacity(buffer_bytes, f))
}

pub fn create_buffered(path: &Path, buffer_bytes: usize) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::with_capacity(buffer_bytes, f))
}

const RLBWT_MAGIC: &[u8; 4] = b"GRLB";
const RLBWT_VERSION: u8 = 1;

/// A run-length BWT together with what is needed to decode it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlbwtFile {
    pub k: u64,
    pub map: SymbolMap,
    pub runs: RunSequence,
}

impl RlbwtFile {
    /// The BWT as bytes, with the separator for the sentinel.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.map.decode(&self.runs.to_symbols())
    }
}

fn put_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get<const N: usize>(r: &mut impl Read, what: &str) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            Error::Format(format!("truncated {what}"))
        } else {
            Error::io(format!("reading {what}"), e)
        }
    })?;
    Ok(b)
}

fn get_u64(r: &mut impl Read, what: &str) -> Result<u64> {
    Ok(u64::from_le_bytes(get::<8>(r, what)?))
}

fn get_u32(r: &mut impl Read, what: &str) -> Result<u32> {
    Ok(u32::from_le_bytes(get::<4>(r, what)?))
}

pub fn write_rlbwt(w: impl Write, file: &RlbwtFile) -> Result<()> {
    let mut w = w;
    let ctx = |e| Error::io("writing BWT file", e);
    w.write_all(RLBWT_MAGIC).map_err(ctx)?;
    w.write_all(&[RLBWT_VERSION, 0]).map_err(ctx)?;
    put_u64(&mut w, file.k).map_err(ctx)?;
    put_u64(&mut w, file.map.sigma() as u64).map_err(ctx)?;
    put_u64(&mut w, file.runs.run_count() as u64).map_err(ctx)?;
    put_u32(&mut w, file.map.sigma()).map_err(ctx)?;
    w.write_all(&[file.map.separator()]).map_err(ctx)?;
    put_u32(&mut w, SENTINEL).map_err(ctx)?;
    for (b, s) in file.map.pairs() {
        w.write_all(&[b]).map_err(ctx)?;
        put_u32(&mut w, s).map_err(ctx)?;
    }
    let mut rw = RunWriter::new(&mut w);
    for r in file.runs.iter_runs() {
        rw.push(r)?;
    }
    let (_, _, w) = rw.finish()?;
    w.flush().map_err(ctx)
}

pub fn read_rlbwt(r: impl BufRead) -> Result<RlbwtFile> {
    let mut r = r;
    if &get::<4>(&mut r, "header")? != RLBWT_MAGIC {
        return Err(Error::Format("not a run-length BWT file (bad magic)".into()));
    }
    let [version, _flags] = get::<2>(&mut r, "header")?;
    if version != RLBWT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let k = get_u64(&mut r, "header")?;
    let sigma = get_u64(&mut r, "header")?;
    let run_count = get_u64(&mut r, "header")?;
    let n_pairs = get_u32(&mut r, "symbol map")? as u64;
    if n_pairs != sigma || sigma == 0 {
        return Err(Error::Format(format!("symbol map has {n_pairs} entries for σ = {sigma}")));
    }
    let mut separator = None;
    let mut bytes = Vec::new();
    for i in 0..n_pairs {
        let [b] = get::<1>(&mut r, "symbol map")?;
        let s = get_u32(&mut r, "symbol map")?;
        if i == 0 {
            if s != SENTINEL {
                return Err(Error::Format("first map entry must be the separator".into()));
            }
            separator = Some(b);
        } else {
            if s as u64 != i + 1 {
                return Err(Error::Format(format!("map entry {i} has symbol {s}")));
            }
            bytes.push((b, s));
        }
    }
    let separator = separator.expect("σ ≥ 1");
    let map = SymbolMap::from_bytes(bytes.iter().map(|&(b, _)| b), separator)?;
    if map.pairs().ne(bytes.iter().copied()) {
        return Err(Error::Format("symbol map is not order preserving".into()));
    }
    let mut runs = RunSequence::with_capacity(run_count as usize);
    let mut seps = 0u64;
    for run in RunReader::new(&mut r) {
        let run = run?;
        if run.symbol == 0 || run.symbol as u64 > sigma {
            return Err(Error::SymbolOutOfRange {
                symbol: run.symbol as u64,
                sigma,
            });
        }
        if run.symbol == SENTINEL {
            seps += run.len;
        }
        runs.push(run);
    }
    if runs.run_count() as u64 != run_count {
        return Err(Error::Format(format!(
            "header announces {run_count} runs but the file holds {}",
            runs.run_count()
        )));
    }
    if seps != k {
        return Err(Error::Format(format!("{seps} separators for {k} strings")));
    }
    Ok(RlbwtFile { k, map, runs })
}

pub fn save_rlbwt(path: &Path, file: &RlbwtFile) -> Result<()> {
    let w = create_buffered(path, 1 << 16)?;
    write_rlbwt(w, file)
}

pub fn load_rlbwt(path: &Path) -> Result<RlbwtFile> {
    read_rlbwt(open_buffered(path, 1 << 16)?)
}

fn write_bits(w: &mut impl Write, bits: &BitVec) -> io::Result<()> {
    put_u64(w, bits.len() as u64)?;
    for &word in bits.words() {
        put_u64(w, word)?;
    }
    Ok(())
}

fn read_bits(r: &mut impl Read) -> Result<BitVec> {
    let len = get_u64(r, "bit vector")? as usize;
    let words = (0..len.div_ceil(64))
        .map(|_| get_u64(r, "bit vector"))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVec::from_words(words, len))
}

/// Raw little-endian layout of a compressed dictionary.
pub fn write_cdict(w: impl Write, cdict: &CompressedDict) -> Result<()> {
    let mut w = w;
    let ctx = |e| Error::io("writing dictionary", e);
    put_u64(&mut w, cdict.pairs.len() as u64).map_err(ctx)?;
    for p in &cdict.pairs {
        put_u32(&mut w, p.left).map_err(ctx)?;
        let tagged = match p.next {
            Next::Rank(r) => (r as u64) << 1,
            Next::Terminal(t) => ((t as u64) << 1) | 1,
        };
        put_u64(&mut w, tagged).map_err(ctx)?;
    }
    write_bits(&mut w, &cdict.proper_suffix).map_err(ctx)?;
    write_bits(&mut w, &cdict.suffix_of_t).map_err(ctx)?;
    w.flush().map_err(ctx)
}

pub fn read_cdict(r: impl Read) -> Result<CompressedDict> {
    let mut r = r;
    let n = get_u64(&mut r, "dictionary")? as usize;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let left = get_u32(&mut r, "dictionary")?;
        let tagged = get_u64(&mut r, "dictionary")?;
        let v = Symbol::try_from(tagged >> 1).map_err(|_| Error::corrupt("dictionary entry exceeds 32 bits"))?;
        let next = if tagged & 1 == 1 { Next::Terminal(v) } else { Next::Rank(v) };
        pairs.push(Pair { left, next });
    }
    let proper_suffix = read_bits(&mut r)?;
    let suffix_of_t = read_bits(&mut r)?;
    if proper_suffix.len() != n || suffix_of_t.len() != n {
        return Err(Error::corrupt("dictionary bit vectors disagree with the pair count"));
    }
    Ok(CompressedDict {
        pairs,
        proper_suffix,
        suffix_of_t,
    })
}

/// Names of the temporary files of one build.
#[derive(Clone, Debug)]
pub struct TempLayout {
    pub dir: PathBuf,
}

impl TempLayout {
    pub fn file(&self, round: usize, kind: &str) -> PathBuf {
        self.dir.join(format!("round{round}.{kind}"))
    }
}

/// Reads a whole symbol file.
pub fn read_symbols(path: &Path, buffer_bytes: usize) -> Result<Vec<Symbol>> {
    SymbolReader::new(open_buffered(path, buffer_bytes)?).collect()
}
