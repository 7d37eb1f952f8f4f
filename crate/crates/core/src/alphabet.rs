//! Input collections, dense alphabets and per-round texts.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::parser::Dictionary;
use crate::Symbol;

/// The sentinel `$` that closes every string.
pub const SENTINEL: Symbol = 1;

/// An ordered, non-empty collection of non-empty byte strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringCollection {
    strings: Vec<Vec<u8>>,
}

impl StringCollection {
    pub fn new(strings: Vec<Vec<u8>>) -> Result<Self> {
        if strings.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if let Some(index) = strings.iter().position(|s| s.is_empty()) {
            return Err(Error::EmptyString { index });
        }
        Ok(StringCollection { strings })
    }

    pub fn from_strs<S: AsRef<[u8]>>(strings: &[S]) -> Result<Self> {
        Self::new(strings.iter().map(|s| s.as_ref().to_vec()).collect())
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn into_strings(self) -> Vec<Vec<u8>> {
        self.strings
    }

    /// Number of strings.
    pub fn k(&self) -> usize {
        self.strings.len()
    }

    /// Length of the level-1 text, one sentinel per string included.
    pub fn text_len(&self) -> u64 {
        self.strings.iter().map(|s| s.len() as u64 + 1).sum()
    }
}

/// Order-preserving map from input bytes to the dense symbols `[2, σ]`.
///
/// Symbol 1 is the sentinel and symbol 0 is reserved for empty/dummy entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMap {
    byte_to_symbol: [Symbol; 256],
    symbol_to_byte: Vec<u8>,
    separator: u8,
}

impl SymbolMap {
    /// Builds the map over the bytes occurring in `collection`.
    pub fn from_collection(collection: &StringCollection, separator: u8) -> Result<Self> {
        let mut seen = [false; 256];
        for (index, s) in collection.strings().iter().enumerate() {
            for (offset, &b) in s.iter().enumerate() {
                if b == separator {
                    return Err(Error::SeparatorInString {
                        index,
                        offset,
                        separator,
                    });
                }
                seen[b as usize] = true;
            }
        }
        let bytes = (0u8..=255).filter(|&b| seen[b as usize]);
        Self::from_bytes(bytes, separator)
    }

    /// Builds the map from an explicit byte list (sorted internally).
    pub fn from_bytes<I: IntoIterator<Item = u8>>(bytes: I, separator: u8) -> Result<Self> {
        let mut bytes: Vec<u8> = bytes.into_iter().collect();
        bytes.sort_unstable();
        bytes.dedup();
        if bytes.contains(&separator) {
            return Err(Error::Format(format!(
                "separator byte {separator:#04x} is also an alphabet byte"
            )));
        }
        let mut byte_to_symbol = [0; 256];
        let mut symbol_to_byte = vec![0, separator];
        for b in bytes {
            byte_to_symbol[b as usize] = symbol_to_byte.len() as Symbol;
            symbol_to_byte.push(b);
        }
        Ok(SymbolMap {
            byte_to_symbol,
            symbol_to_byte,
            separator,
        })
    }

    /// σ, the largest symbol (the sentinel included).
    pub fn sigma(&self) -> Symbol {
        (self.symbol_to_byte.len() - 1) as Symbol
    }

    pub fn separator(&self) -> u8 {
        self.separator
    }

    #[inline]
    pub fn symbol(&self, byte: u8) -> Option<Symbol> {
        if byte == self.separator {
            return Some(SENTINEL);
        }
        match self.byte_to_symbol[byte as usize] {
            0 => None,
            s => Some(s),
        }
    }

    /// Byte for a symbol; the sentinel decodes to the separator.
    #[inline]
    pub fn byte(&self, symbol: Symbol) -> Option<u8> {
        if symbol == 0 {
            return None;
        }
        self.symbol_to_byte.get(symbol as usize).copied()
    }

    /// (byte, symbol) pairs for every non-sentinel symbol, in symbol order.
    pub fn pairs(&self) -> impl Iterator<Item = (u8, Symbol)> + '_ {
        self.symbol_to_byte
            .iter()
            .enumerate()
            .skip(2)
            .map(|(s, &b)| (b, s as Symbol))
    }

    pub fn encode(&self, bytes: &[u8]) -> Result<Vec<Symbol>> {
        bytes
            .iter()
            .map(|&b| {
                self.symbol(b).ok_or(Error::SymbolOutOfRange {
                    symbol: b as u64,
                    sigma: self.sigma() as u64,
                })
            })
            .collect()
    }

    pub fn decode(&self, symbols: &[Symbol]) -> Result<Vec<u8>> {
        symbols
            .iter()
            .map(|&s| {
                self.byte(s).ok_or(Error::SymbolOutOfRange {
                    symbol: s as u64,
                    sigma: self.sigma() as u64,
                })
            })
            .collect()
    }
}

/// The text of one parsing round together with its suffix-symbol marks.
///
/// `suffix_flags` has one bit per symbol (bit `s - 1` for symbol `s`) and is
/// set for symbols whose expansion ends a string of the collection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextLevel {
    pub level: usize,
    pub symbols: Vec<Symbol>,
    pub sigma: Symbol,
    pub k: usize,
    pub suffix_flags: BitVec,
}

impl TextLevel {
    pub fn new(level: usize, symbols: Vec<Symbol>, sigma: Symbol, k: usize, suffix_flags: BitVec) -> Result<Self> {
        if suffix_flags.len() != sigma as usize {
            return Err(Error::Format(format!(
                "suffix flag vector has {} bits for an alphabet of {sigma}",
                suffix_flags.len()
            )));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0 || s > sigma) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad as u64,
                sigma: sigma as u64,
            });
        }
        Ok(TextLevel {
            level,
            symbols,
            sigma,
            k,
            suffix_flags,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn is_suffix_symbol(&self, s: Symbol) -> bool {
        is_marked(&self.suffix_flags, s)
    }

    /// True once every string has been reduced to a single symbol.
    pub fn is_final(&self) -> bool {
        self.len() == self.k
    }
}

#[inline]
pub(crate) fn is_marked(flags: &BitVec, s: Symbol) -> bool {
    s >= 1 && flags.get(s as usize - 1)
}

/// Maps a collection to the level-1 text `T_1$T_2$...T_k$`.
pub fn ingest(collection: &StringCollection, separator: u8) -> Result<(TextLevel, SymbolMap)> {
    let map = SymbolMap::from_collection(collection, separator)?;
    let mut symbols = Vec::with_capacity(collection.text_len() as usize);
    for s in collection.strings() {
        symbols.extend(s.iter().map(|&b| map.byte_to_symbol[b as usize]));
        symbols.push(SENTINEL);
    }
    let sigma = map.sigma();
    let mut flags = BitVec::new(sigma as usize);
    flags.set(0, true);
    let text = TextLevel::new(1, symbols, sigma, collection.k(), flags)?;
    Ok((text, map))
}

/// Expands a level-`level` symbol down to level 1.
///
/// `stack[i]` is the rank-ordered dictionary of round `i + 1`. Consecutive
/// phrases share one boundary symbol, which is kept once.
pub fn expand_to_level1(stack: &[Dictionary], level: usize, symbol: Symbol) -> Result<Vec<Symbol>> {
    if level == 0 || level > stack.len() + 1 {
        return Err(Error::InvalidDictionary(format!(
            "level {level} needs {} lower dictionaries, {} given",
            level.saturating_sub(1),
            stack.len()
        )));
    }
    let mut seq = vec![symbol];
    for dict in stack[..level - 1].iter().rev() {
        let mut next = Vec::new();
        for (i, &s) in seq.iter().enumerate() {
            if s == 0 || s as usize > dict.phrase_count() {
                return Err(Error::SymbolOutOfRange {
                    symbol: s as u64,
                    sigma: dict.phrase_count() as u64,
                });
            }
            let phrase = dict.phrase(s as usize - 1);
            next.extend_from_slice(if i == 0 { phrase } else { &phrase[1..] });
        }
        seq = next;
    }
    Ok(seq)
}

/// Expands a symbol to the bytes it covers; the sentinel renders as the separator.
pub fn expand_symbol(stack: &[Dictionary], map: &SymbolMap, level: usize, symbol: Symbol) -> Result<Vec<u8>> {
    if level == 1 && (symbol == 0 || symbol > map.sigma()) {
        return Err(Error::SymbolOutOfRange {
            symbol: symbol as u64,
            sigma: map.sigma() as u64,
        });
    }
    map.decode(&expand_to_level1(stack, level, symbol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_collection_sizes() {
        let c = StringCollection::from_strs(&["gtacc", "gtaatagtacc"]).unwrap();
        let (t, map) = ingest(&c, b'$').unwrap();
        assert_eq!(t.len(), 18);
        assert_eq!(t.k, 2);
        assert_eq!(t.sigma, 5);
        assert_eq!(map.symbol(b'a'), Some(2));
        assert_eq!(map.symbol(b't'), Some(5));
    }

    #[test]
    fn single_letter() {
        let c = StringCollection::from_strs(&["a"]).unwrap();
        let (t, _) = ingest(&c, 0).unwrap();
        assert_eq!(t.symbols, vec![2, 1]);
        assert_eq!(t.suffix_flags.iter().collect::<Vec<_>>(), vec![true, false]);
    }

    #[test]
    fn small_collection() {
        let c = StringCollection::from_strs(&["ab", "aab"]).unwrap();
        let (t, _) = ingest(&c, 0).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t.sigma, 3);
    }

    #[test]
    fn separator_inside_string() {
        let c = StringCollection::from_strs(&["ab", "a$b"]).unwrap();
        match ingest(&c, b'$') {
            Err(Error::SeparatorInString { index, offset, .. }) => assert_eq!((index, offset), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(StringCollection::new(vec![]), Err(Error::EmptyCollection)));
        assert!(matches!(
            StringCollection::new(vec![b"a".to_vec(), vec![]]),
            Err(Error::EmptyString { index: 1 })
        ));
    }

    #[test]
    fn decode_inverts_encode() {
        let c = StringCollection::from_strs(&["hello", "world", "x"]).unwrap();
        let (t, map) = ingest(&c, b'\n').unwrap();
        let bytes = map.decode(&t.symbols).unwrap();
        assert_eq!(bytes, b"hello\nworld\nx\n");
        let strings: Vec<Vec<u8>> = bytes
            .split(|&b| b == b'\n')
            .filter(|s| !s.is_empty())
            .map(|s| s.to_vec())
            .collect();
        assert_eq!(StringCollection::new(strings).unwrap(), c);
    }

    #[test]
    fn level1_expansion_is_identity() {
        let c = StringCollection::from_strs(&["ab"]).unwrap();
        let (_, map) = ingest(&c, b'$').unwrap();
        assert_eq!(expand_symbol(&[], &map, 1, 2).unwrap(), b"a");
        assert!(expand_symbol(&[], &map, 1, 9).is_err());
    }
}
