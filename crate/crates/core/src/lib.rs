//! BCR BWT construction for string collections.
//!
//! The collection is parsed recursively with induced suffix sorting. Each
//! round keeps its dictionary in compressed form and its preliminary BWT
//! run-length encoded; the final BWT is induced back level by level.

pub mod alphabet;
pub mod bits;
pub mod error;
pub mod inducer;
pub mod io;
pub mod iss;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod rle;

/// A symbol of some level's alphabet. 0 is the dummy, 1 is the separator.
pub type Symbol = u32;

pub use alphabet::{expand_symbol, expand_to_level1, ingest, StringCollection, SymbolMap, TextLevel, SENTINEL};
pub use bits::BitVec;
pub use error::{Error, Result};
pub use inducer::{base_bwt, induce, induce_level, merge, size_buckets, Buckets};
pub use io::{load_rlbwt, read_collection, read_rlbwt, save_rlbwt, write_rlbwt, InputFormat, RlbwtFile};
pub use iss::{build_generalized_sa, classify, GeneralizedSA, SymbolType};
pub use oracle::{bcr_bwt_naive, invert_bcr};
pub use parser::{
    build_dictionary, build_parse, build_pbwt, compress_dictionary, expand_dictionary, rank_phrases, scan_phrases,
    CompressedDict, Dictionary, Next, Pair, Pbwt, PhraseTable, RankedDictionary,
};
pub use pipeline::{bcr_bwt, grl_bwt, grl_bwt_trace, Config, LevelStats, Report, Trace};
pub use rle::{Run, RunSequence, EMPTY};
