//! Input generators shared by the benchmarks.

use grlbwt::StringCollection;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Uniform strings over the first `sigma` lowercase letters.
pub fn random_collection(seed: u64, strings: usize, len: usize, sigma: u8) -> StringCollection {
    let mut rng = StdRng::seed_from_u64(seed);
    let strings = (0..strings)
        .map(|_| (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect())
        .collect();
    StringCollection::new(strings).expect("non-empty strings")
}

/// `copies` variants of one random string, each with `mutations` point edits.
pub fn repetitive_collection(seed: u64, copies: usize, len: usize, mutations: usize) -> StringCollection {
    let mut rng = StdRng::seed_from_u64(seed);
    let base: Vec<u8> = (0..len).map(|_| b"acgt"[rng.gen_range(0..4)]).collect();
    let strings = (0..copies)
        .map(|_| {
            let mut s = base.clone();
            for _ in 0..mutations {
                let i = rng.gen_range(0..len);
                s[i] = b"acgt"[rng.gen_range(0..4)];
            }
            s
        })
        .collect();
    StringCollection::new(strings).expect("non-empty strings")
}
