//! Brute-force reference BWT and its inverse.

use crate::alphabet::StringCollection;
use crate::error::{Error, Result};

#[inline]
fn key(b: u8, sep: u8) -> u16 {
    if b == sep {
        0
    } else {
        b as u16 + 1
    }
}

/// BCR BWT by sorting every suffix of every `T_u sep`, breaking ties
/// between equal suffixes by string index.
pub fn bcr_bwt_naive(collection: &StringCollection, sep: u8) -> Result<Vec<u8>> {
    let mut texts: Vec<Vec<u16>> = Vec::with_capacity(collection.k());
    for (u, s) in collection.strings().iter().enumerate() {
        if let Some(off) = s.iter().position(|&b| b == sep) {
            return Err(Error::SeparatorInString {
                index: u,
                offset: off,
                separator: sep,
            });
        }
        let mut t: Vec<u16> = s.iter().map(|&b| key(b, sep)).collect();
        t.push(0);
        texts.push(t);
    }
    let mut rows: Vec<(usize, usize)> = texts
        .iter()
        .enumerate()
        .flat_map(|(u, t)| (0..t.len()).map(move |j| (u, j)))
        .collect();
    rows.sort_by(|&(u, i), &(v, j)| texts[u][i..].cmp(&texts[v][j..]).then(u.cmp(&v)));
    Ok(rows
        .into_iter()
        .map(|(u, j)| if j == 0 { sep } else { collection.strings()[u][j - 1] })
        .collect())
}

/// Recovers the strings from a BCR BWT by LF walks from the first `k` rows.
pub fn invert_bcr(bwt: &[u8], sep: u8) -> Result<Vec<Vec<u8>>> {
    let mut counts = [0u64; 257];
    for &b in bwt {
        counts[key(b, sep) as usize] += 1;
    }
    let k = counts[0] as usize;
    if k == 0 {
        return Err(Error::MalformedBwt("no separator".into()));
    }
    let mut c = [0u64; 257];
    let mut acc = 0;
    for (s, &n) in counts.iter().enumerate() {
        c[s] = acc;
        acc += n;
    }
    let mut seen = [0u64; 257];
    let lf: Vec<usize> = bwt
        .iter()
        .map(|&b| {
            let s = key(b, sep) as usize;
            let r = c[s] + seen[s];
            seen[s] += 1;
            r as usize
        })
        .collect();
    let mut out = Vec::with_capacity(k);
    for u in 0..k {
        let mut row = u;
        let mut rev = Vec::new();
        loop {
            let b = bwt[row];
            if b == sep {
                break;
            }
            if rev.len() >= bwt.len() {
                return Err(Error::MalformedBwt(format!("string {u} does not terminate")));
            }
            rev.push(b);
            row = lf[row];
        }
        rev.reverse();
        out.push(rev);
    }
    let total: usize = out.iter().map(|s| s.len() + 1).sum();
    if total != bwt.len() {
        return Err(Error::MalformedBwt(format!(
            "walks cover {total} rows out of {}",
            bwt.len()
        )));
    }
    Ok(out)
}
