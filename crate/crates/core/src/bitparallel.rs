//! Exact search of a binary pattern in a binary text, reporting every
//! (possibly overlapping) match.
//!
//! Texts and patterns are slices of `0`/`1` symbols. Match positions are
//! 0-based here; the matcher converts them to 1-based starts.

const WORD_BITS: usize = u64::BITS as usize;

/// Longest pattern the bit-parallel searchers accept.
pub const MAX_MASK_LEN: usize = WORD_BITS;

/// Per-symbol masks: bit `m - 1 - i` of `masks[c]` is set when `pat[i] == c`.
fn symbol_masks(pat: &[u8]) -> [u64; 2] {
    let m = pat.len();
    let mut masks = [0u64; 2];
    for (i, &c) in pat.iter().enumerate() {
        masks[(c & 1) as usize] |= 1 << (m - 1 - i);
    }
    masks
}

#[inline]
fn mask(masks: &[u64; 2], c: u8) -> u64 {
    masks[(c & 1) as usize]
}

/// Simplified BNDM reading a 2-gram at the end of every window before the
/// backward scan. Requires `2 <= pat.len() <= 64`.
pub fn sbndm2(text: &[u8], pat: &[u8]) -> Vec<usize> {
    let m = pat.len();
    assert!((2..=MAX_MASK_LEN).contains(&m), "sbndm2 needs a pattern of 2..=64 symbols, got {m}");
    let mut hits = Vec::new();
    if m > text.len() {
        return hits;
    }
    let masks = symbol_masks(pat);
    let mut pos = 0;
    while pos + m <= text.len() {
        let end = pos + m - 1;
        let mut d = (mask(&masks, text[end]) << 1) & mask(&masks, text[end - 1]);
        if d == 0 {
            // the trailing 2-gram is not a factor of the pattern
            pos += m - 1;
            continue;
        }
        let mut j = m - 2;
        while d != 0 && j > 0 {
            j -= 1;
            d = (d << 1) & mask(&masks, text[pos + j]);
        }
        if d != 0 {
            // a length-m factor of a length-m pattern is the pattern itself
            hits.push(pos);
            pos += 1;
        } else {
            pos += j + 1;
        }
    }
    hits
}

/// Classic BNDM with longest-prefix shift tracking. Requires
/// `1 <= pat.len() <= 64`.
pub fn bndm(text: &[u8], pat: &[u8]) -> Vec<usize> {
    let m = pat.len();
    assert!((1..=MAX_MASK_LEN).contains(&m), "bndm needs a pattern of 1..=64 symbols, got {m}");
    let mut hits = Vec::new();
    if m > text.len() {
        return hits;
    }
    let masks = symbol_masks(pat);
    let high = 1u64 << (m - 1);
    let mut pos = 0;
    while pos + m <= text.len() {
        let mut j = m;
        let mut last = m;
        let mut d = u64::MAX;
        while d != 0 {
            d &= mask(&masks, text[pos + j - 1]);
            j -= 1;
            if d & high != 0 {
                if j > 0 {
                    last = j;
                } else {
                    hits.push(pos);
                    break;
                }
            }
            d <<= 1;
        }
        pos += last;
    }
    hits
}

/// Direct comparison of every window.
pub fn linear(text: &[u8], pat: &[u8]) -> Vec<usize> {
    if pat.is_empty() || pat.len() > text.len() {
        return Vec::new();
    }
    text.windows(pat.len()).enumerate().filter(|(_, w)| *w == pat).map(|(i, _)| i).collect()
}
