//! Support counting: filtration on the up/down encoding followed by strict
//! verification against the pattern's ordered table.

use crate::bitparallel::{self, MAX_MASK_LEN};
use crate::error::{Error, Result};
use crate::model::{relative_order, OccurrenceList, OrderedTable, Pattern, TimeSeries};

/// Up/down encoding of adjacent pairs: `1` when the next element is larger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bit strings hold only 0 and 1");
        BitString(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Candidate-window search used before verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    /// SBNDM with a 2-gram first read.
    Sbndm2,
    /// Classic BNDM.
    Bndm,
    /// No filtration: every window is verified.
    None,
}

pub fn encode_pattern(p: &Pattern) -> BitString {
    BitString(p.ranks().windows(2).map(|w| (w[0] < w[1]) as u8).collect())
}

/// Ties encode as `0`; strict verification rejects any window they admit.
pub fn encode_series(s: &TimeSeries) -> BitString {
    BitString(s.values().windows(2).map(|w| (w[0] < w[1]) as u8).collect())
}

/// 1-based starts of every (overlapping) occurrence of `pat` in `text`.
pub fn filter_candidates(text: &BitString, pat: &BitString) -> Result<Vec<usize>> {
    filter_with(Filter::Sbndm2, text, pat)
}

pub(crate) fn filter_with(filter: Filter, text: &BitString, pat: &BitString) -> Result<Vec<usize>> {
    let (t, p) = (text.bits(), pat.bits());
    if p.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let hits = match filter {
        Filter::Sbndm2 if (2..=MAX_MASK_LEN).contains(&p.len()) => bitparallel::sbndm2(t, p),
        Filter::Bndm if p.len() <= MAX_MASK_LEN => bitparallel::bndm(t, p),
        Filter::None => (0..(t.len() + 1).saturating_sub(p.len())).collect(),
        _ => bitparallel::linear(t, p),
    };
    Ok(hits.into_iter().map(|i| i + 1).collect())
}

/// Whether the window starting at 1-based `l1` orders like the table's
/// pattern. Comparisons are strict, so windows with ties never verify.
pub fn verify_occurrence(s: &TimeSeries, table: &OrderedTable, l1: usize) -> Result<bool> {
    let m = table.len();
    if l1 == 0 || l1 + m - 1 > s.len() {
        return Err(Error::OutOfBounds { start: l1, len: m, n: s.len() });
    }
    Ok(verify_window(&s.values()[l1 - 1..l1 - 1 + m], table))
}

#[inline]
fn verify_window(window: &[f64], table: &OrderedTable) -> bool {
    table.index().windows(2).all(|w| window[w[0] as usize - 1] < window[w[1] as usize - 1])
}

/// A series together with its up/down encoding, so that many patterns can be
/// counted against one series without re-encoding it.
#[derive(Debug, Clone)]
pub struct EncodedSeries<'a> {
    series: &'a TimeSeries,
    bits: BitString,
}

impl<'a> EncodedSeries<'a> {
    pub fn new(series: &'a TimeSeries) -> Self {
        EncodedSeries { series, bits: encode_series(series) }
    }

    pub fn series(&self) -> &TimeSeries {
        self.series
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// Filtration with `filter`, then verification of every proposed window.
    /// Patterns longer than the series have no occurrences.
    pub fn occurrences(&self, p: &Pattern, filter: Filter) -> OccurrenceList {
        let m = p.len();
        if m > self.series.len() {
            return OccurrenceList::new(Vec::new(), m);
        }
        let table = p.ordered_table();
        let values = self.series.values();
        let candidates =
            filter_with(filter, &self.bits, &encode_pattern(p)).expect("patterns encode to at least one bit");
        let starts = candidates.into_iter().filter(|&l1| verify_window(&values[l1 - 1..l1 - 1 + m], &table)).collect();
        OccurrenceList::new(starts, m)
    }

    pub fn support(&self, p: &Pattern, filter: Filter) -> usize {
        self.occurrences(p, filter).support()
    }
}

/// Filtration and verification support counting.
pub fn fvp_support(s: &TimeSeries, p: &Pattern) -> OccurrenceList {
    EncodedSeries::new(s).occurrences(p, Filter::Sbndm2)
}

/// Reference support counter: computes the relative order of every window
/// and compares it with `p`.
pub fn naive_support(s: &TimeSeries, p: &Pattern) -> OccurrenceList {
    let m = p.len();
    let starts = if m > s.len() {
        Vec::new()
    } else {
        s.values()
            .windows(m)
            .enumerate()
            .filter(|(_, w)| relative_order(w).is_ok_and(|order| order == *p))
            .map(|(i, _)| i + 1)
            .collect()
    };
    OccurrenceList::new(starts, m)
}
