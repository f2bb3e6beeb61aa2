//! Time series, order-preserving patterns and the rank computations shared by
//! the matcher, the candidate generators and the miners.
//!
//! All positions exposed by this module are 1-based.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordered sequence of finite measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos + 1));
        }
        if values.len() > i32::MAX as usize {
            return Err(Error::SeriesTooLong(values.len()));
        }
        Ok(TimeSeries { name: name.into(), values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `len` values as a new series (clamped to the series length).
    pub fn prefix(&self, len: usize) -> TimeSeries {
        let len = len.clamp(1, self.values.len());
        TimeSeries { name: self.name.clone(), values: self.values[..len].to_vec() }
    }
}

/// An order-preserving pattern: a permutation of `1..=m` with `m >= 2`.
///
/// Patterns order first by length and then lexicographically, so sorted
/// collections list short patterns first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        if ranks.len() < 2 {
            return Err(Error::InvalidPattern(format!("length {} is below 2", ranks.len())));
        }
        if !is_permutation(&ranks) {
            return Err(Error::InvalidPattern(format!("{ranks:?} is not a permutation of 1..={}", ranks.len())));
        }
        Ok(Pattern(ranks))
    }

    /// Callers guarantee that `ranks` is a permutation of length >= 2.
    pub(crate) fn from_ranks_unchecked(ranks: Vec<u32>) -> Self {
        debug_assert!(ranks.len() >= 2 && is_permutation(&ranks), "{ranks:?}");
        Pattern(ranks)
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Relative order of the first `m - 1` ranks, or `None` for `m = 2`
    /// where it would be the length-1 order.
    pub fn prefix_order(&self) -> Option<Pattern> {
        (self.len() > 2).then(|| Pattern(rank_distinct(&self.0[..self.len() - 1])))
    }

    /// Relative order of the last `m - 1` ranks, or `None` for `m = 2`.
    pub fn suffix_order(&self) -> Option<Pattern> {
        (self.len() > 2).then(|| Pattern(rank_distinct(&self.0[1..])))
    }

    pub fn ordered_table(&self) -> OrderedTable {
        let mut index = vec![0u32; self.len()];
        for (pos, &rank) in self.0.iter().enumerate() {
            index[rank as usize - 1] = pos as u32 + 1;
        }
        OrderedTable { index }
    }

    pub fn into_ranks(self) -> Vec<u32> {
        self.0
    }
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders as dash-separated ranks, e.g. `3-4-1-2`.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ranks = s
            .trim()
            .split('-')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidPattern(format!("'{s}' is not a dash-separated rank list")))
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(ranks)
    }
}

impl TryFrom<Vec<u32>> for Pattern {
    type Error = Error;

    fn try_from(ranks: Vec<u32>) -> Result<Self> {
        Pattern::new(ranks)
    }
}

/// Inverse permutation of a pattern: `index[i]` is the 1-based position that
/// holds rank `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedTable {
    index: Vec<u32>,
}

impl OrderedTable {
    pub fn index(&self) -> &[u32] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }
}

/// Start positions (1-based, strictly increasing) of the windows whose
/// relative order equals a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceList {
    starts: Vec<usize>,
    pattern_length: usize,
}

impl OccurrenceList {
    pub(crate) fn new(starts: Vec<usize>, pattern_length: usize) -> Self {
        debug_assert!(starts.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(starts.first().is_none_or(|&s| s >= 1));
        OccurrenceList { starts, pattern_length }
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn pattern_length(&self) -> usize {
        self.pattern_length
    }

    pub fn support(&self) -> usize {
        self.starts.len()
    }

    /// Every occurrence as its full index tuple `<l1, l1 + 1, ..., l1 + m - 1>`.
    pub fn index_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.starts.iter().map(move |&l1| (l1..l1 + self.pattern_length).collect())
    }
}

/// Relative order of a window of measurements: each entry is replaced by one
/// plus the number of strictly smaller entries.
pub fn relative_order(values: &[f64]) -> Result<Pattern> {
    if values.len() < 2 {
        return Err(Error::TooShort(values.len()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u32; values.len()];
    for (rank, pair) in order.iter().enumerate() {
        ranks[*pair] = rank as u32 + 1;
    }
    if let Some(w) = order.windows(2).find(|w| values[w[0]] == values[w[1]]) {
        let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
        return Err(Error::TiedValues(a + 1, b + 1));
    }
    Ok(Pattern(ranks))
}

pub fn ordered_table(p: &Pattern) -> OrderedTable {
    p.ordered_table()
}

/// Relative order of a slice that is known to hold distinct values.
pub(crate) fn rank_distinct<T: Ord + Copy>(values: &[T]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| values[i]);
    let mut ranks = vec![0u32; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank as u32 + 1;
    }
    ranks
}

fn is_permutation(ranks: &[u32]) -> bool {
    let mut seen = vec![false; ranks.len()];
    ranks.iter().all(|&r| {
        let slot = (r as usize).checked_sub(1).and_then(|i| seen.get_mut(i));
        match slot {
            Some(s) if !*s => {
                *s = true;
                true
            }
            _ => false,
        }
    })
}
