//! Candidate generation for level `m + 1` from frequent patterns of length `m`.
//!
//! Fusion joins two patterns whose suffix order and prefix order coincide;
//! enumeration appends every possible last rank to a single pattern.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{rank_distinct, Pattern};

/// Outcome of fusing two same-length patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fusion {
    /// `suffixorder(p) != prefixorder(q)`.
    None,
    /// Orders agree but the raw suffix and prefix differ.
    General(Pattern),
    /// The raw suffix of `p` equals the raw prefix of `q`, so `q` is the left
    /// rotation of `p` and the new last rank may sit on either side of `p1`.
    Special(Pattern, Pattern),
}

impl Fusion {
    pub fn candidates(&self) -> Vec<Pattern> {
        match self {
            Fusion::None => Vec::new(),
            Fusion::General(x) => vec![x.clone()],
            Fusion::Special(y, k) => vec![y.clone(), k.clone()],
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Fusion::None)
    }
}

pub fn fuse(p: &Pattern, q: &Pattern) -> Result<Fusion> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    let (p, q) = (p.ranks(), q.ranks());
    let m = p.len();
    let suffix = &p[1..];
    let prefix = &q[..m - 1];
    if rank_distinct(suffix) != rank_distinct(prefix) {
        return Ok(Fusion::None);
    }

    let p1 = p[0];
    let qm = q[m - 1];
    if suffix == prefix {
        let middle = suffix.iter().map(|&u| if u > p1 { u + 1 } else { u });
        let mut y = Vec::with_capacity(m + 1);
        y.push(p1 + 1);
        y.extend(middle.clone());
        y.push(p1);
        let mut k = Vec::with_capacity(m + 1);
        k.push(p1);
        k.extend(middle);
        k.push(p1 + 1);
        return Ok(Fusion::Special(Pattern::from_ranks_unchecked(y), Pattern::from_ranks_unchecked(k)));
    }

    // Equal orders over different raw values imply p1 != qm: with p1 == qm both
    // slices would hold the same value set in the same order.
    let mut x = Vec::with_capacity(m + 1);
    match p1.cmp(&qm) {
        std::cmp::Ordering::Less => {
            x.push(p1);
            x.extend(suffix.iter().map(|&u| if u > qm { u + 1 } else { u }));
            x.push(qm + 1);
        }
        std::cmp::Ordering::Greater => {
            x.push(p1 + 1);
            x.extend(prefix.iter().map(|&v| if v > p1 { v + 1 } else { v }));
            x.push(qm);
        }
        std::cmp::Ordering::Equal => unreachable!("general-case fusion with p1 == qm: {p:?} {q:?}"),
    }
    Ok(Fusion::General(Pattern::from_ranks_unchecked(x)))
}

/// The `m + 1` extensions of `p`: the `i`-th appends rank `i` and shifts every
/// existing rank `>= i` up by one.
pub fn enumerate_extensions(p: &Pattern) -> Vec<Pattern> {
    let m = p.len() as u32;
    (1..=m + 1)
        .map(|i| {
            let mut t: Vec<u32> = p.ranks().iter().map(|&r| if r >= i { r + 1 } else { r }).collect();
            t.push(i);
            Pattern::from_ranks_unchecked(t)
        })
        .collect()
}

/// A fused candidate along with the indices of the two patterns it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FusedCandidate {
    pub pattern: Pattern,
    pub left: usize,
    pub right: usize,
}

/// Fuses every ordered pair of `level` (self-pairs included). Pairs are found
/// through an index on prefix order instead of testing all `|F|^2` pairs.
/// Output is sorted by pattern.
pub(crate) fn fuse_level(level: &[Pattern]) -> Vec<FusedCandidate> {
    let Some(first) = level.first() else {
        return Vec::new();
    };
    let m = first.len();
    debug_assert!(level.iter().all(|p| p.len() == m));

    let mut by_prefix: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (i, q) in level.iter().enumerate() {
        by_prefix.entry(rank_distinct(&q.ranks()[..m - 1])).or_default().push(i);
    }
    let mut out = Vec::new();
    for (left, p) in level.iter().enumerate() {
        let Some(partners) = by_prefix.get(&rank_distinct(&p.ranks()[1..])) else {
            continue;
        };
        for &right in partners {
            let fusion = fuse(p, &level[right]).expect("same-length level");
            for pattern in fusion.candidates() {
                out.push(FusedCandidate { pattern, left, right });
            }
        }
    }
    out.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    out.dedup_by(|a, b| a.pattern == b.pattern);
    out
}

/// Deduplicated fusion candidates of a level, in canonical order.
pub fn level_candidates_fusion(level: &[Pattern]) -> Vec<Pattern> {
    fuse_level(level).into_iter().map(|c| c.pattern).collect()
}

/// Deduplicated enumeration candidates of a level, in canonical order.
pub fn level_candidates_enumeration(level: &[Pattern]) -> Vec<Pattern> {
    level.iter().flat_map(enumerate_extensions).collect::<BTreeSet<_>>().into_iter().collect()
}
