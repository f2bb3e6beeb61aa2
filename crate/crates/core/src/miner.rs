//! Level-wise mining of frequent and maximal order-preserving patterns.
//!
//! Mining seeds level 2 with `(1,2)` and `(2,1)`, counts the support of every
//! candidate, keeps the frequent ones, and generates the next level from them
//! until a level has no frequent pattern. Support counting within a level runs
//! in parallel on the current rayon pool; results do not depend on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::info;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion::{enumerate_extensions, fuse_level, level_candidates_enumeration};
use crate::matcher::{EncodedSeries, Filter};
use crate::model::{Pattern, TimeSeries};

/// Mining algorithm: candidate generation strategy plus support counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Pattern fusion with SBNDM2 filtration and verification.
    FusionFvp,
    /// Pattern fusion with BNDM filtration.
    FusionBndm,
    /// Pattern fusion, every window verified.
    FusionNoFilter,
    /// Enumeration of extensions, depth-first.
    EnumDfs,
    /// Enumeration of extensions, breadth-first.
    EnumBfs,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::FusionFvp, Variant::FusionBndm, Variant::FusionNoFilter, Variant::EnumDfs, Variant::EnumBfs];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::FusionFvp => "fusion_fvp",
            Variant::FusionBndm => "fusion_bndm",
            Variant::FusionNoFilter => "fusion_nofilter",
            Variant::EnumDfs => "enum_dfs",
            Variant::EnumBfs => "enum_bfs",
        }
    }

    fn filter(self) -> Filter {
        match self {
            Variant::FusionBndm => Filter::Bndm,
            Variant::FusionNoFilter => Filter::None,
            Variant::FusionFvp | Variant::EnumDfs | Variant::EnumBfs => Filter::Sbndm2,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Variant::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| {
            format!(
                "unknown variant '{s}', expected one of fusion_fvp, fusion_bndm, fusion_nofilter, enum_dfs, enum_bfs"
            )
        })
    }
}

/// Per-length counters of one mining run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub length: usize,
    pub candidates: usize,
    pub frequent: usize,
    /// Time from the start of the run to the end of this level. Not tracked
    /// for depth-first mining, which interleaves lengths.
    pub elapsed: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct MiningResult {
    pub frequent: BTreeMap<Pattern, usize>,
    /// Deduplicated candidates whose support was counted, seeds included.
    pub candidates_generated: usize,
    pub elapsed: Duration,
    pub variant: Variant,
    pub minsup: usize,
    pub levels: Vec<LevelStats>,
}

impl MiningResult {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }

    pub fn longest_length(&self) -> usize {
        self.frequent.keys().map(Pattern::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct MaximalResult {
    pub maximal: BTreeMap<Pattern, usize>,
    pub all_frequent_count: usize,
    /// `(|frequent| - |maximal|) / |frequent|`, zero when nothing is frequent.
    pub compression_rate: f64,
    /// The underlying run over all frequent patterns.
    pub mining: MiningResult,
}

impl MaximalResult {
    /// Compression rate as an exact fraction `(removed, total)`.
    pub fn compression_fraction(&self) -> (usize, usize) {
        (self.all_frequent_count - self.maximal.len(), self.all_frequent_count)
    }
}

/// All frequent patterns of `s` (support >= `minsup`) with pattern fusion and
/// filtration-verification support counting.
pub fn mine_frequent(s: &TimeSeries, minsup: usize) -> Result<MiningResult> {
    mine_variant(s, minsup, Variant::FusionFvp)
}

pub fn mine_variant(s: &TimeSeries, minsup: usize, variant: Variant) -> Result<MiningResult> {
    let miner = Miner::new(s, minsup, variant)?;
    Ok(match variant {
        Variant::FusionFvp | Variant::FusionBndm | Variant::FusionNoFilter => miner.run_fusion().0,
        Variant::EnumBfs => miner.run_enum_bfs(),
        Variant::EnumDfs => miner.run_enum_dfs(),
    })
}

/// Maximal patterns by fusion-parent marking: when a fused candidate turns out
/// frequent, both patterns it was fused from are non-maximal. Every frequent
/// pattern left unmarked is reported.
pub fn mine_maximal(s: &TimeSeries, minsup: usize) -> Result<MaximalResult> {
    let (mining, non_maximal) = Miner::new(s, minsup, Variant::FusionFvp)?.run_fusion();
    let maximal: BTreeMap<Pattern, usize> =
        mining.frequent.iter().filter(|(p, _)| !non_maximal.contains(*p)).map(|(p, &sup)| (p.clone(), sup)).collect();
    let all = mining.frequent.len();
    let compression_rate = compression_rate(all, maximal.len());
    Ok(MaximalResult { maximal, all_frequent_count: all, compression_rate, mining })
}

/// Share of frequent patterns removed by keeping only the maximal ones,
/// `(frequent - maximal) / frequent`; zero when nothing is frequent.
pub fn compression_rate(frequent: usize, maximal: usize) -> f64 {
    if frequent == 0 {
        0.0
    } else {
        frequent.saturating_sub(maximal) as f64 / frequent as f64
    }
}

fn seeds() -> Vec<Pattern> {
    vec![Pattern::from_ranks_unchecked(vec![1, 2]), Pattern::from_ranks_unchecked(vec![2, 1])]
}

struct Miner<'a> {
    encoded: EncodedSeries<'a>,
    minsup: usize,
    variant: Variant,
    start: Instant,
}

impl<'a> Miner<'a> {
    fn new(s: &'a TimeSeries, minsup: usize, variant: Variant) -> Result<Self> {
        if minsup < 1 {
            return Err(Error::InvalidMinsup(minsup));
        }
        if s.len() < 2 {
            return Err(Error::TooShort(s.len()));
        }
        Ok(Miner { encoded: EncodedSeries::new(s), minsup, variant, start: Instant::now() })
    }

    fn supports(&self, candidates: &[Pattern]) -> Vec<usize> {
        let filter = self.variant.filter();
        candidates.par_iter().map(|p| self.encoded.support(p, filter)).collect()
    }

    fn log_level(&self, stats: &LevelStats) {
        info!(
            target: "oppminer::progress",
            "variant={} level={} candidates={} frequent={} elapsed_ms={:.3}",
            self.variant,
            stats.length,
            stats.candidates,
            stats.frequent,
            stats.elapsed.unwrap_or_else(|| self.start.elapsed()).as_secs_f64() * 1e3,
        );
    }

    fn finish(
        &self,
        frequent: BTreeMap<Pattern, usize>,
        candidates_generated: usize,
        levels: Vec<LevelStats>,
    ) -> MiningResult {
        MiningResult {
            frequent,
            candidates_generated,
            elapsed: self.start.elapsed(),
            variant: self.variant,
            minsup: self.minsup,
            levels,
        }
    }

    /// Breadth-first fusion mining. Also returns the patterns that were marked
    /// as fusion parents of a frequent child.
    fn run_fusion(&self) -> (MiningResult, BTreeSet<Pattern>) {
        let mut frequent = BTreeMap::new();
        let mut non_maximal = BTreeSet::new();
        let mut levels = Vec::new();
        let mut total = 0;

        let mut previous: Vec<Pattern> = Vec::new();
        let mut candidates: Vec<(Pattern, Option<(usize, usize)>)> = seeds().into_iter().map(|p| (p, None)).collect();
        loop {
            let patterns: Vec<Pattern> = candidates.iter().map(|(p, _)| p.clone()).collect();
            let supports = self.supports(&patterns);
            total += patterns.len();

            let mut level = Vec::new();
            for ((pattern, parents), sup) in candidates.into_iter().zip(supports) {
                if sup < self.minsup {
                    continue;
                }
                if let Some((l, r)) = parents {
                    non_maximal.insert(previous[l].clone());
                    non_maximal.insert(previous[r].clone());
                }
                frequent.insert(pattern.clone(), sup);
                level.push(pattern);
            }

            let stats = LevelStats {
                length: patterns[0].len(),
                candidates: patterns.len(),
                frequent: level.len(),
                elapsed: Some(self.start.elapsed()),
            };
            self.log_level(&stats);
            levels.push(stats);

            if level.is_empty() {
                break;
            }
            candidates = fuse_level(&level).into_iter().map(|c| (c.pattern, Some((c.left, c.right)))).collect();
            previous = level;
            if candidates.is_empty() {
                break;
            }
        }
        (self.finish(frequent, total, levels), non_maximal)
    }

    fn run_enum_bfs(&self) -> MiningResult {
        let mut frequent = BTreeMap::new();
        let mut levels = Vec::new();
        let mut total = 0;

        let mut candidates = seeds();
        loop {
            let supports = self.supports(&candidates);
            total += candidates.len();
            let level: Vec<Pattern> = candidates
                .iter()
                .zip(supports)
                .filter(|(_, sup)| *sup >= self.minsup)
                .map(|(p, sup)| {
                    frequent.insert(p.clone(), sup);
                    p.clone()
                })
                .collect();
            let stats = LevelStats {
                length: candidates[0].len(),
                candidates: candidates.len(),
                frequent: level.len(),
                elapsed: Some(self.start.elapsed()),
            };
            self.log_level(&stats);
            levels.push(stats);
            if level.is_empty() {
                break;
            }
            candidates = level_candidates_enumeration(&level);
        }
        self.finish(frequent, total, levels)
    }

    fn run_enum_dfs(&self) -> MiningResult {
        let mut frequent = BTreeMap::new();
        // length -> (candidates, frequent)
        let mut tally: BTreeMap<usize, (usize, usize)> = BTreeMap::new();

        let roots = seeds();
        let supports = self.supports(&roots);
        tally.insert(2, (roots.len(), 0));
        for (p, sup) in roots.into_iter().zip(supports) {
            if sup >= self.minsup {
                tally.get_mut(&2).unwrap().1 += 1;
                frequent.insert(p.clone(), sup);
                self.descend(&p, &mut frequent, &mut tally);
            }
        }

        let total = tally.values().map(|(c, _)| c).sum();
        let levels: Vec<LevelStats> = tally
            .into_iter()
            .map(|(length, (candidates, frequent))| LevelStats { length, candidates, frequent, elapsed: None })
            .collect();
        for stats in &levels {
            self.log_level(stats);
        }
        self.finish(frequent, total, levels)
    }

    fn descend(
        &self,
        p: &Pattern,
        frequent: &mut BTreeMap<Pattern, usize>,
        tally: &mut BTreeMap<usize, (usize, usize)>,
    ) {
        let children = enumerate_extensions(p);
        let supports = self.supports(&children);
        let entry = tally.entry(p.len() + 1).or_default();
        entry.0 += children.len();
        let frequent_children: Vec<(Pattern, usize)> =
            children.into_iter().zip(supports).filter(|(_, sup)| *sup >= self.minsup).collect();
        entry.1 += frequent_children.len();
        for (child, sup) in frequent_children {
            frequent.insert(child.clone(), sup);
            self.descend(&child, frequent, tally);
        }
    }
}
