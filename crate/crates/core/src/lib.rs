//! Order-preserving pattern (OPP) mining for time series.
//!
//! An order-preserving pattern is a permutation of `1..=m` that describes the
//! relative order of `m` consecutive measurements. This crate counts pattern
//! occurrences with a filtration + verification matcher, generates candidates
//! by fusing frequent patterns, mines all frequent and maximal patterns level
//! by level, and turns mined patterns into features for clustering.
//!
//! ```
//! use oppminer::{mine_frequent, Pattern, TimeSeries};
//!
//! let s = TimeSeries::new(
//!     "example",
//!     vec![11., 10., 21., 25., 12., 14., 18., 19., 26., 13., 16., 20., 24., 30., 15., 17.],
//! )
//! .unwrap();
//! let result = mine_frequent(&s, 3).unwrap();
//! assert_eq!(result.frequent.len(), 7);
//! assert_eq!(result.frequent[&"3-4-1-2".parse::<Pattern>().unwrap()], 3);
//! ```

pub mod bitparallel;
pub mod cluster;
pub mod dataset;
mod error;
pub mod fusion;
pub mod matcher;
pub mod miner;
pub mod model;

pub use cluster::{featurize, homogeneity, kmeans, nmi, ContingencyTable, FeatureMatrix, KMeans};
pub use dataset::{
    classify_trend, load_labeled_dataset, load_single_series, moving_average, ColumnSelector, Dataset, Trend,
};
pub use error::{Error, Result};
pub use fusion::{enumerate_extensions, fuse, level_candidates_enumeration, level_candidates_fusion, Fusion};
pub use matcher::{
    encode_pattern, encode_series, filter_candidates, fvp_support, naive_support, verify_occurrence, BitString,
    EncodedSeries, Filter,
};
pub use miner::{compression_rate, mine_frequent, mine_maximal, mine_variant, MaximalResult, MiningResult, Variant};
pub use model::{ordered_table, relative_order, OccurrenceList, OrderedTable, Pattern, TimeSeries};
