//! Maximal-pattern features, k-means, and the NMI / homogeneity metrics used
//! to score a clustering against known classes.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;
use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matcher::{EncodedSeries, Filter};
use crate::miner::mine_maximal;
use crate::model::Pattern;

/// Support of every vocabulary pattern in every series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMatrix {
    pub vocabulary: Vec<Pattern>,
    pub rows: Vec<Vec<usize>>,
    pub labels: Option<Vec<String>>,
}

impl FeatureMatrix {
    pub fn dimensionality(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()
    }

    /// Header of dash-rendered patterns (plus `label` when labels exist), then
    /// one row of supports per series.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header: Vec<String> = self.vocabulary.iter().map(Pattern::to_string).collect();
        if self.labels.is_some() {
            header.push("label".into());
        }
        writeln!(out, "{}", header.join(","))?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut fields: Vec<String> = row.iter().map(usize::to_string).collect();
            if let Some(labels) = &self.labels {
                fields.push(labels[i].clone());
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Mines the maximal patterns of each series, takes the union as the
/// vocabulary, and counts every vocabulary pattern in every series.
pub fn featurize(ds: &Dataset, minsup: usize) -> Result<FeatureMatrix> {
    let per_series = ds.series.par_iter().map(|s| mine_maximal(s, minsup)).collect::<Result<Vec<_>>>()?;
    let vocabulary: Vec<Pattern> =
        per_series.into_iter().flat_map(|r| r.maximal.into_keys()).collect::<BTreeSet<_>>().into_iter().collect();
    let rows = ds
        .series
        .par_iter()
        .map(|s| {
            let enc = EncodedSeries::new(s);
            vocabulary.iter().map(|p| enc.support(p, Filter::Sbndm2)).collect()
        })
        .collect();
    Ok(FeatureMatrix { vocabulary, rows, labels: ds.labels.clone() })
}

#[derive(Debug, Clone)]
pub struct KMeans {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Total within-cluster squared distance after each iteration.
    pub inertia_history: Vec<f64>,
}

impl KMeans {
    pub fn inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(0.0)
    }

    pub fn iterations(&self) -> usize {
        self.inertia_history.len()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means with Euclidean distance. Starts from `k` distinct rows
/// drawn by a generator seeded with `seed`; a cluster left empty takes over
/// the point farthest from its centroid.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeans> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::BadK { k, rows: n });
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::LengthMismatch(bad.len(), dim));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = sample(&mut rng, n, k).into_iter().map(|i| points[i].clone()).collect();
    let mut labels = vec![usize::MAX; n];
    let mut inertia_history = Vec::new();

    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = (0..k)
                .map(|c| (c, sq_dist(p, &centroids[c])))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
                .0;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .map(|i| (i, sq_dist(&points[i], &centroids[labels[i]])))
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            if let Some((i, _)) = far {
                counts[labels[i]] -= 1;
                labels[i] = c;
                counts[c] = 1;
                changed = true;
            }
        }

        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &l) in points.iter().zip(&labels) {
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        inertia_history.push(points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum());

        if !changed {
            break;
        }
    }
    Ok(KMeans { labels, centroids, inertia_history })
}

/// Joint counts of two labelings of the same items. Rows follow the first
/// labeling, columns the second, both in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    total: usize,
}

fn index_labels<T: Eq + Hash>(labels: &[T]) -> (Vec<usize>, usize) {
    let mut ids: HashMap<&T, usize> = HashMap::new();
    let idx = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect();
    (idx, ids.len())
}

fn entropy(marginal: impl Iterator<Item = f64>) -> f64 {
    -marginal.filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

impl ContingencyTable {
    pub fn new<A: Eq + Hash, B: Eq + Hash>(xs: &[A], ys: &[B]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let (xi, nx) = index_labels(xs);
        let (yi, ny) = index_labels(ys);
        let mut counts = vec![vec![0usize; ny]; nx];
        for (&i, &j) in xi.iter().zip(&yi) {
            counts[i][j] += 1;
        }
        Ok(ContingencyTable { counts, total: xs.len() })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.counts[i][j] as f64 / self.total as f64
    }

    pub fn marginal_x(&self, i: usize) -> f64 {
        self.counts[i].iter().sum::<usize>() as f64 / self.total as f64
    }

    pub fn marginal_y(&self, j: usize) -> f64 {
        self.counts.iter().map(|row| row[j]).sum::<usize>() as f64 / self.total as f64
    }

    fn nx(&self) -> usize {
        self.counts.len()
    }

    fn ny(&self) -> usize {
        self.counts[0].len()
    }

    pub fn entropy_x(&self) -> f64 {
        entropy((0..self.nx()).map(|i| self.marginal_x(i)))
    }

    pub fn entropy_y(&self) -> f64 {
        entropy((0..self.ny()).map(|j| self.marginal_y(j)))
    }

    pub fn mutual_information(&self) -> f64 {
        let mut mi = 0.0;
        for i in 0..self.nx() {
            for j in 0..self.ny() {
                let pij = self.joint(i, j);
                if pij > 0.0 {
                    mi += pij * (pij / (self.marginal_x(i) * self.marginal_y(j))).ln();
                }
            }
        }
        mi
    }

    /// `H(X | Y)` with `0 log 0 = 0`.
    pub fn conditional_entropy_x_given_y(&self) -> f64 {
        let mut h = 0.0;
        for j in 0..self.ny() {
            let pj = self.marginal_y(j);
            for i in 0..self.nx() {
                let pij = self.joint(i, j);
                if pij > 0.0 {
                    h -= pij * (pij / pj).ln();
                }
            }
        }
        h
    }
}

/// Normalized mutual information, `I(X;Y) / sqrt(H(X) H(Y))`. Zero when
/// either labeling has a single class.
pub fn nmi<A: Eq + Hash, B: Eq + Hash>(predicted: &[A], truth: &[B]) -> Result<f64> {
    let t = ContingencyTable::new(predicted, truth)?;
    let denom = (t.entropy_x() * t.entropy_y()).sqrt();
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((t.mutual_information() / denom).clamp(0.0, 1.0))
}

/// Homogeneity, `1 - H(truth | predicted) / H(truth)`. One when the truth has
/// a single class.
pub fn homogeneity<A: Eq + Hash, B: Eq + Hash>(predicted: &[A], truth: &[B]) -> Result<f64> {
    let t = ContingencyTable::new(truth, predicted)?;
    let h = t.entropy_x();
    if h <= 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - t.conditional_entropy_x_given_y() / h).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::naive_support;
    use crate::model::TimeSeries;

    const EXAMPLE: [f64; 16] = [11., 10., 21., 25., 12., 14., 18., 19., 26., 13., 16., 20., 24., 30., 15., 17.];

    fn dataset(series: Vec<Vec<f64>>) -> Dataset {
        let series =
            series.into_iter().enumerate().map(|(i, v)| TimeSeries::new(format!("s{i}"), v).unwrap()).collect();
        Dataset::new(series, None, "mem").unwrap()
    }

    #[test]
    fn featurize_example() {
        let fm = featurize(&dataset(vec![EXAMPLE.to_vec()]), 3).unwrap();
        let vocab: Vec<String> = fm.vocabulary.iter().map(|p| p.to_string()).collect();
        assert_eq!(vocab, ["1-2-3-4", "3-4-1-2"]);
        // (1,2,3,4) occurs at 5, 6, 10 and 11
        assert_eq!(fm.rows, vec![vec![4, 3]]);
    }

    #[test]
    fn identical_series_identical_rows() {
        let fm = featurize(&dataset(vec![EXAMPLE.to_vec(), EXAMPLE.to_vec()]), 2).unwrap();
        assert_eq!(fm.rows[0], fm.rows[1]);
        assert!(fm.dimensionality() > 0);
    }

    #[test]
    fn adding_a_series_keeps_existing_supports() {
        let a = vec![1., 3., 2., 4., 6., 5., 7., 9., 8., 10.];
        let b = vec![9., 8., 7., 6., 5., 4., 3., 2., 1., 0.];
        let one = featurize(&dataset(vec![a.clone()]), 2).unwrap();
        let two = featurize(&dataset(vec![a, b]), 2).unwrap();
        for (j, p) in one.vocabulary.iter().enumerate() {
            let k = two.vocabulary.iter().position(|q| q == p).unwrap();
            assert_eq!(one.rows[0][j], two.rows[0][k]);
        }
    }

    #[test]
    fn featurize_matches_naive_pipeline() {
        let data = vec![
            vec![3., 1., 4., 1.5, 5., 9., 2., 6., 5.5, 3.5, 5.8],
            vec![2., 7., 1., 8., 2.8, 1.8, 2.9, 8.5, 4., 5.9],
            vec![1., 2., 3., 2.5, 3.5, 4.5, 4., 5., 6., 5.2, 6.2],
        ];
        let ds = dataset(data);
        let fm = featurize(&ds, 2).unwrap();

        // brute force: count every window's relative order, keep frequent ones,
        // keep those with no frequent one-longer contiguous super-pattern
        let mut vocab = BTreeSet::new();
        for s in &ds.series {
            let mut counts: HashMap<Pattern, usize> = HashMap::new();
            for m in 2..=s.len() {
                for w in s.values().windows(m) {
                    if let Ok(p) = crate::model::relative_order(w) {
                        *counts.entry(p).or_default() += 1;
                    }
                }
            }
            let frequent: BTreeSet<Pattern> = counts.into_iter().filter(|(_, c)| *c >= 2).map(|(p, _)| p).collect();
            for p in &frequent {
                let parent = frequent.iter().any(|c| {
                    c.len() == p.len() + 1
                        && (c.prefix_order().as_ref() == Some(p) || c.suffix_order().as_ref() == Some(p))
                });
                if !parent {
                    vocab.insert(p.clone());
                }
            }
        }
        let vocab: Vec<Pattern> = vocab.into_iter().collect();
        assert_eq!(fm.vocabulary, vocab);
        for (i, s) in ds.series.iter().enumerate() {
            let row: Vec<usize> = vocab.iter().map(|p| naive_support(s, p).support()).collect();
            assert_eq!(fm.rows[i], row);
        }
    }

    #[test]
    fn feature_csv_layout() {
        let fm = FeatureMatrix {
            vocabulary: vec!["1-2-3-4".parse().unwrap(), "3-4-1-2".parse().unwrap()],
            rows: vec![vec![4, 3], vec![0, 1]],
            labels: Some(vec!["a".into(), "b".into()]),
        };
        let mut out = Vec::new();
        fm.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1-2-3-4,3-4-1-2,label\n4,3,a\n0,1,b\n");
    }

    #[test]
    fn kmeans_separates_groups() {
        let pts =
            vec![vec![0.0, 0.1], vec![0.2, 0.0], vec![0.1, 0.1], vec![10.0, 10.2], vec![10.1, 9.9], vec![9.8, 10.0]];
        for seed in 0..20 {
            let km = kmeans(&pts, 2, seed, 100).unwrap();
            assert_eq!(km.labels[0], km.labels[1]);
            assert_eq!(km.labels[1], km.labels[2]);
            assert_eq!(km.labels[3], km.labels[4]);
            assert_eq!(km.labels[4], km.labels[5]);
            assert_ne!(km.labels[0], km.labels[3]);
        }
    }

    #[test]
    fn kmeans_one_cluster_per_point() {
        let pts = vec![vec![1.0], vec![5.0], vec![2.0], vec![9.0]];
        let km = kmeans(&pts, 4, 7, 50).unwrap();
        let distinct: BTreeSet<usize> = km.labels.iter().copied().collect();
        assert_eq!(distinct.len(), 4);
        assert_eq!(km.inertia(), 0.0);
    }

    #[test]
    fn kmeans_reseeds_empty_clusters() {
        // duplicate rows make two seeds coincide
        let pts = vec![vec![1.0], vec![1.0], vec![1.0], vec![8.0], vec![9.0]];
        for seed in 0..30 {
            let km = kmeans(&pts, 3, seed, 50).unwrap();
            let distinct: BTreeSet<usize> = km.labels.iter().copied().collect();
            assert_eq!(distinct.len(), 3, "seed {seed}: {:?}", km.labels);
        }
    }

    #[test]
    fn kmeans_is_deterministic() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 17) % 13) as f64, ((i * 7) % 5) as f64]).collect();
        let a = kmeans(&pts, 4, 42, 100).unwrap();
        let b = kmeans(&pts, 4, 42, 100).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia_history, b.inertia_history);
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        let pts = vec![vec![1.0], vec![2.0]];
        assert!(matches!(kmeans(&pts, 0, 1, 10), Err(Error::BadK { .. })));
        assert!(matches!(kmeans(&pts, 3, 1, 10), Err(Error::BadK { .. })));
        assert!(matches!(kmeans(&[], 1, 1, 10), Err(Error::BadK { .. })));
    }

    #[test]
    fn metric_edge_cases() {
        let t = [1, 1, 2, 2, 3, 3];
        assert!((nmi(&t, &t).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nmi(&[0, 0, 0, 0], &[1, 1, 2, 2]).unwrap(), 0.0);
        assert_eq!(homogeneity(&t, &t).unwrap(), 1.0);
        // each predicted cluster is pure
        assert_eq!(homogeneity(&[1, 2, 3, 4, 5, 6], &[1, 1, 2, 2, 3, 3]).unwrap(), 1.0);
        // each predicted cluster splits the classes evenly
        assert!(homogeneity(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap().abs() < 1e-12);
        assert_eq!(homogeneity(&[1, 2, 3], &["a", "a", "a"]).unwrap(), 1.0);
        assert!(matches!(nmi(&[1, 2], &[1]), Err(Error::LengthMismatch(2, 1))));
        assert!(matches!(homogeneity(&[1, 2], &[1]), Err(Error::LengthMismatch(..))));
    }

    #[test]
    fn metrics_match_reference_values() {
        let nmi_ref = 0.3455920299442113;
        let h_ref = 0.3836885465963443;
        assert!((nmi(&[1, 1, 2, 2], &[1, 1, 1, 2]).unwrap() - nmi_ref).abs() < 1e-12);
        assert!((homogeneity(&[1, 1, 2, 2], &[1, 1, 1, 2]).unwrap() - h_ref).abs() < 1e-12);
    }

    #[test]
    fn contingency_table_counts() {
        let t = ContingencyTable::new(&["a", "a", "b"], &[1, 2, 2]).unwrap();
        assert_eq!(t.counts(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(t.total(), 3);
        let sum: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| t.joint(i, j)).sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn labelings() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
            (1usize..40).prop_flat_map(|n| (prop::collection::vec(0u8..4, n), prop::collection::vec(0u8..3, n)))
        }

        proptest! {
            #[test]
            fn metrics_bounded_and_relabel_invariant((a, b) in labelings(), shift in 1u8..10) {
                let n = nmi(&a, &b).unwrap();
                let h = homogeneity(&a, &b).unwrap();
                prop_assert!((0.0..=1.0).contains(&n));
                prop_assert!((0.0..=1.0).contains(&h));
                let relabeled: Vec<u8> = a.iter().map(|x| (x + shift) * 3).collect();
                prop_assert!((nmi(&relabeled, &b).unwrap() - n).abs() < 1e-12);
                prop_assert!((homogeneity(&relabeled, &b).unwrap() - h).abs() < 1e-12);
                prop_assert!((nmi(&b, &a).unwrap() - n).abs() < 1e-12);
            }

            #[test]
            fn kmeans_inertia_never_increases(
                pts in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 2..40),
                k in 1usize..6,
                seed in any::<u64>(),
            ) {
                let k = k.min(pts.len());
                let km = kmeans(&pts, k, seed, 100).unwrap();
                for w in km.inertia_history.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{:?}", km.inertia_history);
                }
            }
        }
    }

    #[test]
    fn homogeneity_is_not_symmetric() {
        let a = [1, 1, 2, 2];
        let b = [1, 1, 1, 2];
        assert!((homogeneity(&a, &b).unwrap() - homogeneity(&b, &a).unwrap()).abs() > 0.05);
    }
}
