//! Cluster-count selection: five validity indices and the majority rule.
//!
//! Each index votes for its best k over the candidate range; the modal k
//! wins, with ties resolved toward the smaller count. The gap statistic
//! votes through the one-standard-error rule instead of a plain argmax.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{euclidean, euclidean_sq, FeatureMatrix, DIM};
use crate::fsutil::atomic_write;
use crate::grouping::{dendrogram, kmeans, kmedoids, ClusterPartition, Method};

/// Restarts for k-means runs launched internally (candidate ks and
/// gap-statistic reference samples).
const INTERNAL_RESTARTS: usize = 25;

/// Uniform reference datasets drawn for the gap statistic inside
/// [`recommend_k`].
pub const GAP_REFERENCE_SAMPLES: usize = 50;

#[derive(Debug, Clone, serde::Serialize)]
pub struct KRecommendation {
    pub method: Method,
    /// Inclusive candidate interval.
    pub k_range: (usize, usize),
    /// Best k per index.
    pub votes: BTreeMap<String, usize>,
    /// Vote count per k.
    pub tally: BTreeMap<usize, usize>,
    pub winner: usize,
}

impl KRecommendation {
    /// `k_recommendation.json`: method, range, per-index votes, tally,
    /// winner.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)
            .map_err(|e| Error::Internal(format!("serialize recommendation: {e}")))?;
        bytes.push(b'\n');
        atomic_write(path, &bytes)
    }
}

fn labels_for(features: &FeatureMatrix, partition: &ClusterPartition) -> Result<Vec<usize>> {
    features
        .ids()
        .iter()
        .map(|id| {
            partition
                .cluster_of(id)
                .map(|c| c - 1)
                .ok_or_else(|| Error::Internal(format!("partition misses id {id:?}")))
        })
        .collect()
}

struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    fn new(data: &[[f64; DIM]]) -> Self {
        let n = data.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = euclidean(&data[i], &data[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

fn require_k2(features: &FeatureMatrix, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidK {
            k,
            n: features.len(),
        });
    }
    Ok(())
}

/// Mean silhouette width in [−1, 1]; singleton clusters contribute 0, and
/// 0/0 is taken as 0.
pub fn silhouette_index(features: &FeatureMatrix, partition: &ClusterPartition) -> Result<f64> {
    require_k2(features, partition.k())?;
    let labels = labels_for(features, partition)?;
    let dist = DistMatrix::new(features.working());
    Ok(silhouette_labels(&dist, &labels, partition.k()))
}

fn silhouette_labels(dist: &DistMatrix, labels: &[usize], k: usize) -> f64 {
    let n = labels.len();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        if sizes[labels[i]] == 1 {
            continue; // s(i) = 0 for singletons
        }
        let mut sum_by_cluster = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sum_by_cluster[labels[j]] += dist.get(i, j);
            }
        }
        let a = sum_by_cluster[labels[i]] / (sizes[labels[i]] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != labels[i] && sizes[c] > 0 {
                b = b.min(sum_by_cluster[c] / sizes[c] as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

fn centroids_and_sizes(
    data: &[[f64; DIM]],
    labels: &[usize],
    k: usize,
) -> (Vec<[f64; DIM]>, Vec<usize>) {
    let mut sums = vec![[0.0; DIM]; k];
    let mut sizes = vec![0usize; k];
    for (x, &l) in data.iter().zip(labels) {
        sizes[l] += 1;
        for d in 0..DIM {
            sums[l][d] += x[d];
        }
    }
    let centroids = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| {
            let mut c = [0.0; DIM];
            if m > 0 {
                for d in 0..DIM {
                    c[d] = s[d] / m as f64;
                }
            }
            c
        })
        .collect();
    (centroids, sizes)
}

/// Between/within variance ratio; 0 when between-group dispersion is zero,
/// +∞ when groups are internally exact but separated.
pub fn calinski_harabasz(features: &FeatureMatrix, partition: &ClusterPartition) -> Result<f64> {
    require_k2(features, partition.k())?;
    let labels = labels_for(features, partition)?;
    Ok(ch_labels(features.working(), &labels, partition.k()))
}

fn ch_labels(data: &[[f64; DIM]], labels: &[usize], k: usize) -> f64 {
    let n = data.len();
    let (centroids, sizes) = centroids_and_sizes(data, labels, k);
    let mut grand = [0.0; DIM];
    for x in data {
        for d in 0..DIM {
            grand[d] += x[d];
        }
    }
    for g in &mut grand {
        *g /= n as f64;
    }
    let between: f64 = centroids
        .iter()
        .zip(&sizes)
        .map(|(c, &m)| m as f64 * euclidean_sq(c, &grand))
        .sum();
    let within: f64 = data
        .iter()
        .zip(labels)
        .map(|(x, &l)| euclidean_sq(x, &centroids[l]))
        .sum();
    if between <= 0.0 {
        return 0.0;
    }
    if within <= 0.0 {
        return f64::INFINITY;
    }
    (between / (k - 1) as f64) / (within / (n - k) as f64)
}

/// Mean over clusters of the worst pairwise (spread_a+spread_b)/separation
/// ratio; lower is better.
pub fn davies_bouldin(features: &FeatureMatrix, partition: &ClusterPartition) -> Result<f64> {
    require_k2(features, partition.k())?;
    let labels = labels_for(features, partition)?;
    Ok(db_labels(features.working(), &labels, partition.k()))
}

fn db_labels(data: &[[f64; DIM]], labels: &[usize], k: usize) -> f64 {
    let (centroids, sizes) = centroids_and_sizes(data, labels, k);
    let mut spread = vec![0.0; k];
    for (x, &l) in data.iter().zip(labels) {
        spread[l] += euclidean(x, &centroids[l]);
    }
    for c in 0..k {
        if sizes[c] > 0 {
            spread[c] /= sizes[c] as f64;
        }
    }
    let mut total = 0.0;
    for c in 0..k {
        let mut worst = 0.0_f64;
        for d in 0..k {
            if d == c {
                continue;
            }
            let sep = euclidean(&centroids[c], &centroids[d]);
            let r = if sep > 0.0 {
                (spread[c] + spread[d]) / sep
            } else if spread[c] + spread[d] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst = worst.max(r);
        }
        total += worst;
    }
    total / k as f64
}

/// Smallest between-cluster gap over largest cluster diameter; higher is
/// better.
pub fn dunn_index(features: &FeatureMatrix, partition: &ClusterPartition) -> Result<f64> {
    require_k2(features, partition.k())?;
    let labels = labels_for(features, partition)?;
    let dist = DistMatrix::new(features.working());
    Ok(dunn_labels(&dist, &labels))
}

fn dunn_labels(dist: &DistMatrix, labels: &[usize]) -> f64 {
    let n = labels.len();
    let mut min_inter = f64::INFINITY;
    let mut max_diam = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            if labels[i] == labels[j] {
                max_diam = max_diam.max(d);
            } else {
                min_inter = min_inter.min(d);
            }
        }
    }
    if max_diam > 0.0 {
        min_inter / max_diam
    } else if min_inter > 0.0 && min_inter.is_finite() {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Clusters `features` with `method` at `k`, returning 0-based row labels.
fn cluster_labels(
    features: &FeatureMatrix,
    method: Method,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    match method {
        Method::Kmeans => {
            let part = kmeans(features, k, seed, INTERNAL_RESTARTS)?;
            labels_for(features, &part)
        }
        Method::Kmedoids => {
            let part = kmedoids(features, k, seed)?;
            labels_for(features, &part)
        }
        Method::Hierarchical => dendrogram(features)?.cut(k),
        Method::Quartile => Err(Error::InvalidParam(
            "the gap statistic and recommend_k need a clustering method".into(),
        )),
    }
}

fn within_ss_of(data: &[[f64; DIM]], labels: &[usize], k: usize) -> f64 {
    let (centroids, _) = centroids_and_sizes(data, labels, k);
    data.iter()
        .zip(labels)
        .map(|(x, &l)| euclidean_sq(x, &centroids[l]))
        .sum()
}

fn log_ws(w: f64) -> f64 {
    w.max(1e-300).ln()
}

/// One uniform reference draw per sample over the working bounding box,
/// returning log within-SS per (sample, k). Reference datasets are shared
/// across the candidate ks, and hierarchical clustering builds one
/// dendrogram per sample.
fn reference_log_ws(
    features: &FeatureMatrix,
    method: Method,
    ks: &[usize],
    seed: u64,
    reference_samples: usize,
) -> Result<Vec<Vec<f64>>> {
    if reference_samples == 0 {
        return Err(Error::InvalidParam(
            "gap statistic needs at least one reference sample".into(),
        ));
    }
    let n = features.len();
    let (lo, hi) = features.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_sample = Vec::with_capacity(reference_samples);
    for _ in 0..reference_samples {
        let pts: Vec<[f64; DIM]> = (0..n)
            .map(|_| {
                let mut p = [0.0; DIM];
                for d in 0..DIM {
                    p[d] = if hi[d] > lo[d] {
                        rng.gen_range(lo[d]..=hi[d])
                    } else {
                        lo[d]
                    };
                }
                p
            })
            .collect();
        let ref_seed = rng.gen::<u64>();
        let rf = features.with_working(pts);
        let logs: Vec<f64> = match method {
            Method::Hierarchical => {
                let dendro = dendrogram(&rf)?;
                ks.iter()
                    .map(|&k| Ok(log_ws(within_ss_of(rf.working(), &dendro.cut(k)?, k))))
                    .collect::<Result<_>>()?
            }
            _ => ks
                .iter()
                .map(|&k| {
                    let labels = cluster_labels(&rf, method, k, ref_seed)?;
                    Ok(log_ws(within_ss_of(rf.working(), &labels, k)))
                })
                .collect::<Result<_>>()?,
        };
        per_sample.push(logs);
    }
    Ok(per_sample)
}

fn gap_and_se(ref_logs_at_k: &[f64], observed_log_w: f64) -> (f64, f64) {
    let b = ref_logs_at_k.len() as f64;
    let mean_log = ref_logs_at_k.iter().sum::<f64>() / b;
    let gap = mean_log - observed_log_w;
    let sd = (ref_logs_at_k
        .iter()
        .map(|l| (l - mean_log).powi(2))
        .sum::<f64>()
        / b)
        .sqrt();
    (gap, sd * (1.0 + 1.0 / b).sqrt())
}

/// Gap statistic of one partition: expected log within-SS of uniform
/// reference samples minus the observed log within-SS, plus the simulation
/// standard error.
pub fn gap_statistic(
    features: &FeatureMatrix,
    partition: &ClusterPartition,
    seed: u64,
    reference_samples: usize,
) -> Result<(f64, f64)> {
    let labels = labels_for(features, partition)?;
    let k = partition.k();
    let observed = log_ws(within_ss_of(features.working(), &labels, k));
    let refs = reference_log_ws(features, partition.method(), &[k], seed, reference_samples)?;
    let at_k: Vec<f64> = refs.iter().map(|row| row[0]).collect();
    Ok(gap_and_se(&at_k, observed))
}

/// (gap, se) per candidate k, clustering the observed data with `method` at
/// each k. Reference samples are shared across the curve.
pub fn gap_curve(
    features: &FeatureMatrix,
    method: Method,
    ks: &[usize],
    seed: u64,
    reference_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if ks.is_empty() {
        return Err(Error::InvalidParam("gap curve needs at least one k".into()));
    }
    let refs = reference_log_ws(features, method, ks, seed, reference_samples)?;
    let mut curve = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let labels = cluster_labels(features, method, k, seed)?;
        let observed = log_ws(within_ss_of(features.working(), &labels, k));
        let at_k: Vec<f64> = refs.iter().map(|row| row[i]).collect();
        curve.push(gap_and_se(&at_k, observed));
    }
    Ok(curve)
}

/// Tibshirani's one-standard-error rule: the smallest k whose gap is at
/// least the next gap minus its standard error; the last candidate when no
/// k satisfies the rule.
pub fn gap_one_se_choice(ks: &[usize], curve: &[(f64, f64)]) -> usize {
    assert_eq!(ks.len(), curve.len());
    for i in 0..ks.len() - 1 {
        let (gap_k, _) = curve[i];
        let (gap_next, se_next) = curve[i + 1];
        if gap_k >= gap_next - se_next {
            return ks[i];
        }
    }
    *ks.last().expect("nonempty curve")
}

fn argbest(ks: &[usize], scores: &[f64], higher_is_better: bool) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let better = if higher_is_better {
            scores[i] > scores[best]
        } else {
            scores[i] < scores[best]
        };
        if better {
            best = i;
        }
    }
    ks[best]
}

pub(crate) fn majority(votes: &BTreeMap<String, usize>) -> (BTreeMap<usize, usize>, usize) {
    let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in votes.values() {
        *tally.entry(k).or_default() += 1;
    }
    let mut winner = 0;
    let mut winner_count = 0;
    for (&k, &count) in &tally {
        // ascending scan: strict improvement keeps the smaller k on ties
        if count > winner_count {
            winner = k;
            winner_count = count;
        }
    }
    (tally, winner)
}

/// Clusters at every k in the inclusive range, scores the five indices,
/// and applies the majority rule (ties toward smaller k).
pub fn recommend_k(
    features: &FeatureMatrix,
    method: Method,
    k_range: (usize, usize),
    seed: u64,
) -> Result<KRecommendation> {
    let (lo, hi) = k_range;
    let n = features.len();
    if lo > hi {
        return Err(Error::InvalidParam(format!(
            "empty k range [{lo}, {hi}]"
        )));
    }
    if lo < 2 || hi > n.saturating_sub(1) {
        return Err(Error::InvalidParam(format!(
            "k range [{lo}, {hi}] outside [2, {}]",
            n.saturating_sub(1)
        )));
    }
    if method == Method::Quartile {
        return Err(Error::InvalidParam(
            "recommend_k needs a clustering method".into(),
        ));
    }

    let ks: Vec<usize> = (lo..=hi).collect();
    let dist = DistMatrix::new(features.working());
    let mut sil = Vec::new();
    let mut ch = Vec::new();
    let mut db = Vec::new();
    let mut dunn = Vec::new();
    for &k in &ks {
        let labels = cluster_labels(features, method, k, seed)?;
        sil.push(silhouette_labels(&dist, &labels, k));
        ch.push(ch_labels(features.working(), &labels, k));
        db.push(db_labels(features.working(), &labels, k));
        dunn.push(dunn_labels(&dist, &labels));
    }

    // the one-SE rule needs the curve one step past the range
    let mut ks_ext = ks.clone();
    ks_ext.push(hi + 1); // hi + 1 <= n by the range check
    let curve = gap_curve(features, method, &ks_ext, seed, GAP_REFERENCE_SAMPLES)?;
    let mut gap_vote = hi;
    for i in 0..ks.len() {
        let (gap_k, _) = curve[i];
        let (gap_next, se_next) = curve[i + 1];
        if gap_k >= gap_next - se_next {
            gap_vote = ks[i];
            break;
        }
    }

    let mut votes = BTreeMap::new();
    votes.insert("silhouette".to_string(), argbest(&ks, &sil, true));
    votes.insert("calinski_harabasz".to_string(), argbest(&ks, &ch, true));
    votes.insert("davies_bouldin".to_string(), argbest(&ks, &db, false));
    votes.insert("dunn".to_string(), argbest(&ks, &dunn, true));
    votes.insert("gap".to_string(), gap_vote);

    let (tally, winner) = majority(&votes);
    Ok(KRecommendation {
        method,
        k_range,
        votes,
        tally,
        winner,
    })
}
