//! Lloyd's k-means with k-means++ seeding, seeded restarts, and
//! farthest-point repair of empty clusters.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClusterPartition, Method};
use crate::error::{Error, Result};
use crate::features::{euclidean_sq, FeatureMatrix, DIM};

const MAX_ITER: usize = 300;

/// Best-of-`restarts` k-means on the working vectors of `features`.
pub fn kmeans(
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusterPartition> {
    kmeans_with_trace(features, k, seed, restarts).map(|(p, _)| p)
}

/// As [`kmeans`], but also returns the within-cluster sum-of-squares trace
/// of every restart (one value per Lloyd iteration, non-increasing).
pub fn kmeans_with_trace(
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<(ClusterPartition, Vec<Vec<f64>>)> {
    let n = features.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if restarts == 0 {
        return Err(Error::InvalidParam("kmeans needs restarts >= 1".into()));
    }
    let data = features.working();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut traces = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let (labels, ss, trace) = lloyd(data, k, &mut rng);
        traces.push(trace);
        if best.as_ref().is_none_or(|(_, b)| ss < *b) {
            best = Some((labels, ss));
        }
    }
    let (labels, _) = best.expect("restarts >= 1");
    let part =
        ClusterPartition::from_labels(features.ids(), features.raw(), &labels, Method::Kmeans, None)?;
    Ok((part, traces))
}

fn lloyd(data: &[[f64; DIM]], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64, Vec<f64>) {
    let n = data.len();
    let mut centers = kpp_init(data, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut trace: Vec<f64> = Vec::new();

    for _ in 0..MAX_ITER {
        let mut changed = false;
        for i in 0..n {
            let mut arg = 0;
            let mut best = f64::INFINITY;
            for (c, ctr) in centers.iter().enumerate() {
                let d = euclidean_sq(&data[i], ctr);
                if d < best {
                    best = d;
                    arg = c;
                }
            }
            if labels[i] != arg {
                labels[i] = arg;
                changed = true;
            }
        }

        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        // Repair: each empty cluster takes the point currently farthest
        // from its own centroid (donor cluster must keep >= 1 member).
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if sizes[labels[i]] < 2 {
                    continue;
                }
                let d = euclidean_sq(&data[i], &centers[labels[i]]);
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
            let Some(i) = far else { break };
            sizes[labels[i]] -= 1;
            labels[i] = c;
            sizes[c] += 1;
            changed = true;
        }

        update_centers(data, &labels, &mut centers, &sizes);
        let ss = total_ss(data, &labels, &centers);
        if let Some(&prev) = trace.last() {
            debug_assert!(ss <= prev + 1e-9, "within-SS rose: {prev} -> {ss}");
        }
        trace.push(ss);
        if !changed {
            break;
        }
    }
    let ss = *trace.last().expect("at least one iteration");
    (labels, ss, trace)
}

/// k-means++: first center uniform, the rest sampled proportional to the
/// squared distance to the nearest already-chosen center.
fn kpp_init(data: &[[f64; DIM]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; DIM]> {
    let n = data.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(data[rng.gen_range(0..n)]);
    let mut d2: Vec<f64> = data.iter().map(|x| euclidean_sq(x, &centers[0])).collect();
    while centers.len() < k {
        let idx = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // all remaining distances zero (duplicated points): pick uniformly
            Err(_) => rng.gen_range(0..n),
        };
        let c = data[idx];
        for (i, x) in data.iter().enumerate() {
            d2[i] = d2[i].min(euclidean_sq(x, &c));
        }
        centers.push(c);
    }
    centers
}

fn update_centers(
    data: &[[f64; DIM]],
    labels: &[usize],
    centers: &mut [ [f64; DIM] ],
    sizes: &[usize],
) {
    let k = centers.len();
    let mut sums = vec![[0.0; DIM]; k];
    for (x, &l) in data.iter().zip(labels) {
        for d in 0..DIM {
            sums[l][d] += x[d];
        }
    }
    for c in 0..k {
        // an unrepairable empty cluster (only possible when duplicated
        // points leave nothing to donate) keeps its previous center
        if sizes[c] == 0 {
            continue;
        }
        for d in 0..DIM {
            centers[c][d] = sums[c][d] / sizes[c] as f64;
        }
    }
}

fn total_ss(data: &[[f64; DIM]], labels: &[usize], centers: &[[f64; DIM]]) -> f64 {
    data.iter()
        .zip(labels)
        .map(|(x, &l)| euclidean_sq(x, &centers[l]))
        .sum()
}

/// Within-cluster sum of squares of an arbitrary labeling, measured against
/// the labeled groups' own centroids.
#[cfg(test)]
fn labeling_ss(data: &[[f64; DIM]], labels: &[usize], k: usize) -> f64 {
    let mut sums = vec![[0.0; DIM]; k];
    let mut sizes = vec![0usize; k];
    for (x, &l) in data.iter().zip(labels) {
        sizes[l] += 1;
        for d in 0..DIM {
            sums[l][d] += x[d];
        }
    }
    let centers: Vec<[f64; DIM]> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &n)| {
            let mut c = [0.0; DIM];
            if n > 0 {
                for d in 0..DIM {
                    c[d] = s[d] / n as f64;
                }
            }
            c
        })
        .collect();
    total_ss(data, labels, &centers)
}
