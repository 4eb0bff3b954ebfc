//! Partitioning Around Medoids (PAM): BUILD seeding plus steepest-descent
//! SWAP, with plain Euclidean distances. Deterministic on the canonical
//! id-sorted row order — the seed parameter is accepted for interface
//! symmetry with k-means and is not consumed.

use super::{ClusterPartition, Method};
use crate::error::{Error, Result};
use crate::features::{euclidean, FeatureMatrix};

pub fn kmedoids(features: &FeatureMatrix, k: usize, _seed: u64) -> Result<ClusterPartition> {
    let n = features.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let data = features.working();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&data[i], &data[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let d = |i: usize, j: usize| dist[i * n + j];

    // BUILD: start from the row minimizing total distance, then greedily
    // add the candidate with the largest total distance reduction.
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let first = (0..n)
        .min_by(|&a, &b| {
            let ta: f64 = (0..n).map(|j| d(a, j)).sum();
            let tb: f64 = (0..n).map(|j| d(b, j)).sum();
            ta.partial_cmp(&tb).expect("finite distances")
        })
        .expect("nonempty matrix");
    medoids.push(first);
    let mut dnear: Vec<f64> = (0..n).map(|j| d(first, j)).collect();
    while medoids.len() < k {
        let mut best = None;
        let mut best_gain = -1.0;
        for c in 0..n {
            if medoids.contains(&c) {
                continue;
            }
            let gain: f64 = (0..n).map(|j| (dnear[j] - d(c, j)).max(0.0)).sum();
            if gain > best_gain {
                best_gain = gain;
                best = Some(c);
            }
        }
        let c = best.expect("k <= n leaves a candidate");
        medoids.push(c);
        for j in 0..n {
            dnear[j] = dnear[j].min(d(c, j));
        }
    }
    medoids.sort_unstable();

    // SWAP: replace one medoid by one non-medoid while the total cost
    // strictly improves; apply the single best swap per pass.
    let cost_of = |medoids: &[usize]| -> f64 {
        (0..n)
            .map(|j| {
                medoids
                    .iter()
                    .map(|&m| d(m, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    };
    let mut cost = cost_of(&medoids);
    loop {
        let mut best: Option<(usize, usize, f64)> = None; // (slot, h, new_cost)
        for slot in 0..k {
            // nearest-medoid distances with this slot removed
            let excl: Vec<f64> = (0..n)
                .map(|j| {
                    medoids
                        .iter()
                        .enumerate()
                        .filter(|&(s, _)| s != slot)
                        .map(|(_, &m)| d(m, j))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            for h in 0..n {
                if medoids.contains(&h) {
                    continue;
                }
                let new_cost: f64 = (0..n).map(|j| excl[j].min(d(h, j))).sum();
                if new_cost < cost - 1e-12
                    && best.as_ref().is_none_or(|&(_, _, c)| new_cost < c)
                {
                    best = Some((slot, h, new_cost));
                }
            }
        }
        match best {
            Some((slot, h, new_cost)) => {
                medoids[slot] = h;
                medoids.sort_unstable();
                cost = new_cost;
            }
            None => break,
        }
    }

    // assign every row to its nearest medoid (ties: first in medoid order)
    let labels: Vec<usize> = (0..n)
        .map(|j| {
            let mut arg = 0;
            let mut best = f64::INFINITY;
            for (s, &m) in medoids.iter().enumerate() {
                if d(m, j) < best {
                    best = d(m, j);
                    arg = s;
                }
            }
            arg
        })
        .collect();

    ClusterPartition::from_labels(
        features.ids(),
        features.raw(),
        &labels,
        Method::Kmedoids,
        Some(&medoids),
    )
}
