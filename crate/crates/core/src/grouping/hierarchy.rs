//! Agglomerative hierarchical clustering with Ward's minimum-variance
//! criterion. Merge cost between clusters A and B is
//! |A||B|/(|A|+|B|) · ‖c_A − c_B‖², the exact increase in total
//! within-cluster sum of squares, tracked on centroids (equivalent to the
//! Lance–Williams update on squared Euclidean distances).

use super::{ClusterPartition, Method};
use crate::error::{Error, Result};
use crate::features::{euclidean_sq, FeatureMatrix, DIM};

/// Full agglomeration record: `merges[t]` joins the two cluster ids at step
/// t into new cluster id `n + t` (leaves are 0..n), at cost `heights[t]`.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<(usize, usize)>,
    heights: Vec<f64>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[(usize, usize)] {
        &self.merges
    }

    /// Ward merge costs in agglomeration order (non-decreasing).
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Labels (0-based, in first-appearance order over rows) after undoing
    /// the last k−1 merges, i.e. exactly k clusters.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(Error::InvalidK { k, n });
        }
        // union-find over the first n-k merges
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (t, &(a, b)) in self.merges.iter().take(n - k).enumerate() {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            parent[ra] = n + t;
            parent[rb] = n + t;
        }
        let mut label_of_root = std::collections::BTreeMap::new();
        let mut labels = Vec::with_capacity(n);
        for row in 0..n {
            let root = find(&mut parent, row);
            let next = label_of_root.len();
            let l = *label_of_root.entry(root).or_insert(next);
            labels.push(l);
        }
        debug_assert_eq!(label_of_root.len(), k);
        Ok(labels)
    }
}

/// Builds the complete Ward dendrogram over the working vectors.
pub fn dendrogram(features: &FeatureMatrix) -> Result<Dendrogram> {
    let n = features.len();
    if n == 0 {
        return Err(Error::TooFewRows {
            op: "hierarchical clustering",
            needed: 1,
            got: 0,
        });
    }
    let data = features.working();
    // active clusters: (centroid, size, cluster id)
    let mut active: Vec<([f64; DIM], usize, usize)> =
        data.iter().enumerate().map(|(i, v)| (*v, 1, i)).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut heights = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best = (0usize, 1usize);
        let mut best_cost = f64::INFINITY;
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let (ca, na, _) = active[i];
                let (cb, nb, _) = active[j];
                let w = (na * nb) as f64 / (na + nb) as f64;
                let cost = w * euclidean_sq(&ca, &cb);
                if cost < best_cost {
                    best_cost = cost;
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;
        let (ca, na, ida) = active[i];
        let (cb, nb, idb) = active[j];
        let nm = na + nb;
        let mut cm = [0.0; DIM];
        for d in 0..DIM {
            cm[d] = (ca[d] * na as f64 + cb[d] * nb as f64) / nm as f64;
        }
        merges.push((ida, idb));
        heights.push(best_cost);
        active.remove(j);
        active.remove(i);
        active.push((cm, nm, n + step));
    }
    Ok(Dendrogram { n, merges, heights })
}

/// Ward clustering cut at exactly k clusters.
pub fn hierarchical(features: &FeatureMatrix, k: usize) -> Result<ClusterPartition> {
    let n = features.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let labels = dendrogram(features)?.cut(k)?;
    ClusterPartition::from_labels(features.ids(), features.raw(), &labels, Method::Hierarchical, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Scaling;

    fn matrix(points: &[[f64; 3]]) -> FeatureMatrix {
        let rows = points
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("s{i:03}"), *p))
            .collect();
        FeatureMatrix::from_rows(rows, Scaling::Raw)
    }

    #[test]
    fn merge_costs_match_hand_computed_ward_increments() {
        // 1-D chain {0, 2, 10}: first {0,2} at (1·1/2)·4 = 2,
        // then {1} ∪ {10} at (2·1/3)·81 = 54
        let m = matrix(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [10.0, 0.0, 0.0]]);
        let d = dendrogram(&m).unwrap();
        assert_eq!(d.heights().len(), 2);
        assert!((d.heights()[0] - 2.0).abs() < 1e-12);
        assert!((d.heights()[1] - 54.0).abs() < 1e-12);
    }

    #[test]
    fn heights_are_monotone_on_scattered_points() {
        let pts: Vec<[f64; 3]> = (0..40)
            .map(|i| {
                [
                    (i * 17 % 29) as f64,
                    (i * 11 % 23) as f64,
                    (i * 7 % 19) as f64,
                ]
            })
            .collect();
        let d = dendrogram(&matrix(&pts)).unwrap();
        for w in d.heights().windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "heights fell: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn recovers_two_separated_clouds() {
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push([i as f64 * 0.01, 0.0, 0.0]);
        }
        for i in 0..5 {
            pts.push([100.0 + i as f64 * 0.01, 100.0, 100.0]);
        }
        let p = hierarchical(&matrix(&pts), 2).unwrap();
        assert_eq!(p.sizes(), &[5, 5]);
        assert_eq!(p.definitive_cluster(), 1);
        assert!(p.centroid_salience(1) > p.centroid_salience(2));
    }

    #[test]
    fn degenerate_cuts() {
        let m = matrix(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [5.0, 1.0, 0.0]]);
        let all = hierarchical(&m, 1).unwrap();
        assert_eq!(all.k(), 1);
        assert_eq!(all.sizes(), &[4]);
        let singletons = hierarchical(&m, 4).unwrap();
        assert_eq!(singletons.k(), 4);
        assert!(singletons.sizes().iter().all(|&s| s == 1));
        assert!(hierarchical(&m, 5).is_err());
    }

    #[test]
    fn cut_respects_dendrogram_structure() {
        let m = matrix(&[
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [10.0, 0.0, 0.0],
            [10.5, 0.0, 0.0],
            [30.0, 5.0, 0.0],
        ]);
        let d = dendrogram(&m).unwrap();
        let l3 = d.cut(3).unwrap();
        assert_eq!(l3[0], l3[1]);
        assert_eq!(l3[2], l3[3]);
        assert_ne!(l3[0], l3[2]);
        assert_ne!(l3[4], l3[0]);
        assert_ne!(l3[4], l3[2]);
    }
}
