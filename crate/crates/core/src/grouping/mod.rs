//! Stakeholder grouping: cluster partitions over (power, legitimacy,
//! urgency) space and the three clustering algorithms that produce them.
//!
//! Partitions are canonicalized at construction: cluster labels 1..k are
//! assigned in decreasing centroid-salience order (salience of a centroid =
//! sum of its three components), which is also the order every export uses.

mod hierarchy;
mod kmeans;
mod kmedoids;

pub use hierarchy::{dendrogram, hierarchical, Dendrogram};
pub use kmeans::{kmeans, kmeans_with_trace};
pub use kmedoids::kmedoids;

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::DIM;
use crate::model::{CsvBuf, StakeholderId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quartile,
    Kmeans,
    Kmedoids,
    Hierarchical,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quartile => "quartile",
            Method::Kmeans => "kmeans",
            Method::Kmedoids => "kmedoids",
            Method::Hierarchical => "hierarchical",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A partition of the stakeholders into k nonempty clusters.
///
/// Cluster indices are 1-based. Centroids are arithmetic means of the raw
/// component vectors regardless of the scaling the algorithm ran on.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    method: Method,
    k: usize,
    assignment: BTreeMap<StakeholderId, usize>,
    centroids: Vec<[f64; DIM]>,
    sizes: Vec<usize>,
    definitive: usize,
    /// PAM only: medoid id per cluster, parallel to `centroids`.
    medoids: Option<Vec<StakeholderId>>,
}

impl ClusterPartition {
    /// Canonical constructor used by every grouping algorithm: takes raw
    /// per-row labels (arbitrary usize values), computes sizes and raw-unit
    /// centroids, relabels clusters 1..k by decreasing centroid salience
    /// (ties: larger size, then earlier original label), and designates the
    /// definitive cluster.
    pub fn from_labels(
        ids: &[StakeholderId],
        raw: &[[f64; DIM]],
        labels: &[usize],
        method: Method,
        medoid_rows: Option<&[usize]>,
    ) -> Result<Self> {
        if ids.len() != raw.len() || ids.len() != labels.len() {
            return Err(Error::Internal("label/row length mismatch".into()));
        }
        if ids.is_empty() {
            return Err(Error::Internal("cannot partition zero rows".into()));
        }
        // compress distinct labels in encounter (row) order
        let mut index_of: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in labels {
            let next = index_of.len();
            index_of.entry(l).or_insert(next);
        }
        let k = index_of.len();
        let mut sums = vec![[0.0; DIM]; k];
        let mut sizes = vec![0usize; k];
        for (row, &l) in labels.iter().enumerate() {
            let c = index_of[&l];
            sizes[c] += 1;
            for d in 0..DIM {
                sums[c][d] += raw[row][d];
            }
        }
        let centroids: Vec<[f64; DIM]> = sums
            .iter()
            .zip(&sizes)
            .map(|(s, &n)| {
                let mut c = [0.0; DIM];
                for d in 0..DIM {
                    c[d] = s[d] / n as f64;
                }
                c
            })
            .collect();

        // canonical cluster order: salience desc, size desc, original asc
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            let sa: f64 = centroids[a].iter().sum();
            let sb: f64 = centroids[b].iter().sum();
            sb.partial_cmp(&sa)
                .expect("finite centroids")
                .then(sizes[b].cmp(&sizes[a]))
                .then(a.cmp(&b))
        });
        let mut rank = vec![0usize; k]; // old index -> 1-based new label
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new + 1;
        }

        let assignment: BTreeMap<StakeholderId, usize> = ids
            .iter()
            .zip(labels)
            .map(|(id, &l)| (id.clone(), rank[index_of[&l]]))
            .collect();
        if assignment.len() != ids.len() {
            return Err(Error::Internal("duplicate id in feature rows".into()));
        }
        let centroids: Vec<[f64; DIM]> = order.iter().map(|&o| centroids[o]).collect();
        let sizes: Vec<usize> = order.iter().map(|&o| sizes[o]).collect();
        // medoid_rows[s] belongs to original label s; route it through the
        // same label compression the assignments use
        let medoids = match medoid_rows {
            None => None,
            Some(rows) => {
                let mut by_compressed: Vec<Option<StakeholderId>> = vec![None; k];
                for (&label, &c) in &index_of {
                    let &row = rows.get(label).ok_or_else(|| {
                        Error::Internal(format!("no medoid row for cluster label {label}"))
                    })?;
                    by_compressed[c] = Some(ids[row].clone());
                }
                Some(
                    order
                        .iter()
                        .map(|&o| by_compressed[o].clone().expect("label seen in assignment"))
                        .collect(),
                )
            }
        };

        let mut part = Self {
            method,
            k,
            assignment,
            centroids,
            sizes,
            definitive: 1,
            medoids,
        };
        part.designate_definitive();
        Ok(part)
    }

    /// Assembles a partition exactly as given (no canonical reordering);
    /// checks the structural invariants and designates the definitive
    /// cluster. Intended for tests and for callers that already hold a
    /// partition in a fixed cluster order.
    pub fn from_parts(
        method: Method,
        assignment: BTreeMap<StakeholderId, usize>,
        centroids: Vec<[f64; DIM]>,
        sizes: Vec<usize>,
    ) -> Result<Self> {
        let k = centroids.len();
        if k == 0 || sizes.len() != k {
            return Err(Error::Internal("malformed partition parts".into()));
        }
        if sizes.iter().sum::<usize>() != assignment.len() || sizes.contains(&0) {
            return Err(Error::Internal("cluster sizes inconsistent".into()));
        }
        if assignment.values().any(|&c| c < 1 || c > k) {
            return Err(Error::Internal("cluster index outside 1..=k".into()));
        }
        let mut part = Self {
            method,
            k,
            assignment,
            centroids,
            sizes,
            definitive: 1,
            medoids: None,
        };
        part.designate_definitive();
        Ok(part)
    }

    /// Recomputes the definitive-cluster designation: the cluster whose
    /// centroid has the largest component sum, ties broken by larger size,
    /// then lower cluster index. Returns the 1-based index.
    pub fn designate_definitive(&mut self) -> usize {
        let mut best = 0usize;
        for c in 1..self.k {
            let sc: f64 = self.centroids[c].iter().sum();
            let sb: f64 = self.centroids[best].iter().sum();
            if sc > sb || (sc == sb && self.sizes[c] > self.sizes[best]) {
                best = c;
            }
        }
        self.definitive = best + 1;
        self.definitive
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Map from stakeholder id to 1-based cluster index.
    pub fn assignment(&self) -> &BTreeMap<StakeholderId, usize> {
        &self.assignment
    }

    pub fn cluster_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    /// Raw-unit centroids, indexed by cluster-1.
    pub fn centroids(&self) -> &[[f64; DIM]] {
        &self.centroids
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn definitive_cluster(&self) -> usize {
        self.definitive
    }

    pub fn medoids(&self) -> Option<&[StakeholderId]> {
        self.medoids.as_deref()
    }

    pub fn centroid_salience(&self, cluster: usize) -> f64 {
        self.centroids[cluster - 1].iter().sum()
    }

    /// Member ids of one cluster, in id order.
    pub fn members(&self, cluster: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &c)| c == cluster)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn definitive_members(&self) -> Vec<&str> {
        self.members(self.definitive)
    }

    /// `clusters.csv`: one row per stakeholder (id order) with its cluster
    /// index and a 0/1 definitive marker.
    pub fn write_clusters_csv(&self, path: &Path) -> Result<()> {
        let mut w = CsvBuf::new(&["id", "cluster", "definitive"]);
        for (id, &c) in &self.assignment {
            let flag = if c == self.definitive { "1" } else { "0" };
            w.row(&[id, &c.to_string(), flag]);
        }
        w.finish(path)
    }

    /// `centroids.csv`: one row per cluster in label order (which is
    /// decreasing centroid salience).
    pub fn write_centroids_csv(&self, path: &Path) -> Result<()> {
        let mut w = CsvBuf::new(&["cluster", "size", "power", "legitimacy", "urgency", "salience"]);
        for c in 0..self.k {
            let [p, l, u] = self.centroids[c];
            w.row(&[
                &(c + 1).to_string(),
                &self.sizes[c].to_string(),
                &format!("{p}"),
                &format!("{l}"),
                &format!("{u}"),
                &format!("{}", p + l + u),
            ]);
        }
        w.finish(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<StakeholderId> {
        (0..n).map(|i| format!("s{i:02}")).collect()
    }

    #[test]
    fn canonical_labels_follow_decreasing_centroid_salience() {
        let raw = vec![
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [5.0, 5.0, 5.0],
            [9.0, 9.0, 9.0],
        ];
        let labels = vec![7, 7, 3, 9];
        let p =
            ClusterPartition::from_labels(&ids(4), &raw, &labels, Method::Kmeans, None).unwrap();
        assert_eq!(p.k(), 3);
        // cluster 1 = the (9,9,9) point, cluster 3 = the two low points
        assert_eq!(p.cluster_of("s03"), Some(1));
        assert_eq!(p.cluster_of("s02"), Some(2));
        assert_eq!(p.cluster_of("s00"), Some(3));
        assert_eq!(p.sizes(), &[1, 1, 2]);
        assert_eq!(p.definitive_cluster(), 1);
        let sal: Vec<f64> = (1..=3).map(|c| p.centroid_salience(c)).collect();
        assert!(sal.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn designate_prefers_salience_then_size() {
        // dominance case
        let mut asg = BTreeMap::new();
        asg.insert("a".to_string(), 1);
        asg.insert("b".to_string(), 2);
        let p = ClusterPartition::from_parts(
            Method::Kmeans,
            asg,
            vec![[1.0, 1.0, 1.0], [5.0, 5.0, 5.0]],
            vec![1, 1],
        )
        .unwrap();
        assert_eq!(p.definitive_cluster(), 2);

        // highest centroid salience wins among four
        let mut asg = BTreeMap::new();
        for (i, id) in ["a", "b", "c", "d"].iter().enumerate() {
            asg.insert(id.to_string(), i + 1);
        }
        let p = ClusterPartition::from_parts(
            Method::Kmeans,
            asg,
            vec![
                [46.78, 120.25, 28.17],
                [33.14, 39.28, 6.97],
                [16.88, 36.00, 45.08],
                [0.76, 19.18, 14.76],
            ],
            vec![1, 1, 1, 1],
        )
        .unwrap();
        assert_eq!(p.definitive_cluster(), 1);

        // equal sums: larger cluster wins
        let mut asg = BTreeMap::new();
        for i in 0..30 {
            asg.insert(format!("s{i:02}"), if i < 10 { 1 } else { 2 });
        }
        let p = ClusterPartition::from_parts(
            Method::Kmeans,
            asg,
            vec![[3.0, 0.0, 0.0], [1.0, 1.0, 1.0]],
            vec![10, 20],
        )
        .unwrap();
        assert_eq!(p.definitive_cluster(), 2);
    }

    #[test]
    fn definitive_designation_ignores_uniform_scaling() {
        let raw = vec![[1.0, 2.0, 3.0], [4.0, 4.0, 4.0], [0.5, 0.5, 0.1]];
        let labels = vec![0, 1, 2];
        let a =
            ClusterPartition::from_labels(&ids(3), &raw, &labels, Method::Kmeans, None).unwrap();
        let scaled: Vec<[f64; DIM]> =
            raw.iter().map(|v| [v[0] * 7.5, v[1] * 7.5, v[2] * 7.5]).collect();
        let b =
            ClusterPartition::from_labels(&ids(3), &scaled, &labels, Method::Kmeans, None).unwrap();
        assert_eq!(a.definitive_cluster(), b.definitive_cluster());
        assert_eq!(a.assignment(), b.assignment());
    }
}
