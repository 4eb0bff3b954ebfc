//! Feature matrix for grouping: one row per stakeholder holding the
//! (power, legitimacy, urgency) vector, in lexicographic id order.
//!
//! Clustering may run on z-scored columns, but the raw vectors are always
//! kept alongside: centroids are reported in original units.

use crate::model::{ProjectDataset, StakeholderId};

pub const DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    #[default]
    Raw,
    Zscore,
}

impl Scaling {
    pub fn as_str(self) -> &'static str {
        match self {
            Scaling::Raw => "raw",
            Scaling::Zscore => "zscore",
        }
    }
}

impl std::str::FromStr for Scaling {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Scaling::Raw),
            "zscore" => Ok(Scaling::Zscore),
            other => Err(crate::Error::InvalidParam(format!(
                "unknown scaling {other:?} (expected raw or zscore)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    ids: Vec<StakeholderId>,
    raw: Vec<[f64; DIM]>,
    working: Vec<[f64; DIM]>,
    scaling: Scaling,
}

impl FeatureMatrix {
    /// Rows in id order, one per stakeholder of the dataset.
    pub fn from_dataset(dataset: &ProjectDataset, scaling: Scaling) -> Self {
        let rows = dataset
            .stakeholders()
            .iter()
            .map(|s| (s.id.clone(), [s.power, s.legitimacy, s.urgency]))
            .collect();
        Self::from_rows(rows, scaling)
    }

    /// Builds directly from (id, vector) pairs; rows are re-sorted by id.
    pub fn from_rows(mut rows: Vec<(StakeholderId, [f64; DIM])>, scaling: Scaling) -> Self {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let ids = rows.iter().map(|(id, _)| id.clone()).collect();
        let raw: Vec<[f64; DIM]> = rows.into_iter().map(|(_, v)| v).collect();
        let working = match scaling {
            Scaling::Raw => raw.clone(),
            Scaling::Zscore => zscore(&raw),
        };
        Self {
            ids,
            raw,
            working,
            scaling,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[StakeholderId] {
        &self.ids
    }

    pub fn raw(&self) -> &[[f64; DIM]] {
        &self.raw
    }

    /// The vectors clustering actually runs on (scaled when requested).
    pub fn working(&self) -> &[[f64; DIM]] {
        &self.working
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// Componentwise (min, max) of the working vectors.
    pub fn bounding_box(&self) -> ([f64; DIM], [f64; DIM]) {
        let mut lo = [f64::INFINITY; DIM];
        let mut hi = [f64::NEG_INFINITY; DIM];
        for v in &self.working {
            for d in 0..DIM {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    /// Same ids and scaling mode, different working vectors — used by the
    /// gap statistic to score uniform reference samples through the same
    /// clustering path.
    pub(crate) fn with_working(&self, working: Vec<[f64; DIM]>) -> Self {
        assert_eq!(working.len(), self.len());
        Self {
            ids: self.ids.clone(),
            raw: working.clone(),
            working,
            scaling: self.scaling,
        }
    }
}

/// Column-wise z-scoring with the sample standard deviation; a constant
/// column maps to all zeros.
fn zscore(raw: &[[f64; DIM]]) -> Vec<[f64; DIM]> {
    let n = raw.len();
    if n == 0 {
        return Vec::new();
    }
    let mut mean = [0.0; DIM];
    for v in raw {
        for d in 0..DIM {
            mean[d] += v[d];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut sd = [0.0; DIM];
    if n > 1 {
        for v in raw {
            for d in 0..DIM {
                sd[d] += (v[d] - mean[d]).powi(2);
            }
        }
        for s in &mut sd {
            *s = (*s / (n - 1) as f64).sqrt();
        }
    }
    raw.iter()
        .map(|v| {
            let mut out = [0.0; DIM];
            for d in 0..DIM {
                out[d] = if sd[d] > 0.0 { (v[d] - mean[d]) / sd[d] } else { 0.0 };
            }
            out
        })
        .collect()
}

pub fn euclidean_sq(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    let mut s = 0.0;
    for d in 0..DIM {
        let diff = a[d] - b[d];
        s += diff * diff;
    }
    s
}

pub fn euclidean(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    euclidean_sq(a, b).sqrt()
}
