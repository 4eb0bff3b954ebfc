//! Per-stakeholder coverage of Pareto fronts, head-to-head counts, and
//! paired Wilcoxon comparisons between fronts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fsutil::atomic_write;
use crate::model::{CsvBuf, StakeholderId, VoteMatrix};
use crate::nrp::{ParetoFront, Solution};
use crate::stats::{coefficient_of_variation, mean, sample_sd, wilcoxon_signed_rank};

/// Coverage fraction per demanding stakeholder for one front.
///
/// Values are fractions (0.30 = 30%); they stay in [0, 1] whenever each
/// stakeholder's points sum to 100, and are bounded by total_points/100 in
/// general.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageVector {
    pub front_id: String,
    pub values: BTreeMap<StakeholderId, f64>,
}

/// Fraction of `stakeholder`'s allotted points captured by `solution`.
pub fn st_coverage(solution: &Solution, stakeholder: &str, votes: &VoteMatrix) -> Result<f64> {
    let Some(row) = votes.of_stakeholder(stakeholder) else {
        return Err(Error::InvalidParam(format!(
            "stakeholder {stakeholder:?} is not demanding (has no votes)"
        )));
    };
    let mut sum = 0.0;
    for rid in &solution.selected {
        if let Some(points) = row.get(rid) {
            sum += points;
        }
    }
    Ok(sum / 100.0)
}

/// Mean coverage over all front members, per demanding stakeholder.
pub fn front_coverage(
    front_id: &str,
    front: &ParetoFront,
    votes: &VoteMatrix,
) -> Result<CoverageVector> {
    if front.solutions.is_empty() {
        return Err(Error::InvalidParam(format!(
            "cannot compute coverage of empty front {front_id:?}"
        )));
    }
    let mut values = BTreeMap::new();
    for sid in votes.stakeholders() {
        let mut per_solution: Vec<f64> = front
            .solutions
            .iter()
            .map(|s| st_coverage(s, sid, votes))
            .collect::<Result<_>>()?;
        // summing in sorted order makes the mean independent of the
        // front's solution order, bit for bit
        per_solution.sort_by(|a, b| a.partial_cmp(b).expect("finite coverage"));
        let sum: f64 = per_solution.iter().sum();
        values.insert(sid.clone(), sum / per_solution.len() as f64);
    }
    Ok(CoverageVector {
        front_id: front_id.to_string(),
        values,
    })
}

/// Head-to-head outcome of one front against a baseline over the shared
/// demanding stakeholders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageComparison {
    pub baseline_id: String,
    pub candidate_id: String,
    /// stakeholders whose candidate coverage is strictly lower / equal
    /// (within 1e-9) / strictly higher than baseline
    pub n_lower: usize,
    pub n_equal: usize,
    pub n_higher: usize,
    pub baseline_mean: f64,
    pub baseline_sd: f64,
    pub baseline_coef_var: f64,
    pub candidate_mean: f64,
    pub candidate_sd: f64,
    pub candidate_coef_var: f64,
    pub wilcoxon_p: f64,
}

const EQ_TOL: f64 = 1e-9;

/// Compares candidate coverage against baseline coverage pairwise.
pub fn compare(baseline: &CoverageVector, candidate: &CoverageVector) -> Result<CoverageComparison> {
    if !baseline.values.keys().eq(candidate.values.keys()) {
        return Err(Error::InvalidParam(format!(
            "coverage key sets differ between fronts {:?} and {:?}",
            baseline.front_id, candidate.front_id
        )));
    }
    if baseline.values.is_empty() {
        return Err(Error::InvalidParam(
            "cannot compare coverage without demanding stakeholders".into(),
        ));
    }

    let mut n_lower = 0;
    let mut n_equal = 0;
    let mut n_higher = 0;
    let mut diffs = Vec::with_capacity(baseline.values.len());
    for (id, &b) in &baseline.values {
        let c = candidate.values[id];
        let d = c - b;
        if d < -EQ_TOL {
            n_lower += 1;
        } else if d > EQ_TOL {
            n_higher += 1;
        } else {
            n_equal += 1;
        }
        diffs.push(d);
    }

    let base: Vec<f64> = baseline.values.values().copied().collect();
    let cand: Vec<f64> = candidate.values.values().copied().collect();
    Ok(CoverageComparison {
        baseline_id: baseline.front_id.clone(),
        candidate_id: candidate.front_id.clone(),
        n_lower,
        n_equal,
        n_higher,
        baseline_mean: mean(&base),
        baseline_sd: sample_sd(&base),
        baseline_coef_var: coefficient_of_variation(&base),
        candidate_mean: mean(&cand),
        candidate_sd: sample_sd(&cand),
        candidate_coef_var: coefficient_of_variation(&cand),
        wilcoxon_p: wilcoxon_signed_rank(&diffs).p,
    })
}

/// All ordered pairs (baseline, candidate), baseline ≠ candidate, in the
/// order the vectors are given.
pub fn comparison_matrix(vectors: &[CoverageVector]) -> Result<Vec<CoverageComparison>> {
    let mut out = Vec::new();
    for (i, b) in vectors.iter().enumerate() {
        for (j, c) in vectors.iter().enumerate() {
            if i != j {
                out.push(compare(b, c)?);
            }
        }
    }
    Ok(out)
}

/// `coverage.csv`: `front_id,stakeholder_id,coverage_pct` with the fraction
/// reported as percent, two decimals.
pub fn write_coverage_csv(vectors: &[CoverageVector], path: &Path) -> Result<()> {
    let mut w = CsvBuf::new(&["front_id", "stakeholder_id", "coverage_pct"]);
    for v in vectors {
        for (sid, &frac) in &v.values {
            w.row(&[&v.front_id, sid, &format!("{:.2}", frac * 100.0)]);
        }
    }
    w.finish(path)
}

/// `comparison.json`: the full pairwise comparison matrix.
pub fn write_comparison_json(comparisons: &[CoverageComparison], path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(comparisons)
        .map_err(|e| Error::Internal(format!("serializing comparisons: {e}")))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}
