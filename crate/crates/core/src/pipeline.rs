//! End-to-end orchestration: ingest → filter → salience → grouping →
//! per-group release planning → coverage comparison → report files.
//!
//! Everything a run writes lands under the configured output directory:
//! `salience.csv`, per-method grouping exports under `groups/<method>/`,
//! per-front solution files under `fronts/`, `coverage.csv`,
//! `comparison.json`, `report.json`, and `radar.svg`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::coverage::{
    compare, comparison_matrix, front_coverage, write_comparison_json, write_coverage_csv,
    CoverageComparison, CoverageVector,
};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Scaling};
use crate::fsutil::atomic_write;
use crate::grouping::{hierarchical, kmeans, kmedoids, ClusterPartition, Method};
use crate::model::{ProjectDataset, StakeholderId};
use crate::nrp::{build_instance, build_instance_abs, greedy_front, NrpInstance, ParetoFront};
use crate::radar::emit_radar;
use crate::salience::{compute_salience, quartile_groups, summarize, SalienceSummary, SalienceTable};
use crate::validation::{recommend_k, KRecommendation};

/// Grouping method selector; `All` runs quartile bands plus every
/// clustering method in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Quartile,
    Kmeans,
    Kmedoids,
    Hierarchical,
    All,
}

impl MethodChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::Quartile => "quartile",
            MethodChoice::Kmeans => "kmeans",
            MethodChoice::Kmedoids => "kmedoids",
            MethodChoice::Hierarchical => "hierarchical",
            MethodChoice::All => "all",
        }
    }

    /// The concrete grouping methods this choice expands to.
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Quartile => vec![Method::Quartile],
            MethodChoice::Kmeans => vec![Method::Kmeans],
            MethodChoice::Kmedoids => vec![Method::Kmedoids],
            MethodChoice::Hierarchical => vec![Method::Hierarchical],
            MethodChoice::All => vec![
                Method::Quartile,
                Method::Kmeans,
                Method::Kmedoids,
                Method::Hierarchical,
            ],
        }
    }
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quartile" => Ok(MethodChoice::Quartile),
            "kmeans" => Ok(MethodChoice::Kmeans),
            "kmedoids" => Ok(MethodChoice::Kmedoids),
            "hierarchical" => Ok(MethodChoice::Hierarchical),
            "all" => Ok(MethodChoice::All),
            other => Err(Error::InvalidParam(format!(
                "unknown method {other:?} (expected quartile, kmeans, kmedoids, hierarchical, or all)"
            ))),
        }
    }
}

/// Full configuration of one `run` invocation; echoed into `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub method: MethodChoice,
    /// Cluster count; absent → majority vote of the validity indices.
    pub k: Option<usize>,
    pub scaling: Scaling,
    pub b1_frac: f64,
    pub b2_frac: f64,
    /// Absolute effort bounds; when present they override the fractions.
    pub b1_abs: Option<f64>,
    pub b2_abs: Option<f64>,
    pub steps: usize,
    pub attempts: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            method: MethodChoice::All,
            k: None,
            scaling: Scaling::Raw,
            b1_frac: 0.2,
            b2_frac: 0.25,
            b1_abs: None,
            b2_abs: None,
            steps: 100,
            attempts: 50,
            restarts: 25,
            seed: 42,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 < self.b1_frac && self.b1_frac <= self.b2_frac && self.b2_frac <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "effort fractions must satisfy 0 < b1 <= b2 <= 1, got ({}, {})",
                self.b1_frac, self.b2_frac
            )));
        }
        match (self.b1_abs, self.b2_abs) {
            (None, None) => {}
            (Some(b1), Some(b2)) => {
                if !(0.0 < b1 && b1 <= b2) {
                    return Err(Error::InvalidParam(format!(
                        "absolute bounds must satisfy 0 < b1 <= b2, got ({b1}, {b2})"
                    )));
                }
            }
            _ => {
                return Err(Error::InvalidParam(
                    "absolute bounds need both --b1-abs and --b2-abs".into(),
                ))
            }
        }
        if self.steps == 0 {
            return Err(Error::InvalidParam("steps must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParam("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// One grouping outcome inside the report.
#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub method: Method,
    pub k: usize,
    /// Present when k came from the validity-index vote.
    pub recommendation: Option<KRecommendation>,
    pub sizes: Vec<usize>,
    pub definitive_cluster: usize,
    pub definitive_size: usize,
    pub definitive_centroid: [f64; 3],
    pub definitive_salience: f64,
    pub definitive_members: Vec<StakeholderId>,
    /// 100·(1 − definitive_size / retained stakeholders)
    pub reduction_pct: f64,
}

/// Solver provenance and objective ranges for one front.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontSummary {
    pub front_id: String,
    pub solutions: usize,
    pub sat_min: f64,
    pub sat_max: f64,
    pub effort_min: f64,
    pub effort_max: f64,
    pub b1: f64,
    pub b2: f64,
    pub steps: usize,
    pub attempts: usize,
    pub seed: u64,
    pub scaling: Scaling,
}

impl FrontSummary {
    fn of(front_id: &str, front: &ParetoFront, inst: &NrpInstance, config: &PipelineConfig) -> Self {
        let sats: Vec<f64> = front.solutions.iter().map(|s| s.total_sat).collect();
        let efforts: Vec<f64> = front.solutions.iter().map(|s| s.total_effort).collect();
        let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
        let (b1, b2) = inst.bounds();
        Self {
            front_id: front_id.to_string(),
            solutions: front.solutions.len(),
            sat_min: fold(&sats, f64::min, f64::INFINITY),
            sat_max: fold(&sats, f64::max, f64::NEG_INFINITY),
            effort_min: fold(&efforts, f64::min, f64::INFINITY),
            effort_max: fold(&efforts, f64::max, f64::NEG_INFINITY),
            b1,
            b2,
            steps: config.steps,
            attempts: config.attempts,
            seed: config.seed,
            scaling: config.scaling,
        }
    }
}

/// Coverage comparisons only make sense between fronts produced under the
/// same solver settings; the recorded provenance fields prove it.
fn assert_same_settings(a: &FrontSummary, b: &FrontSummary) -> Result<()> {
    let key = |f: &FrontSummary| (f.b1, f.b2, f.steps, f.attempts, f.seed, f.scaling);
    if key(a) != key(b) {
        return Err(Error::Internal(format!(
            "fronts {:?} and {:?} were produced with different solver settings",
            a.front_id, b.front_id
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PValueEntry {
    pub baseline_id: String,
    pub candidate_id: String,
    pub p: f64,
}

/// Everything `report.json` holds.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub stakeholders_ingested: usize,
    pub stakeholders_retained: usize,
    pub requirements_retained: usize,
    pub demanding_stakeholders: usize,
    pub salience_summary: SalienceSummary,
    pub groups: Vec<GroupReport>,
    pub fronts: Vec<FrontSummary>,
    /// Table of each front against the all-stakeholder baseline (first row
    /// compares the baseline with itself).
    pub coverage_vs_baseline: Vec<CoverageComparison>,
    /// Wilcoxon p for every ordered front pair.
    pub p_value_matrix: Vec<PValueEntry>,
    /// Per method: 100·(1 − definitive group size / retained stakeholders).
    pub reduction_pct: BTreeMap<String, f64>,
}

/// Front id of the all-retained-stakeholders baseline.
pub const BASELINE_ID: &str = "def0";

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn cluster_with(
    features: &FeatureMatrix,
    method: Method,
    k: usize,
    config: &PipelineConfig,
) -> Result<ClusterPartition> {
    match method {
        Method::Kmeans => kmeans(features, k, config.seed, config.restarts),
        Method::Kmedoids => kmedoids(features, k, config.seed),
        Method::Hierarchical => hierarchical(features, k),
        Method::Quartile => Err(Error::Internal("quartile grouping is not a clustering".into())),
    }
}

fn build(
    dataset: &ProjectDataset,
    table: &SalienceTable,
    subset: &BTreeSet<StakeholderId>,
    config: &PipelineConfig,
) -> Result<NrpInstance> {
    match (config.b1_abs, config.b2_abs) {
        (Some(b1), Some(b2)) => build_instance_abs(dataset, table, subset, b1, b2),
        _ => build_instance(dataset, table, subset, config.b1_frac, config.b2_frac),
    }
}

/// Runs the full pipeline and writes every export under
/// `config.output_dir`. An empty front (no requirement subset fits the
/// effort window) aborts the run with the infeasibility error.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    config.validate()?;
    if config.method == MethodChoice::Quartile && config.k.is_some() {
        eprintln!("warning: --k is ignored for quartile grouping (always 4 salience bands)");
    }

    let out = config.output_dir.clone();
    mkdir(&out)?;
    mkdir(&out.join("fronts"))?;

    let raw = ProjectDataset::ingest(&config.input_dir)?;
    let filtered = raw.filter_expectant();
    let n = filtered.stakeholders().len();
    if n == 0 {
        return Err(Error::InvalidDataset(
            "no stakeholders left after the expectant filter".into(),
        ));
    }
    if filtered.requirements().is_empty() {
        return Err(Error::InvalidDataset("no requirements with votes remain".into()));
    }

    let table = compute_salience(&filtered);
    table.write_csv(&out.join("salience.csv"))?;
    let salience_summary = summarize(&table)?;
    let features = FeatureMatrix::from_dataset(&filtered, config.scaling);

    // grouping per method
    let mut groups: Vec<(Method, ClusterPartition, Option<KRecommendation>)> = Vec::new();
    for method in config.method.methods() {
        let gdir = out.join("groups").join(method.as_str());
        mkdir(&gdir)?;
        let (partition, rec) = if method == Method::Quartile {
            (quartile_groups(&table)?, None)
        } else {
            let (k, rec) = match config.k {
                Some(k) => (k, None),
                None => {
                    let hi = (n - 1).min(10);
                    let rec = recommend_k(&features, method, (2, hi), config.seed)?;
                    (rec.winner, Some(rec))
                }
            };
            (cluster_with(&features, method, k, config)?, rec)
        };
        partition.write_clusters_csv(&gdir.join("clusters.csv"))?;
        partition.write_centroids_csv(&gdir.join("centroids.csv"))?;
        if let Some(r) = &rec {
            r.write_json(&gdir.join("k_recommendation.json"))?;
        }
        groups.push((method, partition, rec));
    }

    // release planning: the all-retained baseline, then each definitive group
    let mut fronts: Vec<(String, ParetoFront, FrontSummary)> = Vec::new();
    let mut solve = |front_id: &str, subset: &BTreeSet<StakeholderId>| -> Result<()> {
        let inst = build(&filtered, &table, subset, config)?;
        let front = greedy_front(&inst, config.steps, config.attempts, config.seed)?;
        if front.infeasible {
            let (b1, b2) = inst.bounds();
            return Err(Error::InfeasibleBudget { b1, b2 });
        }
        front.write_csv(&out.join("fronts").join(format!("{front_id}.csv")))?;
        let summary = FrontSummary::of(front_id, &front, &inst, config);
        fronts.push((front_id.to_string(), front, summary));
        Ok(())
    };

    let all_ids: BTreeSet<StakeholderId> =
        filtered.stakeholders().iter().map(|s| s.id.clone()).collect();
    solve(BASELINE_ID, &all_ids)?;
    for (method, partition, _) in &groups {
        let members: BTreeSet<StakeholderId> = partition
            .definitive_members()
            .into_iter()
            .map(str::to_string)
            .collect();
        solve(method.as_str(), &members)?;
    }

    // coverage vectors, comparisons, radar
    let vectors: Vec<CoverageVector> = fronts
        .iter()
        .map(|(id, front, _)| front_coverage(id, front, filtered.votes()))
        .collect::<Result<_>>()?;
    write_coverage_csv(&vectors, &out.join("coverage.csv"))?;
    let matrix = comparison_matrix(&vectors)?;
    write_comparison_json(&matrix, &out.join("comparison.json"))?;
    emit_radar(&vectors, &table, filtered.votes(), &out.join("radar.svg"))?;

    let coverage_vs_baseline: Vec<CoverageComparison> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            assert_same_settings(&fronts[0].2, &fronts[i].2)?;
            compare(&vectors[0], v)
        })
        .collect::<Result<_>>()?;
    let p_value_matrix: Vec<PValueEntry> = matrix
        .iter()
        .map(|c| PValueEntry {
            baseline_id: c.baseline_id.clone(),
            candidate_id: c.candidate_id.clone(),
            p: c.wilcoxon_p,
        })
        .collect();

    let group_reports: Vec<GroupReport> = groups
        .iter()
        .map(|(method, partition, rec)| {
            let d = partition.definitive_cluster();
            let definitive_size = partition.sizes()[d - 1];
            GroupReport {
                method: *method,
                k: partition.k(),
                recommendation: rec.clone(),
                sizes: partition.sizes().to_vec(),
                definitive_cluster: d,
                definitive_size,
                definitive_centroid: partition.centroids()[d - 1],
                definitive_salience: partition.centroid_salience(d),
                definitive_members: partition
                    .definitive_members()
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
                reduction_pct: 100.0 * (1.0 - definitive_size as f64 / n as f64),
            }
        })
        .collect();
    let reduction_pct: BTreeMap<String, f64> = group_reports
        .iter()
        .map(|g| (g.method.as_str().to_string(), g.reduction_pct))
        .collect();

    let report = PipelineReport {
        config: config.clone(),
        stakeholders_ingested: raw.stakeholders().len(),
        stakeholders_retained: n,
        requirements_retained: filtered.requirements().len(),
        demanding_stakeholders: filtered.votes().stakeholders().count(),
        salience_summary,
        groups: group_reports,
        fronts: fronts.iter().map(|(_, _, s)| s.clone()).collect(),
        coverage_vs_baseline,
        p_value_matrix,
        reduction_pct,
    };
    let mut bytes = serde_json::to_vec_pretty(&report)
        .map_err(|e| Error::Internal(format!("serializing report: {e}")))?;
    bytes.push(b'\n');
    atomic_write(&out.join("report.json"), &bytes)?;

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth, SynthSpec};

    fn four_blob_spec(seed: u64) -> SynthSpec {
        SynthSpec {
            n_stakeholders: 48,
            n_requirements: 20,
            n_groups: 4,
            component_means: vec![
                [10.0, 10.0, 100.0],
                [40.0, 40.0, 100.0],
                [70.0, 70.0, 100.0],
                [100.0, 100.0, 100.0],
            ],
            component_sd: 1.0,
            votes_per_stakeholder: (1, 3),
            effort_range: (5.0, 15.0),
            seed,
        }
    }

    #[test]
    fn four_blob_run_recommends_k4_and_the_top_blob_is_definitive() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let output = dir.path().join("out");
        std::fs::create_dir_all(&input).unwrap();
        let (_, truth) = synth(&four_blob_spec(11), &input).unwrap();

        let mut config = PipelineConfig::new(&input, &output);
        config.method = MethodChoice::Kmeans;
        let report = run_pipeline(&config).unwrap();

        let g = &report.groups[0];
        assert_eq!(g.k, 4);
        assert_eq!(g.recommendation.as_ref().unwrap().winner, 4);
        let expected: Vec<String> = truth
            .iter()
            .filter(|&(_, &grp)| grp == 4)
            .map(|(id, _)| id.clone())
            .collect();
        assert_eq!(g.definitive_members, expected);
        assert_eq!(g.reduction_pct, 75.0);

        for file in [
            "salience.csv",
            "coverage.csv",
            "comparison.json",
            "report.json",
            "radar.svg",
        ] {
            assert!(output.join(file).exists(), "{file} missing");
        }
        assert!(output.join("groups/kmeans/clusters.csv").exists());
        assert!(output.join("groups/kmeans/k_recommendation.json").exists());
        assert!(output.join("fronts/def0.csv").exists());
        assert!(output.join("fronts/kmeans.csv").exists());
    }

    #[test]
    fn identical_runs_write_identical_reports() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let output = dir.path().join("out");
        std::fs::create_dir_all(&input).unwrap();
        synth(&four_blob_spec(23), &input).unwrap();

        let mut config = PipelineConfig::new(&input, &output);
        config.method = MethodChoice::All;
        config.k = Some(4);
        run_pipeline(&config).unwrap();
        let first = std::fs::read(output.join("report.json")).unwrap();
        run_pipeline(&config).unwrap();
        let second = std::fs::read(output.join("report.json")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn all_methods_produce_four_groups_and_five_fronts() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let output = dir.path().join("out");
        std::fs::create_dir_all(&input).unwrap();
        synth(&four_blob_spec(31), &input).unwrap();

        let mut config = PipelineConfig::new(&input, &output);
        config.method = MethodChoice::All;
        config.k = Some(4);
        let report = run_pipeline(&config).unwrap();
        assert_eq!(report.groups.len(), 4);
        assert_eq!(report.fronts.len(), 5);
        assert_eq!(report.fronts[0].front_id, "def0");
        assert_eq!(report.coverage_vs_baseline.len(), 5);
        assert_eq!(report.coverage_vs_baseline[0].n_equal, report.demanding_stakeholders);
        assert_eq!(report.p_value_matrix.len(), 20);
        assert_eq!(report.reduction_pct.len(), 4);
    }

    #[test]
    fn quartile_run_ignores_k() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let output = dir.path().join("out");
        std::fs::create_dir_all(&input).unwrap();
        synth(&four_blob_spec(47), &input).unwrap();

        let mut config = PipelineConfig::new(&input, &output);
        config.method = MethodChoice::Quartile;
        config.k = Some(7);
        let report = run_pipeline(&config).unwrap();
        assert_eq!(report.groups[0].method, Method::Quartile);
        assert_eq!(report.groups[0].k, 4);
    }

    #[test]
    fn unreachable_effort_window_exits_as_infeasible() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        let output = dir.path().join("out");
        std::fs::create_dir_all(&input).unwrap();
        synth(&four_blob_spec(59), &input).unwrap();

        let mut config = PipelineConfig::new(&input, &output);
        config.method = MethodChoice::Kmeans;
        config.k = Some(2);
        // narrower than any single requirement's effort
        config.b1_abs = Some(1.0);
        config.b2_abs = Some(2.0);
        let err = run_pipeline(&config).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
