//! Command-line front end for salience scoring, stakeholder grouping,
//! release planning, and coverage comparison.
//!
//! Exit codes: 0 success, 1 input or parameter error, 2 infeasible effort
//! window, 3 internal invariant failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nrp_core::coverage::{
    comparison_matrix, front_coverage, write_comparison_json, write_coverage_csv, CoverageVector,
};
use nrp_core::features::{FeatureMatrix, Scaling};
use nrp_core::grouping::{hierarchical, kmeans, kmedoids, ClusterPartition, Method};
use nrp_core::nrp::{build_instance, build_instance_abs, greedy_front, ParetoFront};
use nrp_core::pipeline::{run_pipeline, MethodChoice, PipelineConfig, BASELINE_ID};
use nrp_core::salience::{
    compute_salience, quartile_groups, summarize, ComponentSummary, SalienceTable,
};
use nrp_core::synth::{synth, SynthSpec};
use nrp_core::validation::{recommend_k, KRecommendation};
use nrp_core::{Error, ProjectDataset, Result};

#[derive(Parser)]
#[command(
    name = "nrp",
    version,
    about = "Stakeholder salience scoring, grouping, and next-release planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a dataset and write a normalized copy of it
    Ingest(IoArgs),
    /// Score the retained stakeholders and export salience.csv
    Salience(IoArgs),
    /// Partition the retained stakeholders into salience groups
    Group(GroupArgs),
    /// Vote on a cluster count with the validity indices
    RecommendK(RecommendKArgs),
    /// Compute a release-plan front for one stakeholder group
    Solve(SolveArgs),
    /// Compare demand coverage across existing front files
    Coverage(CoverageArgs),
    /// Run the full pipeline and write every export plus report.json
    Run(RunArgs),
    /// Generate a synthetic dataset with known group structure
    Synth(SynthArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Directory holding stakeholders.csv, recommendations.csv, votes.csv,
    /// and efforts.csv
    #[arg(long, value_name = "DIR")]
    input_dir: PathBuf,
    /// Directory outputs are written into
    #[arg(long, value_name = "DIR")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct GroupArgs {
    #[command(flatten)]
    io: IoArgs,
    /// quartile, kmeans, kmedoids, hierarchical, or all
    #[arg(long, default_value = "all")]
    method: MethodChoice,
    /// Cluster count; omitted, the validity indices vote on it
    #[arg(long)]
    k: Option<usize>,
    /// Feature scaling for clustering: raw or zscore
    #[arg(long, default_value = "raw")]
    scaling: Scaling,
    /// Random restarts for k-means
    #[arg(long, default_value_t = 25)]
    restarts: usize,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct RecommendKArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Clustering method to evaluate: kmeans, kmedoids, or hierarchical
    #[arg(long)]
    method: MethodChoice,
    /// Feature scaling for clustering: raw or zscore
    #[arg(long, default_value = "raw")]
    scaling: Scaling,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Group whose weights drive the objective; omitted, the plan is solved
    /// for all retained stakeholders (the def0 baseline)
    #[arg(long)]
    method: Option<MethodChoice>,
    /// Cluster count; omitted, the validity indices vote on it
    #[arg(long)]
    k: Option<usize>,
    /// Feature scaling for clustering: raw or zscore
    #[arg(long, default_value = "raw")]
    scaling: Scaling,
    /// Lower effort bound as a fraction of total effort
    #[arg(long, default_value_t = 0.2)]
    b1_frac: f64,
    /// Upper effort bound as a fraction of total effort
    #[arg(long, default_value_t = 0.25)]
    b2_frac: f64,
    /// Absolute lower effort bound (overrides --b1-frac; needs --b2-abs)
    #[arg(long)]
    b1_abs: Option<f64>,
    /// Absolute upper effort bound (overrides --b2-frac; needs --b1-abs)
    #[arg(long)]
    b2_abs: Option<f64>,
    /// Effort targets swept across the window
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Improvement attempts per effort target
    #[arg(long, default_value_t = 50)]
    attempts: usize,
    /// Random restarts for k-means
    #[arg(long, default_value_t = 25)]
    restarts: usize,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct CoverageArgs {
    /// Front CSV files to compare; the first one is the baseline
    #[arg(value_name = "FRONT_CSV", num_args = 1.., required = true)]
    fronts: Vec<PathBuf>,
    /// Directory holding the dataset the fronts were solved from
    #[arg(long, value_name = "DIR")]
    input_dir: PathBuf,
    /// Directory coverage.csv and comparison.json are written into
    #[arg(long, value_name = "DIR")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    io: IoArgs,
    /// quartile, kmeans, kmedoids, hierarchical, or all
    #[arg(long, default_value = "all")]
    method: MethodChoice,
    /// Cluster count; omitted, the validity indices vote on it
    #[arg(long)]
    k: Option<usize>,
    /// Feature scaling for clustering: raw or zscore
    #[arg(long, default_value = "raw")]
    scaling: Scaling,
    /// Lower effort bound as a fraction of total effort
    #[arg(long, default_value_t = 0.2)]
    b1_frac: f64,
    /// Upper effort bound as a fraction of total effort
    #[arg(long, default_value_t = 0.25)]
    b2_frac: f64,
    /// Absolute lower effort bound (overrides --b1-frac; needs --b2-abs)
    #[arg(long)]
    b1_abs: Option<f64>,
    /// Absolute upper effort bound (overrides --b2-frac; needs --b1-abs)
    #[arg(long)]
    b2_abs: Option<f64>,
    /// Effort targets swept across the window
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Improvement attempts per effort target
    #[arg(long, default_value_t = 50)]
    attempts: usize,
    /// Random restarts for k-means
    #[arg(long, default_value_t = 25)]
    restarts: usize,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory the generated CSV files are written into
    #[arg(long, value_name = "DIR")]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 40)]
    n_stakeholders: usize,
    #[arg(long, default_value_t = 20)]
    n_requirements: usize,
    #[arg(long, default_value_t = 4)]
    n_groups: usize,
    /// Per-group component means as "p,l,u;p,l,u;..." (one triple per
    /// group); omitted, groups are spread evenly from 20 to 100 on power
    /// and legitimacy with urgency 100
    #[arg(long, value_name = "TRIPLES")]
    group_means: Option<String>,
    /// Standard deviation around each group's component means
    #[arg(long, default_value_t = 5.0)]
    component_sd: f64,
    /// Fewest requirements each stakeholder votes on
    #[arg(long, default_value_t = 1)]
    votes_min: usize,
    /// Most requirements each stakeholder votes on
    #[arg(long, default_value_t = 5)]
    votes_max: usize,
    /// Smallest requirement effort
    #[arg(long, default_value_t = 5.0)]
    effort_min: f64,
    /// Largest requirement effort
    #[arg(long, default_value_t = 50.0)]
    effort_max: f64,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are not usage errors; everything else is.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Salience(a) => cmd_salience(a),
        Command::Group(a) => cmd_group(a),
        Command::RecommendK(a) => cmd_recommend_k(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Run(a) => cmd_run(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn mkdir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Ingests and filters, rejecting datasets the analysis stages can't use.
fn load_filtered(dir: &Path) -> Result<(ProjectDataset, ProjectDataset)> {
    let raw = ProjectDataset::ingest(dir)?;
    let filtered = raw.filter_expectant();
    if filtered.stakeholders().is_empty() {
        return Err(Error::InvalidDataset(
            "no stakeholders left after the expectant filter".into(),
        ));
    }
    if filtered.requirements().is_empty() {
        return Err(Error::InvalidDataset("no requirements with votes remain".into()));
    }
    Ok((raw, filtered))
}

/// One grouping pass: quartile bands directly, or a clustering method at
/// the given k (voted on by the validity indices when absent).
fn group_once(
    table: &SalienceTable,
    features: &FeatureMatrix,
    method: Method,
    k: Option<usize>,
    restarts: usize,
    seed: u64,
) -> Result<(ClusterPartition, Option<KRecommendation>)> {
    if method == Method::Quartile {
        return Ok((quartile_groups(table)?, None));
    }
    let (k, rec) = match k {
        Some(k) => (k, None),
        None => {
            let hi = (features.len() - 1).min(10);
            let rec = recommend_k(features, method, (2, hi), seed)?;
            (rec.winner, Some(rec))
        }
    };
    let partition = match method {
        Method::Kmeans => kmeans(features, k, seed, restarts)?,
        Method::Kmedoids => kmedoids(features, k, seed)?,
        Method::Hierarchical => hierarchical(features, k)?,
        Method::Quartile => unreachable!("handled above"),
    };
    Ok((partition, rec))
}

fn cmd_ingest(a: &IoArgs) -> Result<()> {
    let dataset = ProjectDataset::ingest(&a.input_dir)?;
    dataset.write_csv_dir(&a.output_dir)?;
    println!(
        "ingested {} stakeholders, {} requirements, {} recommendation edges, {} votes",
        dataset.stakeholders().len(),
        dataset.requirements().len(),
        dataset.recommendations().len(),
        dataset.votes().len()
    );
    println!("normalized copy written to {}", a.output_dir.display());
    Ok(())
}

fn cmd_salience(a: &IoArgs) -> Result<()> {
    let (raw, filtered) = load_filtered(&a.input_dir)?;
    let table = compute_salience(&filtered);
    mkdir(&a.output_dir)?;
    let path = a.output_dir.join("salience.csv");
    table.write_csv(&path)?;
    let s = summarize(&table)?;
    println!(
        "retained {} of {} stakeholders",
        filtered.stakeholders().len(),
        raw.stakeholders().len()
    );
    let line = |name: &str, c: &ComponentSummary| {
        println!(
            "{name}: min {:.2}  q1 {:.2}  median {:.2}  mean {:.2}  q3 {:.2}  max {:.2}",
            c.min, c.q1, c.median, c.mean, c.q3, c.max
        );
    };
    line("power     ", &s.power);
    line("legitimacy", &s.legitimacy);
    line("urgency   ", &s.urgency);
    line("salience  ", &s.salience);
    println!("written to {}", path.display());
    Ok(())
}

fn cmd_group(a: &GroupArgs) -> Result<()> {
    if a.method == MethodChoice::Quartile && a.k.is_some() {
        eprintln!("warning: --k is ignored for quartile grouping (always 4 salience bands)");
    }
    let (_, filtered) = load_filtered(&a.io.input_dir)?;
    let table = compute_salience(&filtered);
    let features = FeatureMatrix::from_dataset(&filtered, a.scaling);
    let single = a.method != MethodChoice::All;
    for method in a.method.methods() {
        let dir = if single {
            a.io.output_dir.clone()
        } else {
            a.io.output_dir.join("groups").join(method.as_str())
        };
        mkdir(&dir)?;
        let k = if method == Method::Quartile { None } else { a.k };
        let (partition, rec) = group_once(&table, &features, method, k, a.restarts, a.seed)?;
        partition.write_clusters_csv(&dir.join("clusters.csv"))?;
        partition.write_centroids_csv(&dir.join("centroids.csv"))?;
        if let Some(r) = &rec {
            r.write_json(&dir.join("k_recommendation.json"))?;
        }
        let d = partition.definitive_cluster();
        println!(
            "{}: k={} sizes={:?} definitive=cluster {} ({} members, centroid salience {:.2})",
            method.as_str(),
            partition.k(),
            partition.sizes(),
            d,
            partition.sizes()[d - 1],
            partition.centroid_salience(d)
        );
    }
    println!("group files written to {}", a.io.output_dir.display());
    Ok(())
}

fn cmd_recommend_k(a: &RecommendKArgs) -> Result<()> {
    let method = match a.method {
        MethodChoice::Kmeans => Method::Kmeans,
        MethodChoice::Kmedoids => Method::Kmedoids,
        MethodChoice::Hierarchical => Method::Hierarchical,
        MethodChoice::Quartile | MethodChoice::All => {
            return Err(Error::InvalidParam(
                "recommend-k needs a single clustering method (kmeans, kmedoids, or hierarchical)"
                    .into(),
            ))
        }
    };
    let (_, filtered) = load_filtered(&a.io.input_dir)?;
    let features = FeatureMatrix::from_dataset(&filtered, a.scaling);
    let hi = (features.len() - 1).min(10);
    let rec = recommend_k(&features, method, (2, hi), a.seed)?;
    mkdir(&a.io.output_dir)?;
    let path = a.io.output_dir.join("k_recommendation.json");
    rec.write_json(&path)?;
    println!("recommended k = {} for {} over k in [2, {hi}]", rec.winner, method.as_str());
    for (index, k) in &rec.votes {
        println!("  {index} voted k = {k}");
    }
    println!("written to {}", path.display());
    Ok(())
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    if a.method == Some(MethodChoice::Quartile) && a.k.is_some() {
        eprintln!("warning: --k is ignored for quartile grouping (always 4 salience bands)");
    }
    let (_, filtered) = load_filtered(&a.io.input_dir)?;
    let table = compute_salience(&filtered);
    let (front_id, subset): (String, BTreeSet<String>) = match a.method {
        None => (
            BASELINE_ID.to_string(),
            filtered.stakeholders().iter().map(|s| s.id.clone()).collect(),
        ),
        Some(MethodChoice::All) => {
            return Err(Error::InvalidParam(
                "solve plans for one group at a time: omit --method for the all-stakeholder \
                 baseline or name one grouping method"
                    .into(),
            ))
        }
        Some(choice) => {
            let method = choice.methods()[0];
            let features = FeatureMatrix::from_dataset(&filtered, a.scaling);
            let k = if method == Method::Quartile { None } else { a.k };
            let (partition, _) = group_once(&table, &features, method, k, a.restarts, a.seed)?;
            let members = partition
                .definitive_members()
                .into_iter()
                .map(str::to_string)
                .collect();
            (method.as_str().to_string(), members)
        }
    };
    let inst = match (a.b1_abs, a.b2_abs) {
        (Some(b1), Some(b2)) => build_instance_abs(&filtered, &table, &subset, b1, b2)?,
        (None, None) => build_instance(&filtered, &table, &subset, a.b1_frac, a.b2_frac)?,
        _ => {
            return Err(Error::InvalidParam(
                "absolute bounds need both --b1-abs and --b2-abs".into(),
            ))
        }
    };
    let front = greedy_front(&inst, a.steps, a.attempts, a.seed)?;
    if front.infeasible {
        let (b1, b2) = inst.bounds();
        return Err(Error::InfeasibleBudget { b1, b2 });
    }
    let dir = a.io.output_dir.join("fronts");
    mkdir(&dir)?;
    let path = dir.join(format!("{front_id}.csv"));
    front.write_csv(&path)?;
    let (b1, b2) = inst.bounds();
    println!(
        "front {front_id}: {} solutions for {} stakeholders, effort window [{:.2}, {:.2}]",
        front.solutions.len(),
        subset.len(),
        b1,
        b2
    );
    println!("written to {}", path.display());
    Ok(())
}

fn cmd_coverage(a: &CoverageArgs) -> Result<()> {
    let (_, filtered) = load_filtered(&a.input_dir)?;
    let mut seen = BTreeSet::new();
    let mut vectors: Vec<CoverageVector> = Vec::new();
    for path in &a.fronts {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| {
                Error::InvalidParam(format!("front path {} has no usable file name", path.display()))
            })?
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::InvalidParam(format!(
                "duplicate front name {id:?}: front files must have distinct names"
            )));
        }
        let front = ParetoFront::read_csv(path)?;
        for s in &front.solutions {
            for r in &s.selected {
                if filtered.requirement(r).is_none() {
                    return Err(Error::InvalidParam(format!(
                        "front {id:?} selects requirement {r:?} absent from the dataset"
                    )));
                }
            }
        }
        vectors.push(front_coverage(&id, &front, filtered.votes())?);
    }
    mkdir(&a.output_dir)?;
    write_coverage_csv(&vectors, &a.output_dir.join("coverage.csv"))?;
    let matrix = comparison_matrix(&vectors)?;
    write_comparison_json(&matrix, &a.output_dir.join("comparison.json"))?;
    let baseline = &vectors[0].front_id;
    for c in &matrix {
        if &c.baseline_id == baseline && &c.candidate_id != baseline {
            println!(
                "{} vs {}: lower/equal/higher = {}/{}/{}, p = {:.4}",
                c.candidate_id, c.baseline_id, c.n_lower, c.n_equal, c.n_higher, c.wilcoxon_p
            );
        }
    }
    println!(
        "coverage.csv and comparison.json written to {}",
        a.output_dir.display()
    );
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let config = PipelineConfig {
        input_dir: a.io.input_dir.clone(),
        output_dir: a.io.output_dir.clone(),
        method: a.method,
        k: a.k,
        scaling: a.scaling,
        b1_frac: a.b1_frac,
        b2_frac: a.b2_frac,
        b1_abs: a.b1_abs,
        b2_abs: a.b2_abs,
        steps: a.steps,
        attempts: a.attempts,
        restarts: a.restarts,
        seed: a.seed,
    };
    let report = run_pipeline(&config)?;
    println!(
        "retained {} of {} stakeholders ({} demanding)",
        report.stakeholders_retained, report.stakeholders_ingested, report.demanding_stakeholders
    );
    for g in &report.groups {
        println!(
            "{}: k={} definitive group has {} members (reduction {:.2}%)",
            g.method.as_str(),
            g.k,
            g.definitive_size,
            g.reduction_pct
        );
    }
    for f in &report.fronts {
        println!(
            "front {}: {} solutions, effort window [{:.2}, {:.2}]",
            f.front_id, f.solutions, f.b1, f.b2
        );
    }
    println!(
        "report written to {}",
        config.output_dir.join("report.json").display()
    );
    Ok(())
}

/// Groups spread evenly from 20 to 100 on power and legitimacy, urgency
/// pinned at 100 so every stakeholder stays demanding.
fn default_means(groups: usize) -> Vec<[f64; 3]> {
    (0..groups)
        .map(|i| {
            let t = if groups <= 1 { 0.5 } else { i as f64 / (groups - 1) as f64 };
            let v = 20.0 + 80.0 * t;
            [v, v, 100.0]
        })
        .collect()
}

fn parse_means(text: &str) -> Result<Vec<[f64; 3]>> {
    text.split(';')
        .map(|triple| {
            let parts: Vec<&str> = triple.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidParam(format!(
                    "group means need 3 comma-separated numbers per group, got {triple:?}"
                )));
            }
            let mut v = [0.0; 3];
            for (d, p) in parts.iter().enumerate() {
                v[d] = p.trim().parse().map_err(|_| {
                    Error::InvalidParam(format!("bad number {p:?} in group means"))
                })?;
            }
            Ok(v)
        })
        .collect()
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let component_means = match &a.group_means {
        Some(text) => parse_means(text)?,
        None => default_means(a.n_groups),
    };
    let spec = SynthSpec {
        n_stakeholders: a.n_stakeholders,
        n_requirements: a.n_requirements,
        n_groups: a.n_groups,
        component_means,
        component_sd: a.component_sd,
        votes_per_stakeholder: (a.votes_min, a.votes_max),
        effort_range: (a.effort_min, a.effort_max),
        seed: a.seed,
    };
    let (dataset, _truth) = synth(&spec, &a.output_dir)?;
    println!(
        "synthetic dataset: {} stakeholders, {} requirements, {} groups, seed {}",
        dataset.stakeholders().len(),
        dataset.requirements().len(),
        a.n_groups,
        a.seed
    );
    println!(
        "stakeholders.csv, recommendations.csv, votes.csv, efforts.csv, truth.csv written to {}",
        a.output_dir.display()
    );
    Ok(())
}
