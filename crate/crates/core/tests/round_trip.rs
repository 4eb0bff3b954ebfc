//! Property test: any structurally valid dataset whose legitimacy and
//! urgency are consistent with its edge list and votes survives a
//! serialize → ingest round trip unchanged, and the expectant filter is
//! idempotent on it.

use std::collections::BTreeMap;

use proptest::prelude::*;
use nrp_core::{ProjectDataset, Recommendation, RequirementRecord, StakeholderRecord, VoteMatrix};

fn sid(i: usize) -> String {
    format!("s{i:02}")
}

fn rid(i: usize) -> String {
    format!("r{i:02}")
}

#[allow(clippy::too_many_arguments)]
fn build_dataset(
    n_stk: usize,
    n_req: usize,
    powers: Vec<f64>,
    names: Vec<String>,
    efforts: Vec<f64>,
    edges: Vec<(usize, usize, u8)>,
    votes: BTreeMap<(usize, usize), f64>,
) -> ProjectDataset {
    let mut matrix = VoteMatrix::new();
    for (&(s, r), &p) in &votes {
        matrix.insert(sid(s), rid(r), p).expect("unique positive votes");
    }
    let mut legitimacy = vec![0.0f64; n_stk];
    let recommendations: Vec<Recommendation> = edges
        .iter()
        .map(|&(a, b, w)| {
            legitimacy[b] += w as f64;
            Recommendation {
                recommender: sid(a),
                recommendee: sid(b),
                weight: w,
            }
        })
        .collect();
    let stakeholders = (0..n_stk)
        .map(|i| StakeholderRecord {
            // ingest trims padded fields, so the identity is over
            // trim-canonical names
            id: sid(i),
            name: names[i].trim().to_string(),
            power: powers[i],
            legitimacy: legitimacy[i],
            urgency: matrix.total_points(&sid(i)),
        })
        .collect();
    let requirements = (0..n_req)
        .map(|i| RequirementRecord {
            id: rid(i),
            effort: efforts[i],
        })
        .collect();
    ProjectDataset::new(stakeholders, requirements, recommendations, matrix)
        .expect("generated dataset is structurally valid")
}

fn dataset_strategy() -> impl Strategy<Value = ProjectDataset> {
    (1usize..12, 1usize..10).prop_flat_map(|(n_stk, n_req)| {
        let powers = proptest::collection::vec(0.0f64..1e4, n_stk);
        // names exercise the quoting path: commas, quotes, spaces
        let names = proptest::collection::vec("[a-zA-Z0-9 ,\"'_-]{0,12}", n_stk);
        let efforts = proptest::collection::vec(0.001f64..1e4, n_req);
        let edges =
            proptest::collection::vec((0..n_stk, 0..n_stk, 1u8..=8), 0..20);
        let votes = proptest::collection::btree_map(
            (0..n_stk, 0..n_req),
            0.5f64..100.0,
            0..(n_stk * n_req).min(30),
        );
        (powers, names, efforts, edges, votes).prop_map(
            move |(powers, names, efforts, edges, votes)| {
                build_dataset(n_stk, n_req, powers, names, efforts, edges, votes)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_then_ingest_is_identity(dataset in dataset_strategy()) {
        let dir = tempfile::tempdir().expect("temp dir");
        dataset.write_csv_dir(dir.path()).expect("write");
        let back = ProjectDataset::ingest(dir.path()).expect("ingest");
        prop_assert_eq!(&back, &dataset);
    }

    #[test]
    fn expectant_filter_is_idempotent(dataset in dataset_strategy()) {
        let once = dataset.filter_expectant();
        let twice = once.filter_expectant();
        prop_assert_eq!(&once, &twice);
    }
}
