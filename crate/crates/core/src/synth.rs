//! Deterministic synthetic dataset generation: grouped stakeholders with
//! Gaussian (power, legitimacy) profiles, 100-point vote allocations, and a
//! `truth.csv` sidecar recording the generating group of each stakeholder.

use std::collections::BTreeMap;
use std::path::Path;

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::Normal;

use crate::error::{Error, Result};
use crate::model::{
    CsvBuf, ProjectDataset, Recommendation, RequirementRecord, StakeholderRecord, VoteMatrix,
};

/// Parameters for one synthetic dataset.
///
/// Every demanding stakeholder's votes sum to exactly 100, so generated
/// urgency is 100 (or 0 for the voteless); the third entry of each group's
/// component means is therefore accepted but not sampled from. Group
/// separation comes from the power and legitimacy means.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_stakeholders: usize,
    pub n_requirements: usize,
    pub n_groups: usize,
    /// Per group: mean (power, legitimacy, urgency).
    pub component_means: Vec<[f64; 3]>,
    pub component_sd: f64,
    /// Inclusive range of votes cast per stakeholder; 0 allows voteless
    /// stakeholders.
    pub votes_per_stakeholder: (usize, usize),
    /// Uniform effort interval (lo, hi], lo > 0.
    pub effort_range: (f64, f64),
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n_stakeholders == 0 || self.n_requirements == 0 || self.n_groups == 0 {
            return Err(Error::InvalidParam("all synth counts must be positive".into()));
        }
        if self.component_means.len() != self.n_groups {
            return Err(Error::InvalidParam(format!(
                "expected {} component means, got {}",
                self.n_groups,
                self.component_means.len()
            )));
        }
        if !self.component_sd.is_finite() || self.component_sd < 0.0 {
            return Err(Error::InvalidParam("component sd must be finite and >= 0".into()));
        }
        let (vlo, vhi) = self.votes_per_stakeholder;
        if vlo > vhi {
            return Err(Error::InvalidParam("votes range lower bound exceeds upper".into()));
        }
        let (elo, ehi) = self.effort_range;
        if !(elo.is_finite() && ehi.is_finite() && 0.0 < elo && elo <= ehi) {
            return Err(Error::InvalidParam("effort range must satisfy 0 < lo <= hi".into()));
        }
        Ok(())
    }
}

fn id_width(n: usize) -> usize {
    n.to_string().len()
}

/// Generates the four dataset files plus `truth.csv` into `dir` and returns
/// the dataset with the generating group (1-based) per stakeholder. Fixed
/// seeds give byte-identical files across runs.
pub fn synth(spec: &SynthSpec, dir: &Path) -> Result<(ProjectDataset, BTreeMap<String, usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng, mean: f64| -> f64 {
        if spec.component_sd > 0.0 {
            let normal = Normal::new(mean, spec.component_sd).expect("validated sd");
            normal.sample(rng).max(0.0)
        } else {
            mean.max(0.0)
        }
    };

    let sw = id_width(spec.n_stakeholders);
    let rw = id_width(spec.n_requirements);

    let requirements: Vec<RequirementRecord> = (0..spec.n_requirements)
        .map(|j| {
            let (lo, hi) = spec.effort_range;
            RequirementRecord {
                id: format!("r{:0rw$}", j + 1),
                effort: lo + rng.gen::<f64>() * (hi - lo),
            }
        })
        .collect();

    let vote_cap = spec
        .votes_per_stakeholder
        .1
        .min(spec.n_requirements)
        .min(100);
    let vote_floor = spec.votes_per_stakeholder.0.min(vote_cap);

    let mut stakeholders = Vec::with_capacity(spec.n_stakeholders);
    let mut recommendations = Vec::new();
    let mut votes = VoteMatrix::new();
    let mut truth = BTreeMap::new();

    for i in 0..spec.n_stakeholders {
        let id = format!("s{:0sw$}", i + 1);
        let group = i % spec.n_groups;
        let means = spec.component_means[group];
        let power = draw(&mut rng, means[0]);
        let legit_target = draw(&mut rng, means[1]).round() as u64;

        // recommendation edges decompose the legitimacy target into
        // weights <= 8, received from rotating neighbors
        let mut legitimacy = 0.0;
        if spec.n_stakeholders > 1 {
            let mut remaining = legit_target;
            let mut t = 0usize;
            while remaining > 0 {
                let weight = remaining.min(8) as u8;
                let mut from = (i + 1 + t) % spec.n_stakeholders;
                if from == i {
                    from = (from + 1) % spec.n_stakeholders;
                }
                recommendations.push(Recommendation {
                    recommender: format!("s{:0sw$}", from + 1),
                    recommendee: id.clone(),
                    weight,
                });
                legitimacy += weight as f64;
                remaining -= weight as u64;
                t += 1;
            }
        }

        let n_votes = rng.gen_range(vote_floor..=vote_cap);
        let urgency = if n_votes > 0 { 100.0 } else { 0.0 };
        if n_votes > 0 {
            // partial Fisher–Yates pick of distinct requirements
            let mut pool: Vec<usize> = (0..spec.n_requirements).collect();
            for t in 0..n_votes {
                let j = rng.gen_range(t..pool.len());
                pool.swap(t, j);
            }
            let mut picked: Vec<usize> = pool[..n_votes].to_vec();
            picked.sort_unstable();
            // compose 100 into n_votes positive integer parts
            let mut cuts = std::collections::BTreeSet::new();
            while cuts.len() < n_votes - 1 {
                cuts.insert(rng.gen_range(1..100u32));
            }
            let mut edges: Vec<u32> = Vec::with_capacity(n_votes + 1);
            edges.push(0);
            edges.extend(cuts.iter().copied());
            edges.push(100);
            for (t, &req) in picked.iter().enumerate() {
                let points = (edges[t + 1] - edges[t]) as f64;
                votes.insert(id.clone(), format!("r{:0rw$}", req + 1), points)?;
            }
        }

        stakeholders.push(StakeholderRecord {
            id: id.clone(),
            name: format!("synthetic stakeholder {}", i + 1),
            power,
            legitimacy,
            urgency,
        });
        truth.insert(id, group + 1);
    }

    let dataset = ProjectDataset::new(stakeholders, requirements, recommendations, votes)?;
    dataset.write_csv_dir(dir)?;

    let mut w = CsvBuf::new(&["id", "group"]);
    for (id, group) in &truth {
        w.row(&[id, &group.to_string()]);
    }
    w.finish(&dir.join("truth.csv"))?;

    Ok((dataset, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SynthSpec {
        SynthSpec {
            n_stakeholders: 12,
            n_requirements: 9,
            n_groups: 3,
            component_means: vec![[10.0, 12.0, 100.0], [40.0, 45.0, 100.0], [80.0, 90.0, 100.0]],
            component_sd: 2.0,
            votes_per_stakeholder: (1, 4),
            effort_range: (2.0, 10.0),
            seed: 71,
        }
    }

    #[test]
    fn single_vote_stakeholders_place_all_hundred_points() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec();
        s.votes_per_stakeholder = (1, 1);
        let (ds, _) = synth(&s, dir.path()).unwrap();
        for st in ds.stakeholders() {
            let row = ds.votes().of_stakeholder(&st.id).unwrap();
            assert_eq!(row.len(), 1);
            assert_eq!(row.values().copied().sum::<f64>(), 100.0);
        }
    }

    #[test]
    fn votes_always_sum_to_exactly_one_hundred() {
        let dir = tempfile::tempdir().unwrap();
        let (ds, _) = synth(&spec(), dir.path()).unwrap();
        for st in ds.stakeholders() {
            let total = ds.votes().total_points(&st.id);
            assert!(total == 100.0 || total == 0.0);
            assert_eq!(st.urgency, total);
        }
    }

    #[test]
    fn fixed_seed_gives_byte_identical_files() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        synth(&spec(), d1.path()).unwrap();
        synth(&spec(), d2.path()).unwrap();
        for name in [
            "stakeholders.csv",
            "recommendations.csv",
            "votes.csv",
            "efforts.csv",
            "truth.csv",
        ] {
            let a = std::fs::read(d1.path().join(name)).unwrap();
            let b = std::fs::read(d2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs across identical runs");
        }
    }

    #[test]
    fn generated_files_ingest_back_to_the_same_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let (ds, truth) = synth(&spec(), dir.path()).unwrap();
        let back = ProjectDataset::ingest(dir.path()).unwrap();
        assert_eq!(back, ds);
        assert_eq!(truth.len(), 12);
        assert!(truth.values().all(|&g| (1..=3).contains(&g)));
    }

    #[test]
    fn group_labels_rotate_through_stakeholders() {
        let dir = tempfile::tempdir().unwrap();
        let (_, truth) = synth(&spec(), dir.path()).unwrap();
        assert_eq!(truth["s01"], 1);
        assert_eq!(truth["s02"], 2);
        assert_eq!(truth["s03"], 3);
        assert_eq!(truth["s04"], 1);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec();
        s.component_means.pop();
        assert!(synth(&s, dir.path()).is_err());
        let mut s = spec();
        s.effort_range = (0.0, 5.0);
        assert!(synth(&s, dir.path()).is_err());
        let mut s = spec();
        s.votes_per_stakeholder = (5, 2);
        assert!(synth(&s, dir.path()).is_err());
    }
}
