//! Engineered reference dataset shared by the acceptance suite.
//!
//! The raw population holds 144 stakeholders. 46 of them have power as
//! their only positive component, so exactly 98 survive the expectant
//! filter. The retained population is laid out in six blocks whose
//! hand-picked component values pin the salience order statistics
//! (min 2, Q1 37, median 73, mean 83.07, Q3 113.05, max 333.5), the
//! quartile-band sizes (26/23/24/25 from the bottom), and the cluster
//! geometry: blocks 1 and 2 form two low-salience lobes that merge last,
//! blocks 3 and 4 sit mid-field, and blocks 5 and 6 are glued together in
//! component space so every clustering method keeps them as the one
//! high-salience group.
//!
//! Votes follow one shared demand profile: every voter allocates its
//! budget proportionally to the same per-requirement weights, so any
//! subset of voters induces the same satisfaction ordering and the greedy
//! planner walks an identical path for the full population and for the
//! high-salience group (coverage ties everywhere). Block 4 additionally
//! puts 5 of its 100 points on side items nobody else wants; that barely
//! registers in the full population, but inside the top quartile band the
//! side items outrank the low-value shared items and pull that band's
//! release plans off the shared path.

use std::path::Path;

use nrp_core::model::{
    ProjectDataset, Recommendation, RequirementRecord, StakeholderRecord, VoteMatrix,
};

/// How a retained stakeholder votes.
#[derive(Clone, Copy)]
enum Plan {
    /// Casts no votes.
    Silent,
    /// Spreads this many points across the shared demand profile.
    Spread(f64),
    /// 95 points spread over the shared profile + 1 point per side item.
    Focus,
}

/// `(power, legitimacy, vote plan)` per retained stakeholder, in ascending
/// salience order; ids s001..s098 follow this order.
fn retained_blocks() -> Vec<(f64, u32, Plan)> {
    let mut rows: Vec<(f64, u32, Plan)> = Vec::with_capacity(98);

    // Block 1, 30 silent rows: constant power, legitimacy climbing 1..=38.
    // Saliences 2, 3..25, 37, 37, 37.5, 38, 38.5, 39: together with nothing
    // else at or below 37, the bottom quartile band holds 26 rows.
    rows.push((1.0, 1, Plan::Silent));
    for l in 2..=24 {
        rows.push((1.0, l, Plan::Silent));
    }
    rows.push((1.0, 36, Plan::Silent));
    rows.push((1.0, 36, Plan::Silent));
    rows.push((1.5, 36, Plan::Silent));
    rows.push((1.0, 37, Plan::Silent));
    rows.push((1.5, 37, Plan::Silent));
    rows.push((1.0, 38, Plan::Silent));

    // Block 2, 20 silent rows: legitimacy pinned at 1, power walking up.
    // Saliences 41..57, 60.31, 72, 74 put the table's median at 73.
    for p in 40..=56 {
        rows.push((p as f64, 1, Plan::Silent));
    }
    rows.push((59.31, 1, Plan::Silent));
    rows.push((71.0, 1, Plan::Silent));
    rows.push((73.0, 1, Plan::Silent));

    // Block 3, 23 spread voters: tiny power and legitimacy, vote budgets
    // walking 104.9..=111.5 in steps of 0.3. Saliences 106.3..112.9 fill
    // the band just below the third quartile (113.05).
    for k in 0..23 {
        rows.push((0.4, 1, Plan::Spread(104.9 + 0.3 * k as f64)));
    }

    // Block 4, 5 concentrated voters just above the third quartile:
    // saliences 113.1..115.5 (budget exactly 100 each).
    for k in 0..5 {
        rows.push((6.1 + 0.6 * k as f64, 7, Plan::Focus));
    }

    // Block 5, 10 silent rows: high legitimacy, medium power, saliences
    // 120.5..125. Placed next to block 6's low end so the two blocks read
    // as one group to every clustering method.
    let high: [(f64, u32); 10] = [
        (35.5, 85),
        (35.0, 86),
        (36.5, 85),
        (36.0, 86),
        (35.5, 87),
        (36.0, 87),
        (35.5, 88),
        (36.0, 88),
        (35.5, 89),
        (36.0, 89),
    ];
    rows.extend(high.iter().map(|&(p, l)| (p, l, Plan::Silent)));

    // Block 6, 10 spread voters: the heavyweights, saliences 170..333.5,
    // each spreading 29.7 points over the shared profile.
    let tail_p = [35.3, 37.3, 39.3, 42.3, 44.8, 47.8, 50.8, 55.3, 60.05, 65.8];
    let tail_l: [u32; 10] = [105, 110, 116, 122, 130, 139, 150, 163, 182, 238];
    for i in 0..10 {
        rows.push((tail_p[i], tail_l[i], Plan::Spread(29.7)));
    }

    debug_assert_eq!(rows.len(), 98);
    rows
}

/// Requirement tiers as `(id, effort, shared demand weight)`. The demand
/// weights sum to exactly 1. The `rd*` side items carry no shared demand
/// (only the concentrated voters want them) and cost exactly as much as
/// the `rc*` items, so swapping one for the other never changes a plan's
/// total effort. The `rm*` items are too big to ever fit the effort window
/// but keep their voters' budgets honest.
fn requirement_plan() -> Vec<(String, f64, f64)> {
    let mut reqs: Vec<(String, f64, f64)> = Vec::with_capacity(88);
    for i in 1..=8 {
        reqs.push((format!("ra{i}"), 150.0, 0.06));
    }
    for i in 1..=50usize {
        let effort = [8.0, 12.0, 15.0, 18.0, 21.0][(i - 1) / 10];
        reqs.push((format!("rb{i:02}"), effort, 0.00918));
    }
    for i in 1..=20 {
        reqs.push((format!("rc{i:02}"), 40.0, 0.003));
    }
    for i in 1..=5 {
        reqs.push((format!("rd{i}"), 40.0, 0.0));
    }
    for i in 1..=5 {
        reqs.push((format!("rm{i}"), 1554.86, 0.0002));
    }
    reqs
}

/// Builds the dataset in memory. The component identities ingestion relies
/// on hold exactly: each stakeholder's legitimacy equals the sum of its
/// received recommendation weights and its urgency equals the sum of its
/// cast vote points, so writing the dataset out and reading it back
/// reproduces identical records.
pub fn dataset() -> ProjectDataset {
    let blocks = retained_blocks();
    let ids: Vec<String> = (1..=blocks.len()).map(|i| format!("s{i:03}")).collect();
    let reqs = requirement_plan();

    let mut votes = VoteMatrix::new();
    for ((_, _, plan), id) in blocks.iter().zip(&ids) {
        match plan {
            Plan::Silent => {}
            Plan::Spread(budget) => {
                for (rid, _, d) in &reqs {
                    if *d > 0.0 {
                        votes.insert(id.clone(), rid.clone(), budget * d).unwrap();
                    }
                }
            }
            Plan::Focus => {
                for (rid, _, d) in &reqs {
                    if *d > 0.0 {
                        votes.insert(id.clone(), rid.clone(), 95.0 * d).unwrap();
                    }
                }
                for i in 1..=5 {
                    votes.insert(id.clone(), format!("rd{i}"), 1.0).unwrap();
                }
            }
        }
    }

    // Decompose each legitimacy target into received edges of weight <= 8;
    // senders rotate through the following ids so no sender repeats for the
    // same recipient and nobody recommends themselves.
    let mut recommendations = Vec::new();
    for (i, (_, legit, _)) in blocks.iter().enumerate() {
        let mut remaining = *legit;
        let mut t = 0usize;
        while remaining > 0 {
            let w = remaining.min(8) as u8;
            recommendations.push(Recommendation {
                recommender: ids[(i + 1 + t) % ids.len()].clone(),
                recommendee: ids[i].clone(),
                weight: w,
            });
            remaining -= u32::from(w);
            t += 1;
        }
    }

    let mut stakeholders: Vec<StakeholderRecord> = blocks
        .iter()
        .zip(&ids)
        .map(|((power, legit, _), id)| StakeholderRecord {
            id: id.clone(),
            name: format!("member {id}"),
            power: *power,
            legitimacy: f64::from(*legit),
            urgency: votes.total_points(id),
        })
        .collect();

    // 46 power-only rows; the expectant filter removes every one of them.
    for k in 0..46u32 {
        stakeholders.push(StakeholderRecord {
            id: format!("z{:02}", k + 1),
            name: format!("observer z{:02}", k + 1),
            power: 30.0 + 0.5 * f64::from(k),
            legitimacy: 0.0,
            urgency: 0.0,
        });
    }

    let requirements = reqs
        .iter()
        .map(|(id, effort, _)| RequirementRecord {
            id: id.clone(),
            effort: *effort,
        })
        .collect();

    ProjectDataset::new(stakeholders, requirements, recommendations, votes).unwrap()
}

/// Writes the dataset as the four-file CSV directory the pipeline ingests.
pub fn write_dataset(dir: &Path) {
    dataset().write_csv_dir(dir).unwrap();
}
