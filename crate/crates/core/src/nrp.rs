//! Bi-objective next-release instances and the greedy fill-and-swap
//! heuristic: maximize salience-weighted satisfaction, minimize effort,
//! subject to effort bounds [b1, b2].

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{CsvBuf, ProjectDataset, RequirementId, StakeholderId};
use crate::salience::SalienceTable;

/// A requirement-selection instance for one stakeholder subset.
///
/// Requirements stay in id order. `sat[j]` is the salience-weighted sum of
/// the subset's points on requirement j; requirements nobody in the subset
/// voted for keep sat 0 and stay addressable.
#[derive(Debug, Clone, PartialEq)]
pub struct NrpInstance {
    ids: Vec<RequirementId>,
    sat: Vec<f64>,
    effort: Vec<f64>,
    b1: f64,
    b2: f64,
    subset: BTreeSet<StakeholderId>,
}

impl NrpInstance {
    pub fn ids(&self) -> &[RequirementId] {
        &self.ids
    }

    pub fn sat(&self) -> &[f64] {
        &self.sat
    }

    pub fn effort(&self) -> &[f64] {
        &self.effort
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.b1, self.b2)
    }

    pub fn subset(&self) -> &BTreeSet<StakeholderId> {
        &self.subset
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Builds an instance directly from per-requirement (sat, effort) pairs
    /// and absolute bounds — the test-oracle entry point.
    pub fn from_parts(
        ids: Vec<RequirementId>,
        sat: Vec<f64>,
        effort: Vec<f64>,
        b1: f64,
        b2: f64,
    ) -> Result<Self> {
        if ids.len() != sat.len() || ids.len() != effort.len() {
            return Err(Error::InvalidParam("instance vectors differ in length".into()));
        }
        let total: f64 = effort.iter().sum();
        if !(0.0 < b1 && b1 <= b2 && b2 <= total) {
            return Err(Error::InfeasibleBudget { b1, b2 });
        }
        if sat.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidParam("satisfaction must be finite and >= 0".into()));
        }
        if effort.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::InvalidParam("efforts must be finite and > 0".into()));
        }
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        let pick = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let sat = pick(&sat);
        let effort = pick(&effort);
        let ids: Vec<RequirementId> = order.into_iter().map(|i| ids[i].clone()).collect();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam("duplicate requirement id".into()));
        }
        Ok(Self {
            ids,
            sat,
            effort,
            b1,
            b2,
            subset: BTreeSet::new(),
        })
    }
}

/// Eq.-style satisfaction over `subset` with fractional bounds: b1 =
/// b1_frac·Σe and b2 = b2_frac·Σe over all requirements of the dataset.
pub fn build_instance(
    dataset: &ProjectDataset,
    salience: &SalienceTable,
    subset: &BTreeSet<StakeholderId>,
    b1_frac: f64,
    b2_frac: f64,
) -> Result<NrpInstance> {
    if !(0.0 < b1_frac && b1_frac <= b2_frac && b2_frac <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "effort fractions must satisfy 0 < b1 <= b2 <= 1, got ({b1_frac}, {b2_frac})"
        )));
    }
    let total = dataset.total_effort();
    build_instance_abs(dataset, salience, subset, b1_frac * total, b2_frac * total)
}

/// As [`build_instance`], but with absolute effort bounds.
pub fn build_instance_abs(
    dataset: &ProjectDataset,
    salience: &SalienceTable,
    subset: &BTreeSet<StakeholderId>,
    b1: f64,
    b2: f64,
) -> Result<NrpInstance> {
    if subset.is_empty() {
        return Err(Error::InvalidParam(
            "cannot build an instance for an empty stakeholder subset".into(),
        ));
    }
    let total = dataset.total_effort();
    if !(0.0 < b1 && b1 <= b2 && b2 <= total) {
        return Err(Error::InfeasibleBudget { b1, b2 });
    }

    let ids: Vec<RequirementId> = dataset.requirements().iter().map(|r| r.id.clone()).collect();
    let effort: Vec<f64> = dataset.requirements().iter().map(|r| r.effort).collect();
    let index: BTreeMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let mut sat = vec![0.0; ids.len()];
    for sid in subset {
        if dataset.stakeholder(sid).is_none() {
            return Err(Error::InvalidParam(format!(
                "subset references unknown stakeholder {sid:?}"
            )));
        }
        let weight = salience
            .get(sid)
            .ok_or_else(|| {
                Error::InvalidParam(format!("stakeholder {sid:?} missing from salience table"))
            })?
            .salience;
        if let Some(votes) = dataset.votes().of_stakeholder(sid) {
            for (rid, &points) in votes {
                sat[index[rid.as_str()]] += weight * points;
            }
        }
    }

    Ok(NrpInstance {
        ids,
        sat,
        effort,
        b1,
        b2,
        subset: subset.clone(),
    })
}

/// One feasible requirement selection with its objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Selected requirement ids, sorted.
    pub selected: Vec<RequirementId>,
    pub total_sat: f64,
    pub total_effort: f64,
}

/// true iff `a` is at least as good in both objectives and strictly better
/// in one (higher sat, lower effort).
pub fn dominates(a: &Solution, b: &Solution) -> bool {
    dominates_obj((a.total_sat, a.total_effort), (b.total_sat, b.total_effort))
}

fn dominates_obj(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 <= b.1 && (a.0 > b.0 || a.1 < b.1)
}

/// Mutually nondominated feasible solutions, sorted by increasing effort.
/// `infeasible` is set when the heuristic found no solution with effort in
/// [b1, b2] at all.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub solutions: Vec<Solution>,
    pub infeasible: bool,
}

impl ParetoFront {
    /// `front.csv`: `solution_id,total_sat,total_effort,requirement_ids`
    /// with the ids `;`-joined in sorted order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = CsvBuf::new(&["solution_id", "total_sat", "total_effort", "requirement_ids"]);
        for (i, s) in self.solutions.iter().enumerate() {
            w.row(&[
                &(i + 1).to_string(),
                &format!("{}", s.total_sat),
                &format!("{}", s.total_effort),
                &s.selected.join(";"),
            ]);
        }
        w.finish(path)
    }
}

impl ParetoFront {
    /// Reads a front back from its `front.csv` form. Objective values are
    /// taken as recorded; requirement ids are re-sorted.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file = path.display().to_string();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "solution_id,total_sat,total_effort,requirement_ids")) => {}
            other => {
                return Err(Error::Header {
                    file,
                    expected: "solution_id,total_sat,total_effort,requirement_ids".into(),
                    found: other.map(|(_, l)| l.to_string()).unwrap_or_default(),
                })
            }
        }
        let mut solutions = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, ',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    file,
                    line: i as u64 + 1,
                    msg: "expected 4 columns".into(),
                });
            }
            let num = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Parse {
                    file: path.display().to_string(),
                    line: i as u64 + 1,
                    msg: format!("expected a number, got {s:?}"),
                })
            };
            let mut selected: Vec<RequirementId> = if fields[3].is_empty() {
                Vec::new()
            } else {
                fields[3].split(';').map(str::to_string).collect()
            };
            selected.sort();
            solutions.push(Solution {
                selected,
                total_sat: num(fields[1])?,
                total_effort: num(fields[2])?,
            });
        }
        Ok(ParetoFront {
            infeasible: solutions.is_empty(),
            solutions,
        })
    }
}

/// Nondominance archive restricted to efforts in [b1, b2].
struct Archive {
    b1: f64,
    b2: f64,
    members: Vec<Solution>,
}

impl Archive {
    fn offer(&mut self, cand: Solution) {
        if cand.total_effort < self.b1 || cand.total_effort > self.b2 {
            return;
        }
        for m in &self.members {
            if dominates(m, &cand)
                || (m.total_sat == cand.total_sat && m.total_effort == cand.total_effort)
            {
                return;
            }
        }
        self.members.retain(|m| !dominates(&cand, m));
        self.members.push(cand);
    }

    fn finish(mut self) -> ParetoFront {
        self.members.sort_by(|a, b| {
            a.total_effort
                .partial_cmp(&b.total_effort)
                .expect("finite effort")
                .then(a.total_sat.partial_cmp(&b.total_sat).expect("finite sat"))
        });
        ParetoFront {
            infeasible: self.members.is_empty(),
            solutions: self.members,
        }
    }
}

/// Snapshot of a boolean selection as an id-carrying solution.
fn selection_solution(instance: &NrpInstance, selected: &[bool]) -> Solution {
    let mut ids = Vec::new();
    let mut sat = 0.0;
    let mut effort = 0.0;
    for (j, &sel) in selected.iter().enumerate() {
        if sel {
            ids.push(instance.ids[j].clone());
            sat += instance.sat[j];
            effort += instance.effort[j];
        }
    }
    Solution {
        selected: ids,
        total_sat: sat,
        total_effort: effort,
    }
}

/// Selection state produced by a fill: flags, total effort, total sat.
type FillState = (Vec<bool>, f64, f64);

/// One greedy fill pass, offering every constructed selection to the
/// archive. Walks `order`, adding each row that keeps the total within
/// `t`; a result short of b1 is then completed into the window, preferring
/// the unselected row that lands lowest at or above b1 and falling back to
/// the order's next row under b2. Returns the truncated state alongside
/// the completed one — their swap neighborhoods cover different parts of
/// the window.
fn fill_pass(
    instance: &NrpInstance,
    archive: &mut Archive,
    order: &[usize],
    t: f64,
) -> (FillState, FillState) {
    let (b1, b2) = instance.bounds();
    let mut sel = vec![false; instance.len()];
    let mut effort = 0.0;
    let mut sat = 0.0;
    for &j in order {
        if effort + instance.effort[j] <= t {
            sel[j] = true;
            effort += instance.effort[j];
            sat += instance.sat[j];
            archive.offer(selection_solution(instance, &sel));
        }
    }
    let truncated = (sel.clone(), effort, sat);
    while effort < b1 {
        let mut crossing: Option<(f64, usize)> = None;
        let mut fallback: Option<usize> = None;
        for &j in order {
            if sel[j] || effort + instance.effort[j] > b2 {
                continue;
            }
            let landing = effort + instance.effort[j];
            if landing >= b1 {
                if crossing.map_or(true, |(l, _)| landing < l) {
                    crossing = Some((landing, j));
                }
            } else if fallback.is_none() {
                fallback = Some(j);
            }
        }
        let Some(j) = crossing.map(|(_, j)| j).or(fallback) else {
            break;
        };
        sel[j] = true;
        effort += instance.effort[j];
        sat += instance.sat[j];
        archive.offer(selection_solution(instance, &sel));
    }
    (truncated, (sel, effort, sat))
}

/// Bounded backtracking fill targeting the effort window directly: walk
/// `order` adding every row that fits under `cap`, and whenever the
/// maximal selection still sits below b1, pop the most recent pick and
/// resume past it. Tracks the highest-satisfaction selection that landed
/// in [b1, cap] and gives up after `8 * order.len()` pops, so the cost
/// stays linear-ish while plain greedy fills that strand just below the
/// window (every addition overshoots the cap) get systematically
/// repaired. `skip` excludes one row outright: re-running with each row
/// of the greedy prefix banned reaches window selections that hide
/// behind a single early pick.
fn window_fill(
    instance: &NrpInstance,
    order: &[usize],
    cap: f64,
    skip: Option<usize>,
) -> Option<FillState> {
    let (b1, _) = instance.bounds();
    let mut sel = vec![false; instance.len()];
    let mut effort = 0.0;
    let mut sat = 0.0;
    let mut stack: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    let mut best: Option<FillState> = None;
    let budget = 8 * order.len();
    let mut pops = 0usize;
    loop {
        while pos < order.len() {
            let j = order[pos];
            if Some(j) != skip && !sel[j] && effort + instance.effort[j] <= cap {
                sel[j] = true;
                effort += instance.effort[j];
                sat += instance.sat[j];
                stack.push(pos);
            }
            pos += 1;
        }
        if effort >= b1 && best.as_ref().map_or(true, |(_, _, s)| sat > *s) {
            best = Some((sel.clone(), effort, sat));
        }
        let Some(p) = stack.pop() else { break };
        pops += 1;
        let j = order[p];
        sel[j] = false;
        effort -= instance.effort[j];
        sat -= instance.sat[j];
        pos = p + 1;
        if pops >= budget {
            break;
        }
    }
    best
}

/// Greedy Pareto heuristic: for each of `steps` evenly spaced effort
/// targets t in [b1, b2], fill twice — by decreasing sat/effort ratio and
/// by decreasing sat — truncated at t and completed into the window (see
/// [`fill_pass`]), and run a bounded backtracking fill that lands inside
/// [b1, t] directly (see [`window_fill`]), which covers effort bands the
/// plain fills strand below. Swap passes (`attempts` each) then run from
/// the best truncated fill and, when it differs, from the best completed
/// fill: each pass removes one randomly chosen selected requirement and
/// inserts the best-ratio replacement that still fits under t. Every
/// constructed selection is offered to the in-window nondominance archive;
/// a working solution keeps a swap only when it strictly improves
/// satisfaction.
pub fn greedy_front(
    instance: &NrpInstance,
    steps: usize,
    attempts: usize,
    seed: u64,
) -> Result<ParetoFront> {
    if steps == 0 {
        return Err(Error::InvalidParam("steps must be >= 1".into()));
    }
    let n = instance.len();
    let (b1, b2) = instance.bounds();
    let mut archive = Archive {
        b1,
        b2,
        members: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // fill order: ratio desc, then sat desc, then id asc; sat-0 rows never
    // enter a fill or a swap insertion
    let mut fill_order: Vec<usize> = (0..n).filter(|&j| instance.sat[j] > 0.0).collect();
    fill_order.sort_by(|&a, &b| {
        let ra = instance.sat[a] / instance.effort[a];
        let rb = instance.sat[b] / instance.effort[b];
        rb.partial_cmp(&ra)
            .expect("finite ratios")
            .then(
                instance.sat[b]
                    .partial_cmp(&instance.sat[a])
                    .expect("finite sat"),
            )
            .then(instance.ids[a].cmp(&instance.ids[b]))
    });

    // complementary fill order: sat desc, then ratio desc, then id asc. A
    // pure ratio fill starves single high-value requirements whenever a
    // cheap high-ratio one grabs the budget first; filling big earners
    // first covers that regime.
    let mut sat_order = fill_order.clone();
    sat_order.sort_by(|&a, &b| {
        let ra = instance.sat[a] / instance.effort[a];
        let rb = instance.sat[b] / instance.effort[b];
        instance.sat[b]
            .partial_cmp(&instance.sat[a])
            .expect("finite sat")
            .then(rb.partial_cmp(&ra).expect("finite ratios"))
            .then(instance.ids[a].cmp(&instance.ids[b]))
    });

    for s in 0..steps {
        let t = if steps == 1 {
            b2
        } else {
            b1 + (b2 - b1) * s as f64 / (steps - 1) as f64
        };

        // base fills over both orders
        let mut best_trunc: Option<FillState> = None;
        let mut best_comp: Option<FillState> = None;
        for order in [&fill_order, &sat_order] {
            let (trunc, comp) = fill_pass(instance, &mut archive, order, t);
            if best_trunc.as_ref().map_or(true, |(_, _, s)| trunc.2 > *s) {
                best_trunc = Some(trunc);
            }
            let better = match &best_comp {
                None => true,
                Some((_, e, s)) => {
                    let in_window = comp.1 >= b1;
                    let best_in_window = *e >= b1;
                    (in_window && !best_in_window) || (in_window == best_in_window && comp.2 > *s)
                }
            };
            if better {
                best_comp = Some(comp);
            }
        }

        // backtracking fills straight into [b1, t]; extra ratio-order
        // runs ban one leading row each, since the best window landing
        // often excludes exactly one of the top ratio picks
        for order in [&fill_order, &sat_order] {
            if let Some((sel, _, _)) = window_fill(instance, order, t.min(b2), None) {
                archive.offer(selection_solution(instance, &sel));
            }
        }
        for &banned in fill_order.iter().take(8) {
            if let Some((sel, _, _)) = window_fill(instance, &fill_order, t.min(b2), Some(banned))
            {
                archive.offer(selection_solution(instance, &sel));
            }
        }

        let trunc = best_trunc.expect("fill pass ran");
        let comp = best_comp.expect("fill pass ran");
        let mut seeds: Vec<FillState> = Vec::new();
        let comp_differs = comp.0 != trunc.0;
        seeds.push(trunc);
        if comp_differs {
            seeds.push(comp);
        }

        for (mut selected, mut total_effort, mut total_sat) in seeds {
            let mut chosen: Vec<usize> = (0..n).filter(|&j| selected[j]).collect();
            for _ in 0..attempts {
                if chosen.is_empty() {
                    break;
                }
                let out = chosen[rng.gen_range(0..chosen.len())];
                let slack = t - (total_effort - instance.effort[out]);
                // best-ratio replacement among unselected, fitting rows
                let mut repl: Option<usize> = None;
                for &j in &fill_order {
                    if selected[j] || j == out || instance.effort[j] > slack {
                        continue;
                    }
                    repl = Some(j);
                    break; // fill_order is already sorted by the swap key
                }
                let Some(inc) = repl else { continue };
                selected[out] = false;
                selected[inc] = true;
                let cand = selection_solution(instance, &selected);
                archive.offer(cand.clone());
                if cand.total_sat > total_sat {
                    total_sat = cand.total_sat;
                    total_effort = cand.total_effort;
                    chosen = (0..n).filter(|&j| selected[j]).collect();
                } else {
                    selected[out] = true;
                    selected[inc] = false;
                }
            }
        }
    }

    Ok(archive.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RequirementRecord, StakeholderRecord, VoteMatrix};
    use crate::salience::compute_salience;

    fn instance(reqs: &[(&str, f64, f64)], b1: f64, b2: f64) -> NrpInstance {
        let ids = reqs.iter().map(|(id, _, _)| id.to_string()).collect();
        let sat = reqs.iter().map(|&(_, s, _)| s).collect();
        let effort = reqs.iter().map(|&(_, _, e)| e).collect();
        NrpInstance::from_parts(ids, sat, effort, b1, b2).unwrap()
    }

    #[test]
    fn three_requirement_front_matches_subset_enumeration() {
        let inst = instance(&[("r1", 10.0, 5.0), ("r2", 6.0, 5.0), ("r3", 1.0, 5.0)], 5.0, 10.0);
        let front = greedy_front(&inst, 100, 50, 1).unwrap();
        assert!(!front.infeasible);
        let objs: Vec<(f64, f64)> = front
            .solutions
            .iter()
            .map(|s| (s.total_sat, s.total_effort))
            .collect();
        assert_eq!(objs, vec![(10.0, 5.0), (16.0, 10.0)]);
        assert_eq!(front.solutions[0].selected, vec!["r1".to_string()]);
        assert_eq!(
            front.solutions[1].selected,
            vec!["r1".to_string(), "r2".to_string()]
        );
    }

    #[test]
    fn single_fitting_requirement_yields_a_singleton_front() {
        let inst = instance(&[("only", 3.0, 7.0), ("huge", 50.0, 93.0)], 5.0, 10.0);
        let front = greedy_front(&inst, 10, 5, 3).unwrap();
        assert_eq!(front.solutions.len(), 1);
        assert_eq!(front.solutions[0].selected, vec!["only".to_string()]);
    }

    #[test]
    fn oversized_efforts_flag_infeasibility() {
        let inst = instance(&[("a", 5.0, 40.0), ("b", 9.0, 60.0)], 5.0, 10.0);
        let front = greedy_front(&inst, 10, 5, 3).unwrap();
        assert!(front.infeasible);
        assert!(front.solutions.is_empty());
    }

    #[test]
    fn dominance_is_strict_somewhere() {
        let s = |sat: f64, effort: f64| Solution {
            selected: vec![],
            total_sat: sat,
            total_effort: effort,
        };
        assert!(!dominates(&s(16.0, 10.0), &s(10.0, 5.0)));
        assert!(!dominates(&s(10.0, 5.0), &s(16.0, 10.0)));
        assert!(dominates(&s(16.0, 5.0), &s(10.0, 5.0)));
        assert!(!dominates(&s(10.0, 5.0), &s(10.0, 5.0)));
    }

    #[test]
    fn front_is_deterministic_and_mutually_nondominated() {
        let reqs: Vec<(String, f64, f64)> = (0..14)
            .map(|i| {
                (
                    format!("r{i:02}"),
                    ((i * 37) % 23 + 2) as f64,
                    ((i * 19) % 7 + 1) as f64,
                )
            })
            .collect();
        let refs: Vec<(&str, f64, f64)> =
            reqs.iter().map(|(id, s, e)| (id.as_str(), *s, *e)).collect();
        let inst = instance(&refs, 8.0, 20.0);
        let a = greedy_front(&inst, 40, 30, 99).unwrap();
        let b = greedy_front(&inst, 40, 30, 99).unwrap();
        assert_eq!(a, b);
        for (i, x) in a.solutions.iter().enumerate() {
            let (lo, hi) = inst.bounds();
            assert!(x.total_effort >= lo && x.total_effort <= hi);
            for (j, y) in a.solutions.iter().enumerate() {
                if i != j {
                    assert!(!dominates(x, y), "{i} dominates {j}");
                }
            }
        }
    }

    #[test]
    fn front_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("front.csv");
        let inst = instance(&[("r1", 10.0, 5.0), ("r2", 6.0, 5.0), ("r3", 1.0, 5.0)], 5.0, 10.0);
        let front = greedy_front(&inst, 100, 50, 1).unwrap();
        front.write_csv(&path).unwrap();
        let back = ParetoFront::read_csv(&path).unwrap();
        assert_eq!(back, front);
    }

    #[test]
    fn instance_satisfaction_is_the_weighted_vote_sum() {
        let mut votes = VoteMatrix::new();
        votes.insert("s1".into(), "r1".into(), 10.0).unwrap();
        let ds = ProjectDataset::new(
            vec![StakeholderRecord {
                id: "s1".into(),
                name: String::new(),
                power: 2.0,
                legitimacy: 0.0,
                urgency: 0.0,
            }],
            vec![
                RequirementRecord { id: "r1".into(), effort: 4.0 },
                RequirementRecord { id: "r2".into(), effort: 16.0 },
            ],
            vec![],
            votes,
        )
        .unwrap();
        let table = compute_salience(&ds);
        let subset: BTreeSet<String> = ["s1".to_string()].into();
        let inst = build_instance(&ds, &table, &subset, 0.2, 0.25).unwrap();
        assert_eq!(inst.sat(), &[20.0, 0.0]);
        assert_eq!(inst.bounds(), (4.0, 5.0));

        let empty: BTreeSet<String> = BTreeSet::new();
        assert!(build_instance(&ds, &table, &empty, 0.2, 0.25).is_err());
    }

    #[test]
    fn widening_bounds_keeps_narrow_solutions_feasible() {
        let inst = instance(
            &[("a", 9.0, 3.0), ("b", 7.0, 4.0), ("c", 4.0, 5.0), ("d", 2.0, 6.0)],
            6.0,
            12.0,
        );
        let narrow = greedy_front(&inst, 20, 10, 5).unwrap();
        let wide_inst = instance(
            &[("a", 9.0, 3.0), ("b", 7.0, 4.0), ("c", 4.0, 5.0), ("d", 2.0, 6.0)],
            3.0,
            18.0,
        );
        let wide = greedy_front(&wide_inst, 20, 10, 5).unwrap();
        for s in &narrow.solutions {
            assert!(s.total_effort >= 3.0 && s.total_effort <= 18.0);
        }
        assert!(!wide.infeasible);
    }
}
