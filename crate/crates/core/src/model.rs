//! Core data model: stakeholders, requirements, votes, and the
//! recommendation network, plus CSV ingestion and the expectant filter.
//!
//! A [`ProjectDataset`] is immutable after construction; every analysis
//! stage borrows it. Stakeholders and requirements are kept sorted by id
//! (lexicographic), which anchors the determinism of everything downstream.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::atomic_write;

pub type StakeholderId = String;
pub type RequirementId = String;

/// One stakeholder with its three salience components.
///
/// `legitimacy` is the sum of recommendation weights received and `urgency`
/// the sum of vote points cast; both are derived at ingest time and never
/// recomputed afterwards, so a filtered dataset keeps the values earned in
/// the full network.
#[derive(Debug, Clone, PartialEq)]
pub struct StakeholderRecord {
    pub id: StakeholderId,
    pub name: String,
    pub power: f64,
    pub legitimacy: f64,
    pub urgency: f64,
}

impl StakeholderRecord {
    /// Number of strictly positive salience components.
    pub fn positive_components(&self) -> usize {
        [self.power, self.legitimacy, self.urgency]
            .iter()
            .filter(|&&c| c > 0.0)
            .count()
    }
}

/// One requirement with its implementation effort (person-hours, > 0).
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementRecord {
    pub id: RequirementId,
    pub effort: f64,
}

/// One recommendation edge; `weight` is an integer in 1..=8.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub recommender: StakeholderId,
    pub recommendee: StakeholderId,
    pub weight: u8,
}

/// Sparse stakeholder-by-requirement points matrix.
///
/// At most one entry per (stakeholder, requirement) pair; every entry is
/// strictly positive. Iteration order is (stakeholder id, requirement id),
/// both lexicographic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VoteMatrix {
    by_stakeholder: BTreeMap<StakeholderId, BTreeMap<RequirementId, f64>>,
    len: usize,
}

impl VoteMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vote; rejects non-positive or non-finite points and duplicate
    /// (stakeholder, requirement) pairs.
    pub fn insert(
        &mut self,
        stakeholder: StakeholderId,
        requirement: RequirementId,
        points: f64,
    ) -> Result<()> {
        if !points.is_finite() || points <= 0.0 {
            return Err(Error::InvalidDataset(format!(
                "vote ({stakeholder}, {requirement}) has non-positive points {points}"
            )));
        }
        let row = self.by_stakeholder.entry(stakeholder).or_default();
        if row.contains_key(&requirement) {
            return Err(Error::InvalidDataset(format!(
                "duplicate vote for requirement {requirement:?}"
            )));
        }
        row.insert(requirement, points);
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn points(&self, stakeholder: &str, requirement: &str) -> Option<f64> {
        self.by_stakeholder.get(stakeholder)?.get(requirement).copied()
    }

    /// Votes cast by one stakeholder, keyed by requirement id.
    pub fn of_stakeholder(&self, stakeholder: &str) -> Option<&BTreeMap<RequirementId, f64>> {
        self.by_stakeholder.get(stakeholder)
    }

    /// Sum of points cast by one stakeholder (its urgency).
    pub fn total_points(&self, stakeholder: &str) -> f64 {
        self.by_stakeholder
            .get(stakeholder)
            .map(|row| row.values().sum())
            .unwrap_or(0.0)
    }

    /// Stakeholders that cast at least one vote, in id order.
    pub fn stakeholders(&self) -> impl Iterator<Item = &StakeholderId> + '_ {
        self.by_stakeholder.keys()
    }

    /// Iterates `(stakeholder, requirement, points)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.by_stakeholder.iter().flat_map(|(s, row)| {
            row.iter().map(move |(r, &p)| (s.as_str(), r.as_str(), p))
        })
    }
}

/// An immutable project dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectDataset {
    stakeholders: Vec<StakeholderRecord>,
    requirements: Vec<RequirementRecord>,
    recommendations: Vec<Recommendation>,
    votes: VoteMatrix,
}

impl ProjectDataset {
    /// Builds a dataset from parts, sorting by id and checking structural
    /// invariants (unique ids, finite non-negative components, positive
    /// efforts, referential integrity of votes and recommendations).
    ///
    /// Consistency of `legitimacy`/`urgency` with the edge list and votes is
    /// an ingest-time check, not enforced here: programmatic datasets own
    /// their component values.
    pub fn new(
        mut stakeholders: Vec<StakeholderRecord>,
        mut requirements: Vec<RequirementRecord>,
        recommendations: Vec<Recommendation>,
        votes: VoteMatrix,
    ) -> Result<Self> {
        stakeholders.sort_by(|a, b| a.id.cmp(&b.id));
        requirements.sort_by(|a, b| a.id.cmp(&b.id));

        for w in stakeholders.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidDataset(format!(
                    "duplicate stakeholder id {:?}",
                    w[0].id
                )));
            }
        }
        for w in requirements.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidDataset(format!(
                    "duplicate requirement id {:?}",
                    w[0].id
                )));
            }
        }
        for s in &stakeholders {
            if s.id.is_empty() {
                return Err(Error::InvalidDataset("empty stakeholder id".into()));
            }
            for (what, v) in [
                ("power", s.power),
                ("legitimacy", s.legitimacy),
                ("urgency", s.urgency),
            ] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDataset(format!(
                        "stakeholder {:?} has invalid {what} {v}",
                        s.id
                    )));
                }
            }
        }
        for r in &requirements {
            if r.id.is_empty() {
                return Err(Error::InvalidDataset("empty requirement id".into()));
            }
            if !r.effort.is_finite() || r.effort <= 0.0 {
                return Err(Error::InvalidDataset(format!(
                    "requirement {:?} has non-positive effort {}",
                    r.id, r.effort
                )));
            }
        }

        let sids: BTreeSet<&str> = stakeholders.iter().map(|s| s.id.as_str()).collect();
        let rids: BTreeSet<&str> = requirements.iter().map(|r| r.id.as_str()).collect();

        for rec in &recommendations {
            if !(1..=8).contains(&rec.weight) {
                return Err(Error::InvalidDataset(format!(
                    "recommendation weight {} outside 1..=8",
                    rec.weight
                )));
            }
            for id in [&rec.recommender, &rec.recommendee] {
                if !sids.contains(id.as_str()) {
                    return Err(Error::InvalidDataset(format!(
                        "recommendation references unknown stakeholder {id:?}"
                    )));
                }
            }
        }
        for (s, r, p) in votes.iter() {
            if !sids.contains(s) {
                return Err(Error::InvalidDataset(format!(
                    "vote references unknown stakeholder {s:?}"
                )));
            }
            if !rids.contains(r) {
                return Err(Error::InvalidDataset(format!(
                    "vote references unknown requirement {r:?}"
                )));
            }
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidDataset(format!(
                    "vote ({s}, {r}) has non-positive points {p}"
                )));
            }
        }

        Ok(Self {
            stakeholders,
            requirements,
            recommendations,
            votes,
        })
    }

    pub fn stakeholders(&self) -> &[StakeholderRecord] {
        &self.stakeholders
    }

    pub fn requirements(&self) -> &[RequirementRecord] {
        &self.requirements
    }

    pub fn recommendations(&self) -> &[Recommendation] {
        &self.recommendations
    }

    pub fn votes(&self) -> &VoteMatrix {
        &self.votes
    }

    pub fn stakeholder(&self, id: &str) -> Option<&StakeholderRecord> {
        self.stakeholders
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.stakeholders[i])
    }

    pub fn requirement(&self, id: &str) -> Option<&RequirementRecord> {
        self.requirements
            .binary_search_by(|r| r.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.requirements[i])
    }

    pub fn total_effort(&self) -> f64 {
        self.requirements.iter().map(|r| r.effort).sum()
    }

    /// Ids of stakeholders that cast at least one vote, in id order.
    pub fn demanding_ids(&self) -> Vec<&str> {
        self.stakeholders
            .iter()
            .map(|s| s.id.as_str())
            .filter(|id| self.votes.of_stakeholder(id).is_some_and(|v| !v.is_empty()))
            .collect()
    }

    /// Reads a dataset from `stakeholders.csv`, `recommendations.csv`,
    /// `votes.csv`, and `efforts.csv` under `dir`.
    ///
    /// Legitimacy is the sum of received recommendation weights. Urgency is
    /// the sum of vote points; when `stakeholders.csv` carries an `urgency`
    /// column it is cross-checked against that sum and a mismatch is an
    /// error. All format errors carry file names and line numbers.
    pub fn ingest(dir: &Path) -> Result<Self> {
        // stakeholders.csv: id,name,power[,urgency]
        let (header, rows) = read_records(dir, "stakeholders.csv")?;
        let has_urgency = match header_fields(&header).as_slice() {
            ["id", "name", "power"] => false,
            ["id", "name", "power", "urgency"] => true,
            _ => {
                return Err(Error::Header {
                    file: "stakeholders.csv".into(),
                    expected: "id,name,power[,urgency]".into(),
                    found: header.iter().collect::<Vec<_>>().join(","),
                })
            }
        };
        let mut declared_urgency: BTreeMap<StakeholderId, f64> = BTreeMap::new();
        let mut seen_lines: BTreeMap<StakeholderId, u64> = BTreeMap::new();
        let mut stakeholders: Vec<StakeholderRecord> = Vec::new();
        for (line, rec) in &rows {
            let id = require_id("stakeholders.csv", *line, "id", &rec[0])?;
            if seen_lines.insert(id.clone(), *line).is_some() {
                return Err(Error::DuplicateId {
                    file: "stakeholders.csv".into(),
                    line: *line,
                    id,
                });
            }
            let power = parse_component("stakeholders.csv", *line, "power", &rec[2])?;
            if has_urgency {
                let u = parse_component("stakeholders.csv", *line, "urgency", &rec[3])?;
                declared_urgency.insert(id.clone(), u);
            }
            stakeholders.push(StakeholderRecord {
                id,
                name: rec[1].to_string(),
                power,
                legitimacy: 0.0,
                urgency: 0.0,
            });
        }
        let known: BTreeSet<StakeholderId> =
            stakeholders.iter().map(|s| s.id.clone()).collect();

        // efforts.csv: requirement_id,effort
        let (header, rows) = read_records(dir, "efforts.csv")?;
        expect_header("efforts.csv", &header, &["requirement_id", "effort"])?;
        let mut requirements: Vec<RequirementRecord> = Vec::new();
        let mut seen_req: BTreeSet<RequirementId> = BTreeSet::new();
        for (line, rec) in &rows {
            let id = require_id("efforts.csv", *line, "requirement_id", &rec[0])?;
            if !seen_req.insert(id.clone()) {
                return Err(Error::DuplicateId {
                    file: "efforts.csv".into(),
                    line: *line,
                    id,
                });
            }
            let effort = parse_f64("efforts.csv", *line, "effort", &rec[1])?;
            if effort <= 0.0 {
                return Err(Error::Parse {
                    file: "efforts.csv".into(),
                    line: *line,
                    msg: format!("effort must be > 0, got {effort}"),
                });
            }
            requirements.push(RequirementRecord { id, effort });
        }

        // recommendations.csv: recommender_id,recommendee_id,weight
        let (header, rows) = read_records(dir, "recommendations.csv")?;
        expect_header(
            "recommendations.csv",
            &header,
            &["recommender_id", "recommendee_id", "weight"],
        )?;
        let mut recommendations: Vec<Recommendation> = Vec::new();
        for (line, rec) in &rows {
            let recommender = require_id("recommendations.csv", *line, "recommender_id", &rec[0])?;
            let recommendee = require_id("recommendations.csv", *line, "recommendee_id", &rec[1])?;
            for id in [&recommender, &recommendee] {
                if !known.contains(id) {
                    return Err(Error::UnknownId {
                        file: "recommendations.csv".into(),
                        line: *line,
                        kind: "stakeholder",
                        id: id.clone(),
                    });
                }
            }
            let weight: u8 = rec[2].parse().map_err(|_| Error::Parse {
                file: "recommendations.csv".into(),
                line: *line,
                msg: format!("weight must be an integer in 1..=8, got {:?}", &rec[2]),
            })?;
            if !(1..=8).contains(&weight) {
                return Err(Error::Parse {
                    file: "recommendations.csv".into(),
                    line: *line,
                    msg: format!("weight must be in 1..=8, got {weight}"),
                });
            }
            recommendations.push(Recommendation {
                recommender,
                recommendee,
                weight,
            });
        }

        // votes.csv: stakeholder_id,requirement_id,points
        let (header, rows) = read_records(dir, "votes.csv")?;
        expect_header(
            "votes.csv",
            &header,
            &["stakeholder_id", "requirement_id", "points"],
        )?;
        let mut votes = VoteMatrix::new();
        for (line, rec) in &rows {
            let sid = require_id("votes.csv", *line, "stakeholder_id", &rec[0])?;
            let rid = require_id("votes.csv", *line, "requirement_id", &rec[1])?;
            if !known.contains(&sid) {
                return Err(Error::UnknownId {
                    file: "votes.csv".into(),
                    line: *line,
                    kind: "stakeholder",
                    id: sid,
                });
            }
            if !seen_req.contains(&rid) {
                return Err(Error::UnknownId {
                    file: "votes.csv".into(),
                    line: *line,
                    kind: "requirement",
                    id: rid,
                });
            }
            let points = parse_f64("votes.csv", *line, "points", &rec[2])?;
            if points <= 0.0 {
                return Err(Error::Parse {
                    file: "votes.csv".into(),
                    line: *line,
                    msg: format!("points must be > 0, got {points}"),
                });
            }
            if votes.points(&sid, &rid).is_some() {
                return Err(Error::Parse {
                    file: "votes.csv".into(),
                    line: *line,
                    msg: format!("duplicate vote for ({sid}, {rid})"),
                });
            }
            votes.insert(sid, rid, points)?;
        }

        // Derived components. Urgency sums run over the canonical vote order
        // so a serialize→ingest round trip reproduces identical floats.
        let mut legitimacy: BTreeMap<&str, f64> = BTreeMap::new();
        for rec in &recommendations {
            *legitimacy.entry(rec.recommendee.as_str()).or_default() += rec.weight as f64;
        }
        for s in &mut stakeholders {
            s.legitimacy = legitimacy.get(s.id.as_str()).copied().unwrap_or(0.0);
            s.urgency = votes.total_points(&s.id);
        }
        for s in &stakeholders {
            if let Some(&declared) = declared_urgency.get(&s.id) {
                if (declared - s.urgency).abs() > 1e-6 {
                    return Err(Error::UrgencyMismatch {
                        id: s.id.clone(),
                        declared,
                        computed: s.urgency,
                    });
                }
            }
        }

        Self::new(stakeholders, requirements, recommendations, votes)
    }

    /// Keeps stakeholders with at least two strictly positive salience
    /// components, restricts the votes accordingly, and drops requirements
    /// left without votes. Recommendation edges are restricted to retained
    /// endpoints; component values are never recomputed, so legitimacy keeps
    /// what was earned in the full network. Idempotent.
    pub fn filter_expectant(&self) -> ProjectDataset {
        let kept: BTreeSet<&str> = self
            .stakeholders
            .iter()
            .filter(|s| s.positive_components() >= 2)
            .map(|s| s.id.as_str())
            .collect();

        let mut votes = VoteMatrix::new();
        let mut voted_reqs: BTreeSet<&str> = BTreeSet::new();
        for (s, r, p) in self.votes.iter() {
            if kept.contains(s) {
                votes
                    .insert(s.to_string(), r.to_string(), p)
                    .expect("filtered votes stay valid");
                voted_reqs.insert(r);
            }
        }

        let stakeholders = self
            .stakeholders
            .iter()
            .filter(|s| kept.contains(s.id.as_str()))
            .cloned()
            .collect();
        let requirements = self
            .requirements
            .iter()
            .filter(|r| voted_reqs.contains(r.id.as_str()))
            .cloned()
            .collect();
        let recommendations = self
            .recommendations
            .iter()
            .filter(|e| kept.contains(e.recommender.as_str()) && kept.contains(e.recommendee.as_str()))
            .cloned()
            .collect();

        ProjectDataset::new(stakeholders, requirements, recommendations, votes)
            .expect("a filtered dataset keeps every invariant")
    }

    /// Writes the four-file CSV form of this dataset under `dir`
    /// (stakeholders.csv with the urgency column). `ingest` of the result
    /// reproduces the dataset exactly when its components are consistent
    /// with the edge list and votes.
    pub fn write_csv_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;

        let mut w = CsvBuf::new(&["id", "name", "power", "urgency"]);
        for s in &self.stakeholders {
            w.row(&[
                &s.id,
                &s.name,
                &format!("{}", s.power),
                &format!("{}", s.urgency),
            ]);
        }
        w.finish(&dir.join("stakeholders.csv"))?;

        let mut w = CsvBuf::new(&["recommender_id", "recommendee_id", "weight"]);
        for e in &self.recommendations {
            w.row(&[&e.recommender, &e.recommendee, &format!("{}", e.weight)]);
        }
        w.finish(&dir.join("recommendations.csv"))?;

        let mut w = CsvBuf::new(&["stakeholder_id", "requirement_id", "points"]);
        for (s, r, p) in self.votes.iter() {
            w.row(&[s, r, &format!("{p}")]);
        }
        w.finish(&dir.join("votes.csv"))?;

        let mut w = CsvBuf::new(&["requirement_id", "effort"]);
        for r in &self.requirements {
            w.row(&[&r.id, &format!("{}", r.effort)]);
        }
        w.finish(&dir.join("efforts.csv"))?;

        Ok(())
    }
}

/// Small CSV buffer: quoting via the csv crate, atomic write on finish.
pub(crate) struct CsvBuf {
    inner: csv::Writer<Vec<u8>>,
}

impl CsvBuf {
    pub(crate) fn new(header: &[&str]) -> Self {
        let mut inner = csv::Writer::from_writer(Vec::new());
        inner.write_record(header).expect("in-memory write");
        Self { inner }
    }

    pub(crate) fn row(&mut self, fields: &[&str]) {
        self.inner.write_record(fields).expect("in-memory write");
    }

    pub(crate) fn finish(self, path: &Path) -> Result<()> {
        let bytes = self.inner.into_inner().expect("in-memory flush");
        atomic_write(path, &bytes)
    }
}

fn header_fields(header: &csv::StringRecord) -> Vec<&str> {
    header.iter().collect()
}

fn expect_header(file: &'static str, header: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if header_fields(header) != expected {
        return Err(Error::Header {
            file: file.into(),
            expected: expected.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn read_records(
    dir: &Path,
    name: &'static str,
) -> Result<(csv::StringRecord, Vec<(u64, csv::StringRecord)>)> {
    let path = dir.join(name);
    let file = fs::File::open(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut header = None;
    let mut rows = Vec::new();
    for result in rdr.records() {
        let rec = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse {
                file: name.into(),
                line,
                msg: e.to_string(),
            }
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if header.is_none() {
            header = Some(rec);
        } else {
            rows.push((line, rec));
        }
    }
    let header = header.ok_or_else(|| Error::Header {
        file: name.into(),
        expected: "a header row".into(),
        found: "(empty file)".into(),
    })?;
    Ok((header, rows))
}

fn require_id(file: &'static str, line: u64, what: &str, s: &str) -> Result<String> {
    if s.is_empty() {
        return Err(Error::Parse {
            file: file.into(),
            line,
            msg: format!("{what} must not be empty"),
        });
    }
    Ok(s.to_string())
}

fn parse_f64(file: &'static str, line: u64, what: &str, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        file: file.into(),
        line,
        msg: format!("{what} is not a number: {s:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            file: file.into(),
            line,
            msg: format!("{what} must be finite, got {s:?}"),
        });
    }
    Ok(v)
}

fn parse_component(file: &'static str, line: u64, what: &str, s: &str) -> Result<f64> {
    let v = parse_f64(file, line, what, s)?;
    if v < 0.0 {
        return Err(Error::Parse {
            file: file.into(),
            line,
            msg: format!("{what} must be >= 0, got {v}"),
        });
    }
    Ok(v)
}
