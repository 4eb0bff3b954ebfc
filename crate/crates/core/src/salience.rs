//! Salience scoring: per-stakeholder component sums, summary statistics,
//! and the quartile-band arrangement whose top band is the definitive
//! group.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grouping::{ClusterPartition, Method};
use crate::model::{CsvBuf, ProjectDataset, StakeholderId};
use crate::stats::{mean, quantile};

/// One scored stakeholder; salience = power + legitimacy + urgency.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceRow {
    pub id: StakeholderId,
    pub power: f64,
    pub legitimacy: f64,
    pub urgency: f64,
    pub salience: f64,
}

/// Rows in id order, one per stakeholder of the source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceTable {
    rows: Vec<SalienceRow>,
}

pub fn compute_salience(dataset: &ProjectDataset) -> SalienceTable {
    let rows = dataset
        .stakeholders()
        .iter()
        .map(|s| SalienceRow {
            id: s.id.clone(),
            power: s.power,
            legitimacy: s.legitimacy,
            urgency: s.urgency,
            salience: s.power + s.legitimacy + s.urgency,
        })
        .collect();
    SalienceTable { rows }
}

impl SalienceTable {
    pub fn rows(&self) -> &[SalienceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SalienceRow> {
        self.rows
            .binary_search_by(|r| r.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.rows[i])
    }

    /// `salience.csv`: `id,power,legitimacy,urgency,salience`, id order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = CsvBuf::new(&["id", "power", "legitimacy", "urgency", "salience"]);
        for r in &self.rows {
            w.row(&[
                &r.id,
                &format!("{}", r.power),
                &format!("{}", r.legitimacy),
                &format!("{}", r.urgency),
                &format!("{}", r.salience),
            ]);
        }
        w.finish(path)
    }
}

/// Order statistics of one column: min, Q1, median, mean, Q3, max.
/// Quartiles interpolate linearly between closest ranks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComponentSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

fn summarize_column(values: &mut Vec<f64>) -> ComponentSummary {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    ComponentSummary {
        min: values[0],
        q1: quantile(values, 0.25),
        median: quantile(values, 0.5),
        mean: mean(values),
        q3: quantile(values, 0.75),
        max: *values.last().unwrap(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SalienceSummary {
    pub power: ComponentSummary,
    pub legitimacy: ComponentSummary,
    pub urgency: ComponentSummary,
    pub salience: ComponentSummary,
}

pub fn summarize(table: &SalienceTable) -> Result<SalienceSummary> {
    if table.is_empty() {
        return Err(Error::TooFewRows {
            op: "salience summary",
            needed: 1,
            got: 0,
        });
    }
    let col = |f: fn(&SalienceRow) -> f64| -> ComponentSummary {
        let mut v: Vec<f64> = table.rows.iter().map(f).collect();
        summarize_column(&mut v)
    };
    Ok(SalienceSummary {
        power: col(|r| r.power),
        legitimacy: col(|r| r.legitimacy),
        urgency: col(|r| r.urgency),
        salience: col(|r| r.salience),
    })
}

/// Splits the stakeholders into the four salience bands
/// (≤Q1], (Q1,Q2], (Q2,Q3], (>Q3); the (>Q3) band is the definitive group.
/// A row with salience exactly Q3 belongs to (Q2,Q3]. Bands left empty by
/// heavy ties are dropped, so the partition never carries empty clusters.
pub fn quartile_groups(table: &SalienceTable) -> Result<ClusterPartition> {
    if table.len() < 4 {
        return Err(Error::TooFewRows {
            op: "quartile grouping",
            needed: 4,
            got: table.len(),
        });
    }
    let mut sal: Vec<f64> = table.rows.iter().map(|r| r.salience).collect();
    sal.sort_by(|a, b| a.partial_cmp(b).expect("finite salience"));
    let q1 = quantile(&sal, 0.25);
    let q2 = quantile(&sal, 0.5);
    let q3 = quantile(&sal, 0.75);

    let ids: Vec<StakeholderId> = table.rows.iter().map(|r| r.id.clone()).collect();
    let raw: Vec<[f64; 3]> = table
        .rows
        .iter()
        .map(|r| [r.power, r.legitimacy, r.urgency])
        .collect();
    let labels: Vec<usize> = table
        .rows
        .iter()
        .map(|r| {
            if r.salience <= q1 {
                0
            } else if r.salience <= q2 {
                1
            } else if r.salience <= q3 {
                2
            } else {
                3
            }
        })
        .collect();
    ClusterPartition::from_labels(&ids, &raw, &labels, Method::Quartile, None)
}
