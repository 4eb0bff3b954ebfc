//! Radar-chart SVG export: one axis per demanding stakeholder (clockwise by
//! decreasing salience), one polygon per front's coverage vector, and outer
//! bands shading salience and demanded-requirement counts per axis.
//!
//! The output is a standalone SVG with no generator metadata, so identical
//! inputs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::coverage::CoverageVector;
use crate::error::{Error, Result};
use crate::fsutil::atomic_write;
use crate::model::VoteMatrix;
use crate::salience::SalienceTable;

const CX: f64 = 500.0;
const CY: f64 = 500.0;
const R: f64 = 310.0;
const PALETTE: [&str; 8] = [
    "#1b6ca8", "#d1495b", "#2e933c", "#8e44ad", "#e67e22", "#16a085", "#c2185b", "#5d6d7e",
];

fn fmt(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" { "0.00".into() } else { s }
}

/// Point on axis `i` of `n` at radius `r`: axis 0 points up, later axes
/// advance clockwise.
fn point(i: usize, n: usize, r: f64) -> (f64, f64) {
    let phi = std::f64::consts::TAU * i as f64 / n as f64;
    (CX + r * phi.sin(), CY - r * phi.cos())
}

/// Quadrilateral wedge centered on axis `i` between radii `r0` and `r1`.
fn wedge(i: usize, n: usize, r0: f64, r1: f64) -> String {
    let half = 0.38 / n as f64 * std::f64::consts::TAU;
    let phi = std::f64::consts::TAU * i as f64 / n as f64;
    let at = |r: f64, a: f64| (CX + r * a.sin(), CY - r * a.cos());
    let corners = [
        at(r0, phi - half),
        at(r1, phi - half),
        at(r1, phi + half),
        at(r0, phi + half),
    ];
    let mut d = String::new();
    for (t, (x, y)) in corners.iter().enumerate() {
        let cmd = if t == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{} {} ", fmt(*x), fmt(*y));
    }
    d.push('Z');
    d
}

/// Writes the radar chart for `coverages` to `out`.
pub fn emit_radar(
    coverages: &[CoverageVector],
    salience: &SalienceTable,
    votes: &VoteMatrix,
    out: &Path,
) -> Result<()> {
    if coverages.is_empty() {
        return Err(Error::InvalidParam("radar chart needs at least one front".into()));
    }
    // axes: demanding stakeholders, salience descending, id ascending on ties
    let mut axes: Vec<(&str, f64)> = votes
        .stakeholders()
        .map(|id| {
            salience
                .get(id)
                .map(|row| (id.as_str(), row.salience))
                .ok_or_else(|| {
                    Error::InvalidParam(format!("stakeholder {id:?} missing from salience table"))
                })
        })
        .collect::<Result<_>>()?;
    if axes.is_empty() {
        return Err(Error::InvalidParam("radar chart needs a demanding stakeholder".into()));
    }
    axes.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite salience").then(a.0.cmp(b.0)));
    let n = axes.len();

    let cov_of = |front: &CoverageVector, id: &str| front.values.get(id).copied().unwrap_or(0.0);
    let mut rmax: f64 = 1.0;
    for front in coverages {
        for &(id, _) in &axes {
            rmax = rmax.max(cov_of(front, id));
        }
    }
    let sal_max = axes.iter().map(|&(_, s)| s).fold(f64::MIN, f64::max).max(1e-12);
    let demand_of = |id: &str| votes.of_stakeholder(id).map_or(0, |row| row.len());
    let demand_max = axes.iter().map(|&(id, _)| demand_of(id)).max().unwrap_or(1).max(1);

    let mut svg = String::new();
    svg.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" font-family=\"sans-serif\">\n");
    svg.push_str("<rect width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n");

    // rings at quarter fractions of the radial scale
    svg.push_str("<g fill=\"none\" stroke=\"#d9d9d9\" stroke-width=\"1\">\n");
    for q in 1..=4 {
        let r = R * q as f64 / 4.0;
        let _ = writeln!(svg, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", fmt(CX), fmt(CY), fmt(r));
    }
    svg.push_str("</g>\n");
    svg.push_str("<g fill=\"#8a8a8a\" font-size=\"11\" text-anchor=\"start\">\n");
    for q in 1..=4 {
        let pct = rmax * q as f64 / 4.0 * 100.0;
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\">{}%</text>",
            fmt(CX + 4.0),
            fmt(CY - R * q as f64 / 4.0 - 3.0),
            fmt(pct)
        );
    }
    svg.push_str("</g>\n");

    // axis spokes, most salient first, clockwise
    svg.push_str("<g stroke=\"#c7c7c7\" stroke-width=\"1\">\n");
    for (i, &(id, _)) in axes.iter().enumerate() {
        let (x, y) = point(i, n, R);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" data-st=\"{id}\"/>",
            fmt(CX),
            fmt(CY),
            fmt(x),
            fmt(y)
        );
    }
    svg.push_str("</g>\n");

    // outer bands: salience (inner ring) and demanded-requirement count
    svg.push_str("<g fill=\"#f2c14e\" fill-opacity=\"0.55\" stroke=\"none\">\n");
    for (i, &(_, sal)) in axes.iter().enumerate() {
        let h = 34.0 * sal / sal_max;
        let _ = writeln!(svg, "<path d=\"{}\"/>", wedge(i, n, R + 8.0, R + 8.0 + h));
    }
    svg.push_str("</g>\n");
    svg.push_str("<g fill=\"#7fb2d9\" fill-opacity=\"0.55\" stroke=\"none\">\n");
    for (i, &(id, _)) in axes.iter().enumerate() {
        let h = 34.0 * demand_of(id) as f64 / demand_max as f64;
        let _ = writeln!(svg, "<path d=\"{}\"/>", wedge(i, n, R + 48.0, R + 48.0 + h));
    }
    svg.push_str("</g>\n");

    // axis labels
    let label_size = if n > 40 { 7 } else { 10 };
    let _ = writeln!(
        svg,
        "<g fill=\"#444444\" font-size=\"{label_size}\" text-anchor=\"middle\">"
    );
    for (i, &(id, _)) in axes.iter().enumerate() {
        let (x, y) = point(i, n, R + 96.0);
        let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\">{id}</text>", fmt(x), fmt(y));
    }
    svg.push_str("</g>\n");

    // one polygon per front
    for (f, front) in coverages.iter().enumerate() {
        let color = PALETTE[f % PALETTE.len()];
        let mut pts = String::new();
        for (i, &(id, _)) in axes.iter().enumerate() {
            let (x, y) = point(i, n, R * cov_of(front, id) / rmax);
            if i > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", fmt(x), fmt(y));
        }
        let _ = writeln!(
            svg,
            "<polygon points=\"{pts}\" fill=\"{color}\" fill-opacity=\"0.06\" stroke=\"{color}\" stroke-width=\"1.6\" data-front=\"{}\"/>",
            front.front_id
        );
        for (i, &(id, _)) in axes.iter().enumerate() {
            let (x, y) = point(i, n, R * cov_of(front, id) / rmax);
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.2\" fill=\"{color}\"/>",
                fmt(x),
                fmt(y)
            );
        }
    }

    // legend
    svg.push_str("<g font-size=\"13\">\n");
    for (f, front) in coverages.iter().enumerate() {
        let color = PALETTE[f % PALETTE.len()];
        let y = 24.0 + 20.0 * f as f64;
        let _ = writeln!(
            svg,
            "<rect x=\"20\" y=\"{}\" width=\"14\" height=\"14\" fill=\"{color}\"/>",
            fmt(y - 11.0)
        );
        let _ = writeln!(
            svg,
            "<text x=\"40\" y=\"{}\" fill=\"#222222\">{}</text>",
            fmt(y),
            front.front_id
        );
    }
    let band_y = 24.0 + 20.0 * coverages.len() as f64;
    let _ = writeln!(
        svg,
        "<rect x=\"20\" y=\"{}\" width=\"14\" height=\"14\" fill=\"#f2c14e\" fill-opacity=\"0.55\"/>",
        fmt(band_y - 11.0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"40\" y=\"{}\" fill=\"#222222\">salience band</text>",
        fmt(band_y)
    );
    let _ = writeln!(
        svg,
        "<rect x=\"20\" y=\"{}\" width=\"14\" height=\"14\" fill=\"#7fb2d9\" fill-opacity=\"0.55\"/>",
        fmt(band_y + 20.0 - 11.0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"40\" y=\"{}\" fill=\"#222222\">demanded requirements band</text>",
        fmt(band_y + 20.0)
    );
    svg.push_str("</g>\n</svg>\n");

    atomic_write(out, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProjectDataset, RequirementRecord, StakeholderRecord};
    use crate::salience::compute_salience;

    fn table_and_votes(rows: &[(&str, f64, usize)]) -> (SalienceTable, VoteMatrix) {
        // rows: (id, power, votes cast); salience dominated by power
        let mut votes = VoteMatrix::new();
        let mut stakeholders = Vec::new();
        let mut requirements = Vec::new();
        for j in 0..6 {
            requirements.push(RequirementRecord { id: format!("r{j}"), effort: 1.0 });
        }
        for &(id, power, k) in rows {
            let share = 100.0 / k.max(1) as f64;
            for j in 0..k {
                votes.insert(id.into(), format!("r{j}"), share).unwrap();
            }
            stakeholders.push(StakeholderRecord {
                id: id.into(),
                name: String::new(),
                power,
                legitimacy: 0.0,
                urgency: if k > 0 { 100.0 } else { 0.0 },
            });
        }
        let ds = ProjectDataset::new(stakeholders, requirements, vec![], votes).unwrap();
        (compute_salience(&ds), ds.votes().clone())
    }

    fn vector(front_id: &str, pairs: &[(&str, f64)]) -> CoverageVector {
        CoverageVector {
            front_id: front_id.into(),
            values: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    #[test]
    fn single_axis_full_coverage_reaches_the_rim() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("radar.svg");
        let (table, votes) = table_and_votes(&[("s1", 3.0, 2)]);
        emit_radar(&[vector("f", &[("s1", 1.0)])], &table, &votes, &out).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        assert_eq!(svg.matches("data-st=").count(), 1);
        // axis 0 points straight up; full scale sits at cy - R
        assert!(svg.contains("points=\"500.00,190.00\""));
    }

    #[test]
    fn axes_run_clockwise_from_highest_salience() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("radar.svg");
        let (table, votes) = table_and_votes(&[("sa", 5.0, 1), ("sb", 9.0, 2), ("sc", 1.0, 3)]);
        let fronts = [vector("f", &[("sa", 0.4), ("sb", 0.2), ("sc", 0.9)])];
        emit_radar(&fronts, &table, &votes, &out).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        let pos = |id: &str| svg.find(&format!("data-st=\"{id}\"")).unwrap();
        assert!(pos("sb") < pos("sa"));
        assert!(pos("sa") < pos("sc"));
    }

    #[test]
    fn identical_inputs_give_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.svg");
        let b = dir.path().join("b.svg");
        let (table, votes) = table_and_votes(&[("sa", 5.0, 1), ("sb", 9.0, 2)]);
        let fronts = [
            vector("x", &[("sa", 0.4), ("sb", 0.2)]),
            vector("y", &[("sa", 0.7), ("sb", 0.9)]),
        ];
        emit_radar(&fronts, &table, &votes, &a).unwrap();
        emit_radar(&fronts, &table, &votes, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn empty_front_list_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (table, votes) = table_and_votes(&[("s1", 3.0, 1)]);
        assert!(emit_radar(&[], &table, &votes, &dir.path().join("r.svg")).is_err());
    }
}
