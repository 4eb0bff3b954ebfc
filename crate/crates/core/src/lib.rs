//! Stakeholder salience quantification, stakeholder grouping, and
//! bi-objective next-release planning.
//!
//! The pipeline: ingest a four-file CSV dataset, filter it to stakeholders
//! with at least two positive salience components, score and group the
//! stakeholders (quartile bands or clustering), solve the next-release
//! problem with each group's salience weights, and compare how well the
//! resulting release plans cover stakeholder demand.

pub mod coverage;
pub mod error;
pub mod features;
pub(crate) mod fsutil;
pub mod grouping;
pub mod model;
pub mod nrp;
pub mod pipeline;
pub mod radar;
pub mod salience;
pub mod stats;
pub mod synth;
pub mod validation;

pub use error::{Error, Result};
pub use model::{ProjectDataset, Recommendation, RequirementRecord, StakeholderRecord, VoteMatrix};
