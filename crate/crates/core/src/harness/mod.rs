//! Instance generators, Monte Carlo experiments and exhaustive checks.
//!
//! - [`generators`]: perfect, nice, convex-nice and core instances, each
//!   confirmed by its class checker before it is returned.
//! - [`experiment`]: repeated seeded runs of sequential `l`-means or the
//!   subsampler, compared against `1 - k exp(-beta l)`.
//! - [`exhaustive`]: every ordering of a small instance.
//! - [`acceptance`]: the full acceptance suite behind `verify-all`.
//! - [`report`]: JSON and CSV serialization of experiment reports.

pub mod acceptance;
pub mod exhaustive;
pub mod experiment;
pub mod generators;
pub mod report;

use thiserror::Error;

pub use acceptance::{render_summary, run_criterion, verify_all, CriterionResult};
pub use exhaustive::{exhaustive_ordering_check, Goal, OrderingTable, MAX_EXHAUSTIVE_ITEMS};
pub use experiment::{
    probability_bound, run_probability_experiment, ExperimentAlgorithm, ExperimentConfig, ExperimentReport,
    OrderingMode,
};
pub use generators::{
    gen_convex_nice, gen_core_clustering, gen_nice, gen_perfect, generate, GeneratorClass, GeneratorSpec, Instance,
};

use crate::adversary::AdversaryError;
use crate::incremental::StreamError;
use crate::linkage::LinkageError;
use crate::metricspace::SpaceError;
use crate::structures::StructureError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("{class} generation failed its checker {retries} times")]
    Infeasible { class: String, retries: u32 },
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("{n} items are too many to enumerate orderings (limit {max})")]
    TooLarge { n: usize, max: usize },
    #[error("report serialization failed: {0}")]
    Report(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
}
