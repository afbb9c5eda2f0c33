//! Hard instances for incremental clustering.
//!
//! - [`mconfig`]: M-configurations, the gadget behind the lower bound for nice
//!   clusterings, as explicit matrices or sampled Euclidean point sets.
//! - [`lower_bound`]: two far-apart configurations and the pair of rigged
//!   input sequences that no small-memory learner can tell apart.
//! - [`badcase`]: a search for four points in `R^3` whose optimal, perfect
//!   2-clustering sequential 2-means misses under every ordering.
//! - [`line`]: orderings of convex-nice data on the line that drag sequential
//!   `l`-means away from any refinement.

pub mod badcase;
pub mod lower_bound;
pub mod line;
pub mod mconfig;

use thiserror::Error;

pub use badcase::{find_kmeans_badcase, verify_badcase, BadcaseWitness, OrderingTrace};
pub use line::{adversarial_line_ordering, LineCertificate};
pub use lower_bound::{
    build_lower_bound_instance, run_lower_bound_game, BatchOracle, GameRecord, LowerBoundInstance,
    LowerBoundMode, RiggedSequence, SequenceOutcome,
};
pub use mconfig::{
    build_euclidean_m_configuration, build_matrix_m_configuration, configuration_subset_nice2,
    verify_m_configuration, verify_m_configuration_with_margin, ClauseViolation, MConfigReport,
    MConfiguration, MIndex, Nice2Answer,
};

use crate::incremental::StreamError;
use crate::metricspace::SpaceError;
use crate::structures::StructureError;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what}: budget of {budget} attempts exhausted")]
    BudgetExhausted { what: String, budget: u64 },
    #[error("construction failed its own certificate: {0}")]
    Certification(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}
