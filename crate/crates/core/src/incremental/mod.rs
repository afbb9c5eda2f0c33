//! Streaming clustering algorithms behind one bounded-state interface.
//!
//! Every algorithm observes items of a [`DistanceSpace`] one at a time and keeps
//! at most [`StreamAlgorithm::bound`] centers, a number fixed by its parameters
//! alone. [`run_stream`] enforces the bound after every step.

mod agglomerative;
mod extra;
mod kmeans;
mod nearest;
mod ordering;
mod run;
mod subsample;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use agglomerative::{CentroidMerge, MergeRule, NearestNeighbourMerge, SequentialAgglomerative, WeightedCenter};
pub use extra::ExtraCenters;
pub use kmeans::SequentialKMeans;
pub use nearest::SequentialNearestNeighbour;
pub use ordering::{Ordering, Provenance};
pub use run::{run_stream, RunRecord, Snapshot};
pub use subsample::Subsample;

use crate::linkage::LinkageError;
use crate::metricspace::{DistanceSpace, SpaceError};
use crate::structures::CenterSet;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("merge rule returned a non-finite distance")]
    NonFiniteDistance,
    #[error("{algorithm} holds {held} centers, above its bound of {bound}")]
    StateBoundExceeded {
        algorithm: String,
        held: usize,
        bound: usize,
    },
    #[error("ordering covers {ordering} items but the space has {space}")]
    OrderingMismatch { ordering: usize, space: usize },
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
}

/// A deterministic incremental clusterer.
pub trait StreamAlgorithm: Send {
    /// Name with parameters, e.g. `seq-kmeans(k=3)`.
    fn name(&self) -> String;

    /// Largest number of centers the state may hold at rest.
    fn bound(&self) -> usize;

    /// Feeds one item of `space`.
    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError>;

    /// Copy of the current model.
    fn centers(&self) -> CenterSet;

    fn center_count(&self) -> usize;

    /// Items observed so far.
    fn steps(&self) -> usize;

    /// Seed of the algorithm's own randomness, if it has any.
    fn seed(&self) -> Option<u64> {
        None
    }
}

/// Named algorithm configurations, parseable from the CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    SeqKMeans,
    AgglomerativeNearest,
    AgglomerativeCentroid,
    SeqNearestNeighbour,
    ExtraCenters,
    Subsample,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::SeqKMeans,
        AlgorithmKind::AgglomerativeNearest,
        AlgorithmKind::AgglomerativeCentroid,
        AlgorithmKind::SeqNearestNeighbour,
        AlgorithmKind::ExtraCenters,
        AlgorithmKind::Subsample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::SeqKMeans => "seq-kmeans",
            AlgorithmKind::AgglomerativeNearest => "seq-agglom-nn",
            AlgorithmKind::AgglomerativeCentroid => "seq-agglom-centroid",
            AlgorithmKind::SeqNearestNeighbour => "seq-nn",
            AlgorithmKind::ExtraCenters => "extra-centers",
            AlgorithmKind::Subsample => "subsample",
        }
    }

    /// Builds the algorithm with `k` (or `l`) centers; `seed` feeds the
    /// subsampler and is ignored by the deterministic algorithms.
    pub fn build(self, k: usize, seed: u64) -> Result<Box<dyn StreamAlgorithm>, StreamError> {
        Ok(match self {
            AlgorithmKind::SeqKMeans => Box::new(SequentialKMeans::new(k)?),
            AlgorithmKind::AgglomerativeNearest => {
                Box::new(SequentialAgglomerative::new(k, NearestNeighbourMerge)?)
            }
            AlgorithmKind::AgglomerativeCentroid => {
                Box::new(SequentialAgglomerative::new(k, CentroidMerge)?)
            }
            AlgorithmKind::SeqNearestNeighbour => Box::new(SequentialNearestNeighbour::new(k)?),
            AlgorithmKind::ExtraCenters => Box::new(ExtraCenters::new(k)?),
            AlgorithmKind::Subsample => Box::new(Subsample::new(k, seed)?),
        })
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AlgorithmKind::ALL.iter().map(|k| k.as_str()).collect();
                format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
            })
    }
}

pub(crate) fn require_positive(name: &str, value: usize) -> Result<(), StreamError> {
    if value == 0 {
        Err(StreamError::InvalidParameter(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}
