//! Clusterings and the structural predicates defined over them.
//!
//! Checkers use exact `<` comparisons. Instance generators are responsible for
//! building margins large enough that floating-point rounding never decides a
//! verdict.

mod checks;
mod clustering;
mod enumerate;
mod hull;

use thiserror::Error;

pub use checks::{
    compute_cores, is_convex_nice_sufficient, is_nice, is_perfect, is_refinement, kmeans_cost,
    nice_violation, perfect_violation, refinement_violation, size_beta, within_cluster_ss,
    CoreAnnotation, NiceWitness, PerfectWitness,
};
pub use clustering::{induce_clustering, CenterSet, Clustering, Induced};
pub use enumerate::{
    enumerate_nice_clusterings, enumerate_perfect_clusterings, MAX_ENUMERATION_ITEMS,
};
pub use hull::{hull_distance, hull_distance_bounds, HullDistance};

use crate::metricspace::SpaceError;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("label {label} at item {item} is not below k = {k}")]
    LabelOutOfRange { item: usize, label: usize, k: usize },
    #[error("empty center list")]
    NoCenters,
    #[error("center item {center} out of range for a space of {n} items")]
    CenterOutOfRange { center: usize, n: usize },
    #[error("center has {found} coordinates, space has dimension {expected}")]
    CenterDimension { expected: usize, found: usize },
    #[error("clusterings cover {left} and {right} items")]
    ItemSetMismatch { left: usize, right: usize },
    #[error("clustering covers {clustering} items but the space has {space}")]
    SpaceMismatch { clustering: usize, space: usize },
    #[error("{n} items exceed the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("more than {cap} clusterings found")]
    CapExceeded { cap: usize },
    #[error("clustering parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}
