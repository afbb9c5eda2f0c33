//! Incremental (streaming) clustering with exact structural checkers.
//!
//! The crate is organised bottom-up:
//!
//! - [`metricspace`]: finite distance spaces backed by coordinates or an explicit matrix.
//! - [`structures`]: clusterings, exemplar-induced clusterings and the clusterability
//!   predicates (nice, perfect, convex-nice, cores, refinement) with brute-force oracles.
//! - [`linkage`]: batch single linkage and the `candidates` compression subroutine.
//! - [`incremental`]: the streaming algorithms behind one bounded-state interface.
//! - [`adversary`]: hard instances (M-configurations, the two-configuration protocol,
//!   the sequential k-means bad case, adversarial line orderings).
//! - [`harness`]: instance generators, Monte Carlo experiments and the acceptance suite.
//!
//! ```
//! use seqclust::metricspace::{DistanceSpace, PointSet};
//! use seqclust::structures::{induce_clustering, is_nice, CenterSet};
//!
//! let space = DistanceSpace::euclidean(PointSet::from_1d(&[1.0, 2.0, 4.0, 5.0]));
//! let induced = induce_clustering(&space, &CenterSet::Items(vec![0, 2])).unwrap();
//! assert_eq!(induced.clustering.labels(), &[0, 0, 1, 1]);
//! assert!(is_nice(&space, &induced.clustering));
//! ```

pub mod adversary;
pub mod harness;
pub mod incremental;
pub mod linkage;
pub mod metricspace;
pub mod rng;
pub mod structures;
