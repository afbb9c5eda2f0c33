//! Four points in `R^3` that sequential 2-means cannot cluster.
//!
//! The search looks for a configuration whose perfect 2-clustering is also
//! the strict k-means optimum over all seven bipartitions, yet sequential
//! 2-means ends on a different clustering under every one of the 24 orderings.
//!
//! The first family tried is a thin tetrahedron: pairs `{a, b}` and `{c, d}`
//! of length `delta` in skew position, every cross distance `D` with
//! `delta^2 < D^2 < 1.25 delta^2`. If the first two arrivals come from
//! different pairs, the center that absorbs the third point sits at the
//! midpoint of a pair, at squared distance `D^2 - delta^2 / 4 < delta^2` from
//! the last point, so it swallows that too. If they come from the same pair,
//! the tie at distance `D` sends both remaining points to one center.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AdversaryError;
use crate::incremental::{run_stream, Ordering, Provenance, SequentialKMeans};
use crate::metricspace::{DistanceSpace, PointSet};
use crate::rng::{substream, Stream};
use crate::structures::{enumerate_perfect_clusterings, induce_clustering, within_cluster_ss, CenterSet, Clustering};

const JITTER: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingTrace {
    pub order: Vec<usize>,
    pub final_centers: Vec<Vec<f64>>,
    pub final_labels: Vec<usize>,
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadcaseWitness {
    pub points: Vec<Vec<f64>>,
    pub perfect: Clustering,
    /// All seven bipartitions (labels with item 0 in cluster 0) and their
    /// k-means cost about the cluster means.
    pub bipartition_costs: Vec<(Vec<usize>, f64)>,
    pub traces: Vec<OrderingTrace>,
    pub family: String,
    /// Candidate configurations examined, this one included.
    pub attempts: u64,
}

impl BadcaseWitness {
    pub fn space(&self) -> DistanceSpace {
        DistanceSpace::euclidean(PointSet::new(self.points.clone()).expect("witness points are valid"))
    }

    /// Whether the perfect bipartition costs strictly less than the six others.
    pub fn perfect_is_strict_optimum(&self) -> bool {
        let perfect = self.perfect.canonical();
        let own = self
            .bipartition_costs
            .iter()
            .find(|(l, _)| l.as_slice() == perfect.labels())
            .map(|&(_, c)| c);
        match own {
            Some(best) => self
                .bipartition_costs
                .iter()
                .filter(|(l, _)| l.as_slice() != perfect.labels())
                .all(|&(_, c)| best < c),
            None => false,
        }
    }

    pub fn failures(&self) -> usize {
        self.traces.iter().filter(|t| !t.recovered).count()
    }
}

fn bipartitions() -> Vec<Clustering> {
    (1u32..8)
        .map(|mask| {
            let labels = (0..4).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { 1 } else { 0 }).collect();
            Clustering::new(labels, 2).expect("mask is non-zero")
        })
        .collect()
}

/// Checks the three acceptance conditions on `points` and, when all hold,
/// returns the full record (with `family` empty and `attempts` zero).
pub fn verify_badcase(points: &[Vec<f64>]) -> Result<Option<BadcaseWitness>, AdversaryError> {
    if points.len() != 4 {
        return Err(AdversaryError::InvalidParameter("the bad case has four points".into()));
    }
    let space = DistanceSpace::euclidean(PointSet::new(points.to_vec())?);
    let Some(perfect) = enumerate_perfect_clusterings(&space, 2, 1)?.pop() else {
        return Ok(None);
    };
    let mut bipartition_costs = Vec::with_capacity(7);
    for c in bipartitions() {
        bipartition_costs.push((c.labels().to_vec(), within_cluster_ss(&space, &c)?));
    }
    let mut traces = Vec::with_capacity(24);
    for order in (0..4).permutations(4) {
        let ordering = Ordering::new(order.clone(), Provenance::Identity)?;
        let mut km = SequentialKMeans::new(2)?;
        let record = run_stream(&mut km, &space, &ordering, 0)?;
        let induced = induce_clustering(&space, &record.final_centers)?;
        let final_centers = match record.final_centers {
            CenterSet::Points(p) => p,
            CenterSet::Items(_) => unreachable!("k-means synthesizes point centers"),
        };
        traces.push(OrderingTrace {
            order,
            final_centers,
            recovered: induced.clustering.same_partition(&perfect),
            final_labels: induced.clustering.labels().to_vec(),
        });
    }
    let witness = BadcaseWitness {
        points: points.to_vec(),
        perfect,
        bipartition_costs,
        traces,
        family: String::new(),
        attempts: 0,
    };
    Ok((witness.perfect_is_strict_optimum() && witness.failures() == 24).then_some(witness))
}

fn thin_tetrahedron<R: Rng + ?Sized>(rng: &mut R) -> Vec<Vec<f64>> {
    // delta = 1, so D^2 = 1/2 + h^2 must fall in (1, 1.25).
    let h = rng.random_range(0.72..0.85);
    let base = [
        [-0.5, 0.0, 0.0],
        [0.5, 0.0, 0.0],
        [0.0, -0.5, h],
        [0.0, 0.5, h],
    ];
    base.iter()
        .map(|p| p.iter().map(|c| c + rng.random_range(-JITTER..JITTER)).collect())
        .collect()
}

fn uniform_cube<R: Rng + ?Sized>(rng: &mut R) -> Vec<Vec<f64>> {
    (0..4).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect()
}

/// Searches the thin-tetrahedron family for the first half of `budget`
/// candidates and the unit cube for the rest.
pub fn find_kmeans_badcase(seed: u64, budget: u64) -> Result<BadcaseWitness, AdversaryError> {
    let mut rng = substream(seed, Stream::Search, 0);
    let tetra_budget = budget.div_ceil(2);
    for attempt in 1..=budget {
        let (family, points) = if attempt <= tetra_budget {
            ("thin-tetrahedron", thin_tetrahedron(&mut rng))
        } else {
            ("uniform-cube", uniform_cube(&mut rng))
        };
        if let Some(mut witness) = verify_badcase(&points)? {
            witness.family = family.to_string();
            witness.attempts = attempt;
            return Ok(witness);
        }
    }
    Err(AdversaryError::BudgetExhausted {
        what: "sequential k-means bad case".into(),
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::is_perfect;

    #[test]
    fn seven_bipartitions() {
        let all = bipartitions();
        assert_eq!(all.len(), 7);
        assert!(all.iter().all(|c| c.label(0) == 0 && c.k() == 2));
        assert_eq!(all.iter().map(|c| c.labels().to_vec()).unique().count(), 7);
    }

    #[test]
    fn search_finds_a_checked_witness() {
        let w = find_kmeans_badcase(3, 1000).unwrap();
        let space = w.space();
        assert!(is_perfect(&space, &w.perfect));
        assert!(w.perfect_is_strict_optimum());
        assert_eq!(w.traces.len(), 24);
        assert_eq!(w.failures(), 24);
        // Re-checking from the points alone reproduces the record.
        let again = verify_badcase(&w.points).unwrap().unwrap();
        assert_eq!(again.traces, w.traces);
    }

    #[test]
    fn a_square_is_not_a_bad_case() {
        // Two tight pairs far apart: sequential 2-means succeeds on some ordering.
        let pts = vec![vec![0.0, 0.0, 0.0], vec![0.1, 0.0, 0.0], vec![5.0, 0.0, 0.0], vec![5.1, 0.0, 0.0]];
        assert!(verify_badcase(&pts).unwrap().is_none());
    }
}
