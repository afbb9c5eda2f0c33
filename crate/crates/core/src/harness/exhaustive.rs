//! Every ordering of a small instance.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::incremental::{run_stream, Ordering, Provenance, StreamAlgorithm, StreamError};
use crate::metricspace::DistanceSpace;
use crate::structures::{induce_clustering, is_refinement, CenterSet, Clustering};

/// `8! = 40320` orderings.
pub const MAX_EXHAUSTIVE_ITEMS: usize = 8;

/// What counts as success for one ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Goal {
    /// The final induced clustering equals the planted one.
    Exact,
    /// The final induced clustering refines the planted one.
    Refinement,
    /// The final exemplars include a member of every planted cluster.
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingTable {
    pub goal: Goal,
    /// Each ordering (in lexicographic order) with its outcome.
    pub rows: Vec<(Vec<usize>, bool)>,
    pub successes: usize,
}

impl OrderingTable {
    pub fn total(&self) -> usize {
        self.rows.len()
    }

    pub fn all_pass(&self) -> bool {
        self.successes == self.rows.len()
    }

    pub fn all_fail(&self) -> bool {
        self.successes == 0
    }
}

fn outcome(space: &DistanceSpace, planted: &Clustering, centers: &CenterSet, goal: Goal) -> Result<bool, HarnessError> {
    Ok(match goal {
        Goal::Exact => induce_clustering(space, centers)?.clustering.same_partition(planted),
        Goal::Refinement => is_refinement(&induce_clustering(space, centers)?.clustering, planted)?,
        Goal::Coverage => {
            let items = centers
                .items()
                .ok_or_else(|| HarnessError::Hypothesis("coverage needs exemplar centers".into()))?;
            let mut hit = vec![false; planted.k()];
            for &i in items {
                hit[planted.label(i)] = true;
            }
            hit.into_iter().all(|h| h)
        }
    })
}

/// Runs a fresh algorithm from `make` on all `n!` orderings of `space`.
pub fn exhaustive_ordering_check(
    make: &(dyn Fn() -> Result<Box<dyn StreamAlgorithm>, StreamError> + Sync),
    space: &DistanceSpace,
    planted: &Clustering,
    goal: Goal,
) -> Result<OrderingTable, HarnessError> {
    let n = space.len();
    if n > MAX_EXHAUSTIVE_ITEMS {
        return Err(HarnessError::TooLarge {
            n,
            max: MAX_EXHAUSTIVE_ITEMS,
        });
    }
    if planted.len() != n {
        return Err(HarnessError::Hypothesis(format!(
            "planted clustering covers {} items but the space has {n}",
            planted.len()
        )));
    }
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let rows = orders
        .into_par_iter()
        .map(|order| -> Result<(Vec<usize>, bool), HarnessError> {
            let ordering = Ordering::new(order.clone(), Provenance::Identity)?;
            let mut alg = make()?;
            let record = run_stream(alg.as_mut(), space, &ordering, 0)?;
            Ok((order, outcome(space, planted, &record.final_centers, goal)?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let successes = rows.iter().filter(|(_, ok)| *ok).count();
    Ok(OrderingTable { goal, rows, successes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::find_kmeans_badcase;
    use crate::incremental::{AlgorithmKind, SequentialKMeans};
    use crate::metricspace::PointSet;

    #[test]
    fn seq_nn_on_six_perfect_points() {
        let space = DistanceSpace::euclidean(PointSet::from_1d(&[0.0, 1.0, 0.5, 10.0, 11.0, 10.4]));
        let planted = Clustering::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let make = || AlgorithmKind::SeqNearestNeighbour.build(2, 0);
        let table = exhaustive_ordering_check(&make, &space, &planted, Goal::Exact).unwrap();
        assert_eq!((table.successes, table.total()), (720, 720));
    }

    #[test]
    fn badcase_fails_everywhere() {
        let w = find_kmeans_badcase(3, 1000).unwrap();
        let make = || -> Result<Box<dyn StreamAlgorithm>, StreamError> { Ok(Box::new(SequentialKMeans::new(2)?)) };
        let table = exhaustive_ordering_check(&make, &w.space(), &w.perfect, Goal::Exact).unwrap();
        assert_eq!(table.total(), 24);
        assert!(table.all_fail());
    }

    #[test]
    fn extra_centers_cover_a_seven_point_nice_instance() {
        // Nice 3-clustering with very different diameters.
        let space = DistanceSpace::euclidean(PointSet::from_1d(&[0.0, 0.1, 5.0, 6.0, 7.0, 30.0, 30.5]));
        let planted = Clustering::new(vec![0, 0, 1, 1, 1, 2, 2], 3).unwrap();
        assert!(crate::structures::is_nice(&space, &planted));
        let make = || AlgorithmKind::ExtraCenters.build(3, 0);
        let table = exhaustive_ordering_check(&make, &space, &planted, Goal::Coverage).unwrap();
        assert_eq!((table.successes, table.total()), (5040, 5040));
    }

    #[test]
    fn limits() {
        let space = DistanceSpace::euclidean(PointSet::from_1d(&[0.0; 9]));
        let planted = Clustering::whole(9);
        let make = || AlgorithmKind::SeqNearestNeighbour.build(1, 0);
        assert!(matches!(
            exhaustive_ordering_check(&make, &space, &planted, Goal::Exact),
            Err(HarnessError::TooLarge { .. })
        ));
        let small = DistanceSpace::euclidean(PointSet::from_1d(&[0.0, 1.0]));
        let km = || AlgorithmKind::SeqKMeans.build(1, 0);
        assert!(exhaustive_ordering_check(&km, &small, &Clustering::whole(2), Goal::Coverage).is_err());
    }
}
