//! Brute-force oracles: all nice / perfect k-clusterings of a small space.
//!
//! Partitions are walked as restricted-growth strings (item `i` receives a label
//! no larger than one plus the largest label used by items `0..i`), so every
//! partition is generated exactly once, in canonical label order. Each prefix is
//! pruned as soon as it contains a violating triple or pair: both predicates are
//! universally quantified, so a violation among assigned items survives every
//! completion.

use super::{Clustering, StructureError};
use crate::metricspace::DistanceSpace;

/// Bell(14) is about 1.9e8; beyond this enumeration stops being a desk tool.
pub const MAX_ENUMERATION_ITEMS: usize = 14;

trait Prune {
    type State: Clone;
    fn start(&self, n: usize) -> Self::State;
    /// Extends the state with item `i` (labels[..=i] assigned); false if infeasible.
    fn extend(&self, state: &mut Self::State, dist: &[Vec<f64>], labels: &[usize], i: usize) -> bool;
}

struct NicePrune;

impl Prune for NicePrune {
    /// Per item: farthest assigned cluster-mate, nearest assigned outsider.
    type State = (Vec<f64>, Vec<f64>);

    fn start(&self, n: usize) -> Self::State {
        (vec![0.0; n], vec![f64::INFINITY; n])
    }

    fn extend(&self, (far_in, near_out): &mut Self::State, dist: &[Vec<f64>], labels: &[usize], i: usize) -> bool {
        far_in[i] = 0.0;
        near_out[i] = f64::INFINITY;
        for j in 0..i {
            let d = dist[i][j];
            if labels[j] == labels[i] {
                far_in[j] = far_in[j].max(d);
                far_in[i] = far_in[i].max(d);
            } else {
                near_out[j] = near_out[j].min(d);
                near_out[i] = near_out[i].min(d);
            }
        }
        (0..=i).all(|j| far_in[j] < near_out[j])
    }
}

struct PerfectPrune;

impl Prune for PerfectPrune {
    /// Largest intra pair (d(x,x) = 0 included), smallest inter pair.
    type State = (f64, f64);

    fn start(&self, _n: usize) -> Self::State {
        (0.0, f64::INFINITY)
    }

    fn extend(&self, (intra, inter): &mut Self::State, dist: &[Vec<f64>], labels: &[usize], i: usize) -> bool {
        for j in 0..i {
            let d = dist[i][j];
            if labels[j] == labels[i] {
                *intra = intra.max(d);
            } else {
                *inter = inter.min(d);
            }
        }
        *intra < *inter
    }
}

struct Walk<'a, P: Prune> {
    prune: &'a P,
    dist: Vec<Vec<f64>>,
    k: usize,
    cap: usize,
    labels: Vec<usize>,
    found: Vec<Clustering>,
}

impl<P: Prune> Walk<'_, P> {
    fn visit(&mut self, i: usize, used: usize, state: &P::State) -> Result<(), StructureError> {
        let n = self.labels.len();
        if i == n {
            if used == self.k {
                if self.found.len() == self.cap {
                    return Err(StructureError::CapExceeded { cap: self.cap });
                }
                self.found.push(Clustering::from_rgs(self.labels.clone(), self.k));
            }
            return Ok(());
        }
        for label in 0..(used + 1).min(self.k) {
            let now_used = used.max(label + 1);
            if now_used + (n - i - 1) < self.k {
                continue;
            }
            self.labels[i] = label;
            let mut next = state.clone();
            if self.prune.extend(&mut next, &self.dist, &self.labels, i) {
                self.visit(i + 1, now_used, &next)?;
            }
        }
        Ok(())
    }
}

fn enumerate<P: Prune>(
    prune: &P,
    space: &DistanceSpace,
    k: usize,
    cap: usize,
) -> Result<Vec<Clustering>, StructureError> {
    let n = space.len();
    if n > MAX_ENUMERATION_ITEMS {
        return Err(StructureError::TooLarge {
            n,
            max: MAX_ENUMERATION_ITEMS,
        });
    }
    if k == 0 || k > n {
        return Ok(Vec::new());
    }
    let dist = (0..n)
        .map(|i| (0..n).map(|j| space.d(i, j)).collect())
        .collect();
    let mut walk = Walk {
        prune,
        dist,
        k,
        cap,
        labels: vec![0; n],
        found: Vec::new(),
    };
    let start = prune.start(n);
    walk.visit(0, 0, &start)?;
    Ok(walk.found)
}

/// Every nice partition into exactly `k` non-empty clusters, canonically
/// labelled. Fails with [`StructureError::CapExceeded`] once more than `cap`
/// are found.
pub fn enumerate_nice_clusterings(
    space: &DistanceSpace,
    k: usize,
    cap: usize,
) -> Result<Vec<Clustering>, StructureError> {
    enumerate(&NicePrune, space, k, cap)
}

/// Every perfect `k`-clustering; at most one exists.
pub fn enumerate_perfect_clusterings(
    space: &DistanceSpace,
    k: usize,
    cap: usize,
) -> Result<Vec<Clustering>, StructureError> {
    enumerate(&PerfectPrune, space, k, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::PointSet;
    use crate::structures::{is_nice, is_perfect};
    use proptest::prelude::*;

    fn line(values: &[f64]) -> DistanceSpace {
        DistanceSpace::euclidean(PointSet::from_1d(values))
    }

    /// Unpruned enumeration of all k-partitions via label vectors in base k.
    fn all_partitions(n: usize, k: usize) -> Vec<Clustering> {
        let mut out = Vec::new();
        let total = (k as u64).pow(n as u32);
        for mut code in 0..total {
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                labels.push((code % k as u64) as usize);
                code /= k as u64;
            }
            if let Ok(c) = Clustering::new(labels, k) {
                if c.canonical() == c {
                    out.push(c);
                }
            }
        }
        out.sort_by(|a, b| a.labels().cmp(b.labels()));
        out
    }

    #[test]
    fn nice_three_clusterings_of_the_line() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        let found = enumerate_nice_clusterings(&s, 3, 16).unwrap();
        let expected = vec![
            Clustering::from_labels(vec![0, 0, 1, 2]).unwrap(),
            Clustering::from_labels(vec![0, 1, 2, 2]).unwrap(),
        ];
        assert_eq!(found, expected);
    }

    #[test]
    fn trivial_k() {
        let s = line(&[1.0, 2.0, 4.0, 5.0, 9.0]);
        assert_eq!(enumerate_nice_clusterings(&s, 1, 4).unwrap(), vec![Clustering::whole(5)]);
        assert_eq!(
            enumerate_nice_clusterings(&s, 5, 4).unwrap(),
            vec![Clustering::singletons(5)]
        );
        assert!(enumerate_nice_clusterings(&s, 6, 4).unwrap().is_empty());
    }

    #[test]
    fn perfect_two_clustering_of_the_line() {
        // All 7 bipartitions of {1,2,4,5} checked directly.
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        let brute: Vec<_> = all_partitions(4, 2)
            .into_iter()
            .filter(|c| is_perfect(&s, c))
            .collect();
        assert_eq!(all_partitions(4, 2).len(), 7);
        assert_eq!(brute, vec![Clustering::from_labels(vec![0, 0, 1, 1]).unwrap()]);
        assert_eq!(enumerate_perfect_clusterings(&s, 2, 4).unwrap(), brute);
    }

    #[test]
    fn guards() {
        let s = line(&(0..15).map(f64::from).collect::<Vec<_>>());
        assert!(matches!(
            enumerate_nice_clusterings(&s, 2, 10),
            Err(StructureError::TooLarge { n: 15, .. })
        ));
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        assert!(matches!(
            enumerate_nice_clusterings(&s, 3, 1),
            Err(StructureError::CapExceeded { cap: 1 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pruned_walk_matches_unpruned_filter(
            values in prop::collection::vec(0.0f64..20.0, 1..8),
            k in 1usize..5,
        ) {
            let s = line(&values);
            let n = values.len();
            let k = k.min(n);
            let nice: Vec<_> = all_partitions(n, k).into_iter().filter(|c| is_nice(&s, c)).collect();
            prop_assert_eq!(enumerate_nice_clusterings(&s, k, usize::MAX).unwrap(), nice);
            let perfect: Vec<_> = all_partitions(n, k).into_iter().filter(|c| is_perfect(&s, c)).collect();
            prop_assert!(perfect.len() <= 1);
            prop_assert_eq!(enumerate_perfect_clusterings(&s, k, usize::MAX).unwrap(), perfect);
        }
    }
}
