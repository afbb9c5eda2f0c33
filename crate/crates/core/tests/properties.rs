use proptest::prelude::*;
use seqclust::incremental::{run_stream, Ordering, StreamAlgorithm, Subsample};
use seqclust::linkage::candidates;
use seqclust::metricspace::{DistanceMatrix, DistanceSpace, PointSet};
use seqclust::structures::{
    enumerate_nice_clusterings, enumerate_perfect_clusterings, induce_clustering, is_nice, is_perfect, CenterSet,
};

fn line_space() -> impl Strategy<Value = DistanceSpace> {
    prop::collection::vec(0u32..40, 2..9).prop_map(|v| {
        let xs: Vec<f64> = v.into_iter().map(f64::from).collect();
        DistanceSpace::euclidean(PointSet::from_1d(&xs))
    })
}

fn tie_matrix() -> impl Strategy<Value = DistanceSpace> {
    (2usize..8).prop_flat_map(|n| {
        prop::collection::vec(1u8..4, n * (n - 1) / 2).prop_map(move |vals| {
            let mut m = DistanceMatrix::zeros(n);
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    m.set(i, j, f64::from(it.next().unwrap()));
                }
            }
            DistanceSpace::from_matrix(m, false)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn at_most_one_perfect_clustering(space in tie_matrix()) {
        for k in 1..=space.len() {
            let found = enumerate_perfect_clusterings(&space, k, usize::MAX).unwrap();
            prop_assert!(found.len() <= 1);
            for c in &found {
                prop_assert!(is_perfect(&space, c));
            }
        }
    }

    #[test]
    fn candidates_hit_every_nice_clustering(space in line_space(), k in 1usize..5) {
        let n = space.len();
        let items: Vec<usize> = (0..n).rev().collect();
        let cand = candidates(&space, &items, k).unwrap();
        for l in 1..=k.min(n) {
            for c in enumerate_nice_clusterings(&space, l, usize::MAX).unwrap() {
                let mut hit = vec![false; c.k()];
                for &x in &cand {
                    hit[c.label(x)] = true;
                }
                prop_assert!(hit.iter().all(|&h| h));
            }
        }
    }

    #[test]
    fn representatives_induce_nice_clusterings(space in line_space(), pick in any::<u64>()) {
        for k in 1..=space.len().min(4) {
            for c in enumerate_nice_clusterings(&space, k, usize::MAX).unwrap() {
                prop_assert!(is_nice(&space, &c));
                let reps: Vec<usize> = c
                    .clusters()
                    .iter()
                    .map(|m| m[(pick as usize) % m.len()])
                    .collect();
                let induced = induce_clustering(&space, &CenterSet::Items(reps)).unwrap();
                prop_assert!(induced.clustering.same_partition(&c));
            }
        }
    }

    #[test]
    fn reservoir_is_a_subset_of_the_prefix(n in 1usize..60, l in 1usize..10, seed in any::<u64>()) {
        let space = DistanceSpace::euclidean(PointSet::from_1d(&vec![0.0; n]));
        let ordering = Ordering::random(n, seed);
        let mut s = Subsample::new(l, seed).unwrap();
        let rec = run_stream(&mut s, &space, &ordering, 1).unwrap();
        for snap in &rec.snapshots {
            let held = snap.centers.items().unwrap();
            prop_assert_eq!(held.len(), snap.step.min(l));
            let prefix = &ordering.as_slice()[..snap.step];
            prop_assert!(held.iter().all(|i| prefix.contains(i)));
        }
        prop_assert_eq!(s.steps(), n);
    }
}
