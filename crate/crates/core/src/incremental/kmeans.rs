use super::{require_positive, StreamAlgorithm, StreamError};
use crate::metricspace::{sq_euclidean, DistanceSpace};
use crate::structures::CenterSet;

/// Sequential k-means: the first `k` points become centers with count 1; each
/// later point moves its nearest center (ties to the earliest) by
/// `t <- t + (x - t) / n` after incrementing that center's count.
///
/// Every center is the running mean of the points assigned to it, so it never
/// leaves their convex hull.
#[derive(Debug, Clone)]
pub struct SequentialKMeans {
    k: usize,
    centers: Vec<Vec<f64>>,
    counts: Vec<u64>,
    steps: usize,
}

impl SequentialKMeans {
    pub fn new(k: usize) -> Result<Self, StreamError> {
        require_positive("k", k)?;
        Ok(Self {
            k,
            centers: Vec::with_capacity(k),
            counts: Vec::with_capacity(k),
            steps: 0,
        })
    }

    /// Resumes from an explicit state, e.g. to replay a single update.
    pub fn with_state(k: usize, centers: Vec<Vec<f64>>, counts: Vec<u64>) -> Result<Self, StreamError> {
        require_positive("k", k)?;
        if centers.len() != counts.len() || centers.len() > k {
            return Err(StreamError::InvalidParameter(format!(
                "{} centers with {} counts for k = {k}",
                centers.len(),
                counts.len()
            )));
        }
        let steps = counts.iter().sum::<u64>() as usize;
        Ok(Self { k, centers, counts, steps })
    }

    pub fn center_points(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// One update with coordinates `x`.
    pub fn step(&mut self, x: &[f64]) -> Result<(), StreamError> {
        if let Some(first) = self.centers.first() {
            if first.len() != x.len() {
                return Err(StreamError::DimensionMismatch {
                    expected: first.len(),
                    found: x.len(),
                });
            }
        }
        self.steps += 1;
        if self.centers.len() < self.k {
            self.centers.push(x.to_vec());
            self.counts.push(1);
            return Ok(());
        }
        let mut nearest = 0;
        let mut best = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = sq_euclidean(c, x);
            if i == 0 || d < best {
                nearest = i;
                best = d;
            }
        }
        self.counts[nearest] += 1;
        let n = self.counts[nearest] as f64;
        for (c, v) in self.centers[nearest].iter_mut().zip(x) {
            *c += (v - *c) / n;
        }
        Ok(())
    }
}

impl StreamAlgorithm for SequentialKMeans {
    fn name(&self) -> String {
        format!("seq-kmeans(k={})", self.k)
    }

    fn bound(&self) -> usize {
        self.k
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        let points = space.require_points()?;
        self.step(points.point(item))
    }

    fn centers(&self) -> CenterSet {
        CenterSet::Points(self.centers.clone())
    }

    fn center_count(&self) -> usize {
        self.centers.len()
    }

    fn steps(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::{DistanceMatrix, PointSet, SpaceError};
    use proptest::prelude::*;

    #[test]
    fn update_moves_nearest_center() {
        let mut km = SequentialKMeans::with_state(2, vec![vec![0.0], vec![10.0]], vec![1, 1]).unwrap();
        km.step(&[2.0]).unwrap();
        assert_eq!(km.center_points(), &[vec![1.0], vec![10.0]]);
        assert_eq!(km.counts(), &[2, 1]);
    }

    #[test]
    fn point_on_a_center_only_bumps_its_count() {
        let mut km = SequentialKMeans::with_state(2, vec![vec![0.0], vec![10.0]], vec![3, 1]).unwrap();
        km.step(&[10.0]).unwrap();
        assert_eq!(km.center_points(), &[vec![0.0], vec![10.0]]);
        assert_eq!(km.counts(), &[3, 2]);
    }

    #[test]
    fn warm_up_then_running_mean() {
        let mut km = SequentialKMeans::new(2).unwrap();
        for x in [0.0, 2.0, 4.0] {
            km.step(&[x]).unwrap();
        }
        assert_eq!(km.center_points(), &[vec![0.0], vec![3.0]]);
        assert_eq!(km.counts(), &[1, 2]);
    }

    #[test]
    fn duplicates_in_warm_up_become_distinct_centers() {
        let mut km = SequentialKMeans::new(2).unwrap();
        km.step(&[1.0]).unwrap();
        km.step(&[1.0]).unwrap();
        km.step(&[3.0]).unwrap();
        assert_eq!(km.center_points(), &[vec![2.0], vec![1.0]]);
    }

    #[test]
    fn errors() {
        let mut km = SequentialKMeans::new(2).unwrap();
        km.step(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            km.step(&[1.0]),
            Err(StreamError::DimensionMismatch { expected: 2, found: 1 })
        ));
        let m = DistanceSpace::from_matrix(DistanceMatrix::zeros(2), false);
        assert!(matches!(
            km.observe(&m, 0),
            Err(StreamError::Space(SpaceError::NotEuclidean))
        ));
        assert!(SequentialKMeans::new(0).is_err());
    }

    proptest! {
        #[test]
        fn center_stays_in_hull_of_assigned_points(
            xs in prop::collection::vec(-50.0f64..50.0, 1..40),
            k in 1usize..4,
        ) {
            // On the line the hull of the assigned points is [min, max].
            let space = DistanceSpace::euclidean(PointSet::from_1d(&xs));
            let mut km = SequentialKMeans::new(k).unwrap();
            let mut ranges: Vec<(f64, f64)> = Vec::new();
            for (i, &x) in xs.iter().enumerate() {
                let before = km.center_points().to_vec();
                let moved = if before.len() < k {
                    before.len()
                } else {
                    let mut best = 0;
                    for (c, p) in before.iter().enumerate() {
                        if (p[0] - x).abs() < (before[best][0] - x).abs() {
                            best = c;
                        }
                    }
                    best
                };
                km.observe(&space, i).unwrap();
                let after = km.center_points();
                if moved >= ranges.len() {
                    ranges.push((x, x));
                } else {
                    ranges[moved].0 = ranges[moved].0.min(x);
                    ranges[moved].1 = ranges[moved].1.max(x);
                }
                for (c, &(lo, hi)) in after.iter().zip(&ranges) {
                    prop_assert!(c[0] >= lo - 1e-9 && c[0] <= hi + 1e-9);
                }
                prop_assert!(km.center_count() <= k);
            }
        }
    }
}
