use super::{require_positive, StreamAlgorithm, StreamError};
use crate::metricspace::{euclidean, DistanceSpace};
use crate::structures::CenterSet;

/// A center of the agglomerative stream with its sufficient statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCenter {
    pub point: Vec<f64>,
    pub count: u64,
    /// Arrival step of the oldest point merged into this center.
    pub born: usize,
}

/// The `dist` / `merge` pair of sequential agglomerative clustering.
pub trait MergeRule: Send {
    fn name(&self) -> &'static str;
    fn dist(&self, a: &WeightedCenter, b: &WeightedCenter) -> f64;
    fn merge(&self, a: &WeightedCenter, b: &WeightedCenter) -> WeightedCenter;
}

/// `dist = d`; the merged center is the older of the two.
#[derive(Debug, Clone, Copy, Default)]
pub struct NearestNeighbourMerge;

impl MergeRule for NearestNeighbourMerge {
    fn name(&self) -> &'static str {
        "nn"
    }

    fn dist(&self, a: &WeightedCenter, b: &WeightedCenter) -> f64 {
        euclidean(&a.point, &b.point)
    }

    fn merge(&self, a: &WeightedCenter, b: &WeightedCenter) -> WeightedCenter {
        let older = if a.born <= b.born { a } else { b };
        WeightedCenter {
            point: older.point.clone(),
            count: a.count + b.count,
            born: older.born,
        }
    }
}

/// `dist = d` between centroids; merge takes the count-weighted mean. This is
/// a centroid variant in the spirit of Ward's criterion, not Ward's method.
#[derive(Debug, Clone, Copy, Default)]
pub struct CentroidMerge;

impl MergeRule for CentroidMerge {
    fn name(&self) -> &'static str {
        "centroid"
    }

    fn dist(&self, a: &WeightedCenter, b: &WeightedCenter) -> f64 {
        euclidean(&a.point, &b.point)
    }

    fn merge(&self, a: &WeightedCenter, b: &WeightedCenter) -> WeightedCenter {
        let total = a.count + b.count;
        let (na, nb, nt) = (a.count as f64, b.count as f64, total as f64);
        WeightedCenter {
            point: a.point.iter().zip(&b.point).map(|(x, y)| (na * x + nb * y) / nt).collect(),
            count: total,
            born: a.born.min(b.born),
        }
    }
}

/// Sequential agglomerative clustering over Euclidean data: the new point joins
/// `T`, then the closest pair under the rule's `dist` (ties to the
/// lexicographically smallest position pair) is replaced by its merge.
pub struct SequentialAgglomerative<R: MergeRule> {
    k: usize,
    rule: R,
    centers: Vec<WeightedCenter>,
    steps: usize,
}

impl<R: MergeRule> SequentialAgglomerative<R> {
    pub fn new(k: usize, rule: R) -> Result<Self, StreamError> {
        require_positive("k", k)?;
        Ok(Self {
            k,
            rule,
            centers: Vec::with_capacity(k + 1),
            steps: 0,
        })
    }

    pub fn with_state(k: usize, rule: R, centers: Vec<WeightedCenter>) -> Result<Self, StreamError> {
        let mut s = Self::new(k, rule)?;
        if centers.len() > k {
            return Err(StreamError::InvalidParameter(format!("{} centers for k = {k}", centers.len())));
        }
        s.steps = centers.iter().map(|c| c.born + 1).max().unwrap_or(0);
        s.centers = centers;
        Ok(s)
    }

    pub fn weighted_centers(&self) -> &[WeightedCenter] {
        &self.centers
    }

    pub fn step(&mut self, x: &[f64]) -> Result<(), StreamError> {
        if let Some(first) = self.centers.first() {
            if first.point.len() != x.len() {
                return Err(StreamError::DimensionMismatch {
                    expected: first.point.len(),
                    found: x.len(),
                });
            }
        }
        self.centers.push(WeightedCenter {
            point: x.to_vec(),
            count: 1,
            born: self.steps,
        });
        self.steps += 1;
        if self.centers.len() <= self.k {
            return Ok(());
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for p in 0..self.centers.len() {
            for q in p + 1..self.centers.len() {
                let d = self.rule.dist(&self.centers[p], &self.centers[q]);
                if !d.is_finite() {
                    return Err(StreamError::NonFiniteDistance);
                }
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, p, q));
                }
            }
        }
        let (_, p, q) = best.expect("at least two centers");
        let merged = self.rule.merge(&self.centers[p], &self.centers[q]);
        self.centers[p] = merged;
        self.centers.remove(q);
        Ok(())
    }
}

impl<R: MergeRule> StreamAlgorithm for SequentialAgglomerative<R> {
    fn name(&self) -> String {
        format!("seq-agglom-{}(k={})", self.rule.name(), self.k)
    }

    fn bound(&self) -> usize {
        self.k
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        let points = space.require_points()?;
        self.step(points.point(item))
    }

    fn centers(&self) -> CenterSet {
        CenterSet::Points(self.centers.iter().map(|c| c.point.clone()).collect())
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

    fn center(x: f64, count: u64, born: usize) -> WeightedCenter {
        WeightedCenter {
            point: vec![x],
            count,
            born,
        }
    }

    #[test]
    fn nearest_neighbour_rule_keeps_older() {
        let mut a = SequentialAgglomerative::with_state(
            2,
            NearestNeighbourMerge,
            vec![center(0.0, 1, 0), center(10.0, 1, 1)],
        )
        .unwrap();
        a.step(&[1.0]).unwrap();
        let pts: Vec<f64> = a.weighted_centers().iter().map(|c| c.point[0]).collect();
        assert_eq!(pts, vec![0.0, 10.0]);
    }

    #[test]
    fn centroid_rule_weights_by_count() {
        let mut a = SequentialAgglomerative::with_state(
            2,
            CentroidMerge,
            vec![center(0.0, 1, 0), center(10.0, 1, 1)],
        )
        .unwrap();
        a.step(&[1.0]).unwrap();
        assert_eq!(a.weighted_centers(), &[center(0.5, 2, 0), center(10.0, 1, 1)]);
        a.step(&[9.0]).unwrap();
        assert_eq!(a.weighted_centers(), &[center(0.5, 2, 0), center(9.5, 2, 1)]);
        a.step(&[3.5]).unwrap();
        // 0.5 (count 2) and 3.5 are 3 apart, 3.5 and 9.5 are 6 apart.
        assert_eq!(a.weighted_centers(), &[center(1.5, 3, 0), center(9.5, 2, 1)]);
    }

    struct Broken;

    impl MergeRule for Broken {
        fn name(&self) -> &'static str {
            "broken"
        }
        fn dist(&self, _: &WeightedCenter, _: &WeightedCenter) -> f64 {
            f64::NAN
        }
        fn merge(&self, a: &WeightedCenter, _: &WeightedCenter) -> WeightedCenter {
            a.clone()
        }
    }

    #[test]
    fn non_finite_hook_is_an_error() {
        let mut a = SequentialAgglomerative::new(1, Broken).unwrap();
        a.step(&[0.0]).unwrap();
        assert!(matches!(a.step(&[1.0]), Err(StreamError::NonFiniteDistance)));
    }

    #[test]
    fn bound_holds() {
        let mut a = SequentialAgglomerative::new(3, CentroidMerge).unwrap();
        for i in 0..50 {
            a.step(&[(i * 37 % 11) as f64]).unwrap();
            assert!(a.center_count() <= 3);
        }
        assert_eq!(a.weighted_centers().iter().map(|c| c.count).sum::<u64>(), 50);
    }
}
