use super::{require_positive, StreamAlgorithm, StreamError};
use crate::metricspace::DistanceSpace;
use crate::structures::CenterSet;

/// Sequential nearest-neighbour clustering with item exemplars.
///
/// The new item joins `T`; once `T` holds `k + 1` exemplars the closest pair
/// (ties to the lexicographically smallest position pair) collapses to its
/// older member. `T` is kept in arrival order, so the older member is the one
/// at the smaller position. Works in any distance space.
#[derive(Debug, Clone)]
pub struct SequentialNearestNeighbour {
    k: usize,
    exemplars: Vec<usize>,
    steps: usize,
}

impl SequentialNearestNeighbour {
    pub fn new(k: usize) -> Result<Self, StreamError> {
        require_positive("k", k)?;
        Ok(Self {
            k,
            exemplars: Vec::with_capacity(k + 1),
            steps: 0,
        })
    }

    pub fn exemplars(&self) -> &[usize] {
        &self.exemplars
    }
}

impl StreamAlgorithm for SequentialNearestNeighbour {
    fn name(&self) -> String {
        format!("seq-nn(k={})", self.k)
    }

    fn bound(&self) -> usize {
        self.k
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        space.distance(item, item)?;
        self.exemplars.push(item);
        self.steps += 1;
        if self.exemplars.len() <= self.k {
            return Ok(());
        }
        let t = &self.exemplars;
        let mut best = (f64::INFINITY, 0, 1);
        let mut found = false;
        for p in 0..t.len() {
            for q in p + 1..t.len() {
                let d = space.d(t[p], t[q]);
                if !found || d < best.0 {
                    best = (d, p, q);
                    found = true;
                }
            }
        }
        self.exemplars.remove(best.2);
        Ok(())
    }

    fn centers(&self) -> CenterSet {
        CenterSet::Items(self.exemplars.clone())
    }

    fn center_count(&self) -> usize {
        self.exemplars.len()
    }

    fn steps(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::PointSet;
    use itertools::Itertools;

    #[test]
    fn closest_pair_keeps_older() {
        let s = DistanceSpace::euclidean(PointSet::from_1d(&[0.0, 10.0, 1.0]));
        let mut nn = SequentialNearestNeighbour::new(2).unwrap();
        for i in [1, 0, 2] {
            nn.observe(&s, i).unwrap();
        }
        assert_eq!(nn.exemplars(), &[1, 0]);
    }

    #[test]
    fn one_exemplar_per_side_on_every_ordering() {
        let s = DistanceSpace::euclidean(PointSet::from_1d(&[1.0, 2.0, 4.0, 5.0]));
        for order in (0..4).permutations(4) {
            let mut nn = SequentialNearestNeighbour::new(2).unwrap();
            for &i in &order {
                nn.observe(&s, i).unwrap();
            }
            let mut t = nn.exemplars().to_vec();
            t.sort_unstable();
            assert!(t[0] < 2 && t[1] >= 2, "{order:?} -> {t:?}");
        }
    }

    #[test]
    fn large_k_keeps_everything() {
        let s = DistanceSpace::euclidean(PointSet::from_1d(&[3.0, 1.0, 2.0]));
        let mut nn = SequentialNearestNeighbour::new(5).unwrap();
        for i in 0..3 {
            nn.observe(&s, i).unwrap();
        }
        assert_eq!(nn.exemplars(), &[0, 1, 2]);
        assert!(nn.observe(&s, 3).is_err());
    }
}
