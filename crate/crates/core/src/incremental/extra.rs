use super::{require_positive, StreamAlgorithm, StreamError};
use crate::linkage::candidates;
use crate::metricspace::DistanceSpace;
use crate::structures::CenterSet;

/// Largest `k` for which `2^(k-1)` fits comfortably.
const MAX_K: usize = 31;

/// Incremental clustering with extra centers: every item joins `T`, and when
/// `T` outgrows `2^(k-1)` it is compressed by [`candidates`].
#[derive(Debug, Clone)]
pub struct ExtraCenters {
    k: usize,
    bound: usize,
    held: Vec<usize>,
    steps: usize,
}

impl ExtraCenters {
    pub fn new(k: usize) -> Result<Self, StreamError> {
        require_positive("k", k)?;
        if k > MAX_K {
            return Err(StreamError::InvalidParameter(format!("k must be at most {MAX_K}")));
        }
        let bound = 1 << (k - 1);
        Ok(Self {
            k,
            bound,
            held: Vec::with_capacity(bound + 1),
            steps: 0,
        })
    }

    pub fn held(&self) -> &[usize] {
        &self.held
    }
}

impl StreamAlgorithm for ExtraCenters {
    fn name(&self) -> String {
        format!("extra-centers(k={})", self.k)
    }

    fn bound(&self) -> usize {
        self.bound
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        space.distance(item, item)?;
        self.held.push(item);
        self.steps += 1;
        if self.held.len() > self.bound {
            self.held = candidates(space, &self.held, self.k)?;
        }
        Ok(())
    }

    fn centers(&self) -> CenterSet {
        CenterSet::Items(self.held.clone())
    }

    fn center_count(&self) -> usize {
        self.held.len()
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
