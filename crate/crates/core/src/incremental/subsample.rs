use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require_positive, StreamAlgorithm, StreamError};
use crate::metricspace::DistanceSpace;
use crate::structures::CenterSet;

/// Reservoir subsampling: the first `l` items fill `T`; at step `t > l` one
/// uniform draw `j` in `[0, t)` is taken and, if `j < l`, slot `j` is replaced
/// by the new item. That is replacement with probability `l / t` of a
/// uniformly chosen slot, so `T` is a uniform `l`-subset of the prefix.
#[derive(Debug, Clone)]
pub struct Subsample {
    l: usize,
    reservoir: Vec<usize>,
    t: usize,
    seed: u64,
    rng: ChaCha8Rng,
}

impl Subsample {
    pub fn new(l: usize, seed: u64) -> Result<Self, StreamError> {
        require_positive("l", l)?;
        Ok(Self {
            l,
            reservoir: Vec::with_capacity(l),
            t: 0,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn reservoir(&self) -> &[usize] {
        &self.reservoir
    }

    /// Number of outcomes of the draw the next step will take (its `t`);
    /// `None` while the reservoir is still filling.
    pub fn next_draw_range(&self) -> Option<usize> {
        (self.t >= self.l).then_some(self.t + 1)
    }

    /// One step with an explicit draw `j` in `[0, next_draw_range)`; `j` is
    /// ignored while filling. Lets callers enumerate every randomness branch.
    pub fn step_with_draw(&mut self, item: usize, j: usize) {
        self.t += 1;
        if self.reservoir.len() < self.l {
            self.reservoir.push(item);
        } else {
            debug_assert!(j < self.t);
            if j < self.l {
                self.reservoir[j] = item;
            }
        }
    }
}

impl StreamAlgorithm for Subsample {
    fn name(&self) -> String {
        format!("subsample(l={})", self.l)
    }

    fn bound(&self) -> usize {
        self.l
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        space.distance(item, item)?;
        let j = match self.next_draw_range() {
            Some(range) => self.rng.random_range(0..range),
            None => 0,
        };
        self.step_with_draw(item, j);
        Ok(())
    }

    fn centers(&self) -> CenterSet {
        CenterSet::Items(self.reservoir.clone())
    }

    fn center_count(&self) -> usize {
        self.reservoir.len()
    }

    fn steps(&self) -> usize {
        self.t
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}
