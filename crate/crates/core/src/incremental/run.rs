use serde::{Deserialize, Serialize};

use super::{Ordering, StreamAlgorithm, StreamError};
use crate::metricspace::DistanceSpace;
use crate::structures::CenterSet;

/// Model copy taken after `step` observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub centers: CenterSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: Option<u64>,
    pub ordering: Ordering,
    pub steps: usize,
    pub final_centers: CenterSet,
    pub snapshots: Vec<Snapshot>,
}

/// Feeds `ordering` to `algorithm`, checking the center bound after every
/// step. With `snapshot_every = s > 0` a snapshot is kept after steps
/// `s, 2s, ...`; `0` keeps none.
pub fn run_stream(
    algorithm: &mut dyn StreamAlgorithm,
    space: &DistanceSpace,
    ordering: &Ordering,
    snapshot_every: usize,
) -> Result<RunRecord, StreamError> {
    if ordering.len() != space.len() {
        return Err(StreamError::OrderingMismatch {
            ordering: ordering.len(),
            space: space.len(),
        });
    }
    let mut snapshots = Vec::new();
    for (step, &item) in ordering.as_slice().iter().enumerate() {
        algorithm.observe(space, item)?;
        let held = algorithm.center_count();
        if held > algorithm.bound() {
            return Err(StreamError::StateBoundExceeded {
                algorithm: algorithm.name(),
                held,
                bound: algorithm.bound(),
            });
        }
        if snapshot_every > 0 && (step + 1) % snapshot_every == 0 {
            snapshots.push(Snapshot {
                step: step + 1,
                centers: algorithm.centers(),
            });
        }
    }
    Ok(RunRecord {
        algorithm: algorithm.name(),
        seed: algorithm.seed(),
        ordering: ordering.clone(),
        steps: algorithm.steps(),
        final_centers: algorithm.centers(),
        snapshots,
    })
}
