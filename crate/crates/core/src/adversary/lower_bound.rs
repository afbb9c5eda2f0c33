//! The two-configuration protocol against nice-detecting learners.
//!
//! Two M-configurations `x` and `z` are placed far apart. The learner is fed
//!
//! 1. `x_o, z_o`
//! 2. `b` points `x_i, i in S`
//! 3. `b` points `z_i, i in T`
//! 4. `x'_{j1}, z'_{j2}`
//!
//! with `j1 in S_1 \ S_2` and `j2 in T_1 \ T_2`. Sequence A uses `(S_1, T_2)`,
//! sequence B uses `(S_2, T_1)`. In A the unique nice 3-clustering keeps the
//! x's together and splits `z_o` off; in B it is the other way round. A learner
//! whose state after batches 2 and 3 cannot tell `S_1` from `S_2` and `T_1`
//! from `T_2` answers both sequences alike and so fails one of them.

use serde::{Deserialize, Serialize};

use super::mconfig::{build_euclidean_m_configuration, build_matrix_m_configuration, MIndex};
use super::AdversaryError;
use crate::incremental::{run_stream, Ordering, StreamAlgorithm, StreamError};
use crate::metricspace::{DistanceMatrix, DistanceSpace, PointSet};
use crate::structures::{enumerate_nice_clusterings, induce_clustering, CenterSet, Clustering};

/// Cross distance between the matrix configurations.
const MATRIX_SEPARATION: f64 = 4.5;
/// Translation of the second Euclidean copy along `e_0`.
const EUCLIDEAN_OFFSET: f64 = 8.0;
const MIN_SEPARATION: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundMode {
    Matrix,
    /// Sampled configuration in `R^dim`, translated for the second copy.
    Euclidean { dim: usize, seed: u64, max_attempts: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiggedSequence {
    pub name: String,
    /// Items of the combined space in feeding order.
    pub items: Vec<usize>,
    /// The four batches, as items of the combined space.
    pub batches: Vec<Vec<usize>>,
    /// Unique nice 3-clustering over sequence positions, canonically labelled.
    pub planted: Clustering,
    /// Whether the x-configuration forms one cluster.
    pub x_together: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundInstance {
    pub space: DistanceSpace,
    pub m: usize,
    pub b: usize,
    pub x: MIndex,
    pub z: MIndex,
    /// `S_1, S_2` (1-based indices).
    pub s: [Vec<usize>; 2],
    /// `T_1, T_2` (1-based indices).
    pub t: [Vec<usize>; 2],
    pub j1: usize,
    pub j2: usize,
    pub min_cross_distance: f64,
    pub sequences: [RiggedSequence; 2],
    /// Sampling attempts for a Euclidean configuration; 1 for matrices.
    pub attempts: u64,
}

impl LowerBoundInstance {
    /// The restricted space of sequence `which`, indexed by feeding position.
    pub fn sequence_space(&self, which: usize) -> DistanceSpace {
        self.space.restrict(&self.sequences[which].items)
    }
}

/// Builds both rigged sequences with `S_1 = T_1 = {1..b}`,
/// `S_2 = T_2 = {2..b+1}` and `j1 = j2 = 1`, and certifies by enumeration
/// that each has exactly one nice 3-clustering with the expected polarity.
pub fn build_lower_bound_instance(
    m: usize,
    b: usize,
    mode: LowerBoundMode,
) -> Result<LowerBoundInstance, AdversaryError> {
    if b < 2 {
        return Err(AdversaryError::InvalidParameter("batch size b must be at least 2".into()));
    }
    if b + 1 > m {
        return Err(AdversaryError::InvalidParameter(format!(
            "M = {m} too small for b = {b} (need M >= b + 1)"
        )));
    }
    if 2 * b + 4 > crate::structures::MAX_ENUMERATION_ITEMS {
        return Err(AdversaryError::InvalidParameter(format!(
            "b = {b} gives sequences too long to certify by enumeration"
        )));
    }
    let width = 2 * m + 1;
    let x = MIndex::standard(m, 0);
    let z = MIndex::standard(m, width);
    let (space, attempts) = match mode {
        LowerBoundMode::Matrix => {
            let single = build_matrix_m_configuration(m)?.space.to_matrix();
            let mut matrix = DistanceMatrix::zeros(2 * width);
            for a in 0..width {
                for c in 0..width {
                    matrix.set_entry(a, c, single.get(a, c));
                    matrix.set_entry(width + a, width + c, single.get(a, c));
                    matrix.set_entry(a, width + c, MATRIX_SEPARATION);
                    matrix.set_entry(width + a, c, MATRIX_SEPARATION);
                }
            }
            (DistanceSpace::from_matrix(matrix, true), 1)
        }
        LowerBoundMode::Euclidean { dim, seed, max_attempts } => {
            let mut rng = crate::rng::substream(seed, crate::rng::Stream::Generation, 0);
            let config = build_euclidean_m_configuration(m, dim, &mut rng, max_attempts)?;
            let base = config.space.require_points()?.to_vecs();
            let mut points = base.clone();
            points.extend(base.iter().map(|p| {
                let mut q = p.clone();
                q[0] += EUCLIDEAN_OFFSET;
                q
            }));
            (DistanceSpace::euclidean(PointSet::new(points)?), config.attempts)
        }
    };

    let mut min_cross_distance = f64::INFINITY;
    for a in 0..width {
        for c in width..2 * width {
            min_cross_distance = min_cross_distance.min(space.d(a, c));
        }
    }
    if min_cross_distance < MIN_SEPARATION {
        return Err(AdversaryError::Certification(format!(
            "configurations only {min_cross_distance} apart"
        )));
    }

    let first: Vec<usize> = (1..=b).collect();
    let second: Vec<usize> = (2..=b + 1).collect();
    let (j1, j2) = (1, 1);
    let seq_a = rig("A", &space, &x, &z, &first, &second, j1, j2, true)?;
    let seq_b = rig("B", &space, &x, &z, &second, &first, j1, j2, false)?;
    Ok(LowerBoundInstance {
        space,
        m,
        b,
        x,
        z,
        s: [first.clone(), second.clone()],
        t: [first, second],
        j1,
        j2,
        min_cross_distance,
        sequences: [seq_a, seq_b],
        attempts,
    })
}

#[allow(clippy::too_many_arguments)]
fn rig(
    name: &str,
    space: &DistanceSpace,
    x: &MIndex,
    z: &MIndex,
    s: &[usize],
    t: &[usize],
    j1: usize,
    j2: usize,
    x_together: bool,
) -> Result<RiggedSequence, AdversaryError> {
    let batches = vec![
        vec![x.origin, z.origin],
        s.iter().map(|&i| x.x[i - 1]).collect::<Vec<_>>(),
        t.iter().map(|&i| z.x[i - 1]).collect::<Vec<_>>(),
        vec![x.x_prime[j1 - 1], z.x_prime[j2 - 1]],
    ];
    let items: Vec<usize> = batches.iter().flatten().copied().collect();
    let width = x.items().len();
    let in_x: Vec<usize> = (0..items.len()).filter(|&p| items[p] < width).collect();
    let in_z: Vec<usize> = (0..items.len()).filter(|&p| items[p] >= width).collect();
    // Position 0 is x_o and position 1 is z_o.
    let groups = if x_together {
        vec![in_x, vec![1], in_z.into_iter().filter(|&p| p != 1).collect()]
    } else {
        vec![vec![0], in_x.into_iter().filter(|&p| p != 0).collect(), in_z]
    };
    let planted = Clustering::from_groups(items.len(), &groups)?.canonical();

    let sub = space.restrict(&items);
    let nice = enumerate_nice_clusterings(&sub, 3, 16)?;
    if nice.len() != 1 || !nice[0].same_partition(&planted) {
        return Err(AdversaryError::Certification(format!(
            "sequence {name} has {} nice 3-clusterings",
            nice.len()
        )));
    }
    Ok(RiggedSequence {
        name: name.to_string(),
        items,
        batches,
        planted,
        x_together,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceOutcome {
    pub name: String,
    pub solved: bool,
    /// Final induced labels over sequence positions.
    pub final_labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub algorithm: String,
    pub outcomes: Vec<SequenceOutcome>,
    pub solved_both: bool,
}

/// Runs a fresh algorithm from `make` on each rigged sequence and records
/// whether its final induced clustering is the planted one.
pub fn run_lower_bound_game(
    make: &mut dyn FnMut() -> Result<Box<dyn StreamAlgorithm>, StreamError>,
    instance: &LowerBoundInstance,
) -> Result<GameRecord, AdversaryError> {
    let mut outcomes = Vec::new();
    let mut algorithm_name = String::new();
    for (which, seq) in instance.sequences.iter().enumerate() {
        let sub = instance.sequence_space(which);
        let mut alg = make()?;
        let record = run_stream(alg.as_mut(), &sub, &Ordering::identity(sub.len()), 0)?;
        algorithm_name = record.algorithm.clone();
        let induced = induce_clustering(&sub, &record.final_centers)?;
        outcomes.push(SequenceOutcome {
            name: seq.name.clone(),
            solved: induced.clustering.same_partition(&seq.planted),
            final_labels: induced.clustering.labels().to_vec(),
        });
    }
    let solved_both = outcomes.iter().all(|o| o.solved);
    Ok(GameRecord {
        algorithm: algorithm_name,
        outcomes,
        solved_both,
    })
}

/// A batch learner posing as a streaming one: it keeps every item, and its
/// model is one exemplar per cluster of the unique nice `k`-clustering of what
/// it has seen (or every item when there is none). Its state is unbounded.
#[derive(Debug, Clone)]
pub struct BatchOracle {
    k: usize,
    items: Vec<usize>,
    space: Option<DistanceSpace>,
}

impl BatchOracle {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::new(),
            space: None,
        }
    }
}

impl StreamAlgorithm for BatchOracle {
    fn name(&self) -> String {
        format!("batch-oracle(k={})", self.k)
    }

    fn bound(&self) -> usize {
        usize::MAX
    }

    fn observe(&mut self, space: &DistanceSpace, item: usize) -> Result<(), StreamError> {
        space.distance(item, item)?;
        if self.space.is_none() {
            self.space = Some(space.clone());
        }
        self.items.push(item);
        Ok(())
    }

    fn centers(&self) -> CenterSet {
        let Some(space) = &self.space else {
            return CenterSet::Items(Vec::new());
        };
        let sub = space.restrict(&self.items);
        if self.items.len() <= crate::structures::MAX_ENUMERATION_ITEMS {
            if let Ok(found) = enumerate_nice_clusterings(&sub, self.k, 1) {
                if let [only] = found.as_slice() {
                    return CenterSet::Items(only.clusters().iter().map(|c| self.items[c[0]]).collect());
                }
            }
        }
        CenterSet::Items(self.items.clone())
    }

    fn center_count(&self) -> usize {
        self.items.len()
    }

    fn steps(&self) -> usize {
        self.items.len()
    }
}
