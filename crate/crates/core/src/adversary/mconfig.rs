//! M-configurations: `2M + 1` points `x_o, x_1..x_M, x'_1..x'_M` with
//!
//! 1. every interpoint distance in `[1, 2]`;
//! 2. `d(x_o, x_i), d(x_o, x'_i)` in `(3/2, 2]`;
//! 3. `d(x_i, x_j), d(x'_i, x'_j), d(x_i, x'_j)` in `[1, 3/2]` for `i != j`;
//! 4. `d(x_i, x'_i) > d(x_o, x_i)`.
//!
//! For such a set, `{x_o, x'_j} + {x_i : i in S}` with `|S| > 1` has a nice
//! 2-clustering exactly when `j` is not in `S`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::AdversaryError;
use crate::metricspace::{DistanceMatrix, DistanceSpace, PointSet};
use crate::structures::{enumerate_nice_clusterings, Clustering};

const ORIGIN_DISTANCE: f64 = 1.6;
const CLIQUE_DISTANCE: f64 = 1.2;
const PAIR_DISTANCE: f64 = 1.7;

/// Geometry of the Euclidean realisation: `x_o = 1.4 e_0`,
/// `x_i = 0.9 u_i`, `x'_i = -0.9 u_i` with unit `u_i` orthogonal to `e_0`.
const EUCLIDEAN_ORIGIN: f64 = 1.4;
const EUCLIDEAN_RADIUS: f64 = 0.9;
/// Margin every sampled configuration must clear.
pub const EUCLIDEAN_MARGIN: f64 = 1e-6;

/// Positions of the configuration's points inside a space. `x[i - 1]` is `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MIndex {
    pub origin: usize,
    pub x: Vec<usize>,
    pub x_prime: Vec<usize>,
}

impl MIndex {
    /// Layout `0 = x_o`, `1..=M = x_i`, `M+1..=2M = x'_i`, shifted by `offset`.
    pub fn standard(m: usize, offset: usize) -> Self {
        Self {
            origin: offset,
            x: (1..=m).map(|i| offset + i).collect(),
            x_prime: (1..=m).map(|i| offset + m + i).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// All `2M + 1` items, `x_o` first.
    pub fn items(&self) -> Vec<usize> {
        let mut v = vec![self.origin];
        v.extend(&self.x);
        v.extend(&self.x_prime);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MConfiguration {
    pub space: DistanceSpace,
    pub index: MIndex,
    /// Sampling attempts used; 1 for the explicit matrix.
    pub attempts: u64,
}

impl MConfiguration {
    pub fn m(&self) -> usize {
        self.index.m()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClauseViolation {
    pub clause: u8,
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MConfigReport {
    pub violations: Vec<ClauseViolation>,
}

impl MConfigReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct violated clauses, ascending.
    pub fn clauses(&self) -> Vec<u8> {
        let mut c: Vec<u8> = self.violations.iter().map(|v| v.clause).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

pub fn verify_m_configuration(space: &DistanceSpace, index: &MIndex) -> MConfigReport {
    verify_m_configuration_with_margin(space, index, 0.0)
}

/// As [`verify_m_configuration`], with every interval shrunk by `margin` on
/// both sides and clause 4 requiring a gap of more than `margin`.
pub fn verify_m_configuration_with_margin(space: &DistanceSpace, index: &MIndex, margin: f64) -> MConfigReport {
    let mut violations = Vec::new();
    let mut check = |clause: u8, a: usize, b: usize, ok: &dyn Fn(f64) -> bool| {
        let d = space.d(a, b);
        if !ok(d) {
            violations.push(ClauseViolation {
                clause,
                a,
                b,
                distance: d,
            });
        }
    };
    let closed = |lo: f64, hi: f64| move |d: f64| d >= lo + margin && d <= hi - margin;

    let items = index.items();
    for (p, &a) in items.iter().enumerate() {
        for &b in &items[p + 1..] {
            check(1, a, b, &closed(1.0, 2.0));
        }
    }
    for &a in index.x.iter().chain(&index.x_prime) {
        check(2, index.origin, a, &|d| d > 1.5 + margin && d <= 2.0 - margin);
    }
    let m = index.m();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if i < j {
                check(3, index.x[i], index.x[j], &closed(1.0, 1.5));
                check(3, index.x_prime[i], index.x_prime[j], &closed(1.0, 1.5));
            }
            check(3, index.x[i], index.x_prime[j], &closed(1.0, 1.5));
        }
        let to_origin = space.d(index.origin, index.x[i]);
        check(4, index.x[i], index.x_prime[i], &|d| d > to_origin + margin);
    }
    MConfigReport { violations }
}

/// Explicit matrix: `d(x_o, .) = 1.6`, clique distances `1.2`,
/// `d(x_i, x'_i) = 1.7`. All entries lie in `[1.2, 1.7]`, so the matrix is a
/// metric (the largest entry is below twice the smallest).
pub fn build_matrix_m_configuration(m: usize) -> Result<MConfiguration, AdversaryError> {
    if m == 0 {
        return Err(AdversaryError::InvalidParameter("M must be at least 1".into()));
    }
    let index = MIndex::standard(m, 0);
    let mut matrix = DistanceMatrix::zeros(2 * m + 1);
    for a in 1..=2 * m {
        matrix.set(0, a, ORIGIN_DISTANCE);
        for b in a + 1..=2 * m {
            let value = if b == a + m { PAIR_DISTANCE } else { CLIQUE_DISTANCE };
            matrix.set(a, b, value);
        }
    }
    let config = MConfiguration {
        space: DistanceSpace::from_matrix(matrix, true),
        index,
        attempts: 1,
    };
    certify(&config, 0.0)?;
    Ok(config)
}

/// Samples an M-configuration in `R^p` by rejection: random unit directions
/// in the hyperplane orthogonal to `e_0` are accepted once all clauses hold
/// with margin [`EUCLIDEAN_MARGIN`]. Pairs of directions must be close to
/// orthogonal (`|cos| < 0.38` or so), so the feasible `M` grows exponentially
/// in `p` and exhausts the budget quickly in low dimension.
pub fn build_euclidean_m_configuration<R: Rng + ?Sized>(
    m: usize,
    p: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<MConfiguration, AdversaryError> {
    if m == 0 {
        return Err(AdversaryError::InvalidParameter("M must be at least 1".into()));
    }
    if p < 2 {
        return Err(AdversaryError::InvalidParameter("dimension must be at least 2".into()));
    }
    let index = MIndex::standard(m, 0);
    for attempt in 1..=max_attempts {
        let mut points = Vec::with_capacity(2 * m + 1);
        let mut origin = vec![0.0; p];
        origin[0] = EUCLIDEAN_ORIGIN;
        points.push(origin);
        let dirs: Vec<Vec<f64>> = (0..m).map(|_| unit_direction(p, rng)).collect();
        for sign in [1.0, -1.0] {
            for u in &dirs {
                points.push(u.iter().map(|c| sign * EUCLIDEAN_RADIUS * c).collect());
            }
        }
        let space = DistanceSpace::euclidean(PointSet::new(points)?);
        if verify_m_configuration_with_margin(&space, &index, EUCLIDEAN_MARGIN).is_valid() {
            let config = MConfiguration {
                space,
                index,
                attempts: attempt,
            };
            certify(&config, EUCLIDEAN_MARGIN)?;
            return Ok(config);
        }
    }
    Err(AdversaryError::BudgetExhausted {
        what: format!("{m}-configuration in R^{p}"),
        budget: max_attempts,
    })
}

fn unit_direction<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        v[0] = 0.0;
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-9 {
            v.iter_mut().for_each(|c| *c /= norm);
            return v;
        }
    }
}

fn certify(config: &MConfiguration, margin: f64) -> Result<(), AdversaryError> {
    let report = verify_m_configuration_with_margin(&config.space, &config.index, margin);
    if report.is_valid() {
        Ok(())
    } else {
        Err(AdversaryError::Certification(format!(
            "M-configuration violates clauses {:?}",
            report.clauses()
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nice2Answer {
    /// Items of `A` in the order `x_o, x'_j, x_i (i in S ascending)`.
    pub items: Vec<usize>,
    /// Every nice 2-clustering of `A`, over positions in `items`.
    pub clusterings: Vec<Clustering>,
}

impl Nice2Answer {
    pub fn has_nice2(&self) -> bool {
        !self.clusterings.is_empty()
    }
}

/// Decides whether `{x_o, x'_j} + {x_i : i in S}` has a nice 2-clustering by
/// exhaustive enumeration. `j` and `S` are 1-based.
pub fn configuration_subset_nice2(
    config: &MConfiguration,
    j: usize,
    s: &[usize],
) -> Result<Nice2Answer, AdversaryError> {
    let m = config.m();
    if j == 0 || j > m {
        return Err(AdversaryError::InvalidParameter(format!("j = {j} outside 1..={m}")));
    }
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() <= 1 {
        return Err(AdversaryError::InvalidParameter("S needs at least two indices".into()));
    }
    if let Some(&bad) = s.iter().find(|&&i| i == 0 || i > m) {
        return Err(AdversaryError::InvalidParameter(format!("index {bad} outside 1..={m}")));
    }
    let mut items = vec![config.index.origin, config.index.x_prime[j - 1]];
    items.extend(s.iter().map(|&i| config.index.x[i - 1]));
    let sub = config.space.restrict(&items);
    let clusterings = enumerate_nice_clusterings(&sub, 2, usize::MAX)?;
    Ok(Nice2Answer { items, clusterings })
}
