use serde::{Deserialize, Serialize};

use super::hull::hull_distance_bounds;
use super::{Clustering, StructureError};
use crate::metricspace::{euclidean, sq_euclidean, DistanceSpace, SpaceError};

fn assert_covers(space: &DistanceSpace, c: &Clustering) {
    assert_eq!(
        space.len(),
        c.len(),
        "clustering covers {} items but the space has {}",
        c.len(),
        space.len()
    );
}

/// A failed niceness triple: `x ~ y`, `x !~ z`, yet `d(x,y) >= d(x,z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceWitness {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

/// First item (by index) whose farthest cluster-mate is not strictly closer
/// than its nearest outsider.
///
/// # Panics
/// If `c` does not cover exactly the items of `space`.
pub fn nice_violation(space: &DistanceSpace, c: &Clustering) -> Option<NiceWitness> {
    assert_covers(space, c);
    let n = space.len();
    for x in 0..n {
        let (mut far_in, mut far_in_d) = (x, 0.0);
        let (mut near_out, mut near_out_d) = (usize::MAX, f64::INFINITY);
        for w in 0..n {
            let d = space.d(x, w);
            if c.label(w) == c.label(x) {
                if d > far_in_d {
                    far_in = w;
                    far_in_d = d;
                }
            } else if d < near_out_d {
                near_out = w;
                near_out_d = d;
            }
        }
        if near_out != usize::MAX && far_in_d >= near_out_d {
            return Some(NiceWitness {
                x,
                y: far_in,
                z: near_out,
            });
        }
    }
    None
}

pub fn is_nice(space: &DistanceSpace, c: &Clustering) -> bool {
    nice_violation(space, c).is_none()
}

/// The largest intra-cluster pair and the smallest inter-cluster pair when
/// the former is not strictly below the latter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfectWitness {
    pub intra: (usize, usize),
    pub intra_distance: f64,
    pub inter: (usize, usize),
    pub inter_distance: f64,
}

/// Every intra-cluster distance, including `d(x,x) = 0`, must be strictly
/// below every inter-cluster distance.
///
/// # Panics
/// If `c` does not cover exactly the items of `space`.
pub fn perfect_violation(space: &DistanceSpace, c: &Clustering) -> Option<PerfectWitness> {
    assert_covers(space, c);
    let n = space.len();
    let mut intra = ((0, 0), 0.0);
    let mut inter = ((usize::MAX, usize::MAX), f64::INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let d = space.d(i, j);
            if c.label(i) == c.label(j) {
                if d > intra.1 {
                    intra = ((i, j), d);
                }
            } else if d < inter.1 {
                inter = ((i, j), d);
            }
        }
    }
    (inter.0 .0 != usize::MAX && intra.1 >= inter.1).then_some(PerfectWitness {
        intra: intra.0,
        intra_distance: intra.1,
        inter: inter.0,
        inter_distance: inter.1,
    })
}

pub fn is_perfect(space: &DistanceSpace, c: &Clustering) -> bool {
    perfect_violation(space, c).is_none()
}

/// Per-cluster cores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreAnnotation {
    /// `cores[i]` lists the core members of cluster `i`, ascending.
    pub cores: Vec<Vec<usize>>,
    /// Smallest core size.
    pub min_core: usize,
    pub n: usize,
    /// `min_core / n`.
    pub beta: f64,
}

impl CoreAnnotation {
    pub fn is_core(&self, cluster: usize, item: usize) -> bool {
        self.cores[cluster].binary_search(&item).is_ok()
    }

    /// Text form: one line per cluster with its comma-separated core items.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for core in &self.cores {
            let row: Vec<String> = core.iter().map(usize::to_string).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `z` is in the core of its cluster iff every cluster-mate `x` is strictly
/// closer to `z` than to anything outside the cluster. The predicate is
/// pointwise in `z`, so the set of qualifying points is the maximal core.
///
/// # Panics
/// If `c` does not cover exactly the items of `space`.
pub fn compute_cores(space: &DistanceSpace, c: &Clustering) -> CoreAnnotation {
    assert_covers(space, c);
    let n = space.len();
    let nearest_outside: Vec<f64> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| c.label(y) != c.label(x))
                .map(|y| space.d(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let cores: Vec<Vec<usize>> = c
        .clusters()
        .iter()
        .map(|members| {
            members
                .iter()
                .copied()
                .filter(|&z| members.iter().all(|&x| space.d(x, z) < nearest_outside[x]))
                .collect()
        })
        .collect();
    let min_core = cores.iter().map(Vec::len).min().unwrap_or(0);
    CoreAnnotation {
        beta: if n == 0 { 0.0 } else { min_core as f64 / n as f64 },
        cores,
        min_core,
        n,
    }
}

/// Smallest cluster fraction `min_i |C_i| / n`.
pub fn size_beta(c: &Clustering) -> f64 {
    let min = c.sizes().into_iter().min().unwrap_or(0);
    if c.is_empty() {
        0.0
    } else {
        min as f64 / c.len() as f64
    }
}

/// Two items that share a cluster of `fine` but not of `coarse`.
pub fn refinement_violation(
    fine: &Clustering,
    coarse: &Clustering,
) -> Result<Option<(usize, usize)>, StructureError> {
    if fine.len() != coarse.len() {
        return Err(StructureError::ItemSetMismatch {
            left: fine.len(),
            right: coarse.len(),
        });
    }
    // First item seen in each fine cluster.
    let mut anchor = vec![usize::MAX; fine.k()];
    for item in 0..fine.len() {
        let a = &mut anchor[fine.label(item)];
        if *a == usize::MAX {
            *a = item;
        } else if coarse.label(*a) != coarse.label(item) {
            return Ok(Some((*a, item)));
        }
    }
    Ok(None)
}

pub fn is_refinement(fine: &Clustering, coarse: &Clustering) -> Result<bool, StructureError> {
    Ok(refinement_violation(fine, coarse)?.is_none())
}

/// `sum_x min_t ||x - t||^2`.
pub fn kmeans_cost(space: &DistanceSpace, centers: &[Vec<f64>]) -> Result<f64, StructureError> {
    let points = space.require_points()?;
    if centers.is_empty() {
        return Err(StructureError::NoCenters);
    }
    if let Some(bad) = centers.iter().find(|c| c.len() != points.dim()) {
        return Err(StructureError::CenterDimension {
            expected: points.dim(),
            found: bad.len(),
        });
    }
    Ok(points
        .iter()
        .map(|x| {
            centers
                .iter()
                .map(|t| sq_euclidean(x, t))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// Centroid of each cluster.
pub(crate) fn centroids(space: &DistanceSpace, c: &Clustering) -> Result<Vec<Vec<f64>>, SpaceError> {
    let points = space.require_points()?;
    let mut sums = vec![vec![0.0; points.dim()]; c.k()];
    let sizes = c.sizes();
    for (i, p) in points.iter().enumerate() {
        for (s, v) in sums[c.label(i)].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (sum, &size) in sums.iter_mut().zip(&sizes) {
        for s in sum.iter_mut() {
            *s /= size as f64;
        }
    }
    Ok(sums)
}

/// Within-cluster sum of squares about each cluster's centroid.
pub fn within_cluster_ss(space: &DistanceSpace, c: &Clustering) -> Result<f64, StructureError> {
    assert_covers(space, c);
    let means = centroids(space, c)?;
    let points = space.require_points()?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| sq_euclidean(p, &means[c.label(i)]))
        .sum())
}

fn diameter(points: &[&[f64]]) -> f64 {
    let mut best = 0.0f64;
    for (a, p) in points.iter().enumerate() {
        for q in &points[a + 1..] {
            best = best.max(euclidean(p, q));
        }
    }
    best
}

/// Sufficient test for convex-niceness: `max(diam C_i, diam C_j)` is below a
/// certified lower bound on the hull distance for every pair of clusters.
/// `false` means "not certified", not "violated".
pub fn is_convex_nice_sufficient(
    space: &DistanceSpace,
    c: &Clustering,
) -> Result<bool, StructureError> {
    assert_covers(space, c);
    let points = space.require_points()?;
    let groups: Vec<Vec<&[f64]>> = c
        .clusters()
        .iter()
        .map(|m| m.iter().map(|&i| points.point(i)).collect())
        .collect();
    let diameters: Vec<f64> = groups.iter().map(|g| diameter(g)).collect();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let bounds = hull_distance_bounds(&groups[i], &groups[j]);
            if diameters[i].max(diameters[j]) >= bounds.lower_bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::{DistanceMatrix, PointSet};

    fn line(values: &[f64]) -> DistanceSpace {
        DistanceSpace::euclidean(PointSet::from_1d(values))
    }

    fn groups(n: usize, g: &[&[usize]]) -> Clustering {
        let g: Vec<Vec<usize>> = g.iter().map(|s| s.to_vec()).collect();
        Clustering::from_groups(n, &g).unwrap()
    }

    #[test]
    fn nice_examples_on_the_line() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        assert!(is_nice(&s, &groups(4, &[&[0], &[1], &[2, 3]])));
        assert!(is_nice(&s, &groups(4, &[&[0, 1], &[2], &[3]])));
        let w = nice_violation(&s, &groups(4, &[&[0, 2], &[1, 3]])).unwrap();
        // x = 1: cluster-mate 4 at distance 3, outsider 2 at distance 1.
        assert_eq!(w, NiceWitness { x: 0, y: 2, z: 1 });
        assert!(is_nice(&s, &Clustering::whole(4)));
        assert!(is_nice(&s, &Clustering::singletons(4)));
    }

    #[test]
    fn duplicates_across_clusters_are_not_nice() {
        let s = line(&[0.0, 0.0, 5.0]);
        assert!(!is_nice(&s, &groups(3, &[&[0], &[1, 2]])));
        assert!(!is_perfect(&s, &groups(3, &[&[0], &[1], &[2]])));
    }

    #[test]
    fn perfect_examples() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        assert!(is_perfect(&s, &groups(4, &[&[0, 1], &[2, 3]])));
        let w = perfect_violation(&s, &groups(4, &[&[0], &[1], &[2, 3]])).unwrap();
        assert_eq!((w.intra_distance, w.inter_distance), (1.0, 1.0));
        assert!(is_perfect(&s, &Clustering::singletons(4)));
        assert!(is_perfect(&s, &Clustering::whole(4)));
    }

    #[test]
    fn cores_of_nice_and_whole_clusterings() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        let c = groups(4, &[&[0, 1], &[2, 3]]);
        let cores = compute_cores(&s, &c);
        assert_eq!(cores.cores, c.clusters());
        assert_eq!(cores.beta, 0.5);
        let whole = compute_cores(&s, &Clustering::whole(4));
        assert_eq!(whole.cores, vec![vec![0, 1, 2, 3]]);
        assert_eq!(whole.beta, 1.0);
    }

    #[test]
    fn core_excludes_points_near_the_boundary() {
        // Item 3 is a halo point: its nearest outsider (1.5) is closer than its
        // cluster-mate 0 (3.0).
        let s = line(&[0.0, 0.1, 0.2, 3.0, 4.5, 4.6]);
        let c = groups(6, &[&[0, 1, 2, 3], &[4, 5]]);
        assert!(!is_nice(&s, &c));
        let cores = compute_cores(&s, &c);
        // z = 0: for x = 3, d(3,0) = 3 >= 1.5, so 0 is not a core point.
        assert!(!cores.is_core(0, 0));
        assert!(cores.is_core(0, 3));
        assert_eq!(cores.cores[1], vec![4, 5]);
    }

    #[test]
    fn refinement_cases() {
        let a = groups(4, &[&[0, 1], &[2, 3]]);
        assert!(is_refinement(&a, &a).unwrap());
        assert!(is_refinement(&Clustering::singletons(4), &a).unwrap());
        let straddle = groups(4, &[&[0, 2], &[1], &[3]]);
        assert_eq!(refinement_violation(&straddle, &a).unwrap(), Some((0, 2)));
        assert!(matches!(
            is_refinement(&a, &Clustering::whole(3)),
            Err(StructureError::ItemSetMismatch { .. })
        ));
    }

    #[test]
    fn kmeans_cost_cases() {
        let s = line(&[0.0, 2.0]);
        assert_eq!(kmeans_cost(&s, &[vec![1.0]]).unwrap(), 2.0);
        assert_eq!(kmeans_cost(&s, &[vec![0.0], vec![2.0]]).unwrap(), 0.0);
        let m = DistanceSpace::from_matrix(DistanceMatrix::zeros(2), false);
        assert!(matches!(
            kmeans_cost(&m, &[vec![0.0]]),
            Err(StructureError::Space(SpaceError::NotEuclidean))
        ));
    }

    #[test]
    fn optimal_bipartition_matches_within_cluster_ss() {
        // Exhaustive oracle: the best 2-means cost over a grid of candidate
        // center pairs can never beat the best centroid bipartition.
        let s = line(&[0.0, 1.0, 5.0, 6.0, 7.0]);
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << 4) {
            let labels: Vec<usize> = (0..5).map(|i| if i == 4 { 0 } else { ((mask >> i) & 1) as usize }).collect();
            if let Ok(c) = Clustering::from_labels(labels) {
                if c.k() == 2 {
                    best = best.min(within_cluster_ss(&s, &c).unwrap());
                }
            }
        }
        // {0,1} / {5,6,7}: 0.5 + 2.0.
        assert!((best - 2.5).abs() < 1e-12);
        let grid_best = (0..=70)
            .flat_map(|a| (0..=70).map(move |b| (a as f64 / 10.0, b as f64 / 10.0)))
            .map(|(a, b)| kmeans_cost(&s, &[vec![a], vec![b]]).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((grid_best - best).abs() < 1e-9);
    }

    #[test]
    fn convex_nice_sufficient_cases() {
        let s = line(&[0.0, 1.0, 4.0, 5.0]);
        assert!(is_convex_nice_sufficient(&s, &groups(4, &[&[0, 1], &[2, 3]])).unwrap());
        let touching = line(&[0.0, 1.0, 1.0, 2.0]);
        assert!(!is_convex_nice_sufficient(&touching, &groups(4, &[&[0, 1], &[2, 3]])).unwrap());
        let interleaved = line(&[0.0, 2.0, 1.0, 3.0]);
        assert!(!is_convex_nice_sufficient(&interleaved, &groups(4, &[&[0, 1], &[2, 3]])).unwrap());
    }
}
