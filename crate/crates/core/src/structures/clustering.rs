use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::metricspace::{sq_euclidean, DistanceSpace};

/// A partition of items `0..n` into `k` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Validates that every label is below `k` and every cluster is used.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self, StructureError> {
        let mut used = vec![false; k];
        for (item, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(StructureError::LabelOutOfRange { item, label, k });
            }
            used[label] = true;
        }
        if let Some(empty) = used.iter().position(|u| !u) {
            return Err(StructureError::EmptyCluster(empty));
        }
        Ok(Self { labels, k })
    }

    /// `k` is taken as one more than the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self, StructureError> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    /// Builds a clustering from explicit groups of item indices.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Result<Self, StructureError> {
        let mut labels = vec![usize::MAX; n];
        for (g, group) in groups.iter().enumerate() {
            for &item in group {
                if item >= n || labels[item] != usize::MAX {
                    return Err(StructureError::Parse(format!(
                        "item {item} is out of range or listed twice"
                    )));
                }
                labels[item] = g;
            }
        }
        if let Some(item) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(StructureError::Parse(format!("item {item} is not covered")));
        }
        Self::new(labels, groups.len())
    }

    /// Relabels from label-vector entries without validation. Callers guarantee the
    /// labels are a restricted-growth string with `k` distinct values.
    pub(crate) fn from_rgs(labels: Vec<usize>, k: usize) -> Self {
        debug_assert!(Self::new(labels.clone(), k).is_ok());
        Self { labels, k }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, item: usize) -> usize {
        self.labels[item]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (item, &label) in self.labels.iter().enumerate() {
            out[label].push(item);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &label in &self.labels {
            out[label] += 1;
        }
        out
    }

    /// Relabels clusters in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: self.k }
    }

    /// Equality as partitions, ignoring label names.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.len() == other.len() && self.k == other.k && self.canonical() == other.canonical()
    }

    /// Restriction to `items`, re-indexed in the given order and canonically relabelled.
    pub fn restrict(&self, items: &[usize]) -> Clustering {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = items
            .iter()
            .map(|&i| {
                let l = self.labels[i];
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Clustering { labels, k: next }
    }

    /// Text form: a line holding `k`, then one line of comma-separated labels.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.k);
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{l}").unwrap();
        }
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let k = lines
            .next()
            .ok_or_else(|| StructureError::Parse("missing cluster count".into()))?
            .parse::<usize>()
            .map_err(|e| StructureError::Parse(format!("cluster count: {e}")))?;
        let mut labels = Vec::new();
        for line in lines {
            for tok in line.split(',') {
                labels.push(
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|e| StructureError::Parse(format!("label `{tok}`: {e}")))?,
                );
            }
        }
        Self::new(labels, k)
    }
}

/// Exemplar list. Item centers are indices into the space; point centers are
/// synthesized coordinates (sequential k-means) and require a Euclidean space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterSet {
    Items(Vec<usize>),
    Points(Vec<Vec<f64>>),
}

impl CenterSet {
    pub fn len(&self) -> usize {
        match self {
            CenterSet::Items(v) => v.len(),
            CenterSet::Points(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn items(&self) -> Option<&[usize]> {
        match self {
            CenterSet::Items(v) => Some(v),
            CenterSet::Points(_) => None,
        }
    }
}

/// Result of nearest-center assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Induced {
    pub clustering: Clustering,
    /// Center position backing each output label.
    pub center_of_label: Vec<usize>,
    /// Positions of centers that captured no item.
    pub dropped: Vec<usize>,
}

/// Assigns every item to its nearest center, ties going to the earliest
/// position. Centers capturing nothing are dropped and the remaining labels
/// numbered by center position.
pub fn induce_clustering(
    space: &DistanceSpace,
    centers: &CenterSet,
) -> Result<Induced, StructureError> {
    if centers.is_empty() {
        return Err(StructureError::NoCenters);
    }
    let n = space.len();
    let nearest: Vec<usize> = match centers {
        CenterSet::Items(items) => {
            if let Some(&center) = items.iter().find(|&&c| c >= n) {
                return Err(StructureError::CenterOutOfRange { center, n });
            }
            (0..n)
                .map(|x| argmin((0..items.len()).map(|p| space.d(x, items[p]))))
                .collect()
        }
        CenterSet::Points(points) => {
            let ps = space.require_points()?;
            if let Some(bad) = points.iter().find(|c| c.len() != ps.dim()) {
                return Err(StructureError::CenterDimension {
                    expected: ps.dim(),
                    found: bad.len(),
                });
            }
            (0..n)
                .map(|x| argmin(points.iter().map(|c| sq_euclidean(ps.point(x), c))))
                .collect()
        }
    };
    let mut used = vec![false; centers.len()];
    for &p in &nearest {
        used[p] = true;
    }
    let mut label_of = vec![usize::MAX; centers.len()];
    let mut center_of_label = Vec::new();
    let mut dropped = Vec::new();
    for (p, &u) in used.iter().enumerate() {
        if u {
            label_of[p] = center_of_label.len();
            center_of_label.push(p);
        } else {
            dropped.push(p);
        }
    }
    let labels = nearest.iter().map(|&p| label_of[p]).collect();
    Ok(Induced {
        clustering: Clustering {
            labels,
            k: center_of_label.len(),
        },
        center_of_label,
        dropped,
    })
}

/// Index of the smallest value; the first one wins ties.
pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NAN;
    for (i, v) in values.enumerate() {
        if i == 0 || v < best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::PointSet;

    fn line(values: &[f64]) -> DistanceSpace {
        DistanceSpace::euclidean(PointSet::from_1d(values))
    }

    #[test]
    fn clustering_validation() {
        assert!(Clustering::new(vec![0, 1, 1], 2).is_ok());
        assert!(matches!(
            Clustering::new(vec![0, 0], 2),
            Err(StructureError::EmptyCluster(1))
        ));
        assert!(matches!(
            Clustering::new(vec![0, 3], 2),
            Err(StructureError::LabelOutOfRange { item: 1, .. })
        ));
        let c = Clustering::from_groups(4, &[vec![2, 3], vec![0, 1]]).unwrap();
        assert_eq!(c.labels(), &[1, 1, 0, 0]);
        assert_eq!(c.canonical().labels(), &[0, 0, 1, 1]);
        assert!(c.same_partition(&Clustering::from_labels(vec![0, 0, 1, 1]).unwrap()));
        assert!(Clustering::from_groups(3, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn clustering_text_round_trip() {
        let c = Clustering::from_labels(vec![2, 0, 1, 0]).unwrap();
        assert_eq!(c.to_text(), "3\n2,0,1,0\n");
        assert_eq!(Clustering::parse(&c.to_text()).unwrap(), c);
        assert!(Clustering::parse("2\n0,0\n").is_err());
    }

    #[test]
    fn induce_nearest_center() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        let induced = induce_clustering(&s, &CenterSet::Items(vec![0, 2])).unwrap();
        assert_eq!(induced.clustering.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn induce_tie_goes_to_first_position() {
        let s = line(&[1.0, 3.0, 5.0]);
        let induced = induce_clustering(&s, &CenterSet::Items(vec![0, 2])).unwrap();
        assert_eq!(induced.clustering.labels(), &[0, 0, 1]);
        let induced = induce_clustering(&s, &CenterSet::Items(vec![2, 0])).unwrap();
        assert_eq!(induced.clustering.labels(), &[1, 0, 0]);
    }

    #[test]
    fn induce_single_center_and_errors() {
        let s = line(&[1.0, 3.0, 5.0]);
        let induced = induce_clustering(&s, &CenterSet::Items(vec![1])).unwrap();
        assert_eq!(induced.clustering, Clustering::whole(3));
        assert!(matches!(
            induce_clustering(&s, &CenterSet::Items(vec![])),
            Err(StructureError::NoCenters)
        ));
    }

    #[test]
    fn induce_drops_empty_centers() {
        let s = line(&[0.0, 1.0, 10.0]);
        let centers = CenterSet::Points(vec![vec![0.5], vec![100.0], vec![10.0]]);
        let induced = induce_clustering(&s, &centers).unwrap();
        assert_eq!(induced.clustering.labels(), &[0, 0, 1]);
        assert_eq!(induced.center_of_label, vec![0, 2]);
        assert_eq!(induced.dropped, vec![1]);
    }

    #[test]
    fn argmin_first_wins() {
        assert_eq!(argmin([3.0, 1.0, 1.0].into_iter()), 1);
        assert_eq!(argmin([f64::INFINITY, f64::INFINITY].into_iter()), 0);
    }
}
