//! Batch single linkage and the `candidates` compression step.
//!
//! Any nice clustering of a set is a pruning of its single-linkage tree. If
//! every internal node carries the representative of one of its children, the
//! nodes within depth `k - 1` of the root carry at most `2^(k-1)` distinct
//! points, and those points meet every cluster of every nice `l`-clustering
//! with `l <= k`.

use std::fmt;

use thiserror::Error;

use crate::metricspace::DistanceSpace;

#[derive(Debug, Error)]
pub enum LinkageError {
    #[error("single linkage needs at least one item")]
    Empty,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("item {0} listed twice")]
    DuplicateItem(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeNode {
    /// `(left, right)` node ids; `None` for leaves.
    pub children: Option<(usize, usize)>,
    /// Merge distance; `0.0` for leaves.
    pub height: f64,
    /// Item carried by this node.
    pub representative: usize,
    /// Edges from the root.
    pub depth: usize,
}

/// Binary merge tree. Nodes `0..m` are leaves in input order; the root is last.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    nodes: Vec<MergeNode>,
}

impl MergeTree {
    pub fn nodes(&self) -> &[MergeNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len().div_ceil(2)
    }

    fn write_node(&self, f: &mut fmt::Formatter<'_>, id: usize) -> fmt::Result {
        let node = &self.nodes[id];
        match node.children {
            None => write!(f, "{}", node.representative),
            Some((l, r)) => {
                f.write_str("(")?;
                self.write_node(f, l)?;
                f.write_str(",")?;
                self.write_node(f, r)?;
                write!(f, ")@{}", node.height)
            }
        }
    }
}

/// Nested form, e.g. `((0,1)@1,(2,3)@1)@2`; leaves print their item index.
impl fmt::Display for MergeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, self.root())
    }
}

/// Agglomerative single linkage over `items`.
///
/// Each round merges the two components at minimum cross distance. Exact ties
/// are broken by the pair `(min item of A, min item of B)`, with `A` the
/// component holding the smaller minimum; `A` becomes the left child and each
/// internal node carries the smaller of its children's representatives.
pub fn single_linkage_tree(space: &DistanceSpace, items: &[usize]) -> Result<MergeTree, LinkageError> {
    let m = items.len();
    if m == 0 {
        return Err(LinkageError::Empty);
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(LinkageError::DuplicateItem(w[0]));
    }

    let mut nodes: Vec<MergeNode> = items
        .iter()
        .map(|&item| MergeNode {
            children: None,
            height: 0.0,
            representative: item,
            depth: 0,
        })
        .collect();
    // Component slot -> (node id, smallest item); cross[a][b] is the single-link distance.
    let mut comps: Vec<Option<(usize, usize)>> = items.iter().enumerate().map(|(i, &it)| Some((i, it))).collect();
    let mut cross: Vec<Vec<f64>> = (0..m)
        .map(|a| (0..m).map(|b| space.d(items[a], items[b])).collect())
        .collect();

    for _ in 1..m {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..m {
            let Some((_, min_a)) = comps[a] else { continue };
            for b in a + 1..m {
                let Some((_, min_b)) = comps[b] else { continue };
                let (lo, hi, key) = if min_a < min_b {
                    (a, b, (min_a, min_b))
                } else {
                    (b, a, (min_b, min_a))
                };
                let d = cross[a][b];
                let better = match best {
                    None => true,
                    Some((bd, _, _, k0, k1)) => d < bd || (d == bd && key < (k0, k1)),
                };
                if better {
                    best = Some((d, lo, hi, key.0, key.1));
                }
            }
        }
        let (height, left, right, min_left, _) = best.expect("two live components");
        let (left_node, _) = comps[left].unwrap();
        let (right_node, _) = comps[right].unwrap();
        let representative = nodes[left_node]
            .representative
            .min(nodes[right_node].representative);
        nodes.push(MergeNode {
            children: Some((left_node, right_node)),
            height,
            representative,
            depth: 0,
        });
        comps[left] = Some((nodes.len() - 1, min_left));
        comps[right] = None;
        for c in 0..m {
            let merged = cross[left][c].min(cross[right][c]);
            cross[left][c] = merged;
            cross[c][left] = merged;
        }
    }

    // Depths, top-down: children always have smaller ids than their parent.
    for id in (0..nodes.len()).rev() {
        if let Some((l, r)) = nodes[id].children {
            let depth = nodes[id].depth + 1;
            nodes[l].depth = depth;
            nodes[r].depth = depth;
        }
    }
    Ok(MergeTree { nodes })
}

/// Distinct representatives of the nodes at depth `< k`, listed in the order
/// they appear in `items`. At most `2^(k-1)` points.
pub fn candidates(space: &DistanceSpace, items: &[usize], k: usize) -> Result<Vec<usize>, LinkageError> {
    if k == 0 {
        return Err(LinkageError::ZeroK);
    }
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let tree = single_linkage_tree(space, items)?;
    let mut keep: Vec<usize> = tree
        .nodes()
        .iter()
        .filter(|node| node.depth < k)
        .map(|node| node.representative)
        .collect();
    keep.sort_unstable();
    keep.dedup();
    Ok(items
        .iter()
        .copied()
        .filter(|it| keep.binary_search(it).is_ok())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::{DistanceMatrix, PointSet};
    use crate::structures::enumerate_nice_clusterings;
    use proptest::prelude::*;

    fn line(values: &[f64]) -> DistanceSpace {
        DistanceSpace::euclidean(PointSet::from_1d(values))
    }

    #[test]
    fn line_tree() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        let tree = single_linkage_tree(&s, &[0, 1, 2, 3]).unwrap();
        assert_eq!(tree.to_string(), "((0,1)@1,(2,3)@1)@2");
        let root = &tree.nodes()[tree.root()];
        assert_eq!((root.height, root.representative, root.depth), (2.0, 0, 0));
        for node in tree.nodes() {
            if let Some((l, r)) = node.children {
                assert!(tree.nodes()[l].height <= node.height);
                assert!(tree.nodes()[r].height <= node.height);
            }
        }
    }

    #[test]
    fn singleton_tree() {
        let s = line(&[3.0]);
        let tree = single_linkage_tree(&s, &[0]).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.to_string(), "0");
        assert!(matches!(single_linkage_tree(&s, &[]), Err(LinkageError::Empty)));
    }

    #[test]
    fn equidistant_triangle_uses_index_tie_break() {
        let mut m = DistanceMatrix::zeros(3);
        m.set(0, 1, 1.0);
        m.set(0, 2, 1.0);
        m.set(1, 2, 1.0);
        let s = DistanceSpace::from_matrix(m, true);
        // Candidate keys (0,1), (0,2), (1,2): (0,1) merges first, then with 2.
        let tree = single_linkage_tree(&s, &[2, 1, 0]).unwrap();
        assert_eq!(tree.to_string(), "((0,1)@1,2)@1");
    }

    #[test]
    fn candidates_on_the_line() {
        let s = line(&[1.0, 2.0, 4.0, 5.0]);
        assert_eq!(candidates(&s, &[0, 1, 2, 3], 2).unwrap(), vec![0, 2]);
        assert_eq!(candidates(&s, &[0, 1, 2, 3], 1).unwrap(), vec![0]);
        assert_eq!(candidates(&s, &[3, 2, 1, 0], 2).unwrap(), vec![2, 0]);
        assert_eq!(candidates(&s, &[0, 1, 2, 3], 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(candidates(&s, &[0], 0), Err(LinkageError::ZeroK)));
    }

    #[test]
    fn balanced_tree_reaches_the_bound() {
        // Pairs of pairs: 8 points whose tree is perfectly balanced.
        let s = line(&[0.0, 1.0, 10.0, 11.0, 100.0, 101.0, 110.0, 111.0]);
        let items: Vec<usize> = (0..8).collect();
        for k in 1..=4 {
            assert_eq!(candidates(&s, &items, k).unwrap().len(), 1 << (k - 1));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn candidates_bound_and_coverage(
            values in prop::collection::vec(0.0f64..50.0, 1..10),
            k in 1usize..5,
        ) {
            let s = line(&values);
            let items: Vec<usize> = (0..values.len()).collect();
            let out = candidates(&s, &items, k).unwrap();
            prop_assert!(out.len() <= 1 << (k - 1));
            prop_assert!(out.iter().all(|i| items.contains(i)));
            prop_assert_eq!(&out, &candidates(&s, &items, k).unwrap());
            for l in 1..=k.min(values.len()) {
                for c in enumerate_nice_clusterings(&s, l, usize::MAX).unwrap() {
                    for cluster in c.clusters() {
                        prop_assert!(cluster.iter().any(|x| out.contains(x)),
                            "cluster {:?} of {:?} missed by {:?}", cluster, c, out);
                    }
                }
            }
        }
    }
}
