//! Orderings of 1-D convex-nice data that defeat sequential `l`-means.
//!
//! The heuristic feeds `l` points of an extreme cluster first, so that all `l`
//! centers settle there, then alternates between the other clusters. The
//! center nearest to the rest of the data is dragged back and forth across the
//! gap and ends up absorbing two clusters. Randomised orderings serve as a
//! fallback.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::AdversaryError;
use crate::incremental::{run_stream, Ordering, Provenance, SequentialKMeans};
use crate::metricspace::DistanceSpace;
use crate::rng::{substream, Stream};
use crate::structures::{induce_clustering, refinement_violation, CenterSet, Clustering};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCertificate {
    pub ordering: Ordering,
    pub l: usize,
    pub final_centers: Vec<f64>,
    pub induced: Clustering,
    /// Two items the induced clustering joins although the planted one
    /// separates them.
    pub violation: (usize, usize),
    pub strategy: String,
    /// Orderings tried, this one included.
    pub attempts: u64,
}

impl LineCertificate {
    /// Re-runs sequential `l`-means and confirms the same non-refining result.
    pub fn replays(&self, space: &DistanceSpace, planted: &Clustering) -> Result<bool, AdversaryError> {
        Ok(match evaluate(space, planted, &self.ordering, self.l)? {
            Some((centers, induced, violation)) => {
                centers == self.final_centers && induced == self.induced && violation == self.violation
            }
            None => false,
        })
    }
}

type Failure = (Vec<f64>, Clustering, (usize, usize));

fn evaluate(
    space: &DistanceSpace,
    planted: &Clustering,
    ordering: &Ordering,
    l: usize,
) -> Result<Option<Failure>, AdversaryError> {
    let mut km = SequentialKMeans::new(l)?;
    let record = run_stream(&mut km, space, ordering, 0)?;
    let induced = induce_clustering(space, &record.final_centers)?.clustering;
    let Some(violation) = refinement_violation(&induced, planted)? else {
        return Ok(None);
    };
    let centers = match record.final_centers {
        CenterSet::Points(p) => p.into_iter().map(|c| c[0]).collect(),
        CenterSet::Items(_) => unreachable!("k-means synthesizes point centers"),
    };
    Ok(Some((centers, induced, violation)))
}

/// Heuristic orderings: every combination of front cluster (leftmost or
/// rightmost), direction of its first `l` points, cluster visiting order of
/// the round-robin (far or near first) and direction within each cluster.
fn heuristic_orderings(xs: &[f64], planted: &Clustering, l: usize) -> Vec<(String, Vec<usize>)> {
    let mut clusters = planted.clusters();
    let mean = |c: &Vec<usize>| c.iter().map(|&i| xs[i]).sum::<f64>() / c.len() as f64;
    clusters.sort_by(|a, b| mean(a).total_cmp(&mean(b)));
    for c in clusters.iter_mut() {
        c.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    }
    let mut out = Vec::new();
    for front_right in [false, true] {
        let (front, others): (Vec<usize>, Vec<Vec<usize>>) = {
            let mut cs = clusters.clone();
            if front_right {
                cs.reverse();
                for c in cs.iter_mut() {
                    c.reverse();
                }
            }
            // Now cs[0] is the front cluster and every cluster lists its
            // points from the front side outwards.
            let front = cs.remove(0);
            (front, cs)
        };
        for front_outward in [true, false] {
            let mut head: Vec<usize> = front.clone();
            if !front_outward {
                head.reverse();
            }
            let tail_of_front = head.split_off(l.min(head.len()));
            for far_first in [true, false] {
                for inner_first in [true, false] {
                    let mut queues: Vec<Vec<usize>> = others.clone();
                    if far_first {
                        queues.reverse();
                    }
                    for q in queues.iter_mut() {
                        if !inner_first {
                            q.reverse();
                        }
                    }
                    let mut order = head.clone();
                    let longest = queues.iter().map(Vec::len).max().unwrap_or(0);
                    for r in 0..longest {
                        for q in &queues {
                            if let Some(&i) = q.get(r) {
                                order.push(i);
                            }
                        }
                    }
                    order.extend(&tail_of_front);
                    let name = format!(
                        "front={} head={} visit={} within={}",
                        if front_right { "right" } else { "left" },
                        if front_outward { "outward" } else { "inward" },
                        if far_first { "far-first" } else { "near-first" },
                        if inner_first { "inner-first" } else { "outer-first" },
                    );
                    out.push((name, order));
                }
            }
        }
    }
    out
}

/// Finds an ordering under which sequential `l`-means does not return a
/// refinement of `planted`. Tries the heuristic orderings first, then random
/// permutations from `seed`, `budget` orderings in total.
pub fn adversarial_line_ordering(
    space: &DistanceSpace,
    planted: &Clustering,
    l: usize,
    seed: u64,
    budget: u64,
) -> Result<LineCertificate, AdversaryError> {
    let points = space.require_points()?;
    if points.dim() != 1 {
        return Err(AdversaryError::InvalidParameter("line orderings need 1-D data".into()));
    }
    if planted.len() != space.len() {
        return Err(AdversaryError::InvalidParameter(
            "planted clustering does not cover the space".into(),
        ));
    }
    if planted.k() < 3 {
        return Err(AdversaryError::InvalidParameter("the construction needs k >= 3".into()));
    }
    let smallest = planted.sizes().into_iter().min().unwrap_or(0);
    if l == 0 || l > smallest {
        return Err(AdversaryError::InvalidParameter(format!(
            "l = {l} must lie in 1..={smallest} (the smallest cluster)"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();

    let mut attempts = 0u64;
    let found = |strategy: String, ordering: Ordering, attempts: u64| -> Result<Option<LineCertificate>, AdversaryError> {
        Ok(evaluate(space, planted, &ordering, l)?.map(|(final_centers, induced, violation)| LineCertificate {
            ordering,
            l,
            final_centers,
            induced,
            violation,
            strategy,
            attempts,
        }))
    };
    for (name, perm) in heuristic_orderings(&xs, planted, l) {
        if attempts == budget {
            break;
        }
        attempts += 1;
        let ordering = Ordering::new(
            perm,
            Provenance::Adversarial {
                construction: format!("line {name}"),
            },
        )?;
        if let Some(cert) = found(name, ordering, attempts)? {
            return Ok(cert);
        }
    }
    let mut rng = substream(seed, Stream::Search, 0);
    while attempts < budget {
        attempts += 1;
        let mut perm: Vec<usize> = (0..xs.len()).collect();
        perm.shuffle(&mut rng);
        let ordering = Ordering::new(
            perm,
            Provenance::Adversarial {
                construction: format!("line random search (seed={seed})"),
            },
        )?;
        if let Some(cert) = found("random".into(), ordering, attempts)? {
            return Ok(cert);
        }
    }
    Err(AdversaryError::BudgetExhausted {
        what: "adversarial line ordering".into(),
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::PointSet;
    use crate::structures::is_refinement;

    fn three_blocks() -> (DistanceSpace, Clustering) {
        let xs: Vec<f64> = (0..3).flat_map(|c| (0..5).map(move |i| (10 * c + i) as f64)).collect();
        let labels = (0..15).map(|i| i / 5).collect();
        (
            DistanceSpace::euclidean(PointSet::from_1d(&xs)),
            Clustering::new(labels, 3).unwrap(),
        )
    }

    #[test]
    fn heuristic_breaks_three_blocks() {
        let (space, planted) = three_blocks();
        let cert = adversarial_line_ordering(&space, &planted, 5, 0, 100).unwrap();
        assert_ne!(cert.strategy, "random");
        assert!(!is_refinement(&cert.induced, &planted).unwrap());
        assert!(cert.replays(&space, &planted).unwrap());
    }

    #[test]
    fn preconditions() {
        let (space, planted) = three_blocks();
        assert!(adversarial_line_ordering(&space, &planted, 6, 0, 10).is_err());
        let two = Clustering::new((0..15).map(|i| usize::from(i >= 5)).collect(), 2).unwrap();
        assert!(adversarial_line_ordering(&space, &two, 3, 0, 10).is_err());
    }

    #[test]
    fn random_orderings_mostly_refine() {
        let (space, planted) = three_blocks();
        let mut ok = 0;
        for seed in 0..200 {
            let mut km = SequentialKMeans::new(5).unwrap();
            let rec = run_stream(&mut km, &space, &Ordering::random(15, seed), 0).unwrap();
            let induced = induce_clustering(&space, &rec.final_centers).unwrap().clustering;
            ok += usize::from(is_refinement(&induced, &planted).unwrap());
        }
        assert!(ok > 100, "{ok}/200");
    }
}
