//! The acceptance suite: eleven self-contained checks, each driven by one
//! master seed. The determinism check (two identical `verify-all` runs) lives
//! with the command-line front-end.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::Ratio;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exhaustive::{exhaustive_ordering_check, Goal};
use super::experiment::{run_on_instance, ExperimentAlgorithm, ExperimentConfig, OrderingMode};
use super::generators::{gen_convex_nice, gen_core_clustering, gen_nice, gen_perfect, GeneratorClass, GeneratorSpec};
use super::HarnessError;
use crate::adversary::{
    adversarial_line_ordering, build_lower_bound_instance, build_matrix_m_configuration, configuration_subset_nice2,
    find_kmeans_badcase, run_lower_bound_game, LowerBoundInstance, LowerBoundMode,
};
use crate::incremental::{run_stream, AlgorithmKind, Ordering, SequentialKMeans, StreamAlgorithm, Subsample};
use crate::linkage::candidates;
use crate::metricspace::{DistanceMatrix, DistanceSpace, PointSet};
use crate::rng::{derive_seed, substream, Stream};
use crate::structures::{
    enumerate_nice_clusterings, enumerate_perfect_clusterings, induce_clustering, is_convex_nice_sufficient,
    is_perfect, CenterSet, Clustering,
};

pub const TRIALS: usize = 2000;
/// Standard errors below the bound still counted as a pass.
pub const SIGMA_MULTIPLIER: f64 = 3.0;
pub const BADCASE_BUDGET: u64 = 100_000;
pub const LINE_BUDGET: u64 = 10_000;
pub const EUCLIDEAN_LOWER_BOUND_DIM: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "perfect detection"),
    (2, "extra-centers coverage"),
    (3, "candidates coverage"),
    (4, "m-configuration nice 2-clusterings"),
    (5, "lower-bound instance integrity"),
    (6, "subsample bound"),
    (7, "sequential l-means bound"),
    (8, "sequential k-means bad case"),
    (9, "adversarial line ordering"),
    (10, "reservoir exactness"),
    (11, "oracle suite"),
];

type Outcome = Result<(bool, String), HarnessError>;

/// Runs criterion `id` (1 to 11). Errors count as failures.
pub fn run_criterion(id: u8, seed: u64) -> CriterionResult {
    let outcome = match id {
        1 => perfect_detection(seed),
        2 => extra_centers_coverage(seed),
        3 => candidates_coverage(seed),
        4 => m_configuration_iff(seed),
        5 => lower_bound_integrity(seed),
        6 => subsample_bound(seed),
        7 => seq_l_means_bound(seed),
        8 => kmeans_badcase(seed),
        9 => line_ordering(seed),
        10 => reservoir_exactness(seed),
        11 => oracle_suite(seed),
        _ => Err(HarnessError::Hypothesis(format!("no criterion {id}"))),
    };
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown", |(_, n)| n)
        .to_string();
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name, passed, detail }
}

pub fn verify_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

/// Deterministic text summary, one line per criterion; no timings.
pub fn render_summary(seed: u64, results: &[CriterionResult]) -> String {
    let mut out = format!("verify-all seed={seed}\n");
    for r in results {
        out.push_str(&format!(
            "[{}] {:>2} {}: {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.detail
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    out
}

fn params(seed: u64, criterion: u64, index: u64) -> ChaCha8Rng {
    substream(seed, Stream::Generation, (criterion << 32) | index)
}

fn instance_seed(seed: u64, criterion: u64, index: u64) -> u64 {
    derive_seed(seed, Stream::Generation, (criterion << 32) | (1 << 31) | index)
}

fn run_final(alg: &mut dyn StreamAlgorithm, space: &DistanceSpace, ordering: &Ordering) -> Result<CenterSet, HarnessError> {
    Ok(run_stream(alg, space, ordering, 0)?.final_centers)
}

fn perfect_detection(seed: u64) -> Outcome {
    const INSTANCES: u64 = 200;
    const ORDERINGS: u64 = 50;
    let random: Vec<(usize, usize)> = (0..INSTANCES)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize), HarnessError> {
            let mut rng = params(seed, 1, i);
            let k = 2 + (i % 4) as usize;
            let dim = 1 + ((i / 4) % 10) as usize;
            let n = rng.random_range(3 * k..=200);
            let inst = gen_perfect(&GeneratorSpec::new(GeneratorClass::Perfect, k, n, dim, instance_seed(seed, 1, i)))?;
            let mut exact = 0;
            for j in 0..ORDERINGS {
                let ordering = Ordering::random(n, derive_seed(seed, Stream::Ordering, (1 << 32) | (i * ORDERINGS + j)));
                let centers = run_final(AlgorithmKind::SeqNearestNeighbour.build(k, 0)?.as_mut(), &inst.space, &ordering)?;
                exact += usize::from(induce_clustering(&inst.space, &centers)?.clustering.same_partition(&inst.planted));
            }
            Ok((exact, ORDERINGS as usize))
        })
        .collect::<Result<_, _>>()?;
    let (a_ok, a_total) = random.iter().fold((0, 0), |(s, t), &(a, b)| (s + a, t + b));

    const SMALL: u64 = 20;
    let mut b_ok = 0;
    let mut b_total = 0;
    for i in 0..SMALL {
        let k = 2 + (i % 2) as usize;
        let n = k + 1 + ((i / 2) as usize) % (7 - k);
        let dim = 1 + (i % 3) as usize;
        let inst = gen_perfect(&GeneratorSpec::new(GeneratorClass::Perfect, k, n, dim, instance_seed(seed, 1, 1000 + i)))?;
        let make = || AlgorithmKind::SeqNearestNeighbour.build(k, 0);
        let table = exhaustive_ordering_check(&make, &inst.space, &inst.planted, Goal::Exact)?;
        b_ok += table.successes;
        b_total += table.total();
    }
    Ok((
        a_ok == a_total && b_ok == b_total,
        format!(
            "{a_ok}/{a_total} random-order runs exact on {INSTANCES} instances; \
             {b_ok}/{b_total} orderings exact on {SMALL} instances with n <= 7"
        ),
    ))
}

fn extra_centers_coverage(seed: u64) -> Outcome {
    const INSTANCES: u64 = 100;
    let results: Vec<(usize, usize)> = (0..INSTANCES)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize), HarnessError> {
            let mut rng = params(seed, 2, i);
            let k = 1 + (i % 5) as usize;
            let n = rng.random_range(k..=80);
            let dim = rng.random_range(1..=4);
            let inst = gen_nice(&GeneratorSpec::new(GeneratorClass::Nice, k, n, dim, instance_seed(seed, 2, i)))?;
            let ordering = Ordering::random(n, derive_seed(seed, Stream::Ordering, (2 << 32) | i));
            let mut alg = AlgorithmKind::ExtraCenters.build(k, 0)?;
            let bound = 1usize << (k - 1);
            let record = run_stream(alg.as_mut(), &inst.space, &ordering, 1)?;
            let mut touched = vec![false; k];
            let mut good = 0;
            for (snap, &item) in record.snapshots.iter().zip(ordering.as_slice()) {
                touched[inst.planted.label(item)] = true;
                let held = snap.centers.items().unwrap_or(&[]);
                let mut seen = vec![false; k];
                for &c in held {
                    seen[inst.planted.label(c)] = true;
                }
                let covered = touched.iter().zip(&seen).all(|(&t, &s)| !t || s);
                good += usize::from(held.len() <= bound && covered);
            }
            Ok((good, record.snapshots.len()))
        })
        .collect::<Result<_, _>>()?;
    let good: usize = results.iter().map(|r| r.0).sum();
    let total: usize = results.iter().map(|r| r.1).sum();
    Ok((
        good == total,
        format!("{good}/{total} snapshots within 2^(k-1) centers and covering every touched cluster ({INSTANCES} instances)"),
    ))
}

fn candidates_coverage(seed: u64) -> Outcome {
    const SETS: u64 = 200;
    let results: Vec<(bool, usize)> = (0..SETS)
        .into_par_iter()
        .map(|i| -> Result<(bool, usize), HarnessError> {
            let mut rng = params(seed, 3, i);
            let l = 1 + (i % 5) as usize;
            let k = l + ((i / 5) as usize) % (6 - l);
            let n = if i % 4 == 0 {
                rng.random_range(l..=10)
            } else {
                rng.random_range(l..=64)
            };
            let dim = rng.random_range(1..=3);
            let inst = gen_nice(&GeneratorSpec::new(GeneratorClass::Nice, l, n, dim, instance_seed(seed, 3, i)))?;
            let mut items: Vec<usize> = (0..n).collect();
            items.shuffle(&mut rng);
            let cand = candidates(&inst.space, &items, k)?;
            let hits = |c: &Clustering| {
                let mut hit = vec![false; c.k()];
                for &x in &cand {
                    hit[c.label(x)] = true;
                }
                hit.into_iter().all(|h| h)
            };
            let mut ok = hits(&inst.planted);
            // On small sets, every nice clustering with at most k clusters.
            let mut checked = 1;
            if n <= 10 {
                for lp in 1..=k.min(n) {
                    for c in enumerate_nice_clusterings(&inst.space, lp, usize::MAX)? {
                        ok &= hits(&c);
                        checked += 1;
                    }
                }
            }
            Ok((ok, checked))
        })
        .collect::<Result<_, _>>()?;
    let ok = results.iter().filter(|r| r.0).count();
    let clusterings: usize = results.iter().map(|r| r.1).sum();
    Ok((
        ok == SETS as usize,
        format!("{ok}/{SETS} sets covered ({clusterings} nice clusterings checked, enumerated when n <= 10)"),
    ))
}

fn m_configuration_iff(_seed: u64) -> Outcome {
    const M: usize = 5;
    let config = build_matrix_m_configuration(M)?;
    let mut agree = 0;
    let mut total = 0;
    for j in 1..=M {
        for size in 2..=4 {
            for s in (1..=M).combinations(size) {
                let answer = configuration_subset_nice2(&config, j, &s)?;
                agree += usize::from(answer.has_nice2() == !s.contains(&j));
                total += 1;
            }
        }
    }
    Ok((
        agree == total,
        format!("{agree}/{total} cases match (j not in S) for M={M}, every j and every S with 2 <= |S| <= 4"),
    ))
}

fn certify(inst: &LowerBoundInstance) -> Result<bool, HarnessError> {
    let mut ok = inst.sequences[0].x_together != inst.sequences[1].x_together;
    for which in 0..2 {
        let found = enumerate_nice_clusterings(&inst.sequence_space(which), 3, 2).unwrap_or_default();
        ok &= found.len() == 1 && found[0].same_partition(&inst.sequences[which].planted);
    }
    Ok(ok)
}

fn lower_bound_integrity(seed: u64) -> Outcome {
    let matrix = build_lower_bound_instance(5, 3, LowerBoundMode::Matrix)?;
    let euclidean = build_lower_bound_instance(
        5,
        3,
        LowerBoundMode::Euclidean {
            dim: EUCLIDEAN_LOWER_BOUND_DIM,
            seed,
            max_attempts: 1000,
        },
    )?;
    let certified = certify(&matrix)? && certify(&euclidean)?;
    let game = run_lower_bound_game(
        &mut || -> Result<Box<dyn StreamAlgorithm>, _> { Ok(Box::new(SequentialKMeans::new(3)?)) },
        &euclidean,
    )?;
    let failed: Vec<&str> = game.outcomes.iter().filter(|o| !o.solved).map(|o| o.name.as_str()).collect();
    Ok((
        certified && !game.solved_both,
        format!(
            "unique nice 3-clusterings with swapped polarity: {} (matrix and R^{EUCLIDEAN_LOWER_BOUND_DIM}); \
             sequential 3-means fails sequence(s) [{}]",
            if certified { "certified" } else { "NOT certified" },
            failed.join(", ")
        ),
    ))
}

fn describe(r: &super::ExperimentReport) -> String {
    format!(
        "l={} rate={:.4} ({}/{}) bound={:.5} beta={:.4} threshold={:.5}",
        r.l, r.rate, r.successes, r.trials, r.bound, r.beta, r.threshold
    )
}

fn subsample_bound(seed: u64) -> Outcome {
    let spec = GeneratorSpec::new(GeneratorClass::Core, 3, 150, 2, instance_seed(seed, 6, 0)).with_beta(0.2);
    let inst = gen_core_clustering(&spec)?;
    let report = run_on_instance(
        &ExperimentConfig {
            algorithm: ExperimentAlgorithm::Subsample,
            spec,
            l: 30,
            trials: TRIALS,
            ordering: OrderingMode::ClusterSorted,
            seed: derive_seed(seed, Stream::Algorithm, 6),
        },
        &inst,
    )?;
    let passed = report.beta >= 0.2 && report.rate >= report.bound - SIGMA_MULTIPLIER * report.sigma;
    Ok((passed, format!("cluster-sorted, {}", describe(&report))))
}

fn seq_l_means_bound(seed: u64) -> Outcome {
    let n = 90;
    let spec = GeneratorSpec::new(GeneratorClass::ConvexNice, 3, n, 2, instance_seed(seed, 7, 0));
    let inst = gen_convex_nice(&spec)?;
    let mut passed = (inst.measured_beta - 1.0 / 3.0).abs() <= 1.0 / n as f64;
    let mut parts = Vec::new();
    for l in [10, 20] {
        let report = run_on_instance(
            &ExperimentConfig {
                algorithm: ExperimentAlgorithm::SeqLMeans,
                spec: spec.clone(),
                l,
                trials: TRIALS,
                ordering: OrderingMode::Random,
                seed: derive_seed(seed, Stream::Algorithm, (7 << 32) | l as u64),
            },
            &inst,
        )?;
        passed &= report.rate >= report.bound - SIGMA_MULTIPLIER * report.sigma;
        parts.push(describe(&report));
    }
    Ok((passed, format!("random orderings, {}", parts.join("; "))))
}

fn kmeans_badcase(seed: u64) -> Outcome {
    let w = find_kmeans_badcase(seed, BADCASE_BUDGET)?;
    let space = w.space();
    let perfect = is_perfect(&space, &w.perfect);
    let optimum = w.perfect_is_strict_optimum();
    let make = || AlgorithmKind::SeqKMeans.build(2, 0);
    let table = exhaustive_ordering_check(&make, &space, &w.perfect, Goal::Exact)?;
    Ok((
        perfect && optimum && table.total() == 24 && table.all_fail(),
        format!(
            "{} witness after {} candidates: perfect={perfect}, strict optimum over 7 bipartitions={optimum}, \
             recovered on {}/{} orderings",
            w.family,
            w.attempts,
            table.successes,
            table.total()
        ),
    ))
}

fn line_ordering(seed: u64) -> Outcome {
    let xs: Vec<f64> = (0..3).flat_map(|c| (0..5).map(move |i| (10 * c + i) as f64)).collect();
    let space = DistanceSpace::euclidean(PointSet::from_1d(&xs));
    let planted = Clustering::new((0..15).map(|i| i / 5).collect(), 3)?;
    let convex = is_convex_nice_sufficient(&space, &planted)?;
    let cert = adversarial_line_ordering(&space, &planted, 5, seed, LINE_BUDGET)?;
    let replays = cert.replays(&space, &planted)?;
    Ok((
        convex && replays,
        format!(
            "ordering found by `{}` after {} tries; items {} and {} merged; replays={replays}",
            cert.strategy, cert.attempts, cert.violation.0, cert.violation.1
        ),
    ))
}

/// Exact distribution of the final reservoir over all draw branches.
pub fn reservoir_distribution(t: usize, l: usize) -> Result<BTreeMap<Vec<usize>, Ratio<u64>>, HarnessError> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(Subsample::new(l, 0)?, 0usize, Ratio::from_integer(1u64))];
    while let Some((state, step, p)) = stack.pop() {
        if step == t {
            let mut key = state.reservoir().to_vec();
            key.sort_unstable();
            *out.entry(key).or_insert(Ratio::from_integer(0)) += p;
            continue;
        }
        match state.next_draw_range() {
            None => {
                let mut next = state;
                next.step_with_draw(step, 0);
                stack.push((next, step + 1, p));
            }
            Some(range) => {
                for j in 0..range {
                    let mut next = state.clone();
                    next.step_with_draw(step, j);
                    stack.push((next, step + 1, p / range as u64));
                }
            }
        }
    }
    Ok(out)
}

fn reservoir_exactness(_seed: u64) -> Outcome {
    let mut exact = 0;
    let mut total = 0;
    for t in 1..=6usize {
        for l in 1..=3usize {
            let dist = reservoir_distribution(t, l)?;
            let expected: BTreeMap<Vec<usize>, Ratio<u64>> = if l <= t {
                let subsets: Vec<Vec<usize>> = (0..t).combinations(l).collect();
                let p = Ratio::new(1, subsets.len() as u64);
                subsets.into_iter().map(|s| (s, p)).collect()
            } else {
                BTreeMap::from([((0..t).collect(), Ratio::from_integer(1))])
            };
            exact += usize::from(dist == expected);
            total += 1;
        }
    }
    Ok((
        exact == total,
        format!("{exact}/{total} (t, l) pairs with t <= 6, l <= 3 give every l-subset probability exactly 1/C(t, l)"),
    ))
}

fn random_space(rng: &mut ChaCha8Rng, kind: u64, n: usize) -> DistanceSpace {
    match kind {
        0 => {
            let dim = rng.random_range(1..=3);
            let pts = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
            DistanceSpace::euclidean(PointSet::new(pts).expect("finite points"))
        }
        1 => {
            // A few loose blobs, so that perfect clusterings do occur.
            let blobs = rng.random_range(1..=4);
            let centers: Vec<f64> = (0..blobs).map(|_| rng.random_range(0.0..20.0)).collect();
            let pts: Vec<f64> = (0..n).map(|_| centers.choose(rng).unwrap() + rng.random_range(0.0..1.5)).collect();
            DistanceSpace::euclidean(PointSet::from_1d(&pts))
        }
        _ => {
            // Small integer distances, full of ties.
            let mut m = DistanceMatrix::zeros(n);
            for i in 0..n {
                for j in i + 1..n {
                    m.set(i, j, rng.random_range(1..=4) as f64);
                }
            }
            DistanceSpace::from_matrix(m, false)
        }
    }
}

fn oracle_suite(seed: u64) -> Outcome {
    const SPACES: u64 = 500;
    let counts: Vec<(usize, usize, usize)> = (0..SPACES)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize, usize), HarnessError> {
            let mut rng = params(seed, 11, i);
            let n = rng.random_range(2..=10);
            let space = random_space(&mut rng, i % 3, n);
            let (mut bad, mut unique) = (0, 0);
            for k in 1..=n {
                let found = enumerate_perfect_clusterings(&space, k, usize::MAX)?;
                bad += usize::from(found.len() > 1 || found.iter().any(|c| !is_perfect(&space, c)));
                unique += usize::from(found.len() == 1);
            }
            Ok((bad, unique, n))
        })
        .collect::<Result<_, _>>()?;
    let counterexamples: usize = counts.iter().map(|c| c.0).sum();
    let with_perfect: usize = counts.iter().map(|c| c.1).sum();
    let pairs: usize = counts.iter().map(|c| c.2).sum();

    const INSTANCES: u64 = 100;
    const DRAWS: usize = 10;
    let mut induced_ok = 0;
    for i in 0..INSTANCES {
        let mut rng = params(seed, 11, 1000 + i);
        let k = 1 + (i % 5) as usize;
        let n = rng.random_range(k..=40);
        let dim = rng.random_range(1..=3);
        let inst = gen_nice(&GeneratorSpec::new(GeneratorClass::Nice, k, n, dim, instance_seed(seed, 11, i)))?;
        let clusters = inst.planted.clusters();
        for _ in 0..DRAWS {
            let reps: Vec<usize> = clusters.iter().map(|c| *c.choose(&mut rng).unwrap()).collect();
            let induced = induce_clustering(&inst.space, &CenterSet::Items(reps))?;
            induced_ok += usize::from(induced.clustering.same_partition(&inst.planted));
        }
    }
    let draws = INSTANCES as usize * DRAWS;
    Ok((
        counterexamples == 0 && induced_ok == draws,
        format!(
            "{counterexamples} uniqueness counterexamples over {SPACES} spaces ({pairs} (space, k) pairs, \
             {with_perfect} with a perfect clustering); {induced_ok}/{draws} representative draws induce the nice clustering"
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reservoir_small_cases() {
        let d = reservoir_distribution(4, 2).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.values().all(|&p| p == Ratio::new(1, 6)));
        let d = reservoir_distribution(2, 3).unwrap();
        assert_eq!(d, BTreeMap::from([(vec![0, 1], Ratio::from_integer(1))]));
    }

    #[test]
    fn cheap_criteria_pass() {
        for id in [4, 9, 10] {
            let r = run_criterion(id, 42);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn summary_shape() {
        let results = vec![
            CriterionResult {
                id: 1,
                name: "a".into(),
                passed: true,
                detail: "ok".into(),
            },
            CriterionResult {
                id: 2,
                name: "b".into(),
                passed: false,
                detail: "no".into(),
            },
        ];
        let s = render_summary(7, &results);
        assert_eq!(s, "verify-all seed=7\n[PASS]  1 a: ok\n[FAIL]  2 b: no\n1/2 criteria passed\n");
        assert!(!run_criterion(99, 0).passed);
    }
}
