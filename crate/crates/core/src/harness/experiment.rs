//! Monte Carlo estimates of the refinement probability.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{generate, GeneratorClass, GeneratorSpec, Instance};
use super::HarnessError;
use crate::incremental::{run_stream, Ordering, SequentialKMeans, StreamAlgorithm, Subsample};
use crate::rng::{derive_seed, Stream};
use crate::structures::{induce_clustering, is_refinement, size_beta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentAlgorithm {
    /// Sequential `l`-means; needs convex-nice data in random order.
    SeqLMeans,
    /// Reservoir subsampling of `l` exemplars; any ordering.
    Subsample,
}

impl ExperimentAlgorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentAlgorithm::SeqLMeans => "seq-l-means",
            ExperimentAlgorithm::Subsample => "subsample",
        }
    }
}

impl fmt::Display for ExperimentAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seq-l-means" | "seq-kmeans" => Ok(ExperimentAlgorithm::SeqLMeans),
            "subsample" => Ok(ExperimentAlgorithm::Subsample),
            _ => Err(format!("unknown experiment algorithm `{s}` (seq-l-means, subsample)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderingMode {
    /// A fresh uniform permutation per trial.
    Random,
    /// Clusters one after another, in planted label order.
    ClusterSorted,
    /// The same given ordering in every trial.
    Fixed(Ordering),
}

impl OrderingMode {
    pub fn is_random(&self) -> bool {
        matches!(self, OrderingMode::Random)
    }

    pub fn describe(&self) -> String {
        match self {
            OrderingMode::Random => "random".into(),
            OrderingMode::ClusterSorted => "cluster-sorted".into(),
            OrderingMode::Fixed(o) => format!("fixed ({})", serde_json::to_string(o.provenance()).unwrap_or_default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: ExperimentAlgorithm,
    pub spec: GeneratorSpec,
    pub l: usize,
    pub trials: usize,
    pub ordering: OrderingMode,
    /// Seed of the per-trial randomness; the instance comes from `spec.seed`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: GeneratorSpec,
    pub algorithm: String,
    pub ordering: String,
    pub k: usize,
    pub l: usize,
    pub n: usize,
    /// Measured on the instance: smallest cluster fraction for sequential
    /// `l`-means, smallest core fraction for the subsampler.
    pub beta: f64,
    pub generator_retries: u32,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    /// `1 - k exp(-beta l)`.
    pub bound: f64,
    /// Binomial standard error at the bound.
    pub sigma: f64,
    /// `bound - 3 sigma`.
    pub threshold: f64,
    pub passed: bool,
    /// With fewer centers than clusters no refinement is possible.
    pub l_below_k: bool,
    pub seeds: Vec<u64>,
    pub wall_ms: u64,
}

/// `1 - k exp(-beta l)`.
pub fn probability_bound(k: usize, beta: f64, l: usize) -> f64 {
    1.0 - k as f64 * (-beta * l as f64).exp()
}

/// Rejects configurations outside the hypotheses of the bound.
pub fn check_hypotheses(config: &ExperimentConfig) -> Result<(), HarnessError> {
    if config.l == 0 {
        return Err(HarnessError::Hypothesis("l must be at least 1".into()));
    }
    if config.trials == 0 {
        return Err(HarnessError::Hypothesis("trials must be at least 1".into()));
    }
    if config.algorithm == ExperimentAlgorithm::SeqLMeans {
        if !config.ordering.is_random() {
            return Err(HarnessError::Hypothesis(format!(
                "seq-l-means is only covered for uniformly random orderings, not {}",
                config.ordering.describe()
            )));
        }
        if config.spec.class != GeneratorClass::ConvexNice {
            return Err(HarnessError::Hypothesis(format!(
                "seq-l-means needs convex-nice instances, not {}",
                config.spec.class
            )));
        }
    }
    Ok(())
}

/// Generates the instance from `config.spec` and runs the experiment on it.
pub fn run_probability_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    check_hypotheses(config)?;
    let instance = generate(&config.spec)?;
    run_on_instance(config, &instance)
}

/// Runs `config.trials` seeded trials on `instance` in parallel. Trial `t`
/// uses seed `derive_seed(config.seed, Algorithm, t)`, from which its
/// ordering and reservoir randomness are derived, so the report depends only
/// on the configuration.
pub fn run_on_instance(config: &ExperimentConfig, instance: &Instance) -> Result<ExperimentReport, HarnessError> {
    check_hypotheses(config)?;
    let start = Instant::now();
    let n = instance.space.len();
    let k = instance.planted.k();
    if let OrderingMode::Fixed(o) = &config.ordering {
        if o.len() != n {
            return Err(HarnessError::Hypothesis(format!(
                "ordering covers {} items but the instance has {n}",
                o.len()
            )));
        }
    }
    let beta = match config.algorithm {
        ExperimentAlgorithm::SeqLMeans => size_beta(&instance.planted),
        ExperimentAlgorithm::Subsample => instance.cores.beta,
    };
    let sorted = Ordering::cluster_sorted(&instance.planted);
    let seeds: Vec<u64> = (0..config.trials as u64)
        .map(|t| derive_seed(config.seed, Stream::Algorithm, t))
        .collect();
    let outcomes: Vec<bool> = seeds
        .par_iter()
        .map(|&trial_seed| -> Result<bool, HarnessError> {
            let ordering = match &config.ordering {
                OrderingMode::Random => Ordering::random(n, derive_seed(trial_seed, Stream::Ordering, 0)),
                OrderingMode::ClusterSorted => sorted.clone(),
                OrderingMode::Fixed(o) => o.clone(),
            };
            let mut alg: Box<dyn StreamAlgorithm> = match config.algorithm {
                ExperimentAlgorithm::SeqLMeans => Box::new(SequentialKMeans::new(config.l)?),
                ExperimentAlgorithm::Subsample => {
                    Box::new(Subsample::new(config.l, derive_seed(trial_seed, Stream::Algorithm, 0))?)
                }
            };
            let record = run_stream(alg.as_mut(), &instance.space, &ordering, 0)?;
            let induced = induce_clustering(&instance.space, &record.final_centers)?;
            Ok(is_refinement(&induced.clustering, &instance.planted)?)
        })
        .collect::<Result<_, _>>()?;
    let successes = outcomes.iter().filter(|&&s| s).count();
    let trials = config.trials;
    let rate = successes as f64 / trials as f64;
    let bound = probability_bound(k, beta, config.l);
    let p = bound.clamp(0.0, 1.0);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let threshold = bound - 3.0 * sigma;
    Ok(ExperimentReport {
        spec: config.spec.clone(),
        algorithm: config.algorithm.to_string(),
        ordering: config.ordering.describe(),
        k,
        l: config.l,
        n,
        beta,
        generator_retries: instance.retries,
        trials,
        successes,
        rate,
        bound,
        sigma,
        threshold,
        passed: rate >= threshold,
        l_below_k: config.l < k,
        seeds,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One report per `l`, all on the same generated instance.
pub fn run_l_grid(config: &ExperimentConfig, ls: &[usize]) -> Result<Vec<ExperimentReport>, HarnessError> {
    check_hypotheses(config)?;
    let instance = generate(&config.spec)?;
    ls.iter()
        .map(|&l| run_on_instance(&ExperimentConfig { l, ..config.clone() }, &instance))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn core_config(l: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            algorithm: ExperimentAlgorithm::Subsample,
            spec: GeneratorSpec::new(GeneratorClass::Core, 3, 60, 2, 5).with_beta(0.2),
            l,
            trials,
            ordering: OrderingMode::ClusterSorted,
            seed: 11,
        }
    }

    #[test]
    fn bound_formula() {
        assert!((probability_bound(3, 0.1, 50) - 0.97978).abs() < 1e-5);
        assert!((probability_bound(3, 0.2, 30) - 0.99256).abs() < 1e-5);
        assert!(probability_bound(3, 0.2, 31) > probability_bound(3, 0.2, 30));
    }

    #[test]
    fn subsample_meets_bound_and_is_reproducible() {
        let a = run_probability_experiment(&core_config(20, 300)).unwrap();
        assert!(a.passed, "{a:?}");
        assert!(a.beta >= 0.2);
        let b = run_probability_experiment(&core_config(20, 300)).unwrap();
        assert_eq!((a.successes, &a.seeds), (b.successes, &b.seeds));
    }

    #[test]
    fn too_few_centers_are_flagged() {
        let r = run_probability_experiment(&core_config(2, 50)).unwrap();
        assert!(r.l_below_k);
        assert_eq!(r.successes, 0);
    }

    #[test]
    fn seq_l_means_hypotheses() {
        let spec = GeneratorSpec::new(GeneratorClass::ConvexNice, 3, 45, 2, 1);
        let mut config = ExperimentConfig {
            algorithm: ExperimentAlgorithm::SeqLMeans,
            spec: spec.clone(),
            l: 10,
            trials: 200,
            ordering: OrderingMode::ClusterSorted,
            seed: 2,
        };
        assert!(matches!(run_probability_experiment(&config), Err(HarnessError::Hypothesis(_))));
        config.ordering = OrderingMode::Random;
        config.spec.class = GeneratorClass::Core;
        assert!(matches!(run_probability_experiment(&config), Err(HarnessError::Hypothesis(_))));
        config.spec = spec;
        let r = run_probability_experiment(&config).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn grid_rates_trend_upwards() {
        let config = ExperimentConfig {
            algorithm: ExperimentAlgorithm::Subsample,
            ..core_config(0, 400)
        };
        let reports = run_l_grid(&ExperimentConfig { l: 1, ..config }, &[3, 6, 12, 24]).unwrap();
        assert!(reports.windows(2).all(|w| w[0].bound <= w[1].bound));
        assert!(reports[0].rate <= reports[3].rate);
    }
}
