//! Synthetic instances for each structural class.
//!
//! Every generator builds its instance with explicit margins, then runs the
//! class checker and retries with fresh randomness on the (rare) failures.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metricspace::{DistanceSpace, PointSet};
use crate::rng::{substream, Stream};
use crate::structures::{
    compute_cores, enumerate_nice_clusterings, is_convex_nice_sufficient, is_nice, is_perfect, size_beta,
    Clustering, CoreAnnotation, MAX_ENUMERATION_ITEMS,
};

/// Generation attempts before a spec is declared infeasible.
pub const MAX_RETRIES: u32 = 200;

/// Half-width of a core ball.
const CORE_RADIUS: f64 = 0.02;
/// Spacing of core-instance centers along the first axis.
const CORE_SPACING: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorClass {
    Perfect,
    Nice,
    ConvexNice,
    Core,
}

impl GeneratorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorClass::Perfect => "perfect",
            GeneratorClass::Nice => "nice",
            GeneratorClass::ConvexNice => "convex-nice",
            GeneratorClass::Core => "core",
        }
    }
}

impl fmt::Display for GeneratorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perfect" => Ok(GeneratorClass::Perfect),
            "nice" => Ok(GeneratorClass::Nice),
            "convex-nice" | "convex_nice" => Ok(GeneratorClass::ConvexNice),
            "core" => Ok(GeneratorClass::Core),
            _ => Err(format!("unknown class `{s}` (perfect, nice, convex-nice, core)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class: GeneratorClass,
    pub k: usize,
    pub n: usize,
    pub dim: usize,
    /// Relative slack on top of the separation each class needs.
    pub separation: f64,
    /// Core class: target core fraction per cluster. Other classes: target
    /// size of the smallest cluster as a fraction of `n`; `None` balances.
    pub beta: Option<f64>,
    /// Nice class: also require the planted clustering to be the only nice
    /// `k`-clustering (checked by enumeration, so `n <= 14`).
    pub unique: bool,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(class: GeneratorClass, k: usize, n: usize, dim: usize, seed: u64) -> Self {
        Self {
            class,
            k,
            n,
            dim,
            separation: 0.5,
            beta: None,
            unique: false,
            seed,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_unique(mut self, unique: bool) -> Self {
        self.unique = unique;
        self
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidSpec(msg));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.n < self.k {
            return bad(format!("n = {} is smaller than k = {}", self.n, self.k));
        }
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return bad("separation must be positive".into());
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta <= 1.0) {
                return bad(format!("beta = {beta} outside (0, 1]"));
            }
        }
        if self.unique && (self.class != GeneratorClass::Nice || self.n > MAX_ENUMERATION_ITEMS) {
            return bad(format!(
                "uniqueness is certified for nice instances with n <= {MAX_ENUMERATION_ITEMS}"
            ));
        }
        Ok(())
    }
}

/// A generated space with its planted clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub space: DistanceSpace,
    pub planted: Clustering,
    /// Cores of the planted clustering as computed by the checker.
    pub cores: CoreAnnotation,
    /// Core class: computed core fraction. Otherwise `min_i |C_i| / n`.
    pub measured_beta: f64,
    /// Failed attempts before this one.
    pub retries: u32,
}

/// Dispatches on `spec.class`.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    spec.validate()?;
    for attempt in 0..MAX_RETRIES {
        let mut rng = substream(spec.seed, Stream::Generation, attempt as u64);
        let sizes = cluster_sizes(spec);
        let (points, labels, planted_cores) = match spec.class {
            GeneratorClass::Perfect | GeneratorClass::ConvexNice => balls_on_grid(spec, &sizes, &mut rng),
            GeneratorClass::Nice => hierarchical_balls(spec, &sizes, &mut rng),
            GeneratorClass::Core => core_and_halo(spec, &sizes, &mut rng),
        };
        let (space, planted, planted_cores) = shuffle(points, labels, planted_cores, &mut rng)?;
        let ok = match spec.class {
            GeneratorClass::Perfect => is_perfect(&space, &planted),
            GeneratorClass::Nice => {
                is_nice(&space, &planted)
                    && (!spec.unique || enumerate_nice_clusterings(&space, spec.k, 1).is_ok_and(|v| v.len() == 1))
            }
            GeneratorClass::ConvexNice => is_convex_nice_sufficient(&space, &planted)?,
            GeneratorClass::Core => {
                let cores = compute_cores(&space, &planted);
                let contains = planted_cores
                    .iter()
                    .enumerate()
                    .all(|(c, planted)| planted.iter().all(|&z| cores.is_core(c, z)));
                let has_halo = planted_cores.iter().zip(planted.sizes()).any(|(c, s)| c.len() < s);
                contains && (!has_halo || !is_nice(&space, &planted))
            }
        };
        if ok {
            let cores = compute_cores(&space, &planted);
            let measured_beta = match spec.class {
                GeneratorClass::Core => cores.beta,
                _ => size_beta(&planted),
            };
            return Ok(Instance {
                space,
                planted,
                cores,
                measured_beta,
                retries: attempt,
            });
        }
    }
    Err(HarnessError::Infeasible {
        class: spec.class.to_string(),
        retries: MAX_RETRIES,
    })
}

pub fn gen_perfect(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    generate(&GeneratorSpec {
        class: GeneratorClass::Perfect,
        ..spec.clone()
    })
}

pub fn gen_nice(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    generate(&GeneratorSpec {
        class: GeneratorClass::Nice,
        ..spec.clone()
    })
}

pub fn gen_convex_nice(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    generate(&GeneratorSpec {
        class: GeneratorClass::ConvexNice,
        ..spec.clone()
    })
}

pub fn gen_core_clustering(spec: &GeneratorSpec) -> Result<Instance, HarnessError> {
    generate(&GeneratorSpec {
        class: GeneratorClass::Core,
        ..spec.clone()
    })
}

/// Balanced sizes, or (non-core classes with a `beta`) one cluster of
/// `round(beta n)` points and the rest shared evenly.
fn cluster_sizes(spec: &GeneratorSpec) -> Vec<usize> {
    let (n, k) = (spec.n, spec.k);
    let balanced = |n: usize, k: usize| -> Vec<usize> { (0..k).map(|i| n / k + usize::from(i < n % k)).collect() };
    match spec.beta {
        Some(beta) if spec.class != GeneratorClass::Core && k > 1 => {
            let small = ((beta * n as f64).round() as usize).clamp(1, n / k);
            let mut sizes = vec![small];
            sizes.extend(balanced(n - small, k - 1));
            sizes
        }
        _ => balanced(n, k),
    }
}

fn gaussian_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform point in the ball of radius `r` about `center`.
fn in_ball(center: &[f64], r: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dir = gaussian_direction(center.len(), rng);
    let radius = r * rng.random::<f64>().powf(1.0 / center.len() as f64);
    center.iter().zip(dir).map(|(c, d)| c + radius * d).collect()
}

type Raw = (Vec<Vec<f64>>, Vec<usize>, Vec<Vec<usize>>);

/// Unit balls whose centers sit on a jittered grid of spacing `1.5 R`,
/// `R = 4 (1 + separation)`. Diameters are at most 2 and centers at least `R`
/// apart, so every inter distance exceeds `R - 2 > 2 (1 + separation)` and
/// the hull gap exceeds every diameter.
fn balls_on_grid(spec: &GeneratorSpec, sizes: &[usize], rng: &mut ChaCha8Rng) -> Raw {
    let r_sep = 4.0 * (1.0 + spec.separation);
    let side = (1..).find(|s: &usize| s.pow(spec.dim.min(16) as u32) >= spec.k).unwrap();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (c, &size) in sizes.iter().enumerate() {
        let mut idx = c;
        let center: Vec<f64> = (0..spec.dim)
            .map(|_| {
                let g = idx % side;
                idx /= side;
                1.5 * r_sep * g as f64 + rng.random_range(-0.25..0.25) * r_sep
            })
            .collect();
        for _ in 0..size {
            points.push(in_ball(&center, 1.0, rng));
            labels.push(c);
        }
    }
    (points, labels, Vec::new())
}

/// Balls of log-uniform radii in `[0.2, 5]` strung along the first axis. The
/// gap between clusters `i` and `j` is at least
/// `(r_i + r_j + 2 max(r_i, r_j)) (1 + separation)`, so every point is closer
/// to its whole cluster (within `2 r`) than to anything outside.
fn hierarchical_balls(spec: &GeneratorSpec, sizes: &[usize], rng: &mut ChaCha8Rng) -> Raw {
    let radii: Vec<f64> = (0..spec.k).map(|_| (rng.random_range(0.2f64.ln()..5f64.ln())).exp()).collect();
    let mut offset = 0.0;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (c, &size) in sizes.iter().enumerate() {
        if c > 0 {
            let (a, b) = (radii[c - 1], radii[c]);
            offset += (a + b + 2.0 * a.max(b)) * (1.0 + spec.separation) * rng.random_range(1.0..1.5);
        }
        let mut center = vec![0.0; spec.dim];
        center[0] = offset;
        for _ in 0..size {
            points.push(in_ball(&center, radii[c], rng));
            labels.push(c);
        }
    }
    (points, labels, Vec::new())
}

/// Core ball of radius 0.02 plus a halo at radius 0.5 to 1.0, centers 3.5
/// apart on the first axis. Each halo includes the points `center +- e_1`:
/// `center + e_1` is 2 from its partner but only 1.5 from the next cluster's
/// `- e_1` point, so the clustering is not nice, while every halo point stays
/// within 1.02 of its core and at least 1.5 from other clusters.
fn core_and_halo(spec: &GeneratorSpec, sizes: &[usize], rng: &mut ChaCha8Rng) -> Raw {
    let beta = spec.beta.unwrap_or(0.2);
    let core_size = ((beta * spec.n as f64) - 1e-9).ceil().max(1.0) as usize;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut cores = Vec::new();
    for (c, &size) in sizes.iter().enumerate() {
        let mut center = vec![0.0; spec.dim];
        center[0] = CORE_SPACING * c as f64;
        let core_here = core_size.min(size);
        let mut core = Vec::new();
        for _ in 0..core_here {
            core.push(points.len());
            points.push(in_ball(&center, CORE_RADIUS, rng));
            labels.push(c);
        }
        for h in 0..size - core_here {
            let p = match h {
                0 | 1 => {
                    let mut p = center.clone();
                    p[0] += if h == 0 { 1.0 } else { -1.0 };
                    p
                }
                _ => {
                    let r = rng.random_range(0.5..1.0);
                    let dir = gaussian_direction(spec.dim, rng);
                    center.iter().zip(dir).map(|(c, d)| c + r * d).collect()
                }
            };
            points.push(p);
            labels.push(c);
        }
        cores.push(core);
    }
    (points, labels, cores)
}

/// Applies a random permutation to the items so that index order carries no
/// cluster information, and relabels canonically.
fn shuffle(
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
    cores: Vec<Vec<usize>>,
    rng: &mut ChaCha8Rng,
) -> Result<(DistanceSpace, Clustering, Vec<Vec<usize>>), HarnessError> {
    let n = points.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    // perm[new] = old
    let mut new_of_old = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        new_of_old[old] = new;
    }
    let shuffled: Vec<Vec<f64>> = perm.iter().map(|&old| points[old].clone()).collect();
    let raw = Clustering::from_labels(perm.iter().map(|&old| labels[old]).collect())?;
    let planted = raw.canonical();
    // Canonical relabelling maps raw label -> canonical label; carry cores along.
    let mut label_map = vec![usize::MAX; raw.k()];
    for item in 0..n {
        label_map[raw.label(item)] = planted.label(item);
    }
    let mut new_cores = vec![Vec::new(); if cores.is_empty() { 0 } else { planted.k() }];
    for (raw_label, core) in cores.into_iter().enumerate() {
        let mut c: Vec<usize> = core.into_iter().map(|old| new_of_old[old]).collect();
        c.sort_unstable();
        new_cores[label_map[raw_label]] = c;
    }
    Ok((DistanceSpace::euclidean(PointSet::new(shuffled)?), planted, new_cores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::is_convex_nice_sufficient;

    #[test]
    fn perfect_instances() {
        for seed in 0..10 {
            let inst = gen_perfect(&GeneratorSpec::new(GeneratorClass::Perfect, 3, 60, 2, seed)).unwrap();
            assert!(is_perfect(&inst.space, &inst.planted));
            assert!(is_nice(&inst.space, &inst.planted));
            assert_eq!(inst.planted.k(), 3);
        }
        let one = gen_perfect(&GeneratorSpec::new(GeneratorClass::Perfect, 1, 5, 3, 0)).unwrap();
        assert_eq!(one.planted.k(), 1);
        assert!(gen_perfect(&GeneratorSpec::new(GeneratorClass::Perfect, 4, 3, 2, 0)).is_err());
    }

    #[test]
    fn nice_instances_with_uniqueness() {
        for seed in 0..5 {
            let spec = GeneratorSpec::new(GeneratorClass::Nice, 3, 12, 2, seed).with_unique(true);
            let inst = gen_nice(&spec).unwrap();
            assert!(is_nice(&inst.space, &inst.planted));
            assert_eq!(enumerate_nice_clusterings(&inst.space, 3, 10).unwrap().len(), 1);
        }
    }

    #[test]
    fn convex_nice_balance() {
        let spec = GeneratorSpec::new(GeneratorClass::ConvexNice, 3, 50, 2, 4).with_beta(0.1);
        let inst = gen_convex_nice(&spec).unwrap();
        assert!(is_convex_nice_sufficient(&inst.space, &inst.planted).unwrap());
        assert!((inst.measured_beta - 0.1).abs() <= 1.0 / 50.0);
    }

    #[test]
    fn core_instances() {
        let spec = GeneratorSpec::new(GeneratorClass::Core, 3, 60, 2, 9).with_beta(0.2);
        let inst = gen_core_clustering(&spec).unwrap();
        assert!(inst.measured_beta >= 0.2);
        assert!(!is_nice(&inst.space, &inst.planted));
        let full = GeneratorSpec::new(GeneratorClass::Core, 3, 30, 2, 9).with_beta(1.0);
        let inst = gen_core_clustering(&full).unwrap();
        assert!(is_nice(&inst.space, &inst.planted));
        assert_eq!(inst.measured_beta, 1.0 / 3.0);
    }

    #[test]
    fn reproducible() {
        let spec = GeneratorSpec::new(GeneratorClass::Nice, 4, 40, 3, 77);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
}
