use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::StreamError;
use crate::structures::Clustering;

/// Where an ordering came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Identity,
    Random { seed: u64 },
    Adversarial { construction: String },
    File { path: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Identity => f.write_str("identity"),
            Provenance::Random { seed } => write!(f, "random(seed={seed})"),
            Provenance::Adversarial { construction } => write!(f, "adversarial({construction})"),
            Provenance::File { path } => write!(f, "file({path})"),
        }
    }
}

/// A permutation of item indices: the arrival order of a stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    perm: Vec<usize>,
    provenance: Provenance,
}

impl Ordering {
    pub fn new(perm: Vec<usize>, provenance: Provenance) -> Result<Self, StreamError> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() {
                return Err(StreamError::InvalidOrdering(format!(
                    "index {i} out of range for {} items",
                    perm.len()
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(StreamError::InvalidOrdering(format!("index {i} appears twice")));
            }
        }
        Ok(Self { perm, provenance })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            provenance: Provenance::Identity,
        }
    }

    /// Uniformly random permutation drawn from `seed`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self {
            perm,
            provenance: Provenance::Random { seed },
        }
    }

    /// Items grouped by cluster label (cluster 0 first), input order within
    /// each cluster.
    pub fn cluster_sorted(c: &Clustering) -> Self {
        let perm = c.clusters().into_iter().flatten().collect();
        Self {
            perm,
            provenance: Provenance::Adversarial {
                construction: "cluster-sorted".into(),
            },
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// One index per line.
    pub fn parse(text: &str, provenance: Provenance) -> Result<Self, StreamError> {
        let mut perm = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let i = line
                .parse::<usize>()
                .map_err(|e| StreamError::InvalidOrdering(format!("line {}: {e}", n + 1)))?;
            perm.push(i);
        }
        Self::new(perm, provenance)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.perm.len() * 4);
        for i in &self.perm {
            out.push_str(&i.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Ordering::new(vec![2, 0, 1], Provenance::Identity).is_ok());
        assert!(Ordering::new(vec![0, 0, 1], Provenance::Identity).is_err());
        assert!(Ordering::new(vec![0, 3, 1], Provenance::Identity).is_err());
    }

    #[test]
    fn random_is_a_reproducible_permutation() {
        let a = Ordering::random(50, 4);
        assert_eq!(a, Ordering::random(50, 4));
        assert_ne!(a, Ordering::random(50, 5));
        let mut s = a.as_slice().to_vec();
        s.sort_unstable();
        assert_eq!(s, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn text_round_trip() {
        let a = Ordering::random(9, 1);
        let b = Ordering::parse(&a.to_text(), a.provenance().clone()).unwrap();
        assert_eq!(a, b);
        assert!(Ordering::parse("0\nx\n", Provenance::Identity).is_err());
    }

    #[test]
    fn cluster_sorted_groups_labels() {
        let c = Clustering::from_labels(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(Ordering::cluster_sorted(&c).as_slice(), &[1, 3, 0, 2]);
    }
}
