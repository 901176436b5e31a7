//! Clustering from a precomputed distance matrix, and clustering agreement.

mod affinity;
mod agglomerative;
mod fmi;
mod kmedoids;

pub use affinity::{affinity_propagation, AffinityOptions};
pub use agglomerative::{agglomerative_average, agglomerative_average_detailed, Dendrogram};
pub use fmi::fmi;
pub use kmedoids::{k_medoids, k_medoids_detailed, KMedoidsOutcome};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cluster assignment. Ids are dense in `0..n_clusters` and numbered by first
/// appearance, so two results describing the same partition compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub n_clusters: usize,
    pub converged: bool,
}

impl ClusteringResult {
    pub(crate) fn from_raw(raw: &[usize], converged: bool) -> Self {
        let labels = canonical_labels(raw);
        let n_clusters = labels.iter().max().map_or(0, |m| m + 1);
        Self {
            labels,
            n_clusters,
            converged,
        }
    }
}

/// Renumbers labels by order of first appearance.
pub fn canonical_labels(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Clustering methods exposed to the experiment runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    KMedoids,
    Agglomerative,
    Affinity,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::KMedoids, Method::Agglomerative, Method::Affinity];

    pub fn name(self) -> &'static str {
        match self {
            Method::KMedoids => "kmedoids",
            Method::Agglomerative => "agglomerative",
            Method::Affinity => "affinity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmedoids" | "kmc" => Ok(Method::KMedoids),
            "agglomerative" | "ac" => Ok(Method::Agglomerative),
            "affinity" | "apc" => Ok(Method::Affinity),
            other => Err(Error::InvalidParameter(format!(
                "unknown clustering method {other:?}; valid names: kmedoids, agglomerative, affinity"
            ))),
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
    }
    Ok(())
}
