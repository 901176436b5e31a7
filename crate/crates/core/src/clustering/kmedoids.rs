use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_k, ClusteringResult};
use crate::distance::DistanceMatrix;
use crate::error::Result;

const MAX_SWAPS: usize = 10_000;

/// Improvement below this is treated as no improvement.
const SWAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsOutcome {
    pub result: ClusteringResult,
    pub medoids: Vec<usize>,
    /// Total distance to the nearest medoid after BUILD and after each swap.
    pub cost_history: Vec<f64>,
}

/// PAM (BUILD then best-improvement SWAP) to a local optimum.
///
/// The seed only fixes the order in which candidates are scanned, which
/// decides between equally good moves.
pub fn k_medoids(d: &DistanceMatrix, k: usize, seed: u64) -> Result<ClusteringResult> {
    Ok(k_medoids_detailed(d, k, seed)?.result)
}

pub fn k_medoids_detailed(d: &DistanceMatrix, k: usize, seed: u64) -> Result<KMedoidsOutcome> {
    let n = d.len();
    check_k(k, n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for &c in &order {
            if medoids.contains(&c) {
                continue;
            }
            let cost: f64 = (0..n).map(|o| nearest[o].min(d.get(o, c))).sum();
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((c, cost));
            }
        }
        let (c, _) = best.expect("k <= n leaves a candidate");
        medoids.push(c);
        for (o, near) in nearest.iter_mut().enumerate() {
            *near = near.min(d.get(o, c));
        }
    }

    let mut cost = total_cost(d, &medoids);
    let mut cost_history = vec![cost];

    // SWAP
    let mut converged = false;
    for _ in 0..MAX_SWAPS {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for &candidate in &order {
                if medoids.contains(&candidate) {
                    continue;
                }
                let previous = medoids[slot];
                medoids[slot] = candidate;
                let trial = total_cost(d, &medoids);
                medoids[slot] = previous;
                if best.is_none_or(|(_, _, b)| trial < b) {
                    best = Some((slot, candidate, trial));
                }
            }
        }
        match best {
            Some((slot, candidate, trial)) if trial < cost - SWAP_TOLERANCE => {
                medoids[slot] = candidate;
                cost = trial;
                cost_history.push(cost);
            }
            _ => {
                converged = true;
                break;
            }
        }
    }

    let labels = assign(d, &medoids);
    Ok(KMedoidsOutcome {
        result: ClusteringResult::from_raw(&labels, converged),
        medoids,
        cost_history,
    })
}

fn total_cost(d: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..d.len())
        .map(|o| medoids.iter().map(|&m| d.get(o, m)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Index of the nearest medoid; a medoid always belongs to its own cluster.
fn assign(d: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.len())
        .map(|o| {
            if let Some(slot) = medoids.iter().position(|&m| m == o) {
                return slot;
            }
            let mut best = 0;
            for (slot, &m) in medoids.iter().enumerate() {
                if d.get(o, m) < d.get(o, medoids[best]) {
                    best = slot;
                }
            }
            best
        })
        .collect()
}
