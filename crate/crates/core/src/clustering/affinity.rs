use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ClusteringResult;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Relative size of the fixed symmetry-breaking perturbation added to the
/// similarities before message passing.
const JITTER_RELATIVE: f64 = f64::EPSILON;
/// Absolute floor of that perturbation, for zero similarities.
const JITTER_ABSOLUTE: f64 = f64::MIN_POSITIVE * 100.0;
/// The perturbation depends only on the matrix, never on caller seeds.
const JITTER_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AffinityOptions {
    pub damping: f64,
    pub max_iter: usize,
    pub convergence_iter: usize,
}

impl Default for AffinityOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iter: 200,
            convergence_iter: 15,
        }
    }
}

/// Affinity propagation on similarities `S = -D`.
///
/// Every self-similarity is set to the median off-diagonal similarity. The
/// number of clusters is the number of exemplars found; `converged` reports
/// whether the exemplar set was stable for `convergence_iter` consecutive
/// sweeps before `max_iter`. If no exemplar emerges every sample is put in
/// one cluster and `converged` is false.
pub fn affinity_propagation(d: &DistanceMatrix, options: &AffinityOptions) -> Result<ClusteringResult> {
    let AffinityOptions {
        damping,
        max_iter,
        convergence_iter,
    } = *options;
    if !(0.5..1.0).contains(&damping) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in [0.5, 1), got {damping}"
        )));
    }
    if convergence_iter == 0 || max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter and convergence_iter must be positive".into(),
        ));
    }
    let n = d.len();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot cluster zero samples".into()));
    }
    if n == 1 {
        return Ok(ClusteringResult::from_raw(&[0], true));
    }

    let mut off: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| -d.get(i, j)))
        .collect();
    off.sort_by(f64::total_cmp);
    let m = off.len();
    let preference = if m % 2 == 1 {
        off[m / 2]
    } else {
        0.5 * (off[m / 2 - 1] + off[m / 2])
    };
    // All similarities equal and not below the preference: message passing
    // has no signal, so everything is one cluster.
    if off[0] == off[m - 1] && preference <= off[0] {
        return Ok(ClusteringResult::from_raw(&vec![0; n], true));
    }

    let idx = |i: usize, k: usize| i * n + k;
    let mut s = vec![0.0; n * n];
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    for i in 0..n {
        for k in 0..n {
            let base = if i == k { preference } else { -d.get(i, k) };
            let z: f64 = StandardNormal.sample(&mut rng);
            s[idx(i, k)] = base + (JITTER_RELATIVE * base + JITTER_ABSOLUTE) * z;
        }
    }

    let mut r = vec![0.0; n * n];
    let mut a = vec![0.0; n * n];
    let mut tmp = vec![0.0; n * n];
    let mut history = vec![vec![false; n]; convergence_iter];
    let mut exemplar = vec![false; n];
    let mut converged = false;

    for it in 0..max_iter {
        // Responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k')).
        for i in 0..n {
            let (mut first, mut first_k, mut second) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY);
            for k in 0..n {
                let v = a[idx(i, k)] + s[idx(i, k)];
                if v > first {
                    second = first;
                    first = v;
                    first_k = k;
                } else if v > second {
                    second = v;
                }
            }
            for k in 0..n {
                let competing = if k == first_k { second } else { first };
                let fresh = s[idx(i, k)] - competing;
                r[idx(i, k)] = damping * r[idx(i, k)] + (1.0 - damping) * fresh;
            }
        }

        // Availabilities: a(i,k) = min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)));
        // a(k,k) = sum_{i' != k} max(0, r(i',k)).
        for i in 0..n {
            for k in 0..n {
                tmp[idx(i, k)] = if i == k { r[idx(i, k)] } else { r[idx(i, k)].max(0.0) };
            }
        }
        for k in 0..n {
            let column: f64 = (0..n).map(|i| tmp[idx(i, k)]).sum();
            for i in 0..n {
                let total_excluding_i = column - tmp[idx(i, k)];
                let fresh = if i == k {
                    total_excluding_i
                } else {
                    total_excluding_i.min(0.0)
                };
                a[idx(i, k)] = damping * a[idx(i, k)] + (1.0 - damping) * fresh;
            }
        }

        for k in 0..n {
            exemplar[k] = a[idx(k, k)] + r[idx(k, k)] > 0.0;
        }
        history[it % convergence_iter].copy_from_slice(&exemplar);
        if it + 1 >= convergence_iter {
            let stable = (0..n).all(|k| {
                let on = history.iter().filter(|h| h[k]).count();
                on == 0 || on == convergence_iter
            });
            if stable && exemplar.iter().any(|&e| e) {
                converged = true;
                break;
            }
        }
    }

    let mut centers: Vec<usize> = (0..n).filter(|&k| exemplar[k]).collect();
    if centers.is_empty() {
        return Ok(ClusteringResult::from_raw(&vec![0; n], false));
    }

    // Assign, then move each exemplar to the member with the largest total
    // similarity to its cluster, then assign again.
    let assign = |centers: &[usize]| -> Vec<usize> {
        (0..n)
            .map(|i| {
                if let Some(c) = centers.iter().position(|&k| k == i) {
                    return c;
                }
                let mut best = 0;
                for (c, &k) in centers.iter().enumerate() {
                    if s[idx(i, k)] > s[idx(i, centers[best])] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    };
    let labels = assign(&centers);
    for (c, center) in centers.iter_mut().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
        let mut best = (f64::NEG_INFINITY, *center);
        for &j in &members {
            let total: f64 = members.iter().map(|&i| s[idx(i, j)]).sum();
            if total > best.0 {
                best = (total, j);
            }
        }
        *center = best.1;
    }
    let labels = assign(&centers);
    Ok(ClusteringResult::from_raw(&labels, converged))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::two_blocks;
    use super::*;

    #[test]
    fn two_blocks_give_two_exemplars() {
        let r = affinity_propagation(&two_blocks(4), &AffinityOptions::default()).unwrap();
        assert_eq!(r.n_clusters, 2);
        assert!(r.converged);
        assert_eq!(r.labels, vec![0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn three_separated_groups() {
        let centers = [0.0, 100.0, 250.0];
        let xs: Vec<f64> = centers
            .iter()
            .flat_map(|c| [c - 1.0, c + 0.5, c + 2.0, c + 3.0])
            .collect();
        let rows = xs
            .iter()
            .map(|a| xs.iter().map(|b: &f64| (a - b).abs()).collect())
            .collect();
        let d = DistanceMatrix::from_rows(rows).unwrap();
        let r = affinity_propagation(&d, &AffinityOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.labels, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn deterministic() {
        let d = two_blocks(5);
        let o = AffinityOptions {
            damping: 0.7,
            ..AffinityOptions::default()
        };
        assert_eq!(
            affinity_propagation(&d, &o).unwrap(),
            affinity_propagation(&d, &o).unwrap()
        );
    }

    #[test]
    fn degenerate_inputs() {
        let one = DistanceMatrix::from_rows(vec![vec![0.0]]).unwrap();
        assert_eq!(
            affinity_propagation(&one, &AffinityOptions::default())
                .unwrap()
                .n_clusters,
            1
        );
        let equal =
            DistanceMatrix::from_rows(vec![vec![0.0, 2.0, 2.0], vec![2.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]]).unwrap();
        let r = affinity_propagation(&equal, &AffinityOptions::default()).unwrap();
        assert_eq!(r.labels, vec![0, 0, 0]);
    }

    #[test]
    fn damping_range() {
        let d = two_blocks(2);
        for damping in [0.49, 1.0, f64::NAN] {
            let o = AffinityOptions {
                damping,
                ..AffinityOptions::default()
            };
            assert!(affinity_propagation(&d, &o).is_err());
        }
    }
}
