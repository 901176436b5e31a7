//! Distance matrices over collections of barcodes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barcode::Barcode;
use crate::error::{Error, Result};
use crate::matching::{bottleneck, wasserstein};
use crate::spectral::{normalized_spectrum, SpectralExponent, Spectrum};

/// Symmetric, non-negative, zero-diagonal matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates square shape, zero diagonal, symmetry and non-negativity.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row: i,
                    len: row.len(),
                });
            }
            data.extend(row);
        }
        let m = Self { n, data };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} is {} (must be 0)",
                    m.get(i, i)
                )));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) = {v} is not a finite non-negative distance"
                    )));
                }
                if v != m.get(j, i) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        gap: (v - m.get(j, i)).abs(),
                    });
                }
            }
        }
        Ok(m)
    }

    /// Fills a matrix from the strict upper triangle, row by row.
    fn from_upper(n: usize, upper: &[f64]) -> Self {
        let mut data = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                data[i * n + j] = upper[k];
                data[j * n + i] = upper[k];
                k += 1;
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest `d(i,k) - d(i,j) - d(j,k)` over all triples (≤ 0 for a pseudometric).
    pub fn max_triangle_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.get(i, k) - self.get(i, j) - self.get(j, k));
                }
            }
        }
        worst
    }

    /// Applies the same permutation to rows and columns: `out[a][b] = self[perm[a]][perm[b]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = self.get(perm[a], perm[b]);
            }
        }
        Self { n, data }
    }
}

/// Pseudometrics available for distance matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "db")]
    Bottleneck,
    #[serde(rename = "dW1")]
    Wasserstein1,
    #[serde(rename = "dW2")]
    Wasserstein2,
    #[serde(rename = "dS1")]
    Spectral1,
    #[serde(rename = "dS2")]
    Spectral2,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Bottleneck,
        Metric::Wasserstein1,
        Metric::Wasserstein2,
        Metric::Spectral1,
        Metric::Spectral2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bottleneck => "db",
            Metric::Wasserstein1 => "dW1",
            Metric::Wasserstein2 => "dW2",
            Metric::Spectral1 => "dS1",
            Metric::Spectral2 => "dS2",
        }
    }

    fn spectral_exponent(self) -> Option<SpectralExponent> {
        match self {
            Metric::Spectral1 => Some(SpectralExponent::One),
            Metric::Spectral2 => Some(SpectralExponent::Two),
            _ => None,
        }
    }

    /// Distance between two barcodes under this metric.
    pub fn distance(self, b: &Barcode, c: &Barcode) -> Result<f64> {
        match self {
            Metric::Bottleneck => Ok(bottleneck(b, c)),
            Metric::Wasserstein1 => wasserstein(b, c, 1.0),
            Metric::Wasserstein2 => wasserstein(b, c, 2.0),
            Metric::Spectral1 | Metric::Spectral2 => {
                let p = self.spectral_exponent().expect("spectral metric");
                Ok(normalized_spectrum(b)?.distance(&normalized_spectrum(c)?, p))
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db" | "bottleneck" => Ok(Metric::Bottleneck),
            "dW1" | "wasserstein1" => Ok(Metric::Wasserstein1),
            "dW2" | "wasserstein2" => Ok(Metric::Wasserstein2),
            "dS1" | "spectral1" => Ok(Metric::Spectral1),
            "dS2" | "spectral2" => Ok(Metric::Spectral2),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric {other:?}; valid names: db, dW1, dW2, dS1, dS2 \
                 (aliases: bottleneck, wasserstein1, wasserstein2, spectral1, spectral2)"
            ))),
        }
    }
}

/// Pairwise distances between `barcodes`.
///
/// Pairs are evaluated independently, on the current rayon pool when
/// `parallel` is set; the result does not depend on the schedule. Spectral
/// metrics compute each spectrum once.
pub fn distance_matrix(barcodes: &[Barcode], metric: Metric, parallel: bool) -> Result<DistanceMatrix> {
    let n = barcodes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();

    let upper: Vec<f64> = if let Some(p) = metric.spectral_exponent() {
        let spectra: Vec<Spectrum> = if parallel {
            barcodes.par_iter().map(normalized_spectrum).collect::<Result<_>>()?
        } else {
            barcodes.iter().map(normalized_spectrum).collect::<Result<_>>()?
        };
        let eval = |&(i, j): &(usize, usize)| spectra[i].distance(&spectra[j], p);
        if parallel {
            pairs.par_iter().map(eval).collect()
        } else {
            pairs.iter().map(eval).collect()
        }
    } else {
        let eval = |&(i, j): &(usize, usize)| metric.distance(&barcodes[i], &barcodes[j]);
        if parallel {
            pairs.par_iter().map(eval).collect::<Result<_>>()?
        } else {
            pairs.iter().map(eval).collect::<Result<_>>()?
        }
    };
    Ok(DistanceMatrix::from_upper(n, &upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(pairs: &[(f64, f64)]) -> Barcode {
        Barcode::canonicalize(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn identical_barcodes_give_zero_matrix() {
        let b = bc(&[(0.0, 1.0), (0.5, 2.0)]);
        for metric in Metric::ALL {
            let m = distance_matrix(&[b.clone(), b.clone()], metric, false).unwrap();
            assert_eq!(m.row(0), &[0.0, 0.0]);
            assert_eq!(m.row(1), &[0.0, 0.0]);
        }
    }

    #[test]
    fn named_examples() {
        let m = distance_matrix(
            &[bc(&[(1.0, 3.0), (2.0, 4.0)]), bc(&[(0.0, 2.0)])],
            Metric::Spectral2,
            false,
        )
        .unwrap();
        assert!((m.get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        let m = distance_matrix(&[bc(&[(0.0, 2.0)]), bc(&[(0.0, 3.0)])], Metric::Bottleneck, false).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
    }

    #[test]
    fn parallel_equals_serial() {
        let barcodes: Vec<Barcode> = (0..9)
            .map(|k| {
                let k = k as f64;
                bc(&[(0.0, 1.0 + k), (0.3 * k, 2.0 + 0.5 * k), (k, 2.0 * k + 0.1)])
            })
            .collect();
        for metric in Metric::ALL {
            let serial = distance_matrix(&barcodes, metric, false).unwrap();
            let parallel = distance_matrix(&barcodes, metric, true).unwrap();
            assert_eq!(serial, parallel, "{metric}");
            assert!(serial.max_triangle_violation() <= 1e-9, "{metric}");
        }
    }

    #[test]
    fn metric_names() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("bottleneck".parse::<Metric>().unwrap(), Metric::Bottleneck);
        let err = "euclid".parse::<Metric>().unwrap_err().to_string();
        assert!(err.contains("dS2") && err.contains("db"), "{err}");
    }

    #[test]
    fn from_rows_validates() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![]).unwrap().is_empty());
    }
}
