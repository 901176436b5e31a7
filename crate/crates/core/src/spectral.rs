//! Spectral barcode pseudometrics.
//!
//! A barcode `{(a_i, b_i]}` is mapped to the Gram matrix of the indicator
//! functions of its bars, whose `(i, j)` entry is the length of
//! `(a_i, b_i] ∩ (a_j, b_j]`. Dividing by the operator norm (the largest
//! eigenvalue, since the matrix is PSD and entrywise non-negative) makes the
//! spectrum invariant under rescaling the filtration. Two barcodes are then
//! compared through the ℓp distance of their descending, zero-padded spectra,
//! which for p ∈ {1, 2} is optimal over every matching of the two eigenvalue
//! sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::barcode::Barcode;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, SquareMatrix};

/// Normalized eigenvalues in `[-NEGATIVE_FLOOR, 0)` are roundoff and get clamped to zero.
pub const NEGATIVE_FLOOR: f64 = 1e-10;

/// Largest padded spectrum length accepted by [`spectral_distance_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 8;

/// Exponent of the spectral pseudometric. Only 1 and 2 are supported: for
/// these the identity matching of sorted spectra is optimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralExponent {
    One,
    Two,
}

impl SpectralExponent {
    pub fn as_f64(self) -> f64 {
        match self {
            SpectralExponent::One => 1.0,
            SpectralExponent::Two => 2.0,
        }
    }

    fn accumulate(self, diffs: impl Iterator<Item = f64>) -> f64 {
        match self {
            SpectralExponent::One => diffs.map(f64::abs).sum(),
            SpectralExponent::Two => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

impl TryFrom<f64> for SpectralExponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(SpectralExponent::One)
        } else if p == 2.0 {
            Ok(SpectralExponent::Two)
        } else {
            Err(Error::UnsupportedExponent(p))
        }
    }
}

impl fmt::Display for SpectralExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// Gram matrix of a barcode's bar indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(SquareMatrix);

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

/// Pairwise overlap lengths of the bars, in canonical bar order.
pub fn gram_matrix(barcode: &Barcode) -> GramMatrix {
    let bars = barcode.bars();
    let n = bars.len();
    let mut g = SquareMatrix::zeros(n);
    for i in 0..n {
        g.set(i, i, bars[i].length());
        for j in (i + 1)..n {
            let v = bars[i].overlap_length(&bars[j]);
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    GramMatrix(g)
}

/// Descending eigenvalues of the normalized Gram matrix.
///
/// One value is stored per bar; the infinite zero tail of the extended
/// operator is implicit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps an already sorted, non-negative sequence.
    pub fn from_descending(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "spectrum values must be finite and non-negative".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "spectrum values must be in descending order".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ℓp distance to `other` after padding the shorter spectrum with zeros.
    pub fn distance(&self, other: &Spectrum, p: SpectralExponent) -> f64 {
        let n = self.len().max(other.len());
        let at = |s: &[f64], i: usize| s.get(i).copied().unwrap_or(0.0);
        p.accumulate((0..n).map(|i| at(&self.values, i) - at(&other.values, i)))
    }
}

/// Eigenvalues of `G / ‖G‖` for the Gram matrix `G` of `barcode`.
pub fn normalized_spectrum(barcode: &Barcode) -> Result<Spectrum> {
    if barcode.is_empty() {
        return Ok(Spectrum::default());
    }
    let gram = gram_matrix(barcode);
    let raw = symmetric_eigenvalues(gram.as_matrix())?;
    let norm = raw[0];
    let mut values = Vec::with_capacity(raw.len());
    for (i, &lambda) in raw.iter().enumerate() {
        let v = if i == 0 { 1.0 } else { lambda / norm };
        if v < -NEGATIVE_FLOOR {
            return Err(Error::NotPositiveSemidefinite { value: v });
        }
        values.push(v.clamp(0.0, 1.0));
    }
    Ok(Spectrum { values })
}

/// The spectral pseudometric between two barcodes.
pub fn spectral_distance(b: &Barcode, c: &Barcode, p: SpectralExponent) -> Result<f64> {
    Ok(normalized_spectrum(b)?.distance(&normalized_spectrum(c)?, p))
}

/// Minimum over all permutations of the padded spectra, by exhaustive search.
pub fn spectral_distance_bruteforce(b: &Barcode, c: &Barcode, p: SpectralExponent) -> Result<f64> {
    let lambda = normalized_spectrum(b)?;
    let mu = normalized_spectrum(c)?;
    spectrum_distance_bruteforce(&lambda, &mu, p)
}

/// Exhaustive-matching distance between two spectra (padded length ≤ 8).
pub fn spectrum_distance_bruteforce(lambda: &Spectrum, mu: &Spectrum, p: SpectralExponent) -> Result<f64> {
    let n = lambda.len().max(mu.len());
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let pad = |s: &Spectrum| {
        let mut v = s.values().to_vec();
        v.resize(n, 0.0);
        v
    };
    let (x, y) = (pad(lambda), pad(mu));
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    for_each_permutation(&mut perm, &mut |perm| {
        let d = p.accumulate((0..n).map(|i| x[i] - y[perm[i]]));
        best = best.min(d);
    });
    Ok(best)
}

/// Heap's algorithm; visits every permutation of `items` exactly once.
fn for_each_permutation(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut counters = vec![0usize; n];
    visit(items);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            visit(items);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}
