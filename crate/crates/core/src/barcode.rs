//! Bars, barcodes and the interval overlap that every pseudometric builds on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bars whose length does not exceed this are treated as degenerate and dropped.
pub const BAR_EPSILON: f64 = 1e-12;

/// A half-open bar `(birth, death]` with finite endpoints and `birth < death`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    birth: f64,
    death: f64,
}

impl Interval {
    /// Builds a bar, rejecting non-finite or non-increasing endpoints.
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() || !death.is_finite() {
            return Err(Error::NonFiniteEndpoint { index: 0, birth, death });
        }
        if birth >= death {
            return Err(Error::InvalidParameter(format!(
                "bar ({birth}, {death}] has death <= birth"
            )));
        }
        Ok(Self { birth, death })
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    /// Lebesgue measure of the intersection of two bars.
    ///
    /// Endpoint conventions do not matter here: the measure of
    /// `(a, b] ∩ (c, d]` equals that of the closed intervals.
    pub fn overlap_length(&self, other: &Interval) -> f64 {
        (self.death.min(other.death) - self.birth.max(other.birth)).max(0.0)
    }

    fn total_cmp(&self, other: &Interval) -> std::cmp::Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.birth, self.death)
    }
}

/// Free-function form of [`Interval::overlap_length`].
pub fn overlap_length(a: &Interval, b: &Interval) -> f64 {
    a.overlap_length(b)
}

/// A finite multiset of bounded bars, stored in canonical `(birth, death)` order.
///
/// The only way to build one is through [`Barcode::canonicalize`] (or
/// [`Barcode::empty`]), so every value is sorted and free of degenerate bars.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Barcode {
    bars: Vec<Interval>,
}

impl Barcode {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a barcode from raw `(birth, death)` pairs.
    ///
    /// Pairs with `death <= birth + BAR_EPSILON` are dropped, the rest are
    /// sorted by `(birth, death)`. Duplicates are kept. A non-finite endpoint
    /// is rejected with the index of the offending pair.
    pub fn canonicalize<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut bars = Vec::new();
        for (index, (birth, death)) in pairs.into_iter().enumerate() {
            if !birth.is_finite() || !death.is_finite() {
                return Err(Error::NonFiniteEndpoint { index, birth, death });
            }
            if death > birth + BAR_EPSILON {
                bars.push(Interval { birth, death });
            }
        }
        bars.sort_by(Interval::total_cmp);
        Ok(Self { bars })
    }

    pub fn bars(&self) -> &[Interval] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.bars.iter()
    }

    /// A total order on barcodes: by length, then bar by bar.
    pub fn total_cmp(&self, other: &Barcode) -> std::cmp::Ordering {
        self.bars.len().cmp(&other.bars.len()).then_with(|| {
            self.bars
                .iter()
                .zip(&other.bars)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// Raw `(birth, death)` pairs in canonical order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.bars.iter().map(|b| (b.birth, b.death)).collect()
    }

    /// Multiplies every endpoint by `factor` (which must be positive).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Self::canonicalize(self.bars.iter().map(|b| (b.birth * factor, b.death * factor)))
    }

    /// Adds `offset` to every endpoint.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::canonicalize(self.bars.iter().map(|b| (b.birth + offset, b.death + offset)))
    }

    /// Multiset union.
    pub fn union(&self, other: &Barcode) -> Barcode {
        let mut bars = self.bars.clone();
        bars.extend_from_slice(&other.bars);
        bars.sort_by(Interval::total_cmp);
        Barcode { bars }
    }
}

impl<'a> IntoIterator for &'a Barcode {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.bars.iter()
    }
}
