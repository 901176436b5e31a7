//! Barcode computation for 1-D signals (sublevel-set H0) and planar point
//! clouds (Vietoris–Rips H0 and H1 over the two-element field).
//!
//! Essential classes are capped at the largest filtration value so that every
//! output is a barcode of bounded bars.

mod rips;
mod sublevel;

pub use rips::{rips_complex, rips_persistence, EssentialBar, FilteredSimplex, RipsOptions};
pub use sublevel::sublevel_h0;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled 1-D signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: Option<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: Option<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {i} is not finite")));
        }
        if let Some(rate) = sample_rate {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "sample rate must be positive, got {rate}"
                )));
            }
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> Option<f64> {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds, when the sample rate is known.
    pub fn duration(&self) -> Option<f64> {
        self.sample_rate.map(|r| self.samples.len() as f64 / r)
    }
}

/// A non-empty set of points in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<[f64; 2]>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("point cloud is empty".into()));
        }
        if let Some(i) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.points[i], self.points[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidParameter(format!("point index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }
}

/// Disjoint sets with path halving; roots carry no payload.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Makes `child`'s root point at `root`. Both must be roots.
    pub(crate) fn attach(&mut self, child: usize, root: usize) {
        self.parent[child] = root;
    }
}
