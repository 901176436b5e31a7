use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{PointCloud, UnionFind};
use crate::barcode::Barcode;
use crate::error::{Error, Result};

/// A simplex of the Rips filtration with its entry value.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub vertices: Vec<usize>,
    pub filtration_value: f64,
}

impl FilteredSimplex {
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// What to do with the one H0 class that never dies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EssentialBar {
    /// Emit `(0, diameter]`.
    #[default]
    Cap,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipsOptions {
    /// H1 is refused above this many points (triangle count grows cubically).
    pub h1_vertex_cap: usize,
    pub essential: EssentialBar,
}

impl Default for RipsOptions {
    fn default() -> Self {
        Self {
            h1_vertex_cap: 150,
            essential: EssentialBar::Cap,
        }
    }
}

/// Every simplex of dimension `≤ max_dim` whose diameter is `≤ threshold`,
/// sorted by `(value, dimension, vertices)`.
pub fn rips_complex(cloud: &PointCloud, max_dim: usize, threshold: f64) -> Result<Vec<FilteredSimplex>> {
    if !(1..=2).contains(&max_dim) {
        return Err(Error::InvalidParameter(format!(
            "Rips complexes are built up to dimension 1 or 2, got {max_dim}"
        )));
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold must be non-negative, got {threshold}"
        )));
    }
    let n = cloud.len();
    let mut out: Vec<FilteredSimplex> = (0..n)
        .map(|i| FilteredSimplex {
            vertices: vec![i],
            filtration_value: 0.0,
        })
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = cloud.distance(i, j);
            if d <= threshold {
                out.push(FilteredSimplex {
                    vertices: vec![i, j],
                    filtration_value: d,
                });
            }
        }
    }
    if max_dim == 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let d = cloud.distance(i, j).max(cloud.distance(i, k)).max(cloud.distance(j, k));
                    if d <= threshold {
                        out.push(FilteredSimplex {
                            vertices: vec![i, j, k],
                            filtration_value: d,
                        });
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.filtration_value
            .total_cmp(&b.filtration_value)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
    Ok(out)
}

/// Persistence barcode of the Rips filtration in dimension 0 or 1.
///
/// The filtration runs up to the diameter of the cloud, where the complex is
/// a full simplex, so every H1 class dies.
pub fn rips_persistence(cloud: &PointCloud, dim: usize, options: &RipsOptions) -> Result<Barcode> {
    match dim {
        0 => Ok(h0(cloud, &sorted_edges(cloud), options.essential)?),
        1 => {
            if cloud.len() > options.h1_vertex_cap {
                return Err(Error::TooManyPoints {
                    points: cloud.len(),
                    cap: options.h1_vertex_cap,
                });
            }
            h1(cloud)
        }
        _ => Err(Error::InvalidParameter(format!(
            "only dimensions 0 and 1 are supported, got {dim}"
        ))),
    }
}

#[derive(Clone, Copy)]
struct Edge {
    value: f64,
    a: u32,
    b: u32,
}

fn sorted_edges(cloud: &PointCloud) -> Vec<Edge> {
    let n = cloud.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(Edge {
                value: cloud.distance(i, j),
                a: i as u32,
                b: j as u32,
            });
        }
    }
    edges.sort_by(|x, y| x.value.total_cmp(&y.value).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));
    edges
}

/// Kruskal merges. All vertices are born at 0, so the elder rule only decides
/// which root survives, never a bar's endpoints.
fn h0(cloud: &PointCloud, edges: &[Edge], essential: EssentialBar) -> Result<Barcode> {
    let n = cloud.len();
    let mut uf = UnionFind::new(n);
    let mut bars = Vec::with_capacity(n);
    for e in edges {
        let (ra, rb) = (uf.find(e.a as usize), uf.find(e.b as usize));
        if ra != rb {
            let (elder, younger) = (ra.min(rb), ra.max(rb));
            uf.attach(younger, elder);
            bars.push((0.0, e.value));
        }
    }
    if essential == EssentialBar::Cap {
        let diameter = edges.last().map_or(0.0, |e| e.value);
        bars.push((0.0, diameter));
    }
    Barcode::canonicalize(bars)
}

/// Reduction of the edge coboundary matrix over Z/2.
///
/// Edges are processed from last to first; each column is the set of
/// triangles containing the edge and its pivot is the earliest of them.
/// Spanning-tree edges kill H0 classes and can never be paired with a
/// triangle, so their columns are skipped. Only columns that needed an
/// addition are stored; the others are regenerated on demand.
fn h1(cloud: &PointCloud) -> Result<Barcode> {
    let n = cloud.len();
    if n < 3 {
        return Ok(Barcode::empty());
    }
    let edges = sorted_edges(cloud);
    let mut edge_index = vec![0u32; n * n];
    for (k, e) in edges.iter().enumerate() {
        edge_index[e.a as usize * n + e.b as usize] = k as u32;
        edge_index[e.b as usize * n + e.a as usize] = k as u32;
    }

    let mut tree_edge = vec![false; edges.len()];
    let mut uf = UnionFind::new(n);
    for (k, e) in edges.iter().enumerate() {
        let (ra, rb) = (uf.find(e.a as usize), uf.find(e.b as usize));
        if ra != rb {
            uf.attach(ra.max(rb), ra.min(rb));
            tree_edge[k] = true;
        }
    }

    let coboundary = |k: usize| -> Vec<TriangleKey> {
        let Edge { a, b, .. } = edges[k];
        let (a, b) = (a as usize, b as usize);
        let mut col: Vec<TriangleKey> = (0..n)
            .filter(|&w| w != a && w != b)
            .map(|w| triangle_key(k as u32, edge_index[a * n + w], edge_index[b * n + w]))
            .collect();
        col.sort_unstable();
        col
    };

    let mut owner: HashMap<TriangleKey, u32> = HashMap::new();
    let mut stored: HashMap<u32, Vec<TriangleKey>> = HashMap::new();
    let mut bars = Vec::new();
    let mut scratch = Vec::new();
    for k in (0..edges.len()).rev() {
        if tree_edge[k] {
            continue;
        }
        let mut column = coboundary(k);
        let mut reduced = false;
        while let Some(&pivot) = column.first() {
            match owner.get(&pivot) {
                Some(&other) => {
                    let regenerated;
                    let other_column = match stored.get(&other) {
                        Some(c) => c,
                        None => {
                            regenerated = coboundary(other as usize);
                            &regenerated
                        }
                    };
                    symmetric_difference(&column, other_column, &mut scratch);
                    std::mem::swap(&mut column, &mut scratch);
                    reduced = true;
                }
                None => {
                    owner.insert(pivot, k as u32);
                    let death = edges[(pivot >> 64) as usize].value;
                    bars.push((edges[k].value, death));
                    break;
                }
            }
        }
        if reduced && !column.is_empty() {
            stored.insert(k as u32, column);
        }
    }
    Barcode::canonicalize(bars)
}

/// Edge indices of a triangle, largest first, packed so that integer order
/// is lexicographic order. The filtration value is that of the largest.
type TriangleKey = u128;

fn triangle_key(x: u32, y: u32, z: u32) -> TriangleKey {
    let mut t = [x, y, z];
    t.sort_unstable();
    ((t[2] as u128) << 64) | ((t[1] as u128) << 32) | t[0] as u128
}

/// Sorted-merge XOR of two ascending lists.
fn symmetric_difference<T: Ord + Copy>(a: &[T], b: &[T], out: &mut Vec<T>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
