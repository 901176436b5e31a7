//! Bottleneck and p-Wasserstein distances between barcodes.
//!
//! Bars are viewed as points `(birth, death)` above the diagonal. A partial
//! matching pairs some bars of one barcode with bars of the other; every
//! unmatched bar pays the distance to its diagonal projection.

mod assignment;

pub use assignment::{max_bipartite_matching, min_cost_assignment};

use crate::barcode::{Barcode, Interval};
use crate::error::{Error, Result};

/// Largest `|B| + |C|` accepted by [`matching_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 6;

/// A bar seen as a point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub x: f64,
    pub y: f64,
}

impl From<&Interval> for DiagramPoint {
    fn from(bar: &Interval) -> Self {
        DiagramPoint {
            x: bar.birth(),
            y: bar.death(),
        }
    }
}

/// Orthogonal projection onto the diagonal: both coordinates become the midpoint.
pub fn diagonal_projection(a: DiagramPoint) -> DiagramPoint {
    let mid = 0.5 * (a.x + a.y);
    DiagramPoint { x: mid, y: mid }
}

/// `‖s − t‖_p^p`, or `‖s − t‖_∞` when `p` is infinite.
fn point_cost(s: DiagramPoint, t: DiagramPoint, p: f64) -> f64 {
    let (dx, dy) = ((s.x - t.x).abs(), (s.y - t.y).abs());
    if p.is_infinite() {
        dx.max(dy)
    } else {
        dx.powf(p) + dy.powf(p)
    }
}

fn diagonal_cost(a: DiagramPoint, p: f64) -> f64 {
    point_cost(a, diagonal_projection(a), p)
}

fn points(b: &Barcode) -> Vec<DiagramPoint> {
    b.iter().map(DiagramPoint::from).collect()
}

fn check_order(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::UnsupportedExponent(p));
    }
    Ok(())
}

/// p-Wasserstein distance (`1 ≤ p < ∞`).
///
/// Solves the assignment problem on the `(n + m) × (n + m)` matrix whose
/// extra rows and columns stand for diagonal slots. The arguments are put in
/// a fixed order first, so the result is bitwise symmetric.
pub fn wasserstein(b: &Barcode, c: &Barcode, p: f64) -> Result<f64> {
    let (b, c) = if b.total_cmp(c).is_gt() { (c, b) } else { (b, c) };
    check_order(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidParameter("use bottleneck for p = ∞".to_string()));
    }
    let (bp, cp) = (points(b), points(c));
    let (n, m) = (bp.len(), cp.len());
    let size = n + m;
    if size == 0 {
        return Ok(0.0);
    }
    let mut cost = vec![vec![0.0; size]; size];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = match (i < n, j < m) {
                (true, true) => point_cost(bp[i], cp[j], p),
                (true, false) => diagonal_cost(bp[i], p),
                (false, true) => diagonal_cost(cp[j], p),
                (false, false) => 0.0,
            };
        }
    }
    let assignment = min_cost_assignment(&cost);
    let total: f64 = assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(total.powf(1.0 / p))
}

/// Bottleneck distance.
///
/// The optimum is one of the finitely many pairwise or diagonal ∞-costs, so
/// a binary search over the sorted candidates with a perfect-matching test
/// on the thresholded augmented graph is exact.
pub fn bottleneck(b: &Barcode, c: &Barcode) -> f64 {
    let (bp, cp) = (points(b), points(c));
    let (n, m) = (bp.len(), cp.len());
    if n + m == 0 {
        return 0.0;
    }
    let pair: Vec<Vec<f64>> = bp
        .iter()
        .map(|&s| cp.iter().map(|&t| point_cost(s, t, f64::INFINITY)).collect())
        .collect();
    let diag_b: Vec<f64> = bp.iter().map(|&a| diagonal_cost(a, f64::INFINITY)).collect();
    let diag_c: Vec<f64> = cp.iter().map(|&a| diagonal_cost(a, f64::INFINITY)).collect();

    let mut candidates: Vec<f64> = pair.iter().flatten().copied().collect();
    candidates.extend_from_slice(&diag_b);
    candidates.extend_from_slice(&diag_c);
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Left: B bars (0..n) then diagonal slots for C (n..n+m).
    // Right: C bars (0..m) then diagonal slots for B (m..m+n).
    let feasible = |r: f64| {
        let mut adjacency = Vec::with_capacity(n + m);
        for i in 0..n {
            let mut adj: Vec<usize> = (0..m).filter(|&j| pair[i][j] <= r).collect();
            if diag_b[i] <= r {
                adj.push(m + i);
            }
            adjacency.push(adj);
        }
        for (j, &dc) in diag_c.iter().enumerate() {
            let mut adj = Vec::with_capacity(n + 1);
            if dc <= r {
                adj.push(j);
            }
            adj.extend(m..m + n);
            adjacency.push(adj);
        }
        max_bipartite_matching(&adjacency, n + m) == n + m
    };

    // Matching every bar to the diagonal is always feasible at the largest candidate.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Optimal partial-matching cost by exhaustive enumeration.
///
/// `p` may be any value `≥ 1` including `f64::INFINITY` (bottleneck).
pub fn matching_bruteforce(b: &Barcode, c: &Barcode, p: f64) -> Result<f64> {
    check_order(p)?;
    let (bp, cp) = (points(b), points(c));
    let size = bp.len() + cp.len();
    if size > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    fn combine(p: f64, acc: f64, x: f64) -> f64 {
        if p.is_infinite() {
            acc.max(x)
        } else {
            acc + x
        }
    }

    fn search(i: usize, bp: &[DiagramPoint], cp: &[DiagramPoint], used: &mut [bool], acc: f64, p: f64, best: &mut f64) {
        if i == bp.len() {
            let rest = cp
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .fold(acc, |a, (&t, _)| combine(p, a, diagonal_cost(t, p)));
            *best = best.min(rest);
            return;
        }
        search(i + 1, bp, cp, used, combine(p, acc, diagonal_cost(bp[i], p)), p, best);
        for j in 0..cp.len() {
            if !used[j] {
                used[j] = true;
                let next = combine(p, acc, point_cost(bp[i], cp[j], p));
                search(i + 1, bp, cp, used, next, p, best);
                used[j] = false;
            }
        }
    }

    let mut best = f64::INFINITY;
    let mut used = vec![false; cp.len()];
    search(0, &bp, &cp, &mut used, 0.0, p, &mut best);
    Ok(if p.is_infinite() { best } else { best.powf(1.0 / p) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(pairs: &[(f64, f64)]) -> Barcode {
        Barcode::canonicalize(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn diagonal_projection_examples() {
        let p = diagonal_projection(DiagramPoint { x: 0.0, y: 2.0 });
        assert_eq!((p.x, p.y), (1.0, 1.0));
        let p = diagonal_projection(DiagramPoint { x: 1.0, y: 5.0 });
        assert_eq!((p.x, p.y), (3.0, 3.0));
        let eps = 1e-6;
        let p = diagonal_projection(DiagramPoint { x: 3.0, y: 3.0 + eps });
        assert!((p.x - (3.0 + eps / 2.0)).abs() < 1e-15 && p.x == p.y);
    }

    #[test]
    fn wasserstein_examples() {
        let (b, c) = (bc(&[(0.0, 2.0)]), bc(&[(0.0, 3.0)]));
        assert!((wasserstein(&b, &c, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(wasserstein(&b, &b, 1.0).unwrap(), 0.0);
        assert_eq!(wasserstein(&c, &c, 2.0).unwrap(), 0.0);
        let d = wasserstein(&b, &Barcode::empty(), 2.0).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(wasserstein(&Barcode::empty(), &Barcode::empty(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn wasserstein_rejects_small_p() {
        let b = bc(&[(0.0, 2.0)]);
        assert!(matches!(wasserstein(&b, &b, 0.5), Err(Error::UnsupportedExponent(_))));
        assert!(wasserstein(&b, &b, f64::NAN).is_err());
    }

    #[test]
    fn bottleneck_examples() {
        let (b, c) = (bc(&[(0.0, 2.0)]), bc(&[(0.0, 3.0)]));
        assert_eq!(bottleneck(&b, &c), 1.0);
        assert_eq!(bottleneck(&b, &b), 0.0);
        assert_eq!(bottleneck(&b, &Barcode::empty()), 1.0);
        assert_eq!(bottleneck(&Barcode::empty(), &Barcode::empty()), 0.0);
    }

    #[test]
    fn bruteforce_examples() {
        let (b, c) = (bc(&[(0.0, 2.0)]), bc(&[(0.0, 3.0)]));
        assert!((matching_bruteforce(&b, &c, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(matching_bruteforce(&b, &c, f64::INFINITY).unwrap(), 1.0);
        let big = bc(&[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0), (0.0, 4.0)]);
        assert!(matches!(
            matching_bruteforce(&big, &big, 1.0),
            Err(Error::TooLarge { size: 8, limit: 6 })
        ));
    }

    #[test]
    fn bottleneck_prefers_diagonal_when_cheaper() {
        // Two short bars far apart: both go to the diagonal at cost 0.5.
        let (b, c) = (bc(&[(0.0, 1.0)]), bc(&[(10.0, 11.0)]));
        assert_eq!(bottleneck(&b, &c), 0.5);
        assert_eq!(matching_bruteforce(&b, &c, f64::INFINITY).unwrap(), 0.5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn barcode(max: usize) -> impl Strategy<Value = Barcode> {
            prop::collection::vec((0.0..10.0f64, 0.01..5.0f64), 0..=max)
                .prop_map(|v| Barcode::canonicalize(v.into_iter().map(|(b, l)| (b, b + l))).unwrap())
        }

        proptest! {
            #[test]
            fn solvers_match_enumeration(b in barcode(3), c in barcode(3)) {
                let tol = 1e-9;
                prop_assert!((bottleneck(&b, &c) - matching_bruteforce(&b, &c, f64::INFINITY).unwrap()).abs() <= tol);
                for p in [1.0, 2.0, 3.5] {
                    let exact = matching_bruteforce(&b, &c, p).unwrap();
                    prop_assert!((wasserstein(&b, &c, p).unwrap() - exact).abs() <= tol);
                }
            }

            #[test]
            fn bitwise_symmetric(b in barcode(8), c in barcode(8)) {
                prop_assert_eq!(bottleneck(&b, &c), bottleneck(&c, &b));
                for p in [1.0, 2.0] {
                    prop_assert_eq!(wasserstein(&b, &c, p).unwrap(), wasserstein(&c, &b, p).unwrap());
                }
            }

            #[test]
            fn triangle_inequality(a in barcode(5), b in barcode(5), c in barcode(5)) {
                let tol = 1e-9;
                prop_assert!(bottleneck(&a, &c) <= bottleneck(&a, &b) + bottleneck(&b, &c) + tol);
                for p in [1.0, 2.0] {
                    let w = |x: &Barcode, y: &Barcode| wasserstein(x, y, p).unwrap();
                    prop_assert!(w(&a, &c) <= w(&a, &b) + w(&b, &c) + tol);
                }
            }
        }
    }
}
