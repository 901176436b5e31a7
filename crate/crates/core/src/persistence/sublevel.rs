use super::{Signal, UnionFind};
use crate::barcode::Barcode;
use crate::error::Result;

/// H0 barcode of the sublevel-set filtration of a signal on its path graph.
///
/// Samples enter in `(value, index)` order. A sample with no earlier neighbour
/// starts a component; one that joins two components kills the younger one
/// (later in the same order) with bar `(birth, value]`. The surviving
/// component's bar is capped at the signal maximum. A constant signal yields
/// the empty barcode.
pub fn sublevel_h0(signal: &Signal) -> Result<Barcode> {
    let f = signal.samples();
    let n = f.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut uf = UnionFind::new(n);
    // Root -> sample index where the component was born (its oldest sample).
    let mut birth_of = vec![usize::MAX; n];
    let mut bars = Vec::new();

    for &v in &order {
        birth_of[v] = v;
        let neighbours = [v.checked_sub(1), (v + 1 < n).then_some(v + 1)];
        for u in neighbours.into_iter().flatten() {
            if rank[u] > rank[v] {
                continue;
            }
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                continue;
            }
            let (bu, bv) = (birth_of[ru], birth_of[rv]);
            let (elder, younger) = if rank[bu] < rank[bv] { (ru, rv) } else { (rv, ru) };
            // v itself is a fresh singleton the first time it touches a component;
            // absorbing it is not a death.
            if birth_of[younger] != v {
                bars.push((f[birth_of[younger]], f[v]));
            }
            uf.attach(younger, elder);
        }
    }

    let global_min = f[order[0]];
    let global_max = f[order[n - 1]];
    bars.push((global_min, global_max));
    Barcode::canonicalize(bars)
}
