use super::{check_k, ClusteringResult};
use crate::distance::DistanceMatrix;
use crate::error::Result;

/// Merge record of an average-linkage run.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub result: ClusteringResult,
    /// `(kept, absorbed, height)` per merge; clusters are named by their
    /// smallest member index.
    pub merges: Vec<(usize, usize, f64)>,
}

/// Bottom-up average-linkage clustering down to `k` clusters.
pub fn agglomerative_average(d: &DistanceMatrix, k: usize) -> Result<ClusteringResult> {
    Ok(agglomerative_average_detailed(d, k)?.result)
}

/// As [`agglomerative_average`], also returning the merge sequence.
///
/// Linkage values are maintained with the Lance–Williams update for the
/// unweighted pair-group average. Ties go to the lexicographically smallest
/// `(i, j)` pair.
pub fn agglomerative_average_detailed(d: &DistanceMatrix, k: usize) -> Result<Dendrogram> {
    let n = d.len();
    check_k(k, n)?;
    let mut link: Vec<Vec<f64>> = (0..n).map(|i| d.row(i).to_vec()).collect();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - k);

    for _ in 0..(n - k) {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                if best.is_none_or(|(_, _, b)| link[i][j] < b) {
                    best = Some((i, j, link[i][j]));
                }
            }
        }
        let (i, j, height) = best.expect("at least two active clusters");
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for m in (0..n).filter(|&m| active[m] && m != i && m != j) {
            let v = (si * link[i][m] + sj * link[j][m]) / (si + sj);
            link[i][m] = v;
            link[m][i] = v;
        }
        size[i] += size[j];
        active[j] = false;
        for o in owner.iter_mut() {
            if *o == j {
                *o = i;
            }
        }
        merges.push((i, j, height));
    }

    Ok(Dendrogram {
        result: ClusteringResult::from_raw(&owner, true),
        merges,
    })
}
