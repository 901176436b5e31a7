//! Exact minimum-cost assignment (Hungarian method with potentials) and
//! maximum bipartite matching for threshold graphs.

/// Solves the square assignment problem. Returns `row_to_col`.
///
/// Shortest-augmenting-path formulation with dual potentials, O(n³).
/// Costs must be finite.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    row_to_col
}

/// Size of a maximum matching in a bipartite graph given as left-side
/// adjacency lists over `right_len` right vertices (Kuhn's augmenting paths).
pub fn max_bipartite_matching(adjacency: &[Vec<usize>], right_len: usize) -> usize {
    let mut right_owner: Vec<Option<usize>> = vec![None; right_len];
    let mut size = 0;
    let mut visited = vec![false; right_len];
    for left in 0..adjacency.len() {
        visited.iter_mut().for_each(|v| *v = false);
        if augment(left, adjacency, &mut right_owner, &mut visited) {
            size += 1;
        }
    }
    size
}

fn augment(left: usize, adjacency: &[Vec<usize>], right_owner: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for &right in &adjacency[left] {
        if visited[right] {
            continue;
        }
        visited[right] = true;
        let free = match right_owner[right] {
            None => true,
            Some(other) => augment(other, adjacency, right_owner, visited),
        };
        if free {
            right_owner[right] = Some(left);
            return true;
        }
    }
    false
}
