use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A minimum-cost partial bijection between rows (generated) and columns (human).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPairs {
    /// `(row, column)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// Optimal assignment of size `min(m, n)` for an `m × n` cost matrix.
///
/// Among optimal assignments the lexicographically smallest pair list is returned.
pub fn hungarian_match(cost: &[Vec<f64>]) -> Result<MatchedPairs> {
    let m = cost.len();
    if m == 0 {
        return Err(Error::contract("cost matrix has no rows"));
    }
    let n = cost[0].len();
    if n == 0 {
        return Err(Error::contract("cost matrix has no columns"));
    }
    if cost.iter().any(|r| r.len() != n) {
        return Err(Error::contract("cost matrix rows have different lengths"));
    }
    if cost.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::contract("cost matrix entries must be finite"));
    }

    let rows: Vec<usize> = (0..m).collect();
    let cols: Vec<usize> = (0..n).collect();
    let optimum = min_cost(cost, &rows, &cols);
    let tol = 1e-9 * optimum.abs().max(1.0);

    // Fix pairs greedily in row order, keeping any choice that still admits an optimum.
    let size = m.min(n);
    let mut pairs = Vec::with_capacity(size);
    let mut spent = 0.0;
    let mut free_cols = cols;
    for (pos, &r) in rows.iter().enumerate() {
        let need = size - pairs.len();
        if need == 0 {
            break;
        }
        let rest_rows = &rows[pos + 1..];
        let mut chosen = None;
        for (ci, &c) in free_cols.iter().enumerate() {
            let mut rest_cols = free_cols.clone();
            rest_cols.remove(ci);
            if rest_rows.len().min(rest_cols.len()) < need - 1 {
                continue;
            }
            let completion = if need == 1 {
                0.0
            } else {
                min_cost(cost, rest_rows, &rest_cols)
            };
            if (spent + cost[r][c] + completion - optimum).abs() <= tol {
                chosen = Some(ci);
                break;
            }
        }
        match chosen {
            Some(ci) => {
                let c = free_cols.remove(ci);
                spent += cost[r][c];
                pairs.push((r, c));
            }
            // only reachable when rows outnumber columns: leave this row unmatched
            None => continue,
        }
    }
    let total_cost = pairs.iter().map(|&(r, c)| cost[r][c]).sum();
    Ok(MatchedPairs { pairs, total_cost })
}

/// Minimum assignment cost over the sub-matrix `rows × cols` (size `min` of the two).
fn min_cost(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    if rows.len() <= cols.len() {
        let sub: Vec<Vec<f64>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| cost[r][c]).collect())
            .collect();
        solve(&sub).1
    } else {
        let sub: Vec<Vec<f64>> = cols
            .iter()
            .map(|&c| rows.iter().map(|&r| cost[r][c]).collect())
            .collect();
        solve(&sub).1
    }
}

/// Shortest-augmenting-path Hungarian method with potentials, `rows ≤ cols`.
/// Returns the column assigned to each row and the total cost.
fn solve(a: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = a.len();
    let m = a[0].len();
    debug_assert!(n <= m);
    let inf = f64::INFINITY;
    // 1-based arrays: index 0 is the virtual row/column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    let total = assign.iter().enumerate().map(|(i, &j)| a[i][j]).sum();
    (assign, total)
}
