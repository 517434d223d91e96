use std::collections::HashMap;

use crate::error::OracleError;
use crate::graph::Graph;

/// Largest `q^n` that enumeration accepts for graphs with more than 8 vertices.
pub const ENUMERATION_LIMIT: f64 = 1e7;

fn check_budget(g: &Graph, q: usize) -> Result<(), OracleError> {
    let estimate = (q as f64).powi(g.n() as i32);
    if g.n() > 8 && estimate > ENUMERATION_LIMIT {
        return Err(OracleError::EnumerationBudget {
            estimate,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Every proper `q`-coloring, in lexicographic order, by backtracking.
pub fn enumerate_colorings(g: &Graph, q: usize) -> Result<Vec<Vec<usize>>, OracleError> {
    check_budget(g, q)?;
    let mut out = Vec::new();
    let mut current = vec![0; g.n()];
    extend(g, q, 0, &mut current, &mut |c| out.push(c.to_vec()));
    Ok(out)
}

/// Number of proper `q`-colorings, without storing them.
pub fn count_colorings(g: &Graph, q: usize) -> Result<u64, OracleError> {
    check_budget(g, q)?;
    let mut count = 0u64;
    let mut current = vec![0; g.n()];
    extend(g, q, 0, &mut current, &mut |_| count += 1);
    Ok(count)
}

fn extend(g: &Graph, q: usize, v: usize, current: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if v == g.n() {
        emit(current);
        return;
    }
    for c in 0..q {
        if g.neighbors(v).iter().all(|&u| u > v || current[u] != c) {
            current[v] = c;
            extend(g, q, v + 1, current, emit);
        }
    }
}

/// Position of each coloring in an enumerated universe.
pub struct ColoringIndex {
    index: HashMap<Vec<usize>, usize>,
}

impl ColoringIndex {
    pub fn new(universe: &[Vec<usize>]) -> Self {
        Self {
            index: universe
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), i))
                .collect(),
        }
    }

    pub fn get(&self, coloring: &[usize]) -> Option<usize> {
        self.index.get(coloring).copied()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }
}

/// Chromatic polynomial of `K_n`: `q (q-1) .. (q-n+1)`.
pub fn complete_graph_colorings(n: usize, q: usize) -> u64 {
    (0..n).map(|i| q.saturating_sub(i) as u64).product()
}

/// Chromatic polynomial of the cycle `C_n`: `(q-1)^n + (-1)^n (q-1)`.
pub fn cycle_colorings(n: usize, q: usize) -> u64 {
    let base = (q as i128 - 1).pow(n as u32);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    (base + sign * (q as i128 - 1)) as u64
}

/// Chromatic polynomial of any tree on `n` vertices: `q (q-1)^(n-1)`.
pub fn tree_colorings(n: usize, q: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    q as u64 * (q as u64 - 1).pow(n as u32 - 1)
}
