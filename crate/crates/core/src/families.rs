//! Witness graph families.

use crate::bigraph::{low_mask, BipartiteGraph};
use crate::error::{precondition, Result};

/// The leafless graph `G_{r,m}` on `(m+1) + (m+1)` vertices with
/// ind-match = ord-match = `r` and min-match = `m`.
///
/// With 1-based labels: `y_j ~ {x_1, x_{j+1}}` for `j < r`,
/// `y_j ~ {x_1} ∪ {x_{r+1}, …, x_{m+1}}` for `r ≤ j ≤ m`, and `y_{m+1} ~ X`.
pub fn build_grm(r: usize, m: usize) -> Result<BipartiteGraph> {
    if r < 2 || r > m {
        return Err(precondition(format!(
            "G_(r,m) needs 2 <= r <= m, got r={r} m={m}"
        )));
    }
    let size = m + 1;
    // 0-based: x_1 is bit 0, x_{r+1}..x_{m+1} are bits r..=m
    let tail = low_mask(size) & !low_mask(r);
    let adj = (0..size)
        .map(|j| match j {
            j if j < r - 1 => 1 | 1 << (j + 1),
            j if j < m => 1 | tail,
            _ => low_mask(size),
        })
        .collect();
    BipartiteGraph::from_adjacency(size, adj)
}

/// A 4-cycle `w x y z` with a path of `2k − 3` edges hanging from `w`.
///
/// Sides follow the parity of the distance from `w`. X lists `w, y` and then
/// the even path vertices `p_2, p_4, …`; Y lists `x, z` and then the odd path
/// vertices `p_1, p_3, …`.
pub fn build_cycle_path(k: usize) -> Result<BipartiteGraph> {
    if k < 3 {
        return Err(precondition(format!(
            "cycle-with-path needs k >= 3, got {k}"
        )));
    }
    let path_len = 2 * k - 3;
    // X: 0 = w, 1 = y, 1 + i/2 = p_i (i even, i >= 2)
    // Y: 0 = x, 1 = z, 2 + (i-1)/2 = p_i (i odd)
    let x_of = |i: usize| if i == 0 { 0 } else { 1 + i / 2 };
    let y_of = |i: usize| 2 + (i - 1) / 2;
    let mut edges = vec![(0, 0), (1, 0), (1, 1), (0, 1)];
    for i in 0..path_len {
        let (a, b) = (i, i + 1);
        let edge = if a % 2 == 0 {
            (x_of(a), y_of(b))
        } else {
            (x_of(b), y_of(a))
        };
        edges.push(edge);
    }
    BipartiteGraph::from_edge_list(k, k + 1, &edges)
}
