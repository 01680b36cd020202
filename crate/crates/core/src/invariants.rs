//! Matching numbers and the unmixed predicate by direct search.
//!
//! These routines never look at neighborhood profiles; they are the ground
//! truth the profile-based formulas are checked against.

use std::collections::HashMap;

use serde::Serialize;

use crate::bigraph::{bits, low_mask, BipartiteGraph};
use crate::error::{check_limit, Result};

pub const MATCHING_SEARCH_EDGE_LIMIT: usize = 40;
pub const ORDERED_SEARCH_EDGE_LIMIT: usize = 30;
pub const UNMIXED_VERTEX_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    #[serde(rename = "match")]
    pub matching: usize,
    pub min_match: usize,
    pub ind_match: usize,
    pub ord_match: usize,
    pub connected: bool,
    pub has_leaf: bool,
    pub unmixed: bool,
}

/// Maximum matching size by augmenting paths.
pub fn matching_number(g: &BipartiteGraph) -> usize {
    fn augment(y: usize, adj: &[u64], mate_of_x: &mut [Option<usize>], visited: &mut u64) -> bool {
        for x in bits(adj[y] & !*visited) {
            *visited |= 1 << x;
            let free = match mate_of_x[x] {
                None => true,
                Some(other) => augment(other, adj, mate_of_x, visited),
            };
            if free {
                mate_of_x[x] = Some(y);
                return true;
            }
        }
        false
    }

    let adj = g.adjacency();
    let mut mate_of_x = vec![None; g.m()];
    (0..g.n())
        .filter(|&y| {
            let mut visited = 0u64;
            augment(y, adj, &mut mate_of_x, &mut visited)
        })
        .count()
}

/// Minimum size of a maximal matching.
///
/// Recurses on the lexicographically first edge whose endpoints are both
/// free: every maximal matching extending the current one must cover one
/// of its two endpoints, so branching over the edges at those endpoints
/// visits every maximal matching.
pub fn min_matching_number(g: &BipartiteGraph) -> Result<usize> {
    check_limit("min-match edge", g.edge_count(), MATCHING_SEARCH_EDGE_LIMIT)?;

    struct Search<'a> {
        adj: &'a [u64],
        xn: Vec<u64>,
        best: usize,
    }

    impl Search<'_> {
        fn run(&mut self, free_x: u64, free_y: u64, size: usize) {
            if size >= self.best {
                return;
            }
            let open = bits(free_x).find_map(|x| {
                let ys = self.xn[x] & free_y;
                (ys != 0).then(|| (x, ys.trailing_zeros() as usize))
            });
            let Some((x, y)) = open else {
                self.best = size;
                return;
            };
            for y2 in bits(self.xn[x] & free_y) {
                self.run(free_x & !(1 << x), free_y & !(1 << y2), size + 1);
            }
            for x2 in bits(self.adj[y] & free_x & !(1 << x)) {
                self.run(free_x & !(1 << x2), free_y & !(1 << y), size + 1);
            }
        }
    }

    let mut s = Search {
        adj: g.adjacency(),
        xn: g.x_neighborhoods(),
        best: usize::MAX,
    };
    s.run(low_mask(g.m()), low_mask(g.n()), 0);
    Ok(s.best)
}

/// Maximum induced matching by branch and bound.
///
/// Branches on the lowest Y-vertex that still has an admissible neighbor:
/// either it is matched to one of those neighbors (X-vertices in its lowest
/// index first) or it is left out. Choosing `xy` bans every X-neighbor of
/// `y` and every Y-neighbor of `x` from the rest of the matching.
pub fn induced_matching_number(g: &BipartiteGraph) -> Result<usize> {
    check_limit("ind-match edge", g.edge_count(), MATCHING_SEARCH_EDGE_LIMIT)?;

    struct Search<'a> {
        adj: &'a [u64],
        xn: Vec<u64>,
        best: usize,
    }

    impl Search<'_> {
        fn run(&mut self, ok_x: u64, ok_y: u64, size: usize) {
            let live_y = bits(ok_y).filter(|&y| self.adj[y] & ok_x != 0);
            let (mut first, mut live) = (None, 0u32);
            for y in live_y {
                first.get_or_insert(y);
                live += 1;
            }
            let Some(y) = first else {
                self.best = self.best.max(size);
                return;
            };
            if size + (live.min(ok_x.count_ones()) as usize) <= self.best {
                return;
            }
            for x in bits(self.adj[y] & ok_x) {
                self.run(ok_x & !self.adj[y], ok_y & !self.xn[x], size + 1);
            }
            self.run(ok_x, ok_y & !(1 << y), size);
        }
    }

    let mut s = Search {
        adj: g.adjacency(),
        xn: g.x_neighborhoods(),
        best: 0,
    };
    s.run(low_mask(g.m()), low_mask(g.n()), 0);
    Ok(s.best)
}

/// Maximum ordered matching, trying both sides as the side of first endpoints.
///
/// A sequence `a_1 b_1, …, a_r b_r` is extended by `a b` when `a` and `b`
/// are unused, `ab` is an edge, and `a` is adjacent to no earlier `b_j`.
/// The first endpoints all lie in one part, so they are automatically
/// independent. What an extension may add depends only on the used
/// vertex sets, which is the memo key.
pub fn ordered_matching_number(g: &BipartiteGraph) -> Result<usize> {
    check_limit("ord-match edge", g.edge_count(), ORDERED_SEARCH_EDGE_LIMIT)?;
    let xn = g.x_neighborhoods();
    let from_x = longest_ordered(&xn, g.adjacency());
    let from_y = longest_ordered(g.adjacency(), &xn);
    Ok(from_x.max(from_y))
}

/// `first[a]`: second-side neighbors of first-side vertex `a`; `second[b]` the converse.
fn longest_ordered(first: &[u64], second: &[u64]) -> usize {
    fn extend(
        first: &[u64],
        second: &[u64],
        used_a: u64,
        used_b: u64,
        memo: &mut HashMap<(u64, u64), usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&(used_a, used_b)) {
            return v;
        }
        let blocked = bits(used_b).fold(0u64, |acc, b| acc | second[b]);
        let mut best = 0;
        for a in (0..first.len()).filter(|&a| (used_a | blocked) >> a & 1 == 0) {
            for b in bits(first[a] & !used_b) {
                let r = 1 + extend(first, second, used_a | 1 << a, used_b | 1 << b, memo);
                best = best.max(r);
            }
        }
        memo.insert((used_a, used_b), best);
        best
    }
    extend(first, second, 0, 0, &mut HashMap::new())
}

/// Whether all maximal independent sets have the same size.
///
/// A maximal independent set is `A ⊔ B` with `A` in the smaller part and
/// `B` = everything on the other side not adjacent to `A`, subject to `A`
/// being exactly the vertices not adjacent to `B`. All `2^min(m,n)` choices
/// of `A` are enumerated.
pub fn is_unmixed(g: &BipartiteGraph) -> Result<bool> {
    check_limit("unmixed vertex", g.m() + g.n(), UNMIXED_VERTEX_LIMIT)?;
    let (small_nbrs, large_nbrs, small, large) = if g.m() <= g.n() {
        (g.x_neighborhoods(), g.adjacency().to_vec(), g.m(), g.n())
    } else {
        (g.adjacency().to_vec(), g.x_neighborhoods(), g.n(), g.m())
    };
    let full_small = low_mask(small);
    let full_large = low_mask(large);
    let mut nbr_of = vec![0u64; 1 << small];
    let mut size = None;
    for a in 0..1u64 << small {
        if a != 0 {
            let low = a.trailing_zeros() as usize;
            nbr_of[a as usize] = nbr_of[(a & (a - 1)) as usize] | small_nbrs[low];
        }
        let b = full_large & !nbr_of[a as usize];
        let closure = full_small & !bits(b).fold(0u64, |acc, v| acc | large_nbrs[v]);
        if closure != a {
            continue;
        }
        let card = (a.count_ones() + b.count_ones()) as usize;
        match size {
            None => size = Some(card),
            Some(s) if s != card => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// All four matching numbers plus connectivity, leaf and unmixed flags.
pub fn invariant_report(g: &BipartiteGraph) -> Result<InvariantReport> {
    let report = InvariantReport {
        matching: matching_number(g),
        min_match: min_matching_number(g)?,
        ind_match: induced_matching_number(g)?,
        ord_match: ordered_matching_number(g)?,
        connected: g.is_connected(),
        has_leaf: g.structural_flags().has_leaf,
        unmixed: is_unmixed(g)?,
    };
    assert!(
        report.ind_match <= report.ord_match
            && report.ord_match <= report.matching
            && report.ind_match <= report.min_match
            && report.min_match <= report.matching,
        "matching-number chain violated: {report:?}"
    );
    Ok(report)
}
