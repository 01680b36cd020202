//! Bipartite graphs on a labeled bipartition `X ⊔ Y`.
//!
//! A graph stores, for every Y-vertex, the bitmask of its X-neighbors. All
//! other views (X-neighborhoods, edge lists, the bipartite complement) are
//! derived from that single array.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{check_limit, precondition, Error, Result};

/// Largest supported part size; neighborhoods fit one `u64`.
pub const MAX_PART: usize = 64;

/// Largest X-side for which [`canonical_form`] minimizes over all of `S_m`.
pub const CANONICAL_LIMIT: usize = 8;

/// Mask with the lowest `k` bits set.
#[inline]
pub fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BipartiteGraph {
    m: usize,
    n: usize,
    adj: Vec<u64>,
}

impl BipartiteGraph {
    /// Graph with parts of size `m` and `n` and no edges.
    pub fn empty(m: usize, n: usize) -> Result<Self> {
        check_part('x', m)?;
        check_part('y', n)?;
        Ok(Self {
            m,
            n,
            adj: vec![0; n],
        })
    }

    /// Builds a graph from 0-based `(x, y)` pairs. Duplicate edges collapse.
    pub fn from_edge_list(m: usize, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(m, n)?;
        for &(x, y) in edges {
            if x >= m {
                return Err(Error::IndexOutOfRange {
                    side: 'x',
                    index: x,
                    size: m,
                });
            }
            if y >= n {
                return Err(Error::IndexOutOfRange {
                    side: 'y',
                    index: y,
                    size: n,
                });
            }
            g.adj[y] |= 1 << x;
        }
        Ok(g)
    }

    /// Builds a graph from the X-neighborhood mask of every Y-vertex.
    pub fn from_adjacency(m: usize, adj: Vec<u64>) -> Result<Self> {
        check_part('x', m)?;
        check_part('y', adj.len())?;
        let full = low_mask(m);
        if let Some(&bad) = adj.iter().find(|&&a| a & !full != 0) {
            return Err(Error::MaskOutOfRange { mask: bad, m });
        }
        Ok(Self {
            m,
            n: adj.len(),
            adj,
        })
    }

    pub fn complete(m: usize, n: usize) -> Result<Self> {
        Self::from_adjacency(m, vec![low_mask(m); n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// X-neighborhood of every Y-vertex.
    pub fn adjacency(&self) -> &[u64] {
        &self.adj
    }

    pub fn y_neighborhood(&self, y: usize) -> u64 {
        self.adj[y]
    }

    /// Y-neighborhood of every X-vertex (the transpose of [`adjacency`](Self::adjacency)).
    pub fn x_neighborhoods(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.m];
        for (y, &mask) in self.adj.iter().enumerate() {
            for x in bits(mask) {
                out[x] |= 1 << y;
            }
        }
        out
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[y] >> x & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum()
    }

    /// Edges as 0-based `(x, y)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let xn = self.x_neighborhoods();
        xn.iter()
            .enumerate()
            .flat_map(|(x, &ys)| bits(ys).map(move |y| (x, y)))
            .collect()
    }

    /// The same graph with the roles of X and Y exchanged.
    pub fn transpose(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            adj: self.x_neighborhoods(),
        }
    }

    pub fn bipartite_complement(&self) -> Self {
        let full = low_mask(self.m);
        Self {
            m: self.m,
            n: self.n,
            adj: self.adj.iter().map(|a| !a & full).collect(),
        }
    }

    /// Applies `x ↦ x_perm[x]` and `y ↦ y_perm[y]`.
    pub fn relabel(&self, x_perm: &[usize], y_perm: &[usize]) -> Result<Self> {
        if !is_permutation(x_perm, self.m) || !is_permutation(y_perm, self.n) {
            return Err(precondition("relabel needs permutations of both parts"));
        }
        let mut adj = vec![0u64; self.n];
        for (y, &mask) in self.adj.iter().enumerate() {
            adj[y_perm[y]] = permute_mask(mask, x_perm);
        }
        Ok(Self {
            m: self.m,
            n: self.n,
            adj,
        })
    }

    pub fn is_connected(&self) -> bool {
        let full = low_mask(self.m);
        let mut reached = 1u64;
        let mut seen_y = vec![false; self.n];
        loop {
            let mut grew = false;
            for (y, &mask) in self.adj.iter().enumerate() {
                if !seen_y[y] && mask & reached != 0 {
                    seen_y[y] = true;
                    if mask & !reached != 0 {
                        reached |= mask;
                    }
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        reached == full && seen_y.iter().all(|&s| s)
    }

    pub fn structural_flags(&self) -> StructuralFlags {
        let x_degrees: Vec<usize> = self
            .x_neighborhoods()
            .iter()
            .map(|m| m.count_ones() as usize)
            .collect();
        let y_degrees: Vec<usize> = self.adj.iter().map(|m| m.count_ones() as usize).collect();
        let any = |d: usize| x_degrees.contains(&d) || y_degrees.contains(&d);
        StructuralFlags {
            has_leaf: any(1),
            has_isolated: any(0),
            x_degrees,
            y_degrees,
        }
    }

    /// First isolated vertex, X-side before Y-side.
    pub fn isolated_vertex(&self) -> Option<(char, usize)> {
        let xn = self.x_neighborhoods();
        if let Some(x) = xn.iter().position(|&m| m == 0) {
            return Some(('x', x));
        }
        self.adj.iter().position(|&m| m == 0).map(|y| ('y', y))
    }

    pub(crate) fn require_no_isolated(&self) -> Result<()> {
        match self.isolated_vertex() {
            Some((side, index)) => Err(Error::IsolatedVertex { side, index }),
            None => Ok(()),
        }
    }

    /// Serializes to the 1-indexed text format: `m n` then one `i j` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.m, self.n);
        for (x, y) in self.edges() {
            s.push_str(&format!("{} {}\n", x + 1, y + 1));
        }
        s
    }
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for BipartiteGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |reason: String| Error::Parse {
                line: lineno + 1,
                reason,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!("expected two integers, got {line:?}")));
            }
            let a: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("not an integer: {:?}", fields[0])))?;
            let b: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("not an integer: {:?}", fields[1])))?;
            match header {
                None => header = Some((a, b)),
                Some((m, n)) => {
                    if a == 0 || a > m || b == 0 || b > n {
                        return Err(parse_err(format!("edge {a} {b} outside 1..={m} x 1..={n}")));
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
        let (m, n) = header.ok_or_else(|| Error::Parse {
            line: 0,
            reason: "missing \"m n\" header".into(),
        })?;
        Self::from_edge_list(m, n, &edges)
    }
}

fn check_part(side: char, size: usize) -> Result<()> {
    if size == 0 || size > MAX_PART {
        Err(Error::PartSize {
            side,
            size,
            max: MAX_PART,
        })
    } else {
        Ok(())
    }
}

fn is_permutation(p: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k];
    p.len() == k
        && p.iter()
            .all(|&i| i < k && !std::mem::replace(&mut seen[i], true))
}

/// Image of `mask` under `x ↦ perm[x]`.
#[inline]
pub fn permute_mask(mask: u64, perm: &[usize]) -> u64 {
    bits(mask).fold(0, |acc, x| acc | 1 << perm[x])
}

/// Whether isomorphisms may exchange X and Y (only meaningful when `m = n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideMode {
    SidesLabeled,
    SidesUnlabeled,
}

impl SideMode {
    pub fn allows_swap(self) -> bool {
        self == SideMode::SidesUnlabeled
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralFlags {
    pub has_leaf: bool,
    pub has_isolated: bool,
    pub x_degrees: Vec<usize>,
    pub y_degrees: Vec<usize>,
}

/// Lexicographically least sorted neighborhood list over the allowed relabelings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalKey {
    pub key: Vec<u64>,
    pub swapped: bool,
}

impl CanonicalKey {
    /// Fixed-width hex rendering, used for file names.
    pub fn to_hex(&self) -> String {
        self.key.iter().map(|k| format!("{k:016x}")).join("")
    }
}

/// All permutations of `0..m`, with per-permutation mask lookup tables for small `m`.
pub struct XPermutations {
    m: usize,
    perms: Vec<Vec<usize>>,
    tables: Option<Vec<Vec<u64>>>,
}

impl XPermutations {
    const TABLE_LIMIT: usize = 6;

    pub fn new(m: usize) -> Result<Self> {
        check_limit("canonical-form X-side", m, CANONICAL_LIMIT)?;
        let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
        let tables = (m <= Self::TABLE_LIMIT).then(|| {
            perms
                .iter()
                .map(|p| (0..1u64 << m).map(|s| permute_mask(s, p)).collect())
                .collect()
        });
        Ok(Self { m, perms, tables })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perm(&self, i: usize) -> &[usize] {
        &self.perms[i]
    }

    #[inline]
    pub fn apply(&self, i: usize, mask: u64) -> u64 {
        match &self.tables {
            Some(t) => t[i][mask as usize],
            None => permute_mask(mask, &self.perms[i]),
        }
    }

    /// Minimum over `S_m` of the sorted permuted mask list.
    pub fn min_sorted_image(&self, masks: &[u64]) -> Vec<u64> {
        let mut best: Vec<u64> = Vec::new();
        let mut buf = vec![0u64; masks.len()];
        for i in 0..self.perms.len() {
            for (b, &s) in buf.iter_mut().zip(masks) {
                *b = self.apply(i, s);
            }
            buf.sort_unstable();
            if best.is_empty() || buf < best {
                best.clone_from(&buf);
            }
        }
        best
    }
}

/// Canonical key of `g` under `S_m × S_n`, or additionally the side swap.
pub fn canonical_form(g: &BipartiteGraph, allow_side_swap: bool) -> Result<CanonicalKey> {
    if allow_side_swap && g.m != g.n {
        return Err(precondition(format!(
            "side swap needs m = n, got m={} n={}",
            g.m, g.n
        )));
    }
    let perms = XPermutations::new(g.m)?;
    Ok(canonical_form_with(g, &perms, allow_side_swap))
}

/// [`canonical_form`] with a precomputed permutation set (`perms.m()` must equal `g.m()`).
pub fn canonical_form_with(
    g: &BipartiteGraph,
    perms: &XPermutations,
    allow_side_swap: bool,
) -> CanonicalKey {
    debug_assert_eq!(perms.m(), g.m);
    let direct = perms.min_sorted_image(&g.adj);
    if allow_side_swap {
        let swapped = perms.min_sorted_image(&g.x_neighborhoods());
        if swapped < direct {
            return CanonicalKey {
                key: swapped,
                swapped: true,
            };
        }
    }
    CanonicalKey {
        key: direct,
        swapped: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g24() -> BipartiteGraph {
        let mut edges = vec![(0, 0), (1, 0)];
        for y in 1..4 {
            edges.extend([(0, y), (2, y), (3, y), (4, y)]);
        }
        edges.extend((0..5).map(|x| (x, 4)));
        BipartiteGraph::from_edge_list(5, 5, &edges).unwrap()
    }

    #[test]
    fn edge_list_builds_masks() {
        let k22 = BipartiteGraph::from_edge_list(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(k22.adjacency(), &[0b11, 0b11]);
        let dup = BipartiteGraph::from_edge_list(2, 2, &[(0, 0), (0, 0), (1, 1)]).unwrap();
        assert_eq!(dup.edge_count(), 2);
        let bare = BipartiteGraph::from_edge_list(2, 1, &[]).unwrap();
        assert!(bare.structural_flags().has_isolated);
    }

    #[test]
    fn figure_graph_neighborhoods() {
        let g = g24();
        assert_eq!(g.edge_count(), 19);
        assert_eq!(g.y_neighborhood(0), 0b00011);
        assert_eq!(g.y_neighborhood(4), 0b11111);
        assert!(g.is_connected());
    }

    #[test]
    fn range_errors() {
        assert!(matches!(
            BipartiteGraph::from_edge_list(2, 2, &[(2, 0)]),
            Err(Error::IndexOutOfRange { side: 'x', .. })
        ));
        assert!(matches!(
            BipartiteGraph::from_edge_list(2, 2, &[(0, 5)]),
            Err(Error::IndexOutOfRange { side: 'y', .. })
        ));
        assert!(matches!(
            BipartiteGraph::empty(65, 1),
            Err(Error::PartSize { .. })
        ));
        assert!(BipartiteGraph::empty(0, 1).is_err());
        assert!(BipartiteGraph::from_adjacency(2, vec![0b100]).is_err());
        assert!(BipartiteGraph::complete(64, 64).is_ok());
    }

    #[test]
    fn complement_cases() {
        let k = BipartiteGraph::complete(3, 4).unwrap();
        assert_eq!(k.bipartite_complement().edge_count(), 0);
        let pm = BipartiteGraph::from_adjacency(2, vec![0b01, 0b10]).unwrap();
        assert_eq!(pm.bipartite_complement().adjacency(), &[0b10, 0b01]);
        let big = BipartiteGraph::complete(64, 2).unwrap();
        assert_eq!(big.bipartite_complement().edge_count(), 0);
    }

    #[test]
    fn connectivity() {
        assert!(BipartiteGraph::complete(3, 4).unwrap().is_connected());
        let two_edges = BipartiteGraph::from_adjacency(2, vec![0b01, 0b10]).unwrap();
        assert!(!two_edges.is_connected());
        let iso_y = BipartiteGraph::from_adjacency(1, vec![1, 0]).unwrap();
        assert!(!iso_y.is_connected());
        let single = BipartiteGraph::from_edge_list(1, 1, &[(0, 0)]).unwrap();
        assert!(single.is_connected());
        assert!(single.structural_flags().has_leaf);
    }

    #[test]
    fn text_round_trip_and_comments() {
        let g = g24();
        let parsed: BipartiteGraph = g.to_text().parse().unwrap();
        assert_eq!(parsed, g);
        let src = "# comment\n\n2 3\n1 1\n  # indented comment\n2 3\n1 1\n";
        let h: BipartiteGraph = src.parse().unwrap();
        assert_eq!(h.to_text(), "2 3\n1 1\n2 3\n");
    }

    #[test]
    fn text_errors() {
        assert!(matches!(
            "2 2\n3 1\n".parse::<BipartiteGraph>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "2 2\n1\n".parse::<BipartiteGraph>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!("".parse::<BipartiteGraph>().is_err());
        assert!("2 x\n".parse::<BipartiteGraph>().is_err());
        assert!("0 2\n".parse::<BipartiteGraph>().is_err());
    }

    #[test]
    fn canonical_form_of_relabeled_k23() {
        let a = BipartiteGraph::complete(2, 3).unwrap();
        let b = a.relabel(&[1, 0], &[2, 0, 1]).unwrap();
        assert_eq!(
            canonical_form(&a, false).unwrap(),
            canonical_form(&b, false).unwrap()
        );
    }

    #[test]
    fn side_swap_requires_square() {
        let a = BipartiteGraph::complete(2, 3).unwrap();
        assert!(matches!(
            canonical_form(&a, true),
            Err(Error::Precondition(_))
        ));
        let wide = BipartiteGraph::complete(9, 1).unwrap();
        assert!(matches!(
            canonical_form(&wide, false),
            Err(Error::SearchLimit { .. })
        ));
    }

    #[test]
    fn side_swap_identifies_transposes() {
        // star K_{1,2} plus an extra pendant edge, as a 2+2 graph and its transpose
        let g = BipartiteGraph::from_adjacency(2, vec![0b11, 0b01]).unwrap();
        let t = g.transpose();
        assert_eq!(
            canonical_form(&g, true).unwrap().key,
            canonical_form(&t, true).unwrap().key
        );
    }
}
