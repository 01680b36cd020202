//! Neighborhood profiles and the ind-match = ord-match classification.
//!
//! The profile of a graph counts, for every nonempty `I ⊆ X`, the Y-vertices
//! whose neighborhood is exactly `I`. Induced and ordered matching numbers,
//! and the classification of graphs where the two agree, are all decided
//! from the profile alone.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use crate::bigraph::{bits, low_mask, BipartiteGraph};
use crate::error::{check_limit, precondition, Error, Result};

/// Largest stored family the subfamily searches accept.
pub const FAMILY_LIMIT: usize = 20;
/// Largest X-side for the union-bitmask dynamic program.
pub const UNION_DP_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NeighborhoodProfile {
    m: usize,
    n: u64,
    counts: BTreeMap<u64, u64>,
}

impl NeighborhoodProfile {
    /// Profile from explicit `(subset, count)` pairs; zero counts are dropped.
    pub fn from_counts(m: usize, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        if m == 0 || m > crate::bigraph::MAX_PART {
            return Err(Error::PartSize {
                side: 'x',
                size: m,
                max: crate::bigraph::MAX_PART,
            });
        }
        let full = low_mask(m);
        let mut counts = BTreeMap::new();
        for (subset, c) in pairs {
            if subset == 0 {
                return Err(precondition("profile keys must be nonempty subsets"));
            }
            if subset & !full != 0 {
                return Err(Error::MaskOutOfRange { mask: subset, m });
            }
            if c > 0 {
                *counts.entry(subset).or_insert(0) += c;
            }
        }
        let n = counts.values().sum();
        Ok(Self { m, n, counts })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// `c_I`, zero when `I` is not stored.
    pub fn count(&self, subset: u64) -> u64 {
        self.counts.get(&subset).copied().unwrap_or(0)
    }

    /// Number of Y-vertices adjacent to all of X.
    pub fn c_x(&self) -> u64 {
        self.count(low_mask(self.m))
    }

    /// Stored subsets, ascending by mask.
    pub fn support(&self) -> Vec<u64> {
        self.counts.keys().copied().collect()
    }

    /// Stored subsets other than X itself.
    pub fn proper_support(&self) -> Vec<u64> {
        let full = low_mask(self.m);
        self.counts.keys().copied().filter(|&s| s != full).collect()
    }

    /// A graph with this profile; Y-vertices are listed by ascending subset.
    pub fn to_graph(&self) -> Result<BipartiteGraph> {
        let adj = self
            .counts
            .iter()
            .flat_map(|(&s, &c)| std::iter::repeat_n(s, c as usize))
            .collect();
        BipartiteGraph::from_adjacency(self.m, adj)
    }
}

/// Outcome of the ind-match = ord-match = 2 test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub equal: bool,
    pub r: Option<usize>,
    /// Number of proper subsets of X with positive count.
    pub z: usize,
    /// Those proper subsets, by nondecreasing size (ties by mask).
    pub jsets: Vec<u64>,
    pub c_x: u64,
    /// Some two stored proper subsets are disjoint.
    pub disjoint_case: bool,
}

impl ClassificationResult {
    /// Count of all positive subsets, X included.
    pub fn z_with_full(&self) -> usize {
        self.z + usize::from(self.c_x > 0)
    }
}

pub fn compute_profile(g: &BipartiteGraph) -> Result<NeighborhoodProfile> {
    g.require_no_isolated()?;
    NeighborhoodProfile::from_counts(g.m(), g.adjacency().iter().map(|&s| (s, 1)))
}

/// Each member of `family` owns an element no other member covers.
fn has_private_elements(family: &[u64]) -> bool {
    let (mut once, mut many) = (0u64, 0u64);
    for &s in family {
        many |= once & s;
        once = (once | s) & !many;
    }
    family.iter().all(|&s| s & once != 0)
}

/// Largest subfamily of stored subsets in which no member lies inside the union of the others.
pub fn ind_match_from_profile(p: &NeighborhoodProfile) -> Result<usize> {
    let family = p.support();
    check_limit("profile family", family.len(), FAMILY_LIMIT)?;

    // The property is inherited by subfamilies, so only valid families are extended.
    fn grow(family: &[u64], start: usize, chosen: &mut Vec<u64>, best: &mut usize) {
        *best = (*best).max(chosen.len());
        if chosen.len() + (family.len() - start) <= *best {
            return;
        }
        for i in start..family.len() {
            chosen.push(family[i]);
            if has_private_elements(chosen) {
                grow(family, i + 1, chosen, best);
            }
            chosen.pop();
        }
    }

    let mut best = 0;
    grow(&family, 0, &mut Vec::new(), &mut best);
    Ok(best)
}

/// Longest sequence of stored subsets where each adds something new to the running union.
pub fn ord_match_from_profile(p: &NeighborhoodProfile) -> Result<usize> {
    check_limit("union DP X-side", p.m(), UNION_DP_LIMIT)?;
    let family = p.support();
    // Every step strictly enlarges the union, so ascending mask order is a topological order.
    let mut longest: BTreeMap<u64, usize> = BTreeMap::from([(0, 0)]);
    let mut best = 0;
    while let Some((union, len)) = longest.pop_first() {
        best = best.max(len);
        for &s in &family {
            if s & !union != 0 {
                let e = longest.entry(union | s).or_insert(0);
                *e = (*e).max(len + 1);
            }
        }
    }
    Ok(best)
}

/// The family can be listed so that each member has an element outside the
/// union of those before it. Peeling off a member with a private element
/// never takes privacy away from the rest, so the greedy check is exact.
fn is_orderable(family: &[u64]) -> bool {
    let mut rest = family.to_vec();
    while !rest.is_empty() {
        let Some(i) = (0..rest.len()).find(|&i| {
            let others = rest
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(0, |a, (_, &s)| a | s);
            rest[i] & !others != 0
        }) else {
            return false;
        };
        rest.swap_remove(i);
    }
    true
}

/// Whether ind-match = ord-match = `r` (`r ≥ 2`), decided from the proper stored subsets:
/// there are at least `r` of them, some `r` of them each own a private element,
/// and every `r` of them that can be listed with each adding a new element cover X.
///
/// Restricting the covering condition to the private-element families is not
/// enough: `{1}, {1,2}, {1,3}` passes that weaker test while its ordered
/// matching number is 3.
pub fn classify_equal_r(p: &NeighborhoodProfile, r: usize) -> Result<bool> {
    if r < 2 {
        return Err(precondition(format!(
            "classify_equal_r needs r >= 2, got {r}; use is_ind_ord_one for r = 1"
        )));
    }
    let family = p.proper_support();
    check_limit("profile family", family.len(), FAMILY_LIMIT)?;
    if family.len() < r {
        return Ok(false);
    }
    let full = low_mask(p.m());
    let mut any_independent = false;
    for combo in family.iter().copied().combinations(r) {
        any_independent |= has_private_elements(&combo);
        if is_orderable(&combo) && combo.iter().fold(0, |a, &s| a | s) != full {
            return Ok(false);
        }
    }
    Ok(any_independent)
}

/// Complement test: `G^bc` is a disjoint union of at least two complete
/// bipartite graphs, at least two of which are not single vertices.
/// An isolated vertex counts as a complete bipartite graph with one empty side.
pub fn complement_is_biclique_union(g: &BipartiteGraph) -> bool {
    let bc = g.bipartite_complement();
    let (m, n) = (g.m(), g.n());
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (x, y) in bc.edges() {
        let (a, b) = (find(&mut parent, x), find(&mut parent, m + y));
        parent[a] = b;
    }
    // root -> (X-side mask, Y-side mask)
    let mut parts: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for v in 0..m + n {
        let root = find(&mut parent, v);
        let e = parts.entry(root).or_default();
        if v < m {
            e.0 |= 1 << v;
        } else {
            e.1 |= 1 << (v - m);
        }
    }
    let complete = parts
        .values()
        .all(|&(xs, ys)| bits(ys).all(|y| bc.y_neighborhood(y) & xs == xs));
    let nontrivial = parts
        .values()
        .filter(|(xs, ys)| xs.count_ones() + ys.count_ones() >= 2)
        .count();
    complete && parts.len() >= 2 && nontrivial >= 2
}

/// Decides ind-match = ord-match = 2 from the profile conditions and, independently,
/// from the complement test; the two must agree.
pub fn classify_equal_two(g: &BipartiteGraph) -> Result<ClassificationResult> {
    let p = compute_profile(g)?;
    let all = p.support();
    let pairwise_cover = all
        .iter()
        .tuple_combinations()
        .all(|(&a, &b)| a | b == low_mask(p.m()));
    let incomparable = all
        .iter()
        .tuple_combinations()
        .any(|(&a, &b)| a & !b != 0 && b & !a != 0);
    let by_profile = all.len() >= 2 && incomparable && pairwise_cover;
    let by_complement = complement_is_biclique_union(g);
    assert_eq!(
        by_profile, by_complement,
        "profile and complement classifications disagree on\n{g}"
    );

    let mut jsets = p.proper_support();
    jsets.sort_by_key(|&s| (s.count_ones(), s));
    let disjoint_case = jsets.iter().tuple_combinations().any(|(&a, &b)| a & b == 0);
    let result = ClassificationResult {
        equal: by_profile,
        r: by_profile.then_some(2),
        z: jsets.len(),
        jsets,
        c_x: p.c_x(),
        disjoint_case,
    };
    if result.equal && result.disjoint_case {
        let zf = result.z_with_full();
        assert!(
            (zf == 2 || zf == 3) && (zf == 3) == (result.c_x > 0) && (zf == 3) == g.is_connected(),
            "disjoint-case clause violated: {result:?}"
        );
    }
    Ok(result)
}

/// ind-match = ord-match = 1, i.e. the graph is complete bipartite.
pub fn is_ind_ord_one(g: &BipartiteGraph) -> Result<bool> {
    g.require_no_isolated()?;
    let full = low_mask(g.m());
    Ok(g.adjacency().iter().all(|&s| s == full))
}
