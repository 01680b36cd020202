//! Brute-force counterparts of the counting formulas.
//!
//! Tuples are counted one at a time. Graph classes are counted either over
//! neighborhood profiles or by sweeping every edge subset.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::bigraph::{canonical_form_with, low_mask, BipartiteGraph, SideMode, XPermutations};
use crate::error::{check_limit, precondition, Error, Result};
use crate::invariants::{
    induced_matching_number, ordered_matching_number, MATCHING_SEARCH_EDGE_LIMIT,
    ORDERED_SEARCH_EDGE_LIMIT,
};
use crate::kseq::{jsets_from_ksequence, KSequence};
use crate::profile::{
    classify_equal_r, classify_equal_two, compute_profile, ind_match_from_profile,
    ord_match_from_profile, NeighborhoodProfile,
};

/// Largest X-side for graph enumeration.
pub const ENUMERATION_MAX_M: usize = 6;
/// Largest Y-side for graph enumeration.
pub const ENUMERATION_MAX_N: usize = 9;
/// Largest `m·n` for the raw edge-subset sweep.
pub const RAW_MAX_EDGES: usize = 20;
/// Largest number of profiles an unpruned (connected-only) enumeration may visit.
pub const UNPRUNED_PROFILE_LIMIT: usize = 5_000_000;
/// Every this many accepted supports, the profile verdict is re-derived by brute force.
const SPOT_CHECK_STRIDE: usize = 7;

/// `(c_{J_1}, …, c_{J_z}, c_X)` with sum `n`, `c_{J_1}, c_{J_2} ≥ 1`, and
/// `c_{J_l} ≥ c_{J_{l+1}}` whenever `|J_l| = |J_{l+1}|`, counted one by one.
///
/// With only two J-sets they are disjoint and the graph is connected only
/// through vertices adjacent to all of X, so `c_X ≥ 1` is also required.
pub fn count_tuples(n: u64, ks: &KSequence) -> u128 {
    let sizes: Vec<u32> = jsets_from_ksequence(ks)
        .sets
        .iter()
        .map(|s| s.count_ones())
        .collect();
    let min_full = u64::from(sizes.len() == 2);

    fn walk(sizes: &[u32], l: usize, remaining: u64, prev: u64, min_full: u64) -> u128 {
        if l == sizes.len() {
            return u128::from(remaining >= min_full);
        }
        let mut total = 0;
        for c in 0..=remaining {
            if l < 2 && c == 0 {
                continue;
            }
            if l > 0 && sizes[l] == sizes[l - 1] && c > prev {
                continue;
            }
            total += walk(sizes, l + 1, remaining - c, c, min_full);
        }
        total
    }

    walk(&sizes, 0, n, 0, min_full)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFilter {
    /// ind-match = ord-match = 2.
    IndOrdTwo,
    /// ind-match = ord-match = r.
    IndOrdR(usize),
    /// Every connected graph.
    AllConnected,
}

impl GraphFilter {
    fn target(self) -> Option<usize> {
        match self {
            GraphFilter::IndOrdTwo => Some(2),
            GraphFilter::IndOrdR(r) => Some(r),
            GraphFilter::AllConnected => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationJob {
    pub m: usize,
    pub n: usize,
    pub mode: SideMode,
    pub filter: GraphFilter,
    /// Keep one representative graph per class.
    pub emit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub count: u64,
    /// Distinct neighborhood supports that passed the filter.
    pub supports: u64,
    /// Profiles canonicalized, before deduplication.
    pub profiles: u64,
    pub spot_checks: u64,
    /// One graph per class, ordered by canonical profile, when requested.
    #[serde(skip)]
    pub representatives: Vec<BipartiteGraph>,
}

fn validate_job(m: usize, n: usize, mode: SideMode, filter: GraphFilter) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(precondition(format!(
            "both sides must be nonempty, got m={m} n={n}"
        )));
    }
    if mode.allows_swap() && m != n {
        return Err(precondition(format!(
            "sides-unlabeled mode needs m = n, got m={m} n={n}"
        )));
    }
    if filter == GraphFilter::IndOrdR(0) {
        return Err(precondition("ind-ord-r needs r >= 1"));
    }
    Ok(())
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Minimum over `S_m` of the sorted `(σ(I), c_I)` pairs.
fn orbit_key(p: &NeighborhoodProfile, perms: &XPermutations) -> Vec<(u64, u64)> {
    let pairs: Vec<(u64, u64)> = p.counts().iter().map(|(&s, &c)| (s, c)).collect();
    let mut best: Vec<(u64, u64)> = Vec::new();
    let mut buf = pairs.clone();
    for i in 0..perms.len() {
        for (b, &(s, c)) in buf.iter_mut().zip(&pairs) {
            *b = (perms.apply(i, s), c);
        }
        buf.sort_unstable();
        if best.is_empty() || buf < best {
            best.clone_from(&buf);
        }
    }
    best
}

fn class_key(
    p: &NeighborhoodProfile,
    perms: &XPermutations,
    mode: SideMode,
) -> Result<Vec<(u64, u64)>> {
    let direct = orbit_key(p, perms);
    if !mode.allows_swap() {
        return Ok(direct);
    }
    let flipped = compute_profile(&p.to_graph()?.transpose())?;
    Ok(direct.min(orbit_key(&flipped, perms)))
}

fn unit_profile(m: usize, support: &[u64]) -> Result<NeighborhoodProfile> {
    NeighborhoodProfile::from_counts(m, support.iter().map(|&s| (s, 1)))
}

/// Re-derives a support's verdict with the exhaustive searches, when they fit.
fn spot_check(support_graph: &BipartiteGraph, r: usize, graph: &BipartiteGraph) -> Result<bool> {
    let edges = support_graph.edge_count();
    if edges > MATCHING_SEARCH_EDGE_LIMIT || edges > ORDERED_SEARCH_EDGE_LIMIT {
        return Ok(false);
    }
    let ind = induced_matching_number(support_graph)?;
    let ord = ordered_matching_number(support_graph)?;
    assert!(
        ind == r && ord == r,
        "profile says ind = ord = {r}, brute force says ind={ind} ord={ord}:\n{support_graph}"
    );
    if r == 2 {
        assert!(classify_equal_two(graph)?.equal);
    }
    if r >= 2 {
        assert!(classify_equal_r(&compute_profile(graph)?, r)?);
    }
    Ok(true)
}

/// Calls `f` with every vector of `parts` positive integers summing to `total`.
fn for_each_composition(
    total: usize,
    parts: usize,
    f: &mut impl FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    fn go(
        left: usize,
        slot: usize,
        buf: &mut Vec<u64>,
        f: &mut impl FnMut(&[u64]) -> Result<()>,
    ) -> Result<()> {
        let parts = buf.len();
        if slot + 1 == parts {
            buf[slot] = left as u64;
            return f(buf);
        }
        let reserve = parts - slot - 1;
        for c in 1..=left - reserve {
            buf[slot] = c as u64;
            go(left - c, slot + 1, buf, f)?;
        }
        Ok(())
    }
    if parts == 0 || parts > total {
        return Ok(());
    }
    let mut buf = vec![0u64; parts];
    go(total, 0, &mut buf, f)
}

struct Partition {
    classes: HashMap<Vec<(u64, u64)>, NeighborhoodProfile>,
    supports: u64,
    profiles: u64,
    spot_checks: u64,
}

/// Counts graph classes by walking neighborhood supports and the ways of
/// distributing the n Y-vertices over them.
///
/// For the ind/ord filters a support is only extended while its
/// ordered matching number stays at most `r`; adding Y-vertices never lowers
/// either matching number, and duplicate neighborhoods never raise them, so
/// discarded branches contain no qualifying graph.
pub fn enumerate_graphs(job: &EnumerationJob) -> Result<EnumerationResult> {
    let EnumerationJob {
        m,
        n,
        mode,
        filter,
        emit,
    } = *job;
    validate_job(m, n, mode, filter)?;
    check_limit("enumeration X-side", m, ENUMERATION_MAX_M)?;
    check_limit("enumeration Y-side", n, ENUMERATION_MAX_N)?;
    let target = filter.target();
    if target.is_none() {
        let subsets = (1u128 << m) - 1;
        let profiles =
            binomial(n as u128 + subsets - 1, n as u128).ok_or(Error::Overflow("profile count"))?;
        check_limit(
            "unpruned profile enumeration",
            usize::try_from(profiles).unwrap_or(usize::MAX),
            UNPRUNED_PROFILE_LIMIT,
        )?;
    }
    let perms = XPermutations::new(m)?;
    let full = low_mask(m);
    let candidates: Vec<u64> = (1..=full).collect();

    let partitions: Vec<Result<Partition>> = (0..candidates.len())
        .into_par_iter()
        .map(|first| {
            let mut part = Partition {
                classes: HashMap::new(),
                supports: 0,
                profiles: 0,
                spot_checks: 0,
            };
            let mut chosen = vec![candidates[first]];
            if let Some(r) = target {
                if ord_match_from_profile(&unit_profile(m, &chosen)?)? > r {
                    return Ok(part);
                }
            }
            walk_supports(
                &candidates,
                first + 1,
                &mut chosen,
                &WalkContext {
                    m,
                    n,
                    mode,
                    target,
                    perms: &perms,
                },
                &mut part,
            )?;
            Ok(part)
        })
        .collect();

    let mut classes: BTreeMap<Vec<(u64, u64)>, NeighborhoodProfile> = BTreeMap::new();
    let (mut supports, mut profiles, mut spot_checks) = (0, 0, 0);
    for part in partitions {
        let part = part?;
        supports += part.supports;
        profiles += part.profiles;
        spot_checks += part.spot_checks;
        for (k, p) in part.classes {
            classes.entry(k).or_insert(p);
        }
    }
    let representatives = if emit {
        classes
            .values()
            .map(NeighborhoodProfile::to_graph)
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(EnumerationResult {
        count: classes.len() as u64,
        supports,
        profiles,
        spot_checks,
        representatives,
    })
}

struct WalkContext<'a> {
    m: usize,
    n: usize,
    mode: SideMode,
    target: Option<usize>,
    perms: &'a XPermutations,
}

fn walk_supports(
    candidates: &[u64],
    start: usize,
    chosen: &mut Vec<u64>,
    cx: &WalkContext<'_>,
    part: &mut Partition,
) -> Result<()> {
    visit_support(chosen, cx, part)?;
    if chosen.len() == cx.n {
        return Ok(());
    }
    for i in start..candidates.len() {
        chosen.push(candidates[i]);
        let keep = match cx.target {
            Some(r) => ord_match_from_profile(&unit_profile(cx.m, chosen)?)? <= r,
            None => true,
        };
        if keep {
            walk_supports(candidates, i + 1, chosen, cx, part)?;
        }
        chosen.pop();
    }
    Ok(())
}

fn visit_support(support: &[u64], cx: &WalkContext<'_>, part: &mut Partition) -> Result<()> {
    let full = low_mask(cx.m);
    if support.iter().fold(0, |a, &s| a | s) != full {
        return Ok(());
    }
    let unit = unit_profile(cx.m, support)?;
    let support_graph = unit.to_graph()?;
    if !support_graph.is_connected() {
        return Ok(());
    }
    if let Some(r) = cx.target {
        if ind_match_from_profile(&unit)? != r || ord_match_from_profile(&unit)? != r {
            return Ok(());
        }
    }
    part.supports += 1;
    let check_this = cx.target.is_some() && part.supports as usize % SPOT_CHECK_STRIDE == 1;
    let mut first = true;
    for_each_composition(cx.n, support.len(), &mut |counts| {
        let p = NeighborhoodProfile::from_counts(
            cx.m,
            support.iter().copied().zip(counts.iter().copied()),
        )?;
        if check_this && first {
            first = false;
            if spot_check(&support_graph, cx.target.unwrap(), &p.to_graph()?)? {
                part.spot_checks += 1;
            }
        }
        part.profiles += 1;
        let key = class_key(&p, cx.perms, cx.mode)?;
        part.classes.entry(key).or_insert(p);
        Ok(())
    })
}

/// Counts graph classes by sweeping all `2^{mn}` edge subsets and
/// deduplicating with [`canonical_form_with`]; the filter uses the exhaustive searches.
pub fn raw_enumerate(m: usize, n: usize, mode: SideMode, filter: GraphFilter) -> Result<u64> {
    Ok(raw_classes(m, n, mode)?
        .into_iter()
        .map(|g| raw_accepts(&g, filter))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count() as u64)
}

fn raw_accepts(g: &BipartiteGraph, filter: GraphFilter) -> Result<bool> {
    Ok(match filter.target() {
        None => true,
        Some(r) => induced_matching_number(g)? == r && ordered_matching_number(g)? == r,
    })
}

/// One representative per class of connected graphs without isolated
/// vertices, in canonical-key order.
pub fn raw_classes(m: usize, n: usize, mode: SideMode) -> Result<Vec<BipartiteGraph>> {
    validate_job(m, n, mode, GraphFilter::AllConnected)?;
    check_limit("raw sweep m*n", m * n, RAW_MAX_EDGES)?;
    let perms = XPermutations::new(m)?;
    let full = low_mask(m);
    let total_bits = m * n;
    // split on the top bits so partitions are independent
    let split = total_bits.min(6);
    let low_bits = total_bits - split;
    let parts: Vec<Result<BTreeMap<Vec<u64>, BipartiteGraph>>> = (0u64..1 << split)
        .into_par_iter()
        .map(|high| {
            let mut seen = BTreeMap::new();
            for low in 0u64..1 << low_bits {
                let word = high << low_bits | low;
                let adj: Vec<u64> = (0..n).map(|j| word >> (j * m) & full).collect();
                if adj.contains(&0) || adj.iter().fold(0, |a, &s| a | s) != full {
                    continue;
                }
                let g = BipartiteGraph::from_adjacency(m, adj)?;
                if !g.is_connected() {
                    continue;
                }
                let key = canonical_form_with(&g, &perms, mode.allows_swap());
                seen.entry(key.key).or_insert(g);
            }
            Ok(seen)
        })
        .collect();
    let mut all: BTreeMap<Vec<u64>, BipartiteGraph> = BTreeMap::new();
    for p in parts {
        for (k, g) in p? {
            all.entry(k).or_insert(g);
        }
    }
    Ok(all.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{d_sum, even_split_count};

    fn ks(t: &[u32]) -> KSequence {
        KSequence::new(t.to_vec()).unwrap()
    }

    fn job(m: usize, n: usize, mode: SideMode, filter: GraphFilter) -> EnumerationJob {
        EnumerationJob {
            m,
            n,
            mode,
            filter,
            emit: false,
        }
    }

    #[test]
    fn tuples_small() {
        assert_eq!(count_tuples(3, &ks(&[3, 2, 1, 0])), 3);
        for n in 3..15u64 {
            assert_eq!(
                count_tuples(n, &ks(&[3, 1, 0])),
                u128::from((n - 1) * (n - 2) / 2)
            );
            assert_eq!(count_tuples(n, &ks(&[2, 1, 0])), even_split_count(n));
            assert_eq!(
                count_tuples(n, &ks(&[4, 2, 1, 0])),
                d_sum(n, &ks(&[4, 2, 1, 0])).unwrap()
            );
        }
    }

    #[test]
    fn enumerate_small() {
        let l = SideMode::SidesLabeled;
        let u = SideMode::SidesUnlabeled;
        let two = GraphFilter::IndOrdTwo;
        assert_eq!(enumerate_graphs(&job(2, 3, l, two)).unwrap().count, 1);
        assert_eq!(enumerate_graphs(&job(3, 3, l, two)).unwrap().count, 4);
        assert_eq!(enumerate_graphs(&job(3, 3, u, two)).unwrap().count, 3);
        assert_eq!(raw_enumerate(2, 3, l, two).unwrap(), 1);
        assert_eq!(raw_enumerate(2, 5, l, two).unwrap(), 4);
    }

    #[test]
    fn one_means_complete() {
        for (m, n) in [(2, 3), (3, 3), (3, 4)] {
            let j = job(m, n, SideMode::SidesLabeled, GraphFilter::IndOrdR(1));
            assert_eq!(enumerate_graphs(&j).unwrap().count, 1);
        }
    }

    #[test]
    fn connected_counts_agree() {
        for (m, n) in [(1, 1), (2, 2), (2, 4), (3, 3), (3, 4)] {
            let j = job(m, n, SideMode::SidesLabeled, GraphFilter::AllConnected);
            assert_eq!(
                enumerate_graphs(&j).unwrap().count,
                raw_enumerate(m, n, SideMode::SidesLabeled, GraphFilter::AllConnected).unwrap(),
                "m={m} n={n}"
            );
        }
    }

    #[test]
    fn job_validation() {
        let l = SideMode::SidesLabeled;
        assert!(enumerate_graphs(&job(7, 7, l, GraphFilter::IndOrdTwo)).is_err());
        assert!(enumerate_graphs(&job(3, 10, l, GraphFilter::IndOrdTwo)).is_err());
        assert!(
            enumerate_graphs(&job(3, 4, SideMode::SidesUnlabeled, GraphFilter::IndOrdTwo)).is_err()
        );
        assert!(enumerate_graphs(&job(6, 9, l, GraphFilter::AllConnected)).is_err());
        assert!(enumerate_graphs(&job(3, 3, l, GraphFilter::IndOrdR(0))).is_err());
        assert!(raw_enumerate(4, 6, l, GraphFilter::IndOrdTwo).is_err());
    }

    #[test]
    fn emitted_graphs_qualify() {
        let mut j = job(4, 4, SideMode::SidesLabeled, GraphFilter::IndOrdTwo);
        j.emit = true;
        let res = enumerate_graphs(&j).unwrap();
        assert_eq!(res.representatives.len() as u64, res.count);
        for g in &res.representatives {
            assert!(g.is_connected());
            assert!(classify_equal_two(g).unwrap().equal);
        }
    }
}
