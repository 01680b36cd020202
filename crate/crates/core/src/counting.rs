//! Exact counts of connected bipartite graphs with ind-match = ord-match = 2.
//!
//! The count `N(m, n)` splits into graphs whose two smallest J-sets are
//! disjoint (a closed form per split size) and graphs described by a
//! k-sequence with at least four terms. Every such k-sequence contributes
//! a nested sum `D(n; k)`; graphs admitted by several sequences are removed
//! by inclusion-exclusion over the common-summand sums `D_K(n)`.
//!
//! All arithmetic is exact 128-bit; overflow is an error.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bigraph::SideMode;
use crate::error::{check_limit, precondition, Error, Result};
use crate::kseq::{enumerate_ksequences, KSequence};

/// Largest group of sequences sharing a three-term prefix that inclusion-exclusion will expand.
pub const PREFIX_GROUP_LIMIT: usize = 24;

/// Upper bound of one counter beyond the running-sum bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cap {
    /// At most the value of an earlier counter.
    Counter(usize),
    /// Pinned to zero by a hidden counter.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counter {
    lower: u64,
    caps: Vec<Cap>,
}

/// `Σ_{i_1=1}^{n-1} Σ_{i_2}^{u_2} … 1` where counter `l ≥ 2` runs up to
/// `n − i_1 − … − i_{l−1}`, further limited by its caps.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NestedSum {
    counters: Vec<Counter>,
}

impl NestedSum {
    fn from_sequence(ks: &KSequence) -> Self {
        let counters = (1..=ks.z())
            .map(|l| Counter {
                lower: if l <= 2 { 1 } else { 0 },
                caps: if ks.tied_at(l) {
                    vec![Cap::Counter(l - 2)]
                } else {
                    Vec::new()
                },
            })
            .collect();
        Self { counters }
    }

    /// Common-summand sum of a set of sequences that share their first three terms.
    fn from_common_terms(set: &[KSequence]) -> Self {
        let common: BTreeSet<u32> = set
            .iter()
            .map(|s| s.terms().iter().copied().collect::<BTreeSet<_>>())
            .reduce(|a, b| &a & &b)
            .unwrap_or_default();
        // descending, without k_0
        let w: Vec<u32> = common.iter().rev().skip(1).copied().collect();
        let counter_of = |value: u32| w.iter().position(|&v| v == value);
        let counters = w
            .iter()
            .enumerate()
            .map(|(level, &value)| {
                let mut caps = Vec::new();
                for s in set {
                    let p = s.terms().iter().position(|&t| t == value).unwrap();
                    if s.tied_at(p) {
                        caps.push(match counter_of(s.terms()[p - 1]) {
                            Some(c) => Cap::Counter(c),
                            None => Cap::Zero,
                        });
                    }
                }
                caps.sort_by_key(|c| match c {
                    Cap::Zero => (0, 0),
                    Cap::Counter(i) => (1, *i),
                });
                caps.dedup();
                Counter {
                    lower: if level < 2 { 1 } else { 0 },
                    caps,
                }
            })
            .collect();
        Self { counters }
    }

    fn evaluate(&self, n: u64) -> Result<u128> {
        if self.counters.is_empty() || n < 1 {
            return Ok(0);
        }
        let first = &self.counters[0];
        let top = n - 1;
        if top < first.lower {
            return Ok(0);
        }
        let partials: Vec<Result<u128>> = (first.lower..=top)
            .into_par_iter()
            .map(|i1| {
                let mut values = vec![0u64; self.counters.len()];
                values[0] = i1;
                self.descend(1, n - i1, &mut values)
            })
            .collect();
        partials.into_iter().try_fold(0u128, |acc, p| {
            acc.checked_add(p?).ok_or(Error::Overflow("nested sum"))
        })
    }

    fn descend(&self, level: usize, remaining: u64, values: &mut [u64]) -> Result<u128> {
        if level == self.counters.len() {
            return Ok(1);
        }
        let c = &self.counters[level];
        let mut upper = remaining;
        for cap in &c.caps {
            upper = upper.min(match *cap {
                Cap::Counter(i) => values[i],
                Cap::Zero => 0,
            });
        }
        if upper < c.lower {
            return Ok(0);
        }
        if level + 1 == self.counters.len() {
            return Ok(u128::from(upper - c.lower + 1));
        }
        let mut total = 0u128;
        for v in c.lower..=upper {
            values[level] = v;
            let sub = self.descend(level + 1, remaining - v, values)?;
            total = total
                .checked_add(sub)
                .ok_or(Error::Overflow("nested sum"))?;
        }
        Ok(total)
    }
}

fn require_long(ks: &KSequence) -> Result<()> {
    if ks.terms().len() < 4 {
        Err(precondition(format!(
            "{ks} has fewer than four terms; nested sums need z >= 3"
        )))
    } else {
        Ok(())
    }
}

/// `D(n; k)`: the number of admissible count tuples for one k-sequence with at least four terms.
///
/// Counter `i_l` belongs to `J_l`; `i_1, i_2 ≥ 1`, the rest `≥ 0`, and `i_l ≤ i_{l−1}`
/// exactly when `|J_{l−1}| = |J_l|`.
pub fn d_sum(n: u64, ks: &KSequence) -> Result<u128> {
    require_long(ks)?;
    NestedSum::from_sequence(ks).evaluate(n)
}

/// `D_K(n)`: zero unless all sequences share their first three terms; otherwise
/// the nested sum over the terms common to every sequence, each counter bounded
/// by the smallest of its per-sequence bounds and hidden counters fixed at zero.
pub fn d_k(n: u64, set: &[KSequence]) -> Result<u128> {
    let set: Vec<KSequence> = set
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let Some(first) = set.first() else {
        return Err(precondition("D_K needs a nonempty set of sequences"));
    };
    for s in &set {
        require_long(s)?;
        if s.head() != first.head() {
            return Err(precondition(format!(
                "sequences {first} and {s} start with different terms"
            )));
        }
    }
    if set.iter().any(|s| s.terms()[..3] != first.terms()[..3]) {
        return Ok(0);
    }
    NestedSum::from_common_terms(&set).evaluate(n)
}

fn binom2(k: u64) -> u128 {
    let k = u128::from(k);
    k * k.saturating_sub(1) / 2
}

/// `⌊n/2⌋(⌈n/2⌉ − 1)`.
pub fn even_split_count(n: u64) -> u128 {
    let half_down = u128::from(n / 2);
    let half_up = u128::from(n.div_ceil(2));
    half_down * half_up.saturating_sub(1)
}

/// Connected graphs with ind-match = ord-match = 2 whose two proper neighborhood
/// classes are a disjoint pair `I`, `X ∖ I` with `|I| = i_size`.
pub fn disjoint_count(m: u64, n: u64, i_size: u64) -> Result<u128> {
    if n < 3 {
        return Err(precondition(format!("disjoint case needs n >= 3, got {n}")));
    }
    if i_size == 0 || 2 * i_size > m {
        return Err(precondition(format!(
            "split size must satisfy 1 <= |I| <= m/2, got |I|={i_size} m={m}"
        )));
    }
    Ok(if i_size != m - i_size {
        binom2(n - 1)
    } else {
        even_split_count(n)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointTerm {
    pub split: u64,
    pub count: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionExclusionTerm {
    pub sequences: Vec<KSequence>,
    pub sign: i8,
    pub value: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountBreakdown {
    pub m: u64,
    pub n: u64,
    pub disjoint_terms: Vec<DisjointTerm>,
    /// Every subset of sequences sharing a three-term prefix, grouped by prefix.
    pub inclusion_exclusion_terms: Vec<InclusionExclusionTerm>,
    /// Subsets mixing prefixes; each contributes zero and is not listed.
    pub zero_by_prefix: u128,
    pub total: u128,
}

/// `N(m, n)` with the contribution of every term.
pub fn total_count(m: u64, n: u64) -> Result<CountBreakdown> {
    if m < 2 || n < 3 || m > n {
        return Err(precondition(format!(
            "N(m,n) needs 2 <= m <= n and n >= 3, got m={m} n={n}"
        )));
    }
    let disjoint_terms = (1..=m / 2)
        .map(|split| disjoint_count(m, n, split).map(|count| DisjointTerm { split, count }))
        .collect::<Result<Vec<_>>>()?;

    let m32 = u32::try_from(m).map_err(|_| precondition("m too large"))?;
    let long = enumerate_ksequences(m32, 4)?;
    let mut groups: BTreeMap<Vec<u32>, Vec<KSequence>> = BTreeMap::new();
    for s in &long {
        groups
            .entry(s.terms()[..3].to_vec())
            .or_default()
            .push(s.clone());
    }

    let mut terms = Vec::new();
    let mut listed = 0u128;
    for members in groups.values().rev() {
        check_limit("prefix group", members.len(), PREFIX_GROUP_LIMIT)?;
        for pick in 1u32..1 << members.len() {
            let set: Vec<KSequence> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .map(|(_, s)| s.clone())
                .collect();
            let sign = if set.len() % 2 == 1 { 1 } else { -1 };
            let value = d_k(n, &set)?;
            terms.push(InclusionExclusionTerm {
                sequences: set,
                sign,
                value,
            });
            listed += 1;
        }
    }
    let all_subsets = 1u128
        .checked_shl(long.len() as u32)
        .ok_or(Error::Overflow("subset count"))?
        - 1;

    let overflow = || Error::Overflow("N(m,n)");
    let mut total: i128 = 0;
    for t in &disjoint_terms {
        total = total
            .checked_add(i128::try_from(t.count).map_err(|_| overflow())?)
            .ok_or_else(overflow)?;
    }
    for t in &terms {
        let v = i128::try_from(t.value).map_err(|_| overflow())?;
        total = total
            .checked_add(i128::from(t.sign) * v)
            .ok_or_else(overflow)?;
    }
    assert!(total >= 0, "negative N({m},{n}) = {total}");
    Ok(CountBreakdown {
        m,
        n,
        disjoint_terms,
        inclusion_exclusion_terms: terms,
        zero_by_prefix: all_subsets - listed,
        total: total as u128,
    })
}

/// Three linear recurrences, each counting the nested sum of one short k-sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Recurrence {
    /// `{3,2,1,0}`: `a_n = 2a_{n−1} − a_{n−3} − a_{n−4} + 2a_{n−6} − a_{n−7}`.
    A2,
    /// `{4,2,1,0}`: `a_n = 3a_{n−1} − 2a_{n−2} − 2a_{n−3} + 3a_{n−4} − a_{n−5}`.
    A3,
    /// `{4,3,2,1,0}`: order-11 recurrence with roots `1⁵, (−1)², ±i`, primitive cube roots.
    A4,
}

impl Recurrence {
    pub const ALL: [Recurrence; 3] = [Recurrence::A2, Recurrence::A3, Recurrence::A4];

    /// Index of the first initial value.
    pub fn offset(self) -> u64 {
        match self {
            Recurrence::A2 => 0,
            Recurrence::A3 | Recurrence::A4 => 1,
        }
    }

    pub fn initial_values(self) -> &'static [i128] {
        match self {
            Recurrence::A2 => &[0, 0, 1, 3, 6, 10, 16],
            Recurrence::A3 => &[0, 1, 4, 9, 17],
            Recurrence::A4 => &[0, 1, 3, 7, 12, 20, 30, 44, 61, 83, 109],
        }
    }

    /// `(lag, coefficient)` pairs.
    fn coefficients(self) -> &'static [(usize, i128)] {
        match self {
            Recurrence::A2 => &[(1, 2), (3, -1), (4, -1), (6, 2), (7, -1)],
            Recurrence::A3 => &[(1, 3), (2, -2), (3, -2), (4, 3), (5, -1)],
            Recurrence::A4 => &[(1, 2), (3, -1), (5, -2), (6, 2), (8, 1), (10, -2), (11, 1)],
        }
    }

    /// The k-sequence whose `D(n; ·)` this recurrence evaluates.
    pub fn sequence(self) -> KSequence {
        let terms = match self {
            Recurrence::A2 => vec![3, 2, 1, 0],
            Recurrence::A3 => vec![4, 2, 1, 0],
            Recurrence::A4 => vec![4, 3, 2, 1, 0],
        };
        KSequence::new(terms).expect("recurrence sequences are valid")
    }
}

/// `a_n` by the linear recurrence from its initial values.
pub fn recurrence_eval(which: Recurrence, n: u64) -> Result<u128> {
    let offset = which.offset();
    if n < offset {
        return Err(precondition(format!(
            "{which:?} is defined for n >= {offset}, got {n}"
        )));
    }
    let init = which.initial_values();
    let idx = (n - offset) as usize;
    let mut seq: Vec<i128> = init.to_vec();
    while seq.len() <= idx {
        let k = seq.len();
        let mut next: i128 = 0;
        for &(lag, coef) in which.coefficients() {
            next = coef
                .checked_mul(seq[k - lag])
                .and_then(|t| next.checked_add(t))
                .ok_or(Error::Overflow("recurrence"))?;
        }
        seq.push(next);
    }
    u128::try_from(seq[idx]).map_err(|_| Error::Overflow("negative recurrence value"))
}

/// Primitive cube roots of unity `(−1 ± √3 i)/2`.
fn cube_roots() -> (Complex64, Complex64) {
    let h = 3f64.sqrt() / 2.0;
    (Complex64::new(-0.5, h), Complex64::new(-0.5, -h))
}

fn sign_pow(n: u64) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Complex-root closed form of the `{3,2,1,0}` nested sum.
pub fn t_closed_float(n: u64) -> f64 {
    let x = n as f64;
    let (w, wbar) = cube_roots();
    let s3 = 3f64.sqrt();
    let roots = Complex64::new(3.0, s3) / 54.0 * wbar.powu(n as u32)
        + Complex64::new(3.0, -s3) / 54.0 * w.powu(n as u32);
    -25.0 / 144.0 - x / 12.0 + 7.0 * x * x / 24.0 + x.powi(3) / 36.0 + sign_pow(n) / 16.0 + roots.re
}

/// The cubic `−1/16 + 5n/12 + 5n²/8 + n³/12 + (−1)^n/16`. It equals the
/// `{4,2,1,0}` nested sum at `n + 1`, so [`u_closed_float`] evaluates it at `n − 1`.
pub fn u_cubic(n: u64) -> f64 {
    let x = n as f64;
    -1.0 / 16.0 + 5.0 * x / 12.0 + 5.0 * x * x / 8.0 + x.powi(3) / 12.0 + sign_pow(n) / 16.0
}

/// Closed form of the `{4,2,1,0}` nested sum (`n ≥ 1`).
pub fn u_closed_float(n: u64) -> f64 {
    assert!(n >= 1, "U is defined for n >= 1");
    u_cubic(n - 1)
}

/// Complex-root closed form of the `{4,3,2,1,0}` nested sum.
pub fn v_closed_float(n: u64) -> f64 {
    let x = n as f64;
    let (w, wbar) = cube_roots();
    let s3 = 3f64.sqrt();
    let i = Complex64::i();
    let quartic =
        (-641.0 - 486.0 * x + 996.0 * x * x + 132.0 * x.powi(3) + 6.0 * x.powi(4)) / 3456.0;
    let alt = (11.0 + 2.0 * x) * sign_pow(n) / 128.0;
    let quarter = (Complex64::new(1.0, -1.0) * i.powu(n as u32)
        + Complex64::new(1.0, 1.0) * (-i).powu(n as u32))
        / 32.0;
    let third = Complex64::new(1.0, s3) / 54.0 * wbar.powu(n as u32)
        + Complex64::new(1.0, -s3) / 54.0 * w.powu(n as u32);
    quartic + alt + quarter.re + third.re
}

/// Floating closed form for one recurrence.
pub fn closed_float(which: Recurrence, n: u64) -> f64 {
    match which {
        Recurrence::A2 => t_closed_float(n),
        Recurrence::A3 => u_closed_float(n),
        Recurrence::A4 => v_closed_float(n),
    }
}

/// Recurrence value, checked against the rounded floating closed form.
fn cross_checked(which: Recurrence, n: u64) -> Result<u128> {
    let exact = recurrence_eval(which, n)?;
    let approx = closed_float(which, n).round();
    assert_eq!(
        approx, exact as f64,
        "{which:?} closed form disagrees with the recurrence at n={n}"
    );
    Ok(exact)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub m: u64,
    pub n: u64,
    pub value: u128,
    /// `SidesUnlabeled` exactly for the hand-verified `m = n ∈ {3, 4}` entries.
    pub mode: SideMode,
}

/// Closed-form count for `m ∈ {2, 3, 4}`, `m ≤ n`.
pub fn closed_form(m: u64, n: u64) -> Result<ClosedForm> {
    if !(2..=4).contains(&m) || m > n {
        return Err(precondition(format!(
            "closed form needs m in {{2,3,4}} and m <= n, got m={m} n={n}"
        )));
    }
    if n < 3 {
        return Err(precondition(format!("closed form needs n >= 3, got {n}")));
    }
    let labeled = |value| ClosedForm {
        m,
        n,
        value,
        mode: SideMode::SidesLabeled,
    };
    let unlabeled = |value| ClosedForm {
        m,
        n,
        value,
        mode: SideMode::SidesUnlabeled,
    };
    Ok(match (m, n) {
        (2, _) => labeled(even_split_count(n)),
        (3, 3) => unlabeled(3),
        (3, _) => labeled(binom2(n - 1) + cross_checked(Recurrence::A2, n)?),
        (4, 4) => unlabeled(14),
        _ => labeled(
            binom2(n - 1)
                + even_split_count(n)
                + cross_checked(Recurrence::A3, n)?
                + cross_checked(Recurrence::A4, n)?,
        ),
    })
}

/// `Σ_{i=1}^{n−2} Σ_{j=1}^{min(i, n−i−1)} 1`, evaluated literally and by
/// `⌊n/2⌋(⌈n/2⌉ − 1)`; the two must agree.
pub fn appendix_sum_a1(n: u64) -> Result<u128> {
    if n < 3 {
        return Err(precondition(format!("needs n >= 3, got {n}")));
    }
    let literal: u128 = (1..=n - 2).map(|i| u128::from(i.min(n - i - 1))).sum();
    let closed = even_split_count(n);
    assert_eq!(literal, closed, "even-split identity fails at n={n}");
    Ok(closed)
}
