//! k-sequences and their canonical J-set realizations.
//!
//! A k-sequence `k_0 > k_1 > … > k_z = 0` (`z ≥ 2`) satisfies the convexity
//! condition `k_{l+1} ≥ 2k_l − k_{l−1}` for `l = 1, …, z−1`. Its J-sets
//! `J_l = {1..k_l} ∪ {k_{l−1}+1..m}` are the proper subsets of X that a
//! connected graph with ind-match = ord-match = 2 may use, listed by
//! nondecreasing size.

use std::fmt;

use serde::Serialize;

use crate::bigraph::low_mask;
use crate::error::{precondition, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct KSequence {
    terms: Vec<u32>,
}

impl KSequence {
    pub fn new(terms: Vec<u32>) -> Result<Self> {
        let bad = |reason| {
            Err(Error::InvalidKSequence {
                terms: terms.clone(),
                reason,
            })
        };
        if terms.len() < 3 {
            return bad("needs at least three terms");
        }
        if terms.last() != Some(&0) {
            return bad("last term must be 0");
        }
        if terms.windows(2).any(|w| w[0] <= w[1]) {
            return bad("terms must strictly decrease");
        }
        if !Self::is_convex(&terms) {
            return bad("convexity k_(l+1) >= 2k_l - k_(l-1) fails");
        }
        Ok(Self { terms })
    }

    fn is_convex(terms: &[u32]) -> bool {
        terms
            .windows(3)
            .all(|w| i64::from(w[2]) >= 2 * i64::from(w[1]) - i64::from(w[0]))
    }

    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    /// `k_0`, the size of X.
    pub fn head(&self) -> u32 {
        self.terms[0]
    }

    /// Index of the final term, equal to the number of J-sets.
    pub fn z(&self) -> usize {
        self.terms.len() - 1
    }

    /// Whether `|J_{l−1}| = |J_l|`, i.e. `k_l = 2k_{l−1} − k_{l−2}` (`l ≥ 2`).
    pub fn tied_at(&self, l: usize) -> bool {
        l >= 2 && {
            let t = &self.terms;
            i64::from(t[l]) == 2 * i64::from(t[l - 1]) - i64::from(t[l - 2])
        }
    }

    /// The sequence with `k_0` removed; a k-sequence whenever `self` has at least four terms.
    pub fn truncated(&self) -> Result<Self> {
        Self::new(self.terms[1..].to_vec())
    }
}

impl fmt::Display for KSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

/// A list of subsets of `X = {1..m}`, bit `i` standing for element `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JSetList {
    pub m: usize,
    pub sets: Vec<u64>,
}

impl JSetList {
    /// `k_l = |J_1 ∩ … ∩ J_l|`, with `k_0 = m`.
    pub fn intersection_sizes(&self) -> Vec<u32> {
        let mut acc = low_mask(self.m);
        std::iter::once(self.m as u32)
            .chain(self.sets.iter().map(|&s| {
                acc &= s;
                acc.count_ones()
            }))
            .collect()
    }

    /// Elements of each set, 1-based.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        self.sets
            .iter()
            .map(|&s| {
                (0..self.m)
                    .filter(|&i| s >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect()
            })
            .collect()
    }
}

/// The first structural J-set condition a list violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JSetViolation {
    /// Fewer than two sets.
    TooFew,
    /// A set is empty or all of X (or has bits outside X).
    NotProperSubset { index: usize },
    /// Sizes decrease from `index` to `index + 1`.
    SizeOrder { index: usize },
    /// Two distinct sets do not cover X.
    UnionNotFull { i: usize, j: usize },
    /// All sets share an element.
    CommonElement,
}

impl fmt::Display for JSetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFew => write!(f, "(1) fewer than two sets"),
            Self::NotProperSubset { index } => {
                write!(f, "J_{} is not a nonempty proper subset", index + 1)
            }
            Self::SizeOrder { index } => {
                write!(f, "(2) |J_{}| > |J_{}|", index + 1, index + 2)
            }
            Self::UnionNotFull { i, j } => {
                write!(f, "(3) J_{} ∪ J_{} ≠ X", i + 1, j + 1)
            }
            Self::CommonElement => write!(f, "(6) the sets share an element"),
        }
    }
}

/// All k-sequences with `k_0 = m` and at least `min_length` terms, in
/// descending lexicographic order.
pub fn enumerate_ksequences(m: u32, min_length: usize) -> Result<Vec<KSequence>> {
    if m < 2 {
        return Err(precondition(format!("k-sequences need m >= 2, got {m}")));
    }
    if !(3..=4).contains(&min_length) {
        return Err(precondition(format!(
            "min_length must be 3 or 4, got {min_length}"
        )));
    }

    fn extend(prefix: &mut Vec<u32>, min_length: usize, out: &mut Vec<KSequence>) {
        let last = *prefix.last().unwrap();
        if last == 0 {
            if prefix.len() >= min_length.max(3) {
                out.push(KSequence {
                    terms: prefix.clone(),
                });
            }
            return;
        }
        let floor = match prefix.len() {
            1 => 0,
            len => (2 * i64::from(last) - i64::from(prefix[len - 2])).max(0) as u32,
        };
        for next in (floor..last).rev() {
            prefix.push(next);
            extend(prefix, min_length, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    extend(&mut vec![m], min_length, &mut out);
    Ok(out)
}

/// `J_l = {1..k_l} ∪ {k_{l−1}+1..m}` for `l = 1..z`.
pub fn jsets_from_ksequence(ks: &KSequence) -> JSetList {
    let m = ks.head() as usize;
    let t = ks.terms();
    let sets = t
        .windows(2)
        .map(|w| low_mask(w[1] as usize) | (low_mask(m) & !low_mask(w[0] as usize)))
        .collect();
    JSetList { m, sets }
}

/// Checks the structural J-set conditions: at least two nonempty proper
/// subsets, nondecreasing sizes, pairwise unions equal to X, empty total
/// intersection.
pub fn validate_jsets(js: &JSetList) -> std::result::Result<(), JSetViolation> {
    let full = low_mask(js.m);
    if js.sets.len() < 2 {
        return Err(JSetViolation::TooFew);
    }
    if let Some(index) = js
        .sets
        .iter()
        .position(|&s| s == 0 || s & full == full || s & !full != 0)
    {
        return Err(JSetViolation::NotProperSubset { index });
    }
    if let Some(index) = js
        .sets
        .windows(2)
        .position(|w| w[0].count_ones() > w[1].count_ones())
    {
        return Err(JSetViolation::SizeOrder { index });
    }
    for i in 0..js.sets.len() {
        for j in i + 1..js.sets.len() {
            if js.sets[i] | js.sets[j] != full {
                return Err(JSetViolation::UnionNotFull { i, j });
            }
        }
    }
    if js.sets.iter().fold(full, |a, &s| a & s) != 0 {
        return Err(JSetViolation::CommonElement);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(t: &[u32]) -> KSequence {
        KSequence::new(t.to_vec()).unwrap()
    }

    fn listed(m: u32) -> Vec<Vec<u32>> {
        enumerate_ksequences(m, 3)
            .unwrap()
            .into_iter()
            .map(|k| k.terms)
            .collect()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(listed(2), vec![vec![2, 1, 0]]);
        assert_eq!(listed(3), vec![vec![3, 2, 1, 0], vec![3, 1, 0]]);
        assert_eq!(
            listed(4),
            vec![
                vec![4, 3, 2, 1, 0],
                vec![4, 2, 1, 0],
                vec![4, 2, 0],
                vec![4, 1, 0]
            ]
        );
        assert_eq!(listed(5).len(), 6);
        assert_eq!(enumerate_ksequences(4, 4).unwrap().len(), 2);
        assert!(enumerate_ksequences(1, 3).is_err());
        assert!(enumerate_ksequences(4, 5).is_err());
    }

    #[test]
    fn constructor_rejects() {
        assert!(KSequence::new(vec![3, 0]).is_err());
        assert!(KSequence::new(vec![3, 2, 1]).is_err());
        assert!(KSequence::new(vec![3, 3, 0]).is_err());
        // 5,4,1,0: 1 < 2*4 - 5
        assert!(KSequence::new(vec![5, 4, 1, 0]).is_err());
        assert!(KSequence::new(vec![5, 3, 1, 0]).is_ok());
    }

    #[test]
    fn jsets_examples() {
        let js = jsets_from_ksequence(&ks(&[4, 2, 1, 0]));
        assert_eq!(
            js.elements(),
            vec![vec![1, 2], vec![1, 3, 4], vec![2, 3, 4]]
        );
        let js = jsets_from_ksequence(&ks(&[2, 1, 0]));
        assert_eq!(js.elements(), vec![vec![1], vec![2]]);
        let js = jsets_from_ksequence(&ks(&[6, 4, 2, 0]));
        assert_eq!(
            js.elements(),
            vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]
        );
        assert_eq!(js.intersection_sizes(), vec![6, 4, 2, 0]);
    }

    #[test]
    fn validation() {
        let bad = JSetList {
            m: 3,
            sets: vec![0b001, 0b010],
        };
        assert_eq!(
            validate_jsets(&bad),
            Err(JSetViolation::UnionNotFull { i: 0, j: 1 })
        );
        let good = JSetList {
            m: 3,
            sets: vec![0b011, 0b101, 0b110],
        };
        assert_eq!(validate_jsets(&good), Ok(()));
        let shared = JSetList {
            m: 3,
            sets: vec![0b011, 0b101],
        };
        assert_eq!(validate_jsets(&shared), Err(JSetViolation::CommonElement));
        let one = JSetList {
            m: 3,
            sets: vec![0b011],
        };
        assert_eq!(validate_jsets(&one), Err(JSetViolation::TooFew));
        let full = JSetList {
            m: 2,
            sets: vec![0b01, 0b11],
        };
        assert_eq!(
            validate_jsets(&full),
            Err(JSetViolation::NotProperSubset { index: 1 })
        );
        let order = JSetList {
            m: 4,
            sets: vec![0b1110, 0b0001],
        };
        assert_eq!(
            validate_jsets(&order),
            Err(JSetViolation::SizeOrder { index: 0 })
        );
    }

    #[test]
    fn display_and_ties() {
        let k = ks(&[6, 4, 2, 1, 0]);
        assert_eq!(k.to_string(), "{6,4,2,1,0}");
        assert!(k.tied_at(2));
        assert!(!k.tied_at(3));
        assert!(k.tied_at(4));
        assert!(!k.tied_at(1));
    }
}
