//! Rank correlation over possibly partial rankings.
//!
//! [`msrc`] compares a reference ranking against a comparison ranking that
//! may omit some reference items:
//!
//! ```text
//! rs' = 1 - sum_{i=1..n} (i - v_i)^2 / ( m * (max_j v_j ^ 2 - 1) )
//! ```
//!
//! where `v_i` is the comparison rank of the i-th reference item, `n` and `m`
//! are the two list lengths and the maximum runs over the comparison ranks.
//! Absent items take a placeholder rank (`m + 1` by default). Sums are taken
//! over exact integers and divided once.
//!
//! [`spearman_classic`] and [`kendall_tau`] are the textbook full-list
//! coefficients.

mod hdi;

use thiserror::Error;

pub use hdi::{
    hdi_experiment, read_hdi, select_fixtures, CategoryCorrelation, HdiCategory, HdiFixture, HdiRow, ScatterPoint,
    FIXTURE_SIZE,
};

use crate::model::RankedList;

#[derive(Debug, Error, PartialEq)]
pub enum RankCorrError {
    #[error("empty ranking")]
    Empty,
    #[error("degenerate denominator: m = {m}, max rank = {max}")]
    DegenerateDenominator { m: usize, max: usize },
    #[error("rankings cover different item sets")]
    MismatchedItems,
    #[error("need at least two items, got {0}")]
    TooShort(usize),
    #[error("HDI data: {0}")]
    Hdi(String),
}

/// Which value plays `max_j v_j` in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxRank {
    /// Maximum over the comparison list's own ranks, i.e. `m`.
    #[default]
    ComparisonLength,
    /// Maximum over every `v_i`, placeholders included.
    IncludePlaceholders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MsrcOptions {
    /// Multiply the squared-difference sum by 6, which turns the formula into
    /// classic Spearman on full lists.
    pub classic_factor: bool,
    pub max_rank: MaxRank,
}

impl Default for MsrcOptions {
    fn default() -> Self {
        Self {
            classic_factor: false,
            max_rank: MaxRank::ComparisonLength,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRankPair {
    pub n: usize,
    pub m: usize,
    /// Comparison rank of each reference item, in reference order.
    pub v: Vec<usize>,
    /// Whether `v[i]` is a real rank or the placeholder.
    pub present: Vec<bool>,
}

impl PartialRankPair {
    pub fn placeholder(&self) -> Option<usize> {
        self.present.iter().position(|p| !p).map(|i| self.v[i])
    }
}

/// Pairs two rankings with the default `m + 1` placeholder for absent items.
pub fn build_pair(reference: &RankedList, comparison: &RankedList) -> PartialRankPair {
    build_pair_with_placeholder(reference, comparison, comparison.len() + 1)
}

pub fn build_pair_with_placeholder(
    reference: &RankedList,
    comparison: &RankedList,
    placeholder: usize,
) -> PartialRankPair {
    let ranks: std::collections::HashMap<&str, usize> = comparison.iter().collect();
    let (v, present) = reference
        .iter()
        .map(|(item, _)| match ranks.get(item) {
            Some(&r) => (r, true),
            None => (placeholder, false),
        })
        .unzip();
    PartialRankPair {
        n: reference.len(),
        m: comparison.len(),
        v,
        present,
    }
}

pub fn msrc(pair: &PartialRankPair) -> Result<f64, RankCorrError> {
    msrc_with(pair, &MsrcOptions::default())
}

pub fn msrc_with(pair: &PartialRankPair, opts: &MsrcOptions) -> Result<f64, RankCorrError> {
    if pair.n == 0 || pair.m == 0 {
        return Err(RankCorrError::Empty);
    }
    let max = match opts.max_rank {
        MaxRank::ComparisonLength => pair.m,
        MaxRank::IncludePlaceholders => pair.v.iter().copied().max().unwrap_or(0).max(pair.m),
    };
    let sum: u128 = pair
        .v
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as i128 + 1 - v as i128).unsigned_abs().pow(2))
        .sum();
    // v_i = i everywhere, including a single-item list compared with itself
    if sum == 0 {
        return Ok(1.0);
    }
    let denom = (pair.m as u128) * ((max as u128).pow(2).saturating_sub(1));
    if denom == 0 {
        return Err(RankCorrError::DegenerateDenominator { m: pair.m, max });
    }
    let factor = if opts.classic_factor { 6 } else { 1 };
    Ok(1.0 - (factor * sum) as f64 / denom as f64)
}

/// Ranks of `b`'s items in `a`'s order; errors unless both cover the same
/// item set.
fn aligned_ranks(a: &RankedList, b: &RankedList) -> Result<Vec<usize>, RankCorrError> {
    if a.len() != b.len() {
        return Err(RankCorrError::MismatchedItems);
    }
    let pair = build_pair(a, b);
    if pair.present.iter().any(|p| !p) {
        return Err(RankCorrError::MismatchedItems);
    }
    Ok(pair.v)
}

/// `1 - 6 sum d^2 / (n (n^2 - 1))`, no ties.
pub fn spearman_classic(a: &RankedList, b: &RankedList) -> Result<f64, RankCorrError> {
    let v = aligned_ranks(a, b)?;
    let n = v.len();
    if n < 2 {
        return Err(RankCorrError::TooShort(n));
    }
    let sum: u128 = v
        .iter()
        .enumerate()
        .map(|(i, &r)| (i as i128 + 1 - r as i128).unsigned_abs().pow(2))
        .sum();
    let n = n as u128;
    Ok(1.0 - (6 * sum) as f64 / (n * (n * n - 1)) as f64)
}

/// Tau-a: `(concordant - discordant) / (n (n - 1) / 2)`. With `a` in rank
/// order, discordant pairs are the inversions of `b`'s ranks, counted by
/// merge sort.
pub fn kendall_tau(a: &RankedList, b: &RankedList) -> Result<f64, RankCorrError> {
    let mut v = aligned_ranks(a, b)?;
    let n = v.len();
    if n < 2 {
        return Err(RankCorrError::TooShort(n));
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let discordant = count_inversions(&mut v) as i64;
    let concordant = pairs - discordant;
    Ok((concordant - discordant) as f64 / pairs as f64)
}

fn count_inversions(v: &mut [usize]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = count_inversions(&mut v[..mid]) + count_inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            merged.push(v[i]);
            i += 1;
        } else {
            count += (mid - i) as u64;
            merged.push(v[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..]);
    v.copy_from_slice(&merged);
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(items: &[&str]) -> RankedList {
        RankedList::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn pair_identical() {
        let p = build_pair(&list(&["A", "B", "C"]), &list(&["A", "B", "C"]));
        assert_eq!(p.v, vec![1, 2, 3]);
        assert_eq!((p.n, p.m), (3, 3));
        assert_eq!(p.placeholder(), None);
    }

    #[test]
    fn pair_partial_uses_m_plus_one() {
        let p = build_pair(&list(&["A", "B", "C"]), &list(&["C", "A"]));
        assert_eq!(p.v, vec![2, 3, 1]);
        assert_eq!(p.present, vec![true, false, true]);
        assert_eq!(p.placeholder(), Some(3));
    }

    #[test]
    fn pair_total_miss() {
        let p = build_pair(&list(&["A"]), &list(&["B"]));
        assert_eq!(p.v, vec![2]);
        assert_eq!(msrc(&p), Err(RankCorrError::DegenerateDenominator { m: 1, max: 1 }));
        // counting the placeholder in the max makes it defined
        let opts = MsrcOptions {
            max_rank: MaxRank::IncludePlaceholders,
            ..MsrcOptions::default()
        };
        assert_eq!(msrc_with(&p, &opts).unwrap(), 1.0 - 1.0 / 3.0);
    }

    #[test]
    fn msrc_identity() {
        for n in 1..=30 {
            let items: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            let l = RankedList::new(items).unwrap();
            assert_eq!(msrc(&build_pair(&l, &l)).unwrap(), 1.0);
        }
    }

    #[test]
    fn msrc_reversed_three() {
        let p = build_pair(&list(&["A", "B", "C"]), &list(&["C", "B", "A"]));
        assert_eq!(p.v, vec![3, 2, 1]);
        let rs = msrc(&p).unwrap();
        assert!((rs - 2.0 / 3.0).abs() < 1e-12);
        let classic = MsrcOptions {
            classic_factor: true,
            ..MsrcOptions::default()
        };
        assert_eq!(msrc_with(&p, &classic).unwrap(), -1.0);
    }

    #[test]
    fn classic_coefficients() {
        let a = list(&["A", "B", "C"]);
        let r = list(&["C", "B", "A"]);
        assert_eq!(spearman_classic(&a, &a).unwrap(), 1.0);
        assert_eq!(spearman_classic(&a, &r).unwrap(), -1.0);
        assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        assert_eq!(kendall_tau(&a, &r).unwrap(), -1.0);
        assert_eq!(kendall_tau(&a, &list(&["B", "A", "C"])).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn mismatched_sets_rejected() {
        let a = list(&["A", "B", "C"]);
        assert_eq!(
            spearman_classic(&a, &list(&["A", "B", "D"])),
            Err(RankCorrError::MismatchedItems)
        );
        assert_eq!(kendall_tau(&a, &list(&["A", "B"])), Err(RankCorrError::MismatchedItems));
        assert_eq!(
            kendall_tau(&list(&["A"]), &list(&["A"])),
            Err(RankCorrError::TooShort(1))
        );
    }

    #[test]
    fn inversions() {
        let mut v = vec![3, 1, 2, 5, 4];
        assert_eq!(count_inversions(&mut v), 3);
        assert_eq!(v, vec![1, 2, 3, 4, 5]);
    }
}
