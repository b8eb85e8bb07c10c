use super::counts::CountryCounts;

/// Half-open tweet-count intervals `[b_{k-1}, b_k)` with an open top bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinScheme {
    boundaries: Vec<u64>,
}

impl Default for BinScheme {
    /// `<5k, 5k-50k, 50k-100k, 100k-500k, 500k-1M, 1M-5M, 5M-10M, >=10M`
    fn default() -> Self {
        Self {
            boundaries: vec![5_000, 50_000, 100_000, 500_000, 1_000_000, 5_000_000, 10_000_000],
        }
    }
}

impl BinScheme {
    pub fn new(boundaries: Vec<u64>) -> Option<Self> {
        let ascending = boundaries.windows(2).all(|w| w[0] < w[1]);
        (ascending && !boundaries.is_empty()).then_some(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    pub fn bin_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// 1-based bin number of `count`.
    pub fn bin_of(&self, count: u64) -> usize {
        self.boundaries.partition_point(|&b| b <= count) + 1
    }

    /// Inclusive lower and exclusive upper bound of 1-based `bin`.
    pub fn bounds(&self, bin: usize) -> (u64, Option<u64>) {
        let lower = if bin == 1 { 0 } else { self.boundaries[bin - 2] };
        (lower, self.boundaries.get(bin - 1).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinGroup {
    /// 1-based.
    pub bin: usize,
    pub lower: u64,
    pub upper: Option<u64>,
    /// Members by descending count, ties by ISO code.
    pub countries: Vec<String>,
    pub total: u64,
}

/// Groups every country with at least one tweet; the unknown bucket is not a
/// country and is left out.
pub fn bin_countries(counts: &CountryCounts, scheme: &BinScheme) -> Vec<BinGroup> {
    let mut groups: Vec<BinGroup> = (1..=scheme.bin_count())
        .map(|bin| {
            let (lower, upper) = scheme.bounds(bin);
            BinGroup {
                bin,
                lower,
                upper,
                countries: Vec::new(),
                total: 0,
            }
        })
        .collect();
    for stats in counts.ranked() {
        if stats.tweet_count == 0 {
            continue;
        }
        let g = &mut groups[scheme.bin_of(stats.tweet_count) - 1];
        g.countries.push(stats.country_iso.clone());
        g.total += stats.tweet_count;
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CountryStats;

    #[test]
    fn paper_boundaries() {
        let s = BinScheme::default();
        assert_eq!(s.bin_count(), 8);
        assert_eq!(s.bin_of(0), 1);
        assert_eq!(s.bin_of(4_999), 1);
        assert_eq!(s.bin_of(5_000), 2);
        assert_eq!(s.bin_of(12_299_716), 8);
        assert_eq!(s.bounds(1), (0, Some(5_000)));
        assert_eq!(s.bounds(8), (10_000_000, None));
    }

    #[test]
    fn rejects_unsorted() {
        assert!(BinScheme::new(vec![5, 5]).is_none());
        assert!(BinScheme::new(vec![]).is_none());
        assert!(BinScheme::new(vec![1, 2]).is_some());
    }

    #[test]
    fn groups_partition_countries() {
        let mut c = CountryCounts::new();
        for (iso, n) in [
            ("US", 12_299_716),
            ("BR", 3_109_126),
            ("NG", 583_463),
            ("TD", 12),
            ("ZZ", 0),
        ] {
            let mut s = CountryStats::new(iso);
            s.tweet_count = n;
            c.countries.insert(iso.into(), s);
        }
        let g = bin_countries(&c, &BinScheme::default());
        assert_eq!(g.len(), 8);
        assert_eq!(g[0].countries, ["TD"]);
        assert_eq!(g[4].countries, ["NG"]);
        assert_eq!(g[5].countries, ["BR"]);
        assert_eq!(g[7].countries, ["US"]);
        assert_eq!(g.iter().map(|g| g.total).sum::<u64>(), c.located_total());
        assert_eq!(g.iter().map(|g| g.countries.len()).sum::<usize>(), 4);
    }
}
