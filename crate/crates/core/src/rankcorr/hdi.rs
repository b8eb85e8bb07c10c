use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use super::{build_pair, msrc_with, MsrcOptions, RankCorrError};
use crate::model::RankedList;

pub const FIXTURE_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HdiCategory {
    VeryHigh,
    High,
    Medium,
    Low,
}

impl HdiCategory {
    pub const ALL: [HdiCategory; 4] = [Self::VeryHigh, Self::High, Self::Medium, Self::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::VeryHigh => "very_high",
            Self::High => "high",
            Self::Medium => "medium",
            Self::Low => "low",
        }
    }
}

impl fmt::Display for HdiCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HdiCategory {
    type Err = RankCorrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| RankCorrError::Hdi(format!("unknown category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdiRow {
    pub country_iso: String,
    pub category: HdiCategory,
    pub un_rank: u32,
}

/// Reads `country_iso,category,un_rank` rows.
pub fn read_hdi<R: Read>(input: R) -> Result<Vec<HdiRow>, RankCorrError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| RankCorrError::Hdi(e.to_string()))?;
    if header.iter().ne(["country_iso", "category", "un_rank"]) {
        return Err(RankCorrError::Hdi(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| RankCorrError::Hdi(e.to_string()))?;
        let bad = |msg: String| RankCorrError::Hdi(format!("row {}: {msg}", i + 1));
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", rec.len())));
        }
        let country_iso = rec[0].to_string();
        crate::model::validate_iso(&country_iso).map_err(|e| bad(e.to_string()))?;
        let category = rec[1].parse().map_err(|e: RankCorrError| bad(e.to_string()))?;
        let un_rank = rec[2].parse().map_err(|_| bad(format!("bad un_rank {:?}", &rec[2])))?;
        rows.push(HdiRow {
            country_iso,
            category,
            un_rank,
        });
    }
    Ok(rows)
}

/// Reference ranking for one development tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdiFixture {
    pub category: HdiCategory,
    pub countries: RankedList,
    pub un_ranks: Vec<u32>,
}

/// Picks the best-ranked `size` countries of the first three tiers and the
/// worst-ranked `size` of the low tier, each listed in UN order.
pub fn select_fixtures(rows: &[HdiRow], size: usize) -> Result<Vec<HdiFixture>, RankCorrError> {
    HdiCategory::ALL
        .into_iter()
        .map(|category| {
            let mut members: Vec<&HdiRow> = rows.iter().filter(|r| r.category == category).collect();
            if members.is_empty() {
                return Err(RankCorrError::Hdi(format!("missing category {category}")));
            }
            if members.len() < size {
                return Err(RankCorrError::Hdi(format!(
                    "category {category} has {} countries, need {size}",
                    members.len()
                )));
            }
            members.sort_by(|a, b| {
                a.un_rank
                    .cmp(&b.un_rank)
                    .then_with(|| a.country_iso.cmp(&b.country_iso))
            });
            let chosen = if category == HdiCategory::Low {
                &members[members.len() - size..]
            } else {
                &members[..size]
            };
            Ok(HdiFixture {
                category,
                countries: RankedList::new(chosen.iter().map(|r| r.country_iso.clone()))
                    .map_err(|e| RankCorrError::Hdi(e.to_string()))?,
                un_ranks: chosen.iter().map(|r| r.un_rank).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatterPoint {
    pub country_iso: String,
    pub un_rank: u32,
    /// Position in the tweet-count ranking; `None` when the country has no
    /// tweets.
    pub tweet_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryCorrelation {
    pub category: HdiCategory,
    pub rs_prime: f64,
    pub n: usize,
    pub m: usize,
    pub scatter: Vec<ScatterPoint>,
}

/// Correlates each tier's UN ordering with the same countries re-ranked by
/// tweet count (descending, ties by ISO code). Countries without tweets are
/// left out of the comparison ranking.
pub fn hdi_experiment(
    tweet_counts: &HashMap<String, u64>,
    fixtures: &[HdiFixture],
    opts: &MsrcOptions,
) -> Result<Vec<CategoryCorrelation>, RankCorrError> {
    fixtures
        .iter()
        .map(|fx| {
            let mut present: Vec<(&str, u64)> = fx
                .countries
                .iter()
                .filter_map(|(iso, _)| {
                    let n = tweet_counts.get(iso).copied().unwrap_or(0);
                    (n > 0).then_some((iso, n))
                })
                .collect();
            present.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            let comparison = RankedList::new(present.iter().map(|p| p.0)).expect("fixture countries are unique");
            let pair = build_pair(&fx.countries, &comparison);
            let rs_prime =
                msrc_with(&pair, opts).map_err(|e| RankCorrError::Hdi(format!("category {}: {e}", fx.category)))?;
            let scatter = fx
                .countries
                .iter()
                .zip(&fx.un_ranks)
                .map(|((iso, _), &un_rank)| ScatterPoint {
                    country_iso: iso.to_string(),
                    un_rank,
                    tweet_rank: comparison.rank_of(iso),
                })
                .collect();
            Ok(CategoryCorrelation {
                category: fx.category,
                rs_prime,
                n: pair.n,
                m: pair.m,
                scatter,
            })
        })
        .collect()
}
