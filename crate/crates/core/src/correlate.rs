//! The correlate stage: country counts against development-index tiers.

use std::collections::HashMap;
use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::output::{read_rows, write_rows, CountryCountRow};
use crate::analytics::AnalyticsError;
use crate::rankcorr::{
    hdi_experiment, read_hdi, select_fixtures, CategoryCorrelation, HdiCategory, MsrcOptions, RankCorrError,
    FIXTURE_SIZE,
};

pub const CORRELATIONS: &str = "correlations.csv";

pub fn scatter_file(category: HdiCategory) -> String {
    format!("scatter_{category}.csv")
}

#[derive(Debug, Error)]
pub enum CorrelateError {
    #[error("{0}")]
    Table(#[from] AnalyticsError),
    #[error(transparent)]
    RankCorr(#[from] RankCorrError),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub category: HdiCategory,
    /// Six decimals.
    pub rs_prime: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub country_iso: String,
    pub un_rank: u32,
    /// Empty when the country has no tweets.
    pub tweet_rank: Option<usize>,
}

impl Serialize for HdiCategory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for HdiCategory {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn read_country_counts(path: &Path) -> Result<HashMap<String, u64>, CorrelateError> {
    let rows: Vec<CountryCountRow> = read_rows(path)?;
    Ok(rows.into_iter().map(|r| (r.country_iso, r.tweets)).collect())
}

pub fn correlate(
    tweet_counts: &HashMap<String, u64>,
    hdi_path: &Path,
    opts: &MsrcOptions,
) -> Result<Vec<CategoryCorrelation>, CorrelateError> {
    let file = File::open(hdi_path).map_err(|source| CorrelateError::Io {
        path: hdi_path.display().to_string(),
        source,
    })?;
    let fixtures = select_fixtures(&read_hdi(file)?, FIXTURE_SIZE)?;
    Ok(hdi_experiment(tweet_counts, &fixtures, opts)?)
}

pub fn write_correlations(results: &[CategoryCorrelation], out_dir: &Path) -> Result<(), CorrelateError> {
    fs::create_dir_all(out_dir).map_err(|source| CorrelateError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let rows: Vec<CorrelationRow> = results
        .iter()
        .map(|c| CorrelationRow {
            category: c.category,
            rs_prime: format!("{:.6}", c.rs_prime),
            n: c.n,
            m: c.m,
        })
        .collect();
    write_rows(&out_dir.join(CORRELATIONS), &rows)?;
    for c in results {
        let scatter: Vec<ScatterRow> = c
            .scatter
            .iter()
            .map(|p| ScatterRow {
                country_iso: p.country_iso.clone(),
                un_rank: p.un_rank,
                tweet_rank: p.tweet_rank,
            })
            .collect();
        write_rows(&out_dir.join(scatter_file(c.category)), &scatter)?;
    }
    Ok(())
}
