//! Plot-ready data files and a hashed manifest assembled from the analyze and
//! correlate outputs in one directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::output::{
    read_rows, write_rows, CountryCountRow, HandleRow, NativeTableRow, WordRow, COUNTRY_COUNTS, NATIVE_TABLE,
    TOP_USERS_RETWEETS, TOP_USERS_TWEETS, TOP_WORDS,
};
use crate::analytics::{country_share_of_top, format_tenths, AnalyticsError, HandleCount, TweetKind};
use crate::correlate::{scatter_file, ScatterRow, CORRELATIONS};
use crate::rankcorr::HdiCategory;

pub const MANIFEST: &str = "manifest.json";
pub const CHOROPLETH: &str = "choropleth.csv";
pub const FIG3_TOP_USERS: &str = "fig3_top_users.csv";
pub const FIG4_TOP20: &str = "fig4_top20.csv";
pub const FIG6_WORDS: &str = "fig6_words.csv";
pub const TABLE1: &str = "table1.csv";

const TOP_HANDLES_SHOWN: usize = 20;
const TOP_WORDS_SHOWN: usize = 20;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("reading {file}: {source}")]
    Input { file: String, source: AnalyticsError },
    #[error(transparent)]
    Output(#[from] AnalyticsError),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

/// Fig. 7 file name for one tier.
pub fn fig7_file(category: HdiCategory) -> String {
    format!("fig7_scatter_{category}.csv")
}

/// Every file [`build_report`] writes besides the manifest, in manifest order.
pub fn report_artifacts() -> Vec<String> {
    let mut names: Vec<String> = [CHOROPLETH, FIG3_TOP_USERS, FIG4_TOP20, FIG6_WORDS]
        .map(String::from)
        .into();
    names.extend(HdiCategory::ALL.map(fig7_file));
    names.push(TABLE1.into());
    names
}

/// Upstream files the report reads, checked in this order.
pub fn required_inputs() -> Vec<String> {
    let mut names: Vec<String> = [
        COUNTRY_COUNTS,
        TOP_USERS_TWEETS,
        TOP_USERS_RETWEETS,
        TOP_WORDS,
        NATIVE_TABLE,
        CORRELATIONS,
    ]
    .map(String::from)
    .into();
    names.extend(HdiCategory::ALL.map(scatter_file));
    names
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// Relative to the report directory.
    pub path: String,
    /// Data rows, header excluded.
    pub rows: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub manifest: Vec<ManifestEntry>,
    /// Not covered by any hash; taken from `SOURCE_DATE_EPOCH` when set.
    pub generated_at: String,
    pub pipeline_config: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ChoroplethRow<'a> {
    country_iso: &'a str,
    country: &'a str,
    tweets: u64,
    bin: usize,
}

#[derive(Serialize)]
struct ShareRow {
    /// `tweets` or `retweets`.
    kind: &'static str,
    country_iso: String,
    handles: u64,
    percent: String,
}

#[derive(Serialize)]
struct Table1Row {
    rank: usize,
    country: String,
    native_languages: String,
    pct_native: String,
    pct_other: String,
}

fn read_input<T: serde::de::DeserializeOwned>(dir: &Path, file: &str) -> Result<Vec<T>, ReportError> {
    read_rows(&dir.join(file)).map_err(|source| ReportError::Input {
        file: file.to_string(),
        source,
    })
}

fn share_rows(handles: &[HandleRow], kind: TweetKind) -> Vec<ShareRow> {
    let top: Vec<HandleCount> = handles
        .iter()
        .map(|h| HandleCount {
            username: h.username.clone(),
            country_iso: h.country_iso.clone(),
            count: h.count,
            kind,
        })
        .collect();
    country_share_of_top(&top)
        .into_iter()
        .map(|s| ShareRow {
            kind: match kind {
                TweetKind::Original => "tweets",
                TweetKind::Retweet => "retweets",
            },
            country_iso: s.country_iso,
            handles: s.handles,
            percent: format_tenths(s.pct_tenths),
        })
        .collect()
}

fn generated_at() -> String {
    let ts = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn entry(dir: &Path, name: &str) -> Result<ManifestEntry, ReportError> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let rows = rdr.records().count() as u64;
    Ok(ManifestEntry {
        name: name.trim_end_matches(".csv").to_string(),
        path: name.to_string(),
        rows,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Writes the figure and table files plus `manifest.json` into `dir`.
pub fn build_report(dir: &Path, pipeline_config: &BTreeMap<String, String>) -> Result<ReportBundle, ReportError> {
    if let Some(missing) = required_inputs().into_iter().find(|f| !dir.join(f).is_file()) {
        return Err(ReportError::MissingArtifact(missing));
    }

    let mut countries: Vec<CountryCountRow> = read_input(dir, COUNTRY_COUNTS)?;
    countries.sort_by(|a, b| a.country_iso.cmp(&b.country_iso));
    let choropleth: Vec<ChoroplethRow> = countries
        .iter()
        .map(|c| ChoroplethRow {
            country_iso: &c.country_iso,
            country: &c.country,
            tweets: c.tweets,
            bin: c.bin,
        })
        .collect();
    write_rows(&dir.join(CHOROPLETH), &choropleth)?;

    let originals: Vec<HandleRow> = read_input(dir, TOP_USERS_TWEETS)?;
    let retweets: Vec<HandleRow> = read_input(dir, TOP_USERS_RETWEETS)?;
    let mut shares = share_rows(&originals, TweetKind::Original);
    shares.extend(share_rows(&retweets, TweetKind::Retweet));
    write_rows(&dir.join(FIG3_TOP_USERS), &shares)?;
    write_rows(
        &dir.join(FIG4_TOP20),
        &originals[..originals.len().min(TOP_HANDLES_SHOWN)],
    )?;

    let words: Vec<WordRow> = read_input(dir, TOP_WORDS)?;
    write_rows(&dir.join(FIG6_WORDS), &words[..words.len().min(TOP_WORDS_SHOWN)])?;

    for category in HdiCategory::ALL {
        let scatter: Vec<ScatterRow> = read_input(dir, &scatter_file(category))?;
        write_rows(&dir.join(fig7_file(category)), &scatter)?;
    }

    let native: Vec<NativeTableRow> = read_input(dir, NATIVE_TABLE)?;
    let table: Vec<Table1Row> = native
        .into_iter()
        .map(|r| Table1Row {
            rank: r.rank,
            country: if r.country.is_empty() { r.country_iso } else { r.country },
            native_languages: r.native_languages,
            pct_native: r.pct_native,
            pct_other: r.pct_other,
        })
        .collect();
    write_rows(&dir.join(TABLE1), &table)?;

    let manifest = report_artifacts()
        .iter()
        .map(|name| entry(dir, name))
        .collect::<Result<Vec<_>, _>>()?;
    let bundle = ReportBundle {
        manifest,
        generated_at: generated_at(),
        pipeline_config: pipeline_config.clone(),
    };
    let path = dir.join(MANIFEST);
    let mut json = serde_json::to_string_pretty(&bundle)?;
    json.push('\n');
    fs::write(&path, json).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(bundle)
}

/// Re-hashes every manifest entry and reports those that no longer match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, ReportError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let bundle: ReportBundle = serde_json::from_str(&text)?;
    let mut stale = Vec::new();
    for e in &bundle.manifest {
        match entry(dir, &e.path) {
            Ok(now) if now.sha256 == e.sha256 && now.rows == e.rows => {}
            _ => stale.push(e.path.clone()),
        }
    }
    Ok(stale)
}
