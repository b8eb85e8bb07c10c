//! CSV files written by the analyze stage.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    bin_countries, count_by_country, format_tenths, language_distribution, native_language_rows, percent_tenths,
    top_users, word_frequency, AnalyticsError, BinScheme, HandleCount, NativeMap, TweetKind, NATIVE_TABLE_SIZE,
};
use crate::model::TweetRecord;

pub const COUNTRY_COUNTS: &str = "country_counts.csv";
pub const BINS: &str = "bins.csv";
pub const TOP_USERS_TWEETS: &str = "top_users_tweets.csv";
pub const TOP_USERS_RETWEETS: &str = "top_users_retweets.csv";
pub const TOP_WORDS: &str = "top_words.csv";
pub const LANGUAGES: &str = "languages.csv";
pub const NATIVE_TABLE: &str = "native_table.csv";

pub const ANALYZE_OUTPUTS: [&str; 7] = [
    COUNTRY_COUNTS,
    BINS,
    TOP_USERS_TWEETS,
    TOP_USERS_RETWEETS,
    TOP_WORDS,
    LANGUAGES,
    NATIVE_TABLE,
];

pub const DEFAULT_TOP_USERS: usize = 500;
pub const DEFAULT_TOP_WORDS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryCountRow {
    pub rank: usize,
    pub country_iso: String,
    pub country: String,
    pub tweets: u64,
    pub retweets: u64,
    pub originals: u64,
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin: usize,
    pub lower: u64,
    pub upper: Option<u64>,
    pub countries: usize,
    pub tweets: u64,
    /// Share of located tweets, one decimal.
    pub percent: String,
    /// Space-separated ISO codes.
    pub members: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleRow {
    pub rank: usize,
    pub username: String,
    pub country_iso: Option<String>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRow {
    pub rank: usize,
    pub token: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageRow {
    pub language_code: String,
    pub count: u64,
    pub percent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeTableRow {
    pub rank: usize,
    pub country_iso: String,
    pub country: String,
    pub native_languages: String,
    pub tweets: u64,
    pub native_tweets: u64,
    pub pct_native: String,
    pub pct_other: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub top_users: usize,
    pub top_words: usize,
    pub bins: BinScheme,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            top_users: DEFAULT_TOP_USERS,
            top_words: DEFAULT_TOP_WORDS,
            bins: BinScheme::default(),
        }
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), AnalyticsError> {
    let file = File::create(path).map_err(|source| AnalyticsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| AnalyticsError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, AnalyticsError> {
    let file = File::open(path).map_err(|source| AnalyticsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

fn handle_rows(top: &[HandleCount]) -> Vec<HandleRow> {
    top.iter()
        .enumerate()
        .map(|(i, h)| HandleRow {
            rank: i + 1,
            username: h.username.clone(),
            country_iso: h.country_iso.clone(),
            count: h.count,
        })
        .collect()
}

/// Runs every aggregation over `records` and writes the seven analyze files
/// into `out_dir`.
pub fn write_analysis(
    records: &[TweetRecord],
    native: &NativeMap,
    opts: &AnalyzeOptions,
    out_dir: &Path,
) -> Result<(), AnalyticsError> {
    fs::create_dir_all(out_dir).map_err(|source| AnalyticsError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let counts = count_by_country(records);
    // Computed before anything is written so a bad map leaves no partial output.
    let native_rows = native_language_rows(&counts, native, NATIVE_TABLE_SIZE)?;
    let originals = top_users(records, opts.top_users, TweetKind::Original)?;
    let retweets = top_users(records, opts.top_users, TweetKind::Retweet)?;
    let words = word_frequency(records, opts.top_words)?;

    let country_rows: Vec<CountryCountRow> = counts
        .ranked()
        .into_iter()
        .enumerate()
        .map(|(i, s)| CountryCountRow {
            rank: i + 1,
            country_iso: s.country_iso.clone(),
            country: counts.name_of(&s.country_iso).to_string(),
            tweets: s.tweet_count,
            retweets: s.retweet_count,
            originals: s.original_count(),
            bin: opts.bins.bin_of(s.tweet_count),
        })
        .collect();
    write_rows(&out_dir.join(COUNTRY_COUNTS), &country_rows)?;

    let located = counts.located_total();
    let bin_rows: Vec<BinRow> = bin_countries(&counts, &opts.bins)
        .into_iter()
        .map(|g| BinRow {
            bin: g.bin,
            lower: g.lower,
            upper: g.upper,
            countries: g.countries.len(),
            tweets: g.total,
            percent: format_tenths(percent_tenths(g.total, located)),
            members: g.countries.join(" "),
        })
        .collect();
    write_rows(&out_dir.join(BINS), &bin_rows)?;

    write_rows(&out_dir.join(TOP_USERS_TWEETS), &handle_rows(&originals))?;
    write_rows(&out_dir.join(TOP_USERS_RETWEETS), &handle_rows(&retweets))?;

    let word_rows: Vec<WordRow> = words
        .into_iter()
        .enumerate()
        .map(|(i, (token, count))| WordRow {
            rank: i + 1,
            token,
            count,
        })
        .collect();
    write_rows(&out_dir.join(TOP_WORDS), &word_rows)?;

    let total = records.len() as u64;
    let lang_rows: Vec<LanguageRow> = language_distribution(records)
        .ranked()
        .into_iter()
        .map(|(code, count)| LanguageRow {
            language_code: code.to_string(),
            count,
            percent: format_tenths(percent_tenths(count, total)),
        })
        .collect();
    write_rows(&out_dir.join(LANGUAGES), &lang_rows)?;

    let table: Vec<NativeTableRow> = native_rows
        .into_iter()
        .map(|r| NativeTableRow {
            rank: r.rank,
            country_iso: r.country_iso,
            country: r.country,
            native_languages: r.native_languages.into_iter().collect::<Vec<_>>().join(" "),
            tweets: r.total_tweets,
            native_tweets: r.tweets_in_native,
            pct_native: format_tenths(r.pct_native_tenths),
            pct_other: format_tenths(r.pct_other_tenths),
        })
        .collect();
    write_rows(&out_dir.join(NATIVE_TABLE), &table)
}
