//! Aggregations over resolved records: per-country counts and bins, top
//! handles, word and language frequencies, and native-language shares.
//!
//! Everything is a map-then-merge over private accumulators. Rankings sort
//! by descending count, then ascending key.

mod bins;
mod counts;
mod handles;
mod native;
pub mod output;
mod text;

use thiserror::Error;

pub use bins::{bin_countries, BinGroup, BinScheme};
pub use counts::{count_by_country, CountryCounts, UNKNOWN_BUCKET};
pub use handles::{country_share_of_top, top_users, CountryShare, HandleCount, TweetKind};
pub use native::{
    native_language_rows, native_language_table, read_native_map, NativeLanguageRow, NativeMap, NATIVE_TABLE_SIZE,
};
pub use text::{language_distribution, tokenize, word_frequency, LanguageDistribution};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("country {0} is missing from the native-language map")]
    MissingNativeLanguage(String),
    #[error("{what} must be at least 1")]
    ZeroLimit { what: &'static str },
    #[error("native map row {row}: {message}")]
    NativeMapRow { row: u64, message: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// `100 * num / den` in tenths of a percent, rounded half up. Zero when
/// `den` is zero.
pub fn percent_tenths(num: u64, den: u64) -> u64 {
    if den == 0 {
        return 0;
    }
    let (num, den) = (num as u128, den as u128);
    ((2000 * num + den) / (2 * den)) as u64
}

/// Renders tenths of a percent as `87.5`.
pub fn format_tenths(tenths: u64) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_half_up() {
        assert_eq!(percent_tenths(875, 1000), 875);
        assert_eq!(percent_tenths(774, 800), 968); // 96.75 rounds up
        assert_eq!(percent_tenths(1, 3), 333);
        assert_eq!(percent_tenths(2, 3), 667);
        assert_eq!(percent_tenths(5, 0), 0);
        assert_eq!(format_tenths(875), "87.5");
        assert_eq!(format_tenths(1000), "100.0");
        assert_eq!(format_tenths(3), "0.3");
    }
}
