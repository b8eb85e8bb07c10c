use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use super::counts::{count_by_country, CountryCounts};
use super::{percent_tenths, AnalyticsError};
use crate::model::TweetRecord;

pub const NATIVE_TABLE_SIZE: usize = 10;

/// ISO country code to the language codes counted as native there.
pub type NativeMap = BTreeMap<String, BTreeSet<String>>;

/// Reads `country_iso,language_code` rows; a country may span several rows.
pub fn read_native_map<R: Read>(input: R) -> Result<NativeMap, AnalyticsError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(["country_iso", "language_code"]) {
        return Err(AnalyticsError::NativeMapRow {
            row: 0,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut map = NativeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let bad = |message: String| AnalyticsError::NativeMapRow {
            row: i as u64 + 1,
            message,
        };
        let (iso, lang) = (row.get(0).unwrap_or(""), row.get(1).unwrap_or(""));
        crate::model::validate_iso(iso).map_err(|e| bad(e.to_string()))?;
        if lang.is_empty() {
            return Err(bad("empty language_code".into()));
        }
        map.entry(iso.to_string()).or_default().insert(lang.to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NativeLanguageRow {
    pub rank: usize,
    pub country_iso: String,
    pub country: String,
    pub native_languages: BTreeSet<String>,
    pub total_tweets: u64,
    pub tweets_in_native: u64,
    /// Tenths of a percent, rounded half up.
    pub pct_native_tenths: u64,
    /// `1000 - pct_native_tenths`, so the pair always sums to 100.0.
    pub pct_other_tenths: u64,
}

impl NativeLanguageRow {
    pub fn pct_native(&self) -> f64 {
        self.pct_native_tenths as f64 / 10.0
    }

    pub fn pct_other(&self) -> f64 {
        self.pct_other_tenths as f64 / 10.0
    }
}

/// Native-language share for the `top` countries with the most tweets.
pub fn native_language_rows(
    counts: &CountryCounts,
    native: &NativeMap,
    top: usize,
) -> Result<Vec<NativeLanguageRow>, AnalyticsError> {
    counts
        .ranked()
        .into_iter()
        .take(top)
        .enumerate()
        .map(|(i, stats)| {
            let langs = native
                .get(&stats.country_iso)
                .ok_or_else(|| AnalyticsError::MissingNativeLanguage(stats.country_iso.clone()))?;
            let in_native: u64 = langs.iter().filter_map(|l| stats.per_language_counts.get(l)).sum();
            let pct = percent_tenths(in_native, stats.tweet_count);
            Ok(NativeLanguageRow {
                rank: i + 1,
                country_iso: stats.country_iso.clone(),
                country: counts.name_of(&stats.country_iso).to_string(),
                native_languages: langs.clone(),
                total_tweets: stats.tweet_count,
                tweets_in_native: in_native,
                pct_native_tenths: pct,
                pct_other_tenths: 1000 - pct,
            })
        })
        .collect()
}

pub fn native_language_table(
    records: &[TweetRecord],
    native: &NativeMap,
) -> Result<Vec<NativeLanguageRow>, AnalyticsError> {
    native_language_rows(&count_by_country(records), native, NATIVE_TABLE_SIZE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn recs(iso: &str, lang: &str, n: usize) -> Vec<TweetRecord> {
        (0..n)
            .map(|i| TweetRecord {
                created_at: DateTime::from_timestamp(0, 0).unwrap(),
                tweet_id: i.to_string(),
                language_code: lang.into(),
                detected_country: Some(format!("Country {iso}")),
                detected_city: None,
                country_iso: Some(iso.into()),
                raw_location: "x".into(),
                display_name: String::new(),
                username: "u".into(),
                is_retweet: false,
                text: String::new(),
            })
            .collect()
    }

    fn map(rows: &str) -> NativeMap {
        read_native_map(format!("country_iso,language_code\n{rows}").as_bytes()).unwrap()
    }

    #[test]
    fn us_row() {
        let mut rs = recs("US", "en", 875);
        rs.extend(recs("US", "es", 125));
        let rows = native_language_table(&rs, &map("US,en\n")).unwrap();
        assert_eq!(rows[0].pct_native_tenths, 875);
        assert_eq!(rows[0].pct_other_tenths, 125);
        assert_eq!(rows[0].pct_native(), 87.5);
        assert_eq!(rows[0].tweets_in_native, 875);
    }

    #[test]
    fn all_native() {
        let rows = native_language_table(&recs("JP", "ja", 10), &map("JP,ja\n")).unwrap();
        assert_eq!((rows[0].pct_native_tenths, rows[0].pct_other_tenths), (1000, 0));
    }

    #[test]
    fn two_native_languages() {
        let mut rs = recs("CA", "en", 7433);
        rs.extend(recs("CA", "fr", 313));
        rs.extend(recs("CA", "es", 261));
        let rows = native_language_table(&rs, &map("CA,en\nCA,fr\n")).unwrap();
        // 7746 / 8007 = 96.74%
        assert_eq!(rows[0].tweets_in_native, 7746);
        assert_eq!(rows[0].pct_native(), 96.7);
        assert_eq!(rows[0].pct_other(), 3.3);
    }

    #[test]
    fn top_ten_only_and_missing_country() {
        let mut rs = Vec::new();
        let mut m = String::new();
        for (i, iso) in ["AA", "BB", "CC", "DD", "EE", "FF", "GG", "HH", "II", "JJ", "KK"]
            .iter()
            .enumerate()
        {
            rs.extend(recs(iso, "xx", 20 - i));
            if *iso != "KK" {
                m.push_str(&format!("{iso},xx\n"));
            }
        }
        let rows = native_language_table(&rs, &map(&m)).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[9].country_iso, "JJ");
        assert_eq!(rows[9].rank, 10);

        let err = native_language_table(&rs, &map("AA,xx\n")).unwrap_err();
        assert_eq!(err.to_string(), "country BB is missing from the native-language map");
    }

    #[test]
    fn native_map_validation() {
        assert!(read_native_map("country_iso,language_code\nusa,en\n".as_bytes()).is_err());
        assert!(read_native_map("iso,lang\n".as_bytes()).is_err());
        let m = map("CA,en\nCA,fr\nUS,en\n");
        assert_eq!(m["CA"].len(), 2);
    }
}
