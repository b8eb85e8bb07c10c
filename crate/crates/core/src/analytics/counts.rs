use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::model::{CountryStats, TweetRecord};

pub const UNKNOWN_BUCKET: &str = "unknown";

/// Per-country stats keyed by ISO code, plus the records without a country.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountryCounts {
    pub countries: BTreeMap<String, CountryStats>,
    pub unknown: CountryStats,
    /// Display name per ISO code, as resolved.
    pub names: BTreeMap<String, String>,
}

impl CountryCounts {
    pub fn new() -> Self {
        Self {
            unknown: CountryStats::new(UNKNOWN_BUCKET),
            ..Self::default()
        }
    }

    pub fn add(&mut self, r: &TweetRecord) {
        match (&r.country_iso, &r.detected_country) {
            (Some(iso), name) => {
                self.countries
                    .entry(iso.clone())
                    .or_insert_with(|| CountryStats::new(iso.clone()))
                    .add(&r.language_code, r.is_retweet);
                if let Some(name) = name {
                    self.note_name(iso, name);
                }
            }
            (None, _) => self.unknown.add(&r.language_code, r.is_retweet),
        }
    }

    fn note_name(&mut self, iso: &str, name: &str) {
        match self.names.get_mut(iso) {
            Some(existing) if existing.as_str() <= name => {}
            Some(existing) => *existing = name.to_string(),
            None => {
                self.names.insert(iso.to_string(), name.to_string());
            }
        }
    }

    pub fn merge(mut self, other: CountryCounts) -> Self {
        for (iso, stats) in other.countries {
            self.countries
                .entry(iso.clone())
                .or_insert_with(|| CountryStats::new(iso))
                .merge(&stats);
        }
        self.unknown.merge(&other.unknown);
        for (iso, name) in other.names {
            self.note_name(&iso, &name);
        }
        self
    }

    /// Countries by descending tweet count, ties by ISO code.
    pub fn ranked(&self) -> Vec<&CountryStats> {
        let mut v: Vec<_> = self.countries.values().collect();
        v.sort_by(|a, b| {
            b.tweet_count
                .cmp(&a.tweet_count)
                .then_with(|| a.country_iso.cmp(&b.country_iso))
        });
        v
    }

    pub fn tweet_counts(&self) -> HashMap<String, u64> {
        self.countries.iter().map(|(k, v)| (k.clone(), v.tweet_count)).collect()
    }

    pub fn located_total(&self) -> u64 {
        self.countries.values().map(|s| s.tweet_count).sum()
    }

    pub fn total(&self) -> u64 {
        self.located_total() + self.unknown.tweet_count
    }

    pub fn name_of(&self, iso: &str) -> &str {
        self.names.get(iso).map_or("", String::as_str)
    }
}

pub fn count_by_country(records: &[TweetRecord]) -> CountryCounts {
    records
        .par_chunks(4096)
        .map(|chunk| {
            let mut c = CountryCounts::new();
            chunk.iter().for_each(|r| c.add(r));
            c
        })
        .reduce(CountryCounts::new, CountryCounts::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn rec(iso: Option<&str>, lang: &str, rt: bool) -> TweetRecord {
        TweetRecord {
            created_at: DateTime::from_timestamp(0, 0).unwrap(),
            tweet_id: "1".into(),
            language_code: lang.into(),
            detected_country: iso.map(|i| format!("Country {i}")),
            detected_city: None,
            country_iso: iso.map(Into::into),
            raw_location: "x".into(),
            display_name: String::new(),
            username: "u".into(),
            is_retweet: rt,
            text: String::new(),
        }
    }

    #[test]
    fn five_records() {
        let rs = vec![
            rec(Some("US"), "en", false),
            rec(Some("US"), "es", true),
            rec(Some("US"), "en", false),
            rec(Some("FR"), "fr", false),
            rec(None, "en", false),
        ];
        let c = count_by_country(&rs);
        assert_eq!(c.countries["US"].tweet_count, 3);
        assert_eq!(c.countries["US"].retweet_count, 1);
        assert_eq!(c.countries["FR"].tweet_count, 1);
        assert_eq!(c.unknown.tweet_count, 1);
        assert_eq!(c.total(), 5);
        assert_eq!(c.name_of("FR"), "Country FR");
        assert_eq!(
            c.ranked().iter().map(|s| s.country_iso.as_str()).collect::<Vec<_>>(),
            ["US", "FR"]
        );
    }

    #[test]
    fn empty_input() {
        let c = count_by_country(&[]);
        assert!(c.countries.is_empty());
        assert!(c.unknown.is_empty());
    }
}
