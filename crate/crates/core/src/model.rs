//! Record schema and ranking types shared by every pipeline stage.

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("invalid country code {0:?}: expected two ASCII letters")]
    InvalidIso(String),
    #[error("detected_country and country_iso must be set together")]
    CountryIsoMismatch,
    #[error("duplicate item {0:?} in ranked list")]
    DuplicateItem(String),
}

/// Tweet object as delivered by the source, reduced to the fields the
/// pipeline reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTweetObject {
    pub created_at: DateTime<Utc>,
    pub id: String,
    pub text: String,
    pub lang: Option<String>,
    pub user_name: String,
    pub user_screen_name: String,
    pub user_location: Option<String>,
    pub retweeted_status_present: bool,
}

/// The cleaned 11-column record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub created_at: DateTime<Utc>,
    pub tweet_id: String,
    pub language_code: String,
    pub detected_country: Option<String>,
    pub detected_city: Option<String>,
    /// ISO 3166-1 alpha-2.
    pub country_iso: Option<String>,
    /// Verbatim user-reported location.
    pub raw_location: String,
    pub display_name: String,
    pub username: String,
    pub is_retweet: bool,
    pub text: String,
}

impl TweetRecord {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.tweet_id.is_empty() {
            return Err(ModelError::Empty("tweet_id"));
        }
        if self.language_code.is_empty() {
            return Err(ModelError::Empty("language_code"));
        }
        if self.raw_location.is_empty() {
            return Err(ModelError::Empty("raw_location"));
        }
        if self.detected_country.is_some() != self.country_iso.is_some() {
            return Err(ModelError::CountryIsoMismatch);
        }
        if let Some(iso) = &self.country_iso {
            validate_iso(iso)?;
        }
        Ok(())
    }

    pub fn is_located(&self) -> bool {
        self.country_iso.is_some()
    }
}

pub fn validate_iso(code: &str) -> Result<(), ModelError> {
    if code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase()) {
        Ok(())
    } else {
        Err(ModelError::InvalidIso(code.to_string()))
    }
}

/// One row of the place-name dictionary. `possible_match` is a regular
/// expression matched case-insensitively, on word boundaries, against
/// diacritics-normalized text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub possible_match: String,
    pub country: String,
    pub city: Option<String>,
    pub country_iso: String,
}

/// Items in rank order; the rank of an item is its 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankedList {
    items: Vec<String>,
}

impl RankedList {
    pub fn new<I, S>(items: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item.as_str()) {
                return Err(ModelError::DuplicateItem(item.clone()));
            }
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    /// `(item, rank)` pairs, ranks starting at 1.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.items.iter().enumerate().map(|(i, s)| (s.as_str(), i + 1))
    }

    pub fn rank_of(&self, item: &str) -> Option<usize> {
        self.items.iter().position(|s| s == item).map(|p| p + 1)
    }
}

/// Per-country counters. `tweet_count` includes retweets.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountryStats {
    pub country_iso: String,
    pub tweet_count: u64,
    pub retweet_count: u64,
    pub per_language_counts: BTreeMap<String, u64>,
}

impl CountryStats {
    pub fn new(country_iso: impl Into<String>) -> Self {
        Self {
            country_iso: country_iso.into(),
            ..Self::default()
        }
    }

    pub fn add(&mut self, language: &str, is_retweet: bool) {
        self.tweet_count += 1;
        if is_retweet {
            self.retweet_count += 1;
        }
        *self.per_language_counts.entry(language.to_string()).or_default() += 1;
    }

    /// Associative, commutative accumulation of another partition's counts.
    pub fn merge(&mut self, other: &CountryStats) {
        self.tweet_count += other.tweet_count;
        self.retweet_count += other.retweet_count;
        for (lang, n) in &other.per_language_counts {
            *self.per_language_counts.entry(lang.clone()).or_default() += n;
        }
    }

    pub fn original_count(&self) -> u64 {
        self.tweet_count - self.retweet_count
    }

    pub fn is_empty(&self) -> bool {
        self.tweet_count == 0
    }
}
