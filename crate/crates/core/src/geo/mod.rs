//! Free-text location resolution against an ordered gazetteer.
//!
//! Text is diacritics-normalized, checked against a denylist of fictional
//! places, then matched entry by entry; the first matching entry supplies the
//! country, city and ISO code.

mod gazetteer;
mod normalize;

use std::collections::HashMap;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gazetteer::{read_entries, read_entries_from_path, Gazetteer, DEFAULT_FICTIONAL, GAZETTEER_HEADER};
pub use normalize::normalize_diacritics;

use crate::model::TweetRecord;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected gazetteer header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
    #[error("row {row}: duplicate pattern {pattern:?}")]
    DuplicatePattern { row: u64, pattern: String },
    #[error("label refers to unknown record id {0:?}")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationMatch {
    pub country: String,
    pub city: Option<String>,
    pub country_iso: String,
    pub matched_entry_id: usize,
}

pub fn resolve_location(plaintext: &str, gazetteer: &Gazetteer) -> Option<LocationMatch> {
    let normalized = normalize_diacritics(plaintext);
    if normalized.trim().is_empty() || gazetteer.is_fictional(&normalized) {
        return None;
    }
    let id = gazetteer.first_match_indexed(&normalized)?;
    let e = &gazetteer.entries()[id];
    Some(LocationMatch {
        country: e.country.clone(),
        city: e.city.clone(),
        country_iso: e.country_iso.clone(),
        matched_entry_id: id,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResolverMetrics {
    pub total: u64,
    pub resolved: u64,
    pub unresolved: u64,
    /// Resolved records whose country matches the label; only known when
    /// labels were supplied.
    pub correct: Option<u64>,
    pub detection_rate: f64,
    pub precision: Option<f64>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ResolverMetrics {
    pub fn from_counts(total: u64, resolved: u64, correct: Option<u64>) -> Self {
        Self {
            total,
            resolved,
            unresolved: total - resolved,
            correct,
            detection_rate: ratio(resolved, total),
            precision: correct.map(|c| ratio(c, resolved)),
        }
    }

    pub fn merge(&self, other: &ResolverMetrics) -> Self {
        let correct = match (self.correct, other.correct) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Self::from_counts(self.total + other.total, self.resolved + other.resolved, correct)
    }
}

/// Sets the detected fields of every record (clearing them where nothing
/// matches) and counts the outcome.
pub fn resolve_all(records: &mut [TweetRecord], gazetteer: &Gazetteer) -> ResolverMetrics {
    let resolved: u64 = records
        .par_iter_mut()
        .map(|r| match resolve_location(&r.raw_location, gazetteer) {
            Some(m) => {
                r.detected_country = Some(m.country);
                r.detected_city = m.city;
                r.country_iso = Some(m.country_iso);
                1
            }
            None => {
                r.detected_country = None;
                r.detected_city = None;
                r.country_iso = None;
                0
            }
        })
        .sum();
    ResolverMetrics::from_counts(records.len() as u64, resolved, None)
}

/// Distinct normalized locations of unresolved records, most frequent first.
pub fn unknown_report(records: &[TweetRecord]) -> Vec<(String, u64)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in records.iter().filter(|r| r.country_iso.is_none()) {
        *counts.entry(normalize_diacritics(&r.raw_location)).or_default() += 1;
    }
    let mut rows: Vec<_> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

/// Scores already-resolved records against hand labels (`tweet_id` → true
/// ISO code, `None` when the location names no real place). Only labeled
/// records are scored.
pub fn evaluate_resolver(
    records: &[TweetRecord],
    labels: &HashMap<String, Option<String>>,
) -> Result<ResolverMetrics, GeoError> {
    let by_id: HashMap<&str, &TweetRecord> = records.iter().map(|r| (r.tweet_id.as_str(), r)).collect();
    let mut ids: Vec<&String> = labels.keys().collect();
    ids.sort();
    let (mut total, mut resolved, mut correct) = (0u64, 0u64, 0u64);
    for id in ids {
        let record = by_id
            .get(id.as_str())
            .ok_or_else(|| GeoError::UnknownLabel(id.clone()))?;
        total += 1;
        if let Some(iso) = &record.country_iso {
            resolved += 1;
            if labels[id].as_deref() == Some(iso.as_str()) {
                correct += 1;
            }
        }
    }
    Ok(ResolverMetrics::from_counts(total, resolved, Some(correct)))
}

/// Change in detection rate between two runs over the same population,
/// computed from counts so equal totals give an exact ratio.
pub fn detection_delta(before: &ResolverMetrics, after: &ResolverMetrics) -> f64 {
    if before.total == after.total {
        if before.total == 0 {
            return 0.0;
        }
        (after.resolved as f64 - before.resolved as f64) / before.total as f64
    } else {
        after.detection_rate - before.detection_rate
    }
}

/// Reads `tweet_id,country_iso` label rows; an empty ISO means "no real
/// place".
pub fn read_labels<R: io::Read>(input: R) -> Result<HashMap<String, Option<String>>, GeoError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut labels = HashMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let id = row.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            return Err(GeoError::Row {
                row: i as u64 + 1,
                message: "empty tweet_id".into(),
            });
        }
        let iso = row.get(1).filter(|s| !s.is_empty()).map(str::to_string);
        labels.insert(id, iso);
    }
    Ok(labels)
}
