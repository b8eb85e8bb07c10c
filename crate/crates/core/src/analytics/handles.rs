use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::counts::UNKNOWN_BUCKET;
use super::{percent_tenths, AnalyticsError};
use crate::model::TweetRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TweetKind {
    Original,
    Retweet,
}

impl TweetKind {
    pub fn matches(self, r: &TweetRecord) -> bool {
        r.is_retweet == (self == TweetKind::Retweet)
    }
}

impl fmt::Display for TweetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TweetKind::Original => "original",
            TweetKind::Retweet => "retweet",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandleCount {
    pub username: String,
    /// Most frequent resolved country among the counted records.
    pub country_iso: Option<String>,
    pub count: u64,
    pub kind: TweetKind,
}

#[derive(Default)]
struct HandleAcc {
    count: u64,
    countries: BTreeMap<String, u64>,
}

/// The `k` handles with the most records of `kind`.
pub fn top_users(records: &[TweetRecord], k: usize, kind: TweetKind) -> Result<Vec<HandleCount>, AnalyticsError> {
    if k == 0 {
        return Err(AnalyticsError::ZeroLimit { what: "k" });
    }
    let mut by_handle: HashMap<&str, HandleAcc> = HashMap::new();
    for r in records.iter().filter(|r| kind.matches(r)) {
        let acc = by_handle.entry(r.username.as_str()).or_default();
        acc.count += 1;
        if let Some(iso) = &r.country_iso {
            *acc.countries.entry(iso.clone()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, HandleAcc)> = by_handle.into_iter().collect();
    ranked.sort_by(|a, b| b.1.count.cmp(&a.1.count).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    Ok(ranked
        .into_iter()
        .map(|(username, acc)| HandleCount {
            username: username.to_string(),
            country_iso: modal(&acc.countries),
            count: acc.count,
            kind,
        })
        .collect())
}

// BTreeMap iteration is alphabetical, so the first maximum wins ties.
fn modal(counts: &BTreeMap<String, u64>) -> Option<String> {
    let mut best: Option<(&String, u64)> = None;
    for (iso, &n) in counts {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((iso, n));
        }
    }
    best.map(|(iso, _)| iso.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryShare {
    /// ISO code, or `unknown` for handles without a resolved country.
    pub country_iso: String,
    pub handles: u64,
    pub pct_tenths: u64,
}

/// How the ranked handles split across countries, largest share first.
pub fn country_share_of_top(top: &[HandleCount]) -> Vec<CountryShare> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for h in top {
        *counts
            .entry(h.country_iso.as_deref().unwrap_or(UNKNOWN_BUCKET))
            .or_default() += 1;
    }
    let total = top.len() as u64;
    let mut shares: Vec<CountryShare> = counts
        .into_iter()
        .map(|(iso, handles)| CountryShare {
            country_iso: iso.to_string(),
            handles,
            pct_tenths: percent_tenths(handles, total),
        })
        .collect();
    shares.sort_by(|a, b| {
        b.handles
            .cmp(&a.handles)
            .then_with(|| a.country_iso.cmp(&b.country_iso))
    });
    shares
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn rec(user: &str, iso: Option<&str>, rt: bool) -> TweetRecord {
        TweetRecord {
            created_at: DateTime::from_timestamp(0, 0).unwrap(),
            tweet_id: "1".into(),
            language_code: "en".into(),
            detected_country: iso.map(|_| "C".to_string()),
            detected_city: None,
            country_iso: iso.map(Into::into),
            raw_location: "x".into(),
            display_name: String::new(),
            username: user.into(),
            is_retweet: rt,
            text: String::new(),
        }
    }

    fn corpus() -> Vec<TweetRecord> {
        let mut rs = Vec::new();
        for _ in 0..7 {
            rs.push(rec("ducosome", Some("JP"), false));
        }
        for _ in 0..5 {
            rs.push(rec("zed", Some("VE"), false));
            rs.push(rec("amy", Some("US"), false));
        }
        rs.push(rec("amy", Some("GB"), false));
        rs.push(rec("amy", None, false));
        for _ in 0..9 {
            rs.push(rec("relay", Some("ES"), true));
        }
        rs
    }

    #[test]
    fn ranks_by_count_then_name() {
        let top = top_users(&corpus(), 10, TweetKind::Original).unwrap();
        let names: Vec<_> = top.iter().map(|h| (h.username.as_str(), h.count)).collect();
        assert_eq!(names, [("amy", 7), ("ducosome", 7), ("zed", 5)]);
        assert_eq!(top[0].country_iso.as_deref(), Some("US"));
        assert_eq!(top[1].country_iso.as_deref(), Some("JP"));
        let rt = top_users(&corpus(), 10, TweetKind::Retweet).unwrap();
        assert_eq!(rt.len(), 1);
        assert_eq!(rt[0].kind, TweetKind::Retweet);
    }

    #[test]
    fn tie_is_alphabetical() {
        let mut rs = Vec::new();
        for _ in 0..5 {
            rs.push(rec("bob", None, false));
            rs.push(rec("alice", None, false));
        }
        let top = top_users(&rs, 1, TweetKind::Original).unwrap();
        assert_eq!(top[0].username, "alice");
        assert_eq!(top[0].country_iso, None);
    }

    #[test]
    fn modal_country_tie_is_alphabetical() {
        let rs = vec![rec("a", Some("VE"), false), rec("a", Some("AR"), false)];
        assert_eq!(
            top_users(&rs, 1, TweetKind::Original).unwrap()[0]
                .country_iso
                .as_deref(),
            Some("AR")
        );
    }

    #[test]
    fn zero_k_rejected() {
        assert!(top_users(&corpus(), 0, TweetKind::Original).is_err());
    }

    #[test]
    fn shares() {
        let top = top_users(&corpus(), 10, TweetKind::Original).unwrap();
        let s = country_share_of_top(&top);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|c| c.handles == 1 && c.pct_tenths == 333));

        let one: Vec<_> = (0..4)
            .map(|i| HandleCount {
                username: i.to_string(),
                country_iso: Some("JP".into()),
                count: 1,
                kind: TweetKind::Original,
            })
            .collect();
        assert_eq!(country_share_of_top(&one)[0].pct_tenths, 1000);
    }
}
