use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use unicode_normalization::char::is_combining_mark;

use super::AnalyticsError;
use crate::model::TweetRecord;

const STANDALONE_SYMBOLS: [&str; 2] = ["-", "%"];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c) || is_apostrophe(c)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercased word tokens.
///
/// Tokens are maximal runs of letters, digits and apostrophes (apostrophes
/// trimmed from the ends). `-` and `%` standing alone between spaces are
/// kept as tokens. URLs and `@mentions` are dropped; a `#hashtag` keeps its
/// body.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if STANDALONE_SYMBOLS.contains(&chunk) {
            out.push(chunk.to_string());
            continue;
        }
        let lower = chunk.to_lowercase();
        let mut rest = lower.as_str();
        if rest.starts_with("www.") {
            continue;
        }
        if let Some(pos) = rest.find("http://").or_else(|| rest.find("https://")) {
            rest = &rest[..pos];
        }
        if let Some(mention) = rest.strip_prefix('@') {
            let end = mention
                .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                .unwrap_or(mention.len());
            rest = &mention[end..];
        }
        for run in rest.split(|c: char| !is_word_char(c)) {
            let word = run.trim_matches(is_apostrophe);
            if !word.is_empty() {
                out.push(word.to_string());
            }
        }
    }
    out
}

/// The `n` most frequent tokens across all record texts.
pub fn word_frequency(records: &[TweetRecord], n: usize) -> Result<Vec<(String, u64)>, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::ZeroLimit { what: "n" });
    }
    let counts = records
        .par_chunks(2048)
        .map(|chunk| {
            let mut m: HashMap<String, u64> = HashMap::new();
            for r in chunk {
                for t in tokenize(&r.text) {
                    *m.entry(t).or_default() += 1;
                }
            }
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    Ok(ranked)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LanguageDistribution {
    pub counts: BTreeMap<String, u64>,
}

impl LanguageDistribution {
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Languages by descending count, ties by code.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }
}

pub fn language_distribution(records: &[TweetRecord]) -> LanguageDistribution {
    let mut counts = BTreeMap::new();
    for r in records {
        *counts.entry(r.language_code.clone()).or_default() += 1;
    }
    LanguageDistribution { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn rec(text: &str, lang: &str) -> TweetRecord {
        TweetRecord {
            created_at: DateTime::from_timestamp(0, 0).unwrap(),
            tweet_id: "1".into(),
            language_code: lang.into(),
            detected_country: None,
            detected_city: None,
            country_iso: None,
            raw_location: "x".into(),
            display_name: String::new(),
            username: "u".into(),
            is_retweet: false,
            text: text.into(),
        }
    }

    #[test]
    fn plain_words() {
        assert_eq!(tokenize("Why y tho"), ["why", "y", "tho"]);
    }

    #[test]
    fn standalone_symbols() {
        assert_eq!(tokenize("100 % done - now"), ["100", "%", "done", "-", "now"]);
        assert_eq!(tokenize("100% well-known"), ["100", "well", "known"]);
    }

    #[test]
    fn strips_urls_mentions_hashtag_markers() {
        assert_eq!(tokenize("RT @user check https://x.co #news"), ["rt", "check", "news"]);
        assert_eq!(tokenize("@user: hi (http://a.b/c) www.x.org"), ["hi"]);
    }

    #[test]
    fn apostrophes_and_unicode() {
        assert_eq!(tokenize("Don't 'quote' it’s"), ["don't", "quote", "it’s"]);
        assert_eq!(tokenize("Ça va? ¡Sí!"), ["ça", "va", "sí"]);
        assert_eq!(tokenize("नमस्ते दुनिया"), ["नमस्ते", "दुनिया"]);
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn frequency_ranking() {
        let rs = vec![rec("a b a", "en"), rec("b a", "en")];
        let top = word_frequency(&rs, 10).unwrap();
        assert_eq!(top, [("a".to_string(), 3), ("b".to_string(), 2)]);
        assert_eq!(word_frequency(&rs, 1).unwrap(), [("a".to_string(), 3)]);
        assert!(word_frequency(&rs, 0).is_err());
    }

    #[test]
    fn languages() {
        let rs = vec![rec("", "en"), rec("", "en"), rec("", "fr")];
        let d = language_distribution(&rs);
        assert_eq!(d.counts["en"], 2);
        assert_eq!(d.counts["fr"], 1);
        assert_eq!(d.distinct(), 2);
        assert_eq!(d.ranked()[0], ("en", 2));
        assert_eq!(language_distribution(&[]).distinct(), 0);
    }
}
