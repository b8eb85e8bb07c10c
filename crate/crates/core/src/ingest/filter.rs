use crate::model::{RawTweetObject, TweetRecord};

/// Language marker the source uses when it could not detect one.
pub const UNDETERMINED_LANGUAGE: &str = "und";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    MissingLocation,
    MissingLanguage,
}

/// Keeps a tweet only when both a non-blank location and a detected language
/// are present. Resolution fields are left unset.
pub fn filter_record(raw: &RawTweetObject) -> Result<TweetRecord, SkipReason> {
    let location = match raw.user_location.as_deref() {
        Some(l) if !l.trim().is_empty() => l,
        _ => return Err(SkipReason::MissingLocation),
    };
    let language = match raw.lang.as_deref() {
        Some(l) if !l.trim().is_empty() && l != UNDETERMINED_LANGUAGE => l,
        _ => return Err(SkipReason::MissingLanguage),
    };
    Ok(TweetRecord {
        created_at: raw.created_at,
        tweet_id: raw.id.clone(),
        language_code: language.to_string(),
        detected_country: None,
        detected_city: None,
        country_iso: None,
        raw_location: location.to_string(),
        display_name: raw.user_name.clone(),
        username: raw.user_screen_name.clone(),
        is_retweet: is_retweet(raw),
        text: raw.text.clone(),
    })
}

/// The `retweeted_status` object is authoritative; objects stripped of it
/// still mark retweets with the `RT @` text prefix.
pub fn is_retweet(raw: &RawTweetObject) -> bool {
    raw.retweeted_status_present || raw.text.starts_with("RT @")
}
