//! JSON-lines tweet-object parsing.

use chrono::{DateTime, Utc};
use serde::Deserialize;
use thiserror::Error;

use crate::model::RawTweetObject;

/// A line that could not be turned into a [`RawTweetObject`]. `offset` is the
/// byte position within the line where parsing gave up.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Deserialize)]
struct Wire {
    created_at: Option<String>,
    id_str: Option<String>,
    id: Option<serde_json::Value>,
    #[serde(default)]
    text: Option<String>,
    full_text: Option<String>,
    lang: Option<String>,
    user: Option<WireUser>,
    retweeted_status: Option<serde::de::IgnoredAny>,
}

#[derive(Deserialize)]
struct WireUser {
    name: Option<String>,
    screen_name: Option<String>,
    location: Option<String>,
}

/// Source timestamps come in the classic `Wed Oct 10 20:19:24 +0000 2018`
/// layout; RFC 3339 is also accepted.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y")
        .or_else(|_| DateTime::parse_from_rfc3339(s))
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

pub fn parse_raw(line: &str) -> Result<RawTweetObject, ParseError> {
    parse_raw_bytes(line.as_bytes())
}

pub fn parse_raw_bytes(line: &[u8]) -> Result<RawTweetObject, ParseError> {
    let wire: Wire = serde_json::from_slice(line).map_err(|e| ParseError {
        offset: byte_offset(line, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let at_end = |message: &str| ParseError {
        offset: line.len(),
        message: message.to_string(),
    };

    let id = match (wire.id_str, wire.id) {
        (Some(s), _) if !s.is_empty() => s,
        (_, Some(serde_json::Value::Number(n))) => n.to_string(),
        (_, Some(serde_json::Value::String(s))) if !s.is_empty() => s,
        _ => return Err(at_end("missing id")),
    };
    let created_at = wire
        .created_at
        .as_deref()
        .ok_or_else(|| at_end("missing created_at"))
        .and_then(|s| parse_timestamp(s).ok_or_else(|| at_end("unrecognized created_at")))?;
    let user = wire.user;
    let (user_name, user_screen_name, user_location) = match user {
        Some(u) => (
            u.name.unwrap_or_default(),
            u.screen_name.unwrap_or_default(),
            u.location,
        ),
        None => (String::new(), String::new(), None),
    };

    Ok(RawTweetObject {
        created_at,
        id,
        text: wire.full_text.or(wire.text).unwrap_or_default(),
        lang: wire.lang,
        user_name,
        user_screen_name,
        user_location,
        retweeted_status_present: wire.retweeted_status.is_some(),
    })
}

/// serde_json reports 1-based line and column; convert to a byte offset.
fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    if line <= 1 {
        return column.min(input.len());
    }
    let mut seen = 1;
    for (i, b) in input.iter().enumerate() {
        if *b == b'\n' {
            seen += 1;
            if seen == line {
                return (i + column).min(input.len());
            }
        }
    }
    input.len()
}
