//! Raw tweet streams to clean, deduplicated records.
//!
//! Lines come from a replay file or a rate-limited polling source. Each line
//! is parsed, filtered (location and language must both be present) and
//! passed through id-based deduplication. The three stages run on their own
//! threads joined by bounded channels.

mod dedupe;
mod filter;
mod poll;
mod ratelimit;
mod replay;

use std::io;
use std::sync::mpsc::sync_channel;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dedupe::{dedupe, DedupeConfig, DedupeError, Deduped, DEFAULT_MEMORY_BOUND};
pub use filter::{filter_record, is_retweet, SkipReason, UNDETERMINED_LANGUAGE};
pub use poll::{poll_source, Fetch, HttpFetcher, PollConfig, PollReport};
pub use ratelimit::{parse_duration, Clock, ManualClock, RateLimitPolicy, RateLimiter, SystemClock};
pub use replay::{replay_source, ReplayLines};

use crate::model::TweetRecord;
use crate::raw::parse_raw_bytes;

const QUEUE_DEPTH: usize = 4096;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid rate-limit policy: {0}")]
    Policy(String),
    #[error("read failed after {lines_read} lines: {source}")]
    Io {
        lines_read: u64,
        partial: IngestStats,
        source: io::Error,
    },
    #[error(transparent)]
    Dedupe(#[from] DedupeError),
    #[error("output: {0}")]
    Sink(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub seen: u64,
    pub skipped_missing_location: u64,
    pub skipped_missing_language: u64,
    pub parse_errors: u64,
    pub duplicates_removed: u64,
    pub kept: u64,
}

impl IngestStats {
    /// `seen` equals the sum of the outcome buckets.
    pub fn is_balanced(&self) -> bool {
        self.seen
            == self.kept
                + self.skipped_missing_location
                + self.skipped_missing_language
                + self.parse_errors
                + self.duplicates_removed
    }

    pub fn merge(&mut self, other: &IngestStats) {
        self.seen += other.seen;
        self.skipped_missing_location += other.skipped_missing_location;
        self.skipped_missing_language += other.skipped_missing_language;
        self.parse_errors += other.parse_errors;
        self.duplicates_removed += other.duplicates_removed;
        self.kept += other.kept;
    }
}

/// Parses and filters one line, updating `stats`.
pub fn clean_line(line: &[u8], stats: &mut IngestStats) -> Option<TweetRecord> {
    stats.seen += 1;
    let raw = match parse_raw_bytes(line) {
        Ok(r) => r,
        Err(e) => {
            log::debug!("line {}: {e}", stats.seen);
            stats.parse_errors += 1;
            return None;
        }
    };
    match filter_record(&raw) {
        Ok(r) => Some(r),
        Err(SkipReason::MissingLocation) => {
            stats.skipped_missing_location += 1;
            None
        }
        Err(SkipReason::MissingLanguage) => {
            stats.skipped_missing_language += 1;
            None
        }
    }
}

/// Runs parse, filter and dedupe over `lines`, handing every surviving record
/// to `sink` in first-occurrence order. Whitespace-only lines are ignored.
pub fn ingest<I, S>(lines: I, dedupe_config: &DedupeConfig, mut sink: S) -> Result<IngestStats, IngestError>
where
    I: Iterator<Item = io::Result<Vec<u8>>> + Send,
    S: FnMut(TweetRecord) -> Result<(), IngestError>,
{
    let (line_tx, line_rx) = sync_channel::<Vec<u8>>(QUEUE_DEPTH);
    let (rec_tx, rec_rx) = sync_channel::<TweetRecord>(QUEUE_DEPTH);

    thread::scope(|scope| {
        let reader = scope.spawn(move || -> Result<u64, (u64, io::Error)> {
            let mut read = 0u64;
            for line in lines {
                let line = line.map_err(|e| (read, e))?;
                read += 1;
                if line.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                if line_tx.send(line).is_err() {
                    break;
                }
            }
            Ok(read)
        });
        let cleaner = scope.spawn(move || {
            let mut stats = IngestStats::default();
            for line in line_rx {
                if let Some(r) = clean_line(&line, &mut stats) {
                    if rec_tx.send(r).is_err() {
                        break;
                    }
                }
            }
            stats
        });

        let deduped = dedupe(rec_rx, dedupe_config);
        let read_result = reader.join().expect("reader thread panicked");
        let mut stats = cleaner.join().expect("cleaner thread panicked");
        let deduped = deduped?;
        stats.duplicates_removed = deduped.duplicates_removed;
        if let Err((lines_read, source)) = read_result {
            return Err(IngestError::Io {
                lines_read,
                partial: stats,
                source,
            });
        }
        for r in deduped {
            sink(r?)?;
            stats.kept += 1;
        }
        Ok(stats)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, loc: Option<&str>, lang: &str) -> Vec<u8> {
        let loc = loc.map_or("null".to_string(), |l| format!("{l:?}"));
        format!(
            r#"{{"created_at":"Wed Oct 10 20:19:24 +0000 2018","id_str":"{id}","text":"t","lang":"{lang}","user":{{"name":"n","screen_name":"s","location":{loc}}}}}"#
        )
        .into_bytes()
    }

    #[test]
    fn stats_balance() {
        let lines = vec![
            line("1", Some("Paris"), "fr"),
            line("2", None, "fr"),
            line("3", Some("Lima"), "und"),
            b"{broken".to_vec(),
            b"   ".to_vec(),
            line("1", Some("Paris"), "fr"),
            line("4", Some("Oslo"), "no"),
        ];
        let mut kept = Vec::new();
        let stats = ingest(lines.into_iter().map(Ok), &DedupeConfig::default(), |r| {
            kept.push(r.tweet_id);
            Ok(())
        })
        .unwrap();
        assert_eq!(
            stats,
            IngestStats {
                seen: 6,
                skipped_missing_location: 1,
                skipped_missing_language: 1,
                parse_errors: 1,
                duplicates_removed: 1,
                kept: 2,
            }
        );
        assert!(stats.is_balanced());
        assert_eq!(kept, ["1", "4"]);
    }

    #[test]
    fn io_error_aborts_with_partial_count() {
        let lines = vec![
            Ok(line("1", Some("Paris"), "fr")),
            Ok(line("2", Some("Paris"), "fr")),
            Err(io::Error::other("disk gone")),
            Ok(line("3", Some("Paris"), "fr")),
        ];
        let err = ingest(lines.into_iter(), &DedupeConfig::default(), |_| Ok(())).unwrap_err();
        match err {
            IngestError::Io {
                lines_read, partial, ..
            } => {
                assert_eq!(lines_read, 2);
                assert_eq!(partial.seen, 2);
            }
            other => panic!("{other}"),
        }
    }
}
