//! Duplicate removal by tweet id, keeping the first occurrence in stream
//! order.
//!
//! Up to `memory_bound` records are deduplicated with a hash set. Larger
//! inputs are spilled to sorted runs on disk:
//!
//! 1. buffers of `memory_bound` records are sorted by `(id, seq)` and written
//!    out as runs;
//! 2. the runs are merged by `(id, seq)`; the first entry of each id survives
//!    and survivors are re-chunked into runs sorted by `seq`;
//! 3. those runs are merged by `seq`, restoring the original order.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Lines, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::TempDir;
use thiserror::Error;

use crate::model::TweetRecord;

pub const DEFAULT_MEMORY_BOUND: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum DedupeError {
    #[error("spill I/O: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt spill run: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error("memory bound must be at least 1")]
    ZeroBound,
}

#[derive(Debug, Clone)]
pub struct DedupeConfig {
    pub memory_bound: usize,
    /// Where spill runs go; the system temp dir when unset.
    pub spill_dir: Option<PathBuf>,
}

impl Default for DedupeConfig {
    fn default() -> Self {
        Self {
            memory_bound: DEFAULT_MEMORY_BOUND,
            spill_dir: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Spilled {
    seq: u64,
    record: TweetRecord,
}

/// Result of [`dedupe`]: the surviving records (lazily read back when the
/// input spilled) and how many were dropped.
pub struct Deduped {
    pub duplicates_removed: u64,
    pub spilled_runs: usize,
    records: Output,
}

enum Output {
    Memory(std::vec::IntoIter<TweetRecord>),
    Disk(SeqMerge),
}

impl Iterator for Deduped {
    type Item = Result<TweetRecord, DedupeError>;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.records {
            Output::Memory(it) => it.next().map(Ok),
            Output::Disk(m) => m.next(),
        }
    }
}

impl Deduped {
    pub fn collect_records(self) -> Result<(Vec<TweetRecord>, u64), DedupeError> {
        let removed = self.duplicates_removed;
        let records = self.collect::<Result<Vec<_>, _>>()?;
        Ok((records, removed))
    }
}

pub fn dedupe<I>(records: I, config: &DedupeConfig) -> Result<Deduped, DedupeError>
where
    I: IntoIterator<Item = TweetRecord>,
{
    if config.memory_bound == 0 {
        return Err(DedupeError::ZeroBound);
    }
    let bound = config.memory_bound;
    let mut input = records.into_iter();
    let mut buffer: Vec<TweetRecord> = Vec::new();
    for r in input.by_ref() {
        buffer.push(r);
        if buffer.len() > bound {
            break;
        }
    }
    if buffer.len() <= bound {
        let before = buffer.len() as u64;
        let mut seen = HashSet::with_capacity(buffer.len());
        buffer.retain(|r| seen.insert(r.tweet_id.clone()));
        return Ok(Deduped {
            duplicates_removed: before - buffer.len() as u64,
            spilled_runs: 0,
            records: Output::Memory(buffer.into_iter()),
        });
    }

    let dir = match &config.spill_dir {
        Some(d) => tempfile::Builder::new().prefix("dedupe").tempdir_in(d)?,
        None => tempfile::Builder::new().prefix("dedupe").tempdir()?,
    };

    // phase 1: id-sorted runs
    let mut id_runs = Vec::new();
    let mut chunk: Vec<Spilled> = Vec::with_capacity(bound);
    let mut seq = 0u64;
    let mut removed = 0u64;
    for record in buffer.into_iter().chain(input) {
        chunk.push(Spilled { seq, record });
        seq += 1;
        if chunk.len() == bound {
            removed += write_id_run(&mut chunk, dir.path(), id_runs.len(), &mut id_runs)?;
        }
    }
    if !chunk.is_empty() {
        removed += write_id_run(&mut chunk, dir.path(), id_runs.len(), &mut id_runs)?;
    }
    let spilled_runs = id_runs.len();

    // phase 2: merge by (id, seq), keep the first of each id
    let mut seq_runs = Vec::new();
    let mut readers = id_runs
        .iter()
        .map(|p| RunReader::open(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut heap = BinaryHeap::new();
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some(s) = r.advance()? {
            heap.push(Reverse((s.record.tweet_id.clone(), s.seq, i)));
        }
    }
    let mut last_id: Option<String> = None;
    while let Some(Reverse((id, _, i))) = heap.pop() {
        let entry = readers[i].take();
        if let Some(next) = readers[i].advance()? {
            heap.push(Reverse((next.record.tweet_id.clone(), next.seq, i)));
        }
        if last_id.as_deref() == Some(id.as_str()) {
            removed += 1;
            continue;
        }
        last_id = Some(id);
        chunk.push(entry);
        if chunk.len() == bound {
            write_seq_run(&mut chunk, dir.path(), &mut seq_runs)?;
        }
    }
    if !chunk.is_empty() {
        write_seq_run(&mut chunk, dir.path(), &mut seq_runs)?;
    }
    drop(readers);
    for p in &id_runs {
        std::fs::remove_file(p)?;
    }

    Ok(Deduped {
        duplicates_removed: removed,
        spilled_runs,
        records: Output::Disk(SeqMerge::new(seq_runs, dir)?),
    })
}

/// Sorts by `(id, seq)`, drops in-chunk duplicates, writes the run. Returns the
/// number dropped.
fn write_id_run(chunk: &mut Vec<Spilled>, dir: &Path, n: usize, runs: &mut Vec<PathBuf>) -> Result<u64, DedupeError> {
    chunk.sort_by(|a, b| a.record.tweet_id.cmp(&b.record.tweet_id).then(a.seq.cmp(&b.seq)));
    let before = chunk.len();
    chunk.dedup_by(|later, earlier| later.record.tweet_id == earlier.record.tweet_id);
    let dropped = (before - chunk.len()) as u64;
    let path = dir.join(format!("ids-{n:06}.jsonl"));
    write_run(chunk, &path)?;
    runs.push(path);
    Ok(dropped)
}

fn write_seq_run(chunk: &mut Vec<Spilled>, dir: &Path, runs: &mut Vec<PathBuf>) -> Result<(), DedupeError> {
    chunk.sort_by_key(|s| s.seq);
    let path = dir.join(format!("seq-{:06}.jsonl", runs.len()));
    write_run(chunk, &path)?;
    runs.push(path);
    Ok(())
}

fn write_run(chunk: &mut Vec<Spilled>, path: &Path) -> Result<(), DedupeError> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in chunk.drain(..) {
        serde_json::to_writer(&mut w, &s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

struct RunReader {
    lines: Lines<BufReader<File>>,
    head: Option<Spilled>,
}

impl RunReader {
    fn open(path: &Path) -> Result<Self, DedupeError> {
        Ok(Self {
            lines: BufReader::new(File::open(path)?).lines(),
            head: None,
        })
    }

    /// Loads the next entry into `head` and returns a view of it.
    fn advance(&mut self) -> Result<Option<&Spilled>, DedupeError> {
        self.head = match self.lines.next() {
            Some(line) => Some(serde_json::from_str(&line?)?),
            None => None,
        };
        Ok(self.head.as_ref())
    }

    fn take(&mut self) -> Spilled {
        self.head.take().expect("heap entry has a loaded head")
    }
}

struct SeqMerge {
    readers: Vec<RunReader>,
    heap: BinaryHeap<Reverse<(u64, usize)>>,
    failed: bool,
    // keeps the spill directory alive until the merge is dropped
    _dir: TempDir,
}

impl SeqMerge {
    fn new(runs: Vec<PathBuf>, dir: TempDir) -> Result<Self, DedupeError> {
        let mut readers = runs.iter().map(|p| RunReader::open(p)).collect::<Result<Vec<_>, _>>()?;
        let mut heap = BinaryHeap::new();
        for (i, r) in readers.iter_mut().enumerate() {
            if let Some(s) = r.advance()? {
                heap.push(Reverse((s.seq, i)));
            }
        }
        Ok(Self {
            readers,
            heap,
            failed: false,
            _dir: dir,
        })
    }
}

impl Iterator for SeqMerge {
    type Item = Result<TweetRecord, DedupeError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let Reverse((_, i)) = self.heap.pop()?;
        let entry = self.readers[i].take();
        match self.readers[i].advance() {
            Ok(Some(next)) => self.heap.push(Reverse((next.seq, i))),
            Ok(None) => {}
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        }
        Some(Ok(entry.record))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn rec(id: &str, text: &str) -> TweetRecord {
        TweetRecord {
            created_at: DateTime::from_timestamp(0, 0).unwrap(),
            tweet_id: id.into(),
            language_code: "en".into(),
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

    fn ids(records: &[TweetRecord]) -> Vec<&str> {
        records.iter().map(|r| r.tweet_id.as_str()).collect()
    }

    fn run(input: Vec<TweetRecord>, bound: usize) -> (Vec<TweetRecord>, u64) {
        let cfg = DedupeConfig {
            memory_bound: bound,
            spill_dir: None,
        };
        dedupe(input, &cfg).unwrap().collect_records().unwrap()
    }

    #[test]
    fn exact_duplicate() {
        let (out, removed) = run(vec![rec("1", "a"), rec("2", "b"), rec("1", "c")], 10);
        assert_eq!(ids(&out), ["1", "2"]);
        assert_eq!(out[0].text, "a");
        assert_eq!(removed, 1);
    }

    #[test]
    fn unique_stream_unchanged() {
        let input: Vec<_> = (0..50).map(|i| rec(&i.to_string(), "")).collect();
        for bound in [1, 3, 50, 100] {
            let (out, removed) = run(input.clone(), bound);
            assert_eq!(out, input, "bound {bound}");
            assert_eq!(removed, 0);
        }
    }

    #[test]
    fn spill_path_keeps_first_in_order() {
        let order = ["5", "3", "5", "1", "3", "9", "1", "1", "7", "5", "2"];
        let input: Vec<_> = order
            .iter()
            .enumerate()
            .map(|(i, id)| rec(id, &i.to_string()))
            .collect();
        for bound in [1, 2, 3, 4, 100] {
            let (out, removed) = run(input.clone(), bound);
            assert_eq!(ids(&out), ["5", "3", "1", "9", "7", "2"], "bound {bound}");
            assert_eq!(
                out.iter().map(|r| r.text.as_str()).collect::<Vec<_>>(),
                ["0", "1", "3", "5", "8", "10"]
            );
            assert_eq!(removed, 5);
        }
    }

    #[test]
    fn spill_reports_runs() {
        let input: Vec<_> = (0..10).map(|i| rec(&(i % 4).to_string(), "")).collect();
        let d = dedupe(
            input,
            &DedupeConfig {
                memory_bound: 3,
                spill_dir: None,
            },
        )
        .unwrap();
        assert_eq!(d.spilled_runs, 4);
        assert_eq!(d.duplicates_removed, 6);
    }

    #[test]
    fn zero_bound_rejected() {
        let cfg = DedupeConfig {
            memory_bound: 0,
            spill_dir: None,
        };
        assert!(matches!(dedupe(vec![], &cfg), Err(DedupeError::ZeroBound)));
    }
}
