//! Cleaned-record CSV persistence.
//!
//! Column order is fixed by [`HEADER`]. Optional fields are written as empty
//! cells and `is_retweet` as `true`/`false`.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

use crate::model::TweetRecord;

pub const HEADER: [&str; 11] = [
    "created_at",
    "tweet_id",
    "language_code",
    "detected_country",
    "detected_city",
    "country_iso",
    "raw_location",
    "display_name",
    "username",
    "is_retweet",
    "text",
];

#[derive(Debug, Error)]
pub enum RecordsError {
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

/// Streaming writer for cleaned records.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
    count: u64,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W) -> Result<Self, RecordsError> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(HEADER)?;
        Ok(Self { inner, count: 0 })
    }

    pub fn write(&mut self, r: &TweetRecord) -> Result<(), RecordsError> {
        let ts = format_timestamp(&r.created_at);
        self.inner.write_record([
            ts.as_str(),
            &r.tweet_id,
            &r.language_code,
            opt(&r.detected_country),
            opt(&r.detected_city),
            opt(&r.country_iso),
            &r.raw_location,
            &r.display_name,
            &r.username,
            if r.is_retweet { "true" } else { "false" },
            &r.text,
        ])?;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(mut self) -> Result<u64, RecordsError> {
        self.inner.flush().map_err(|source| RecordsError::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(self.count)
    }
}

pub fn write_records<'a, I>(records: I, path: &Path) -> Result<u64, RecordsError>
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let file = File::create(path).map_err(|source| RecordsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = RecordWriter::new(io::BufWriter::new(file))?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Streaming reader; yields one validated record per data row.
pub struct RecordReader<R: Read> {
    inner: csv::Reader<R>,
    row: csv::StringRecord,
    rows_read: u64,
}

impl<R: Read> RecordReader<R> {
    pub fn new(input: R) -> Result<Self, RecordsError> {
        let mut inner = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(input);
        let header = inner.headers()?;
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(RecordsError::Header(header.iter().collect::<Vec<_>>().join(",")));
        }
        Ok(Self {
            inner,
            row: csv::StringRecord::new(),
            rows_read: 0,
        })
    }
}

impl<R: Read> Iterator for RecordReader<R> {
    type Item = Result<TweetRecord, RecordsError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.inner.read_record(&mut self.row) {
            Ok(false) => None,
            Ok(true) => {
                self.rows_read += 1;
                let row = self.rows_read;
                Some(parse_row(&self.row).map_err(|message| RecordsError::Row { row, message }))
            }
            Err(e) => Some(Err(e.into())),
        }
    }
}

fn parse_row(row: &csv::StringRecord) -> Result<TweetRecord, String> {
    let field = |i: usize| row.get(i).unwrap_or("");
    let optional = |i: usize| {
        let v = field(i);
        (!v.is_empty()).then(|| v.to_string())
    };
    let created_at = DateTime::parse_from_rfc3339(field(0))
        .map_err(|e| format!("created_at {:?}: {e}", field(0)))?
        .with_timezone(&Utc);
    let is_retweet = match field(9) {
        "true" => true,
        "false" => false,
        other => return Err(format!("is_retweet {other:?}: expected true or false")),
    };
    let record = TweetRecord {
        created_at,
        tweet_id: field(1).to_string(),
        language_code: field(2).to_string(),
        detected_country: optional(3),
        detected_city: optional(4),
        country_iso: optional(5),
        raw_location: field(6).to_string(),
        display_name: field(7).to_string(),
        username: field(8).to_string(),
        is_retweet,
        text: field(10).to_string(),
    };
    record.validate().map_err(|e| e.to_string())?;
    Ok(record)
}

pub fn open_records(path: &Path) -> Result<RecordReader<io::BufReader<File>>, RecordsError> {
    let file = File::open(path).map_err(|source| RecordsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    RecordReader::new(io::BufReader::new(file))
}

pub fn read_records(path: &Path) -> Result<Vec<TweetRecord>, RecordsError> {
    open_records(path)?.collect()
}
