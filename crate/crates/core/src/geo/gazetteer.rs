use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::normalize::normalize_diacritics;
use super::GeoError;
use crate::model::{validate_iso, GazetteerEntry};

pub const GAZETTEER_HEADER: [&str; 4] = ["pattern", "country", "city", "country_iso"];

/// Places users commonly give that do not exist.
pub const DEFAULT_FICTIONAL: [&str; 4] = ["konoha", "gotham city", "hueco mundo", "asgard"];

fn word_run() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\w+").unwrap())
}

/// Distinct maximal word runs of already-normalized text.
pub(crate) fn word_tokens(normalized: &str) -> impl Iterator<Item = &str> {
    word_run().find_iter(normalized).map(|m| m.as_str())
}

/// A pattern made only of word characters, spaces, hyphens and apostrophes is
/// matched literally after normalization and can be indexed by its first word.
fn is_plain(pattern: &str) -> bool {
    pattern.chars().all(|c| {
        c.is_alphanumeric()
            || matches!(c, ' ' | '-' | '\'' | '’' | '_')
            || unicode_normalization::char::is_combining_mark(c)
    })
}

fn strip_marks(pattern: &str) -> String {
    use unicode_normalization::UnicodeNormalization;
    pattern
        .nfd()
        .filter(|c| !unicode_normalization::char::is_combining_mark(*c))
        .nfc()
        .collect()
}

/// Compiled matcher for one pattern, plus the first-word key when the pattern
/// is plain.
pub(crate) fn compile_pattern(pattern: &str) -> Result<(Regex, Option<String>), String> {
    let trimmed = pattern.trim();
    if trimmed.is_empty() {
        return Err("empty pattern".into());
    }
    if is_plain(trimmed) {
        let normalized = normalize_diacritics(trimmed);
        let key = word_tokens(&normalized).next().map(str::to_string);
        if key.is_none() {
            return Err(format!("pattern {pattern:?} has no word characters"));
        }
        let re = Regex::new(&format!(r"(?:^|\W){}(?:\W|$)", regex::escape(&normalized))).map_err(|e| e.to_string())?;
        Ok((re, key))
    } else {
        let re =
            Regex::new(&format!(r"(?i)(?:^|\W)(?:{})(?:\W|$)", strip_marks(trimmed))).map_err(|e| e.to_string())?;
        if re.is_match("") {
            return Err(format!("pattern {pattern:?} matches empty text"));
        }
        Ok((re, None))
    }
}

/// Ordered place-name dictionary. The first entry whose pattern matches wins;
/// the token index only narrows which entries are tried.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    matchers: Vec<Regex>,
    index: HashMap<String, Vec<usize>>,
    unindexed: Vec<usize>,
    denylist: Vec<Regex>,
}

impl Gazetteer {
    pub fn from_entries(entries: Vec<GazetteerEntry>) -> Result<Self, GeoError> {
        let mut matchers = Vec::with_capacity(entries.len());
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        let mut unindexed = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            let row = i as u64 + 1;
            validate_entry(e).map_err(|message| GeoError::Row { row, message })?;
            let (re, key) = compile_pattern(&e.possible_match).map_err(|message| GeoError::Row { row, message })?;
            match key {
                Some(k) => index.entry(k).or_default().push(i),
                None => unindexed.push(i),
            }
            matchers.push(re);
        }
        let denylist = DEFAULT_FICTIONAL
            .iter()
            .map(|p| compile_pattern(p).map(|(re, _)| re))
            .collect::<Result<Vec<_>, _>>()
            .expect("built-in denylist compiles");
        Ok(Self {
            entries,
            matchers,
            index,
            unindexed,
            denylist,
        })
    }

    pub fn load(path: &Path) -> Result<Self, GeoError> {
        let file = File::open(path).map_err(|source| GeoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_entries(read_entries(BufReader::new(file))?)
    }

    pub fn from_reader<R: Read>(input: R) -> Result<Self, GeoError> {
        Self::from_entries(read_entries(input)?)
    }

    /// New gazetteer with `patch` entries placed ahead of the current ones.
    /// Patch patterns may repeat an existing pattern; the patch entry then
    /// shadows the old one.
    pub fn refine(&self, patch: Vec<GazetteerEntry>) -> Result<Self, GeoError> {
        let mut entries = patch;
        entries.extend(self.entries.iter().cloned());
        let mut g = Self::from_entries(entries)?;
        g.denylist = self.denylist.clone();
        Ok(g)
    }

    pub fn refine_from_file(&self, patch_path: &Path) -> Result<Self, GeoError> {
        let file = File::open(patch_path).map_err(|source| GeoError::Io {
            path: patch_path.display().to_string(),
            source,
        })?;
        self.refine(read_entries(BufReader::new(file))?)
    }

    /// Adds fictional-place patterns, one per line; `#` starts a comment.
    pub fn extend_denylist<R: Read>(&mut self, input: R) -> Result<(), GeoError> {
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line.map_err(|source| GeoError::Io {
                path: "<denylist>".into(),
                source,
            })?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (re, _) = compile_pattern(line).map_err(|message| GeoError::Row {
                row: i as u64 + 1,
                message,
            })?;
            self.denylist.push(re);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn is_fictional(&self, normalized: &str) -> bool {
        self.denylist.iter().any(|re| re.is_match(normalized))
    }

    /// Reference lookup: try every entry in order.
    pub fn first_match_linear(&self, normalized: &str) -> Option<usize> {
        self.matchers.iter().position(|re| re.is_match(normalized))
    }

    /// Same answer as [`Self::first_match_linear`], trying only entries whose
    /// first word occurs in the text plus the non-literal patterns.
    pub fn first_match_indexed(&self, normalized: &str) -> Option<usize> {
        let mut candidates: Vec<usize> = self.unindexed.clone();
        let mut seen = HashSet::new();
        for tok in word_tokens(normalized) {
            if seen.insert(tok) {
                if let Some(ids) = self.index.get(tok) {
                    candidates.extend_from_slice(ids);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.into_iter().find(|&i| self.matchers[i].is_match(normalized))
    }
}

fn validate_entry(e: &GazetteerEntry) -> Result<(), String> {
    if e.country.trim().is_empty() {
        return Err("empty country".into());
    }
    validate_iso(&e.country_iso).map_err(|err| err.to_string())
}

/// Parses `pattern,country,city,country_iso` rows. Errors carry the 1-based
/// data row number.
pub fn read_entries<R: Read>(input: R) -> Result<Vec<GazetteerEntry>, GeoError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = reader.headers()?;
    if header.iter().ne(GAZETTEER_HEADER.iter().copied()) {
        return Err(GeoError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut entries = Vec::new();
    let mut patterns = HashSet::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i as u64 + 1;
        let row = row?;
        if row.len() != 4 {
            return Err(GeoError::Row {
                row: row_no,
                message: format!("expected 4 fields, found {}", row.len()),
            });
        }
        let entry = GazetteerEntry {
            possible_match: row[0].to_string(),
            country: row[1].to_string(),
            city: (!row[2].is_empty()).then(|| row[2].to_string()),
            country_iso: row[3].to_string(),
        };
        validate_entry(&entry).map_err(|message| GeoError::Row { row: row_no, message })?;
        compile_pattern(&entry.possible_match).map_err(|message| GeoError::Row { row: row_no, message })?;
        if !patterns.insert(normalize_diacritics(entry.possible_match.trim())) {
            return Err(GeoError::DuplicatePattern {
                row: row_no,
                pattern: entry.possible_match,
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn read_entries_from_path(path: &Path) -> Result<Vec<GazetteerEntry>, GeoError> {
    let file = File::open(path).map_err(|source| GeoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_entries(io::BufReader::new(file))
}
