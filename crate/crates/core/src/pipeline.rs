//! Stage runners over files, and the end-to-end pipeline built from them.
//!
//! Every stage reads and writes the same files whether it is invoked alone or
//! as part of [`run_pipeline`], so running the stages one by one produces the
//! same outputs as a full run.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::mpsc::sync_channel;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::analytics::output::{write_analysis, AnalyzeOptions, COUNTRY_COUNTS};
use crate::analytics::read_native_map;
use crate::correlate::{correlate, read_country_counts, write_correlations};
use crate::geo::{evaluate_resolver, read_labels, resolve_all, unknown_report, Gazetteer, ResolverMetrics};
use crate::ingest::{
    ingest, parse_duration, poll_source, replay_source, DedupeConfig, HttpFetcher, IngestStats, PollConfig, PollReport,
    RateLimitPolicy, SystemClock, DEFAULT_MEMORY_BOUND,
};
use crate::rankcorr::MsrcOptions;
use crate::records::{read_records, write_records, RecordWriter};
use crate::report::{build_report, ReportBundle};

pub const CLEANED: &str = "cleaned.csv";
pub const INGEST_STATS: &str = "ingest_stats.json";
pub const RESOLVED: &str = "resolved.csv";
pub const UNKNOWNS: &str = "unknowns.csv";
pub const RESOLVER_METRICS: &str = "resolver_metrics.json";
pub const RUN_LOG: &str = "run_log.jsonl";

pub const DEFAULT_GAZETTEER: &str = "data/gazetteer.csv";
pub const DEFAULT_DENYLIST: &str = "data/denylist.txt";
pub const DEFAULT_NATIVE_MAP: &str = "data/native_map.csv";
pub const DEFAULT_HDI: &str = "data/hdi.csv";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Resolve,
    Analyze,
    Correlate,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Resolve => "resolve",
            Stage::Analyze => "analyze",
            Stage::Correlate => "correlate",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    pub fn new(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        Self {
            stage,
            source: source.into(),
        }
    }
}

fn at<E: Into<Box<dyn std::error::Error + Send + Sync>>>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::new(stage, e)
}

fn io_err(path: &Path, e: io::Error) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

/// Where raw tweets come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Replay(PathBuf),
    Poll { endpoint: String, duration: Duration },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: Source,
    pub policy: RateLimitPolicy,
    pub gazetteer: PathBuf,
    pub patch: Option<PathBuf>,
    pub denylist: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub native_map: PathBuf,
    pub hdi: PathBuf,
    pub top_users: usize,
    pub top_words: usize,
    pub out_dir: PathBuf,
    pub classic_factor: bool,
    pub memory_bound: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            source: Source::Replay(PathBuf::new()),
            policy: RateLimitPolicy::default(),
            gazetteer: DEFAULT_GAZETTEER.into(),
            patch: None,
            denylist: Some(DEFAULT_DENYLIST.into()),
            labels: None,
            native_map: DEFAULT_NATIVE_MAP.into(),
            hdi: DEFAULT_HDI.into(),
            top_users: AnalyzeOptions::default().top_users,
            top_words: AnalyzeOptions::default().top_words,
            out_dir: DEFAULT_OUT_DIR.into(),
            classic_factor: false,
            memory_bound: DEFAULT_MEMORY_BOUND,
            seed: 0,
        }
    }
}

/// Keys accepted in a config file, in the order [`PipelineConfig::to_kv`]
/// emits them.
pub const CONFIG_KEYS: [&str; 17] = [
    "input",
    "endpoint",
    "poll_duration",
    "rate",
    "interval",
    "gazetteer",
    "patch",
    "denylist",
    "labels",
    "native_map",
    "hdi",
    "top_users",
    "top_words",
    "out_dir",
    "classic_factor",
    "memory_bound",
    "seed",
];

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let k = k.trim();
        if !CONFIG_KEYS.contains(&k) {
            return Err(format!("line {}: unknown key {k:?}", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_kv(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("{key}: not a number: {v:?}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {v:?}")),
    }
}

fn optional_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty() && v != "none").then(|| PathBuf::from(v))
}

impl PipelineConfig {
    /// Builds a config from defaults overlaid with `kv`.
    pub fn from_kv(kv: &BTreeMap<String, String>) -> Result<Self, String> {
        let mut c = Self::default();
        let get = |k: &str| kv.get(k).map(String::as_str);
        match (get("input"), get("endpoint")) {
            (Some(_), Some(_)) => return Err("input and endpoint are mutually exclusive".into()),
            (Some(p), None) => c.source = Source::Replay(p.into()),
            (None, Some(e)) => {
                let duration = parse_duration(get("poll_duration").unwrap_or("60s")).map_err(|e| e.to_string())?;
                c.source = Source::Poll {
                    endpoint: e.to_string(),
                    duration,
                }
            }
            (None, None) => return Err("one of input or endpoint is required".into()),
        }
        if get("rate").is_some() || get("interval").is_some() {
            let d = RateLimitPolicy::default();
            let rate = get("rate")
                .map(str::to_string)
                .unwrap_or_else(|| format!("{}/{}ms", d.max_requests, d.window.as_millis()));
            let interval = get("interval").map(str::to_string).unwrap_or_else(|| {
                format!(
                    "{}-{}ms",
                    d.poll_interval_min.as_millis(),
                    d.poll_interval_max.as_millis()
                )
            });
            c.policy = RateLimitPolicy::parse(&rate, &interval).map_err(|e| e.to_string())?;
        }
        if let Some(v) = get("gazetteer") {
            c.gazetteer = v.into();
        }
        if let Some(v) = get("patch") {
            c.patch = optional_path(v);
        }
        if let Some(v) = get("denylist") {
            c.denylist = optional_path(v);
        }
        if let Some(v) = get("labels") {
            c.labels = optional_path(v);
        }
        if let Some(v) = get("native_map") {
            c.native_map = v.into();
        }
        if let Some(v) = get("hdi") {
            c.hdi = v.into();
        }
        if let Some(v) = get("top_users") {
            c.top_users = parse_num("top_users", v)?;
        }
        if let Some(v) = get("top_words") {
            c.top_words = parse_num("top_words", v)?;
        }
        if let Some(v) = get("out_dir") {
            c.out_dir = v.into();
        }
        if let Some(v) = get("classic_factor") {
            c.classic_factor = parse_bool("classic_factor", v)?;
        }
        if let Some(v) = get("memory_bound") {
            c.memory_bound = parse_num("memory_bound", v)?;
        }
        if let Some(v) = get("seed") {
            c.seed = parse_num("seed", v)?;
        }
        Ok(c)
    }

    /// The config as `key -> value`, echoed into the report manifest.
    pub fn to_kv(&self) -> BTreeMap<String, String> {
        let mut kv = BTreeMap::new();
        let p = |p: &Path| p.display().to_string();
        match &self.source {
            Source::Replay(path) => {
                kv.insert("input".into(), p(path));
            }
            Source::Poll { endpoint, duration } => {
                kv.insert("endpoint".into(), endpoint.clone());
                kv.insert("poll_duration".into(), format!("{}ms", duration.as_millis()));
            }
        }
        kv.insert(
            "rate".into(),
            format!("{}/{}ms", self.policy.max_requests, self.policy.window.as_millis()),
        );
        kv.insert(
            "interval".into(),
            format!(
                "{}-{}ms",
                self.policy.poll_interval_min.as_millis(),
                self.policy.poll_interval_max.as_millis()
            ),
        );
        kv.insert("gazetteer".into(), p(&self.gazetteer));
        kv.insert("patch".into(), self.patch.as_deref().map_or("none".into(), p));
        kv.insert("denylist".into(), self.denylist.as_deref().map_or("none".into(), p));
        kv.insert("labels".into(), self.labels.as_deref().map_or("none".into(), p));
        kv.insert("native_map".into(), p(&self.native_map));
        kv.insert("hdi".into(), p(&self.hdi));
        kv.insert("top_users".into(), self.top_users.to_string());
        kv.insert("top_words".into(), self.top_words.to_string());
        kv.insert("out_dir".into(), p(&self.out_dir));
        kv.insert("classic_factor".into(), self.classic_factor.to_string());
        kv.insert("memory_bound".into(), self.memory_bound.to_string());
        kv.insert("seed".into(), self.seed.to_string());
        kv
    }

    /// Checks limits and that every referenced input file exists.
    pub fn validate(&self) -> Result<(), String> {
        if self.top_users == 0 {
            return Err("top_users must be at least 1".into());
        }
        if self.top_words == 0 {
            return Err("top_words must be at least 1".into());
        }
        if self.memory_bound == 0 {
            return Err("memory_bound must be at least 1".into());
        }
        self.policy.validate().map_err(|e| e.to_string())?;
        let mut files: Vec<(&str, &Path)> = vec![
            ("gazetteer", &self.gazetteer),
            ("native_map", &self.native_map),
            ("hdi", &self.hdi),
        ];
        if let Source::Replay(p) = &self.source {
            files.insert(0, ("input", p));
        }
        for (key, p) in [
            ("patch", &self.patch),
            ("denylist", &self.denylist),
            ("labels", &self.labels),
        ] {
            if let Some(p) = p {
                files.push((key, p));
            }
        }
        for (key, path) in files {
            if !path.is_file() {
                return Err(format!("{key}: no such file: {}", path.display()));
            }
        }
        Ok(())
    }

    pub fn analyze_options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            top_users: self.top_users,
            top_words: self.top_words,
            ..AnalyzeOptions::default()
        }
    }

    pub fn msrc_options(&self) -> MsrcOptions {
        MsrcOptions {
            classic_factor: self.classic_factor,
            ..MsrcOptions::default()
        }
    }

    pub fn dedupe_config(&self) -> DedupeConfig {
        DedupeConfig {
            memory_bound: self.memory_bound,
            spill_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestOutcome {
    pub stats: IngestStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poll: Option<PollSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PollSummary {
    pub requests: usize,
    pub retries: u64,
    pub failed_polls: u64,
    pub lines: u64,
}

impl From<&PollReport> for PollSummary {
    fn from(r: &PollReport) -> Self {
        Self {
            requests: r.requests(),
            retries: r.retries,
            failed_polls: r.failed_polls,
            lines: r.lines,
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn ensure_parent(path: &Path) -> io::Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => fs::create_dir_all(p).map_err(|e| io_err(p, e)),
        _ => Ok(()),
    }
}

/// Reads raw lines from `source`, cleans and deduplicates them, and writes
/// cleaned records to `output`. Stats go to `stats_path` when given.
pub fn stage_ingest(
    source: &Source,
    policy: &RateLimitPolicy,
    dedupe: &DedupeConfig,
    seed: u64,
    output: &Path,
    stats_path: Option<&Path>,
) -> Result<IngestOutcome, PipelineError> {
    let err = at(Stage::Ingest);
    ensure_parent(output).map_err(at(Stage::Ingest))?;
    let file = File::create(output).map_err(|e| err(io_err(output, e)))?;
    let mut writer = RecordWriter::new(BufWriter::new(file)).map_err(at(Stage::Ingest))?;
    let mut sink = |r| {
        writer
            .write(&r)
            .map_err(|e| crate::ingest::IngestError::Sink(e.to_string()))
    };
    let outcome = match source {
        Source::Replay(path) => {
            let lines = replay_source(path).map_err(|e| PipelineError::new(Stage::Ingest, io_err(path, e)))?;
            IngestOutcome {
                stats: ingest(lines, dedupe, &mut sink).map_err(at(Stage::Ingest))?,
                poll: None,
            }
        }
        Source::Poll { endpoint, duration } => {
            let mut cfg = PollConfig::new(endpoint.clone(), *policy, *duration);
            cfg.seed = seed;
            let fetcher = HttpFetcher::new(Duration::from_secs(30)).map_err(at(Stage::Ingest))?;
            let (tx, rx) = sync_channel::<Vec<u8>>(4096);
            let (report, stats) = thread::scope(|s| {
                let poller = s.spawn(move || {
                    let clock = SystemClock::new();
                    poll_source(&cfg, &fetcher, &clock, |line| {
                        let _ = tx.send(line);
                    })
                });
                let stats = ingest(rx.into_iter().map(Ok), dedupe, &mut sink);
                (poller.join().expect("poller panicked"), stats)
            });
            IngestOutcome {
                stats: stats.map_err(at(Stage::Ingest))?,
                poll: Some(PollSummary::from(&report)),
            }
        }
    };
    writer.finish().map_err(at(Stage::Ingest))?;
    if let Some(p) = stats_path {
        ensure_parent(p).map_err(at(Stage::Ingest))?;
        write_json(p, &outcome.stats).map_err(at(Stage::Ingest))?;
    }
    Ok(outcome)
}

/// Loads the base gazetteer, then the optional patch (placed ahead of it) and
/// denylist additions.
pub fn load_gazetteer(path: &Path, patch: Option<&Path>, denylist: Option<&Path>) -> Result<Gazetteer, PipelineError> {
    let mut g = Gazetteer::load(path).map_err(at(Stage::Resolve))?;
    if let Some(p) = patch {
        g = g.refine_from_file(p).map_err(at(Stage::Resolve))?;
    }
    if let Some(d) = denylist {
        let f = File::open(d).map_err(|e| PipelineError::new(Stage::Resolve, io_err(d, e)))?;
        g.extend_denylist(f).map_err(at(Stage::Resolve))?;
    }
    Ok(g)
}

#[derive(Serialize)]
struct UnknownRow<'a> {
    location: &'a str,
    count: u64,
}

/// Resolves every record of `input` and writes the resolved records and the
/// unresolved-location report. When `labels` is given the metrics include
/// precision.
pub fn stage_resolve(
    input: &Path,
    gazetteer: &Gazetteer,
    output: &Path,
    unknowns: &Path,
    labels: Option<&Path>,
    metrics_path: Option<&Path>,
) -> Result<ResolverMetrics, PipelineError> {
    let mut records = read_records(input).map_err(at(Stage::Resolve))?;
    let mut metrics = resolve_all(&mut records, gazetteer);
    if let Some(l) = labels {
        let f = File::open(l).map_err(|e| PipelineError::new(Stage::Resolve, io_err(l, e)))?;
        let labels = read_labels(f).map_err(at(Stage::Resolve))?;
        let scored = evaluate_resolver(&records, &labels).map_err(at(Stage::Resolve))?;
        metrics.correct = scored.correct;
        metrics.precision = scored.precision;
    }
    ensure_parent(output).map_err(at(Stage::Resolve))?;
    write_records(records.iter(), output).map_err(at(Stage::Resolve))?;
    let report = unknown_report(&records);
    let rows: Vec<UnknownRow> = report
        .iter()
        .map(|(location, count)| UnknownRow {
            location,
            count: *count,
        })
        .collect();
    ensure_parent(unknowns).map_err(at(Stage::Resolve))?;
    crate::analytics::output::write_rows(unknowns, &rows).map_err(at(Stage::Resolve))?;
    if let Some(p) = metrics_path {
        ensure_parent(p).map_err(at(Stage::Resolve))?;
        write_json(p, &metrics).map_err(at(Stage::Resolve))?;
    }
    Ok(metrics)
}

pub fn stage_analyze(
    input: &Path,
    native_map: &Path,
    opts: &AnalyzeOptions,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let records = read_records(input).map_err(at(Stage::Analyze))?;
    let f = File::open(native_map).map_err(|e| PipelineError::new(Stage::Analyze, io_err(native_map, e)))?;
    let native = read_native_map(f).map_err(at(Stage::Analyze))?;
    write_analysis(&records, &native, opts, out_dir).map_err(at(Stage::Analyze))
}

pub fn stage_correlate(counts: &Path, hdi: &Path, opts: &MsrcOptions, out_dir: &Path) -> Result<(), PipelineError> {
    let tweet_counts = read_country_counts(counts).map_err(at(Stage::Correlate))?;
    let results = correlate(&tweet_counts, hdi, opts).map_err(at(Stage::Correlate))?;
    write_correlations(&results, out_dir).map_err(at(Stage::Correlate))
}

pub fn stage_report(dir: &Path, config: &BTreeMap<String, String>) -> Result<ReportBundle, PipelineError> {
    build_report(dir, config).map_err(at(Stage::Report))
}

struct RunLog {
    out: BufWriter<File>,
}

impl RunLog {
    fn create(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(Self {
            out: BufWriter::new(file),
        })
    }

    fn log(&mut self, value: serde_json::Value) {
        if let Err(e) = writeln!(self.out, "{value}").and_then(|_| self.out.flush()) {
            log::warn!("run log: {e}");
        }
    }
}

fn timed<T>(
    log: &mut RunLog,
    stage: Stage,
    f: impl FnOnce() -> Result<T, PipelineError>,
    detail: impl FnOnce(&T) -> serde_json::Value,
) -> Result<T, PipelineError> {
    log::info!("stage {stage} started");
    let start = Instant::now();
    let result = f();
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    match &result {
        Ok(v) => log.log(json!({ "stage": stage.to_string(), "status": "ok", "elapsed_ms": elapsed_ms, "detail": detail(v) })),
        Err(e) => log.log(json!({ "stage": stage.to_string(), "status": "error", "elapsed_ms": elapsed_ms, "error": e.source.to_string() })),
    }
    result
}

/// Runs ingest, resolve, analyze, correlate and report into
/// `config.out_dir`. With `dry_run` only the config is validated and nothing
/// is written.
pub fn run_pipeline(config: &PipelineConfig, dry_run: bool) -> Result<Option<ReportBundle>, PipelineError> {
    config.validate().map_err(at(Stage::Config))?;
    if dry_run {
        return Ok(None);
    }
    let out = &config.out_dir;
    fs::create_dir_all(out).map_err(|e| PipelineError::new(Stage::Config, io_err(out, e)))?;
    let mut log = RunLog::create(&out.join(RUN_LOG)).map_err(at(Stage::Config))?;
    log.log(json!({ "stage": "config", "status": "ok", "config": config.to_kv() }));

    timed(
        &mut log,
        Stage::Ingest,
        || {
            stage_ingest(
                &config.source,
                &config.policy,
                &config.dedupe_config(),
                config.seed,
                &out.join(CLEANED),
                Some(&out.join(INGEST_STATS)),
            )
        },
        |o| serde_json::to_value(o).unwrap_or_default(),
    )?;
    timed(
        &mut log,
        Stage::Resolve,
        || {
            let g = load_gazetteer(&config.gazetteer, config.patch.as_deref(), config.denylist.as_deref())?;
            stage_resolve(
                &out.join(CLEANED),
                &g,
                &out.join(RESOLVED),
                &out.join(UNKNOWNS),
                config.labels.as_deref(),
                Some(&out.join(RESOLVER_METRICS)),
            )
        },
        |m| serde_json::to_value(m).unwrap_or_default(),
    )?;
    timed(
        &mut log,
        Stage::Analyze,
        || stage_analyze(&out.join(RESOLVED), &config.native_map, &config.analyze_options(), out),
        |_| json!({}),
    )?;
    timed(
        &mut log,
        Stage::Correlate,
        || stage_correlate(&out.join(COUNTRY_COUNTS), &config.hdi, &config.msrc_options(), out),
        |_| json!({}),
    )?;
    let bundle = timed(
        &mut log,
        Stage::Report,
        || stage_report(out, &config.to_kv()),
        |b| json!({ "artifacts": b.manifest.len() }),
    )?;
    Ok(Some(bundle))
}

/// Writes a synthetic corpus as JSON lines.
pub fn write_corpus(path: &Path, corpus: &crate::synth::SyntheticCorpus) -> io::Result<()> {
    ensure_parent(path)?;
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    for line in &corpus.lines {
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Counts data lines of a CSV file (header excluded).
pub fn csv_rows(path: &Path) -> io::Result<u64> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(f));
    Ok(rdr.records().count() as u64)
}
