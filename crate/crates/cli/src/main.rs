use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use twlens::analytics::output::AnalyzeOptions;
use twlens::ingest::{parse_duration, DedupeConfig, RateLimitPolicy, DEFAULT_MEMORY_BOUND};
use twlens::pipeline::{
    self, load_gazetteer, read_config_file, run_pipeline, stage_analyze, stage_correlate, stage_ingest, stage_report,
    stage_resolve, write_corpus, PipelineConfig, Source,
};
use twlens::rankcorr::MsrcOptions;
use twlens::synth::{generate_corpus, CorpusConfig};

const OUT_DIR_ENV: &str = "TWLENS_OUT_DIR";

#[derive(Parser)]
#[command(name = "twlens", version, about = "Tweet-stream geography and language analytics")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean and deduplicate raw JSON-lines tweets into a record CSV.
    Ingest(IngestArgs),
    /// Resolve free-text locations against a gazetteer.
    Resolve(ResolveArgs),
    /// Country, handle, word and language aggregates.
    Analyze(AnalyzeArgs),
    /// Rank correlation of tweet counts against development-index tiers.
    Correlate(CorrelateArgs),
    /// Assemble plot-ready files and a hashed manifest.
    Report(ReportArgs),
    /// Run every stage end to end.
    Run(RunArgs),
    /// Write a seeded synthetic corpus of raw tweets.
    GenCorpus(GenCorpusArgs),
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Replay a JSON-lines file.
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Poll an HTTP endpoint returning JSON lines.
    #[arg(long, group = "source")]
    endpoint: Option<String>,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Requests per window, e.g. 450/15m.
    #[arg(long, default_value = "450/15m")]
    rate: String,
    /// Random pause between requests, e.g. 500-2000ms.
    #[arg(long, default_value = "500-2000ms")]
    interval: String,
    /// How long to poll.
    #[arg(long, default_value = "60s")]
    duration: String,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Records held in memory before deduplication spills to disk.
    #[arg(long, default_value_t = DEFAULT_MEMORY_BOUND)]
    memory_bound: usize,
    /// Seed for the polling jitter.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ResolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = pipeline::DEFAULT_GAZETTEER)]
    gazetteer: PathBuf,
    /// Corrections placed ahead of the gazetteer.
    #[arg(long)]
    patch: Option<PathBuf>,
    /// Extra fictional-place patterns.
    #[arg(long, default_value = pipeline::DEFAULT_DENYLIST)]
    denylist: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    unknowns: PathBuf,
    /// `tweet_id,country_iso` hand labels for precision.
    #[arg(long, requires = "metrics")]
    labels: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 500)]
    top_users: usize,
    #[arg(long, default_value_t = 100)]
    top_words: usize,
    #[arg(long, default_value = pipeline::DEFAULT_NATIVE_MAP)]
    native_map: PathBuf,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    counts: PathBuf,
    #[arg(long, default_value = pipeline::DEFAULT_HDI)]
    hdi: PathBuf,
    #[arg(long, env = OUT_DIR_ENV)]
    out: PathBuf,
    /// Multiply the squared-difference sum by 6.
    #[arg(long)]
    classic_factor: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, env = OUT_DIR_ENV)]
    dir: PathBuf,
    /// Config file echoed into the manifest.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    duration: Option<String>,
    #[arg(long)]
    rate: Option<String>,
    #[arg(long)]
    interval: Option<String>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    patch: Option<PathBuf>,
    #[arg(long)]
    denylist: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    native_map: Option<PathBuf>,
    #[arg(long)]
    hdi: Option<PathBuf>,
    #[arg(long)]
    top_users: Option<usize>,
    #[arg(long)]
    top_words: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    classic_factor: bool,
    #[arg(long)]
    memory_bound: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Validate the config and exit without touching anything.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    lines: usize,
    #[arg(long)]
    seed: u64,
    /// Plant all 64 pooled language codes.
    #[arg(long)]
    all_languages: bool,
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn run_config(args: &RunArgs) -> Result<PipelineConfig> {
    let mut kv = match &args.config {
        Some(p) => read_config_file(p).map_err(|e| anyhow!(e))?,
        None => BTreeMap::new(),
    };
    // A source flag on the command line replaces whichever source the file set.
    if args.input.is_some() || args.endpoint.is_some() {
        kv.remove("input");
        kv.remove("endpoint");
    }
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            kv.insert(k.to_string(), v);
        }
    };
    set("input", args.input.as_deref().map(path_str));
    set("endpoint", args.endpoint.clone());
    set("poll_duration", args.duration.clone());
    set("rate", args.rate.clone());
    set("interval", args.interval.clone());
    set("gazetteer", args.gazetteer.as_deref().map(path_str));
    set("patch", args.patch.as_deref().map(path_str));
    set("denylist", args.denylist.as_deref().map(path_str));
    set("labels", args.labels.as_deref().map(path_str));
    set("native_map", args.native_map.as_deref().map(path_str));
    set("hdi", args.hdi.as_deref().map(path_str));
    set("top_users", args.top_users.map(|v| v.to_string()));
    set("top_words", args.top_words.map(|v| v.to_string()));
    set("out_dir", args.out_dir.as_deref().map(path_str));
    set("classic_factor", args.classic_factor.then(|| "true".to_string()));
    set("memory_bound", args.memory_bound.map(|v| v.to_string()));
    set("seed", args.seed.map(|v| v.to_string()));
    PipelineConfig::from_kv(&kv).map_err(|e| anyhow!(e))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest(a) => {
            let source = match (a.source.input, a.source.endpoint) {
                (Some(p), _) => Source::Replay(p),
                (None, Some(endpoint)) => Source::Poll {
                    endpoint,
                    duration: parse_duration(&a.duration)?,
                },
                (None, None) => unreachable!("clap enforces a source"),
            };
            let policy = RateLimitPolicy::parse(&a.rate, &a.interval)?;
            let dedupe = DedupeConfig {
                memory_bound: a.memory_bound,
                spill_dir: None,
            };
            let outcome = stage_ingest(&source, &policy, &dedupe, a.seed, &a.output, a.stats.as_deref())?;
            log::info!("ingest: {:?}", outcome.stats);
        }
        Command::Resolve(a) => {
            let g = load_gazetteer(&a.gazetteer, a.patch.as_deref(), Some(&a.denylist))?;
            let m = stage_resolve(
                &a.input,
                &g,
                &a.output,
                &a.unknowns,
                a.labels.as_deref(),
                a.metrics.as_deref(),
            )?;
            log::info!("resolve: {m:?}");
        }
        Command::Analyze(a) => {
            let opts = AnalyzeOptions {
                top_users: a.top_users,
                top_words: a.top_words,
                ..AnalyzeOptions::default()
            };
            stage_analyze(&a.input, &a.native_map, &opts, &a.out_dir)?;
        }
        Command::Correlate(a) => {
            let opts = MsrcOptions {
                classic_factor: a.classic_factor,
                ..MsrcOptions::default()
            };
            stage_correlate(&a.counts, &a.hdi, &opts, &a.out)?;
        }
        Command::Report(a) => {
            let config = match &a.config {
                Some(p) => read_config_file(p).map_err(|e| anyhow!(e))?,
                None => BTreeMap::new(),
            };
            let bundle = stage_report(&a.dir, &config)?;
            log::info!("report: {} artifacts", bundle.manifest.len());
        }
        Command::Run(a) => {
            let config = run_config(&a)?;
            match run_pipeline(&config, a.dry_run)? {
                Some(bundle) => log::info!(
                    "run: {} artifacts in {}",
                    bundle.manifest.len(),
                    config.out_dir.display()
                ),
                None => println!("config ok"),
            }
        }
        Command::GenCorpus(a) => {
            let mut cfg = CorpusConfig::new(a.lines, a.seed);
            cfg.all_languages = a.all_languages;
            let corpus = generate_corpus(&cfg);
            write_corpus(&a.output, &corpus).with_context(|| format!("writing {}", a.output.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
