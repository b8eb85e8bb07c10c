mod common;

use std::time::Duration;

use common::{tweet_line, MockServer};
use twlens::ingest::{poll_source, HttpFetcher, PollConfig, RateLimitPolicy, SystemClock};
use twlens::pipeline::{stage_ingest, Source};

fn policy(n: u32, window_ms: u64, lo: u64, hi: u64) -> RateLimitPolicy {
    RateLimitPolicy::new(
        n,
        Duration::from_millis(window_ms),
        Duration::from_millis(lo),
        Duration::from_millis(hi),
    )
    .unwrap()
}

fn body() -> String {
    [
        tweet_line("1", Some("Paris"), Some("fr"), "un", false),
        tweet_line("2", Some("Lima"), Some("es"), "dos", false),
        tweet_line("3", None, Some("en"), "three", false),
    ]
    .join("\n")
        + "\n"
}

#[test]
fn server_errors_are_retried_then_lines_flow() {
    let server = MockServer::start(vec![500, 500, 200], &body());
    let mut cfg = PollConfig::new(
        server.url.clone(),
        policy(100, 1000, 20, 20),
        Duration::from_millis(1500),
    );
    cfg.backoff_base = Duration::from_millis(50);
    let fetcher = HttpFetcher::new(Duration::from_secs(5)).unwrap();
    let mut lines = Vec::new();
    let report = poll_source(&cfg, &fetcher, &SystemClock::new(), |l| lines.push(l));
    assert_eq!(report.retries, 2);
    assert_eq!(report.failed_polls, 0);
    assert_eq!(&report.errors[..], ["HTTP 500", "HTTP 500"]);
    assert!(report.requests() >= 4, "{} requests", report.requests());
    assert_eq!(server.arrivals().len(), report.requests());
    assert_eq!(report.lines as usize, lines.len());
    assert_eq!(lines.len(), 3 * (report.requests() - 2));
    // backoff doubles: 50 ms then 100 ms
    let t = &report.request_times;
    assert!(t[1] - t[0] >= Duration::from_millis(50));
    assert!(t[2] - t[1] >= Duration::from_millis(100));
}

#[test]
fn persistent_failure_counts_failed_polls() {
    let server = MockServer::start(vec![503], "");
    let mut cfg = PollConfig::new(
        server.url.clone(),
        policy(100, 1000, 10, 10),
        Duration::from_millis(1200),
    );
    cfg.backoff_base = Duration::from_millis(20);
    cfg.max_attempts = 2;
    let fetcher = HttpFetcher::new(Duration::from_secs(5)).unwrap();
    let report = poll_source(&cfg, &fetcher, &SystemClock::new(), |_| panic!("no lines expected"));
    assert!(report.failed_polls >= 1);
    assert_eq!(report.errors.len(), report.requests());
    assert_eq!(report.lines, 0);
}

#[test]
fn two_per_second_quota() {
    let server = MockServer::start(vec![200], &body());
    let cfg = PollConfig::new(server.url.clone(), policy(2, 1000, 0, 0), Duration::from_millis(4500));
    let fetcher = HttpFetcher::new(Duration::from_secs(5)).unwrap();
    let report = poll_source(&cfg, &fetcher, &SystemClock::new(), |_| {});
    let t = &report.request_times;
    assert_eq!(t.len(), 10, "{t:?}");
    for w in t.windows(3) {
        assert!(w[2] - w[0] >= Duration::from_secs(1), "{w:?}");
    }
    assert_eq!(server.arrivals().len(), 10);
}

#[test]
fn polled_ingest_deduplicates_across_polls() {
    let server = MockServer::start(vec![200], &body());
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cleaned.csv");
    let outcome = stage_ingest(
        &Source::Poll {
            endpoint: server.url.clone(),
            duration: Duration::from_millis(1000),
        },
        &policy(10, 1000, 100, 200),
        &Default::default(),
        7,
        &out,
        Some(&dir.path().join("stats.json")),
    )
    .unwrap();
    let poll = outcome.poll.expect("poll summary");
    let polls = server.arrivals().len() as u64;
    assert!(polls >= 2);
    assert_eq!(poll.requests as u64, polls);
    assert_eq!(poll.lines, 3 * polls);
    let s = outcome.stats;
    assert_eq!(s.seen, 3 * polls);
    assert_eq!(s.kept, 2);
    assert_eq!(s.skipped_missing_location, polls);
    assert_eq!(s.duplicates_removed, 2 * (polls - 1));
    assert!(s.is_balanced());
    assert_eq!(twlens::records::read_records(&out).unwrap().len(), 2);
}
