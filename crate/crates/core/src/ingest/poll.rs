use std::time::Duration;

use super::ratelimit::{Clock, RateLimitPolicy, RateLimiter};

/// One HTTP GET; returns the status code and body.
pub trait Fetch {
    fn get(&self, url: &str) -> Result<(u16, Vec<u8>), String>;
}

pub struct HttpFetcher {
    client: reqwest::blocking::Client,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| e.to_string())?;
        Ok(Self { client })
    }
}

impl Fetch for HttpFetcher {
    fn get(&self, url: &str) -> Result<(u16, Vec<u8>), String> {
        let resp = self.client.get(url).send().map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.bytes().map_err(|e| e.to_string())?;
        Ok((status, body.to_vec()))
    }
}

#[derive(Debug, Clone)]
pub struct PollConfig {
    pub endpoint: String,
    pub policy: RateLimitPolicy,
    pub duration: Duration,
    /// Attempts per poll, first try included.
    pub max_attempts: u32,
    /// Backoff before the second attempt; doubles after each failure.
    pub backoff_base: Duration,
    pub seed: u64,
}

impl PollConfig {
    pub fn new(endpoint: impl Into<String>, policy: RateLimitPolicy, duration: Duration) -> Self {
        Self {
            endpoint: endpoint.into(),
            policy,
            duration,
            max_attempts: 3,
            backoff_base: Duration::from_secs(1),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PollReport {
    /// Send time of every request, retries included, from the start of the run.
    pub request_times: Vec<Duration>,
    pub retries: u64,
    /// Polls that still failed after the last attempt.
    pub failed_polls: u64,
    pub lines: u64,
    pub errors: Vec<String>,
}

impl PollReport {
    pub fn requests(&self) -> usize {
        self.request_times.len()
    }
}

/// Polls `config.endpoint` until `config.duration` elapses, forwarding each
/// non-empty line of every successful response body to `sink`. Every attempt,
/// retries included, goes through the rate limiter. Failures (transport
/// errors or non-2xx) are retried with exponential backoff and then recorded.
pub fn poll_source<F: Fetch + ?Sized>(
    config: &PollConfig,
    fetcher: &F,
    clock: &dyn Clock,
    mut sink: impl FnMut(Vec<u8>),
) -> PollReport {
    let mut limiter = RateLimiter::new(config.policy, config.seed);
    let mut report = PollReport::default();
    let deadline = clock.now() + config.duration;
    'polls: loop {
        let mut backoff = config.backoff_base;
        for attempt in 1..=config.max_attempts.max(1) {
            let Some(at) = limiter.acquire_before(clock, deadline) else {
                break 'polls;
            };
            report.request_times.push(at);
            let outcome = match fetcher.get(&config.endpoint) {
                Ok((status, body)) if (200..300).contains(&status) => Ok(body),
                Ok((status, _)) => Err(format!("HTTP {status}")),
                Err(e) => Err(e),
            };
            match outcome {
                Ok(body) => {
                    for line in body.split(|b| *b == b'\n') {
                        let line = line.strip_suffix(b"\r").unwrap_or(line);
                        if !line.iter().all(u8::is_ascii_whitespace) {
                            report.lines += 1;
                            sink(line.to_vec());
                        }
                    }
                    continue 'polls;
                }
                Err(e) => {
                    log::warn!("poll attempt {attempt} failed: {e}");
                    report.errors.push(e);
                    if attempt == config.max_attempts.max(1) {
                        report.failed_polls += 1;
                        continue 'polls;
                    }
                    report.retries += 1;
                    if clock.now() + backoff >= deadline {
                        break 'polls;
                    }
                    clock.sleep(backoff);
                    backoff *= 2;
                }
            }
        }
    }
    report
}
