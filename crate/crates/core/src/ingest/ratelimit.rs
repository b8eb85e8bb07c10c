use std::collections::VecDeque;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IngestError;

/// Request budget for a polled endpoint: at most `max_requests` in any
/// sliding `window`, and a random pause in `[poll_interval_min,
/// poll_interval_max]` between consecutive requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateLimitPolicy {
    pub max_requests: u32,
    pub window: Duration,
    pub poll_interval_min: Duration,
    pub poll_interval_max: Duration,
}

impl Default for RateLimitPolicy {
    /// 450 requests per 15 minutes, polled every 500-2000 ms.
    fn default() -> Self {
        Self {
            max_requests: 450,
            window: Duration::from_secs(15 * 60),
            poll_interval_min: Duration::from_millis(500),
            poll_interval_max: Duration::from_millis(2000),
        }
    }
}

impl RateLimitPolicy {
    pub fn new(
        max_requests: u32,
        window: Duration,
        poll_interval_min: Duration,
        poll_interval_max: Duration,
    ) -> Result<Self, IngestError> {
        let p = Self {
            max_requests,
            window,
            poll_interval_min,
            poll_interval_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.max_requests == 0 {
            return Err(IngestError::Policy("max_requests must be positive".into()));
        }
        if self.window.is_zero() {
            return Err(IngestError::Policy("window must be positive".into()));
        }
        if self.poll_interval_min > self.poll_interval_max {
            return Err(IngestError::Policy(format!(
                "interval min {:?} exceeds max {:?}",
                self.poll_interval_min, self.poll_interval_max
            )));
        }
        Ok(())
    }

    /// Parses `--rate` (`450/15m`, `2/1s`) and `--interval` (`500-2000ms`).
    pub fn parse(rate: &str, interval: &str) -> Result<Self, IngestError> {
        let (n, window) = rate
            .split_once('/')
            .ok_or_else(|| IngestError::Policy(format!("rate {rate:?}: expected <n>/<window>")))?;
        let max_requests = n
            .trim()
            .parse()
            .map_err(|_| IngestError::Policy(format!("rate {rate:?}: bad count")))?;
        let window = parse_duration(window)?;
        let (lo, hi) = interval
            .trim()
            .strip_suffix("ms")
            .and_then(|s| s.split_once('-'))
            .ok_or_else(|| IngestError::Policy(format!("interval {interval:?}: expected <min>-<max>ms")))?;
        let ms = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map(Duration::from_millis)
                .map_err(|_| IngestError::Policy(format!("interval {interval:?}: bad number")))
        };
        Self::new(max_requests, window, ms(lo)?, ms(hi)?)
    }
}

/// `15m`, `1s`, `500ms`, `2h`; a bare number means seconds.
pub fn parse_duration(s: &str) -> Result<Duration, IngestError> {
    let s = s.trim();
    let bad = || IngestError::Policy(format!("bad duration {s:?}"));
    let split = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let n: u64 = num.parse().map_err(|_| bad())?;
    let d = match unit {
        "ms" => Duration::from_millis(n),
        "" | "s" => Duration::from_secs(n),
        "m" | "min" => Duration::from_secs(n * 60),
        "h" => Duration::from_secs(n * 3600),
        _ => return Err(bad()),
    };
    Ok(d)
}

impl FromStr for RateLimitPolicy {
    type Err = IngestError;

    /// `<n>/<window>@<min>-<max>ms`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (rate, interval) = s
            .split_once('@')
            .ok_or_else(|| IngestError::Policy(format!("policy {s:?}: expected <rate>@<interval>")))?;
        Self::parse(rate, interval)
    }
}

/// Time source measured from an arbitrary origin.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Virtual time: `sleep` advances the clock instantly.
#[derive(Default)]
pub struct ManualClock {
    now: Mutex<Duration>,
}

impl ManualClock {
    pub fn advance(&self, d: Duration) {
        *self.now.lock().unwrap() += d;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }

    fn sleep(&self, d: Duration) {
        self.advance(d);
    }
}

/// Sliding-window request log plus a randomized minimum gap.
#[derive(Debug)]
pub struct RateLimiter {
    policy: RateLimitPolicy,
    // the last `max_requests` request times, oldest first
    recent: VecDeque<Duration>,
    next_gap: Duration,
    rng: ChaCha8Rng,
}

impl RateLimiter {
    pub fn new(policy: RateLimitPolicy, seed: u64) -> Self {
        Self {
            policy,
            recent: VecDeque::with_capacity(policy.max_requests as usize),
            next_gap: Duration::ZERO,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn policy(&self) -> &RateLimitPolicy {
        &self.policy
    }

    /// Earliest time the next request may be sent.
    pub fn next_allowed(&self) -> Duration {
        let after_gap = self.recent.back().map_or(Duration::ZERO, |t| *t + self.next_gap);
        let after_window = if self.recent.len() >= self.policy.max_requests as usize {
            self.recent.front().map_or(Duration::ZERO, |t| *t + self.policy.window)
        } else {
            Duration::ZERO
        };
        after_gap.max(after_window)
    }

    pub fn record(&mut self, at: Duration) {
        self.recent.push_back(at);
        while self.recent.len() > self.policy.max_requests as usize {
            self.recent.pop_front();
        }
        let (lo, hi) = (self.policy.poll_interval_min, self.policy.poll_interval_max);
        self.next_gap = if lo == hi {
            lo
        } else {
            Duration::from_nanos(self.rng.gen_range(lo.as_nanos() as u64..=hi.as_nanos() as u64))
        };
    }

    /// Waits until a request is allowed and records it, unless that moment
    /// falls at or after `deadline`.
    pub fn acquire_before(&mut self, clock: &dyn Clock, deadline: Duration) -> Option<Duration> {
        let target = self.next_allowed();
        if target >= deadline {
            return None;
        }
        let now = clock.now();
        if target > now {
            clock.sleep(target - now);
        }
        let at = clock.now();
        if at >= deadline {
            return None;
        }
        self.record(at);
        Some(at)
    }
}
