use std::time::Duration;

use log::{debug, warn};

use super::{DurationCache, DurationSource, FetchError, FlightDuration, FlightDurations, ProviderConfig, RoutePair, Unavailable};
use crate::model::Timestamp;

/// Fixed pause between attempts.
pub const RETRY_DELAY: Duration = Duration::from_secs(1);

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoSleep;

impl Sleeper for NoSleep {
    fn sleep(&self, _: Duration) {}
}

/// Wraps a remote source with a cache and a bounded retry loop.
///
/// A cache hit never touches the source. A miss makes up to
/// `config.max_retries` attempts, sleeping [`RETRY_DELAY`] between them, and
/// stores the first success. Null payloads count as failed attempts.
pub struct CachingProvider<S, Z = ThreadSleeper> {
    source: S,
    config: ProviderConfig,
    cache: DurationCache,
    sleeper: Z,
}

impl<S: DurationSource> CachingProvider<S, ThreadSleeper> {
    pub fn new(source: S, config: ProviderConfig) -> std::io::Result<Self> {
        Self::with_sleeper(source, config, ThreadSleeper)
    }
}

impl<S: DurationSource, Z: Sleeper> CachingProvider<S, Z> {
    /// Opens the file tier when `config.cache_path` is set.
    pub fn with_sleeper(source: S, config: ProviderConfig, sleeper: Z) -> std::io::Result<Self> {
        let cache = match &config.cache_path {
            Some(path) => DurationCache::persistent(path)?.0,
            None => DurationCache::new(),
        };
        Ok(Self::with_cache(source, config, cache, sleeper))
    }

    pub fn with_cache(source: S, config: ProviderConfig, cache: DurationCache, sleeper: Z) -> Self {
        CachingProvider { source, config, cache, sleeper }
    }

    pub fn cache(&self) -> &DurationCache {
        &self.cache
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn source(&self) -> &S {
        &self.source
    }
}

impl<S: DurationSource, Z: Sleeper> FlightDurations for CachingProvider<S, Z> {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable> {
        if let Some(hit) = self.cache.get(route) {
            return Ok(hit);
        }
        let attempts = self.config.max_retries.max(1);
        let mut last: Option<FetchError> = None;
        for attempt in 1..=attempts {
            match self.source.fetch(route) {
                Ok(duration) => {
                    debug!("{route}: {} min on attempt {attempt}", duration.minutes());
                    self.cache.insert(route, duration, Some(Timestamp::now()));
                    return Ok(duration);
                }
                Err(e) => {
                    warn!("{route}: attempt {attempt}/{attempts} failed: {e}");
                    last = Some(e);
                    if attempt < attempts {
                        self.sleeper.sleep(RETRY_DELAY);
                    }
                }
            }
        }
        Err(Unavailable {
            route,
            attempts,
            reason: last.map(|e| e.to_string()).unwrap_or_default(),
        })
    }
}
