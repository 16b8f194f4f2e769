//! Flight-duration lookup and the transit bounds derived from it.
//!
//! Every provider implements [`FlightDurations`]. Remote sources implement the
//! lower-level [`DurationSource`] (one attempt, may fail) and get retries and
//! caching by being wrapped in a [`CachingProvider`].

mod cache;
mod fixture;
mod geo;
mod live;
mod payload;
mod provider;

use std::fmt;
use std::path::PathBuf;

use num_rational::Ratio;
use serde::Serialize;

use crate::model::{AirportCode, Minutes};
use crate::scalar::Exact;

pub use cache::{parse_route_line, CacheEntry, DurationCache, LoadReport};
pub use fixture::FixtureProvider;
pub use geo::{estimate_duration_great_circle, haversine_km, GeoError, GreatCircleProvider, LatLon, AIRPORTS};
pub use live::{AeroDataBoxClient, API_KEY_ENV, DEFAULT_BASE_URL};
pub use payload::{parse_duration_payload, PayloadError};
pub use provider::{CachingProvider, NoSleep, Sleeper, ThreadSleeper, RETRY_DELAY};

/// Upper sanity bound on a single flight.
pub const MAX_FLIGHT_MINUTES: i64 = 48 * 60;

/// Directed origin/destination pair of distinct airports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RoutePair {
    pub origin: AirportCode,
    pub destination: AirportCode,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("route {0} -> {0} has identical endpoints")]
pub struct SelfRoute(pub AirportCode);

impl RoutePair {
    pub fn new(origin: AirportCode, destination: AirportCode) -> Result<Self, SelfRoute> {
        if origin == destination {
            return Err(SelfRoute(origin));
        }
        Ok(RoutePair { origin, destination })
    }

    pub fn reversed(self) -> Self {
        RoutePair { origin: self.destination, destination: self.origin }
    }

    /// Direction-free key: endpoints in sorted order.
    pub fn unordered(self) -> Self {
        if self.origin <= self.destination {
            self
        } else {
            self.reversed()
        }
    }
}

impl fmt::Display for RoutePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.origin, self.destination)
    }
}

/// Typical flight time, `0 < minutes <= 48h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FlightDuration(i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("flight duration of {0} minutes is outside (0, {MAX_FLIGHT_MINUTES}]")]
pub struct DurationOutOfRange(pub i64);

impl FlightDuration {
    pub fn from_minutes(minutes: i64) -> Result<Self, DurationOutOfRange> {
        if minutes <= 0 || minutes > MAX_FLIGHT_MINUTES {
            return Err(DurationOutOfRange(minutes));
        }
        Ok(FlightDuration(minutes))
    }

    pub fn minutes(self) -> i64 {
        self.0
    }

    pub fn as_minutes(self) -> Minutes {
        Minutes(self.0)
    }
}

/// Allowed travel window for one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransitBounds {
    /// Flight duration plus buffer.
    pub t_min: Minutes,
    /// `t_min` times the multiplier, floored to the minute.
    pub t_max: Minutes,
}

impl TransitBounds {
    pub fn new(flight: FlightDuration, buffer: Minutes, max_multiplier: Exact) -> Self {
        let t_min = flight.as_minutes() + buffer;
        let t_max = (Ratio::from_integer(t_min.get()) * max_multiplier).floor().to_integer();
        TransitBounds { t_min, t_max: Minutes(t_max) }
    }

    /// The default 2x cap.
    pub fn doubled(flight: FlightDuration, buffer: Minutes) -> Self {
        Self::new(flight, buffer, Ratio::from_integer(2))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderConfig {
    pub buffer: Minutes,
    /// Total fetch attempts per uncached route.
    pub max_retries: u32,
    pub cache_path: Option<PathBuf>,
    pub strict_mode: bool,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig { buffer: Minutes::hours(4), max_retries: 3, cache_path: None, strict_mode: false }
    }
}

/// A route whose duration could not be obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("no flight duration for {route} after {attempts} attempt(s): {reason}")]
pub struct Unavailable {
    pub route: RoutePair,
    pub attempts: u32,
    pub reason: String,
}

/// Failure of a single remote attempt.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP status {0}")]
    Status(u16),
    #[error(transparent)]
    Payload(#[from] PayloadError),
}

/// Anything that answers "how long is the flight on this route".
pub trait FlightDurations: Send + Sync {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable>;
}

/// One unreliable attempt against a remote service.
pub trait DurationSource: Send + Sync {
    fn fetch(&self, route: RoutePair) -> Result<FlightDuration, FetchError>;
}

impl<T: FlightDurations + ?Sized> FlightDurations for &T {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable> {
        (**self).flight_duration(route)
    }
}

impl<T: FlightDurations + ?Sized> FlightDurations for Box<T> {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable> {
        (**self).flight_duration(route)
    }
}

impl<T: DurationSource + ?Sized> DurationSource for &T {
    fn fetch(&self, route: RoutePair) -> Result<FlightDuration, FetchError> {
        (**self).fetch(route)
    }
}

/// Looks up the route and adds `config.buffer`; the cap is twice `t_min`.
pub fn transit_bounds<P: FlightDurations + ?Sized>(
    provider: &P,
    route: RoutePair,
    config: &ProviderConfig,
) -> Result<TransitBounds, Unavailable> {
    let flight = provider.flight_duration(route)?;
    Ok(TransitBounds::doubled(flight, config.buffer))
}
