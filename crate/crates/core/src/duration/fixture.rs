use std::collections::HashMap;
use std::path::Path;

use super::{parse_route_line, DurationSource, FetchError, FlightDuration, FlightDurations, RoutePair, Unavailable};
use crate::model::AirportCode;

/// Deterministic, direction-symmetric duration table.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    table: HashMap<RoutePair, FlightDuration>,
}

impl FixtureProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, route: RoutePair, duration: FlightDuration) {
        self.table.insert(route.unordered(), duration);
    }

    /// Builds a table from `(a, b, minutes)` triples.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = (AirportCode, AirportCode, i64)>,
    {
        let mut fixture = Self::new();
        for (a, b, minutes) in pairs {
            let route = RoutePair::new(a, b).map_err(|e| e.to_string())?;
            let duration = FlightDuration::from_minutes(minutes).map_err(|e| e.to_string())?;
            fixture.insert(route, duration);
        }
        Ok(fixture)
    }

    /// Same `ORIGIN DEST minutes` line format as the cache file, but strict:
    /// any malformed line is an error. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut fixture = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (route, duration) = parse_route_line(line).map_err(|e| format!("line {}: {e}", i + 1))?;
            fixture.insert(route, duration);
        }
        Ok(fixture)
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl FlightDurations for FixtureProvider {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable> {
        self.table.get(&route.unordered()).copied().ok_or_else(|| Unavailable {
            route,
            attempts: 1,
            reason: "route not in fixture table".into(),
        })
    }
}

impl DurationSource for FixtureProvider {
    fn fetch(&self, route: RoutePair) -> Result<FlightDuration, FetchError> {
        self.flight_duration(route).map_err(|e| FetchError::Transport(e.reason))
    }
}
