//! In-memory duration cache with an optional line-delimited file tier.
//!
//! File format: UTF-8, one `ORIGIN DEST minutes` record per line, sorted by
//! route. Corrupt lines are skipped with a warning.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use log::warn;

use super::{FlightDuration, RoutePair};
use crate::model::{AirportCode, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub route: RoutePair,
    pub duration: FlightDuration,
    /// Unset for entries read back from the cache file.
    pub fetched_at: Option<Timestamp>,
}

/// Outcome of reading a cache file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub loaded: usize,
    /// `(1-based line number, reason)` for each skipped line.
    pub skipped: Vec<(usize, String)>,
}

#[derive(Debug, Default)]
pub struct DurationCache {
    entries: RwLock<BTreeMap<RoutePair, CacheEntry>>,
    file: Option<PathBuf>,
    write_lock: Mutex<()>,
}

/// Parses one `ORIGIN DEST minutes` record.
pub fn parse_route_line(line: &str) -> Result<(RoutePair, FlightDuration), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [origin, dest, minutes] = fields.as_slice() else {
        return Err(format!("expected 3 fields, found {}", fields.len()));
    };
    let origin = AirportCode::new(origin).map_err(|e| e.to_string())?;
    let dest = AirportCode::new(dest).map_err(|e| e.to_string())?;
    let route = RoutePair::new(origin, dest).map_err(|e| e.to_string())?;
    let minutes: i64 = minutes.parse().map_err(|_| format!("bad minute count {minutes:?}"))?;
    let duration = FlightDuration::from_minutes(minutes).map_err(|e| e.to_string())?;
    Ok((route, duration))
}

impl DurationCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `path` if it exists and writes every later insertion back to it.
    pub fn persistent(path: impl Into<PathBuf>) -> io::Result<(Self, LoadReport)> {
        let path = path.into();
        let (mut cache, report) = Self::load(&path)?;
        cache.file = Some(path);
        Ok((cache, report))
    }

    /// A missing file yields an empty cache.
    pub fn load(path: &Path) -> io::Result<(Self, LoadReport)> {
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((Self::new(), LoadReport::default())),
            Err(e) => return Err(e),
        };
        let (entries, report) = Self::parse(&text);
        for (line, reason) in &report.skipped {
            warn!("{}:{line}: skipping corrupt cache record: {reason}", path.display());
        }
        Ok((DurationCache { entries: RwLock::new(entries), ..Default::default() }, report))
    }

    fn parse(text: &str) -> (BTreeMap<RoutePair, CacheEntry>, LoadReport) {
        let mut entries = BTreeMap::new();
        let mut report = LoadReport::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_route_line(line) {
                Ok((route, duration)) => {
                    entries.insert(route, CacheEntry { route, duration, fetched_at: None });
                }
                Err(reason) => report.skipped.push((i + 1, reason)),
            }
        }
        report.loaded = entries.len();
        (entries, report)
    }

    /// Serialized form, sorted by route.
    pub fn to_text(&self) -> String {
        let entries = self.entries.read().expect("cache lock poisoned");
        let mut out = String::new();
        for e in entries.values() {
            out.push_str(&format!("{} {} {}\n", e.route.origin, e.route.destination, e.duration.minutes()));
        }
        out
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let _guard = self.write_lock.lock().expect("cache write lock poisoned");
        let text = self.to_text();
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(tmp, path)
    }

    pub fn get(&self, route: RoutePair) -> Option<FlightDuration> {
        self.entries.read().expect("cache lock poisoned").get(&route).map(|e| e.duration)
    }

    pub fn entry(&self, route: RoutePair) -> Option<CacheEntry> {
        self.entries.read().expect("cache lock poisoned").get(&route).cloned()
    }

    /// Stores the entry in memory and, for a persistent cache, rewrites the file.
    pub fn insert(&self, route: RoutePair, duration: FlightDuration, fetched_at: Option<Timestamp>) {
        self.entries
            .write()
            .expect("cache lock poisoned")
            .insert(route, CacheEntry { route, duration, fetched_at });
        if let Some(path) = &self.file {
            if let Err(e) = self.save(path) {
                warn!("failed to persist duration cache to {}: {e}", path.display());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn routes(&self) -> Vec<(RoutePair, FlightDuration)> {
        self.entries.read().expect("cache lock poisoned").values().map(|e| (e.route, e.duration)).collect()
    }
}
