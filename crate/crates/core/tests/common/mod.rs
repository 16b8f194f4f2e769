//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use itinguard::{AirportCode, FixtureProvider, Itinerary, Minutes, Stop, Timestamp};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const CODES: [&str; 10] = ["LHR", "CDG", "FRA", "IST", "DXB", "SIN", "NRT", "JFK", "GRU", "SYD"];

pub fn code(s: &str) -> AirportCode {
    AirportCode::new(s).unwrap()
}

pub fn ts(s: &str) -> Timestamp {
    Timestamp::parse(s).unwrap()
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every unordered pair of [`CODES`] with a duration drawn from [1h, 20h].
pub fn random_durations(rng: &mut StdRng) -> (FixtureProvider, Vec<(AirportCode, AirportCode, i64)>) {
    let mut table = Vec::new();
    for (i, a) in CODES.iter().enumerate() {
        for b in &CODES[i + 1..] {
            table.push((code(a), code(b), rng.gen_range(60..=1200)));
        }
    }
    let provider = FixtureProvider::from_pairs(table.iter().copied()).unwrap();
    (provider, table)
}

/// 2 to 8 stops, consecutive airports distinct, every timestamp uniform in a
/// 30-day window (so stays and gaps may be negative).
pub fn random_itinerary(rng: &mut StdRng) -> Itinerary {
    let n = rng.gen_range(2..=8);
    let start = ts("2025-06-01 00:00");
    let window = 30 * 24 * 60;
    let mut stops = Vec::with_capacity(n);
    let mut prev: Option<&str> = None;
    for _ in 0..n {
        let airport = *CODES.iter().filter(|c| Some(**c) != prev).collect::<Vec<_>>().choose(rng).unwrap();
        prev = Some(airport);
        let arrival = start + Minutes(rng.gen_range(0..window));
        let departure = start + Minutes(rng.gen_range(0..window));
        stops.push(Stop::new(format!("City {airport}"), code(airport), arrival, departure));
    }
    Itinerary::new(stops).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Issue tuple used to compare against the library: (kind, is_segment,
/// index, observed, required).
pub type OracleIssue = (&'static str, bool, usize, i64, i64);

/// Brute-force checker written from the rules alone: strict comparisons,
/// t_min = flight + buffer, t_max = floor(t_min * mult_num / mult_den).
pub fn oracle_issues(
    itin: &Itinerary,
    table: &[(AirportCode, AirportCode, i64)],
    min_stay: i64,
    buffer: i64,
    mult: (i64, i64),
) -> BTreeSet<OracleIssue> {
    let minutes = |t: Timestamp| (t - ts("1970-01-01 00:00")).get();
    let mut out = BTreeSet::new();
    let stops = itin.stops();
    for (i, s) in stops.iter().enumerate() {
        let stay = minutes(s.departure) - minutes(s.arrival);
        if stay < min_stay {
            out.insert(("stay_too_short", false, i, stay, min_stay));
        }
    }
    for i in 0..stops.len() - 1 {
        let (a, b) = (stops[i].airport, stops[i + 1].airport);
        let flight = table
            .iter()
            .find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
            .map(|t| t.2)
            .expect("route in table");
        let t_min = flight + buffer;
        let t_max = (t_min * mult.0).div_euclid(mult.1);
        let gap = minutes(stops[i + 1].arrival) - minutes(stops[i].departure);
        if gap < 0 {
            out.insert(("overlap", true, i, gap, t_min));
        } else if gap < t_min {
            out.insert(("transit_too_short", true, i, gap, t_min));
        } else if gap > t_max {
            out.insert(("transit_too_long", true, i, gap, t_max));
        }
    }
    out
}

pub fn library_issues(report: &itinguard::ValidationReport) -> BTreeSet<OracleIssue> {
    report
        .issues
        .iter()
        .map(|i| {
            let (seg, idx) = match i.subject {
                itinguard::validator::Subject::Stop(k) => (false, k),
                itinguard::validator::Subject::Segment(k) => (true, k),
            };
            (i.kind.as_str(), seg, idx, i.observed.unwrap().get(), i.required.unwrap().get())
        })
        .collect()
}

/// Sequential itinerary whose stays and gaps sit on or next to the rule
/// thresholds (default policy: 48h stay, 4h buffer, 2x cap).
pub fn boundary_itinerary(rng: &mut StdRng, table: &[(AirportCode, AirportCode, i64)]) -> Itinerary {
    let n = rng.gen_range(2..=8);
    let mut airports: Vec<&str> = Vec::with_capacity(n);
    for _ in 0..n {
        let prev = airports.last().copied();
        airports.push(*CODES.iter().filter(|c| Some(**c) != prev).collect::<Vec<_>>().choose(rng).unwrap());
    }
    let min_stay = 48 * 60;
    let mut at = ts("2025-06-01 00:00") + Minutes(rng.gen_range(0..24 * 60));
    let mut stops = Vec::with_capacity(n);
    for i in 0..n {
        let stay = *[min_stay - 1, min_stay, min_stay + 1, rng.gen_range(0..4 * 24 * 60)].choose(rng).unwrap();
        let arrival = at;
        let departure = arrival + Minutes(stay);
        stops.push(Stop::new(format!("City {}", airports[i]), code(airports[i]), arrival, departure));
        if i + 1 < n {
            let (a, b) = (code(airports[i]), code(airports[i + 1]));
            let flight = table.iter().find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a)).unwrap().2;
            let t_min = flight + 240;
            let t_max = 2 * t_min;
            let gap = *[-1, 0, t_min - 1, t_min, t_min + 1, t_max - 1, t_max, t_max + 1, rng.gen_range(-600..3 * t_max)]
                .choose(rng)
                .unwrap();
            at = departure + Minutes(gap);
        }
    }
    Itinerary::new(stops).unwrap()
}
