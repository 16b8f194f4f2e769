//! Itinerary domain types and the JSON wire format.
//!
//! Two input shapes are accepted: a bare array of stop objects, and an object
//! whose `"itinerary"` field holds that array. Rendering always emits the
//! wrapped form.

mod time;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use time::{Minutes, Timestamp, TimestampError, TIMESTAMP_FORMAT};

/// Three-letter uppercase IATA airport code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AirportCode([u8; 3]);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0:?} is not a three-letter uppercase IATA code")]
pub struct AirportCodeError(pub String);

impl AirportCode {
    pub fn new(code: &str) -> Result<Self, AirportCodeError> {
        match code.as_bytes() {
            &[a, b, c] if [a, b, c].iter().all(u8::is_ascii_uppercase) => Ok(AirportCode([a, b, c])),
            _ => Err(AirportCodeError(code.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }
}

impl fmt::Display for AirportCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AirportCode {
    type Err = AirportCodeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AirportCode::new(s)
    }
}

impl Serialize for AirportCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for AirportCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        AirportCode::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One visit. Arrival and departure are unordered on purpose: raw generator
/// output may be inconsistent and the validator reports it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stop {
    pub place_name: String,
    pub airport: AirportCode,
    pub arrival: Timestamp,
    pub departure: Timestamp,
}

impl Stop {
    pub fn new(place_name: impl Into<String>, airport: AirportCode, arrival: Timestamp, departure: Timestamp) -> Self {
        Stop { place_name: place_name.into(), airport, arrival, departure }
    }

    /// `departure - arrival`; negative when the stop departs before it arrives.
    pub fn stay_duration(&self) -> Minutes {
        self.departure - self.arrival
    }

    /// The wire-format place label, `Name (XXX)`.
    pub fn label(&self) -> String {
        format!("{} ({})", self.place_name, self.airport)
    }
}

/// Transition between stop `from_index` and `from_index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub from_index: usize,
    pub to_index: usize,
    pub origin: AirportCode,
    pub destination: AirportCode,
    /// Arrival at the to-stop minus departure from the from-stop.
    pub travel_time: Minutes,
}

/// A non-empty ordered list of stops in visit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itinerary {
    stops: Vec<Stop>,
}

impl Itinerary {
    /// `None` for an empty list.
    pub fn new(stops: Vec<Stop>) -> Option<Self> {
        if stops.is_empty() {
            None
        } else {
            Some(Itinerary { stops })
        }
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    pub fn stops_mut(&mut self) -> &mut [Stop] {
        &mut self.stops
    }

    pub fn len(&self) -> usize {
        self.stops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segment(&self, index: usize) -> Option<Segment> {
        let from = self.stops.get(index)?;
        let to = self.stops.get(index + 1)?;
        Some(Segment {
            from_index: index,
            to_index: index + 1,
            origin: from.airport,
            destination: to.airport,
            travel_time: to.arrival - from.departure,
        })
    }

    /// Exactly `len() - 1` segments, in visit order.
    pub fn segments(&self) -> Vec<Segment> {
        (0..self.stops.len() - 1).filter_map(|i| self.segment(i)).collect()
    }

    /// Canonical wrapped JSON document, pretty-printed, trailing newline.
    pub fn render(&self) -> String {
        let doc = WireDocument {
            itinerary: self
                .stops
                .iter()
                .map(|s| WireStop {
                    place: s.label(),
                    arrival_time: s.arrival.to_string(),
                    departure_time: s.departure.to_string(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("wire document serializes");
        out.push('\n');
        out
    }
}

#[derive(Serialize)]
struct WireDocument {
    itinerary: Vec<WireStop>,
}

#[derive(Serialize)]
struct WireStop {
    place: String,
    arrival_time: String,
    departure_time: String,
}

/// Why a generated document was rejected before any temporal checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormatErrorKind {
    #[error("response is not a valid itinerary JSON document")]
    InvalidJson,
    #[error("invalid time format for {stop_label}")]
    InvalidTimeFormat { stop_label: String },
    #[error("expected {expected} stops, found {actual}")]
    InsufficientStops { expected: usize, actual: usize },
    #[error("stop {stop_index} is missing field {field:?}")]
    MissingField { field: String, stop_index: usize },
    #[error("stop {stop_index} place is not of the form \"Name (XXX)\"")]
    BadPlaceFormat { stop_index: usize },
}

/// Splits `Name (XXX)` on the last parenthesized three-letter code.
pub fn parse_place(place: &str) -> Option<(String, AirportCode)> {
    let trimmed = place.trim_end();
    let body = trimmed.strip_suffix(')')?;
    let open = body.rfind('(')?;
    let code = AirportCode::new(&body[open + 1..]).ok()?;
    let name = body[..open].trim();
    if name.is_empty() {
        return None;
    }
    Some((name.to_string(), code))
}

/// Parses a generated document and checks it has exactly `expected_stops` stops.
pub fn parse_itinerary(text: &str, expected_stops: usize) -> Result<Itinerary, FormatErrorKind> {
    parse_with(text, Some(expected_stops))
}

/// Parses a document of any non-zero length.
pub fn parse_itinerary_any(text: &str) -> Result<Itinerary, FormatErrorKind> {
    parse_with(text, None)
}

fn parse_with(text: &str, expected_stops: Option<usize>) -> Result<Itinerary, FormatErrorKind> {
    let value: Value = serde_json::from_str(text).map_err(|_| FormatErrorKind::InvalidJson)?;
    let items = match &value {
        Value::Array(items) => items,
        Value::Object(map) => match map.get("itinerary") {
            Some(Value::Array(items)) => items,
            _ => return Err(FormatErrorKind::InvalidJson),
        },
        _ => return Err(FormatErrorKind::InvalidJson),
    };
    match expected_stops {
        Some(expected) if items.len() != expected => {
            return Err(FormatErrorKind::InsufficientStops { expected, actual: items.len() })
        }
        None if items.is_empty() => {
            return Err(FormatErrorKind::InsufficientStops { expected: 1, actual: 0 })
        }
        _ => {}
    }

    let stops = items
        .iter()
        .enumerate()
        .map(|(i, item)| parse_stop(i, item))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Itinerary::new(stops).expect("length checked above"))
}

fn parse_stop(index: usize, item: &Value) -> Result<Stop, FormatErrorKind> {
    let obj = item.as_object().ok_or(FormatErrorKind::InvalidJson)?;
    let field = |name: &str| -> Result<&str, FormatErrorKind> {
        obj.get(name)
            .and_then(Value::as_str)
            .ok_or_else(|| FormatErrorKind::MissingField { field: name.to_string(), stop_index: index })
    };
    let place = field("place")?;
    let (place_name, airport) = parse_place(place).ok_or(FormatErrorKind::BadPlaceFormat { stop_index: index })?;
    let time = |name: &str| -> Result<Timestamp, FormatErrorKind> {
        Timestamp::parse(field(name)?)
            .map_err(|_| FormatErrorKind::InvalidTimeFormat { stop_label: place.to_string() })
    };
    let arrival = time("arrival_time")?;
    let departure = time("departure_time")?;
    Ok(Stop { place_name, airport, arrival, departure })
}
