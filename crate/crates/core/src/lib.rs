//! Guardrail for generated multi-city flight itineraries.
//!
//! Parses the itinerary JSON a language model emits, checks every stop and
//! segment against flight-duration-derived transit bounds and a minimum stay,
//! and repairs violations by shifting timestamps in a single forward pass.
//!
//! ```
//! use itinguard::{parse_itinerary_any, validate, correct, FixtureProvider, ValidationPolicy};
//!
//! let doc = r#"[
//!   {"place": "Frankfurt (FRA)", "arrival_time": "2025-06-01 08:00", "departure_time": "2025-06-02 08:00"},
//!   {"place": "Cairo (CAI)", "arrival_time": "2025-06-02 10:00", "departure_time": "2025-06-06 10:00"}
//! ]"#;
//! let itin = parse_itinerary_any(doc).unwrap();
//! let durations = FixtureProvider::from_text("FRA CAI 240").unwrap();
//! let policy = ValidationPolicy::default();
//!
//! let report = validate(&itin, &durations, &policy).unwrap();
//! assert_eq!(report.issues.len(), 2);
//!
//! let fixed = correct(&itin, &durations, &policy).unwrap();
//! assert!(fixed.report.is_valid());
//! assert_eq!(fixed.itinerary.stops()[1].arrival.to_string(), "2025-06-03 16:00");
//! ```

pub mod corrector;
pub mod duration;
pub mod gateway;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod validator;

pub use corrector::{correct, correct_with_bounds, replay_trace, Adjustment, Correction, CorrectionError, CorrectionTrace, Field};
pub use duration::{
    transit_bounds, AeroDataBoxClient, CachingProvider, DurationCache, DurationSource, FixtureProvider, FlightDuration,
    FlightDurations, GreatCircleProvider, ProviderConfig, RoutePair, TransitBounds, Unavailable,
};
pub use gateway::{generate_itinerary, GenerationClient, GenerationError, GenerationRequest};
pub use metrics::{aggregate, failure_mode_breakdown, render_stats, CorpusRecord, CorpusStatsOf, SegmentCounting, StatsFormat};
pub use model::{parse_itinerary, parse_itinerary_any, AirportCode, FormatErrorKind, Itinerary, Minutes, Segment, Stop, Timestamp};
pub use scalar::{Exact, Scalar};
pub use validator::{
    check_segment, check_stay, count_issue_stats, validate, Issue, IssueKind, ValidationError, ValidationPolicy,
    ValidationReport,
};

/// Corpus statistics with `f64` ratios.
pub type CorpusStats = CorpusStatsOf<f64>;
/// Corpus statistics with exact rational ratios.
pub type ExactCorpusStats = CorpusStatsOf<Exact>;
/// Coordinates in degrees, `f64`.
pub type LatLon = duration::LatLon<f64>;
