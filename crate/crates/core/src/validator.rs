//! Temporal rule checks.
//!
//! Four rules are applied to every itinerary:
//! - no overlap: a segment's travel time must not be negative;
//! - minimum transit: travel time must be at least `t_min` (flight + buffer);
//! - maximum transit: travel time must not exceed `t_max` (`t_min` x multiplier);
//! - minimum stay: each stop must last at least `min_stay`.
//!
//! All violations are strict inequalities, so a value exactly on a bound passes.

use num_rational::Ratio;
use serde::Serialize;

use crate::duration::{FlightDurations, RoutePair, TransitBounds, Unavailable};
use crate::model::{Itinerary, Minutes, Segment, Stop};
use crate::scalar::Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    Overlap,
    TransitTooShort,
    TransitTooLong,
    StayTooShort,
    RouteDataUnavailable,
}

impl IssueKind {
    pub const ALL: [IssueKind; 5] = [
        IssueKind::Overlap,
        IssueKind::TransitTooShort,
        IssueKind::TransitTooLong,
        IssueKind::StayTooShort,
        IssueKind::RouteDataUnavailable,
    ];

    /// Overlap and the two transit kinds; these make a segment invalid.
    pub fn is_segment_timing(self) -> bool {
        matches!(self, IssueKind::Overlap | IssueKind::TransitTooShort | IssueKind::TransitTooLong)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::Overlap => "overlap",
            IssueKind::TransitTooShort => "transit_too_short",
            IssueKind::TransitTooLong => "transit_too_long",
            IssueKind::StayTooShort => "stay_too_short",
            IssueKind::RouteDataUnavailable => "route_data_unavailable",
        }
    }
}

impl std::fmt::Display for IssueKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "type", content = "index", rename_all = "snake_case")]
pub enum Subject {
    Stop(usize),
    Segment(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub subject: Subject,
    #[serde(rename = "observed_minutes")]
    pub observed: Option<Minutes>,
    #[serde(rename = "required_minutes")]
    pub required: Option<Minutes>,
}

impl Issue {
    fn measured(kind: IssueKind, subject: Subject, observed: Minutes, required: Minutes) -> Self {
        Issue { kind, subject, observed: Some(observed), required: Some(required) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationPolicy {
    pub min_stay: Minutes,
    pub buffer: Minutes,
    pub max_multiplier: Exact,
    pub strict_mode: bool,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        ValidationPolicy {
            min_stay: Minutes::hours(48),
            buffer: Minutes::hours(4),
            max_multiplier: Ratio::from_integer(2),
            strict_mode: false,
        }
    }
}

impl ValidationPolicy {
    pub fn check(&self) -> Result<(), ValidationError> {
        if self.min_stay <= Minutes::ZERO {
            return Err(ValidationError::InvalidPolicy("min_stay must be positive".into()));
        }
        if self.buffer < Minutes::ZERO {
            return Err(ValidationError::InvalidPolicy("buffer must not be negative".into()));
        }
        if self.max_multiplier <= Ratio::from_integer(1) {
            return Err(ValidationError::InvalidPolicy("max_multiplier must exceed 1".into()));
        }
        Ok(())
    }

    pub fn bounds_for(&self, flight: crate::duration::FlightDuration) -> TransitBounds {
        TransitBounds::new(flight, self.buffer, self.max_multiplier)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error(transparent)]
    Provider(#[from] Unavailable),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub stop_count: usize,
    pub checks_performed: usize,
    pub issues: Vec<Issue>,
    pub unverifiable_segments: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn segment_count(&self) -> usize {
        self.stop_count.saturating_sub(1)
    }
}

/// Transit bounds resolved for one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentBounds {
    Known(TransitBounds),
    /// Consecutive stops at the same airport.
    SelfRoute,
    Unavailable(Unavailable),
}

impl SegmentBounds {
    pub fn known(&self) -> Option<TransitBounds> {
        match self {
            SegmentBounds::Known(b) => Some(*b),
            _ => None,
        }
    }
}

/// Looks up bounds for every segment. In strict mode the first unavailable
/// route is an error; otherwise it is recorded and the segment is skipped.
pub fn resolve_bounds<P: FlightDurations + ?Sized>(
    itin: &Itinerary,
    provider: &P,
    policy: &ValidationPolicy,
) -> Result<Vec<SegmentBounds>, ValidationError> {
    itin.segments()
        .iter()
        .map(|seg| match RoutePair::new(seg.origin, seg.destination) {
            Err(_) => Ok(SegmentBounds::SelfRoute),
            Ok(route) => match provider.flight_duration(route) {
                Ok(flight) => Ok(SegmentBounds::Known(policy.bounds_for(flight))),
                Err(e) if policy.strict_mode => Err(ValidationError::Provider(e)),
                Err(e) => Ok(SegmentBounds::Unavailable(e)),
            },
        })
        .collect()
}

/// Minimum-stay rule for the stop at `index`.
pub fn check_stay(stop: &Stop, index: usize, policy: &ValidationPolicy) -> Option<Issue> {
    let stay = stop.stay_duration();
    (stay < policy.min_stay)
        .then(|| Issue::measured(IssueKind::StayTooShort, Subject::Stop(index), stay, policy.min_stay))
}

/// Overlap and transit rules for one segment.
pub fn check_segment(seg: &Segment, bounds: &TransitBounds) -> Option<Issue> {
    let subject = Subject::Segment(seg.from_index);
    let t = seg.travel_time;
    if t < Minutes::ZERO {
        Some(Issue::measured(IssueKind::Overlap, subject, t, bounds.t_min))
    } else if t < bounds.t_min {
        Some(Issue::measured(IssueKind::TransitTooShort, subject, t, bounds.t_min))
    } else if t > bounds.t_max {
        Some(Issue::measured(IssueKind::TransitTooLong, subject, t, bounds.t_max))
    } else {
        None
    }
}

/// Applies every rule given already-resolved bounds (one entry per segment).
pub fn validate_with_bounds(itin: &Itinerary, bounds: &[SegmentBounds], policy: &ValidationPolicy) -> ValidationReport {
    assert_eq!(bounds.len(), itin.len() - 1, "one bounds entry per segment");
    let mut issues = Vec::new();
    let mut unverifiable = Vec::new();
    let mut checks = 0;
    for (i, stop) in itin.stops().iter().enumerate() {
        checks += 1;
        issues.extend(check_stay(stop, i, policy));
        let Some(seg) = itin.segment(i) else { continue };
        checks += 1;
        match &bounds[i] {
            SegmentBounds::Known(b) => issues.extend(check_segment(&seg, b)),
            SegmentBounds::SelfRoute => issues.push(Issue {
                kind: IssueKind::RouteDataUnavailable,
                subject: Subject::Segment(i),
                observed: None,
                required: None,
            }),
            SegmentBounds::Unavailable(_) => unverifiable.push(i),
        }
    }
    ValidationReport {
        verdict: if issues.is_empty() { Verdict::Valid } else { Verdict::Invalid },
        stop_count: itin.len(),
        checks_performed: checks,
        issues,
        unverifiable_segments: unverifiable,
    }
}

/// Resolves bounds through `provider` and applies every rule.
pub fn validate<P: FlightDurations + ?Sized>(
    itin: &Itinerary,
    provider: &P,
    policy: &ValidationPolicy,
) -> Result<ValidationReport, ValidationError> {
    policy.check()?;
    let bounds = resolve_bounds(itin, provider, policy)?;
    Ok(validate_with_bounds(itin, &bounds, policy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct IssueStats {
    pub issue_count: usize,
    pub invalid_segment_count: usize,
    pub stay_issue_count: usize,
}

/// `issue_count` counts everything; `invalid_segment_count` only overlap and
/// transit violations.
pub fn count_issue_stats(report: &ValidationReport) -> IssueStats {
    IssueStats {
        issue_count: report.issues.len(),
        invalid_segment_count: report.issues.iter().filter(|i| i.kind.is_segment_timing()).count(),
        stay_issue_count: report.issues.iter().filter(|i| i.kind == IssueKind::StayTooShort).count(),
    }
}
