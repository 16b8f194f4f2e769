//! Deterministic repair of temporal violations.
//!
//! One forward pass over the stops. At stop `i` the stay is fixed first
//! (`departure := arrival + min_stay`), then the outgoing segment: a gap
//! below `t_min` (including overlaps) or above `t_max` moves the next arrival
//! to `departure + t_min`. Because each stop's arrival is final before its
//! stay is checked, one pass leaves nothing to fix; the pass loop and its
//! ceiling only guard against logic errors.
//!
//! The first arrival is never moved and stop order never changes. Segments
//! without bounds (unavailable route data, same-airport hops) are left alone.

use log::warn;
use serde::Serialize;

use crate::duration::{FlightDurations, Unavailable};
use crate::model::{Itinerary, Timestamp};
use crate::validator::{
    resolve_bounds, validate_with_bounds, Issue, IssueKind, SegmentBounds, ValidationError, ValidationPolicy,
    ValidationReport,
};

pub const MAX_PASSES: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Adjustment {
    pub stop_index: usize,
    pub field: Field,
    pub old: Timestamp,
    pub new: Timestamp,
    pub reason: IssueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectionTrace {
    pub adjustments: Vec<Adjustment>,
    pub passes: u32,
    /// Segments the corrector could not check: no route data or a same-airport hop.
    pub skipped_segments: Vec<usize>,
}

impl CorrectionTrace {
    pub fn is_empty(&self) -> bool {
        self.adjustments.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    pub itinerary: Itinerary,
    pub trace: CorrectionTrace,
    /// Validation of the corrected itinerary.
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrectionError {
    #[error("issues remain after {passes} correction passes: {remaining:?}")]
    NonConvergence { passes: u32, remaining: Vec<Issue> },
    #[error(transparent)]
    Provider(#[from] Unavailable),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("trace adjustment {adjustment} expected {field:?} of stop {stop_index} to be {expected}, found {found}")]
    TraceMismatch { adjustment: usize, stop_index: usize, field: Field, expected: Timestamp, found: Timestamp },
    #[error("trace adjustment {adjustment} refers to stop {stop_index}, which does not exist")]
    TraceOutOfRange { adjustment: usize, stop_index: usize },
}

impl From<ValidationError> for CorrectionError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Provider(u) => CorrectionError::Provider(u),
            ValidationError::InvalidPolicy(p) => CorrectionError::InvalidPolicy(p),
        }
    }
}

/// Resolves bounds through `provider` and repairs the itinerary.
pub fn correct<P: FlightDurations + ?Sized>(
    itin: &Itinerary,
    provider: &P,
    policy: &ValidationPolicy,
) -> Result<Correction, CorrectionError> {
    policy.check()?;
    let bounds = resolve_bounds(itin, provider, policy)?;
    correct_with_bounds(itin, &bounds, policy)
}

pub fn correct_with_bounds(
    itin: &Itinerary,
    bounds: &[SegmentBounds],
    policy: &ValidationPolicy,
) -> Result<Correction, CorrectionError> {
    let mut current = itin.clone();
    let mut adjustments = Vec::new();
    let skipped_segments: Vec<usize> =
        bounds.iter().enumerate().filter(|(_, b)| b.known().is_none()).map(|(i, _)| i).collect();

    for pass in 1..=MAX_PASSES {
        forward_pass(&mut current, bounds, policy, &mut adjustments);
        let report = validate_with_bounds(&current, bounds, policy);
        let remaining: Vec<Issue> =
            report.issues.iter().filter(|i| i.kind != IssueKind::RouteDataUnavailable).cloned().collect();
        if remaining.is_empty() {
            if pass > 1 {
                warn!("correction needed {pass} passes; a single pass was expected");
            }
            return Ok(Correction {
                itinerary: current,
                trace: CorrectionTrace { adjustments, passes: pass, skipped_segments },
                report,
            });
        }
    }
    let report = validate_with_bounds(&current, bounds, policy);
    Err(CorrectionError::NonConvergence { passes: MAX_PASSES, remaining: report.issues })
}

fn forward_pass(itin: &mut Itinerary, bounds: &[SegmentBounds], policy: &ValidationPolicy, log: &mut Vec<Adjustment>) {
    let n = itin.len();
    for i in 0..n {
        let stops = itin.stops_mut();
        let stop = &mut stops[i];
        if stop.stay_duration() < policy.min_stay {
            let new = stop.arrival + policy.min_stay;
            log.push(Adjustment {
                stop_index: i,
                field: Field::Departure,
                old: stop.departure,
                new,
                reason: IssueKind::StayTooShort,
            });
            stop.departure = new;
        }

        if i + 1 == n {
            break;
        }
        let Some(b) = bounds[i].known() else { continue };
        let departure = stops[i].departure;
        let next = &mut stops[i + 1];
        let gap = next.arrival - departure;
        let reason = if gap.is_negative() {
            IssueKind::Overlap
        } else if gap < b.t_min {
            IssueKind::TransitTooShort
        } else if gap > b.t_max {
            IssueKind::TransitTooLong
        } else {
            continue;
        };
        // too long is pulled back to t_min as well, not to the cap
        let new = departure + b.t_min;
        log.push(Adjustment { stop_index: i + 1, field: Field::Arrival, old: next.arrival, new, reason });
        next.arrival = new;
    }
}

/// Re-applies a trace, checking each recorded old value on the way.
pub fn replay_trace(itin: &Itinerary, trace: &CorrectionTrace) -> Result<Itinerary, CorrectionError> {
    let mut out = itin.clone();
    for (k, adj) in trace.adjustments.iter().enumerate() {
        let stop = out
            .stops_mut()
            .get_mut(adj.stop_index)
            .ok_or(CorrectionError::TraceOutOfRange { adjustment: k, stop_index: adj.stop_index })?;
        let slot = match adj.field {
            Field::Arrival => &mut stop.arrival,
            Field::Departure => &mut stop.departure,
        };
        if *slot != adj.old {
            return Err(CorrectionError::TraceMismatch {
                adjustment: k,
                stop_index: adj.stop_index,
                field: adj.field,
                expected: adj.old,
                found: *slot,
            });
        }
        *slot = adj.new;
    }
    Ok(out)
}
