//! Corpus statistics over validation reports.
//!
//! Per (model tag, city count) group:
//! - invalid itineraries: share of reports with at least one issue;
//! - invalid segments: overlap/too-short/too-long segments over all verifiable
//!   segments (optionally counting short stays as extra units, see
//!   [`SegmentCounting`]);
//! - average issues: all issues divided by the itinerary count.

use std::collections::BTreeMap;
use std::fs;
use std::ops::AddAssign;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::duration::FlightDurations;
use crate::model::{parse_itinerary, FormatErrorKind};
use crate::scalar::Scalar;
use crate::validator::{count_issue_stats, validate, IssueKind, ValidationError, ValidationPolicy, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub model_tag: String,
    pub num_cities: usize,
    pub report: ValidationReport,
}

impl CorpusRecord {
    pub fn new(model_tag: impl Into<String>, num_cities: usize, report: ValidationReport) -> Result<Self, MetricsError> {
        if report.stop_count != num_cities {
            return Err(MetricsError::CityCountMismatch { declared: num_cities, actual: report.stop_count });
        }
        Ok(CorpusRecord { model_tag: model_tag.into(), num_cities, report })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("empty group")]
    EmptyGroup,
    #[error("record declares {declared} cities but its itinerary has {actual} stops")]
    CityCountMismatch { declared: usize, actual: usize },
    #[error("group mixes city counts {0} and {1}")]
    MixedGroup(usize, usize),
}

/// What the "invalid segments" percentage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentCounting {
    /// Segment timing issues over verifiable segments.
    #[default]
    SegmentsOnly,
    /// Segment timing issues plus short stays, over verifiable segments plus stops.
    IncludeStays,
}

/// Additive raw counts behind one stats row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GroupCounts {
    pub itineraries: u64,
    pub invalid_itineraries: u64,
    pub invalid_segments: u64,
    pub stay_issues: u64,
    pub issues: u64,
    pub verifiable_segments: u64,
    pub stops: u64,
}

impl GroupCounts {
    pub fn from_report(report: &ValidationReport) -> Self {
        let stats = count_issue_stats(report);
        GroupCounts {
            itineraries: 1,
            invalid_itineraries: u64::from(!report.is_valid()),
            invalid_segments: stats.invalid_segment_count as u64,
            stay_issues: stats.stay_issue_count as u64,
            issues: stats.issue_count as u64,
            verifiable_segments: (report.segment_count() - report.unverifiable_segments.len()) as u64,
            stops: report.stop_count as u64,
        }
    }
}

impl AddAssign for GroupCounts {
    fn add_assign(&mut self, o: Self) {
        self.itineraries += o.itineraries;
        self.invalid_itineraries += o.invalid_itineraries;
        self.invalid_segments += o.invalid_segments;
        self.stay_issues += o.stay_issues;
        self.issues += o.issues;
        self.verifiable_segments += o.verifiable_segments;
        self.stops += o.stops;
    }
}

/// One stats row, generic over the scalar used for the derived ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatsOf<S> {
    pub model_tag: String,
    pub num_cities: usize,
    pub counting: SegmentCounting,
    pub counts: GroupCounts,
    pub invalid_itineraries_pct: S,
    pub invalid_segments_pct: S,
    pub avg_issues_per_itinerary: S,
}

impl<S: Scalar> CorpusStatsOf<S> {
    pub fn from_counts(model_tag: impl Into<String>, num_cities: usize, counts: GroupCounts, counting: SegmentCounting) -> Self {
        let hundred = S::from_u64(100).expect("100 fits");
        let (seg_num, seg_den) = match counting {
            SegmentCounting::SegmentsOnly => (counts.invalid_segments, counts.verifiable_segments),
            SegmentCounting::IncludeStays => {
                (counts.invalid_segments + counts.stay_issues, counts.verifiable_segments + counts.stops)
            }
        };
        CorpusStatsOf {
            model_tag: model_tag.into(),
            num_cities,
            counting,
            counts,
            invalid_itineraries_pct: S::ratio(counts.invalid_itineraries, counts.itineraries) * hundred,
            invalid_segments_pct: S::ratio(seg_num, seg_den) * hundred,
            avg_issues_per_itinerary: S::ratio(counts.issues, counts.itineraries),
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.itineraries
    }

    /// Whole percent when exact (`48%`), else two decimals (`48.50%`).
    pub fn invalid_itineraries_cell(&self) -> String {
        let c = self.counts;
        let decimals = if c.itineraries == 0 || (c.invalid_itineraries * 100).is_multiple_of(c.itineraries) { 0 } else { 2 };
        format!("{}%", self.invalid_itineraries_pct.to_fixed(decimals))
    }

    pub fn invalid_segments_cell(&self) -> String {
        format!("{}%", self.invalid_segments_pct.to_fixed(2))
    }

    pub fn avg_issues_cell(&self) -> String {
        self.avg_issues_per_itinerary.to_fixed(2)
    }
}

/// Stats for one group of records that share tag and city count.
pub fn aggregate_group<S: Scalar>(
    model_tag: &str,
    records: &[&CorpusRecord],
    counting: SegmentCounting,
) -> Result<CorpusStatsOf<S>, MetricsError> {
    let first = records.first().ok_or(MetricsError::EmptyGroup)?;
    let mut counts = GroupCounts::default();
    for r in records {
        if r.num_cities != first.num_cities {
            return Err(MetricsError::MixedGroup(first.num_cities, r.num_cities));
        }
        counts += GroupCounts::from_report(&r.report);
    }
    Ok(CorpusStatsOf::from_counts(model_tag, first.num_cities, counts, counting))
}

/// Groups by (model tag, city count) in first-appearance order.
pub fn aggregate<S: Scalar>(records: &[CorpusRecord], counting: SegmentCounting) -> Vec<CorpusStatsOf<S>> {
    let mut order: Vec<(&str, usize)> = Vec::new();
    let mut groups: BTreeMap<(&str, usize), Vec<&CorpusRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.model_tag.as_str(), r.num_cities);
        let group = groups.entry(key).or_default();
        if group.is_empty() {
            order.push(key);
        }
        group.push(r);
    }
    order
        .into_iter()
        .map(|key| aggregate_group(key.0, &groups[&key], counting).expect("groups are non-empty and uniform"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsFormat {
    #[default]
    Table,
    Csv,
    Json,
}

pub const STATS_HEADERS: [&str; 5] = ["Model", "Cities", "Invalid Itin.", "Invalid Seg.", "Avg Issues/Itn."];

/// Renders stats rows. CSV cells are plain numbers (percent signs dropped,
/// two decimals); the table uses the `48% / 21.00% / 0.63` cell style.
pub fn render_stats<S: Scalar>(stats: &[CorpusStatsOf<S>], format: StatsFormat) -> String {
    match format {
        StatsFormat::Table => render_table(stats),
        StatsFormat::Csv => render_csv(stats),
        StatsFormat::Json => render_json(stats),
    }
}

fn render_table<S: Scalar>(stats: &[CorpusStatsOf<S>]) -> String {
    let mut rows: Vec<[String; 5]> = vec![STATS_HEADERS.map(String::from)];
    for s in stats {
        rows.push([
            s.model_tag.clone(),
            s.num_cities.to_string(),
            s.invalid_itineraries_cell(),
            s.invalid_segments_cell(),
            s.avg_issues_cell(),
        ]);
    }
    let mut widths = [0usize; 5];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn render_csv<S: Scalar>(stats: &[CorpusStatsOf<S>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(STATS_HEADERS).expect("in-memory write");
    for s in stats {
        writer
            .write_record([
                s.model_tag.clone(),
                s.num_cities.to_string(),
                s.invalid_itineraries_pct.to_fixed(2),
                s.invalid_segments_pct.to_fixed(2),
                s.avg_issues_per_itinerary.to_fixed(2),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn render_json<S: Scalar>(stats: &[CorpusStatsOf<S>]) -> String {
    let rows: Vec<_> = stats
        .iter()
        .map(|s| {
            json!({
                "model_tag": s.model_tag,
                "num_cities": s.num_cities,
                "counting": s.counting,
                "counts": s.counts,
                "invalid_itineraries_pct": s.invalid_itineraries_pct.to_f64(),
                "invalid_segments_pct": s.invalid_segments_pct.to_f64(),
                "avg_issues_per_itinerary": s.avg_issues_per_itinerary.to_f64(),
            })
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&rows).expect("json values serialize");
    out.push('\n');
    out
}

/// Issue counts per kind, per model tag.
pub fn failure_mode_breakdown(records: &[CorpusRecord]) -> BTreeMap<String, BTreeMap<IssueKind, usize>> {
    let mut out: BTreeMap<String, BTreeMap<IssueKind, usize>> = BTreeMap::new();
    for r in records {
        let per_kind = out.entry(r.model_tag.clone()).or_default();
        for issue in &r.report.issues {
            *per_kind.entry(issue.kind).or_default() += 1;
        }
    }
    out
}

/// One manifest line: an itinerary file (relative to the manifest's
/// directory) and the group it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub model_tag: String,
    pub num_cities: usize,
}

/// Reads a manifest: a JSON array of `{file, model_tag, num_cities}`.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CorpusError::Manifest(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(String),
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("format error: {0}")]
    Format(#[from] FormatErrorKind),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Parses and validates one corpus file.
pub fn evaluate_entry<P: FlightDurations + ?Sized>(
    base_dir: &Path,
    entry: &ManifestEntry,
    provider: &P,
    policy: &ValidationPolicy,
) -> Result<CorpusRecord, CorpusError> {
    let path = base_dir.join(&entry.file);
    let text = fs::read_to_string(&path).map_err(|e| CorpusError::Io(format!("{}: {e}", path.display())))?;
    let itinerary = parse_itinerary(&text, entry.num_cities)?;
    let report = validate(&itinerary, provider, policy)?;
    Ok(CorpusRecord::new(entry.model_tag.clone(), entry.num_cities, report)?)
}

/// Evaluates every manifest entry in order; failures are collected, not fatal.
pub fn evaluate_corpus<P: FlightDurations + ?Sized>(
    base_dir: &Path,
    entries: &[ManifestEntry],
    provider: &P,
    policy: &ValidationPolicy,
) -> (Vec<CorpusRecord>, Vec<(PathBuf, CorpusError)>) {
    let mut records = Vec::with_capacity(entries.len());
    let mut failures = Vec::new();
    for entry in entries {
        match evaluate_entry(base_dir, entry, provider, policy) {
            Ok(r) => records.push(r),
            Err(e) => failures.push((entry.file.clone(), e)),
        }
    }
    (records, failures)
}
