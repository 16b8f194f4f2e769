//! Itinerary generation through a text-completion client.
//!
//! The first attempt sends the base prompt. When the response fails to parse,
//! a feedback message describing the failure is prepended to the unchanged
//! base prompt and the client is asked again, up to `max_retries` more
//! times. Only format problems trigger a retry; temporal problems are left to
//! the validator and corrector.

mod client;
mod prompts;

use chrono::NaiveDate;
use log::info;
use serde::Serialize;

use crate::model::{parse_itinerary, AirportCode, FormatErrorKind, Itinerary};

pub use client::{ClientError, GenerationClient, LiveClient, ReplayClient, ScriptedClient, DEFAULT_TIMEOUT};
pub use prompts::{
    build_base_prompt, build_feedback, build_fixed_sequence_prompt, build_generic_prompt, render_template,
    TemplateError,
};

/// Retries after the first attempt.
pub const DEFAULT_MAX_RETRIES: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct City {
    pub name: String,
    pub code: AirportCode,
}

impl City {
    pub fn new(name: impl Into<String>, code: AirportCode) -> Self {
        City { name: name.into(), code }
    }

    /// Parses `Name (XXX)`.
    pub fn parse(label: &str) -> Option<Self> {
        crate::model::parse_place(label).map(|(name, code)| City { name, code })
    }

    pub fn label(&self) -> String {
        format!("{} ({})", self.name, self.code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRequest {
    pub num_destinations: usize,
    pub city_pool: Vec<City>,
    pub date_window: (NaiveDate, NaiveDate),
    pub fixed_sequence: Option<Vec<City>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RequestError {
    #[error("at least 2 destinations are required, got {0}")]
    TooFewDestinations(usize),
    #[error("the city pool is empty")]
    EmptyPool,
    #[error("date window starts after it ends")]
    InvertedWindow,
    #[error("fixed sequence has {actual} cities, expected {expected}")]
    SequenceLength { expected: usize, actual: usize },
    #[error("fixed sequence city {0} is not in the city pool")]
    SequenceOutsidePool(String),
    #[error("a fixed sequence was given to the generic prompt")]
    UnexpectedSequence,
    #[error("the fixed-sequence prompt needs a sequence")]
    MissingSequence,
}

impl GenerationRequest {
    pub fn check(&self) -> Result<(), RequestError> {
        if self.num_destinations < 2 {
            return Err(RequestError::TooFewDestinations(self.num_destinations));
        }
        if self.city_pool.is_empty() {
            return Err(RequestError::EmptyPool);
        }
        if self.date_window.0 > self.date_window.1 {
            return Err(RequestError::InvertedWindow);
        }
        if let Some(seq) = &self.fixed_sequence {
            if seq.len() != self.num_destinations {
                return Err(RequestError::SequenceLength { expected: self.num_destinations, actual: seq.len() });
            }
            if let Some(stray) = seq.iter().find(|c| !self.city_pool.contains(c)) {
                return Err(RequestError::SequenceOutsidePool(stray.label()));
            }
        }
        Ok(())
    }

    /// Pool rendered as `Name (XXX), Name (XXX), ...`.
    pub fn cities_str(&self) -> String {
        self.city_pool.iter().map(City::label).collect::<Vec<_>>().join(", ")
    }
}

/// Which feedback message a format failure calls for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FeedbackKind {
    JsonError,
    TimeFormatError(String),
    InsufficientStops(usize),
}

impl From<&FormatErrorKind> for FeedbackKind {
    /// Missing fields and malformed places get the JSON-structure message,
    /// which lists the required fields and the place format.
    fn from(e: &FormatErrorKind) -> Self {
        match e {
            FormatErrorKind::InvalidJson
            | FormatErrorKind::MissingField { .. }
            | FormatErrorKind::BadPlaceFormat { .. } => FeedbackKind::JsonError,
            FormatErrorKind::InvalidTimeFormat { stop_label } => FeedbackKind::TimeFormatError(stop_label.clone()),
            FormatErrorKind::InsufficientStops { expected, .. } => FeedbackKind::InsufficientStops(*expected),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub itinerary: Itinerary,
    pub attempts: u32,
    /// Format failures of the attempts before the successful one.
    pub failures: Vec<FormatErrorKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerationError {
    #[error("generation failed after {attempts} attempts; last error: {last}")]
    Failed { last: FormatErrorKind, attempts: u32 },
    #[error(transparent)]
    Request(#[from] RequestError),
    #[error("client error on attempt {attempt}: {source}")]
    Client { attempt: u32, source: ClientError },
}

/// Runs the prompt/parse/feedback loop with the default retry count.
pub fn generate_itinerary<C: GenerationClient + ?Sized>(
    client: &C,
    req: &GenerationRequest,
) -> Result<Generated, GenerationError> {
    generate_itinerary_with(client, req, DEFAULT_MAX_RETRIES)
}

pub fn generate_itinerary_with<C: GenerationClient + ?Sized>(
    client: &C,
    req: &GenerationRequest,
    max_retries: u32,
) -> Result<Generated, GenerationError> {
    let base = build_base_prompt(req)?;
    let total = max_retries + 1;
    let mut failures: Vec<FormatErrorKind> = Vec::new();
    for attempt in 1..=total {
        let prompt = match failures.last() {
            None => base.clone(),
            Some(last) => build_feedback(&FeedbackKind::from(last)) + &base,
        };
        let response = client.complete(&prompt).map_err(|source| GenerationError::Client { attempt, source })?;
        match parse_itinerary(&response, req.num_destinations) {
            Ok(itinerary) => return Ok(Generated { itinerary, attempts: attempt, failures }),
            Err(e) => {
                info!("attempt {attempt}/{total}: {e}");
                failures.push(e);
            }
        }
    }
    Err(GenerationError::Failed { last: failures.pop().expect("at least one attempt"), attempts: total })
}
