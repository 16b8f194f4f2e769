use std::time::Duration;

use super::{parse_duration_payload, DurationSource, FetchError, FlightDuration, RoutePair};

/// Environment variable holding the duration-service API key.
pub const API_KEY_ENV: &str = "AERODATABOX_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://aerodatabox.p.rapidapi.com";
const API_KEY_HEADER: &str = "X-RapidAPI-Key";

/// HTTP client for an AeroDataBox-style distance/time endpoint.
///
/// Issues `GET {base}/airports/iata/{ORIGIN}/distance-time/{DEST}` for the
/// directed pair as given. One call is one attempt; wrap in a
/// [`super::CachingProvider`] for retries and caching.
pub struct AeroDataBoxClient {
    base_url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl AeroDataBoxClient {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .http_status_as_error(false)
            .build()
            .into();
        AeroDataBoxClient { base_url: base_url.into().trim_end_matches('/').to_string(), api_key, agent }
    }

    /// Default endpoint with the key read from [`API_KEY_ENV`].
    pub fn from_env() -> Self {
        Self::new(DEFAULT_BASE_URL, std::env::var(API_KEY_ENV).ok())
    }

    pub fn url_for(&self, route: RoutePair) -> String {
        format!("{}/airports/iata/{}/distance-time/{}", self.base_url, route.origin, route.destination)
    }
}

impl DurationSource for AeroDataBoxClient {
    fn fetch(&self, route: RoutePair) -> Result<FlightDuration, FetchError> {
        let mut request = self.agent.get(&self.url_for(route));
        if let Some(key) = &self.api_key {
            request = request.header(API_KEY_HEADER, key);
        }
        let mut response = request.call().map_err(|e| FetchError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(FetchError::Status(status));
        }
        let body = response.body_mut().read_to_vec().map_err(|e| FetchError::Transport(e.to_string()))?;
        Ok(parse_duration_payload(&body)?)
    }
}
