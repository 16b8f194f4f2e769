//! Settings resolved from flags, a JSON config file, `ITINGUARD_*` variables
//! and built-in defaults, in that order.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use itinguard::scalar::exact_from_f64;
use itinguard::{Minutes, StatsFormat, ValidationPolicy};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    Live,
    Fixture,
    GreatCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl From<OutputFormat> for StatsFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => StatsFormat::Table,
            OutputFormat::Csv => StatsFormat::Csv,
            OutputFormat::Json => StatsFormat::Json,
        }
    }
}

/// One configuration layer. Every field is optional so layers can be stacked.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub provider: Option<ProviderKind>,
    pub fixture_file: Option<PathBuf>,
    pub buffer_hours: Option<f64>,
    pub min_stay_hours: Option<f64>,
    pub max_multiplier: Option<f64>,
    pub max_retries: Option<u32>,
    pub strict: Option<bool>,
    pub trace: Option<bool>,
    pub format: Option<OutputFormat>,
    pub cache_file: Option<PathBuf>,
    pub workers: Option<usize>,
    pub aerodatabox_api_key: Option<String>,
}

impl Layer {
    /// Fills unset fields from `lower`.
    pub fn or(self, lower: Layer) -> Layer {
        Layer {
            provider: self.provider.or(lower.provider),
            fixture_file: self.fixture_file.or(lower.fixture_file),
            buffer_hours: self.buffer_hours.or(lower.buffer_hours),
            min_stay_hours: self.min_stay_hours.or(lower.min_stay_hours),
            max_multiplier: self.max_multiplier.or(lower.max_multiplier),
            max_retries: self.max_retries.or(lower.max_retries),
            strict: self.strict.or(lower.strict),
            trace: self.trace.or(lower.trace),
            format: self.format.or(lower.format),
            cache_file: self.cache_file.or(lower.cache_file),
            workers: self.workers.or(lower.workers),
            aerodatabox_api_key: self.aerodatabox_api_key.or(lower.aerodatabox_api_key),
        }
    }

    pub fn from_file(path: &Path) -> Result<Layer> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Reads `ITINGUARD_*` and the duration-service key through `get`.
    pub fn from_env_with(get: impl Fn(&str) -> Option<String>) -> Result<Layer> {
        fn parsed<T: std::str::FromStr>(get: &impl Fn(&str) -> Option<String>, name: &str) -> Result<Option<T>>
        where
            T::Err: std::fmt::Display,
        {
            match get(name) {
                None => Ok(None),
                Some(v) => v.trim().parse().map(Some).map_err(|e| anyhow::anyhow!("{name}={v:?}: {e}")),
            }
        }
        let provider = match get("ITINGUARD_PROVIDER") {
            None => None,
            Some(v) => Some(ProviderKind::from_str(v.trim(), true).map_err(|e| anyhow::anyhow!("ITINGUARD_PROVIDER: {e}"))?),
        };
        let format = match get("ITINGUARD_FORMAT") {
            None => None,
            Some(v) => Some(OutputFormat::from_str(v.trim(), true).map_err(|e| anyhow::anyhow!("ITINGUARD_FORMAT: {e}"))?),
        };
        Ok(Layer {
            provider,
            fixture_file: get("ITINGUARD_FIXTURE_FILE").map(PathBuf::from),
            buffer_hours: parsed(&get, "ITINGUARD_BUFFER_HOURS")?,
            min_stay_hours: parsed(&get, "ITINGUARD_MIN_STAY_HOURS")?,
            max_multiplier: parsed(&get, "ITINGUARD_MAX_MULTIPLIER")?,
            max_retries: parsed(&get, "ITINGUARD_MAX_RETRIES")?,
            strict: parsed(&get, "ITINGUARD_STRICT")?,
            trace: parsed(&get, "ITINGUARD_TRACE")?,
            format,
            cache_file: get("ITINGUARD_CACHE_FILE").map(PathBuf::from),
            workers: parsed(&get, "ITINGUARD_WORKERS")?,
            aerodatabox_api_key: get(itinguard::duration::API_KEY_ENV),
        })
    }

    pub fn from_env() -> Result<Layer> {
        Self::from_env_with(|name| env::var(name).ok())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppConfig {
    pub provider: ProviderKind,
    pub fixture_file: Option<PathBuf>,
    pub policy: ValidationPolicy,
    pub max_retries: u32,
    pub trace: bool,
    pub format: OutputFormat,
    pub cache_file: Option<PathBuf>,
    pub workers: usize,
    pub aerodatabox_api_key: Option<String>,
}

fn hours_to_minutes(name: &str, hours: f64) -> Result<Minutes> {
    let minutes = (hours * 60.0).round();
    if !minutes.is_finite() || minutes.abs() > 1.0e12 {
        bail!("{name} out of range: {hours}");
    }
    Ok(Minutes(minutes as i64))
}

impl AppConfig {
    pub fn resolve(layer: Layer) -> Result<AppConfig> {
        let defaults = ValidationPolicy::default();
        let mut policy = defaults.clone();
        if let Some(h) = layer.buffer_hours {
            policy.buffer = hours_to_minutes("buffer-hours", h)?;
        }
        if let Some(h) = layer.min_stay_hours {
            policy.min_stay = hours_to_minutes("min-stay-hours", h)?;
        }
        if let Some(m) = layer.max_multiplier {
            policy.max_multiplier = exact_from_f64(m).with_context(|| format!("max-multiplier out of range: {m}"))?;
        }
        policy.strict_mode = layer.strict.unwrap_or(false);
        policy.check()?;
        let workers = layer.workers.unwrap_or(0);
        Ok(AppConfig {
            provider: layer.provider.unwrap_or(ProviderKind::GreatCircle),
            fixture_file: layer.fixture_file,
            policy,
            max_retries: layer.max_retries.unwrap_or(3),
            trace: layer.trace.unwrap_or(false),
            format: layer.format.unwrap_or(OutputFormat::Table),
            cache_file: layer.cache_file,
            workers,
            aerodatabox_api_key: layer.aerodatabox_api_key,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    fn env_of(pairs: &[(&str, &str)]) -> impl Fn(&str) -> Option<String> {
        let map: HashMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        move |k| map.get(k).cloned()
    }

    #[test]
    fn defaults() {
        let c = AppConfig::resolve(Layer::default()).unwrap();
        assert_eq!(c.provider, ProviderKind::GreatCircle);
        assert_eq!(c.policy, ValidationPolicy::default());
        assert_eq!(c.format, OutputFormat::Table);
    }

    #[test]
    fn precedence_flags_file_env() {
        let flags = Layer { buffer_hours: Some(1.0), ..Layer::default() };
        let file: Layer = serde_json::from_str(r#"{"buffer_hours": 2, "min_stay_hours": 24, "provider": "fixture"}"#).unwrap();
        let env = Layer::from_env_with(env_of(&[
            ("ITINGUARD_BUFFER_HOURS", "3"),
            ("ITINGUARD_MIN_STAY_HOURS", "12"),
            ("ITINGUARD_MAX_MULTIPLIER", "2.5"),
            ("ITINGUARD_PROVIDER", "live"),
        ]))
        .unwrap();
        let c = AppConfig::resolve(flags.or(file).or(env)).unwrap();
        assert_eq!(c.policy.buffer, Minutes::hours(1));
        assert_eq!(c.policy.min_stay, Minutes::hours(24));
        assert_eq!(c.policy.max_multiplier, exact_from_f64(2.5).unwrap());
        assert_eq!(c.provider, ProviderKind::Fixture);
    }

    #[test]
    fn bad_values_rejected() {
        assert!(Layer::from_env_with(env_of(&[("ITINGUARD_WORKERS", "many")])).is_err());
        assert!(Layer::from_env_with(env_of(&[("ITINGUARD_PROVIDER", "oracle")])).is_err());
        assert!(serde_json::from_str::<Layer>(r#"{"bufer_hours": 1}"#).is_err());
        assert!(AppConfig::resolve(Layer { max_multiplier: Some(0.5), ..Layer::default() }).is_err());
    }

    #[test]
    fn fractional_hours() {
        let c = AppConfig::resolve(Layer { buffer_hours: Some(1.5), ..Layer::default() }).unwrap();
        assert_eq!(c.policy.buffer, Minutes(90));
    }
}
