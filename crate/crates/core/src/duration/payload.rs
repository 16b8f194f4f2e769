use serde_json::Value;

use super::FlightDuration;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PayloadError {
    #[error("malformed duration payload: {0}")]
    Malformed(String),
    #[error("duration payload carries a null duration")]
    NullDuration,
    #[error("duration of {0} minutes is not a plausible flight")]
    OutOfRange(i64),
}

/// Extracts the flight time from a duration-service response.
///
/// Two layouts are understood:
/// - `{"duration": {"hours": 10, "minutes": 30}}`
/// - `{"approxFlightTime": "10:30:00"}` (seconds round up to the next minute)
///
/// A `null` in either position is [`PayloadError::NullDuration`].
pub fn parse_duration_payload(body: &[u8]) -> Result<FlightDuration, PayloadError> {
    let value: Value = serde_json::from_slice(body).map_err(|e| PayloadError::Malformed(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| PayloadError::Malformed("expected a JSON object".into()))?;

    let minutes = if let Some(duration) = obj.get("duration") {
        match duration {
            Value::Null => return Err(PayloadError::NullDuration),
            Value::Object(parts) => {
                let part = |name: &str| -> Result<i64, PayloadError> {
                    match parts.get(name) {
                        None | Some(Value::Null) => Ok(0),
                        Some(v) => v
                            .as_u64()
                            .and_then(|n| i64::try_from(n).ok())
                            .ok_or_else(|| PayloadError::Malformed(format!("{name} is not a non-negative integer"))),
                    }
                };
                if !parts.contains_key("hours") && !parts.contains_key("minutes") {
                    return Err(PayloadError::NullDuration);
                }
                part("hours")?.saturating_mul(60).saturating_add(part("minutes")?)
            }
            _ => return Err(PayloadError::Malformed("duration must be an object".into())),
        }
    } else if let Some(flight_time) = obj.get("approxFlightTime") {
        match flight_time {
            Value::Null => return Err(PayloadError::NullDuration),
            Value::String(s) => parse_hms(s)?,
            _ => return Err(PayloadError::Malformed("approxFlightTime must be a string".into())),
        }
    } else {
        return Err(PayloadError::Malformed("no duration field".into()));
    };

    FlightDuration::from_minutes(minutes).map_err(|_| PayloadError::OutOfRange(minutes))
}

fn parse_hms(text: &str) -> Result<i64, PayloadError> {
    let bad = || PayloadError::Malformed(format!("bad flight time {text:?}"));
    let fields: Vec<i64> = text
        .split(':')
        .map(|p| if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) { None } else { p.parse().ok() })
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    let (h, m, s) = match fields.as_slice() {
        [h, m] => (*h, *m, 0),
        [h, m, s] => (*h, *m, *s),
        _ => return Err(bad()),
    };
    if m > 59 || s > 59 {
        return Err(bad());
    }
    Ok(h * 60 + m + i64::from(s > 0))
}
