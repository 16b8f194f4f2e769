//! Minute-resolution UTC timestamps and signed durations.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use chrono::{DateTime, Datelike, NaiveDate, Timelike};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Wire format of every timestamp: `YYYY-MM-DD HH:MM`, 24-hour, zero-padded.
pub const TIMESTAMP_FORMAT: &str = "YYYY-MM-DD HH:MM";

const MINUTES_PER_HOUR: i64 = 60;
const MINUTES_PER_DAY: i64 = 24 * MINUTES_PER_HOUR;

/// A signed span of whole minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Minutes(pub i64);

impl Minutes {
    pub const ZERO: Minutes = Minutes(0);

    pub const fn new(minutes: i64) -> Self {
        Minutes(minutes)
    }

    pub const fn hours(hours: i64) -> Self {
        Minutes(hours * MINUTES_PER_HOUR)
    }

    pub const fn days(days: i64) -> Self {
        Minutes(days * MINUTES_PER_DAY)
    }

    pub const fn hm(hours: i64, minutes: i64) -> Self {
        Minutes(hours * MINUTES_PER_HOUR + minutes)
    }

    pub const fn get(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

/// Renders as `Nh Mm`, e.g. `21h 0m` or `-16h 0m`.
impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}h {}m", abs / 60, abs % 60)
    }
}

impl Add for Minutes {
    type Output = Minutes;
    fn add(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 + rhs.0)
    }
}

impl Sub for Minutes {
    type Output = Minutes;
    fn sub(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 - rhs.0)
    }
}

impl Neg for Minutes {
    type Output = Minutes;
    fn neg(self) -> Minutes {
        Minutes(-self.0)
    }
}

impl Mul<i64> for Minutes {
    type Output = Minutes;
    fn mul(self, rhs: i64) -> Minutes {
        Minutes(self.0 * rhs)
    }
}

/// Minutes since 1970-01-01 00:00 UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    minutes_since_epoch: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("timestamp {text:?} does not match {TIMESTAMP_FORMAT}")]
pub struct TimestampError {
    pub text: String,
}

impl Timestamp {
    pub const fn from_minutes(minutes_since_epoch: i64) -> Self {
        Timestamp { minutes_since_epoch }
    }

    pub const fn minutes_since_epoch(self) -> i64 {
        self.minutes_since_epoch
    }

    /// Builds a timestamp from calendar fields; `None` if the date or time is invalid.
    pub fn from_ymd_hm(year: i32, month: u32, day: u32, hour: u32, minute: u32) -> Option<Self> {
        if hour > 23 || minute > 59 {
            return None;
        }
        let date = NaiveDate::from_ymd_opt(year, month, day)?;
        let days = date.signed_duration_since(epoch()).num_days();
        Some(Timestamp::from_minutes(
            days * MINUTES_PER_DAY + i64::from(hour) * MINUTES_PER_HOUR + i64::from(minute),
        ))
    }

    /// Strict parse of `YYYY-MM-DD HH:MM`. Anything else (missing zero padding,
    /// seconds, a timezone suffix, surrounding whitespace, `T` separator) fails.
    pub fn parse(text: &str) -> Result<Self, TimestampError> {
        let err = || TimestampError { text: text.to_string() };
        let b = text.as_bytes();
        if b.len() != 16 || b[4] != b'-' || b[7] != b'-' || b[10] != b' ' || b[13] != b':' {
            return Err(err());
        }
        let num = |range: std::ops::Range<usize>| -> Option<u32> {
            let digits = &b[range];
            if !digits.iter().all(u8::is_ascii_digit) {
                return None;
            }
            Some(digits.iter().fold(0u32, |acc, d| acc * 10 + u32::from(d - b'0')))
        };
        let (year, month, day, hour, minute) = (|| {
            Some((num(0..4)?, num(5..7)?, num(8..10)?, num(11..13)?, num(14..16)?))
        })()
        .ok_or_else(err)?;
        Timestamp::from_ymd_hm(year as i32, month, day, hour, minute).ok_or_else(err)
    }

    /// Current wall-clock time truncated to the minute.
    pub fn now() -> Self {
        Timestamp::from_minutes(chrono::Utc::now().timestamp().div_euclid(60))
    }

    pub fn date(self) -> NaiveDate {
        epoch() + chrono::Duration::days(self.minutes_since_epoch.div_euclid(MINUTES_PER_DAY))
    }
}

fn epoch() -> NaiveDate {
    DateTime::UNIX_EPOCH.date_naive()
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let date = self.date();
        let minute_of_day = self.minutes_since_epoch.rem_euclid(MINUTES_PER_DAY);
        let time = chrono::NaiveTime::from_num_seconds_from_midnight_opt((minute_of_day * 60) as u32, 0)
            .expect("minute of day is in range");
        write!(
            f,
            "{:04}-{:02}-{:02} {:02}:{:02}",
            date.year(),
            date.month(),
            date.day(),
            time.hour(),
            time.minute()
        )
    }
}

impl std::str::FromStr for Timestamp {
    type Err = TimestampError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Timestamp::parse(s)
    }
}

impl Sub for Timestamp {
    type Output = Minutes;
    fn sub(self, rhs: Timestamp) -> Minutes {
        Minutes(self.minutes_since_epoch - rhs.minutes_since_epoch)
    }
}

impl Add<Minutes> for Timestamp {
    type Output = Timestamp;
    fn add(self, rhs: Minutes) -> Timestamp {
        Timestamp::from_minutes(self.minutes_since_epoch + rhs.0)
    }
}

impl AddAssign<Minutes> for Timestamp {
    fn add_assign(&mut self, rhs: Minutes) {
        self.minutes_since_epoch += rhs.0;
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Timestamp::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_canonical_forms() {
        let t = Timestamp::parse("2024-03-20 14:30").unwrap();
        assert_eq!(t.to_string(), "2024-03-20 14:30");
        let midnight = Timestamp::parse("2024-03-20 00:00").unwrap();
        assert_eq!(t - midnight, Minutes::hm(14, 30));
        assert_eq!(Timestamp::parse("1970-01-01 00:00").unwrap().minutes_since_epoch(), 0);
    }

    #[test]
    fn rejects_deviations() {
        for bad in [
            "2024-3-20 1:5",
            "2024-03-20 1:05",
            "2024-03-20 14:30:00",
            "2024-03-20 14:30Z",
            "2024-03-20 14:30 UTC",
            "2024-03-20T14:30",
            " 2024-03-20 14:30",
            "2024-03-20 02:30 PM",
            "2024-02-30 10:00",
            "2024-03-20 24:00",
            "2024-03-20 12:60",
            "２024-03-20 14:30",
            "",
        ] {
            assert!(Timestamp::parse(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn leap_day_and_pre_epoch() {
        let leap = Timestamp::parse("2024-02-29 23:59").unwrap();
        assert_eq!((leap + Minutes(1)).to_string(), "2024-03-01 00:00");
        let before = Timestamp::parse("1969-12-31 23:59").unwrap();
        assert_eq!(before.minutes_since_epoch(), -1);
        assert_eq!(before.to_string(), "1969-12-31 23:59");
    }

    #[test]
    fn minutes_display() {
        assert_eq!(Minutes::hours(21).to_string(), "21h 0m");
        assert_eq!(Minutes::hm(1, 5).to_string(), "1h 5m");
        assert_eq!(Minutes(-90).to_string(), "-1h 30m");
    }

    proptest! {
        #[test]
        fn text_round_trip(minute in 15_778_080i64..68_374_080i64) {
            // 2000-01-01 .. 2100-01-01
            let t = Timestamp::from_minutes(minute);
            let text = t.to_string();
            prop_assert_eq!(text.len(), 16);
            prop_assert_eq!(Timestamp::parse(&text).unwrap(), t);
        }
    }
}
