//! `xsd:dateTime` / `xsd:date` lexical handling at second precision, UTC only.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use thiserror::Error;

/// Lexical error with the byte offset of the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {what} at position {position} in {input:?}")]
pub struct LexicalError {
    pub input: String,
    pub position: usize,
    pub what: &'static str,
}

impl LexicalError {
    fn new(input: &str, position: usize, what: &'static str) -> Self {
        Self {
            input: input.to_string(),
            position,
            what,
        }
    }
}

/// A UTC instant with second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeStamp(NaiveDateTime);

/// A UTC calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DayStamp(NaiveDate);

fn digits(input: &str, bytes: &[u8], start: usize, len: usize, what: &'static str) -> Result<u32, LexicalError> {
    let mut value = 0u32;
    for i in start..start + len {
        match bytes.get(i) {
            Some(b) if b.is_ascii_digit() => value = value * 10 + u32::from(b - b'0'),
            _ => return Err(LexicalError::new(input, i.min(bytes.len()), what)),
        }
    }
    Ok(value)
}

fn expect(input: &str, bytes: &[u8], at: usize, options: &[u8], what: &'static str) -> Result<u8, LexicalError> {
    match bytes.get(at) {
        Some(b) if options.contains(b) => Ok(*b),
        _ => Err(LexicalError::new(input, at.min(bytes.len()), what)),
    }
}

/// Parses `YYYY-MM-DD` starting at byte 0; validates ranges.
fn parse_date_prefix(input: &str) -> Result<NaiveDate, LexicalError> {
    let b = input.as_bytes();
    let year = digits(input, b, 0, 4, "year")?;
    expect(input, b, 4, b"-", "date separator")?;
    let month = digits(input, b, 5, 2, "month")?;
    if !(1..=12).contains(&month) {
        return Err(LexicalError::new(input, 5, "month"));
    }
    expect(input, b, 7, b"-", "date separator")?;
    let day = digits(input, b, 8, 2, "day")?;
    NaiveDate::from_ymd_opt(year as i32, month, day).ok_or_else(|| LexicalError::new(input, 8, "day"))
}

impl TimeStamp {
    pub fn from_ymd_hms(year: i32, month: u32, day: u32, hour: u32, min: u32, sec: u32) -> Option<Self> {
        let date = NaiveDate::from_ymd_opt(year, month, day)?;
        let time = NaiveTime::from_hms_opt(hour, min, sec)?;
        Some(Self(NaiveDateTime::new(date, time)))
    }

    /// Accepts `YYYY-MM-DDTHH:MM:SSZ` and the utility CSV form
    /// `YYYY-MM-DD HH:MM:SS` (read as UTC).
    pub fn parse(input: &str) -> Result<Self, LexicalError> {
        let b = input.as_bytes();
        let date = parse_date_prefix(input)?;
        let sep = expect(input, b, 10, b"T ", "date/time separator")?;
        let hour = digits(input, b, 11, 2, "hour")?;
        if hour > 23 {
            return Err(LexicalError::new(input, 11, "hour"));
        }
        expect(input, b, 13, b":", "time separator")?;
        let min = digits(input, b, 14, 2, "minute")?;
        if min > 59 {
            return Err(LexicalError::new(input, 14, "minute"));
        }
        expect(input, b, 16, b":", "time separator")?;
        let sec = digits(input, b, 17, 2, "second")?;
        if sec > 59 {
            return Err(LexicalError::new(input, 17, "second"));
        }
        let end = if sep == b'T' {
            expect(input, b, 19, b"Z", "timezone designator")?;
            20
        } else {
            19
        };
        if b.len() != end {
            return Err(LexicalError::new(input, end, "trailing characters"));
        }
        let time = NaiveTime::from_hms_opt(hour, min, sec).expect("range checked above");
        Ok(Self(NaiveDateTime::new(date, time)))
    }

    pub fn day(&self) -> DayStamp {
        DayStamp(self.0.date())
    }

    /// Seconds since the Unix epoch.
    pub fn unix_seconds(&self) -> i64 {
        self.0.and_utc().timestamp()
    }

    pub fn from_unix_seconds(secs: i64) -> Option<Self> {
        chrono::DateTime::from_timestamp(secs, 0).map(|dt| Self(dt.naive_utc()))
    }

    /// True when the instant falls on a quarter-hour boundary.
    pub fn is_quarter_hour(&self) -> bool {
        self.0.second() == 0 && self.0.minute().is_multiple_of(15)
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

impl serde::Serialize for TimeStamp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for TimeStamp {
    type Err = LexicalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl DayStamp {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Self)
    }

    pub fn parse(input: &str) -> Result<Self, LexicalError> {
        let date = parse_date_prefix(input)?;
        if input.len() != 10 {
            return Err(LexicalError::new(input, 10, "trailing characters"));
        }
        Ok(Self(date))
    }

    pub fn add_days(&self, days: i64) -> Self {
        Self(self.0 + Duration::days(days))
    }

    /// Signed number of days from `other` to `self`.
    pub fn days_since(&self, other: DayStamp) -> i64 {
        (self.0 - other.0).num_days()
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn midnight(&self) -> TimeStamp {
        TimeStamp(self.0.and_time(NaiveTime::MIN))
    }
}

impl fmt::Display for DayStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl serde::Serialize for DayStamp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for DayStamp {
    type Err = LexicalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Canonical `xsd:dateTime` lexical form.
pub fn format_datetime(t: TimeStamp) -> String {
    t.to_string()
}

pub fn parse_datetime(text: &str) -> Result<TimeStamp, LexicalError> {
    TimeStamp::parse(text)
}
