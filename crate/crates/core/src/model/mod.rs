//! Domain types shared across the pipeline.

mod grid;
pub mod iri;
mod time;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use grid::{Georef, OutageMapGrid, PixelState, RadianceGrid};
pub use time::{format_datetime, parse_datetime, DayStamp, LexicalError, TimeStamp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid FIPS code {0:?}: expected exactly 5 decimal digits")]
    Fips(String),
    #[error("invalid bounding box ({min_lon}, {min_lat}, {max_lon}, {max_lat})")]
    BBox {
        min_lon: f64,
        min_lat: f64,
        max_lon: f64,
        max_lat: f64,
    },
    #[error("county name must be nonempty")]
    EmptyName,
    #[error("invalid grid: {0}")]
    Grid(String),
}

/// 5-digit county code; the first two digits identify the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FipsCode(u32);

impl FipsCode {
    pub fn new(value: u32) -> Result<Self, ModelError> {
        if value > 99_999 {
            return Err(ModelError::Fips(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    pub fn state_code(&self) -> u32 {
        self.0 / 1000
    }
}

impl FromStr for FipsCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 5 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ModelError::Fips(s.to_string()));
        }
        Ok(Self(s.parse().expect("five ascii digits")))
    }
}

impl fmt::Display for FipsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:05}", self.0)
    }
}

/// Lon/lat box in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self, ModelError> {
        let b = Self {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        };
        let finite = [min_lon, min_lat, max_lon, max_lat].iter().all(|v| v.is_finite());
        if !finite || min_lon >= max_lon || min_lat >= max_lat {
            return Err(ModelError::BBox {
                min_lon,
                min_lat,
                max_lon,
                max_lat,
            });
        }
        Ok(b)
    }

    pub fn width_deg(&self) -> f64 {
        self.max_lon - self.min_lon
    }

    pub fn height_deg(&self) -> f64 {
        self.max_lat - self.min_lat
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min_lon < other.max_lon
            && other.min_lon < self.max_lon
            && self.min_lat < other.max_lat
            && other.min_lat < self.max_lat
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountyMeta {
    pub fips: FipsCode,
    pub name: String,
    pub state: String,
    pub bbox: BBox,
}

impl CountyMeta {
    pub fn new(fips: FipsCode, name: &str, state: &str, bbox: BBox) -> Result<Self, ModelError> {
        if name.trim().is_empty() {
            return Err(ModelError::EmptyName);
        }
        Ok(Self {
            fips,
            name: name.to_string(),
            state: state.to_string(),
            bbox,
        })
    }
}

/// One 15-minute utility report for a county.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageRecordRow {
    pub fips: FipsCode,
    pub county: String,
    pub state: String,
    pub customers_out: u64,
    pub run_start_time: TimeStamp,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fips_requires_five_digits() {
        assert_eq!("12071".parse::<FipsCode>().unwrap().value(), 12071);
        assert_eq!("01001".parse::<FipsCode>().unwrap().to_string(), "01001");
        assert_eq!("12071".parse::<FipsCode>().unwrap().state_code(), 12);
        for bad in ["1207", "120711", "12a71", "", " 1207"] {
            assert!(bad.parse::<FipsCode>().is_err(), "{bad}");
        }
        assert!(FipsCode::new(100_000).is_err());
    }

    #[test]
    fn bbox_validation() {
        assert!(BBox::new(-83.0, 26.0, -81.0, 28.0).is_ok());
        assert!(BBox::new(-81.0, 26.0, -83.0, 28.0).is_err());
        assert!(BBox::new(-83.0, 26.0, -81.0, 26.0).is_err());
        assert!(BBox::new(f64::NAN, 26.0, -81.0, 28.0).is_err());
    }

    #[test]
    fn county_name_nonempty() {
        let bbox = BBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let fips = FipsCode::new(12071).unwrap();
        assert!(CountyMeta::new(fips, " ", "Florida", bbox).is_err());
        assert!(CountyMeta::new(fips, "Lee", "Florida", bbox).is_ok());
    }
}
