//! Outage severity from nighttime radiance against a trailing baseline.
//!
//! A pixel's severity is its fractional radiance loss relative to the mean of
//! the preceding `window_days` nights, clamped to `[0, 1]`. Pixels without
//! enough valid baseline nights, or whose baseline is too dim to carry
//! signal, are marked unlit.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::model::{DayStamp, Georef, ModelError, OutageMapGrid, PixelState, RadianceGrid};

pub const DEFAULT_WINDOW_DAYS: u32 = 90;
pub const DEFAULT_MIN_VALID: u32 = 30;
/// nW·cm⁻²·sr⁻¹
pub const DEFAULT_DIM_THRESHOLD: f64 = 0.5;
pub const EVENT_HALF_WIDTH_DAYS: i64 = 30;

#[derive(Debug, Error)]
pub enum SeverityError {
    #[error("georeference mismatch: {0}")]
    Georef(String),
    #[error("history grid dated {history} is not before target {target}")]
    NotBefore { history: DayStamp, target: DayStamp },
    #[error("history contains two grids for {0}")]
    DuplicateDate(DayStamp),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeverityParams {
    pub window_days: u32,
    pub min_valid: u32,
    pub dim_threshold: f64,
}

impl Default for SeverityParams {
    fn default() -> Self {
        Self {
            window_days: DEFAULT_WINDOW_DAYS,
            min_valid: DEFAULT_MIN_VALID,
            dim_threshold: DEFAULT_DIM_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselinePixel {
    pub mean_radiance: f64,
    pub valid_day_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineGrid {
    pub georef: Georef,
    pub window_days: u32,
    pixels: Vec<BaselinePixel>,
}

impl BaselineGrid {
    pub fn new(georef: Georef, window_days: u32, pixels: Vec<BaselinePixel>) -> Result<Self, SeverityError> {
        georef.validate()?;
        if pixels.len() != georef.len() {
            return Err(SeverityError::Georef(format!(
                "{} baseline pixels for a {}x{} grid",
                pixels.len(),
                georef.height,
                georef.width
            )));
        }
        Ok(Self {
            georef,
            window_days,
            pixels,
        })
    }

    pub fn pixels(&self) -> &[BaselinePixel] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> BaselinePixel {
        self.pixels[row * self.georef.width + col]
    }

    /// Every mean multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let pixels = self
            .pixels
            .iter()
            .map(|p| BaselinePixel {
                mean_radiance: p.mean_radiance * k,
                valid_day_count: p.valid_day_count,
            })
            .collect();
        Self { pixels, ..self.clone() }
    }
}

/// Per-pixel mean over non-missing values among the `window_days` dates
/// strictly before `target_date`. Older history is ignored.
pub fn compute_baseline<'a>(
    georef: &Georef,
    history: impl IntoIterator<Item = &'a RadianceGrid>,
    target_date: DayStamp,
    window_days: u32,
) -> Result<BaselineGrid, SeverityError> {
    let n = georef.len();
    let mut sums = vec![0f64; n];
    let mut counts = vec![0u32; n];
    let mut seen = BTreeSet::new();
    for grid in history {
        if !grid.georef.matches(georef) {
            return Err(SeverityError::Georef(format!(
                "history grid {} {} differs from target",
                grid.fips, grid.date
            )));
        }
        if grid.date >= target_date {
            return Err(SeverityError::NotBefore {
                history: grid.date,
                target: target_date,
            });
        }
        if !seen.insert(grid.date) {
            return Err(SeverityError::DuplicateDate(grid.date));
        }
        if target_date.days_since(grid.date) > i64::from(window_days) {
            continue;
        }
        for (i, v) in grid.values().iter().enumerate() {
            if let Some(v) = v {
                sums[i] += v;
                counts[i] += 1;
            }
        }
    }
    let pixels = sums
        .into_iter()
        .zip(counts)
        .map(|(sum, count)| BaselinePixel {
            mean_radiance: if count > 0 { sum / f64::from(count) } else { 0.0 },
            valid_day_count: count,
        })
        .collect();
    BaselineGrid::new(*georef, window_days, pixels)
}

/// Classifies one pixel. Brightening clamps to zero severity.
pub fn pixel_severity(current: Option<f64>, baseline: BaselinePixel, dim_threshold: f64, min_valid: u32) -> PixelState {
    let Some(current) = current else {
        return PixelState::Missing;
    };
    let mean = baseline.mean_radiance;
    if baseline.valid_day_count < min_valid || mean < dim_threshold || mean <= 0.0 {
        return PixelState::Unlit;
    }
    PixelState::Severity(((mean - current) / mean).clamp(0.0, 1.0))
}

pub fn severity_map(
    current: &RadianceGrid,
    baseline: &BaselineGrid,
    dim_threshold: f64,
    min_valid: u32,
) -> Result<OutageMapGrid, SeverityError> {
    if !current.georef.matches(&baseline.georef) {
        return Err(SeverityError::Georef(format!(
            "grid {} {} does not match its baseline",
            current.fips, current.date
        )));
    }
    let pixels = current
        .values()
        .iter()
        .zip(baseline.pixels())
        .map(|(v, b)| pixel_severity(*v, *b, dim_threshold, min_valid))
        .collect();
    Ok(OutageMapGrid::new(current.fips, current.date, current.georef, pixels, None)?)
}

/// Arithmetic mean over severity pixels; 0 when there are none.
pub fn mean_severity(map: &OutageMapGrid) -> f64 {
    let (sum, n) = map
        .pixels()
        .iter()
        .filter_map(PixelState::severity)
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventWindow {
    pub event_label: String,
    pub landfall: DayStamp,
    pub start: DayStamp,
    pub end: DayStamp,
}

impl EventWindow {
    pub fn contains(&self, d: DayStamp) -> bool {
        self.start <= d && d <= self.end
    }

    /// Inclusive day count.
    pub fn len_days(&self) -> i64 {
        self.end.days_since(self.start) + 1
    }
}

/// One month either side of landfall, inclusive.
pub fn event_window(label: &str, landfall: DayStamp) -> EventWindow {
    EventWindow {
        event_label: label.to_string(),
        landfall,
        start: landfall.add_days(-EVENT_HALF_WIDTH_DAYS),
        end: landfall.add_days(EVENT_HALF_WIDTH_DAYS),
    }
}

/// Map for `current`; earlier grids of the same county in `county_history`
/// form the baseline.
pub fn derive_map(
    current: &RadianceGrid,
    county_history: &[RadianceGrid],
    params: &SeverityParams,
    event_label: Option<&str>,
) -> Result<OutageMapGrid, SeverityError> {
    let earlier = county_history
        .iter()
        .filter(|g| g.date < current.date && g.fips == current.fips)
        .filter(|g| current.date.days_since(g.date) <= i64::from(params.window_days));
    let baseline = compute_baseline(&current.georef, earlier, current.date, params.window_days)?;
    let mut map = severity_map(current, &baseline, params.dim_threshold, params.min_valid)?;
    map.event_label = event_label.map(str::to_string);
    Ok(map)
}
