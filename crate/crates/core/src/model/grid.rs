use super::{BBox, DayStamp, FipsCode, ModelError};

/// Raster georeference. Row 0 is the northern edge, column 0 the western edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Georef {
    pub height: usize,
    pub width: usize,
    pub bbox: BBox,
    /// Degrees per pixel, same on both axes.
    pub cell_size: f64,
}

impl Georef {
    pub fn new(height: usize, width: usize, bbox: BBox, cell_size: f64) -> Result<Self, ModelError> {
        let g = Self {
            height,
            width,
            bbox,
            cell_size,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.height == 0 || self.width == 0 {
            return Err(ModelError::Grid(format!(
                "dimensions must be at least 1x1, got {}x{}",
                self.height, self.width
            )));
        }
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(ModelError::Grid(format!("cell_size must be positive, got {}", self.cell_size)));
        }
        let cols = (self.bbox.width_deg() / self.cell_size).round();
        let rows = (self.bbox.height_deg() / self.cell_size).round();
        if (cols - self.width as f64).abs() > 1.0 || (rows - self.height as f64).abs() > 1.0 {
            return Err(ModelError::Grid(format!(
                "bbox extent at cell_size {} implies {}x{} pixels, header declares {}x{}",
                self.cell_size, rows, cols, self.height, self.width
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same dimensions, and bbox/cell size equal up to float noise.
    pub fn matches(&self, other: &Georef) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        self.height == other.height
            && self.width == other.width
            && close(self.cell_size, other.cell_size)
            && close(self.bbox.min_lon, other.bbox.min_lon)
            && close(self.bbox.min_lat, other.bbox.min_lat)
            && close(self.bbox.max_lon, other.bbox.max_lon)
            && close(self.bbox.max_lat, other.bbox.max_lat)
    }

    /// Longitude of the center of column `col`.
    pub fn center_lon(&self, col: usize) -> f64 {
        self.bbox.min_lon + (col as f64 + 0.5) * self.cell_size
    }

    /// Latitude of the center of row `row`.
    pub fn center_lat(&self, row: usize) -> f64 {
        self.bbox.max_lat - (row as f64 + 0.5) * self.cell_size
    }
}

/// One county-night radiance raster (nW·cm⁻²·sr⁻¹). `None` marks a missing pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RadianceGrid {
    pub fips: FipsCode,
    pub date: DayStamp,
    pub georef: Georef,
    values: Vec<Option<f64>>,
}

impl RadianceGrid {
    pub fn new(fips: FipsCode, date: DayStamp, georef: Georef, values: Vec<Option<f64>>) -> Result<Self, ModelError> {
        georef.validate()?;
        if values.len() != georef.len() {
            return Err(ModelError::Grid(format!(
                "expected {} values for {}x{} grid, got {}",
                georef.len(),
                georef.height,
                georef.width,
                values.len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ModelError::Grid(format!("radiance must be finite and nonnegative, got {v}")));
        }
        Ok(Self {
            fips,
            date,
            georef,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.georef.height
    }

    pub fn width(&self) -> usize {
        self.georef.width
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.georef.width + col]
    }

    /// Row-major pixel values.
    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Same pixels, all radiances multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self, ModelError> {
        let values = self.values.iter().map(|v| v.map(|x| x * k)).collect();
        Self::new(self.fips, self.date, self.georef, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelState {
    /// Fractional radiance loss in [0, 1].
    Severity(f64),
    /// Baseline too dim or too short to judge.
    Unlit,
    Missing,
}

impl PixelState {
    pub fn severity(&self) -> Option<f64> {
        match self {
            PixelState::Severity(s) => Some(*s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageMapGrid {
    pub fips: FipsCode,
    pub date: DayStamp,
    pub georef: Georef,
    pixels: Vec<PixelState>,
    pub event_label: Option<String>,
}

impl OutageMapGrid {
    pub fn new(
        fips: FipsCode,
        date: DayStamp,
        georef: Georef,
        pixels: Vec<PixelState>,
        event_label: Option<String>,
    ) -> Result<Self, ModelError> {
        georef.validate()?;
        if pixels.len() != georef.len() {
            return Err(ModelError::Grid(format!(
                "expected {} pixels for {}x{} map, got {}",
                georef.len(),
                georef.height,
                georef.width,
                pixels.len()
            )));
        }
        if let Some(s) = pixels
            .iter()
            .filter_map(PixelState::severity)
            .find(|s| !(0.0..=1.0).contains(s))
        {
            return Err(ModelError::Grid(format!("severity must lie in [0,1], got {s}")));
        }
        Ok(Self {
            fips,
            date,
            georef,
            pixels,
            event_label,
        })
    }

    pub fn height(&self) -> usize {
        self.georef.height
    }

    pub fn width(&self) -> usize {
        self.georef.width
    }

    pub fn get(&self, row: usize, col: usize) -> PixelState {
        self.pixels[row * self.georef.width + col]
    }

    pub fn pixels(&self) -> &[PixelState] {
        &self.pixels
    }
}
