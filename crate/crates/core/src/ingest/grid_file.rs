//! Portable grid container.
//!
//! Line 1 is a one-line JSON header (`fips`, `date`, `height`, `width`,
//! `min_lon`, `min_lat`, `max_lon`, `max_lat`, `cell_size`); each of the next
//! `height` lines holds `width` comma-separated cells. `NA` marks a missing
//! pixel. Outage maps reuse the layout with an optional `event` header key and
//! `U` for unlit pixels.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{BBox, DayStamp, FipsCode, Georef, OutageMapGrid, PixelState, RadianceGrid};

/// 15 arc-seconds.
pub const DEFAULT_CELL_SIZE: f64 = 1.0 / 240.0;
pub const NTL_EXTENSION: &str = ".ntl.csv";
pub const MAP_EXTENSION: &str = ".map.csv";

const MISSING: &str = "NA";
const UNLIT: &str = "U";

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FipsField {
    Text(String),
    Number(u32),
}

fn default_cell_size() -> f64 {
    DEFAULT_CELL_SIZE
}

#[derive(Debug, Serialize, Deserialize)]
struct GridHeader {
    fips: FipsField,
    date: String,
    height: usize,
    width: usize,
    min_lon: f64,
    min_lat: f64,
    max_lon: f64,
    max_lat: f64,
    #[serde(default = "default_cell_size")]
    cell_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    event: Option<String>,
}

struct Decoded<T> {
    fips: FipsCode,
    date: DayStamp,
    georef: Georef,
    event: Option<String>,
    cells: Vec<T>,
}

impl GridHeader {
    fn new(fips: FipsCode, date: DayStamp, georef: &Georef, event: Option<String>) -> Self {
        Self {
            fips: FipsField::Text(fips.to_string()),
            date: date.to_string(),
            height: georef.height,
            width: georef.width,
            min_lon: georef.bbox.min_lon,
            min_lat: georef.bbox.min_lat,
            max_lon: georef.bbox.max_lon,
            max_lat: georef.bbox.max_lat,
            cell_size: georef.cell_size,
            event,
        }
    }
}

fn decode<R: Read, T>(
    reader: R,
    mut cell: impl FnMut(&str) -> Option<T>,
) -> Result<Decoded<T>, IngestError> {
    let mut lines = BufReader::new(reader).lines();
    let first = lines
        .next()
        .transpose()?
        .ok_or_else(|| IngestError::Header("empty file".into()))?;
    let header: GridHeader = serde_json::from_str(&first).map_err(|e| IngestError::Header(e.to_string()))?;
    let fips = match &header.fips {
        FipsField::Text(s) => s.parse()?,
        FipsField::Number(n) => FipsCode::new(*n)?,
    };
    let date = DayStamp::parse(&header.date).map_err(|e| IngestError::Header(e.to_string()))?;
    let bbox = BBox::new(header.min_lon, header.min_lat, header.max_lon, header.max_lat)?;
    let georef = Georef::new(header.height, header.width, bbox, header.cell_size)?;

    let dimension = |found: String| IngestError::Dimension {
        height: header.height,
        width: header.width,
        found,
    };
    let mut cells = Vec::with_capacity(georef.len());
    let mut rows = 0usize;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        rows += 1;
        if rows > header.height {
            return Err(dimension(format!("body has more than {} rows", header.height)));
        }
        let before = cells.len();
        for (col, token) in line.split(',').enumerate() {
            let token = token.trim();
            let value = cell(token).ok_or_else(|| IngestError::Cell {
                line: line_no,
                column: col + 1,
                token: token.to_string(),
            })?;
            cells.push(value);
        }
        let got = cells.len() - before;
        if got != header.width {
            return Err(dimension(format!("line {line_no} has {got} values")));
        }
    }
    if rows != header.height {
        return Err(dimension(format!("body has {rows} rows")));
    }
    Ok(Decoded {
        fips,
        date,
        georef,
        event: header.event,
        cells,
    })
}

fn parse_radiance(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)
}

/// Reads one county-night radiance grid.
pub fn read_ntl_grid<R: Read>(reader: R) -> Result<RadianceGrid, IngestError> {
    let d = decode(reader, |token| {
        if token == MISSING {
            Some(None)
        } else {
            parse_radiance(token).map(Some)
        }
    })?;
    Ok(RadianceGrid::new(d.fips, d.date, d.georef, d.cells)?)
}

pub fn read_map_grid<R: Read>(reader: R) -> Result<OutageMapGrid, IngestError> {
    let d = decode(reader, |token| match token {
        MISSING => Some(PixelState::Missing),
        UNLIT => Some(PixelState::Unlit),
        _ => parse_radiance(token)
            .filter(|s| *s <= 1.0)
            .map(PixelState::Severity),
    })?;
    Ok(OutageMapGrid::new(d.fips, d.date, d.georef, d.cells, d.event)?)
}

fn encode<W: Write, T>(
    mut writer: W,
    header: &GridHeader,
    cells: &[T],
    width: usize,
    token: impl Fn(&T) -> String,
) -> Result<(), IngestError> {
    let json = serde_json::to_string(header).map_err(|e| IngestError::Header(e.to_string()))?;
    writeln!(writer, "{json}")?;
    for row in cells.chunks(width) {
        let line: Vec<String> = row.iter().map(&token).collect();
        writeln!(writer, "{}", line.join(","))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_ntl_grid<W: Write>(writer: W, grid: &RadianceGrid) -> Result<(), IngestError> {
    let header = GridHeader::new(grid.fips, grid.date, &grid.georef, None);
    encode(writer, &header, grid.values(), grid.width(), |v| match v {
        Some(x) => format!("{x}"),
        None => MISSING.to_string(),
    })
}

pub fn write_map_grid<W: Write>(writer: W, map: &OutageMapGrid) -> Result<(), IngestError> {
    let header = GridHeader::new(map.fips, map.date, &map.georef, map.event_label.clone());
    encode(writer, &header, map.pixels(), map.width(), |p| match p {
        PixelState::Severity(s) => format!("{s}"),
        PixelState::Unlit => UNLIT.to_string(),
        PixelState::Missing => MISSING.to_string(),
    })
}
