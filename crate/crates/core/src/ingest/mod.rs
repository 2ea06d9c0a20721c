//! Source ingestion: outage-record CSVs, county registries, NTL grid files and
//! bounding-box segmentation of statewide rasters.

mod clip;
mod grid_file;
mod records;
mod registry;

use thiserror::Error;

use crate::model::{FipsCode, ModelError};

pub use clip::segment_by_bbox;
pub use grid_file::{
    read_map_grid, read_ntl_grid, write_map_grid, write_ntl_grid, DEFAULT_CELL_SIZE, MAP_EXTENSION, NTL_EXTENSION,
};
pub use records::{parse_record_csv, write_record_csv, IngestReport, RECORD_COLUMNS};
pub use registry::CountyRegistry;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("grid header: {0}")]
    Header(String),
    #[error("dimension mismatch: header declares {height}x{width}, {found}")]
    Dimension {
        height: usize,
        width: usize,
        found: String,
    },
    #[error("line {line}, column {column}: invalid cell {token:?}")]
    Cell {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("county registry line {line}: {message}")]
    Registry { line: u64, message: String },
    #[error("duplicate FIPS code {0} in county registry")]
    DuplicateFips(FipsCode),
    #[error("county {0} outside raster")]
    CountyOutsideRaster(FipsCode),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<csv::Error> for IngestError {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => IngestError::Io(io),
                _ => unreachable!("is_io_error checked"),
            }
        } else {
            IngestError::Format(err.to_string())
        }
    }
}
