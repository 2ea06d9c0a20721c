use std::ops::Range;

use super::IngestError;
use crate::model::{BBox, CountyMeta, Georef, RadianceGrid};

/// Indices whose cell centers fall in `[lo, hi)`. Centers are monotonic in the
/// index, so the selection is a contiguous range.
fn select(n: usize, center: impl Fn(usize) -> f64, lo: f64, hi: f64, eps: f64) -> Option<Range<usize>> {
    let inside: Vec<usize> = (0..n)
        .filter(|&i| {
            let c = center(i);
            c >= lo - eps && c < hi - eps
        })
        .collect();
    Some(*inside.first()?..*inside.last()? + 1)
}

/// Cuts the pixels of `state_grid` whose centers lie inside the county box.
///
/// Upper edges are half-open, so a pixel centered exactly on a shared county
/// border belongs to exactly one of the two counties. No resampling happens;
/// the output box is snapped to the enclosing pixel edges.
pub fn segment_by_bbox(state_grid: &RadianceGrid, county: &CountyMeta) -> Result<RadianceGrid, IngestError> {
    let g = &state_grid.georef;
    let cell = g.cell_size;
    let eps = 1e-9 * cell;
    let bb = &county.bbox;
    let outside = || IngestError::CountyOutsideRaster(county.fips);

    let cols = select(g.width, |c| g.center_lon(c), bb.min_lon, bb.max_lon, eps).ok_or_else(outside)?;
    // rows run north to south
    let rows = select(g.height, |r| g.center_lat(r), bb.min_lat, bb.max_lat, eps).ok_or_else(outside)?;

    let min_lon = if cols.start == 0 { g.bbox.min_lon } else { g.bbox.min_lon + cols.start as f64 * cell };
    let max_lon = if cols.end == g.width { g.bbox.max_lon } else { g.bbox.min_lon + cols.end as f64 * cell };
    let max_lat = if rows.start == 0 { g.bbox.max_lat } else { g.bbox.max_lat - rows.start as f64 * cell };
    let min_lat = if rows.end == g.height { g.bbox.min_lat } else { g.bbox.max_lat - rows.end as f64 * cell };

    let georef = Georef::new(rows.len(), cols.len(), BBox::new(min_lon, min_lat, max_lon, max_lat)?, cell)?;
    let mut values = Vec::with_capacity(georef.len());
    for r in rows {
        for c in cols.clone() {
            values.push(state_grid.get(r, c));
        }
    }
    Ok(RadianceGrid::new(county.fips, state_grid.date, georef, values)?)
}
