use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{PipelineError, Result};
use crate::ingest::read_map_grid;
use crate::model::{OutageMapGrid, PixelState};

/// Plain PGM (P2), 8-bit. Severity `s` maps to `round(255·s)`; unlit and
/// missing pixels are 0.
pub fn render_pgm(map: &OutageMapGrid) -> String {
    let mut out = format!("P2\n{} {}\n255\n", map.width(), map.height());
    for row in map.pixels().chunks(map.width()) {
        let line: Vec<String> = row
            .iter()
            .map(|p| match p {
                PixelState::Severity(s) => ((255.0 * s).round() as u8).to_string(),
                PixelState::Unlit | PixelState::Missing => "0".to_string(),
            })
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// One line per raster row of `valid`, `unlit` or `missing`.
pub fn render_mask(map: &OutageMapGrid) -> String {
    let mut out = String::new();
    for row in map.pixels().chunks(map.width()) {
        let line: Vec<&str> = row
            .iter()
            .map(|p| match p {
                PixelState::Severity(_) => "valid",
                PixelState::Unlit => "unlit",
                PixelState::Missing => "missing",
            })
            .collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// `dir/name.pgm` → `dir/name.mask.csv`.
pub fn mask_path(pgm: &Path) -> PathBuf {
    let stem = pgm.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    pgm.with_file_name(format!("{stem}.mask.csv"))
}

/// Reads a map file and writes the PGM plus its mask. Returns the mask path.
pub fn export_map(map_file: &Path, out: &Path) -> Result<PathBuf> {
    let f = fs::File::open(map_file).map_err(|e| PipelineError::io(map_file, e))?;
    let map = read_map_grid(std::io::BufReader::new(f)).map_err(|e| PipelineError::ingest(map_file, e))?;
    fs::write(out, render_pgm(&map)).map_err(|e| PipelineError::io(out, e))?;
    let mask = mask_path(out);
    fs::write(&mask, render_mask(&map)).map_err(|e| PipelineError::io(&mask, e))?;
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BBox, DayStamp, FipsCode, Georef};

    fn map(h: usize, w: usize, pixels: Vec<PixelState>) -> OutageMapGrid {
        let g = Georef::new(h, w, BBox::new(0.0, 0.0, w as f64, h as f64).unwrap(), 1.0).unwrap();
        OutageMapGrid::new(FipsCode::new(12071).unwrap(), DayStamp::parse("2022-09-29").unwrap(), g, pixels, None)
            .unwrap()
    }

    #[test]
    fn endpoints_and_midpoint() {
        let m = map(1, 2, vec![PixelState::Severity(0.0), PixelState::Severity(1.0)]);
        assert_eq!(render_pgm(&m), "P2\n2 1\n255\n0 255\n");
        let m = map(1, 1, vec![PixelState::Severity(0.5)]);
        assert_eq!(render_pgm(&m), "P2\n1 1\n255\n128\n");
    }

    #[test]
    fn missing_and_unlit_are_black_but_masked() {
        let m = map(2, 2, vec![PixelState::Missing; 4]);
        assert_eq!(render_pgm(&m), "P2\n2 2\n255\n0 0\n0 0\n");
        assert_eq!(render_mask(&m), "missing,missing\nmissing,missing\n");
        let m = map(1, 3, vec![PixelState::Unlit, PixelState::Missing, PixelState::Severity(0.2)]);
        assert_eq!(render_pgm(&m), "P2\n3 1\n255\n0 0 51\n");
        assert_eq!(render_mask(&m), "unlit,missing,valid\n");
    }

    #[test]
    fn mask_sits_next_to_image() {
        assert_eq!(mask_path(Path::new("out/lee.pgm")), Path::new("out/lee.mask.csv"));
    }
}
