//! End-to-end orchestration behind the command-line tool.

mod build;
mod export;
mod stats;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{read_ntl_grid, segment_by_bbox, CountyRegistry, IngestError, NTL_EXTENSION};
use crate::kg::{KgConfig, KgError};
use crate::model::{DayStamp, FipsCode, RadianceGrid};
use crate::rdf::Triple;
use crate::severity::SeverityError;
use crate::store::{evaluate, parse_query_with, QueryError, Store};
use crate::turtle::{self, TurtleError};

pub use build::{
    assemble, cmd_build, derive_event_maps, map_locator, ntl_locator, write_county_grids, write_map_files,
    BuildManifest, BuildOutput, BuildReport, ClassCount, IMAGES_FILE, MAPS_FILE, OUTPUT_FILES, RECORDS_FILE,
    REPORT_FILE, SCHEMA_FILE,
};
pub use export::{export_map, mask_path, render_mask, render_pgm};
pub use stats::{class_stats, write_year_csv, year_stats, ClassRow, StatsTable, YearRow};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{}: {source}", path.display())]
    Turtle { path: PathBuf, source: TurtleError },
    #[error("{context}: {source}")]
    Kg { context: String, source: KgError },
    #[error("{context}: {source}")]
    Severity { context: String, source: SeverityError },
    #[error("{0}")]
    Data(String),
}

impl PipelineError {
    /// 2 for usage and query errors, 1 for everything about the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) | PipelineError::Query(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn ingest(path: &Path, source: IngestError) -> Self {
        PipelineError::Ingest {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

/// `LABEL:YYYY-MM-DD`; the label may itself contain colons.
pub fn parse_event(spec: &str) -> Result<(String, DayStamp)> {
    let (label, date) = spec
        .rsplit_once(':')
        .ok_or_else(|| PipelineError::Usage(format!("event {spec:?} is not LABEL:YYYY-MM-DD")))?;
    if label.trim().is_empty() {
        return Err(PipelineError::Usage(format!("event {spec:?} has an empty label")));
    }
    let date = DayStamp::parse(date).map_err(|e| PipelineError::Usage(format!("event {spec:?}: {e}")))?;
    Ok((label.to_string(), date))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

pub fn load_registry(path: Option<&Path>) -> Result<CountyRegistry> {
    match path {
        None => Ok(CountyRegistry::florida()),
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| PipelineError::io(p, e))?;
            CountyRegistry::from_csv(f).map_err(|e| PipelineError::ingest(p, e))
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<KgConfig> {
    match path {
        None => Ok(KgConfig::default()),
        Some(p) => KgConfig::parse(&read_file(p)?).map_err(|source| PipelineError::Kg {
            context: p.display().to_string(),
            source,
        }),
    }
}

fn collect_files(dir: &Path, suffix: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| PipelineError::io(dir, e))?;
        let path = entry.path();
        let ty = entry.file_type().map_err(|e| PipelineError::io(&path, e))?;
        if ty.is_dir() {
            collect_files(&path, suffix, out)?;
        } else if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(suffix)) {
            out.push(path);
        }
    }
    Ok(())
}

/// Files under `dir` (recursively) whose names end in `suffix`, sorted.
pub fn files_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    collect_files(dir, suffix, &mut out)?;
    out.sort();
    Ok(out)
}

/// County-level grids from every `.ntl.csv` under `dir`.
///
/// A grid whose FIPS code has county part `000` is a statewide raster and is
/// clipped to each registry county it covers. Any other grid must name a
/// registry county. Output is sorted by (fips, date); a repeated pair is an error.
pub fn load_county_grids(dir: &Path, registry: &CountyRegistry) -> Result<Vec<RadianceGrid>> {
    let files = files_with_suffix(dir, NTL_EXTENSION)?;
    let per_file: Vec<Result<Vec<RadianceGrid>>> = files
        .par_iter()
        .map(|path| {
            let f = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
            let grid = read_ntl_grid(io::BufReader::new(f)).map_err(|e| PipelineError::ingest(path, e))?;
            if grid.fips.value() % 1000 == 0 {
                let mut out = Vec::new();
                for county in registry.iter().filter(|c| c.bbox.intersects(&grid.georef.bbox)) {
                    match segment_by_bbox(&grid, county) {
                        Ok(g) => out.push(g),
                        Err(IngestError::CountyOutsideRaster(_)) => {}
                        Err(e) => return Err(PipelineError::ingest(path, e)),
                    }
                }
                Ok(out)
            } else if registry.contains(grid.fips) {
                Ok(vec![grid])
            } else {
                Err(PipelineError::Data(format!(
                    "{}: fips {} is not in the county registry",
                    path.display(),
                    grid.fips
                )))
            }
        })
        .collect();
    let mut grids = Vec::new();
    for r in per_file {
        grids.extend(r?);
    }
    grids.sort_by_key(|g| (g.fips, g.date));
    if let Some(w) = grids.windows(2).find(|w| (w[0].fips, w[0].date) == (w[1].fips, w[1].date)) {
        return Err(PipelineError::Data(format!(
            "two NTL grids for county {} on {}",
            w[0].fips, w[0].date
        )));
    }
    Ok(grids)
}

/// Grids grouped per county, each group in date order.
pub fn group_by_county(grids: &[RadianceGrid]) -> Vec<(FipsCode, &[RadianceGrid])> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=grids.len() {
        if i == grids.len() || grids[i].fips != grids[start].fips {
            if i > start {
                out.push((grids[start].fips, &grids[start..i]));
            }
            start = i;
        }
    }
    out
}

/// Turtle files named on the command line; directories contribute their
/// `.ttl` files.
pub fn expand_ttl_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(files_with_suffix(p, ".ttl")?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn load_triples(paths: &[PathBuf]) -> Result<Vec<Triple>> {
    let files = expand_ttl_paths(paths)?;
    let parsed: Vec<Result<Vec<Triple>>> = files
        .par_iter()
        .map(|path| {
            let text = read_file(path)?;
            let (triples, _) = turtle::parse(&text).map_err(|source| PipelineError::Turtle {
                path: path.clone(),
                source,
            })?;
            Ok(triples.into_iter().collect())
        })
        .collect();
    let mut all = Vec::new();
    for r in parsed {
        all.extend(r?);
    }
    Ok(all)
}

pub fn load_store(paths: &[PathBuf]) -> Result<Store> {
    Ok(Store::from_triples(load_triples(paths)?))
}

/// Runs `query_text` against the dumps and writes CSV.
pub fn cmd_query(paths: &[PathBuf], query_text: &str, config: &KgConfig, out: impl io::Write) -> Result<usize> {
    let query = parse_query_with(query_text, &config.vocab.prefix_map())?;
    let store = load_store(paths)?;
    let table = evaluate(&store, &query);
    table
        .write_csv(out)
        .map_err(|e| PipelineError::Data(format!("writing query result: {e}")))?;
    Ok(table.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_specs() {
        let (label, d) = parse_event("Hurricane Ian:2022-09-28").unwrap();
        assert_eq!(label, "Hurricane Ian");
        assert_eq!(d.to_string(), "2022-09-28");
        assert_eq!(parse_event("a:b:2020-01-01").unwrap().0, "a:b");
        for bad in ["Ian", ":2022-09-28", "Ian:2022-13-01"] {
            assert_eq!(parse_event(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }
}
