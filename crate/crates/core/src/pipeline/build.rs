use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{group_by_county, load_config, load_county_grids, load_registry, PipelineError, Result};
use crate::ingest::{parse_record_csv, write_map_grid, write_ntl_grid, IngestError, IngestReport, MAP_EXTENSION, NTL_EXTENSION};
use crate::kg::{geo, ExternalLinks, KgBuilder, KgError};
use crate::model::{DayStamp, FipsCode, OutageMapGrid, OutageRecordRow, RadianceGrid};
use crate::rdf::Triple;
use crate::severity::{derive_map, event_window, EventWindow, SeverityParams};
use crate::turtle::serialize;

pub const SCHEMA_FILE: &str = "schema.ttl";
pub const RECORDS_FILE: &str = "outagerecords.ttl";
pub const IMAGES_FILE: &str = "ntlimages.ttl";
pub const MAPS_FILE: &str = "outagemaps.ttl";
pub const REPORT_FILE: &str = "build-report.json";
pub const OUTPUT_FILES: [&str; 4] = [SCHEMA_FILE, RECORDS_FILE, IMAGES_FILE, MAPS_FILE];

/// Everything a build needs. Optional inputs default to empty, the Florida
/// registry and the default vocabulary.
#[derive(Debug, Clone)]
pub struct BuildManifest {
    pub records: Option<PathBuf>,
    pub ntl_dir: Option<PathBuf>,
    pub counties: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub events: Vec<(String, DayStamp)>,
    pub params: SeverityParams,
}

impl BuildManifest {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            records: None,
            ntl_dir: None,
            counties: None,
            config: None,
            out_dir: out_dir.into(),
            events: Vec::new(),
            params: SeverityParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.window_days < p.min_valid {
            return Err(PipelineError::Usage(format!(
                "window_days ({}) must be at least min_valid ({})",
                p.window_days, p.min_valid
            )));
        }
        if !(p.dim_threshold.is_finite() && p.dim_threshold >= 0.0) {
            return Err(PipelineError::Usage(format!("dim_threshold must be a nonnegative number, got {}", p.dim_threshold)));
        }
        for path in [&self.records, &self.counties, &self.config].into_iter().flatten() {
            if !path.is_file() {
                return Err(PipelineError::Data(format!("{}: no such file", path.display())));
            }
        }
        if let Some(d) = &self.ntl_dir {
            if !d.is_dir() {
                return Err(PipelineError::Data(format!("{}: no such directory", d.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub instances: usize,
    pub statements: usize,
}

/// Written as JSON next to the dumps. Holds no paths or clock readings, so
/// identical inputs give an identical report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub classes: BTreeMap<String, ClassCount>,
    pub schema_triples: usize,
    pub records: IngestReport,
    pub ntl_grids: usize,
    pub events: Vec<EventWindow>,
    pub params: SeverityParams,
    /// SHA-256 of each Turtle file.
    pub files: BTreeMap<String, String>,
}

/// Emitted triples for one build, per output file.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub schema: Vec<Triple>,
    pub records: Vec<Triple>,
    pub images: Vec<Triple>,
    pub maps: Vec<Triple>,
    pub classes: BTreeMap<String, ClassCount>,
}

pub fn ntl_locator(fips: FipsCode, date: DayStamp) -> String {
    format!("ntl/{fips}/{date}{NTL_EXTENSION}")
}

pub fn map_locator(fips: FipsCode, date: DayStamp) -> String {
    format!("maps/{fips}/{date}{MAP_EXTENSION}")
}

/// Outage maps for every county night inside an event window. A night inside
/// several windows belongs to the first event listed.
pub fn derive_event_maps(
    grids: &[RadianceGrid],
    events: &[(String, DayStamp)],
    params: &SeverityParams,
) -> Result<Vec<OutageMapGrid>> {
    let windows: Vec<EventWindow> = events.iter().map(|(l, d)| event_window(l, *d)).collect();
    let mut jobs = Vec::new();
    for (_, history) in group_by_county(grids) {
        for g in history {
            if let Some(w) = windows.iter().find(|w| w.contains(g.date)) {
                jobs.push((g, history, w.event_label.as_str()));
            }
        }
    }
    jobs.par_iter()
        .map(|(g, history, label)| {
            derive_map(g, history, params, Some(label)).map_err(|source| PipelineError::Severity {
                context: format!("outage map for {} on {}", g.fips, g.date),
                source,
            })
        })
        .collect()
}

fn emit_all<T: Sync>(
    items: &[T],
    emit: impl Fn(&T) -> std::result::Result<Vec<Triple>, KgError> + Sync + Send,
    describe: impl Fn(&T) -> String + Sync + Send,
) -> Result<Vec<Triple>> {
    let parts: Vec<Vec<Triple>> = items
        .par_iter()
        .map(|x| emit(x).map_err(|source| PipelineError::Kg { context: describe(x), source }))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Schema plus instance triples for the given records, images and maps.
pub fn assemble(
    builder: &KgBuilder,
    records: &[OutageRecordRow],
    grids: &[RadianceGrid],
    maps: &[OutageMapGrid],
) -> Result<BuildOutput> {
    let record_triples = emit_all(records, |r| builder.emit_record(r), |r| {
        format!("outage record {} at {}", r.fips, r.run_start_time)
    })?;
    let image_triples = emit_all(
        grids,
        |g| builder.emit_image(g, &ntl_locator(g.fips, g.date)),
        |g| format!("NTL image {} on {}", g.fips, g.date),
    )?;
    let map_triples = emit_all(
        maps,
        |m| builder.emit_map(m, &map_locator(m.fips, m.date)),
        |m| format!("outage map {} on {}", m.fips, m.date),
    )?;
    let mut classes = BTreeMap::new();
    for (name, n, triples) in [
        (geo::OUTAGE_RECORD, records.len(), &record_triples),
        (geo::NTL_IMAGE, grids.len(), &image_triples),
        (geo::OUTAGE_MAP, maps.len(), &map_triples),
    ] {
        classes.insert(
            name.to_string(),
            ClassCount {
                instances: n,
                statements: triples.len(),
            },
        );
    }
    Ok(BuildOutput {
        schema: builder.emit_schema(),
        records: record_triples,
        images: image_triples,
        maps: map_triples,
        classes,
    })
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) => fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e)),
        None => Ok(()),
    }
}

fn write_grid_file<T: Sync>(
    out_dir: &Path,
    items: &[T],
    locate: impl Fn(&T) -> String + Sync,
    write: impl Fn(BufWriter<fs::File>, &T) -> std::result::Result<(), IngestError> + Sync,
) -> Result<()> {
    items.par_iter().try_for_each(|item| {
        let path = out_dir.join(locate(item));
        create_parent(&path)?;
        let f = fs::File::create(&path).map_err(|e| PipelineError::io(&path, e))?;
        write(BufWriter::new(f), item).map_err(|e| PipelineError::ingest(&path, e))
    })
}

/// Writes each grid to `out_dir/ntl/<fips>/<date>.ntl.csv`.
pub fn write_county_grids(out_dir: &Path, grids: &[RadianceGrid]) -> Result<()> {
    write_grid_file(out_dir, grids, |g| ntl_locator(g.fips, g.date), write_ntl_grid)
}

/// Writes each map to `out_dir/maps/<fips>/<date>.map.csv`.
pub fn write_map_files(out_dir: &Path, maps: &[OutageMapGrid]) -> Result<()> {
    write_grid_file(out_dir, maps, |m| map_locator(m.fips, m.date), write_map_grid)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| PipelineError::io(path, e))
}

/// Runs the whole pipeline and writes dumps, grid files and the report.
pub fn cmd_build(manifest: &BuildManifest) -> Result<BuildReport> {
    manifest.validate()?;
    let registry = load_registry(manifest.counties.as_deref())?;
    let config = load_config(manifest.config.as_deref())?;
    let links = ExternalLinks::new(&config, &registry).map_err(|source| PipelineError::Kg {
        context: "external links".into(),
        source,
    })?;
    let builder = KgBuilder::new(config.vocab.clone(), links);

    let (records, ingest_report) = match &manifest.records {
        Some(path) => {
            let f = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
            parse_record_csv(std::io::BufReader::new(f), &registry).map_err(|e| PipelineError::ingest(path, e))?
        }
        None => (Vec::new(), IngestReport::default()),
    };
    let grids = match &manifest.ntl_dir {
        Some(dir) => load_county_grids(dir, &registry)?,
        None => Vec::new(),
    };
    let maps = derive_event_maps(&grids, &manifest.events, &manifest.params)?;
    let output = assemble(&builder, &records, &grids, &maps)?;

    let out = &manifest.out_dir;
    fs::create_dir_all(out).map_err(|e| PipelineError::io(out, e))?;
    write_county_grids(out, &grids)?;
    write_map_files(out, &maps)?;

    let prefixes = config.vocab.prefix_map();
    let mut files = BTreeMap::new();
    for (name, triples) in [
        (SCHEMA_FILE, &output.schema),
        (RECORDS_FILE, &output.records),
        (IMAGES_FILE, &output.images),
        (MAPS_FILE, &output.maps),
    ] {
        let text = serialize(triples.iter(), &prefixes);
        write_bytes(&out.join(name), text.as_bytes())?;
        files.insert(name.to_string(), hex::encode(Sha256::digest(text.as_bytes())));
    }

    let report = BuildReport {
        classes: output.classes,
        schema_triples: output.schema.len(),
        records: ingest_report,
        ntl_grids: grids.len(),
        events: manifest.events.iter().map(|(l, d)| event_window(l, *d)).collect(),
        params: manifest.params,
        files,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_bytes(&out.join(REPORT_FILE), json.as_bytes())?;
    Ok(report)
}
