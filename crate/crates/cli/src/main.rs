use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use outagekg_core::ingest::{parse_record_csv, write_record_csv, IngestReport};
use outagekg_core::model::DayStamp;
use outagekg_core::pipeline::{
    self, class_stats, cmd_build, derive_event_maps, export_map, load_config, load_county_grids, load_registry,
    load_store, map_locator, parse_event, write_county_grids, write_map_files, write_year_csv, year_stats,
    BuildManifest, PipelineError,
};
use outagekg_core::severity::{mean_severity, SeverityParams, DEFAULT_DIM_THRESHOLD, DEFAULT_MIN_VALID, DEFAULT_WINDOW_DAYS};

#[derive(Parser)]
#[command(name = "outagekg", version, about = "Build and query a power-outage knowledge graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an outage-record CSV and report rejected rows
    IngestRecords {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        counties: Option<PathBuf>,
        /// Write accepted rows and the report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read NTL grids, clip statewide rasters to counties, write county grids
    IngestNtl {
        #[arg(long)]
        ntl_dir: PathBuf,
        #[arg(long)]
        counties: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive outage maps for nights inside event windows
    OutageMaps {
        #[arg(long)]
        ntl_dir: PathBuf,
        #[arg(long)]
        counties: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        severity: SeverityArgs,
    },
    /// Run the full pipeline and write Turtle dumps plus a build report
    Build {
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        ntl_dir: Option<PathBuf>,
        #[arg(long)]
        counties: Option<PathBuf>,
        /// key = value vocabulary and link settings
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        severity: SeverityArgs,
    },
    /// Instance and statement counts per class
    Stats {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Break instance counts down by year
        #[arg(long)]
        by_year: bool,
        /// Turtle files or directories of them
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Run a SELECT query over Turtle dumps, CSV to stdout
    Query {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Render an outage map file as a PGM image with a validity mask
    ExportMap {
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SeverityArgs {
    /// LABEL:YYYY-MM-DD landfall; repeatable
    #[arg(long = "event", value_parser = event_arg)]
    events: Vec<(String, DayStamp)>,
    #[arg(long, default_value_t = DEFAULT_WINDOW_DAYS)]
    window_days: u32,
    #[arg(long, default_value_t = DEFAULT_MIN_VALID)]
    min_valid: u32,
    #[arg(long, default_value_t = DEFAULT_DIM_THRESHOLD)]
    dim_threshold: f64,
}

impl SeverityArgs {
    fn params(&self) -> SeverityParams {
        SeverityParams {
            window_days: self.window_days,
            min_valid: self.min_valid,
            dim_threshold: self.dim_threshold,
        }
    }
}

fn event_arg(s: &str) -> Result<(String, DayStamp), String> {
    parse_event(s).map_err(|e| e.to_string())
}

fn stdout_csv(r: Result<(), csv::Error>) -> pipeline::Result<()> {
    r.map_err(|e| PipelineError::Data(format!("writing output: {e}")))
}

fn print_warnings(report: &IngestReport, source: &Path) {
    for (line, msg) in &report.warnings {
        eprintln!("{}:{line}: {msg}", source.display());
    }
}

fn ingest_records(records: &Path, counties: Option<&Path>, out: Option<&Path>) -> pipeline::Result<()> {
    let registry = load_registry(counties)?;
    let f = fs::File::open(records).map_err(|e| PipelineError::Io { path: records.into(), source: e })?;
    let (rows, report) = parse_record_csv(io::BufReader::new(f), &registry)
        .map_err(|e| PipelineError::Ingest { path: records.into(), source: e })?;
    print_warnings(&report, records);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| PipelineError::Io { path: dir.into(), source: e })?;
        let path = dir.join("records.csv");
        let f = fs::File::create(&path).map_err(|e| PipelineError::Io { path: path.clone(), source: e })?;
        write_record_csv(io::BufWriter::new(f), &rows).map_err(|e| PipelineError::Ingest { path: path.clone(), source: e })?;
        let path = dir.join("ingest-report.json");
        fs::write(&path, format!("{json}\n")).map_err(|e| PipelineError::Io { path, source: e })?;
    }
    println!("{json}");
    Ok(())
}

fn run(cli: Cli) -> pipeline::Result<()> {
    match cli.command {
        Command::IngestRecords { records, counties, out } => ingest_records(&records, counties.as_deref(), out.as_deref()),
        Command::IngestNtl { ntl_dir, counties, out } => {
            let registry = load_registry(counties.as_deref())?;
            let grids = load_county_grids(&ntl_dir, &registry)?;
            write_county_grids(&out, &grids)?;
            println!("{} county grids written", grids.len());
            Ok(())
        }
        Command::OutageMaps { ntl_dir, counties, out, severity } => {
            let params = severity.params();
            let mut manifest = BuildManifest::new(&out);
            manifest.params = params;
            manifest.validate()?;
            if severity.events.is_empty() {
                return Err(PipelineError::Usage("at least one --event is required".into()));
            }
            let registry = load_registry(counties.as_deref())?;
            let grids = load_county_grids(&ntl_dir, &registry)?;
            let maps = derive_event_maps(&grids, &severity.events, &params)?;
            write_map_files(&out, &maps)?;
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(io::stdout());
            let rows = (|| {
                w.write_record(["fips", "date", "event", "mean_severity", "file"])?;
                for m in &maps {
                    w.write_record([
                        m.fips.to_string(),
                        m.date.to_string(),
                        m.event_label.clone().unwrap_or_default(),
                        format!("{}", mean_severity(m)),
                        map_locator(m.fips, m.date),
                    ])?;
                }
                w.flush().map_err(csv::Error::from)
            })();
            stdout_csv(rows)
        }
        Command::Build { records, ntl_dir, counties, config, out, severity } => {
            let manifest = BuildManifest {
                records,
                ntl_dir,
                counties,
                config,
                out_dir: out,
                events: severity.events.clone(),
                params: severity.params(),
            };
            let report = cmd_build(&manifest)?;
            if let Some(path) = &manifest.records {
                print_warnings(&report.records, path);
            }
            for (class, c) in &report.classes {
                println!("{class}: {} instances, {} statements", c.instances, c.statements);
            }
            Ok(())
        }
        Command::Stats { config, by_year, inputs } => {
            let vocab = load_config(config.as_deref())?.vocab;
            let store = load_store(&inputs)?;
            if by_year {
                stdout_csv(write_year_csv(&year_stats(&store, &vocab), io::stdout()))
            } else {
                stdout_csv(class_stats(&store, &vocab).write_csv(io::stdout()))
            }
        }
        Command::Query { query, config, inputs } => {
            let config = load_config(config.as_deref())?;
            let text = fs::read_to_string(&query).map_err(|e| PipelineError::Io { path: query.clone(), source: e })?;
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            pipeline::cmd_query(&inputs, &text, &config, &mut lock)?;
            lock.flush().map_err(|e| PipelineError::Data(format!("writing output: {e}")))?;
            Ok(())
        }
        Command::ExportMap { map, out } => {
            let mask = export_map(&map, &out)?;
            eprintln!("wrote {} and {}", out.display(), mask.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
