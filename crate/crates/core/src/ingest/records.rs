use std::collections::HashSet;
use std::io::{Read, Write};

use serde::Serialize;

use super::{CountyRegistry, IngestError};
use crate::model::{FipsCode, OutageRecordRow, TimeStamp};

pub const RECORD_COLUMNS: [&str; 5] = ["fips_code", "county", "state", "customers_out", "run_start_time"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows_accepted: usize,
    pub rows_rejected: usize,
    /// (line number, message); rejections and accepted-with-warning rows alike.
    pub warnings: Vec<(u64, String)>,
}

impl IngestReport {
    pub fn rows_read(&self) -> usize {
        self.rows_accepted + self.rows_rejected
    }
}

fn resolve_columns(headers: &csv::StringRecord) -> Result<[usize; 5], IngestError> {
    let mut cols = [0usize; 5];
    for (slot, name) in cols.iter_mut().zip(RECORD_COLUMNS) {
        let mut hits = headers.iter().enumerate().filter(|(_, h)| *h == name);
        *slot = match (hits.next(), hits.next()) {
            (Some((i, _)), None) => i,
            (None, _) => return Err(IngestError::Format(format!("missing column {name:?}"))),
            (Some(_), Some(_)) => return Err(IngestError::Format(format!("duplicate column {name:?}"))),
        };
    }
    Ok(cols)
}

fn parse_row(rec: &csv::StringRecord, cols: &[usize; 5], registry: &CountyRegistry) -> Result<OutageRecordRow, String> {
    let field = |i: usize| rec.get(cols[i]).unwrap_or("");
    let fips: FipsCode = field(0).parse().map_err(|_| format!("invalid fips {:?}", field(0)))?;
    if !registry.contains(fips) {
        return Err(format!("unknown fips {fips}"));
    }
    let raw = field(3);
    let customers_out = match raw.parse::<i64>() {
        Ok(n) if n < 0 => return Err(format!("negative customers_out {n}")),
        Ok(n) => n as u64,
        Err(_) => return Err(format!("invalid customers_out {raw:?}")),
    };
    let run_start_time =
        TimeStamp::parse(field(4)).map_err(|e| format!("invalid run_start_time: {e}"))?;
    Ok(OutageRecordRow {
        fips,
        county: field(1).to_string(),
        state: field(2).to_string(),
        customers_out,
        run_start_time,
    })
}

/// Parses an outage-record CSV. Columns are matched by header name.
///
/// Bad rows are rejected and reported by line; only header problems and I/O
/// failures abort the parse.
pub fn parse_record_csv<R: Read>(
    reader: R,
    registry: &CountyRegistry,
) -> Result<(Vec<OutageRecordRow>, IngestReport), IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols = resolve_columns(&headers)?;

    let mut rows = Vec::new();
    let mut report = IngestReport::default();
    let mut rec = csv::StringRecord::new();
    let mut seen = HashSet::new();
    loop {
        let line_hint = rdr.position().line();
        match rdr.read_record(&mut rec) {
            Ok(false) => break,
            Ok(true) => {
                let line = rec.position().map_or(line_hint, |p| p.line());
                if rec.len() != headers.len() {
                    report.rows_rejected += 1;
                    report
                        .warnings
                        .push((line, format!("expected {} fields, found {}", headers.len(), rec.len())));
                    continue;
                }
                match parse_row(&rec, &cols, registry) {
                    Ok(row) if !seen.insert((row.fips, row.run_start_time)) => {
                        report.rows_rejected += 1;
                        report.warnings.push((
                            line,
                            format!("duplicate record for fips {} at {}", row.fips, row.run_start_time),
                        ));
                    }
                    Ok(row) => {
                        if !row.run_start_time.is_quarter_hour() {
                            report.warnings.push((
                                line,
                                format!("run_start_time {} is not on a 15-minute boundary", row.run_start_time),
                            ));
                        }
                        report.rows_accepted += 1;
                        rows.push(row);
                    }
                    Err(msg) => {
                        report.rows_rejected += 1;
                        report.warnings.push((line, msg));
                    }
                }
            }
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                let line = e.position().map_or(line_hint, |p| p.line());
                report.rows_rejected += 1;
                report.warnings.push((line, format!("unreadable row: {e}")));
            }
        }
    }
    Ok((rows, report))
}

/// Writes rows back out with canonical `xsd:dateTime` timestamps.
pub fn write_record_csv<W: Write>(writer: W, rows: &[OutageRecordRow]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.fips.to_string(),
            r.county.clone(),
            r.state.clone(),
            r.customers_out.to_string(),
            r.run_start_time.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
