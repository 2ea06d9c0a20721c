use std::collections::HashMap;
use std::io::Read;

use super::IngestError;
use crate::model::{BBox, CountyMeta, FipsCode};

const FLORIDA_CSV: &str = include_str!("../../data/florida_counties.csv");

const COLUMNS: [&str; 7] = ["fips", "name", "state", "min_lon", "min_lat", "max_lon", "max_lat"];

/// Counties in input order, keyed by FIPS code.
#[derive(Debug, Clone, Default)]
pub struct CountyRegistry {
    counties: Vec<CountyMeta>,
    index: HashMap<FipsCode, usize>,
}

impl CountyRegistry {
    pub fn new(counties: Vec<CountyMeta>) -> Result<Self, IngestError> {
        let mut index = HashMap::with_capacity(counties.len());
        for (i, c) in counties.iter().enumerate() {
            if index.insert(c.fips, i).is_some() {
                return Err(IngestError::DuplicateFips(c.fips));
            }
        }
        Ok(Self { counties, index })
    }

    /// The 67 Florida counties with approximate bounding boxes.
    pub fn florida() -> Self {
        Self::from_csv(FLORIDA_CSV.as_bytes()).expect("bundled registry is valid")
    }

    /// Reads `fips,name,state,min_lon,min_lat,max_lon,max_lat` (columns by name).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let mut cols = [0usize; 7];
        for (slot, name) in cols.iter_mut().zip(COLUMNS) {
            *slot = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::Format(format!("county registry lacks column {name:?}")))?;
        }
        let mut counties = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let err = |message: String| IngestError::Registry { line, message };
            let fips: FipsCode = rec[cols[0]].parse().map_err(|e| err(format!("{e}")))?;
            let mut coords = [0f64; 4];
            for (k, c) in coords.iter_mut().enumerate() {
                let field = &rec[cols[3 + k]];
                *c = field
                    .parse()
                    .map_err(|_| err(format!("invalid coordinate {field:?} in column {}", COLUMNS[3 + k])))?;
            }
            let bbox = BBox::new(coords[0], coords[1], coords[2], coords[3]).map_err(|e| err(e.to_string()))?;
            let county = CountyMeta::new(fips, &rec[cols[1]], &rec[cols[2]], bbox).map_err(|e| err(e.to_string()))?;
            counties.push(county);
        }
        Self::new(counties)
    }

    pub fn get(&self, fips: FipsCode) -> Option<&CountyMeta> {
        self.index.get(&fips).map(|&i| &self.counties[i])
    }

    pub fn contains(&self, fips: FipsCode) -> bool {
        self.index.contains_key(&fips)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountyMeta> {
        self.counties.iter()
    }

    pub fn len(&self) -> usize {
        self.counties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counties.is_empty()
    }
}
