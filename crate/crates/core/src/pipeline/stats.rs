use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use crate::kg::{geo, Vocabulary};
use crate::model::DayStamp;
use crate::rdf::{xsd, Term, RDFS_NS, RDF_NS, RDF_TYPE};
use crate::store::{Store, TermId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRow {
    pub class: String,
    pub instances: usize,
    /// Triples whose subject is an instance of the class.
    pub statements: usize,
    /// Distinct `representsCounty` objects among the instances.
    pub counties: usize,
}

impl ClassRow {
    fn new(class: String) -> Self {
        Self {
            class,
            instances: 0,
            statements: 0,
            counties: 0,
        }
    }

    pub fn mean_per_county(&self) -> f64 {
        if self.counties == 0 {
            0.0
        } else {
            self.instances as f64 / self.counties as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsTable {
    pub rows: Vec<ClassRow>,
    pub total: ClassRow,
}

impl StatsTable {
    pub fn row(&self, class: &str) -> Option<&ClassRow> {
        self.rows.iter().find(|r| r.class == class)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        w.write_record(["class", "instances", "statements", "counties", "mean_per_county"])?;
        for r in self.rows.iter().chain([&self.total]) {
            w.write_record([
                r.class.clone(),
                r.instances.to_string(),
                r.statements.to_string(),
                r.counties.to_string(),
                format!("{:.2}", r.mean_per_county()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearRow {
    pub year: i32,
    pub class: String,
    pub instances: usize,
    pub counties: usize,
}

impl YearRow {
    pub fn mean_per_county(&self) -> f64 {
        if self.counties == 0 {
            0.0
        } else {
            self.instances as f64 / self.counties as f64
        }
    }
}

pub fn write_year_csv<W: Write>(rows: &[YearRow], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(["year", "class", "instances", "counties", "mean_per_county"])?;
    for r in rows {
        w.write_record([
            r.year.to_string(),
            r.class.clone(),
            r.instances.to_string(),
            r.counties.to_string(),
            format!("{:.2}", r.mean_per_county()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const CORE_CLASSES: [&str; 3] = [geo::OUTAGE_RECORD, geo::NTL_IMAGE, geo::OUTAGE_MAP];

fn class_name(iri: &str, vocab: &Vocabulary) -> String {
    match iri.strip_prefix(vocab.geo.as_str()) {
        Some(local) if !local.is_empty() => local.to_string(),
        _ => vocab.prefix_map().compact(iri).unwrap_or_else(|| iri.to_string()),
    }
}

/// (class IRI, instance ids) for every class with instances. Schema
/// declarations (`rdfs:Class`, `rdf:Property` subjects) are not instances.
fn instances_by_class(store: &Store) -> BTreeMap<String, Vec<TermId>> {
    let dict = store.dictionary();
    let mut out: BTreeMap<String, Vec<TermId>> = BTreeMap::new();
    let Some(rdf_type) = dict.id(&Term::iri(RDF_TYPE)) else {
        return out;
    };
    let meta = [format!("{RDFS_NS}Class"), format!("{RDF_NS}Property")];
    for [s, _, o] in store.match_ids([None, Some(rdf_type), None]) {
        if let Some(class) = dict.term(o).as_iri() {
            if !meta.iter().any(|m| m == class) {
                out.entry(class.to_string()).or_default().push(s);
            }
        }
    }
    out
}

fn ordered_classes(found: &BTreeMap<String, Vec<TermId>>, vocab: &Vocabulary) -> Vec<String> {
    let core: Vec<String> = CORE_CLASSES.iter().map(|c| vocab.geo(c)).collect();
    let mut order = core.clone();
    order.extend(found.keys().filter(|k| !core.contains(k)).cloned());
    order
}

/// Per-class instance and statement counts, plus a total row over distinct
/// instances. The three core classes are always listed.
pub fn class_stats(store: &Store, vocab: &Vocabulary) -> StatsTable {
    let dict = store.dictionary();
    let found = instances_by_class(store);
    let county_pred = dict.id(&Term::iri(vocab.geo(geo::REPRESENTS_COUNTY)));
    let counties_of = |s: TermId| -> Vec<TermId> {
        county_pred.map_or(Vec::new(), |p| store.match_ids([Some(s), Some(p), None]).map(|t| t[2]).collect())
    };

    let mut rows = Vec::new();
    let mut all_subjects = BTreeSet::new();
    for class in ordered_classes(&found, vocab) {
        let mut row = ClassRow::new(class_name(&class, vocab));
        let mut counties = BTreeSet::new();
        for &s in found.get(&class).map(Vec::as_slice).unwrap_or(&[]) {
            row.instances += 1;
            row.statements += store.count_ids([Some(s), None, None]);
            counties.extend(counties_of(s));
            all_subjects.insert(s);
        }
        row.counties = counties.len();
        rows.push(row);
    }
    let mut total = ClassRow::new("total".into());
    let mut counties = BTreeSet::new();
    for &s in &all_subjects {
        total.instances += 1;
        total.statements += store.count_ids([Some(s), None, None]);
        counties.extend(counties_of(s));
    }
    total.counties = counties.len();
    StatsTable { rows, total }
}

/// Instances per (year of `hasDate`, class). Instances without a date are skipped.
pub fn year_stats(store: &Store, vocab: &Vocabulary) -> Vec<YearRow> {
    let dict = store.dictionary();
    let found = instances_by_class(store);
    let (Some(date_pred), county_pred) = (
        dict.id(&Term::iri(vocab.geo(geo::HAS_DATE))),
        dict.id(&Term::iri(vocab.geo(geo::REPRESENTS_COUNTY))),
    ) else {
        return Vec::new();
    };
    let classes = ordered_classes(&found, vocab);
    let mut cells: HashMap<(i32, usize), (usize, BTreeSet<TermId>)> = HashMap::new();
    for (ci, class) in classes.iter().enumerate() {
        for &s in found.get(class).map(Vec::as_slice).unwrap_or(&[]) {
            let year = store
                .match_ids([Some(s), Some(date_pred), None])
                .map(|t| dict.term(t[2]))
                .find(|t| t.datatype() == Some(xsd::DATE))
                .and_then(|t| DayStamp::parse(t.lexical()).ok())
                .map(|d| d.year());
            if let Some(year) = year {
                let cell = cells.entry((year, ci)).or_default();
                cell.0 += 1;
                if let Some(p) = county_pred {
                    cell.1.extend(store.match_ids([Some(s), Some(p), None]).map(|t| t[2]));
                }
            }
        }
    }
    let mut keys: Vec<_> = cells.keys().copied().collect();
    keys.sort();
    keys.into_iter()
        .map(|(year, ci)| {
            let (instances, counties) = &cells[&(year, ci)];
            YearRow {
                year,
                class: class_name(&classes[ci], vocab),
                instances: *instances,
                counties: counties.len(),
            }
        })
        .collect()
}
