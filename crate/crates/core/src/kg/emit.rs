use super::vocab::{geo, ma, ExternalLinks, Vocabulary};
use super::KgError;
use crate::model::iri::{mint_image_iri, mint_map_iri, mint_record_iri};
use crate::model::{FipsCode, OutageMapGrid, OutageRecordRow, RadianceGrid};
use crate::rdf::{canonical_decimal, xsd, Term, Triple, RDF_TYPE};
use crate::severity::mean_severity;

pub const PRODUCT_NAME: &str = "VNP46A2";
pub const LAYER_NAME: &str = "Gap_Filled_DNB_BRDF-Corrected_NTL";

/// Triples per instance of each class.
pub const RECORD_TRIPLES: usize = 8;
pub const IMAGE_TRIPLES: usize = 10;
pub const MAP_TRIPLES: usize = 9;

/// Emits schema and instance triples under one vocabulary.
#[derive(Debug, Clone)]
pub struct KgBuilder {
    vocab: Vocabulary,
    links: ExternalLinks,
}

struct PropertyDecl {
    local: &'static str,
    label: &'static str,
    domain: Option<&'static str>,
    range: Range,
}

enum Range {
    None,
    Geo(&'static str),
    Dbo(&'static str),
    Xsd(&'static str),
}

const PROPERTIES: &[PropertyDecl] = &[
    PropertyDecl { local: geo::REPRESENTS_COUNTY, label: "represents county", domain: None, range: Range::Dbo("AdministrativeRegion") },
    PropertyDecl { local: geo::HAS_DATE, label: "has date", domain: None, range: Range::Xsd(xsd::DATE) },
    PropertyDecl { local: geo::FIPS_CODE, label: "FIPS code", domain: Some(geo::OUTAGE_RECORD), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::COUNTY_NAME, label: "county name", domain: Some(geo::OUTAGE_RECORD), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::STATE_NAME, label: "state name", domain: Some(geo::OUTAGE_RECORD), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::CUSTOMERS_OUT, label: "customers out", domain: Some(geo::OUTAGE_RECORD), range: Range::Xsd(xsd::INTEGER) },
    PropertyDecl { local: geo::RUN_START_TIME, label: "run start time", domain: Some(geo::OUTAGE_RECORD), range: Range::Xsd(xsd::DATE_TIME) },
    PropertyDecl { local: geo::FROM_SATELLITE, label: "from satellite", domain: Some(geo::NTL_IMAGE), range: Range::None },
    PropertyDecl { local: geo::FROM_SENSOR, label: "from sensor", domain: Some(geo::NTL_IMAGE), range: Range::None },
    PropertyDecl { local: geo::PRODUCT_NAME, label: "product name", domain: Some(geo::NTL_IMAGE), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::LAYER_NAME, label: "layer name", domain: Some(geo::NTL_IMAGE), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::DERIVED_FROM_IMAGE, label: "derived from image", domain: Some(geo::OUTAGE_MAP), range: Range::Geo(geo::NTL_IMAGE) },
    PropertyDecl { local: geo::EVENT_LABEL, label: "event label", domain: Some(geo::OUTAGE_MAP), range: Range::Xsd(xsd::STRING) },
    PropertyDecl { local: geo::MEAN_SEVERITY, label: "mean severity", domain: Some(geo::OUTAGE_MAP), range: Range::Xsd(xsd::DECIMAL) },
];

const CLASSES: &[(&str, &str)] = &[
    (geo::OUTAGE_RECORD, "outage record"),
    (geo::NTL_IMAGE, "nighttime light image"),
    (geo::OUTAGE_MAP, "outage map"),
];

impl KgBuilder {
    pub fn new(vocab: Vocabulary, links: ExternalLinks) -> Self {
        Self { vocab, links }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn links(&self) -> &ExternalLinks {
        &self.links
    }

    pub fn class_iri(&self, local: &str) -> String {
        self.vocab.geo(local)
    }

    /// Class and property declarations. Sorted and duplicate-free.
    pub fn emit_schema(&self) -> Vec<Triple> {
        let v = &self.vocab;
        let rdfs_class = v.rdfs("Class");
        let rdf_property = v.rdf("Property");
        let label = v.rdfs("label");
        let mut out = Vec::new();
        for (local, text) in CLASSES {
            let c = v.geo(local);
            out.push(Triple::new(&c, RDF_TYPE, Term::iri(&rdfs_class)));
            out.push(Triple::new(&c, &label, Term::plain(*text)));
        }
        for local in [geo::NTL_IMAGE, geo::OUTAGE_MAP] {
            out.push(Triple::new(v.geo(local), v.rdfs("subClassOf"), Term::iri(v.ma(ma::IMAGE))));
        }
        for p in PROPERTIES {
            let iri = v.geo(p.local);
            out.push(Triple::new(&iri, RDF_TYPE, Term::iri(&rdf_property)));
            out.push(Triple::new(&iri, &label, Term::plain(p.label)));
            if let Some(d) = p.domain {
                out.push(Triple::new(&iri, v.rdfs("domain"), Term::iri(v.geo(d))));
            }
            let range = match p.range {
                Range::None => None,
                Range::Geo(l) => Some(v.geo(l)),
                Range::Dbo(l) => Some(format!("{}{l}", v.dbo)),
                Range::Xsd(dt) => Some(dt.to_string()),
            };
            if let Some(r) = range {
                out.push(Triple::new(&iri, v.rdfs("range"), Term::iri(r)));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn county(&self, fips: FipsCode) -> Result<Term, KgError> {
        Ok(Term::iri(self.links.county_iri(fips)?))
    }

    pub fn record_iri(&self, row: &OutageRecordRow) -> String {
        mint_record_iri(&self.vocab.ex, row.fips, row.run_start_time)
    }

    pub fn emit_record(&self, row: &OutageRecordRow) -> Result<Vec<Triple>, KgError> {
        let s = self.record_iri(row);
        let g = |l: &str| self.vocab.geo(l);
        Ok(vec![
            Triple::new(&s, RDF_TYPE, Term::iri(g(geo::OUTAGE_RECORD))),
            Triple::new(&s, g(geo::REPRESENTS_COUNTY), self.county(row.fips)?),
            Triple::new(&s, g(geo::FIPS_CODE), Term::string(row.fips.to_string())),
            Triple::new(&s, g(geo::COUNTY_NAME), Term::plain(&row.county)),
            Triple::new(&s, g(geo::STATE_NAME), Term::plain(&row.state)),
            Triple::new(&s, g(geo::CUSTOMERS_OUT), Term::typed(row.customers_out.to_string(), xsd::INTEGER)),
            Triple::new(&s, g(geo::RUN_START_TIME), Term::date_time(row.run_start_time)),
            Triple::new(&s, g(geo::HAS_DATE), Term::date(row.run_start_time.day())),
        ])
    }

    pub fn image_iri(&self, grid: &RadianceGrid) -> String {
        mint_image_iri(&self.vocab.ex, grid.fips, grid.date)
    }

    /// `locator` is where the raster file lives, typically a relative path.
    pub fn emit_image(&self, grid: &RadianceGrid, locator: &str) -> Result<Vec<Triple>, KgError> {
        let s = self.image_iri(grid);
        let g = |l: &str| self.vocab.geo(l);
        let m = |l: &str| self.vocab.ma(l);
        Ok(vec![
            Triple::new(&s, RDF_TYPE, Term::iri(g(geo::NTL_IMAGE))),
            Triple::new(&s, g(geo::REPRESENTS_COUNTY), self.county(grid.fips)?),
            Triple::new(&s, g(geo::HAS_DATE), Term::date(grid.date)),
            Triple::new(&s, m(ma::FRAME_HEIGHT), Term::typed(grid.height().to_string(), xsd::INTEGER)),
            Triple::new(&s, m(ma::FRAME_WIDTH), Term::typed(grid.width().to_string(), xsd::INTEGER)),
            Triple::new(&s, m(ma::LOCATOR), Term::any_uri(locator)),
            Triple::new(&s, g(geo::FROM_SATELLITE), Term::iri(&self.links.satellite_iri)),
            Triple::new(&s, g(geo::FROM_SENSOR), Term::iri(&self.links.sensor_iri)),
            Triple::new(&s, g(geo::PRODUCT_NAME), Term::plain(PRODUCT_NAME)),
            Triple::new(&s, g(geo::LAYER_NAME), Term::plain(LAYER_NAME)),
        ])
    }

    pub fn map_iri(&self, map: &OutageMapGrid) -> String {
        mint_map_iri(&self.vocab.ex, map.fips, map.date)
    }

    /// The source image is the one for the same county and day.
    pub fn emit_map(&self, map: &OutageMapGrid, locator: &str) -> Result<Vec<Triple>, KgError> {
        let label = map.event_label.as_deref().ok_or(KgError::MissingEventLabel)?;
        let s = self.map_iri(map);
        let g = |l: &str| self.vocab.geo(l);
        let m = |l: &str| self.vocab.ma(l);
        let image = mint_image_iri(&self.vocab.ex, map.fips, map.date);
        Ok(vec![
            Triple::new(&s, RDF_TYPE, Term::iri(g(geo::OUTAGE_MAP))),
            Triple::new(&s, g(geo::REPRESENTS_COUNTY), self.county(map.fips)?),
            Triple::new(&s, g(geo::HAS_DATE), Term::date(map.date)),
            Triple::new(&s, m(ma::FRAME_HEIGHT), Term::typed(map.height().to_string(), xsd::INTEGER)),
            Triple::new(&s, m(ma::FRAME_WIDTH), Term::typed(map.width().to_string(), xsd::INTEGER)),
            Triple::new(&s, m(ma::LOCATOR), Term::any_uri(locator)),
            Triple::new(&s, g(geo::DERIVED_FROM_IMAGE), Term::iri(image)),
            Triple::new(&s, g(geo::EVENT_LABEL), Term::plain(label)),
            Triple::new(&s, g(geo::MEAN_SEVERITY), Term::typed(canonical_decimal(mean_severity(map)), xsd::DECIMAL)),
        ])
    }
}
