use std::collections::BTreeMap;

use super::KgError;
use crate::ingest::CountyRegistry;
use crate::model::iri::DEFAULT_INSTANCE_BASE;
use crate::model::FipsCode;
use crate::rdf::{RDFS_NS, RDF_NS, XSD_NS};
use crate::turtle::PrefixMap;

/// Local names in the `geo:` namespace.
pub mod geo {
    pub const OUTAGE_RECORD: &str = "OutageRecord";
    pub const NTL_IMAGE: &str = "NTLImage";
    pub const OUTAGE_MAP: &str = "OutageMap";

    pub const REPRESENTS_COUNTY: &str = "representsCounty";
    pub const FROM_SATELLITE: &str = "fromSatellite";
    pub const FROM_SENSOR: &str = "fromSensor";
    pub const DERIVED_FROM_IMAGE: &str = "derivedFromImage";
    pub const HAS_DATE: &str = "hasDate";
    pub const CUSTOMERS_OUT: &str = "customersOut";
    pub const RUN_START_TIME: &str = "runStartTime";
    pub const FIPS_CODE: &str = "fipsCode";
    pub const COUNTY_NAME: &str = "countyName";
    pub const STATE_NAME: &str = "stateName";
    pub const MEAN_SEVERITY: &str = "meanSeverity";
    pub const EVENT_LABEL: &str = "eventLabel";
    pub const PRODUCT_NAME: &str = "productName";
    pub const LAYER_NAME: &str = "layerName";
}

/// Local names in the Media Resources (`ma:`) namespace.
pub mod ma {
    pub const IMAGE: &str = "Image";
    pub const FRAME_HEIGHT: &str = "frameHeight";
    pub const FRAME_WIDTH: &str = "frameWidth";
    pub const LOCATOR: &str = "locator";
}

pub const DEFAULT_GEO_NS: &str = "https://purl.org/geooutagekg/ontology#";
pub const DEFAULT_MA_NS: &str = "http://www.w3.org/ns/ma-ont#";
pub const DEFAULT_DBO_NS: &str = "http://dbpedia.org/ontology/";
pub const DEFAULT_DBR_NS: &str = "http://dbpedia.org/resource/";
pub const DEFAULT_GSDB_NS: &str = "https://example.org/geosatdb/";
pub const DEFAULT_COUNTY_PATTERN: &str = "http://dbpedia.org/resource/{name}_County,_{state}";

/// Namespace table. `rdf`, `rdfs` and `xsd` are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub ex: String,
    pub geo: String,
    pub ma: String,
    pub dbo: String,
    pub dbr: String,
    pub gsdb: String,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self {
            ex: DEFAULT_INSTANCE_BASE.to_string(),
            geo: DEFAULT_GEO_NS.to_string(),
            ma: DEFAULT_MA_NS.to_string(),
            dbo: DEFAULT_DBO_NS.to_string(),
            dbr: DEFAULT_DBR_NS.to_string(),
            gsdb: DEFAULT_GSDB_NS.to_string(),
        }
    }
}

impl Vocabulary {
    pub fn geo(&self, local: &str) -> String {
        format!("{}{local}", self.geo)
    }

    pub fn ma(&self, local: &str) -> String {
        format!("{}{local}", self.ma)
    }

    pub fn rdfs(&self, local: &str) -> String {
        format!("{RDFS_NS}{local}")
    }

    pub fn rdf(&self, local: &str) -> String {
        format!("{RDF_NS}{local}")
    }

    pub fn prefix_map(&self) -> PrefixMap {
        let mut p = PrefixMap::new();
        for (prefix, ns) in [
            ("ex", self.ex.as_str()),
            ("geo", &self.geo),
            ("ma", &self.ma),
            ("dbo", &self.dbo),
            ("dbr", &self.dbr),
            ("gsdb", &self.gsdb),
            ("rdf", RDF_NS),
            ("rdfs", RDFS_NS),
            ("xsd", XSD_NS),
        ] {
            // distinct literal prefixes; set() tolerates a config mapping two to one IRI
            p.set(prefix, ns).expect("nonempty namespace");
        }
        p
    }

    /// Namespaces whose terms need no schema declaration of their own.
    pub fn is_external_predicate(&self, iri: &str) -> bool {
        [RDF_NS, RDFS_NS, self.ma.as_str()].iter().any(|ns| iri.starts_with(ns))
    }
}

/// Settings read from a `key = value` file.
///
/// Keys: `prefix.<ex|geo|ma|dbo|dbr|gsdb>`, `satellite`, `sensor`,
/// `county_iri_pattern` (with `{name}`, `{state}`, `{fips}` placeholders) and
/// `county.<fips>` for per-county overrides. `#` at the start of a line or
/// after whitespace starts a comment, so namespaces may end in `#`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KgConfig {
    pub vocab: Vocabulary,
    pub satellite_iri: Option<String>,
    pub sensor_iri: Option<String>,
    pub county_iri_pattern: Option<String>,
    pub county_overrides: BTreeMap<FipsCode, String>,
}

fn is_absolute_iri(s: &str) -> bool {
    match s.split_once(':') {
        Some((scheme, rest)) => {
            !rest.is_empty()
                && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
        }
        None => false,
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev = ' ';
    for (i, c) in line.char_indices() {
        if c == '#' && prev.is_whitespace() {
            return &line[..i];
        }
        prev = c;
    }
    line
}

impl KgConfig {
    pub fn parse(text: &str) -> Result<Self, KgError> {
        let mut cfg = KgConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| KgError::Config { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected key = value".into()))?;
            if value.is_empty() {
                return Err(err(format!("empty value for {key}")));
            }
            if key != "county_iri_pattern" && !is_absolute_iri(value) {
                return Err(err(format!("{value:?} is not an absolute IRI")));
            }
            let v = value.to_string();
            match key {
                "prefix.ex" => cfg.vocab.ex = v,
                "prefix.geo" => cfg.vocab.geo = v,
                "prefix.ma" => cfg.vocab.ma = v,
                "prefix.dbo" => cfg.vocab.dbo = v,
                "prefix.dbr" => cfg.vocab.dbr = v,
                "prefix.gsdb" => cfg.vocab.gsdb = v,
                "satellite" => cfg.satellite_iri = Some(v),
                "sensor" => cfg.sensor_iri = Some(v),
                "county_iri_pattern" => cfg.county_iri_pattern = Some(v),
                _ => match key.strip_prefix("county.") {
                    Some(code) => {
                        let fips: FipsCode = code.parse().map_err(|e| err(format!("{e}")))?;
                        cfg.county_overrides.insert(fips, v);
                    }
                    None => return Err(err(format!("unknown key {key:?}"))),
                },
            }
        }
        Ok(cfg)
    }
}

/// IRIs outside this graph: the satellite, the sensor, and county resources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalLinks {
    pub satellite_iri: String,
    pub sensor_iri: String,
    counties: BTreeMap<FipsCode, String>,
}

impl ExternalLinks {
    pub fn new(config: &KgConfig, registry: &CountyRegistry) -> Result<Self, KgError> {
        let pattern = config.county_iri_pattern.as_deref().unwrap_or(DEFAULT_COUNTY_PATTERN);
        let mut counties = BTreeMap::new();
        for c in registry.iter() {
            let iri = match config.county_overrides.get(&c.fips) {
                Some(iri) => iri.clone(),
                None => pattern
                    .replace("{name}", &c.name.replace(' ', "_"))
                    .replace("{state}", &c.state.replace(' ', "_"))
                    .replace("{fips}", &c.fips.to_string()),
            };
            if !is_absolute_iri(&iri) {
                return Err(KgError::Config {
                    line: 0,
                    message: format!("county IRI {iri:?} for {} is not absolute", c.fips),
                });
            }
            counties.insert(c.fips, iri);
        }
        Ok(Self {
            satellite_iri: config
                .satellite_iri
                .clone()
                .unwrap_or_else(|| format!("{}SuomiNPP", config.vocab.gsdb)),
            sensor_iri: config
                .sensor_iri
                .clone()
                .unwrap_or_else(|| format!("{}VIIRS", config.vocab.gsdb)),
            counties,
        })
    }

    pub fn county_iri(&self, fips: FipsCode) -> Result<&str, KgError> {
        self.counties
            .get(&fips)
            .map(String::as_str)
            .ok_or(KgError::UnknownCounty(fips))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_prefix_map_order() {
        let p = Vocabulary::default().prefix_map();
        let names: Vec<&str> = p.iter().map(|(k, _)| k).collect();
        assert_eq!(names, ["ex", "geo", "ma", "dbo", "dbr", "gsdb", "rdf", "rdfs", "xsd"]);
        assert!(p.iter().all(|(_, ns)| is_absolute_iri(ns)));
    }

    #[test]
    fn config_parsing() {
        let text = "# settings\n\
                    prefix.ex = http://data.example/kg/\n\
                    prefix.geo = http://data.example/onto#  # hash namespace\n\
                    satellite = http://sat.example/SNPP   # trailing comment\n\
                    county_iri_pattern = http://c.example/{fips}\n\
                    county.12071 = http://c.example/lee\n";
        let cfg = KgConfig::parse(text).unwrap();
        assert_eq!(cfg.vocab.ex, "http://data.example/kg/");
        assert_eq!(cfg.vocab.geo, "http://data.example/onto#");
        assert_eq!(cfg.satellite_iri.as_deref(), Some("http://sat.example/SNPP"));
        let links = ExternalLinks::new(&cfg, &CountyRegistry::florida()).unwrap();
        assert_eq!(links.county_iri("12071".parse().unwrap()).unwrap(), "http://c.example/lee");
        assert_eq!(links.county_iri("12001".parse().unwrap()).unwrap(), "http://c.example/12001");
        assert_eq!(links.sensor_iri, format!("{DEFAULT_GSDB_NS}VIIRS"));
    }

    #[test]
    fn config_errors_name_lines() {
        for (text, line) in [
            ("satellite = not an iri", 1),
            ("\nbogus = http://x/", 2),
            ("no equals sign", 1),
            ("county.1207 = http://x/", 1),
        ] {
            match KgConfig::parse(text) {
                Err(KgError::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("unexpected {other:?} for {text}"),
            }
        }
    }

    #[test]
    fn default_county_iris_follow_dbpedia_pattern() {
        let links = ExternalLinks::new(&KgConfig::default(), &CountyRegistry::florida()).unwrap();
        assert_eq!(
            links.county_iri("12071".parse().unwrap()).unwrap(),
            "http://dbpedia.org/resource/Lee_County,_Florida"
        );
        assert_eq!(
            links.county_iri("12099".parse().unwrap()).unwrap(),
            "http://dbpedia.org/resource/Palm_Beach_County,_Florida"
        );
        assert!(links.county_iri("99999".parse().unwrap()).is_err());
    }
}
