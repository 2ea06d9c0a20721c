//! Deterministic instance IRIs.
//!
//! Every instance is named by its class, county and time stamp under the
//! instance namespace (`ex:`), e.g. `ex:ntlimage.12001.2023-08-28`.

use super::{DayStamp, FipsCode, TimeStamp};

/// Default expansion of the `ex:` prefix.
pub const DEFAULT_INSTANCE_BASE: &str = "https://example.org/geooutagekg/";

/// Local part of an outage record IRI. Colons of the time stamp become hyphens.
pub fn record_local_name(fips: FipsCode, t: TimeStamp) -> String {
    format!("outagerecord.{fips}.{}", t.to_string().replace(':', "-"))
}

pub fn image_local_name(fips: FipsCode, d: DayStamp) -> String {
    format!("ntlimage.{fips}.{d}")
}

pub fn map_local_name(fips: FipsCode, d: DayStamp) -> String {
    format!("outagemap.{fips}.{d}")
}

pub fn mint_record_iri(base: &str, fips: FipsCode, t: TimeStamp) -> String {
    format!("{base}{}", record_local_name(fips, t))
}

pub fn mint_image_iri(base: &str, fips: FipsCode, d: DayStamp) -> String {
    format!("{base}{}", image_local_name(fips, d))
}

pub fn mint_map_iri(base: &str, fips: FipsCode, d: DayStamp) -> String {
    format!("{base}{}", map_local_name(fips, d))
}
