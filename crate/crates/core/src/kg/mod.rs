//! Knowledge-graph vocabulary, external links and triple emission.

mod emit;
mod vocab;

use thiserror::Error;

use crate::model::FipsCode;

pub use emit::{KgBuilder, IMAGE_TRIPLES, LAYER_NAME, MAP_TRIPLES, PRODUCT_NAME, RECORD_TRIPLES};
pub use vocab::{geo, ma, ExternalLinks, KgConfig, Vocabulary, DEFAULT_GEO_NS, DEFAULT_GSDB_NS, DEFAULT_MA_NS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KgError {
    #[error("no county IRI for fips {0}")]
    UnknownCounty(FipsCode),
    #[error("outage map has no event label")]
    MissingEventLabel,
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}
