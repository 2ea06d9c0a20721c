//! Power-outage knowledge graph toolkit: record and raster ingest, outage
//! severity maps, RDF emission, Turtle I/O, and an in-memory triple store with
//! a small SPARQL subset.

pub mod ingest;
pub mod kg;
mod lex;
pub mod model;
pub mod pipeline;
pub mod rdf;
pub mod severity;
pub mod store;
pub mod turtle;

pub use lex::Location;
