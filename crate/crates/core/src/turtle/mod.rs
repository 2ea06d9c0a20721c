//! Turtle serialization and the matching parser subset.

mod parse;
mod prefix;
mod serialize;

use thiserror::Error;

use crate::lex::Location;

pub use parse::{parse, parse_with};
pub use prefix::PrefixMap;
pub use serialize::{serialize, serialize_with, SerializeOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleError {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: Location, message: String },
    #[error("unknown prefix {prefix:?} at {location}")]
    UnknownPrefix { location: Location, prefix: String },
    #[error("prefix map: {0}")]
    Prefix(String),
}
