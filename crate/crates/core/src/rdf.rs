//! RDF terms and triples.

use std::fmt::{self, Write as _};

use crate::model::{DayStamp, TimeStamp};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
    pub const ANY_URI: &str = "http://www.w3.org/2001/XMLSchema#anyURI";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Plain(String),
    Typed { lexical: String, datatype: String },
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn plain(text: impl Into<String>) -> Self {
        Term::Plain(text.into())
    }

    /// `xsd:string` literals become [`Term::Plain`], so each literal has one form.
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        if datatype == xsd::STRING {
            return Term::Plain(lexical.into());
        }
        Term::Typed {
            lexical: lexical.into(),
            datatype,
        }
    }

    pub fn integer(value: i64) -> Self {
        Self::typed(value.to_string(), xsd::INTEGER)
    }

    /// Canonical decimal: shortest round-trip digits, no exponent, no trailing zeros.
    pub fn decimal(value: f64) -> Self {
        Self::typed(canonical_decimal(value), xsd::DECIMAL)
    }

    pub fn date_time(t: TimeStamp) -> Self {
        Self::typed(t.to_string(), xsd::DATE_TIME)
    }

    pub fn date(d: DayStamp) -> Self {
        Self::typed(d.to_string(), xsd::DATE)
    }

    pub fn string(text: impl Into<String>) -> Self {
        Self::typed(text, xsd::STRING)
    }

    pub fn any_uri(text: impl Into<String>) -> Self {
        Self::typed(text, xsd::ANY_URI)
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&str> {
        match self {
            Term::Typed { datatype, .. } => Some(datatype),
            Term::Plain(_) => Some(xsd::STRING),
            Term::Iri(_) => None,
        }
    }

    /// IRI text or literal lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Plain(s) => s,
            Term::Typed { lexical, .. } => lexical,
        }
    }

    /// Checks lexical forms of the datatypes this toolkit interprets.
    pub fn is_well_typed(&self) -> bool {
        match self {
            Term::Typed { lexical, datatype } => match datatype.as_str() {
                xsd::INTEGER => is_integer_lexical(lexical),
                xsd::DECIMAL => is_decimal_lexical(lexical) || is_integer_lexical(lexical),
                xsd::DATE_TIME => TimeStamp::parse(lexical).is_ok(),
                xsd::DATE => DayStamp::parse(lexical).is_ok(),
                _ => true,
            },
            _ => true,
        }
    }

    /// N-Triples form; a total, injective rendering used for canonical ordering.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        match self {
            Term::Iri(i) => write_iri(&mut out, i),
            Term::Plain(s) => write_quoted(&mut out, s),
            Term::Typed { lexical, datatype } => {
                write_quoted(&mut out, lexical);
                out.push_str("^^");
                write_iri(&mut out, datatype);
            }
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// `[+-]?[0-9]+`
pub fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// `[+-]?[0-9]*\.[0-9]+`
pub fn is_decimal_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    match body.split_once('.') {
        Some((int, frac)) => {
            int.bytes().all(|b| b.is_ascii_digit()) && !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

pub fn canonical_decimal(value: f64) -> String {
    // Display for f64 never uses exponent notation and drops trailing zeros.
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v}")
}

pub(crate) fn write_iri(out: &mut String, iri: &str) {
    out.push('<');
    for c in iri.chars() {
        match c {
            '\u{0}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            _ => out.push(c),
        }
    }
    out.push('>');
}

pub(crate) fn write_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// An RDF statement. Subject and predicate are always IRIs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Self {
            subject: Term::Iri(subject.into()),
            predicate: Term::Iri(predicate.into()),
            object,
        }
    }

    /// `None` unless subject and predicate are IRIs.
    pub fn from_terms(subject: Term, predicate: Term, object: Term) -> Option<Self> {
        (subject.is_iri() && predicate.is_iri()).then_some(Self {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn subject_iri(&self) -> &str {
        self.subject.lexical()
    }

    pub fn predicate_iri(&self) -> &str {
        self.predicate.lexical()
    }

    pub fn into_terms(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
