use std::cmp::Ordering;

use super::CompareOp;
use crate::model::{DayStamp, TimeStamp};
use crate::rdf::{is_integer_lexical, xsd, Term};

#[derive(Debug, Clone, Copy)]
enum Value<'a> {
    Iri,
    Int(i128),
    Num(f64),
    DateTime(i64),
    Date(i64),
    Str(&'a str),
    Other,
}

const INTEGER_TYPES: &[&str] = &[
    xsd::INTEGER,
    "http://www.w3.org/2001/XMLSchema#int",
    "http://www.w3.org/2001/XMLSchema#long",
    "http://www.w3.org/2001/XMLSchema#short",
    "http://www.w3.org/2001/XMLSchema#nonNegativeInteger",
    "http://www.w3.org/2001/XMLSchema#positiveInteger",
];

const FLOAT_TYPES: &[&str] = &[xsd::DECIMAL, xsd::DOUBLE, "http://www.w3.org/2001/XMLSchema#float"];

fn epoch() -> DayStamp {
    DayStamp::from_ymd(1970, 1, 1).expect("valid date")
}

fn classify(t: &Term) -> Value<'_> {
    let (lexical, datatype) = match t {
        Term::Iri(_) => return Value::Iri,
        Term::Plain(s) => return Value::Str(s),
        Term::Typed { lexical, datatype } => (lexical.as_str(), datatype.as_str()),
    };
    let other = Value::Other;
    if datatype == xsd::STRING {
        return Value::Str(lexical);
    }
    if INTEGER_TYPES.contains(&datatype) {
        if !is_integer_lexical(lexical) {
            return other;
        }
        return match lexical.parse::<i128>() {
            Ok(v) => Value::Int(v),
            Err(_) => lexical.parse().map_or(other, Value::Num),
        };
    }
    if FLOAT_TYPES.contains(&datatype) {
        return lexical.parse().map_or(other, Value::Num);
    }
    match datatype {
        xsd::DATE_TIME => TimeStamp::parse(lexical).map_or(other, |ts| Value::DateTime(ts.unix_seconds())),
        xsd::DATE => DayStamp::parse(lexical).map_or(other, |d| Value::Date(d.days_since(epoch()))),
        _ => other,
    }
}

fn numeric_cmp(a: Value, b: Value) -> Option<Option<Ordering>> {
    let f = |v: Value| match v {
        Value::Int(i) => Some(i as f64),
        Value::Num(x) => Some(x),
        _ => None,
    };
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(Some(x.cmp(&y))),
        _ => Some(f(a)?.partial_cmp(&f(b)?)),
    }
}

fn value_cmp(a: Value, b: Value) -> Option<Option<Ordering>> {
    match (a, b) {
        (Value::DateTime(x), Value::DateTime(y)) | (Value::Date(x), Value::Date(y)) => Some(Some(x.cmp(&y))),
        (Value::Str(x), Value::Str(y)) => Some(Some(x.cmp(y))),
        _ => numeric_cmp(a, b),
    }
}

/// Filter comparison. `None` is a type error.
///
/// Numbers compare by value across integer and decimal types; dateTimes and
/// dates chronologically; strings by code point. Equality between an IRI and
/// a literal is false. Any other mixed comparison is an error.
pub fn compare_terms(a: &Term, op: CompareOp, b: &Term) -> Option<bool> {
    let (va, vb) = (classify(a), classify(b));
    if let Some(ord) = value_cmp(va, vb) {
        return Some(match ord {
            Some(o) => op.holds(o),
            // NaN: unordered, unequal
            None => op == CompareOp::Ne,
        });
    }
    match op {
        CompareOp::Eq | CompareOp::Ne => {
            let same = a == b;
            if same || a.is_iri() || b.is_iri() {
                Some(same == (op == CompareOp::Eq))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn rank(v: Value) -> u8 {
    match v {
        Value::Iri => 0,
        Value::Int(_) | Value::Num(_) => 1,
        Value::DateTime(_) => 2,
        Value::Date(_) => 3,
        Value::Str(_) => 4,
        Value::Other => 5,
    }
}

/// Total order for ORDER BY: IRIs, then numbers, dateTimes, dates, strings,
/// then other literals. Equal values tie-break on lexical form, then datatype.
pub fn order_terms(a: &Term, b: &Term) -> Ordering {
    let (va, vb) = (classify(a), classify(b));
    rank(va)
        .cmp(&rank(vb))
        .then_with(|| match (va, vb) {
            (Value::Int(x), Value::Int(y)) => x.cmp(&y),
            (Value::Int(_) | Value::Num(_), Value::Int(_) | Value::Num(_)) => {
                let f = |v| match v {
                    Value::Int(i) => i as f64,
                    Value::Num(x) => x,
                    _ => unreachable!(),
                };
                f(va).total_cmp(&f(vb))
            }
            (Value::DateTime(x), Value::DateTime(y)) | (Value::Date(x), Value::Date(y)) => x.cmp(&y),
            _ => Ordering::Equal,
        })
        .then_with(|| a.lexical().cmp(b.lexical()))
        .then_with(|| a.datatype().cmp(&b.datatype()))
}
