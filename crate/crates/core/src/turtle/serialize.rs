use std::fmt::Write as _;

use super::PrefixMap;
use crate::rdf::{is_decimal_lexical, is_integer_lexical, write_iri, write_quoted, xsd, Term, Triple};

#[derive(Debug, Clone, Copy, Default)]
pub struct SerializeOptions {
    /// Group statements by subject with `;` and `,`.
    pub group_subjects: bool,
}

fn write_iri_term(out: &mut String, iri: &str, prefixes: &PrefixMap) {
    match prefixes.compact(iri) {
        Some(pname) => out.push_str(&pname),
        None => write_iri(out, iri),
    }
}

fn write_term(out: &mut String, term: &Term, prefixes: &PrefixMap) {
    match term {
        Term::Iri(iri) => write_iri_term(out, iri, prefixes),
        Term::Plain(s) => write_quoted(out, s),
        Term::Typed { lexical, datatype } => {
            let bare = match datatype.as_str() {
                xsd::INTEGER => is_integer_lexical(lexical),
                xsd::DECIMAL => is_decimal_lexical(lexical),
                _ => false,
            };
            if bare {
                out.push_str(lexical);
            } else {
                write_quoted(out, lexical);
                out.push_str("^^");
                write_iri_term(out, datatype, prefixes);
            }
        }
    }
}

/// Turtle text for a triple set.
///
/// Prefix directives come first in map order, then statements sorted by the
/// canonical forms of (subject, predicate, object). Duplicates collapse. The
/// output depends only on the set, never on input order.
pub fn serialize<'a>(triples: impl IntoIterator<Item = &'a Triple>, prefixes: &PrefixMap) -> String {
    serialize_with(triples, prefixes, SerializeOptions::default())
}

pub fn serialize_with<'a>(
    triples: impl IntoIterator<Item = &'a Triple>,
    prefixes: &PrefixMap,
    options: SerializeOptions,
) -> String {
    let mut keyed: Vec<([String; 3], &Triple)> = triples
        .into_iter()
        .map(|t| {
            (
                [t.subject().canonical(), t.predicate().canonical(), t.object().canonical()],
                t,
            )
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);

    let mut out = String::new();
    for (p, ns) in prefixes.iter() {
        out.push_str("@prefix ");
        out.push_str(p);
        out.push_str(": ");
        write_iri(&mut out, ns);
        out.push_str(" .\n");
    }
    if keyed.is_empty() {
        return out;
    }
    if !prefixes.is_empty() {
        out.push('\n');
    }

    if !options.group_subjects {
        for (_, t) in &keyed {
            write_term(&mut out, t.subject(), prefixes);
            out.push(' ');
            write_term(&mut out, t.predicate(), prefixes);
            out.push(' ');
            write_term(&mut out, t.object(), prefixes);
            out.push_str(" .\n");
        }
        return out;
    }

    let mut i = 0;
    while i < keyed.len() {
        let subject = &keyed[i].0[0];
        write_term(&mut out, keyed[i].1.subject(), prefixes);
        let mut first_pred = true;
        while i < keyed.len() && &keyed[i].0[0] == subject {
            let predicate = &keyed[i].0[1];
            if first_pred {
                out.push(' ');
                first_pred = false;
            } else {
                out.push_str(" ;\n    ");
            }
            write_term(&mut out, keyed[i].1.predicate(), prefixes);
            out.push(' ');
            let mut first_obj = true;
            while i < keyed.len() && &keyed[i].0[0] == subject && &keyed[i].0[1] == predicate {
                if !first_obj {
                    out.push_str(", ");
                }
                first_obj = false;
                write_term(&mut out, keyed[i].1.object(), prefixes);
                i += 1;
            }
        }
        let _ = writeln!(out, " .");
    }
    out
}
