use std::collections::BTreeSet;

use super::{PrefixMap, TurtleError};
use crate::lex::{Cursor, LexError};
use crate::rdf::{xsd, Term, Triple, RDF_TYPE};

impl From<LexError> for TurtleError {
    fn from(e: LexError) -> Self {
        TurtleError::Syntax {
            location: e.location,
            message: e.message,
        }
    }
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
    triples: BTreeSet<Triple>,
}

type PResult<T> = Result<T, TurtleError>;

impl<'a> Parser<'a> {
    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(TurtleError::Syntax {
            location: self.cur.location(),
            message: message.into(),
        })
    }

    fn directive(&mut self) -> PResult<bool> {
        let sparql_style = if self.cur.eat("@prefix") {
            false
        } else if self.cur.eat_keyword("PREFIX") {
            true
        } else if self.cur.eat("@base") || self.cur.eat_keyword("BASE") {
            return self.syntax("base directives are not supported");
        } else {
            return Ok(false);
        };
        self.cur.skip_ws();
        let loc = self.cur.location();
        let (prefix, local) = self.cur.pname()?;
        if !local.is_empty() {
            return Err(TurtleError::Syntax {
                location: loc,
                message: "expected 'prefix:' in prefix directive".into(),
            });
        }
        self.cur.skip_ws();
        if self.cur.peek() != Some('<') {
            return self.syntax("expected namespace IRI");
        }
        let ns = self.cur.iriref()?;
        self.prefixes.set(&prefix, &ns)?;
        if !sparql_style {
            self.cur.skip_ws();
            self.cur.expect(".")?;
        }
        Ok(true)
    }

    fn iri(&mut self) -> PResult<String> {
        match self.cur.peek() {
            Some('<') => Ok(self.cur.iriref()?),
            _ if self.cur.at_pname() => {
                let location = self.cur.location();
                let (prefix, local) = self.cur.pname()?;
                self.prefixes
                    .expand(&prefix, &local)
                    .ok_or(TurtleError::UnknownPrefix { location, prefix })
            }
            Some('_') if self.cur.peek_nth(1) == Some(':') => self.syntax("blank nodes are not supported"),
            Some('[') => self.syntax("blank nodes are not supported"),
            Some('(') => self.syntax("collections are not supported"),
            None => self.syntax("unexpected end of input"),
            Some(c) => self.syntax(format!("expected IRI, found {c:?}")),
        }
    }

    fn predicate(&mut self) -> PResult<String> {
        if self.cur.peek() == Some('a') && self.cur.peek_nth(1).is_none_or(|c| c.is_whitespace() || c == '<' || c == '"') {
            self.cur.bump();
            return Ok(RDF_TYPE.to_string());
        }
        self.iri()
    }

    fn object(&mut self) -> PResult<Term> {
        let location = self.cur.location();
        let term = match self.cur.peek() {
            Some('"' | '\'') => {
                let lexical = self.cur.quoted_string()?;
                if self.cur.eat("^^") {
                    let datatype = self.iri()?;
                    Term::typed(lexical, datatype)
                } else if self.cur.peek() == Some('@') {
                    return self.syntax("language-tagged literals are not supported");
                } else {
                    Term::Plain(lexical)
                }
            }
            _ if self.cur.at_number() => {
                let (lexical, datatype) = self.cur.number()?;
                Term::typed(lexical, datatype)
            }
            _ if self.cur.eat_keyword("true") => Term::typed("true", xsd::BOOLEAN),
            _ if self.cur.eat_keyword("false") => Term::typed("false", xsd::BOOLEAN),
            _ => Term::Iri(self.iri()?),
        };
        if !term.is_well_typed() {
            return Err(TurtleError::Syntax {
                location,
                message: format!("ill-typed literal {term}"),
            });
        }
        Ok(term)
    }

    fn statement(&mut self) -> PResult<()> {
        let subject = self.iri()?;
        loop {
            self.cur.skip_ws();
            let predicate = self.predicate()?;
            loop {
                self.cur.skip_ws();
                let object = self.object()?;
                self.triples.insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.cur.skip_ws();
                if !self.cur.eat(",") {
                    break;
                }
            }
            self.cur.skip_ws();
            if self.cur.eat(";") {
                // trailing ';' before '.'
                loop {
                    self.cur.skip_ws();
                    if !self.cur.eat(";") {
                        break;
                    }
                }
                if self.cur.peek() == Some('.') {
                    break;
                }
                continue;
            }
            break;
        }
        self.cur.skip_ws();
        Ok(self.cur.expect(".")?)
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.cur.skip_ws();
            if self.cur.at_end() {
                return Ok(());
            }
            if !self.directive()? {
                self.statement()?;
            }
        }
    }
}

/// Parses the Turtle subset written by [`serialize`](super::serialize):
/// prefix directives, IRIs, prefixed names, plain and typed literals, numeric
/// shorthands, and `;`/`,` lists.
pub fn parse(text: &str) -> Result<(BTreeSet<Triple>, PrefixMap), TurtleError> {
    parse_with(text, PrefixMap::new())
}

/// Like [`parse`], starting from already-known prefixes.
pub fn parse_with(text: &str, prefixes: PrefixMap) -> Result<(BTreeSet<Triple>, PrefixMap), TurtleError> {
    let mut p = Parser {
        cur: Cursor::new(text),
        prefixes,
        triples: BTreeSet::new(),
    };
    p.document()?;
    Ok((p.triples, p.prefixes))
}
