use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::QueryError;
use crate::kg::Vocabulary;
use crate::lex::{Cursor, LexError};
use crate::rdf::{xsd, Term, RDF_TYPE};
use crate::turtle::PrefixMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    Const(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Compare(Operand, CompareOp, Operand),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Compare(a, _, b) => {
                for o in [a, b] {
                    if let Operand::Var(v) = o {
                        out.insert(v);
                    }
                }
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(e) => e.collect_vars(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: Vec<String>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Expr>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
}

impl Query {
    /// Pattern variables in order of first appearance.
    pub fn pattern_variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for p in &self.patterns {
            for v in p.terms().into_iter().filter_map(PatternTerm::var) {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    }
}

impl From<LexError> for QueryError {
    fn from(e: LexError) -> Self {
        QueryError::Syntax {
            location: e.location,
            message: e.message,
        }
    }
}

type QResult<T> = Result<T, QueryError>;

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
}

impl<'a> Parser<'a> {
    fn syntax<T>(&self, message: impl Into<String>) -> QResult<T> {
        Err(QueryError::Syntax {
            location: self.cur.location(),
            message: message.into(),
        })
    }

    fn found(&self) -> String {
        if self.cur.at_end() {
            "end of input".into()
        } else {
            format!("{:?}", self.cur.rest().chars().take(12).collect::<String>())
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.cur.skip_ws();
        self.cur.eat_keyword(kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> QResult<()> {
        if self.keyword(kw) {
            Ok(())
        } else {
            self.syntax(format!("expected {kw}, found {}", self.found()))
        }
    }

    fn punct(&mut self, p: &str) -> bool {
        self.cur.skip_ws();
        self.cur.eat(p)
    }

    fn expect_punct(&mut self, p: &str) -> QResult<()> {
        self.cur.skip_ws();
        Ok(self.cur.expect(p)?)
    }

    fn at_var(&mut self) -> bool {
        self.cur.skip_ws();
        matches!(self.cur.peek(), Some('?' | '$'))
    }

    fn prologue(&mut self) -> QResult<()> {
        loop {
            if self.keyword("PREFIX") {
                self.cur.skip_ws();
                let loc = self.cur.location();
                let (prefix, local) = self.cur.pname()?;
                if !local.is_empty() {
                    return Err(QueryError::Syntax {
                        location: loc,
                        message: "expected 'prefix:' in PREFIX declaration".into(),
                    });
                }
                self.cur.skip_ws();
                if self.cur.peek() != Some('<') {
                    return self.syntax("expected namespace IRI");
                }
                let ns = self.cur.iriref()?;
                self.prefixes
                    .set(&prefix, &ns)
                    .map_err(|e| QueryError::Syntax { location: loc, message: e.to_string() })?;
            } else if self.keyword("BASE") {
                return self.syntax("BASE is not supported");
            } else {
                return Ok(());
            }
        }
    }

    fn iri(&mut self) -> QResult<String> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('<') => Ok(self.cur.iriref()?),
            _ if self.cur.at_pname() => {
                let location = self.cur.location();
                let (prefix, local) = self.cur.pname()?;
                self.prefixes
                    .expand(&prefix, &local)
                    .ok_or(QueryError::UnknownPrefix { location, prefix })
            }
            _ => self.syntax(format!("expected IRI, found {}", self.found())),
        }
    }

    /// Literal, IRI or prefixed name.
    fn constant(&mut self) -> QResult<Term> {
        self.cur.skip_ws();
        let location = self.cur.location();
        let term = match self.cur.peek() {
            Some('"' | '\'') => {
                let lexical = self.cur.quoted_string()?;
                if self.cur.eat("^^") {
                    Term::typed(lexical, self.iri()?)
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
            return Err(QueryError::Syntax {
                location,
                message: format!("ill-typed literal {term}"),
            });
        }
        Ok(term)
    }

    fn subject(&mut self) -> QResult<PatternTerm> {
        if self.at_var() {
            return Ok(PatternTerm::Var(self.cur.variable()?));
        }
        match self.cur.peek() {
            Some('"' | '\'') => self.syntax("literal in subject position"),
            Some('_' | '[') => self.syntax("blank nodes are not supported"),
            _ => Ok(PatternTerm::Const(Term::Iri(self.iri()?))),
        }
    }

    fn predicate(&mut self) -> QResult<PatternTerm> {
        if self.at_var() {
            return Ok(PatternTerm::Var(self.cur.variable()?));
        }
        if self.cur.peek() == Some('a')
            && self
                .cur
                .peek_nth(1)
                .is_none_or(|c| c.is_whitespace() || matches!(c, '<' | '?' | '$' | '"'))
        {
            self.cur.bump();
            return Ok(PatternTerm::Const(Term::iri(RDF_TYPE)));
        }
        Ok(PatternTerm::Const(Term::Iri(self.iri()?)))
    }

    fn object(&mut self) -> QResult<PatternTerm> {
        if self.at_var() {
            return Ok(PatternTerm::Var(self.cur.variable()?));
        }
        if matches!(self.cur.peek(), Some('_' | '[' | '(')) {
            return self.syntax("blank nodes and collections are not supported");
        }
        Ok(PatternTerm::Const(self.constant()?))
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> QResult<()> {
        let subject = self.subject()?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.punct(",") {
                    break;
                }
            }
            if !self.punct(";") {
                return Ok(());
            }
            self.cur.skip_ws();
            if matches!(self.cur.peek(), Some('.' | '}')) {
                return Ok(());
            }
        }
    }

    fn operand(&mut self) -> QResult<Operand> {
        if self.at_var() {
            return Ok(Operand::Var(self.cur.variable()?));
        }
        Ok(Operand::Const(self.constant()?))
    }

    fn compare_op(&mut self) -> QResult<CompareOp> {
        self.cur.skip_ws();
        for (tok, op) in [
            ("<=", CompareOp::Le),
            (">=", CompareOp::Ge),
            ("!=", CompareOp::Ne),
            ("<", CompareOp::Lt),
            (">", CompareOp::Gt),
            ("=", CompareOp::Eq),
        ] {
            if self.cur.eat(tok) {
                return Ok(op);
            }
        }
        self.syntax(format!("expected comparison operator, found {}", self.found()))
    }

    fn primary(&mut self) -> QResult<Expr> {
        if self.punct("!") {
            return Ok(Expr::Not(Box::new(self.primary()?)));
        }
        if self.punct("(") {
            let e = self.or_expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        let lhs = self.operand()?;
        let op = self.compare_op()?;
        let rhs = self.operand()?;
        Ok(Expr::Compare(lhs, op, rhs))
    }

    fn and_expr(&mut self) -> QResult<Expr> {
        let mut e = self.primary()?;
        while self.punct("&&") {
            e = Expr::And(Box::new(e), Box::new(self.primary()?));
        }
        Ok(e)
    }

    fn or_expr(&mut self) -> QResult<Expr> {
        let mut e = self.and_expr()?;
        while self.punct("||") {
            e = Expr::Or(Box::new(e), Box::new(self.and_expr()?));
        }
        Ok(e)
    }

    fn group(&mut self, patterns: &mut Vec<TriplePattern>, filters: &mut Vec<Expr>) -> QResult<()> {
        self.expect_punct("{")?;
        loop {
            self.cur.skip_ws();
            if self.cur.eat("}") {
                return Ok(());
            }
            if self.cur.at_end() {
                return self.syntax("expected '}', found end of input");
            }
            if self.keyword("FILTER") {
                self.expect_punct("(")?;
                filters.push(self.or_expr()?);
                self.expect_punct(")")?;
                self.punct(".");
                continue;
            }
            for kw in ["OPTIONAL", "UNION", "GRAPH", "BIND", "VALUES", "MINUS", "SERVICE"] {
                if self.keyword(kw) {
                    return self.syntax(format!("{kw} is not supported"));
                }
            }
            self.triples(patterns)?;
            self.cur.skip_ws();
            if !self.cur.eat(".") && !matches!(self.cur.peek(), Some('}')) && !self.cur.rest().get(..6).is_some_and(|s| s.eq_ignore_ascii_case("FILTER")) {
                return self.syntax(format!("expected '.', '}}' or FILTER, found {}", self.found()));
            }
        }
    }

    fn order_by(&mut self) -> QResult<Vec<OrderKey>> {
        let mut keys = Vec::new();
        loop {
            let descending = if self.keyword("ASC") {
                Some(false)
            } else if self.keyword("DESC") {
                Some(true)
            } else {
                None
            };
            match descending {
                Some(descending) => {
                    self.expect_punct("(")?;
                    if !self.at_var() {
                        return self.syntax("expected variable in ORDER BY");
                    }
                    let var = self.cur.variable()?;
                    self.expect_punct(")")?;
                    keys.push(OrderKey { var, descending });
                }
                None if self.at_var() => keys.push(OrderKey {
                    var: self.cur.variable()?,
                    descending: false,
                }),
                None if keys.is_empty() => return self.syntax("expected ORDER BY key"),
                None => return Ok(keys),
            }
        }
    }

    fn query(&mut self) -> QResult<Query> {
        self.prologue()?;
        self.expect_keyword("SELECT")?;
        let distinct = self.keyword("DISTINCT");
        let mut select = Vec::new();
        let star = self.punct("*");
        if !star {
            while self.at_var() {
                select.push(self.cur.variable()?);
            }
            if select.is_empty() {
                return self.syntax(format!("expected variable or '*', found {}", self.found()));
            }
        }
        self.keyword("WHERE");
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        self.group(&mut patterns, &mut filters)?;
        let mut order_by = Vec::new();
        if self.keyword("ORDER") {
            self.expect_keyword("BY")?;
            order_by = self.order_by()?;
        }
        let mut limit = None;
        if self.keyword("LIMIT") {
            self.cur.skip_ws();
            let mut digits = String::new();
            while let Some(c) = self.cur.peek().filter(char::is_ascii_digit) {
                digits.push(c);
                self.cur.bump();
            }
            match digits.parse() {
                Ok(n) => limit = Some(n),
                Err(_) => return self.syntax("expected nonnegative integer after LIMIT"),
            }
        }
        self.cur.skip_ws();
        if !self.cur.at_end() {
            return self.syntax(format!("unexpected {}", self.found()));
        }
        let mut q = Query {
            select,
            distinct,
            patterns,
            filters,
            order_by,
            limit,
        };
        if star {
            q.select = q.pattern_variables().into_iter().map(String::from).collect();
        }
        check(&q)?;
        Ok(q)
    }
}

fn check(q: &Query) -> QResult<()> {
    let bound: BTreeSet<&str> = q.pattern_variables().into_iter().collect();
    if q.patterns.is_empty() {
        return Err(QueryError::Semantic("query has no triple patterns".into()));
    }
    let mut seen = BTreeSet::new();
    for v in &q.select {
        if !bound.contains(v.as_str()) {
            return Err(QueryError::Semantic(format!("selected variable ?{v} is not bound by any pattern")));
        }
        if !seen.insert(v.as_str()) {
            return Err(QueryError::Semantic(format!("variable ?{v} selected twice")));
        }
    }
    for f in &q.filters {
        if let Some(v) = f.variables().into_iter().find(|v| !bound.contains(v)) {
            return Err(QueryError::Semantic(format!("filter variable ?{v} is not bound by any pattern")));
        }
    }
    for k in &q.order_by {
        if !bound.contains(k.var.as_str()) {
            return Err(QueryError::Semantic(format!("ORDER BY variable ?{} is not bound by any pattern", k.var)));
        }
    }
    Ok(())
}

/// Parses a query with the toolkit's standard prefixes predeclared.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse_query_with(text, &Vocabulary::default().prefix_map())
}

pub fn parse_query_with(text: &str, prefixes: &PrefixMap) -> Result<Query, QueryError> {
    Parser {
        cur: Cursor::new(text),
        prefixes: prefixes.clone(),
    }
    .query()
}
