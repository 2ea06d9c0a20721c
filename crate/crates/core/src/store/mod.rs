//! In-memory triple store with three sorted permutation indexes, and a
//! SPARQL subset evaluated over it.

mod eval;
mod query;
mod value;

use std::collections::HashMap;
use std::ops::Range;

use thiserror::Error;

use crate::lex::Location;
use crate::rdf::{Term, Triple};

pub use eval::{evaluate, SolutionTable};
pub use query::{parse_query, parse_query_with, CompareOp, Expr, Operand, OrderKey, PatternTerm, Query, TriplePattern};
pub use value::{compare_terms, order_terms};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query syntax error at {location}: {message}")]
    Syntax { location: Location, message: String },
    #[error("unknown prefix {prefix:?} at {location}")]
    UnknownPrefix { location: Location, prefix: String },
    #[error("{0}")]
    Semantic(String),
}

pub type TermId = u32;

/// Bidirectional term ↔ id table. Ids are dense and assigned in first-seen order.
#[derive(Debug, Default, Clone)]
pub struct TermDictionary {
    ids: HashMap<Term, TermId>,
    terms: Vec<Term>,
}

impl TermDictionary {
    pub fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    pub fn id(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Key order of a permutation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

impl IndexOrder {
    pub const ALL: [IndexOrder; 3] = [IndexOrder::Spo, IndexOrder::Pos, IndexOrder::Osp];

    /// Positions (0 = s, 1 = p, 2 = o) in key order.
    fn positions(self) -> [usize; 3] {
        match self {
            IndexOrder::Spo => [0, 1, 2],
            IndexOrder::Pos => [1, 2, 0],
            IndexOrder::Osp => [2, 0, 1],
        }
    }

    fn key(self, t: [TermId; 3]) -> [TermId; 3] {
        let [a, b, c] = self.positions();
        [t[a], t[b], t[c]]
    }

    fn unkey(self, k: [TermId; 3]) -> [TermId; 3] {
        let mut t = [0; 3];
        for (i, pos) in self.positions().into_iter().enumerate() {
            t[pos] = k[i];
        }
        t
    }

    /// Index whose key prefix covers exactly the bound positions.
    pub fn for_bound(s: bool, p: bool, o: bool) -> IndexOrder {
        match (s, p, o) {
            (false, true, _) => IndexOrder::Pos,
            (false, false, true) | (true, false, true) => IndexOrder::Osp,
            _ => IndexOrder::Spo,
        }
    }
}

/// Triple set over interned ids. Duplicate triples are stored once.
#[derive(Debug, Default, Clone)]
pub struct Store {
    dict: TermDictionary,
    spo: Vec<[TermId; 3]>,
    pos: Vec<[TermId; 3]>,
    osp: Vec<[TermId; 3]>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut s = Self::new();
        s.load(triples);
        s
    }

    /// Adds triples and rebuilds the indexes once.
    pub fn load(&mut self, triples: impl IntoIterator<Item = Triple>) {
        for t in triples {
            let (s, p, o) = t.into_terms();
            let ids = [self.dict.intern(s), self.dict.intern(p), self.dict.intern(o)];
            self.spo.push(ids);
        }
        self.spo.sort_unstable();
        self.spo.dedup();
        self.pos = self.spo.iter().map(|&t| IndexOrder::Pos.key(t)).collect();
        self.pos.sort_unstable();
        self.osp = self.spo.iter().map(|&t| IndexOrder::Osp.key(t)).collect();
        self.osp.sort_unstable();
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    fn index(&self, order: IndexOrder) -> &[[TermId; 3]] {
        match order {
            IndexOrder::Spo => &self.spo,
            IndexOrder::Pos => &self.pos,
            IndexOrder::Osp => &self.osp,
        }
    }

    /// Range of `order`'s index whose keys start with the bound prefix, plus
    /// bound positions the prefix does not cover.
    fn scan(&self, order: IndexOrder, pattern: [Option<TermId>; 3]) -> (Range<usize>, [Option<TermId>; 3]) {
        let idx = self.index(order);
        let positions = order.positions();
        let mut prefix = Vec::with_capacity(3);
        for &pos in &positions {
            match pattern[pos] {
                Some(id) => prefix.push(id),
                None => break,
            }
        }
        let mut residual = pattern;
        for &pos in &positions[..prefix.len()] {
            residual[pos] = None;
        }
        let n = prefix.len();
        let lo = idx.partition_point(|k| k[..n] < prefix[..]);
        let hi = lo + idx[lo..].partition_point(|k| k[..n] == prefix[..]);
        (lo..hi, residual)
    }

    fn ids_in(&self, order: IndexOrder, pattern: [Option<TermId>; 3]) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let (range, residual) = self.scan(order, pattern);
        self.index(order)[range]
            .iter()
            .map(move |&k| order.unkey(k))
            .filter(move |t| (0..3).all(|i| residual[i].is_none_or(|id| t[i] == id)))
    }

    /// Id triples matching a pattern of optional ids, via the index that fits.
    pub fn match_ids(&self, pattern: [Option<TermId>; 3]) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let order = IndexOrder::for_bound(pattern[0].is_some(), pattern[1].is_some(), pattern[2].is_some());
        self.ids_in(order, pattern)
    }

    /// Number of matches. Exact and cheap when the bound positions form an index prefix.
    pub fn count_ids(&self, pattern: [Option<TermId>; 3]) -> usize {
        let order = IndexOrder::for_bound(pattern[0].is_some(), pattern[1].is_some(), pattern[2].is_some());
        let (range, residual) = self.scan(order, pattern);
        if residual.iter().all(Option::is_none) {
            range.len()
        } else {
            self.ids_in(order, pattern).count()
        }
    }

    fn resolve(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Option<[Option<TermId>; 3]> {
        let mut out = [None; 3];
        for (slot, term) in out.iter_mut().zip([s, p, o]) {
            if let Some(t) = term {
                *slot = Some(self.dict.id(t)?);
            }
        }
        Some(out)
    }

    fn materialize(&self, t: [TermId; 3]) -> Triple {
        let [s, p, o] = t.map(|id| self.dict.term(id).clone());
        Triple::from_terms(s, p, o).expect("stored triples are well-formed")
    }

    /// Triples matching a pattern; `None` is a wildcard. Sorted by id order of the chosen index.
    pub fn match_pattern(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        match self.resolve(s, p, o) {
            Some(pat) => self.match_ids(pat).map(|t| self.materialize(t)).collect(),
            None => Vec::new(),
        }
    }

    /// Like [`Store::match_pattern`], forcing a particular index.
    pub fn match_in(&self, order: IndexOrder, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        match self.resolve(s, p, o) {
            Some(pat) => self.ids_in(order, pat).map(|t| self.materialize(t)).collect(),
            None => Vec::new(),
        }
    }

    pub fn count(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> usize {
        self.resolve(s, p, o).map_or(0, |pat| self.count_ids(pat))
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.count(Some(t.subject()), Some(t.predicate()), Some(t.object())) == 1
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&t| self.materialize(t))
    }
}
