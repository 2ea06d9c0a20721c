#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use outagekg_core::ingest::{write_ntl_grid, DEFAULT_CELL_SIZE};
use outagekg_core::model::{BBox, CountyMeta, DayStamp, Georef, RadianceGrid};
use outagekg_core::rdf::{xsd, Term, Triple, RDF_TYPE};
use outagekg_core::store::SolutionTable;
use outagekg_core::turtle::PrefixMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn day(s: &str) -> DayStamp {
    DayStamp::parse(s).unwrap()
}

// ---------------------------------------------------------------- grids

/// `h`×`w` grid anchored at the county's south-west corner.
pub fn county_georef(county: &CountyMeta, h: usize, w: usize) -> Georef {
    let c = DEFAULT_CELL_SIZE;
    let (x0, y0) = (county.bbox.min_lon, county.bbox.min_lat);
    let bbox = BBox::new(x0, y0, x0 + w as f64 * c, y0 + h as f64 * c).unwrap();
    Georef::new(h, w, bbox, c).unwrap()
}

pub fn save_grid(dir: &Path, grid: &RadianceGrid) {
    let path = dir.join(format!("{}_{}.ntl.csv", grid.fips, grid.date));
    let f = std::fs::File::create(path).unwrap();
    write_ntl_grid(std::io::BufWriter::new(f), grid).unwrap();
}

// ---------------------------------------------------------------- severity oracle

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OraclePixel {
    Sev(f64),
    Unlit,
    Missing,
}

/// Straight transcription of the per-pixel rule.
pub fn oracle_pixel(current: Option<f64>, mean: f64, count: u32, dim: f64, min_valid: u32) -> OraclePixel {
    match current {
        None => OraclePixel::Missing,
        Some(_) if count < min_valid => OraclePixel::Unlit,
        Some(_) if mean < dim || mean <= 0.0 => OraclePixel::Unlit,
        Some(c) => {
            OraclePixel::Sev(((mean - c) / mean).clamp(0.0, 1.0))
        }
    }
}

/// Collect the non-missing values per pixel, then average.
pub fn oracle_baseline(history: &[RadianceGrid], target: DayStamp, window_days: i64) -> Vec<(f64, u32)> {
    let n = history.first().map_or(0, |g| g.values().len());
    (0..n)
        .map(|i| {
            let vals: Vec<f64> = history
                .iter()
                .filter(|g| g.date < target && target.days_since(g.date) <= window_days)
                .filter_map(|g| g.values()[i])
                .collect();
            if vals.is_empty() {
                (0.0, 0)
            } else {
                (vals.iter().sum::<f64>() / vals.len() as f64, vals.len() as u32)
            }
        })
        .collect()
}

// ---------------------------------------------------------------- adversarial triples

pub const EX: &str = "https://example.org/geooutagekg/";
pub const GEO: &str = "https://purl.org/geooutagekg/ontology#";

pub fn test_prefixes() -> PrefixMap {
    let mut p = PrefixMap::new();
    p.insert("ex", EX).unwrap();
    p.insert("geo", GEO).unwrap();
    p.insert("exs", "https://example.org/geooutagekg/sub/").unwrap();
    p.insert("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#").unwrap();
    p.insert("xsd", xsd::STRING.trim_end_matches("string")).unwrap();
    p
}

const NASTY: &[&str] = &[
    "a", "Z", "0", " ", "\"", "'", "\\", "\n", "\r", "\t", "\u{0}", "\u{7f}", "\u{1}", "é", "日本", "😀", "#", "<", ">", ".",
    ";", ",", "@", "^", "_", ":", "\"\"\"", "''", "%20", "\\u0041", "${x}",
];

fn nasty_string(rng: &mut impl Rng, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *NASTY.choose(rng).unwrap()).collect()
}

const IRI_CHARS: &[&str] = &[
    "a", "b", "Z", "9", "_", "-", ".", "%41", "/", "#", "é", "~", " ", ">", "\\", "{", "`", "q.r", ":", "(", ")",
];

fn random_iri(rng: &mut impl Rng) -> String {
    let ns = [EX, GEO, "https://example.org/geooutagekg/sub/", "http://other.test/x/", "urn:x:"]
        .choose(rng)
        .unwrap();
    let n = rng.gen_range(0..6);
    let local: String = (0..n).map(|_| *IRI_CHARS.choose(rng).unwrap()).collect();
    format!("{ns}{local}")
}

fn random_literal(rng: &mut impl Rng) -> Term {
    let sign = || ["", "+", "-"];
    match rng.gen_range(0..9) {
        0 | 1 => Term::plain(nasty_string(rng, 8)),
        2 => {
            let s = *sign().choose(rng).unwrap();
            let zeros = if rng.gen_bool(0.2) { "00" } else { "" };
            Term::typed(format!("{s}{zeros}{}", rng.gen_range(0u64..1_000_000_000_000)), xsd::INTEGER)
        }
        3 => {
            let s = *sign().choose(rng).unwrap();
            let int = if rng.gen_bool(0.2) { String::new() } else { rng.gen_range(0..10_000).to_string() };
            Term::typed(format!("{s}{int}.{}", rng.gen_range(0..1000)), xsd::DECIMAL)
        }
        4 => Term::typed(format!("{}e{}", rng.gen_range(-50..50), rng.gen_range(-5..5)), xsd::DOUBLE),
        5 => Term::typed(
            format!(
                "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
                rng.gen_range(2000..2030),
                rng.gen_range(1..13),
                rng.gen_range(1..29),
                rng.gen_range(0..24),
                rng.gen_range(0..60),
                rng.gen_range(0..60)
            ),
            xsd::DATE_TIME,
        ),
        6 => Term::typed(
            format!("{:04}-{:02}-{:02}", rng.gen_range(1..10000), rng.gen_range(1..13), rng.gen_range(1..29)),
            xsd::DATE,
        ),
        7 => Term::typed(nasty_string(rng, 5), random_iri(rng)),
        _ => Term::typed(nasty_string(rng, 4), xsd::ANY_URI),
    }
}

/// Up to `max` triples with awkward IRIs and literals.
pub fn random_triples(rng: &mut impl Rng, max: usize) -> Vec<Triple> {
    let n = rng.gen_range(0..=max);
    let subjects: Vec<String> = (0..rng.gen_range(1..40)).map(|_| random_iri(rng)).collect();
    let predicates: Vec<String> = (0..rng.gen_range(1..8))
        .map(|_| random_iri(rng))
        .chain([RDF_TYPE.to_string()])
        .collect();
    (0..n)
        .map(|_| {
            let s = subjects.choose(rng).unwrap().clone();
            let p = predicates.choose(rng).unwrap().clone();
            let o = if rng.gen_bool(0.3) {
                Term::iri(subjects.choose(rng).unwrap().clone())
            } else {
                random_literal(rng)
            };
            // duplicates on purpose
            Triple::new(s, p, o)
        })
        .collect()
}

// ---------------------------------------------------------------- query oracle

const T: &str = "http://t/";

fn t_iri(local: &str) -> Term {
    Term::iri(format!("{T}{local}"))
}

fn object_pool() -> Vec<Term> {
    let mut v: Vec<Term> = (0..8).map(|i| t_iri(&format!("s{i}"))).collect();
    v.extend((0..3).map(|i| t_iri(&format!("C{i}"))));
    v.extend([-3i64, 0, 1, 2, 5, 10, 40, 100_001].map(Term::integer));
    v.extend(["2.5", "-1.25", "10.0", "1.0"].map(|d| Term::typed(d, xsd::DECIMAL)));
    v.extend(["a", "b", "Lee", "lee", "z z", ""].map(Term::plain));
    for h in [10, 12, 16] {
        for m in [0, 15, 45] {
            v.push(Term::typed(format!("2022-09-28T{h:02}:{m:02}:00Z"), xsd::DATE_TIME));
        }
    }
    v
}

fn predicate_pool() -> Vec<Term> {
    let mut v: Vec<Term> = (0..4).map(|i| t_iri(&format!("p{i}"))).collect();
    v.push(Term::iri(RDF_TYPE));
    v
}

pub fn random_store(rng: &mut impl Rng, max: usize) -> Vec<Triple> {
    let n = rng.gen_range(0..=max);
    let objects = object_pool();
    let preds = predicate_pool();
    let n_subj = rng.gen_range(1..=8);
    (0..n)
        .map(|_| {
            let s = format!("{T}s{}", rng.gen_range(0..n_subj));
            let p = preds.choose(rng).unwrap().clone();
            let o = if p.as_iri() == Some(RDF_TYPE) {
                t_iri(&format!("C{}", rng.gen_range(0..3)))
            } else {
                objects.choose(rng).unwrap().clone()
            };
            Triple::new(s, p.as_iri().unwrap(), o)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum QTerm {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl QOp {
    fn text(self) -> &'static str {
        match self {
            QOp::Eq => "=",
            QOp::Ne => "!=",
            QOp::Lt => "<",
            QOp::Le => "<=",
            QOp::Gt => ">",
            QOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub enum QFilter {
    Cmp(QTerm, QOp, QTerm),
    And(Box<QFilter>, Box<QFilter>),
    Or(Box<QFilter>, Box<QFilter>),
    Not(Box<QFilter>),
}

#[derive(Debug, Clone)]
pub struct GenQuery {
    pub select: Vec<usize>,
    pub distinct: bool,
    pub patterns: Vec<[QTerm; 3]>,
    pub filters: Vec<QFilter>,
    pub order: Vec<(usize, bool)>,
    pub limit: Option<usize>,
}

fn term_text(t: &Term) -> String {
    // N-Triples forms are valid query syntax for everything generated here
    t.canonical()
}

fn qterm_text(t: &QTerm) -> String {
    match t {
        QTerm::Var(v) => format!("?v{v}"),
        QTerm::Const(c) => term_text(c),
    }
}

fn filter_text(f: &QFilter) -> String {
    match f {
        QFilter::Cmp(a, op, b) => format!("{} {} {}", qterm_text(a), op.text(), qterm_text(b)),
        QFilter::And(a, b) => format!("({} && {})", filter_text(a), filter_text(b)),
        QFilter::Or(a, b) => format!("({} || {})", filter_text(a), filter_text(b)),
        QFilter::Not(a) => format!("!({})", filter_text(a)),
    }
}

impl GenQuery {
    pub fn variables(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for p in &self.patterns {
            for t in p {
                if let QTerm::Var(i) = t {
                    if !v.contains(i) {
                        v.push(*i);
                    }
                }
            }
        }
        v
    }

    pub fn to_sparql(&self) -> String {
        let mut q = String::from("SELECT ");
        if self.distinct {
            q.push_str("DISTINCT ");
        }
        for v in &self.select {
            let _ = write!(q, "?v{v} ");
        }
        q.push_str("WHERE {\n");
        for p in &self.patterns {
            let _ = writeln!(q, "  {} {} {} .", qterm_text(&p[0]), qterm_text(&p[1]), qterm_text(&p[2]));
        }
        for f in &self.filters {
            let _ = writeln!(q, "  FILTER({})", filter_text(f));
        }
        q.push('}');
        if !self.order.is_empty() {
            q.push_str(" ORDER BY");
            for (v, desc) in &self.order {
                if *desc {
                    let _ = write!(q, " DESC(?v{v})");
                } else if v % 2 == 0 {
                    let _ = write!(q, " ?v{v}");
                } else {
                    let _ = write!(q, " ASC(?v{v})");
                }
            }
        }
        if let Some(n) = self.limit {
            let _ = write!(q, " LIMIT {n}");
        }
        q
    }

    pub fn order_covers_select(&self) -> bool {
        self.select.iter().all(|v| self.order.iter().any(|(o, _)| o == v))
    }
}

fn random_filter(rng: &mut impl Rng, vars: &[usize], depth: u32) -> QFilter {
    if depth == 0 || rng.gen_bool(0.6) {
        let ops = [QOp::Eq, QOp::Ne, QOp::Lt, QOp::Le, QOp::Gt, QOp::Ge];
        let op = *ops.choose(rng).unwrap();
        let var = QTerm::Var(*vars.choose(rng).unwrap());
        let other = if rng.gen_bool(0.2) {
            QTerm::Var(*vars.choose(rng).unwrap())
        } else {
            QTerm::Const(object_pool().choose(rng).unwrap().clone())
        };
        return if rng.gen_bool(0.3) {
            QFilter::Cmp(other, op, var)
        } else {
            QFilter::Cmp(var, op, other)
        };
    }
    match rng.gen_range(0..3) {
        0 => QFilter::And(
            Box::new(random_filter(rng, vars, depth - 1)),
            Box::new(random_filter(rng, vars, depth - 1)),
        ),
        1 => QFilter::Or(
            Box::new(random_filter(rng, vars, depth - 1)),
            Box::new(random_filter(rng, vars, depth - 1)),
        ),
        _ => QFilter::Not(Box::new(random_filter(rng, vars, depth - 1))),
    }
}

/// Random SELECT. LIMIT appears only when the ORDER BY keys cover every
/// selected variable, so the expected rows are fully determined.
pub fn random_query(rng: &mut impl Rng, n_patterns: usize) -> GenQuery {
    let objects = object_pool();
    let preds = predicate_pool();
    let mut used: Vec<usize> = Vec::new();
    let mut next_var = 0usize;
    let mut var = |rng: &mut ChaCha8Rng, used: &mut Vec<usize>| -> QTerm {
        if !used.is_empty() && rng.gen_bool(0.6) {
            QTerm::Var(*used.choose(rng).unwrap())
        } else {
            let v = next_var;
            next_var += 1;
            used.push(v);
            QTerm::Var(v)
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let rng2 = &mut local;
    let mut patterns = Vec::new();
    for _ in 0..n_patterns {
        let s = if rng2.gen_bool(0.85) {
            var(rng2, &mut used)
        } else {
            QTerm::Const(t_iri(&format!("s{}", rng2.gen_range(0..8))))
        };
        let p = if rng2.gen_bool(0.8) {
            QTerm::Const(preds.choose(rng2).unwrap().clone())
        } else {
            var(rng2, &mut used)
        };
        let o = if rng2.gen_bool(0.7) {
            var(rng2, &mut used)
        } else {
            QTerm::Const(objects.choose(rng2).unwrap().clone())
        };
        patterns.push([s, p, o]);
    }
    let mut vars: Vec<usize> = Vec::new();
    for p in &patterns {
        for t in p {
            if let QTerm::Var(v) = t {
                if !vars.contains(v) {
                    vars.push(*v);
                }
            }
        }
    }
    if vars.is_empty() {
        // need at least one variable to select
        patterns[0][0] = QTerm::Var(0);
        vars.push(0);
    }
    let filters = (0..rng2.gen_range(0..=2)).map(|_| random_filter(rng2, &vars, 2)).collect();
    let mut select = vars.clone();
    select.shuffle(rng2);
    select.truncate(rng2.gen_range(1..=vars.len()));
    let distinct = rng2.gen_bool(0.3);
    let mut order = Vec::new();
    if rng2.gen_bool(0.5) {
        let mut keys = vars.clone();
        keys.shuffle(rng2);
        keys.truncate(rng2.gen_range(1..=vars.len()));
        order = keys.into_iter().map(|v| (v, rng2.gen_bool(0.4))).collect();
    }
    let mut q = GenQuery {
        select,
        distinct,
        patterns,
        filters,
        order,
        limit: None,
    };
    if !q.order.is_empty() && q.order_covers_select() && rng2.gen_bool(0.6) {
        q.limit = Some(rng2.gen_range(0..12));
    }
    q
}

#[derive(Debug, Clone, Copy)]
enum Kind<'a> {
    Iri(&'a str),
    Int(i128),
    Dec(f64),
    Dt(&'a str),
    Str(&'a str),
}

fn kind(t: &Term) -> Kind<'_> {
    match t {
        Term::Iri(i) => Kind::Iri(i),
        Term::Plain(s) => Kind::Str(s),
        Term::Typed { lexical, datatype } => match datatype.as_str() {
            xsd::INTEGER => Kind::Int(lexical.parse().unwrap()),
            xsd::DECIMAL => Kind::Dec(lexical.parse().unwrap()),
            // generated timestamps share one fixed-width UTC format
            xsd::DATE_TIME => Kind::Dt(lexical),
            other => panic!("oracle does not model {other}"),
        },
    }
}

fn num(k: Kind) -> Option<f64> {
    match k {
        Kind::Int(i) => Some(i as f64),
        Kind::Dec(d) => Some(d),
        _ => None,
    }
}

fn oracle_cmp(a: &Term, op: QOp, b: &Term) -> Option<bool> {
    let ord = match (kind(a), kind(b)) {
        (Kind::Int(x), Kind::Int(y)) => Some(x.cmp(&y)),
        (Kind::Dt(x), Kind::Dt(y)) | (Kind::Str(x), Kind::Str(y)) => Some(x.cmp(y)),
        (ka, kb) => match (num(ka), num(kb)) {
            (Some(x), Some(y)) => x.partial_cmp(&y),
            _ => None,
        },
    };
    match ord {
        Some(o) => Some(match op {
            QOp::Eq => o == Ordering::Equal,
            QOp::Ne => o != Ordering::Equal,
            QOp::Lt => o == Ordering::Less,
            QOp::Le => o != Ordering::Greater,
            QOp::Gt => o == Ordering::Greater,
            QOp::Ge => o != Ordering::Less,
        }),
        None => match op {
            QOp::Eq | QOp::Ne => {
                let same = a == b;
                if same || a.is_iri() || b.is_iri() {
                    Some(if op == QOp::Eq { same } else { !same })
                } else {
                    None
                }
            }
            _ => None,
        },
    }
}

fn oracle_filter(f: &QFilter, row: &[Option<Term>]) -> Option<bool> {
    let val = |t: &QTerm| -> Term {
        match t {
            QTerm::Var(v) => row[*v].clone().unwrap(),
            QTerm::Const(c) => c.clone(),
        }
    };
    match f {
        QFilter::Cmp(a, op, b) => oracle_cmp(&val(a), *op, &val(b)),
        QFilter::And(a, b) => {
            let (x, y) = (oracle_filter(a, row), oracle_filter(b, row));
            if x == Some(false) || y == Some(false) {
                Some(false)
            } else if x.is_none() || y.is_none() {
                None
            } else {
                Some(true)
            }
        }
        QFilter::Or(a, b) => {
            let (x, y) = (oracle_filter(a, row), oracle_filter(b, row));
            if x == Some(true) || y == Some(true) {
                Some(true)
            } else if x.is_none() || y.is_none() {
                None
            } else {
                Some(false)
            }
        }
        QFilter::Not(a) => oracle_filter(a, row).map(|v| !v),
    }
}

fn rank(k: Kind) -> u8 {
    match k {
        Kind::Iri(_) => 0,
        Kind::Int(_) | Kind::Dec(_) => 1,
        Kind::Dt(_) => 2,
        Kind::Str(_) => 4,
    }
}

pub fn oracle_order(a: &Term, b: &Term) -> Ordering {
    let (ka, kb) = (kind(a), kind(b));
    let by_value = match (ka, kb) {
        (Kind::Int(x), Kind::Int(y)) => x.cmp(&y),
        (Kind::Iri(x), Kind::Iri(y)) | (Kind::Dt(x), Kind::Dt(y)) | (Kind::Str(x), Kind::Str(y)) => x.cmp(y),
        _ => match (num(ka), num(kb)) {
            (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
            _ => Ordering::Equal,
        },
    };
    rank(ka)
        .cmp(&rank(kb))
        .then(by_value)
        .then_with(|| a.lexical().cmp(b.lexical()))
        .then_with(|| a.datatype().cmp(&b.datatype()))
}

/// Plain nested loops over the triple list in pattern order. `None` when an
/// intermediate result grows past `cap`.
pub fn oracle_eval(triples: &[Triple], q: &GenQuery, cap: usize) -> Option<Vec<Vec<Term>>> {
    let nvars = q.variables().into_iter().max().map_or(0, |m| m + 1);
    let mut sols: Vec<Vec<Option<Term>>> = vec![vec![None; nvars]];
    for pat in &q.patterns {
        let mut next = Vec::new();
        for sol in &sols {
            for t in triples {
                let parts = [t.subject(), t.predicate(), t.object()];
                let mut cand = sol.clone();
                let mut ok = true;
                for (pt, val) in pat.iter().zip(parts) {
                    match pt {
                        QTerm::Const(c) => ok &= c == val,
                        QTerm::Var(v) => match &cand[*v] {
                            Some(bound) => ok &= bound == val,
                            None => cand[*v] = Some(val.clone()),
                        },
                    }
                }
                if ok {
                    next.push(cand);
                }
            }
        }
        if next.len() > cap {
            return None;
        }
        sols = next;
    }
    sols.retain(|row| q.filters.iter().all(|f| oracle_filter(f, row) == Some(true)));
    sols.sort_by(|a, b| {
        for (v, desc) in &q.order {
            let o = oracle_order(a[*v].as_ref().unwrap(), b[*v].as_ref().unwrap());
            let o = if *desc { o.reverse() } else { o };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });
    let mut rows: Vec<Vec<Term>> = sols
        .into_iter()
        .map(|s| q.select.iter().map(|v| s[*v].clone().unwrap()).collect())
        .collect();
    if q.distinct {
        let mut seen = HashSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    if let Some(n) = q.limit {
        rows.truncate(n);
    }
    Some(rows)
}

fn sorted_rows(rows: &[Vec<Term>]) -> Vec<Vec<String>> {
    let mut v: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Term::canonical).collect()).collect();
    v.sort();
    v
}

/// Engine rows against oracle rows: exact sequence when the order is fully
/// determined, multiset equality otherwise.
pub fn compare_rows(q: &GenQuery, engine: &SolutionTable, oracle: &[Vec<Term>]) -> Result<(), String> {
    let header: Vec<String> = q.select.iter().map(|v| format!("v{v}")).collect();
    if engine.variables != header {
        return Err(format!("header {:?} != {:?}", engine.variables, header));
    }
    if !q.order.is_empty() && q.order_covers_select() {
        if engine.rows != oracle {
            return Err(format!("ordered rows differ:\nengine {:?}\noracle {:?}", engine.rows, oracle));
        }
        return Ok(());
    }
    if sorted_rows(&engine.rows) != sorted_rows(oracle) {
        return Err(format!(
            "row multisets differ: engine {} rows, oracle {} rows",
            engine.rows.len(),
            oracle.len()
        ));
    }
    Ok(())
}
