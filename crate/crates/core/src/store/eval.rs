use std::collections::HashSet;
use std::io::Write;

use super::query::{CompareOp, Expr, Operand, PatternTerm, Query};
use super::value::{compare_terms, order_terms};
use super::{Store, TermDictionary, TermId};
use crate::rdf::Term;

/// Query result: one row per solution, columns in `variables` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header of variable names, then IRIs and literal lexical forms.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        w.write_record(&self.variables)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Term::lexical))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(TermId),
}

enum Cond {
    Compare(COperand, CompareOp, COperand),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

enum COperand {
    Var(usize),
    Const(Term),
}

fn slot_of(vars: &[&str], name: &str) -> usize {
    vars.iter().position(|v| *v == name).expect("query checked at parse time")
}

fn compile_expr(e: &Expr, vars: &[&str]) -> Cond {
    let op = |o: &Operand| match o {
        Operand::Var(v) => COperand::Var(slot_of(vars, v)),
        Operand::Const(t) => COperand::Const(t.clone()),
    };
    match e {
        Expr::Compare(a, o, b) => Cond::Compare(op(a), *o, op(b)),
        Expr::And(a, b) => Cond::And(Box::new(compile_expr(a, vars)), Box::new(compile_expr(b, vars))),
        Expr::Or(a, b) => Cond::Or(Box::new(compile_expr(a, vars)), Box::new(compile_expr(b, vars))),
        Expr::Not(a) => Cond::Not(Box::new(compile_expr(a, vars))),
    }
}

/// Three-valued: `None` is an evaluation error.
fn eval_cond(c: &Cond, row: &[Option<TermId>], dict: &TermDictionary) -> Option<bool> {
    match c {
        Cond::Compare(a, op, b) => {
            fn get<'a>(o: &'a COperand, row: &[Option<TermId>], dict: &'a TermDictionary) -> &'a Term {
                match o {
                    COperand::Var(i) => dict.term(row[*i].expect("filter placed after its variables bind")),
                    COperand::Const(t) => t,
                }
            }
            compare_terms(get(a, row, dict), *op, get(b, row, dict))
        }
        Cond::And(a, b) => match (eval_cond(a, row, dict), eval_cond(b, row, dict)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Cond::Or(a, b) => match (eval_cond(a, row, dict), eval_cond(b, row, dict)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Cond::Not(a) => eval_cond(a, row, dict).map(|v| !v),
    }
}

struct Plan {
    steps: Vec<[Slot; 3]>,
    /// Filters checked right after step `i` (index 0 = before any step).
    filters_at: Vec<Vec<Cond>>,
}

fn plan(store: &Store, patterns: Vec<[Slot; 3]>, filters: Vec<(Cond, Vec<usize>)>) -> Plan {
    let mut remaining = patterns;
    let mut bound: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let vars_of = |p: &[Slot; 3]| -> Vec<usize> {
        p.iter()
            .filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                Slot::Const(_) => None,
            })
            .collect()
    };
    while !remaining.is_empty() {
        let best = (0..remaining.len())
            .min_by_key(|&i| {
                let p = &remaining[i];
                let vars = vars_of(p);
                let connected = bound.is_empty() || vars.iter().any(|v| bound.contains(v));
                let bound_positions = p
                    .iter()
                    .filter(|s| match s {
                        Slot::Const(_) => true,
                        Slot::Var(v) => bound.contains(v),
                    })
                    .count();
                let consts = p.map(|s| match s {
                    Slot::Const(id) => Some(id),
                    Slot::Var(_) => None,
                });
                (!connected, 3 - bound_positions, store.count_ids(consts))
            })
            .expect("nonempty");
        let p = remaining.remove(best);
        for v in vars_of(&p) {
            if !bound.contains(&v) {
                bound.push(v);
            }
        }
        steps.push((p, bound.clone()));
    }
    let mut filters_at: Vec<Vec<Cond>> = (0..=steps.len()).map(|_| Vec::new()).collect();
    for (cond, vars) in filters {
        let level = if vars.is_empty() {
            0
        } else {
            steps
                .iter()
                .position(|(_, b)| vars.iter().all(|v| b.contains(v)))
                .expect("filter variables appear in patterns")
                + 1
        };
        filters_at[level].push(cond);
    }
    Plan {
        steps: steps.into_iter().map(|(p, _)| p).collect(),
        filters_at,
    }
}

struct Search<'a> {
    store: &'a Store,
    plan: &'a Plan,
    out: Vec<Vec<TermId>>,
    /// Stop after this many solutions.
    cap: Option<usize>,
}

impl Search<'_> {
    fn passes(&self, level: usize, row: &[Option<TermId>]) -> bool {
        self.plan.filters_at[level]
            .iter()
            .all(|c| eval_cond(c, row, self.store.dictionary()) == Some(true))
    }

    fn full(&self) -> bool {
        self.cap.is_some_and(|c| self.out.len() >= c)
    }

    fn run(&mut self, step: usize, row: &mut Vec<Option<TermId>>) {
        if self.full() {
            return;
        }
        if step == self.plan.steps.len() {
            self.out.push(row.iter().map(|v| v.expect("all variables bound")).collect());
            return;
        }
        let pat = self.plan.steps[step];
        let ids = pat.map(|s| match s {
            Slot::Const(id) => Some(id),
            Slot::Var(v) => row[v],
        });
        let store = self.store;
        for t in store.match_ids(ids) {
            let mut assigned = [usize::MAX; 3];
            let mut ok = true;
            for (i, s) in pat.iter().enumerate() {
                if let Slot::Var(v) = *s {
                    match row[v] {
                        Some(id) if id != t[i] => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            row[v] = Some(t[i]);
                            assigned[i] = v;
                        }
                    }
                }
            }
            if ok && self.passes(step + 1, row) {
                self.run(step + 1, row);
            }
            for v in assigned.into_iter().filter(|&v| v != usize::MAX) {
                row[v] = None;
            }
            if self.full() {
                return;
            }
        }
    }
}

/// Evaluates a parsed query.
///
/// Basic graph pattern matching by index nested-loop join, filters as soon as
/// their variables bind, then ORDER BY, projection, DISTINCT, LIMIT.
pub fn evaluate(store: &Store, query: &Query) -> SolutionTable {
    let vars = query.pattern_variables();
    let empty = SolutionTable {
        variables: query.select.clone(),
        rows: Vec::new(),
    };
    let dict = store.dictionary();
    let mut patterns = Vec::with_capacity(query.patterns.len());
    for p in &query.patterns {
        let mut slots = [Slot::Var(0); 3];
        for (slot, term) in slots.iter_mut().zip(p.terms()) {
            *slot = match term {
                PatternTerm::Var(v) => Slot::Var(slot_of(&vars, v)),
                PatternTerm::Const(t) => match dict.id(t) {
                    Some(id) => Slot::Const(id),
                    None => return empty,
                },
            };
        }
        patterns.push(slots);
    }
    let filters = query
        .filters
        .iter()
        .map(|f| {
            let fv = f.variables().into_iter().map(|v| slot_of(&vars, v)).collect();
            (compile_expr(f, &vars), fv)
        })
        .collect();
    let plan = plan(store, patterns, filters);

    let mut search = Search {
        store,
        plan: &plan,
        out: Vec::new(),
        cap: if query.order_by.is_empty() && !query.distinct { query.limit } else { None },
    };
    let mut row = vec![None; vars.len()];
    if search.passes(0, &row) {
        search.run(0, &mut row);
    }
    let mut solutions = search.out;

    if !query.order_by.is_empty() {
        let keys: Vec<(usize, bool)> = query
            .order_by
            .iter()
            .map(|k| (slot_of(&vars, &k.var), k.descending))
            .collect();
        solutions.sort_by(|a, b| {
            keys.iter()
                .map(|&(i, desc)| {
                    let o = order_terms(dict.term(a[i]), dict.term(b[i]));
                    if desc {
                        o.reverse()
                    } else {
                        o
                    }
                })
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    let proj: Vec<usize> = query.select.iter().map(|v| slot_of(&vars, v)).collect();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for s in solutions {
        if query.limit.is_some_and(|n| rows.len() >= n) {
            break;
        }
        let ids: Vec<TermId> = proj.iter().map(|&i| s[i]).collect();
        if query.distinct && !seen.insert(ids.clone()) {
            continue;
        }
        rows.push(ids.into_iter().map(|id| dict.term(id).clone()).collect());
    }
    SolutionTable {
        variables: query.select.clone(),
        rows,
    }
}
