use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use super::{Comparison, Expression, PatternElement, QueryAst, TermPattern, TriplePattern};
use crate::graph::Repository;
use crate::term::{Iri, Literal, Term};
use crate::vocab::xsd;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable ?{0} is used in BIND but never bound")]
    UnboundVariable(String),
    #[error("BIND(... AS ?{target}) failed: {message}")]
    BindType { target: String, message: String },
    #[error("unknown graph <{0}>")]
    UnknownGraph(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionTable {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: usize, variable: &str) -> Option<&Term> {
        let col = self.variables.iter().position(|v| v == variable)?;
        self.rows.get(row)?.get(col)?.as_ref()
    }

    pub fn column(&self, variable: &str) -> Vec<Option<&Term>> {
        match self.variables.iter().position(|v| v == variable) {
            Some(col) => self.rows.iter().map(|r| r[col].as_ref()).collect(),
            None => Vec::new(),
        }
    }
}

type Row = Vec<Option<Term>>;

struct Slots(HashMap<String, usize>);

impl Slots {
    fn of(&self, name: &str) -> usize {
        self.0[name]
    }
}

pub fn evaluate(repo: &Repository, graph: &Iri, ast: &QueryAst) -> Result<SolutionTable, EvalError> {
    if !repo.graph_names().any(|g| g == graph) {
        return Err(EvalError::UnknownGraph(graph.as_str().to_string()));
    }
    let mut names: Vec<String> = Vec::new();
    let mut note = |v: &str| {
        if !names.iter().any(|n| n == v) {
            names.push(v.to_string());
        }
    };
    let mut bound: HashSet<&str> = HashSet::new();
    for element in &ast.patterns {
        match element {
            PatternElement::Triple(tp) => {
                for v in tp.variables() {
                    note(v);
                    bound.insert(v);
                }
            }
            PatternElement::Bind { expression, target } => {
                for v in expression.variables() {
                    if !bound.contains(v) {
                        return Err(EvalError::UnboundVariable(v.to_string()));
                    }
                }
                note(target);
                bound.insert(target);
            }
            PatternElement::Filter(e) => e.variables().into_iter().for_each(&mut note),
        }
    }
    for v in &ast.projection {
        note(v);
    }
    let slots = Slots(names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect());

    let mut rows: Vec<Row> = vec![vec![None; names.len()]];
    let mut pending: Vec<&TriplePattern> = Vec::new();
    let mut filters: Vec<&Expression> = Vec::new();
    for element in &ast.patterns {
        match element {
            PatternElement::Triple(tp) => pending.push(tp),
            PatternElement::Bind { expression, target } => {
                rows = join(repo, graph, &slots, rows, std::mem::take(&mut pending));
                let slot = slots.of(target);
                for row in &mut rows {
                    let value = eval_expr(expression, row, &slots).map_err(|message| EvalError::BindType {
                        target: target.clone(),
                        message,
                    })?;
                    row[slot] = Some(value);
                }
            }
            PatternElement::Filter(e) => filters.push(e),
        }
    }
    rows = join(repo, graph, &slots, rows, pending);
    rows.retain(|row| filters.iter().all(|f| eval_expr(f, row, &slots).and_then(|t| ebv(&t)) == Ok(true)));

    let cols: Vec<usize> = ast.projection.iter().map(|v| slots.of(v)).collect();
    let mut keyed: Vec<(Vec<String>, Row)> = rows
        .into_iter()
        .map(|row| {
            let projected: Row = cols.iter().map(|&c| row[c].clone()).collect();
            (sort_key(&projected), projected)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    if ast.distinct {
        keyed.dedup_by(|a, b| a.0 == b.0);
    }
    Ok(SolutionTable {
        variables: ast.projection.clone(),
        rows: keyed.into_iter().map(|(_, r)| r).collect(),
    })
}

fn sort_key(row: &Row) -> Vec<String> {
    row.iter()
        .map(|t| t.as_ref().map(Term::to_ntriples).unwrap_or_default())
        .collect()
}

/// Nested-loop join, picking at each step the pattern with the fewest
/// positions left open by the variables bound so far.
fn join(repo: &Repository, graph: &Iri, slots: &Slots, mut rows: Vec<Row>, mut pending: Vec<&TriplePattern>) -> Vec<Row> {
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    if let Some(first) = rows.first() {
        for (name, &i) in &slots.0 {
            if first[i].is_some() {
                bound.insert(name);
            }
        }
    }
    while !pending.is_empty() && !rows.is_empty() {
        let open = |tp: &TriplePattern| tp.variables().filter(|v| !bound.contains(v)).count();
        let (idx, _) = pending
            .iter()
            .enumerate()
            .min_by_key(|(i, tp)| (open(tp), *i))
            .expect("pending is non-empty");
        let tp = pending.remove(idx);
        rows = rows.iter().flat_map(|row| extend(repo, graph, slots, row, tp)).collect();
        bound.extend(tp.variables());
    }
    if !pending.is_empty() {
        rows.clear();
    }
    rows
}

fn extend(repo: &Repository, graph: &Iri, slots: &Slots, row: &Row, tp: &TriplePattern) -> Vec<Row> {
    let resolve = |p: &TermPattern| -> Option<Term> {
        match p {
            TermPattern::Term(t) => Some(t.clone()),
            TermPattern::Variable(v) => row[slots.of(v)].clone(),
        }
    };
    let [s, p, o] = tp.positions().map(resolve);
    // Only IRIs can be predicates and literals cannot be subjects.
    if p.as_ref().is_some_and(|t| t.as_iri().is_none()) || s.as_ref().is_some_and(Term::is_literal) {
        return Vec::new();
    }
    let mut out = Vec::new();
    'triples: for (triple, _) in repo.triples_matching(graph, s.as_ref(), p.as_ref(), o.as_ref()) {
        let mut next = row.clone();
        let values = [triple.subject(), triple.predicate(), triple.object()];
        for (pattern, value) in tp.positions().into_iter().zip(values) {
            if let TermPattern::Variable(v) = pattern {
                let slot = &mut next[slots.of(v)];
                match slot {
                    Some(existing) if existing != value => continue 'triples,
                    Some(_) => {}
                    None => *slot = Some(value.clone()),
                }
            }
        }
        out.push(next);
    }
    out
}

enum Value<'a> {
    Number(f64),
    Text(&'a str),
    Bool(bool),
    Other(&'a Term),
}

fn value_of(term: &Term) -> Value<'_> {
    let Some(lit) = term.as_literal() else {
        return Value::Other(term);
    };
    let dt = lit.datatype().as_str();
    if lit.is_numeric() {
        if let Ok(n) = lit.lexical().trim().parse::<f64>() {
            return Value::Number(n);
        }
    } else if dt == xsd::STRING {
        return Value::Text(lit.lexical());
    } else if dt == xsd::BOOLEAN {
        match lit.lexical() {
            "true" | "1" => return Value::Bool(true),
            "false" | "0" => return Value::Bool(false),
            _ => {}
        }
    }
    Value::Other(term)
}

/// Effective boolean value.
fn ebv(term: &Term) -> Result<bool, String> {
    match value_of(term) {
        Value::Bool(b) => Ok(b),
        Value::Number(n) => Ok(n != 0.0 && !n.is_nan()),
        Value::Text(s) => Ok(!s.is_empty()),
        Value::Other(t) => Err(format!("{} has no boolean value", t.to_ntriples())),
    }
}

fn eval_expr(expr: &Expression, row: &Row, slots: &Slots) -> Result<Term, String> {
    let boolean = |b: bool| Term::Literal(Literal::boolean(b));
    match expr {
        Expression::Variable(v) => row[slots.of(v)].clone().ok_or_else(|| format!("?{v} is unbound")),
        Expression::Constant(t) => Ok(t.clone()),
        Expression::Compare(op, a, b) => {
            let a = eval_expr(a, row, slots)?;
            let b = eval_expr(b, row, slots)?;
            compare(*op, &a, &b).map(boolean)
        }
        Expression::And(a, b) => {
            let a = eval_expr(a, row, slots).and_then(|t| ebv(&t));
            let b = eval_expr(b, row, slots).and_then(|t| ebv(&t));
            match (a, b) {
                (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                (Ok(true), Ok(true)) => Ok(boolean(true)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expression::Or(a, b) => {
            let a = eval_expr(a, row, slots).and_then(|t| ebv(&t));
            let b = eval_expr(b, row, slots).and_then(|t| ebv(&t));
            match (a, b) {
                (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                (Ok(false), Ok(false)) => Ok(boolean(false)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expression::Not(e) => {
            let v = eval_expr(e, row, slots).and_then(|t| ebv(&t))?;
            Ok(boolean(!v))
        }
    }
}

fn compare(op: Comparison, a: &Term, b: &Term) -> Result<bool, String> {
    let mismatch = || format!("cannot compare {} {op} {}", a.to_ntriples(), b.to_ntriples());
    let ordering = match (value_of(a), value_of(b)) {
        (Value::Number(x), Value::Number(y)) => x.partial_cmp(&y).ok_or_else(mismatch)?,
        (Value::Text(x), Value::Text(y)) => x.cmp(y),
        (Value::Bool(x), Value::Bool(y)) => x.cmp(&y),
        (Value::Number(_), Value::Text(_)) | (Value::Text(_), Value::Number(_)) => return Err(mismatch()),
        _ => {
            return match op {
                Comparison::Eq => Ok(a == b),
                Comparison::Ne => Ok(a != b),
                _ => Err(mismatch()),
            }
        }
    };
    Ok(match op {
        Comparison::Eq => ordering == Ordering::Equal,
        Comparison::Ne => ordering != Ordering::Equal,
        Comparison::Lt => ordering == Ordering::Less,
        Comparison::Le => ordering != Ordering::Greater,
        Comparison::Gt => ordering == Ordering::Greater,
        Comparison::Ge => ordering != Ordering::Less,
    })
}
