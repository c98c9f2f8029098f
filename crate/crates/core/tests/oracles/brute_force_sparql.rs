//! Random subset queries and an assignment-enumeration evaluator for them.
//! The evaluator never looks at the engine's parser or AST.

use std::collections::BTreeSet;

use defii_core::term::{Term, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone)]
pub struct Filter {
    pub op: &'static str,
    pub left: Slot,
    pub right: Slot,
    pub negate: bool,
}

#[derive(Debug, Clone)]
pub struct RandomQuery {
    pub distinct: bool,
    pub projection: Vec<usize>,
    pub patterns: Vec<[Slot; 3]>,
    /// `BIND(operand AS ?target)`, placed after the patterns.
    pub bind: Option<(Slot, usize)>,
    pub filter: Option<Filter>,
}

fn render(slot: &Slot) -> String {
    match slot {
        Slot::Var(v) => format!("?{}", VARS[*v]),
        Slot::Const(t) => match t.as_literal() {
            Some(l) if l.datatype().as_str().ends_with("#integer") => l.lexical().to_string(),
            _ => t.to_ntriples(),
        },
    }
}

impl RandomQuery {
    pub fn to_sparql(&self) -> String {
        let mut q = String::from("SELECT ");
        if self.distinct {
            q.push_str("DISTINCT ");
        }
        for v in &self.projection {
            q.push_str(&format!("?{} ", VARS[*v]));
        }
        q.push_str("WHERE {\n");
        for [s, p, o] in &self.patterns {
            q.push_str(&format!("  {} {} {} .\n", render(s), render(p), render(o)));
        }
        if let Some((operand, target)) = &self.bind {
            q.push_str(&format!("  BIND({} AS ?{})\n", render(operand), VARS[*target]));
        }
        if let Some(f) = &self.filter {
            let cmp = format!("{} {} {}", render(&f.left), f.op, render(&f.right));
            if f.negate {
                q.push_str(&format!("  FILTER(!({cmp}))\n"));
            } else {
                q.push_str(&format!("  FILTER({cmp})\n"));
            }
        }
        q.push('}');
        q
    }

    fn vars_in_patterns(&self) -> BTreeSet<usize> {
        self.patterns
            .iter()
            .flat_map(|p| p.iter())
            .filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                Slot::Const(_) => None,
            })
            .collect()
    }
}

/// Generates a query with at most three variables. Most patterns start from
/// a statement of `graph` with some positions replaced by variables, so
/// answers are usually non-empty.
pub fn random_query(rng: &mut impl Rng, graph: &[Triple], universe: &[Term]) -> RandomQuery {
    let with_bind = rng.gen_bool(0.3);
    let pattern_vars = if with_bind { 2 } else { 3 };
    let n_patterns = rng.gen_range(1..=3);
    let mut patterns = Vec::new();
    for _ in 0..n_patterns {
        let seed = graph.choose(rng).expect("non-empty graph");
        let terms = [seed.subject().clone(), seed.predicate().clone(), seed.object().clone()];
        let mut position = 0;
        let pattern = terms.map(|t| {
            position += 1;
            if rng.gen_bool(0.55) {
                Slot::Var(rng.gen_range(0..pattern_vars))
            } else if position != 2 && rng.gen_bool(0.1) {
                Slot::Const(universe.choose(rng).expect("non-empty").clone())
            } else {
                Slot::Const(t)
            }
        });
        patterns.push(pattern);
    }
    let mut q = RandomQuery { distinct: rng.gen_bool(0.5), projection: vec![], patterns, bind: None, filter: None };
    let mut bound: Vec<usize> = q.vars_in_patterns().into_iter().collect();
    if bound.is_empty() {
        q.patterns[0][0] = Slot::Var(0);
        bound.push(0);
    }
    if with_bind {
        let operand = if rng.gen_bool(0.5) {
            Slot::Var(*bound.choose(rng).expect("non-empty"))
        } else {
            Slot::Const(universe.choose(rng).expect("non-empty").clone())
        };
        q.bind = Some((operand, 2));
        bound.push(2);
    }
    if rng.gen_bool(0.6) {
        let left = Slot::Var(*bound.choose(rng).expect("non-empty"));
        let right = if rng.gen_bool(0.3) {
            Slot::Var(*bound.choose(rng).expect("non-empty"))
        } else {
            Slot::Const(universe.choose(rng).expect("non-empty").clone())
        };
        let op = *["=", "!=", "<", ">", "<=", ">="].choose(rng).expect("non-empty");
        q.filter = Some(Filter { op, left, right, negate: rng.gen_bool(0.2) });
    }
    let k = rng.gen_range(1..=bound.len());
    bound.shuffle(rng);
    q.projection = bound[..k].to_vec();
    q
}

enum Val<'a> {
    Num(f64),
    Str(&'a str),
    Other,
}

fn val(t: &Term) -> Val<'_> {
    if let Some(l) = t.as_literal() {
        let dt = l.datatype().as_str();
        if dt.ends_with("#integer") || dt.ends_with("#decimal") {
            return Val::Num(l.lexical().parse().expect("numeric lexical"));
        }
        if dt.ends_with("#string") {
            return Val::Str(l.lexical());
        }
    }
    Val::Other
}

/// `None` is a type error.
fn compare(op: &str, a: &Term, b: &Term) -> Option<bool> {
    use std::cmp::Ordering::*;
    let ord = match (val(a), val(b)) {
        (Val::Num(x), Val::Num(y)) => x.partial_cmp(&y)?,
        (Val::Str(x), Val::Str(y)) => x.cmp(y),
        (Val::Num(_), Val::Str(_)) | (Val::Str(_), Val::Num(_)) => return None,
        _ => {
            return match op {
                "=" => Some(a == b),
                "!=" => Some(a != b),
                _ => None,
            }
        }
    };
    Some(match op {
        "=" => ord == Equal,
        "!=" => ord != Equal,
        "<" => ord == Less,
        ">" => ord == Greater,
        "<=" => ord != Greater,
        ">=" => ord != Less,
        _ => unreachable!(),
    })
}

/// Every assignment of the query's variables over the term universe that
/// satisfies all patterns, the BIND and the FILTER; projected, optionally
/// de-duplicated, sorted by serialized tuple.
pub fn brute_force(graph: &[Triple], q: &RandomQuery) -> Vec<Vec<Option<Term>>> {
    let facts: BTreeSet<(Term, Term, Term)> = graph
        .iter()
        .map(|t| (t.subject().clone(), t.predicate().clone(), t.object().clone()))
        .collect();
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    for (s, p, o) in &facts {
        universe.extend([s.clone(), p.clone(), o.clone()]);
    }
    if let Some((Slot::Const(c), _)) = &q.bind {
        universe.insert(c.clone());
    }
    let universe: Vec<Term> = universe.into_iter().collect();
    let mut vars: Vec<usize> = q.vars_in_patterns().into_iter().collect();
    if let Some((_, target)) = &q.bind {
        vars.push(*target);
    }

    let mut rows: Vec<Vec<Option<Term>>> = Vec::new();
    let mut assignment: [Option<Term>; 3] = [None, None, None];
    let n = vars.len();
    let total = universe.len().pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for &v in &vars {
            assignment[v] = Some(universe[c % universe.len()].clone());
            c /= universe.len();
        }
        let get = |slot: &Slot| -> Term {
            match slot {
                Slot::Var(v) => assignment[*v].clone().expect("assigned"),
                Slot::Const(t) => t.clone(),
            }
        };
        let patterns_hold = q.patterns.iter().all(|[s, p, o]| facts.contains(&(get(s), get(p), get(o))));
        if !patterns_hold {
            continue;
        }
        if let Some((operand, target)) = &q.bind {
            if assignment[*target].as_ref() != Some(&get(operand)) {
                continue;
            }
        }
        if let Some(f) = &q.filter {
            let result = compare(f.op, &get(&f.left), &get(&f.right)).map(|b| b != f.negate);
            if result != Some(true) {
                continue;
            }
        }
        rows.push(q.projection.iter().map(|v| assignment[*v].clone()).collect());
    }
    let key = |r: &Vec<Option<Term>>| -> Vec<String> {
        r.iter().map(|t| t.as_ref().map(|t| t.to_ntriples()).unwrap_or_default()).collect()
    };
    rows.sort_by_key(key);
    if q.distinct {
        rows.dedup_by(|a, b| key(a) == key(b));
    }
    rows
}

/// Random graph of at most `max` statements over a small vocabulary with
/// numeric, decimal and string literals.
pub fn random_graph(rng: &mut impl Rng, max: usize) -> Vec<Triple> {
    let ex = |n: &str| Term::iri_unchecked(format!("http://ex.org/{n}"));
    let individuals: Vec<Term> = (0..4).map(|i| ex(&format!("i{i}"))).collect();
    let classes: Vec<Term> = (0..2).map(|i| ex(&format!("C{i}"))).collect();
    let predicates: Vec<Term> = (0..3).map(|i| ex(&format!("p{i}"))).collect();
    let literals = [
        Term::integer(1),
        Term::integer(2),
        Term::decimal(2.0),
        Term::string("a"),
        Term::string("b"),
    ];
    let rdf_type = Term::iri_unchecked("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            let s = individuals.choose(rng).unwrap().clone();
            let (p, o) = match rng.gen_range(0..4) {
                0 => (rdf_type.clone(), classes.choose(rng).unwrap().clone()),
                1 => (predicates.choose(rng).unwrap().clone(), literals.choose(rng).unwrap().clone()),
                _ => (predicates.choose(rng).unwrap().clone(), individuals.choose(rng).unwrap().clone()),
            };
            Triple::new(s, p, o).expect("valid statement")
        })
        .collect()
}
