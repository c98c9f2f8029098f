//! SPARQL subset: `PREFIX`, `SELECT [DISTINCT] ?vars WHERE { ... }` with
//! triple patterns, `BIND(expr AS ?v)` and `FILTER(expr)`.

mod eval;
mod lexer;
mod parser;
mod results;

use std::fmt;

use crate::rdf_io::PrefixMap;
use crate::term::Term;

pub use eval::{evaluate, EvalError, SolutionTable};
pub use parser::parse_query;
pub use results::to_json_results;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub prefixes: PrefixMap,
    pub distinct: bool,
    pub projection: Vec<String>,
    pub patterns: Vec<PatternElement>,
}

impl QueryAst {
    pub fn triple_patterns(&self) -> impl Iterator<Item = &TriplePattern> {
        self.patterns.iter().filter_map(|p| match p {
            PatternElement::Triple(t) => Some(t),
            _ => None,
        })
    }

    pub fn binds(&self) -> impl Iterator<Item = (&Expression, &str)> {
        self.patterns.iter().filter_map(|p| match p {
            PatternElement::Bind { expression, target } => Some((expression, target.as_str())),
            _ => None,
        })
    }

    pub fn filters(&self) -> impl Iterator<Item = &Expression> {
        self.patterns.iter().filter_map(|p| match p {
            PatternElement::Filter(e) => Some(e),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternElement {
    Triple(TriplePattern),
    Bind { expression: Expression, target: String },
    Filter(Expression),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPattern {
    Term(Term),
    Variable(String),
}

impl TermPattern {
    pub fn variable(&self) -> Option<&str> {
        match self {
            TermPattern::Variable(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.positions().into_iter().filter_map(TermPattern::variable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Eq => "=",
            Comparison::Ne => "!=",
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Variable(String),
    Constant(Term),
    Compare(Comparison, Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Or(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
}

impl Expression {
    /// Variables referenced anywhere in the expression, in order of appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expression::Variable(v) => out.push(v),
            Expression::Constant(_) => {}
            Expression::Compare(_, a, b) | Expression::And(a, b) | Expression::Or(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Expression::Not(e) => e.collect_variables(out),
        }
    }
}
