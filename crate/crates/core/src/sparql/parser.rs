use std::collections::HashSet;

use super::lexer::{tokenize, Tok, Token};
use super::{Comparison, Expression, PatternElement, QueryAst, TermPattern, TriplePattern};
use crate::rdf_io::{ParseDiagnostic, PrefixMap};
use crate::term::{Iri, Literal, Term};
use crate::vocab::{rdf, xsd};

/// Words outside the subset; reported by name instead of a generic syntax error.
const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "GRAPH", "MINUS", "SERVICE", "VALUES", "ORDER", "LIMIT", "OFFSET",
    "GROUP", "HAVING", "COUNT", "SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE",
    "WITH", "FROM", "NAMED", "BASE", "REDUCED", "EXISTS", "NOT", "IN", "SELECT",
];

pub fn parse_query(text: &str) -> Result<QueryAst, ParseDiagnostic> {
    let tokens = tokenize(text)?;
    Parser { tokens, pos: 0, prefixes: PrefixMap::new() }.query()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: PrefixMap,
}

fn is_word(tok: &Tok, word: &str) -> bool {
    matches!(tok, Tok::Word(w) if w.eq_ignore_ascii_case(word))
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn peek_word(&self, word: &str) -> bool {
        is_word(&self.peek().tok, word)
    }

    fn peek_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn unexpected(&self, token: &Token, expected: &str) -> ParseDiagnostic {
        if let Tok::Word(w) = &token.tok {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) && !(upper == "SELECT" && expected.contains("SELECT")) {
                return token.error(format!("unsupported keyword {upper}"));
            }
        }
        if let Tok::Punct(c @ ('*' | '/' | '^' | '+' | '|')) = token.tok {
            return token.error(format!("unsupported property path or operator '{c}'"));
        }
        if let Tok::Op("|") = token.tok {
            return token.error("unsupported property path operator '|'");
        }
        token.error(format!("expected {expected}, found {}", token.describe()))
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseDiagnostic> {
        if self.peek_punct(c) {
            self.next();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.unexpected(&t, &format!("'{c}'")))
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseDiagnostic> {
        if self.peek_word(word) {
            self.next();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.unexpected(&t, word))
        }
    }

    fn query(mut self) -> Result<QueryAst, ParseDiagnostic> {
        while self.peek_word("PREFIX") {
            self.next();
            let t = self.next();
            let Tok::PName(prefix, local) = &t.tok else {
                return Err(self.unexpected(&t, "prefix label ending in ':'"));
            };
            if !local.is_empty() {
                return Err(t.error("prefix declaration must be of the form 'label:'"));
            }
            let iri_tok = self.next();
            let Tok::IriRef(ns) = &iri_tok.tok else {
                return Err(self.unexpected(&iri_tok, "<namespace IRI>"));
            };
            if Iri::new(ns.clone()).is_err() {
                return Err(iri_tok.error(format!("relative namespace IRI <{ns}>")));
            }
            self.prefixes.insert(prefix.clone(), ns.clone());
        }
        self.expect_word("SELECT")?;
        let distinct = if self.peek_word("DISTINCT") {
            self.next();
            true
        } else {
            false
        };
        let mut projection: Vec<(String, Token)> = Vec::new();
        while let Tok::Var(v) = &self.peek().tok {
            let v = v.clone();
            let t = self.next();
            if projection.iter().any(|(p, _)| *p == v) {
                return Err(t.error(format!("variable ?{v} projected twice")));
            }
            projection.push((v, t));
        }
        if projection.is_empty() {
            let t = self.peek().clone();
            return Err(match t.tok {
                Tok::Punct('*') => t.error("SELECT * is not supported; list variables explicitly"),
                Tok::Punct('(') => t.error("projection expressions are not supported"),
                _ => self.unexpected(&t, "projected variable"),
            });
        }
        if self.peek_word("WHERE") {
            self.next();
        }
        self.expect_punct('{')?;
        let patterns = self.group()?;
        self.expect_punct('}')?;
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            return Err(self.unexpected(&t, "end of query"));
        }

        let mut bound: HashSet<&str> = HashSet::new();
        for p in &patterns {
            match p {
                PatternElement::Triple(tp) => bound.extend(tp.variables()),
                PatternElement::Bind { target, .. } => {
                    bound.insert(target);
                }
                PatternElement::Filter(_) => {}
            }
        }
        for (v, t) in &projection {
            if !bound.contains(v.as_str()) {
                return Err(t.error(format!("projected variable ?{v} does not appear in the query pattern")));
            }
        }

        Ok(QueryAst {
            prefixes: self.prefixes,
            distinct,
            projection: projection.into_iter().map(|(v, _)| v).collect(),
            patterns,
        })
    }

    /// Group body with scoping checks: BIND targets must be fresh and BIND
    /// expressions may not refer forward to variables bound later.
    fn group(&mut self) -> Result<Vec<PatternElement>, ParseDiagnostic> {
        let mut out: Vec<PatternElement> = Vec::new();
        let mut bound: HashSet<String> = HashSet::new();
        let mut pending_binds: Vec<(Vec<String>, Token)> = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Punct('}') | Tok::Eof => break,
                Tok::Punct('.') => {
                    self.next();
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("BIND") => {
                    self.next();
                    self.expect_punct('(')?;
                    let expression = self.expression()?;
                    self.expect_word("AS")?;
                    let target_tok = self.next();
                    let Tok::Var(target) = &target_tok.tok else {
                        return Err(self.unexpected(&target_tok, "variable after AS"));
                    };
                    if bound.contains(target) {
                        return Err(target_tok.error(format!("BIND target ?{target} is already bound")));
                    }
                    self.expect_punct(')')?;
                    let refs: Vec<String> = expression
                        .variables()
                        .into_iter()
                        .filter(|v| !bound.contains(*v))
                        .map(str::to_string)
                        .collect();
                    if !refs.is_empty() {
                        pending_binds.push((refs, t.clone()));
                    }
                    bound.insert(target.clone());
                    out.push(PatternElement::Bind { expression, target: target.clone() });
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.next();
                    self.expect_punct('(')?;
                    let expression = self.expression()?;
                    self.expect_punct(')')?;
                    out.push(PatternElement::Filter(expression));
                }
                Tok::Punct('{') => return Err(t.error("nested group patterns are not supported")),
                _ => {
                    for tp in self.triples_block()? {
                        for v in tp.variables() {
                            if let Some((_, bind_tok)) =
                                pending_binds.iter().find(|(refs, _)| refs.iter().any(|r| r == v))
                            {
                                return Err(bind_tok.error(format!(
                                    "BIND refers to ?{v} before it is bound"
                                )));
                            }
                            bound.insert(v.to_string());
                        }
                        out.push(PatternElement::Triple(tp));
                    }
                }
            }
        }
        Ok(out)
    }

    fn triples_block(&mut self) -> Result<Vec<TriplePattern>, ParseDiagnostic> {
        let subject = self.term_pattern(Position::Subject)?;
        let mut out = Vec::new();
        loop {
            let predicate = self.term_pattern(Position::Predicate)?;
            loop {
                let object = self.term_pattern(Position::Object)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.peek_punct(',') {
                    self.next();
                } else {
                    break;
                }
            }
            if !self.peek_punct(';') {
                break;
            }
            while self.peek_punct(';') {
                self.next();
            }
            if self.peek_punct('.') || self.peek_punct('}') {
                break;
            }
        }
        let t = self.peek().clone();
        match t.tok {
            Tok::Punct('.') | Tok::Punct('}') => Ok(out),
            Tok::Word(ref w) if w.eq_ignore_ascii_case("BIND") || w.eq_ignore_ascii_case("FILTER") => Ok(out),
            _ => Err(self.unexpected(&t, "'.', ';', ',' or '}'")),
        }
    }

    fn term_pattern(&mut self, pos: Position) -> Result<TermPattern, ParseDiagnostic> {
        let t = self.next();
        let term = match &t.tok {
            Tok::Var(v) => return Ok(TermPattern::Variable(v.clone())),
            Tok::Word(w) if w == "a" && pos == Position::Predicate => Term::iri_unchecked(rdf::TYPE),
            Tok::IriRef(_) | Tok::PName(..) => Term::Iri(self.iri(&t)?),
            Tok::Blank(_) => return Err(t.error("blank nodes in query patterns are not supported")),
            // Literal subjects are grammatical; they simply never match.
            Tok::Literal(_) if pos != Position::Predicate => {
                self.pos -= 1;
                return self.literal_term().map(TermPattern::Term);
            }
            Tok::Word(w) if pos != Position::Predicate && (w == "true" || w == "false") => {
                self.pos -= 1;
                return self.literal_term().map(TermPattern::Term);
            }
            Tok::Literal(_) => return Err(t.error("predicate must be an IRI or variable")),
            Tok::Punct('[') => return Err(t.error("anonymous blank nodes are not supported")),
            Tok::Punct('(') => return Err(t.error("collections are not supported")),
            _ => {
                let what = match pos {
                    Position::Subject => "subject",
                    Position::Predicate => "predicate",
                    Position::Object => "object",
                };
                return Err(self.unexpected(&t, what));
            }
        };
        // Property paths start right after a predicate.
        if pos == Position::Predicate {
            let next = self.peek().clone();
            if matches!(next.tok, Tok::Punct('/' | '*' | '+' | '^') | Tok::Op("|")) {
                return Err(next.error(format!("unsupported property path operator {}", next.describe())));
            }
        }
        Ok(TermPattern::Term(term))
    }

    fn iri(&self, t: &Token) -> Result<Iri, ParseDiagnostic> {
        match &t.tok {
            Tok::IriRef(value) => Iri::new(value.clone()).map_err(|_| t.error(format!("relative IRI <{value}>"))),
            Tok::PName(prefix, local) => match self.prefixes.expand(prefix, local) {
                Some(iri) => Iri::new(iri).map_err(|e| t.error(e.to_string())),
                None => Err(t.error(format!("unbound prefix '{prefix}:'"))),
            },
            _ => Err(self.unexpected(t, "IRI")),
        }
    }

    /// Literal constant: quoted string with optional tag or datatype, number,
    /// or boolean keyword.
    fn literal_term(&mut self) -> Result<Term, ParseDiagnostic> {
        let t = self.next();
        match &t.tok {
            Tok::Literal(Term::Literal(lit)) if lit.datatype().as_str() == xsd::STRING => {
                let lexical = lit.lexical().to_string();
                let next = self.peek().clone();
                match &next.tok {
                    Tok::LangTag(tag) => {
                        self.next();
                        Ok(Term::Literal(Literal::lang(lexical, tag.clone())))
                    }
                    Tok::Op("^^") => {
                        self.next();
                        let dt = self.next();
                        Ok(Term::Literal(Literal::typed(lexical, self.iri(&dt)?)))
                    }
                    _ => Ok(Term::string(lexical)),
                }
            }
            Tok::Literal(term) => Ok(term.clone()),
            Tok::Word(w) if w == "true" || w == "false" => Ok(Term::Literal(Literal::boolean(w == "true"))),
            _ => Err(self.unexpected(&t, "literal")),
        }
    }

    fn expression(&mut self) -> Result<Expression, ParseDiagnostic> {
        let mut left = self.conjunction()?;
        while self.peek().tok == Tok::Op("||") {
            self.next();
            let right = self.conjunction()?;
            left = Expression::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Expression, ParseDiagnostic> {
        let mut left = self.relational()?;
        while self.peek().tok == Tok::Op("&&") {
            self.next();
            let right = self.relational()?;
            left = Expression::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expression, ParseDiagnostic> {
        let left = self.unary()?;
        let op = match self.peek().tok {
            Tok::Op("=") => Comparison::Eq,
            Tok::Op("!=") => Comparison::Ne,
            Tok::Op("<") => Comparison::Lt,
            Tok::Op("<=") => Comparison::Le,
            Tok::Op(">") => Comparison::Gt,
            Tok::Op(">=") => Comparison::Ge,
            _ => return Ok(left),
        };
        self.next();
        let right = self.unary()?;
        Ok(Expression::Compare(op, Box::new(left), Box::new(right)))
    }

    fn unary(&mut self) -> Result<Expression, ParseDiagnostic> {
        if self.peek().tok == Tok::Op("!") {
            self.next();
            return Ok(Expression::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expression, ParseDiagnostic> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Punct('(') => {
                self.next();
                let e = self.expression()?;
                self.expect_punct(')')?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.next();
                Ok(Expression::Variable(v.clone()))
            }
            Tok::IriRef(_) | Tok::PName(..) => {
                self.next();
                if self.peek_punct('(') {
                    return Err(t.error(format!("unsupported function {}", t.describe())));
                }
                Ok(Expression::Constant(Term::Iri(self.iri(&t)?)))
            }
            Tok::Literal(_) => Ok(Expression::Constant(self.literal_term()?)),
            Tok::Word(w) if w == "true" || w == "false" => Ok(Expression::Constant(self.literal_term()?)),
            Tok::Word(w) => {
                if self.tokens.get(self.pos + 1).is_some_and(|n| n.tok == Tok::Punct('(')) {
                    let upper = w.to_ascii_uppercase();
                    if UNSUPPORTED.contains(&upper.as_str()) {
                        return Err(t.error(format!("unsupported keyword {upper}")));
                    }
                    return Err(t.error(format!("unsupported function {w}")));
                }
                Err(self.unexpected(&t, "expression"))
            }
            Tok::Punct(c @ ('*' | '/' | '+')) => Err(t.error(format!("unsupported arithmetic operator '{c}'"))),
            _ => Err(self.unexpected(&t, "expression")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Subject,
    Predicate,
    Object,
}
