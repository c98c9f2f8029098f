//! RDF atoms: IRIs, literals, blank nodes and the statements built from them.

use std::fmt;

use thiserror::Error;

use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("relative or malformed IRI <{0}>")]
    RelativeIri(String),
    #[error("literal in subject position")]
    LiteralSubject,
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        if is_absolute_iri(&value) {
            Ok(Iri(value))
        } else {
            Err(TermError::RelativeIri(value))
        }
    }

    /// Builds an IRI from a string known to be absolute (vocabulary constants,
    /// IRIs minted from an already-validated base).
    pub fn new_unchecked(value: impl Into<String>) -> Self {
        let value = value.into();
        debug_assert!(is_absolute_iri(&value), "not absolute: {value}");
        Iri(value)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Fragment after `#`, otherwise the segment after the last `/`.
    pub fn local_name(&self) -> &str {
        local_name(&self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn local_name(iri: &str) -> &str {
    if let Some(pos) = iri.rfind('#') {
        return &iri[pos + 1..];
    }
    match iri.rfind('/') {
        Some(pos) => &iri[pos + 1..],
        None => iri,
    }
}

/// `scheme ":" rest` with a non-empty alphabetic-led scheme and no whitespace.
pub fn is_absolute_iri(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let leading_alpha = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    leading_alpha
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`'))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// Plain literal, typed `xsd:string`.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal::typed(lexical, Iri::new_unchecked(xsd::STRING))
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// Language-tagged literal; the tag is normalized to lower case.
    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::new_unchecked(rdf::LANG_STRING),
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(xsd::INTEGER))
    }

    /// `xsd:decimal` in shortest round-trip form, always carrying a fraction digit.
    pub fn decimal(value: f64) -> Self {
        Literal::typed(format_decimal(value), Iri::new_unchecked(xsd::DECIMAL))
    }

    pub fn boolean(value: bool) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(xsd::BOOLEAN))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        xsd::is_numeric(self.datatype.as_str())
    }
}

pub fn format_decimal(value: f64) -> String {
    let text = format!("{value}");
    if text.contains('.') || text.contains('e') || !value.is_finite() {
        text
    } else {
        format!("{text}.0")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self, TermError> {
        Iri::new(value).map(Term::Iri)
    }

    pub fn iri_unchecked(value: impl Into<String>) -> Self {
        Term::Iri(Iri::new_unchecked(value))
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn integer(value: i64) -> Self {
        Term::Literal(Literal::integer(value))
    }

    pub fn decimal(value: f64) -> Self {
        Term::Literal(Literal::decimal(value))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Canonical N-Triples rendering.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        write_ntriples_term(&mut out, self);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

pub(crate) fn write_ntriples_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            for c in iri.as_str().chars() {
                push_escaped(out, c);
            }
            out.push('>');
        }
        Term::Blank(label) => {
            out.push_str("_:");
            out.push_str(label);
        }
        Term::Literal(lit) => {
            out.push('"');
            for c in lit.lexical.chars() {
                push_escaped(out, c);
            }
            out.push('"');
            if let Some(lang) = &lit.language {
                out.push('@');
                out.push_str(lang);
            } else if lit.datatype.as_str() != xsd::STRING {
                out.push_str("^^<");
                out.push_str(lit.datatype.as_str());
                out.push('>');
            }
        }
    }
}

fn push_escaped(out: &mut String, c: char) {
    match c {
        '\\' => out.push_str("\\\\"),
        '"' => out.push_str("\\\""),
        '\n' => out.push_str("\\n"),
        '\r' => out.push_str("\\r"),
        '\t' => out.push_str("\\t"),
        c if (c as u32) < 0x20 || c == '\u{7f}' => {
            out.push_str(&format!("\\u{:04X}", c as u32));
        }
        c => out.push(c),
    }
}

/// A subject-predicate-object statement. Fields are private so every value
/// satisfies: predicate is an IRI, subject is never a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        if subject.is_literal() {
            return Err(TermError::LiteralSubject);
        }
        if predicate.as_iri().is_none() {
            return Err(TermError::NonIriPredicate(predicate.to_ntriples()));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// For callers whose terms are valid by construction.
    pub fn from_iris(subject: &Iri, predicate: &Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: Term::Iri(subject.clone()),
            predicate: Term::Iri(predicate.clone()),
            object: object.into(),
        }
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn predicate_iri(&self) -> &Iri {
        match &self.predicate {
            Term::Iri(iri) => iri,
            _ => unreachable!("predicate invariant"),
        }
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }

    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        write_ntriples_term(&mut out, &self.subject);
        out.push(' ');
        write_ntriples_term(&mut out, &self.predicate);
        out.push(' ');
        write_ntriples_term(&mut out, &self.object);
        out.push_str(" .");
        out
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}
