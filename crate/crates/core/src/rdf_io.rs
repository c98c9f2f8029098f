//! Turtle-subset and N-Triples reading, N-Triples writing.
//!
//! Accepted Turtle: `@prefix`, `<iri>`, prefixed names, `a`, quoted strings
//! with `^^datatype` or `@lang`, integer and decimal shorthand, `_:label`
//! blank nodes, `;` and `,` lists, `.` terminators, `#` comments. Anything
//! else (collections, `[ ]`, `@base`, long strings, doubles, booleans) is
//! reported as a diagnostic rather than skipped.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{is_absolute_iri, Iri, Literal, Term, Triple};
use crate::vocab::{rdf, xsd};

/// Position of the first offending character, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseDiagnostic {}

/// Prefix label (empty for the default prefix) to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.entries.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.entries.get(prefix).map(String::as_str)
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn parse_turtle(text: &str) -> Result<(Vec<Triple>, PrefixMap), ParseDiagnostic> {
    let mut parser = Parser::new(text, Syntax::Turtle);
    parser.document()?;
    Ok((parser.triples, parser.prefixes))
}

/// Strict N-Triples: absolute IRIs, full literals and blank nodes only.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ParseDiagnostic> {
    let mut parser = Parser::new(text, Syntax::NTriples);
    parser.document()?;
    Ok(parser.triples)
}

/// One statement per line, lines sorted, trailing newline after each.
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut lines: Vec<String> = triples.into_iter().map(Triple::to_ntriples).collect();
    lines.sort();
    lines.dedup();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Syntax {
    Turtle,
    NTriples,
}

/// Character cursor with 1-based line/column tracking, shared with the
/// SPARQL lexer.
#[derive(Clone)]
pub(crate) struct Cursor<'a> {
    rest: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor {
            rest: text,
            line: 1,
            column: 1,
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest.chars().nth(n)
    }

    pub fn starts_with(&self, s: &str) -> bool {
        self.rest.starts_with(s)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn error(&self, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Body of `<...>` after the opening bracket has been consumed.
    pub fn iri_body(&mut self) -> Result<String, ParseDiagnostic> {
        let mut value = String::new();
        loop {
            let here = self.clone();
            match self.bump() {
                None => return Err(here.error("unterminated IRI")),
                Some('>') => return Ok(value),
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    value.push(c);
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(here.error(format!("invalid character {c:?} in IRI")));
                }
                Some(c) => value.push(c),
            }
        }
    }

    fn unicode_escape(&mut self) -> Result<char, ParseDiagnostic> {
        let here = self.clone();
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(here.error("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, ParseDiagnostic> {
        let here = self.clone();
        let mut code = 0u32;
        for _ in 0..width {
            let digit = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("expected hex digit"))?;
            self.bump();
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| here.error(format!("invalid code point U+{code:X}")))
    }

    /// Body of a `"..."` or `'...'` string after the opening quote.
    pub fn string_body(&mut self, quote: char) -> Result<String, ParseDiagnostic> {
        let mut value = String::new();
        loop {
            let here = self.clone();
            match self.bump() {
                None => return Err(here.error("unterminated string literal")),
                Some('\n') | Some('\r') => return Err(here.error("line break in string literal")),
                Some(c) if c == quote => return Ok(value),
                Some('\\') => {
                    let esc = self.clone();
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(esc.error("invalid escape sequence")),
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
    }

    /// `[a-zA-Z]+(-[a-zA-Z0-9]+)*` after `@`.
    pub fn language_tag(&mut self) -> Result<String, ParseDiagnostic> {
        let mut tag = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                tag.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) || tag.ends_with('-') {
            return Err(self.error("malformed language tag"));
        }
        Ok(tag)
    }
}

pub(crate) fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}

struct Parser<'a> {
    cur: Cursor<'a>,
    syntax: Syntax,
    prefixes: PrefixMap,
    triples: Vec<Triple>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, syntax: Syntax) -> Self {
        Parser {
            cur: Cursor::new(text),
            syntax,
            prefixes: PrefixMap::new(),
            triples: Vec::new(),
        }
    }

    fn turtle(&self) -> bool {
        self.syntax == Syntax::Turtle
    }

    fn document(&mut self) -> Result<(), ParseDiagnostic> {
        loop {
            self.cur.skip_trivia();
            match self.cur.peek() {
                None => return Ok(()),
                Some('@') => self.directive()?,
                Some(_) => self.statement()?,
            }
        }
    }

    fn directive(&mut self) -> Result<(), ParseDiagnostic> {
        let start = self.cur.clone();
        self.cur.bump();
        let word = self.word();
        if word != "prefix" || !self.turtle() {
            return Err(start.error(format!("unsupported directive @{word}")));
        }
        self.cur.skip_trivia();
        let prefix = self.prefix_label()?;
        self.cur.skip_trivia();
        let at = self.cur.clone();
        if !self.cur.eat('<') {
            return Err(at.error("expected <namespace IRI> after prefix label"));
        }
        let ns = self.cur.iri_body()?;
        if !is_absolute_iri(&ns) {
            return Err(at.error(format!("relative namespace IRI <{ns}>")));
        }
        self.prefixes.insert(prefix, ns);
        self.expect_dot()
    }

    fn word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_ascii_alphanumeric() {
                w.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        w
    }

    /// `PN_PREFIX? ':'`
    fn prefix_label(&mut self) -> Result<String, ParseDiagnostic> {
        let start = self.cur.clone();
        let mut label = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                self.cur.bump();
                if label.ends_with('.') {
                    return Err(start.error("prefix label may not end with '.'"));
                }
                return Ok(label);
            }
            if (label.is_empty() && is_pn_chars_base(c)) || (!label.is_empty() && (is_pn_chars(c) || c == '.')) {
                label.push(c);
                self.cur.bump();
            } else if label.is_empty() {
                return Err(self.cur.error(format!("unexpected {c:?}")));
            } else {
                return Err(start.error(format!("unsupported bare word '{label}'")));
            }
        }
        Err(start.error(format!("unsupported bare word '{label}'")))
    }

    fn expect_dot(&mut self) -> Result<(), ParseDiagnostic> {
        self.cur.skip_trivia();
        if self.cur.eat('.') {
            Ok(())
        } else {
            Err(self.cur.error(match self.cur.peek() {
                None => "expected '.' but reached end of input".to_string(),
                Some(c) => format!("expected '.' but found {c:?}"),
            }))
        }
    }

    fn statement(&mut self) -> Result<(), ParseDiagnostic> {
        let subject = self.subject()?;
        loop {
            self.cur.skip_trivia();
            let predicate = self.predicate()?;
            loop {
                self.cur.skip_trivia();
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), predicate.clone(), object)
                    .map_err(|e| self.cur.error(e.to_string()))?;
                self.triples.push(triple);
                self.cur.skip_trivia();
                if !self.turtle() || !self.cur.eat(',') {
                    break;
                }
            }
            self.cur.skip_trivia();
            if !self.turtle() || !self.cur.eat(';') {
                break;
            }
            // Repeated or trailing ';' is allowed before the terminator.
            loop {
                self.cur.skip_trivia();
                if !self.cur.eat(';') {
                    break;
                }
            }
            self.cur.skip_trivia();
            if self.cur.peek() == Some('.') {
                break;
            }
        }
        self.expect_dot()
    }

    fn subject(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        match self.cur.peek() {
            Some('<') | Some('_') => self.resource(),
            Some('[') => Err(at.error("anonymous blank node property lists are not supported")),
            Some('(') => Err(at.error("collections are not supported")),
            Some('"') | Some('\'') => Err(at.error("literal in subject position")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => Err(at.error("literal in subject position")),
            _ if self.turtle() => self.resource(),
            _ => Err(at.error("expected subject")),
        }
    }

    fn predicate(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        if self.turtle() && self.cur.peek() == Some('a') {
            let after = self.cur.peek_nth(1);
            if after.is_none_or(|c| c.is_whitespace() || c == '<' || c == '"' || c == '_' || c == '#') {
                self.cur.bump();
                return Ok(Term::iri_unchecked(rdf::TYPE));
            }
        }
        match self.cur.peek() {
            Some('_') => Err(at.error("predicate must be an IRI")),
            Some('"') | Some('\'') | Some('[') | Some('(') => Err(at.error("predicate must be an IRI")),
            None => Err(at.error("expected predicate but reached end of input")),
            _ => self.resource(),
        }
    }

    fn object(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        match self.cur.peek() {
            Some('"') => self.literal(),
            Some('\'') if self.turtle() => self.literal(),
            Some('[') => Err(at.error("anonymous blank node property lists are not supported")),
            Some('(') => Err(at.error("collections are not supported")),
            Some(c) if self.turtle() && (c.is_ascii_digit() || c == '+' || c == '-' || c == '.') => self.number(),
            None => Err(at.error("expected object but reached end of input")),
            _ => self.resource(),
        }
    }

    /// IRI reference, prefixed name, or blank node label.
    fn resource(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        match self.cur.peek() {
            Some('<') => {
                self.cur.bump();
                let value = self.cur.iri_body()?;
                Iri::new(value.clone())
                    .map(Term::Iri)
                    .map_err(|_| at.error(format!("relative IRI <{value}> (no base is supported)")))
            }
            Some('_') => {
                self.cur.bump();
                if !self.cur.eat(':') {
                    return Err(at.error("expected ':' after '_' in blank node label"));
                }
                let label = self.local_part();
                if label.is_empty() {
                    return Err(at.error("empty blank node label"));
                }
                Ok(Term::blank(label))
            }
            Some(c) if self.turtle() && (is_pn_chars_base(c) || c == ':') => {
                let prefix = self.prefix_label()?;
                let local = self.local_part();
                match self.prefixes.expand(&prefix, &local) {
                    Some(iri) => Iri::new(iri)
                        .map(Term::Iri)
                        .map_err(|e| at.error(e.to_string())),
                    None => Err(at.error(format!("unbound prefix '{prefix}:'"))),
                }
            }
            Some(c) => Err(at.error(format!("unexpected {c:?}"))),
            None => Err(at.error("unexpected end of input")),
        }
    }

    /// Local part of a prefixed name; may contain '.', but not at the end.
    fn local_part(&mut self) -> String {
        let mut local = String::new();
        while let Some(c) = self.cur.peek() {
            let inner_dot = c == '.' && self.cur.peek_nth(1).is_some_and(|n| is_pn_chars(n) || n == ':');
            if is_pn_chars(c) || c == ':' || inner_dot {
                local.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        local
    }

    fn literal(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        let quote = self.cur.bump().expect("peeked quote");
        if self.cur.starts_with(&format!("{quote}{quote}")) {
            return Err(at.error("long (triple-quoted) strings are not supported"));
        }
        let lexical = self.cur.string_body(quote)?;
        if self.cur.eat('@') {
            let tag = self.cur.language_tag()?;
            return Ok(Term::Literal(Literal::lang(lexical, tag)));
        }
        if self.cur.starts_with("^^") {
            self.cur.bump();
            self.cur.bump();
            let dt_at = self.cur.clone();
            let datatype = match self.resource()? {
                Term::Iri(iri) => iri,
                _ => return Err(dt_at.error("datatype must be an IRI")),
            };
            return Ok(Term::Literal(Literal::typed(lexical, datatype)));
        }
        Ok(Term::string(lexical))
    }

    fn number(&mut self) -> Result<Term, ParseDiagnostic> {
        let at = self.cur.clone();
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur.peek() {
            text.push(sign);
            self.cur.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.cur.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.cur.bump();
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.cur.peek() == Some('.') && self.cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.cur.bump();
            while let Some(c) = self.cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.cur.bump();
                frac_digits += 1;
            }
        }
        if matches!(self.cur.peek(), Some('e') | Some('E')) {
            return Err(at.error("double literals are not supported"));
        }
        let datatype = match (int_digits, frac_digits) {
            (0, 0) => return Err(at.error("malformed numeric literal")),
            (_, 0) => xsd::INTEGER,
            _ => xsd::DECIMAL,
        };
        Ok(Term::Literal(Literal::typed(text, Iri::new_unchecked(datatype))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(local: &str) -> Term {
        Term::iri_unchecked(format!("http://ex.org/{local}"))
    }

    #[test]
    fn a_keyword() {
        let (triples, prefixes) = parse_turtle("@prefix ex: <http://ex.org/> . ex:a a ex:B .").unwrap();
        assert_eq!(triples, vec![Triple::new(ex("a"), Term::iri_unchecked(rdf::TYPE), ex("B")).unwrap()]);
        assert_eq!(prefixes.get("ex"), Some("http://ex.org/"));
    }

    #[test]
    fn integer_shorthand() {
        let (triples, _) = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p 100 .").unwrap();
        assert_eq!(triples[0].object(), &Term::integer(100));
    }

    #[test]
    fn decimal_shorthand() {
        let (triples, _) = parse_turtle("@prefix ex: <http://ex.org/> . ex:a ex:p -1.50 .").unwrap();
        let lit = triples[0].object().as_literal().unwrap();
        assert_eq!((lit.lexical(), lit.datatype().as_str()), ("-1.50", xsd::DECIMAL));
    }

    #[test]
    fn missing_dot_reports_end_of_input() {
        let text = "@prefix ex: <http://ex.org/> .\nex:a ex:p ex:b";
        let err = parse_turtle(text).unwrap_err();
        assert_eq!((err.line, err.column), (2, 15));
        assert!(err.message.contains("end of input"), "{}", err.message);
    }

    #[test]
    fn lists_and_literals() {
        let text = r#"
            @prefix ex: <http://ex.org/> .
            @prefix : <http://ex.org/d#> .
            ex:a ex:p ex:b , ex:c ;
                 ex:q "hi"@EN , "5"^^ex:int ;
                 :r _:x ; .
            _:x ex:p 'single' .
        "#;
        let (triples, _) = parse_turtle(text).unwrap();
        assert_eq!(triples.len(), 6);
        assert_eq!(triples[2].object(), &Term::Literal(Literal::lang("hi", "en")));
        assert_eq!(triples[4].object(), &Term::blank("x"));
        assert_eq!(triples[5].object(), &Term::string("single"));
    }

    #[test]
    fn unsupported_constructs_are_diagnosed() {
        let pre = "@prefix ex: <http://ex.org/> .\n";
        for (body, needle) in [
            ("ex:a ex:p ( ex:b ) .", "collections"),
            ("ex:a ex:p [ ex:q ex:b ] .", "anonymous"),
            ("@base <http://ex.org/> .", "@base"),
            ("ex:a ex:p 1e5 .", "double"),
            ("ex:a ex:p true .", "bare word 'true'"),
            ("ex:a ex:p \"\"\"long\"\"\" .", "long"),
            ("ex:a ex:p <rel> .", "relative IRI"),
            ("nope:a ex:p ex:b .", "unbound prefix"),
            ("\"lit\" ex:p ex:b .", "literal in subject position"),
            ("PREFIX ex: <http://ex.org/>", "bare word 'PREFIX'"),
        ] {
            let err = parse_turtle(&format!("{pre}{body}")).unwrap_err();
            assert!(err.message.contains(needle), "{body}: {}", err.message);
            assert_eq!(err.line, 2, "{body}");
        }
    }

    #[test]
    fn ntriples_mode_is_strict() {
        assert!(parse_ntriples("<http://ex.org/a> <http://ex.org/p> \"x\" .").is_ok());
        assert!(parse_ntriples("@prefix ex: <http://ex.org/> .").is_err());
        assert!(parse_ntriples("<http://ex.org/a> <http://ex.org/p> 5 .").is_err());
        assert!(parse_ntriples("<http://ex.org/a> a <http://ex.org/B> .").is_err());
    }

    #[test]
    fn serialize_empty() {
        assert_eq!(serialize_ntriples(&[]), "");
    }

    #[test]
    fn serialize_escapes_quote() {
        let t = Triple::new(ex("a"), ex("p"), Term::string("a\"b")).unwrap();
        assert_eq!(serialize_ntriples([&t]), "<http://ex.org/a> <http://ex.org/p> \"a\\\"b\" .\n");
    }

    #[test]
    fn serialize_sorts_lines() {
        let t1 = Triple::new(ex("b"), ex("p"), ex("c")).unwrap();
        let t2 = Triple::new(ex("a"), ex("p"), ex("c")).unwrap();
        let text = serialize_ntriples([&t1, &t2]);
        assert!(text.starts_with("<http://ex.org/a>"));
    }
}
