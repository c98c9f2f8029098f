use crate::rdf_io::{is_pn_chars, is_pn_chars_base, Cursor, ParseDiagnostic};
use crate::term::{Iri, Literal, Term};
use crate::vocab::xsd;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Word(String),
    Var(String),
    IriRef(String),
    PName(String, String),
    Blank(String),
    Literal(Term),
    LangTag(String),
    Punct(char),
    Op(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn error(&self, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.tok {
            Tok::Word(w) => w.clone(),
            Tok::Var(v) => format!("?{v}"),
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Blank(b) => format!("_:{b}"),
            Tok::Literal(t) => t.to_ntriples(),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Punct(c) => format!("'{c}'"),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        cur.skip_trivia();
        let (line, column) = (cur.line, cur.column);
        let at = cur.clone();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, line, column });
            return Ok(out);
        };
        let tok = match c {
            '?' | '$' => {
                cur.bump();
                let name = take_while(&mut cur, is_pn_chars);
                if name.is_empty() {
                    return Err(at.error("unsupported property path operator '?'"));
                }
                Tok::Var(name)
            }
            '<' => match scan_iri(&cur) {
                Some(_) => {
                    cur.bump();
                    Tok::IriRef(cur.iri_body()?)
                }
                None => {
                    cur.bump();
                    if cur.eat('=') {
                        Tok::Op("<=")
                    } else {
                        Tok::Op("<")
                    }
                }
            },
            '>' => {
                cur.bump();
                if cur.eat('=') {
                    Tok::Op(">=")
                } else {
                    Tok::Op(">")
                }
            }
            '=' => {
                cur.bump();
                Tok::Op("=")
            }
            '!' => {
                cur.bump();
                if cur.eat('=') {
                    Tok::Op("!=")
                } else {
                    Tok::Op("!")
                }
            }
            '&' => {
                cur.bump();
                if !cur.eat('&') {
                    return Err(at.error("expected '&&'"));
                }
                Tok::Op("&&")
            }
            '|' => {
                cur.bump();
                if cur.eat('|') {
                    Tok::Op("||")
                } else {
                    Tok::Op("|")
                }
            }
            '{' | '}' | '(' | ')' | '.' | ';' | ',' | '*' | '/' | '^' | '+' | '[' | ']'
                if !(c == '.' || c == '+') || !cur.peek_nth(1).is_some_and(|n| n.is_ascii_digit()) =>
            {
                cur.bump();
                if c == '^' && cur.eat('^') {
                    Tok::Op("^^")
                } else {
                    Tok::Punct(c)
                }
            }
            '@' => {
                cur.bump();
                Tok::LangTag(cur.language_tag()?)
            }
            '"' | '\'' => {
                cur.bump();
                if cur.starts_with(&format!("{c}{c}")) {
                    return Err(at.error("long (triple-quoted) strings are not supported"));
                }
                Tok::Literal(Term::string(cur.string_body(c)?))
            }
            '_' if cur.peek_nth(1) == Some(':') => {
                cur.bump();
                cur.bump();
                Tok::Blank(take_while(&mut cur, is_pn_chars))
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => number(&mut cur)?,
            c if is_pn_chars_base(c) || c == ':' => {
                let word = take_name(&mut cur, false);
                if cur.peek() == Some(':') {
                    cur.bump();
                    Tok::PName(word, take_name(&mut cur, true))
                } else {
                    Tok::Word(word)
                }
            }
            other => return Err(at.error(format!("unexpected character {other:?}"))),
        };
        out.push(Token { tok, line, column });
    }
}

fn take_while(cur: &mut Cursor<'_>, pred: impl Fn(char) -> bool) -> String {
    let mut s = String::new();
    while let Some(c) = cur.peek() {
        if pred(c) {
            s.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    s
}

/// Name characters; '.' only when another name character follows it, so a
/// trailing '.' stays a terminator.
fn take_name(cur: &mut Cursor<'_>, allow_colon: bool) -> String {
    let ok = |c: char| is_pn_chars(c) || (allow_colon && c == ':');
    let mut s = String::new();
    while let Some(c) = cur.peek() {
        if ok(c) || (c == '.' && cur.peek_nth(1).is_some_and(ok)) {
            s.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    s
}

fn scan_iri(cur: &Cursor<'_>) -> Option<usize> {
    let mut n = 1;
    loop {
        let c = cur.peek_nth(n)?;
        if c == '>' {
            return Some(n);
        }
        if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') {
            return None;
        }
        n += 1;
    }
}

fn number(cur: &mut Cursor<'_>) -> Result<Tok, ParseDiagnostic> {
    let at = cur.clone();
    let mut text = String::new();
    if let Some(sign @ ('+' | '-')) = cur.peek() {
        text.push(sign);
        cur.bump();
    }
    let int = take_while(cur, |c| c.is_ascii_digit());
    text.push_str(&int);
    let mut frac = String::new();
    if cur.peek() == Some('.') && cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        frac = take_while(cur, |c| c.is_ascii_digit());
        text.push('.');
        text.push_str(&frac);
    }
    if matches!(cur.peek(), Some('e') | Some('E')) {
        return Err(at.error("double literals are not supported"));
    }
    let datatype = match (int.is_empty(), frac.is_empty()) {
        (true, true) => return Err(at.error("unsupported arithmetic operator")),
        (_, true) => xsd::INTEGER,
        _ => xsd::DECIMAL,
    };
    Ok(Tok::Literal(Term::Literal(Literal::typed(text, Iri::new_unchecked(datatype)))))
}
