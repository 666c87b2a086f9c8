//! Tokens of the surface syntax.

use thiserror::Error;

use crate::typecheck::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    /// `#n`, a raw de Bruijn index relative to the named scope.
    Raw(usize),
    /// Text of a `{…}` condition literal, braces included.
    Cond(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Arrow,
    Assign,
    Eq,
    Lambda,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Raw(n) => format!("`#{n}`"),
            Tok::Cond(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lambda => "`lam`".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

/// Unicode spellings accepted as identifiers.
fn unicode_word(c: char) -> Option<&'static str> {
    match c {
        'Π' => Some("Pi"),
        'Σ' => Some("Sig"),
        '¬' => Some("Not"),
        _ => None,
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let span_to = |end: usize, line: usize, line_start: usize| Span {
            start,
            end,
            line,
            column: src[line_start..start].chars().count() + 1,
        };
        let end_of = |j: usize| chars.get(j).map_or(src.len(), |&(b, _)| b);
        if c == '\n' {
            line += 1;
            line_start = start + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1).map(|p| p.1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Eq),
            '\\' | 'λ' => Some(Tok::Lambda),
            '→' => Some(Tok::Arrow),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                span: span_to(end_of(i + 1), line, line_start),
            });
            i += 1;
            continue;
        }
        if let Some(word) = unicode_word(c) {
            out.push(Token {
                tok: Tok::Ident(word.to_string()),
                span: span_to(end_of(i + 1), line, line_start),
            });
            i += 1;
            continue;
        }
        if c == ':' {
            let (tok, len) = if chars.get(i + 1).map(|p| p.1) == Some('=') {
                (Tok::Assign, 2)
            } else {
                (Tok::Colon, 1)
            };
            out.push(Token {
                tok,
                span: span_to(end_of(i + len), line, line_start),
            });
            i += len;
            continue;
        }
        if c == '-' && chars.get(i + 1).map(|p| p.1) == Some('>') {
            out.push(Token {
                tok: Tok::Arrow,
                span: span_to(end_of(i + 2), line, line_start),
            });
            i += 2;
            continue;
        }
        if c == '{' {
            let mut j = i;
            while j < chars.len() && chars[j].1 != '}' {
                if chars[j].1 == '\n' {
                    break;
                }
                j += 1;
            }
            if j >= chars.len() || chars[j].1 != '}' {
                return Err(ParseError::new(
                    span_to(end_of(j), line, line_start),
                    "unterminated condition literal",
                ));
            }
            let end = end_of(j + 1);
            out.push(Token {
                tok: Tok::Cond(src[start..end].to_string()),
                span: span_to(end, line, line_start),
            });
            i = j + 1;
            continue;
        }
        if c == '#' || c.is_ascii_digit() {
            let digits_from = if c == '#' { i + 1 } else { i };
            let mut j = digits_from;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let span = span_to(end_of(j), line, line_start);
            let text = &src[end_of(digits_from)..end_of(j)];
            if text.is_empty() {
                return Err(ParseError::new(span, "expected digits after `#`"));
            }
            let n: u64 = text
                .parse()
                .map_err(|_| ParseError::new(span, format!("number `{text}` is too large")))?;
            let tok = if c == '#' {
                Tok::Raw(n as usize)
            } else {
                Tok::Num(n)
            };
            out.push(Token { tok, span });
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j].1;
                let hyphen_word = d == '-' && chars.get(j + 1).is_some_and(|p| p.1.is_alphabetic());
                if d.is_alphanumeric() || d == '_' || d == '\'' || hyphen_word {
                    j += 1;
                } else {
                    break;
                }
            }
            let end = end_of(j);
            out.push(Token {
                tok: Tok::Ident(src[start..end].to_string()),
                span: span_to(end, line, line_start),
            });
            i = j;
            continue;
        }
        return Err(ParseError::new(
            span_to(end_of(i + 1), line, line_start),
            format!("unexpected character `{c}`"),
        ));
    }
    Ok(out)
}
