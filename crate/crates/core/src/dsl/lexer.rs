use std::sync::Arc;

use crate::model::Span;
use crate::value::{is_unit_char, is_unit_start};

use super::{ErrorCode, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number {
        text: String,
        value: f64,
        unit: Option<String>,
    },
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Arrow,
    Gt,
    GtGt,
    EqEq,
    Eq,
    Lt,
    LtLt,
    Pipe,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number { text, .. } => format!("`{text}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Gt => ">",
            Tok::GtGt => ">>",
            Tok::EqEq => "==",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::LtLt => "<<",
            Tok::Pipe => "|",
            Tok::Ident(_) | Tok::Number { .. } | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// A `//` comment. `text` excludes the slashes and the line break.
#[derive(Debug, Clone)]
pub(crate) struct Comment {
    pub text: String,
    pub line: u32,
}

#[derive(Debug)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

pub(crate) fn lex(text: &str, file: &Arc<str>) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let span = |len: usize| Span::new(file.clone(), line, col, len as u32);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let start = i + 2;
            let mut end = start;
            while end < chars.len() && chars[end] != '\n' {
                end += 1;
            }
            let body: String = chars[start..end].iter().collect();
            comments.push(Comment {
                text: body.trim_end_matches('\r').to_string(),
                line,
            });
            col += (end - i) as u32;
            i = end;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let number: String = chars[i..j].iter().collect();
            let mut unit = None;
            if j < chars.len() && is_unit_start(chars[j]) {
                let k0 = j;
                while j < chars.len() && is_unit_char(chars[j]) {
                    j += 1;
                }
                unit = Some(chars[k0..j].iter().collect::<String>());
            }
            let value: f64 = number.parse().map_err(|_| {
                ParseError::new(span(j - i), ErrorCode::Syntax, format!("malformed number `{number}`"))
            })?;
            let text: String = chars[i..j].iter().collect();
            (Tok::Number { text, value, unit }, j - i)
        } else {
            match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('>', Some('>')) => (Tok::GtGt, 2),
                ('<', Some('<')) => (Tok::LtLt, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('>', _) => (Tok::Gt, 1),
                ('<', _) => (Tok::Lt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (':', _) => (Tok::Colon, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('|', _) => (Tok::Pipe, 1),
                _ => {
                    return Err(ParseError::new(
                        span(1),
                        ErrorCode::Syntax,
                        format!("unexpected character `{c}`"),
                    ))
                }
            }
        };
        tokens.push(Token {
            tok,
            span: span(len),
        });
        i += len;
        col += len as u32;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(file.clone(), line, col, 0),
    });
    Ok(Lexed { tokens, comments })
}
