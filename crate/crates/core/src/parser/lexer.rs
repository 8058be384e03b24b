use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;

use super::ParseError;
use crate::expr::Q;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    LBrace,
    RBrace,
    Rel(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(q) => write!(f, "{q}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::Rel(r) => f.write_str(r),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Range<usize>,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            let mut digits = String::new();
            let mut frac = String::new();
            let mut seen_dot = false;
            while let Some(&(j, d)) = it.peek() {
                if d.is_ascii_digit() {
                    if seen_dot {
                        frac.push(d);
                    } else {
                        digits.push(d);
                    }
                } else if d == '.' && !seen_dot {
                    seen_dot = true;
                } else {
                    break;
                }
                end = j + d.len_utf8();
                it.next();
            }
            if digits.is_empty() && frac.is_empty() {
                return Err(ParseError { span: i..end, expected: vec!["number".into()], message: "stray '.'".into() });
            }
            let all = format!("{digits}{frac}");
            let n: BigInt = all.parse().unwrap();
            let d = num_traits::pow(BigInt::from(10), frac.len());
            out.push(Token { tok: Tok::Num(Q::new(n, d)), span: i..end });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            let mut s = String::new();
            while let Some(&(j, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    s.push(d);
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(s), span: i..end });
            continue;
        }
        it.next();
        let next = it.peek().map(|&(_, d)| d);
        let two = |r: &'static str| Tok::Rel(r);
        let (tok, len) = match (c, next) {
            ('=', Some('=')) => (two("=="), 2),
            ('!', Some('=')) => (two("!="), 2),
            ('>', Some('=')) => (two(">="), 2),
            ('<', Some('=')) => (two("<="), 2),
            ('>', _) => (two(">"), 1),
            ('<', _) => (two("<"), 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            _ => {
                return Err(ParseError {
                    span: i..i + c.len_utf8(),
                    expected: vec![],
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        if len == 2 {
            it.next();
        }
        out.push(Token { tok, span: i..i + len });
    }
    Ok(out)
}
