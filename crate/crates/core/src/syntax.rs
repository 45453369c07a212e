//! Tokenizer and cursor shared by every text format in the crate: LTS
//! declarations, atom and formula syntax, IMP programs, lasso literals, spec
//! files and proof scripts.
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Colon,
    Assign,
    EqEq,
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Caret,
    Arrow,
    FatArrow,
    DotDot,
    Bang,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Semi => ";",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::Assign => ":=",
                    Tok::EqEq => "==",
                    Tok::Eq => "=",
                    Tok::Ne => "!=",
                    Tok::Le => "<=",
                    Tok::Ge => ">=",
                    Tok::Lt => "<",
                    Tok::Gt => ">",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Caret => "^",
                    Tok::Arrow => "->",
                    Tok::FatArrow => "=>",
                    Tok::DotDot => "..",
                    Tok::Bang => "!",
                    Tok::At => "@",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// True when whitespace or a comment separates this token from the previous one.
    pub spaced: bool,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut spaced = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            spaced = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            spaced = true;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[start..j].iter().collect();
            let n = text.parse::<i64>().map_err(|_| ParseError::new(pos, format!("integer literal `{text}` is too large")))?;
            (Tok::Int(n), j - start)
        } else if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            while j < chars.len() && chars[j] != '"' {
                if chars[j] == '\n' {
                    return Err(ParseError::new(pos, "unterminated string literal"));
                }
                s.push(chars[j]);
                j += 1;
            }
            if j >= chars.len() {
                return Err(ParseError::new(pos, "unterminated string literal"));
            }
            (Tok::Str(s), j + 1 - i)
        } else {
            match (c, peek) {
                (':', Some('=')) => (Tok::Assign, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('=', Some('>')) => (Tok::FatArrow, 2),
                ('!', Some('=')) => (Tok::Ne, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (';', _) => (Tok::Semi, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('^', _) => (Tok::Caret, 1),
                ('!', _) => (Tok::Bang, 1),
                ('@', _) => (Tok::At, 1),
                _ => return Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Token { tok, pos, spaced });
        spaced = false;
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col }, spaced: true });
    Ok(out)
}

/// A cursor over a token stream with the usual `peek` / `expect` helpers.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor { toks: tokenize(src)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn mark(&self) -> usize {
        self.at
    }

    pub fn reset(&mut self, mark: usize) {
        self.at = mark;
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    /// Whether the current token is separated from the previous one by whitespace.
    pub fn spaced(&self) -> bool {
        self.toks[self.at].spaced
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.peek())))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {other}"))),
        }
    }

    pub fn int(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            Tok::Minus => {
                self.bump();
                Ok(-self.int()?)
            }
            other => Err(self.error(format!("expected integer, found {other}"))),
        }
    }

    pub fn string(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected string literal, found {other}"))),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos(), msg)
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input {}", self.peek())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_lts_arrows() {
        let toks: Vec<Tok> = tokenize("q0 -a-> q1; q1 -> q2 # silent\n").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("q0".into()),
                Tok::Minus,
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("q1".into()),
                Tok::Semi,
                Tok::Ident("q1".into()),
                Tok::Arrow,
                Tok::Ident("q2".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_positions() {
        let err = tokenize("a\n  $").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
