//! IMP_io concrete syntax.
//!
//! ```text
//! prog  := stmt (';' stmt)* [';']
//! stmt  := 'loop' block | 'if' cond 'then' block 'else' block
//!        | 'input' x | 'output' e | 'havoc' x | x ':=' e | '{' prog '}'
//! block := '{' prog '}' | stmt
//! ```

use std::sync::Arc;

use crate::error::{ParseError, Result};
use crate::imp::ast::{Cond, Expr, Prog, Rel, Stmt};
use crate::syntax::{Cursor, Pos, Tok};

const KEYWORDS: [&str; 12] = ["loop", "if", "then", "else", "input", "output", "havoc", "true", "false", "and", "or", "not"];

/// A parsed statement with the position of its first token, used for
/// diagnostics before the tree is stripped of locations.
struct Located {
    stmt: LStmt,
    pos: Pos,
}

enum LStmt {
    Loop(Box<Located>),
    If(Cond, Box<Located>, Box<Located>),
    Basic(Stmt),
    Seq(Box<Located>, Box<Located>),
}

pub fn parse_program(src: &str) -> Result<Prog> {
    let mut cur = Cursor::new(src)?;
    let p = parse_seq(&mut cur, &Tok::Eof)?;
    cur.expect_eof()?;
    check_reactive(&p)?;
    Ok(strip(&p))
}

/// Parses a program embedded in a larger text up to a closing brace
/// (not consumed).
pub(crate) fn parse_embedded(cur: &mut Cursor) -> Result<Prog, ParseError> {
    let p = parse_seq(cur, &Tok::RBrace)?;
    check_reactive(&p)?;
    Ok(strip(&p))
}

fn strip(p: &Located) -> Prog {
    Arc::new(match &p.stmt {
        LStmt::Loop(b) => Stmt::Loop(strip(b)),
        LStmt::If(c, t, e) => Stmt::If(c.clone(), strip(t), strip(e)),
        LStmt::Basic(s) => s.clone(),
        LStmt::Seq(a, b) => Stmt::Seq(strip(a), strip(b)),
    })
}

/// Every control path must end in a loop.
fn check_reactive(p: &Located) -> Result<(), ParseError> {
    match &p.stmt {
        LStmt::Loop(_) => Ok(()),
        LStmt::If(_, t, e) => {
            check_reactive(t)?;
            check_reactive(e)
        }
        LStmt::Seq(_, b) => check_reactive(b),
        LStmt::Basic(s) => Err(ParseError::new(
            p.pos,
            format!("`{s}` ends a control path; every path of a program must end in a loop"),
        )),
    }
}

fn parse_seq(cur: &mut Cursor, close: &Tok) -> Result<Located, ParseError> {
    let first = parse_stmt(cur)?;
    if cur.eat(&Tok::Semi) && cur.peek() != close {
        let rest = parse_seq(cur, close)?;
        let pos = first.pos;
        return Ok(Located { stmt: LStmt::Seq(Box::new(first), Box::new(rest)), pos });
    }
    Ok(first)
}

fn parse_block(cur: &mut Cursor) -> Result<Located, ParseError> {
    if cur.peek() == &Tok::LBrace {
        cur.bump();
        let p = parse_seq(cur, &Tok::RBrace)?;
        cur.expect(&Tok::RBrace)?;
        return Ok(p);
    }
    parse_stmt(cur)
}

fn var(cur: &mut Cursor) -> Result<Arc<str>, ParseError> {
    let pos = cur.pos();
    let x = cur.ident()?;
    if KEYWORDS.contains(&x.as_str()) {
        return Err(ParseError::new(pos, format!("`{x}` is a keyword, not a variable")));
    }
    Ok(Arc::from(x.as_str()))
}

fn parse_stmt(cur: &mut Cursor) -> Result<Located, ParseError> {
    let pos = cur.pos();
    let stmt = if cur.eat_kw("loop") {
        LStmt::Loop(Box::new(parse_block(cur)?))
    } else if cur.eat_kw("if") {
        let c = parse_cond(cur)?;
        cur.expect_kw("then")?;
        let t = parse_block(cur)?;
        cur.expect_kw("else")?;
        let e = parse_block(cur)?;
        LStmt::If(c, Box::new(t), Box::new(e))
    } else if cur.eat_kw("input") {
        LStmt::Basic(Stmt::Input(var(cur)?))
    } else if cur.eat_kw("output") {
        LStmt::Basic(Stmt::Output(parse_expr(cur)?))
    } else if cur.eat_kw("havoc") {
        LStmt::Basic(Stmt::Havoc(var(cur)?))
    } else if cur.peek() == &Tok::LBrace {
        return parse_block(cur);
    } else {
        let x = var(cur)?;
        cur.expect(&Tok::Assign)?;
        LStmt::Basic(Stmt::Assign(x, parse_expr(cur)?))
    };
    Ok(Located { stmt, pos })
}

pub(crate) fn parse_cond(cur: &mut Cursor) -> Result<Cond, ParseError> {
    let mut lhs = parse_cond_and(cur)?;
    while cur.eat_kw("or") {
        lhs = Cond::Or(Box::new(lhs), Box::new(parse_cond_and(cur)?));
    }
    Ok(lhs)
}

fn parse_cond_and(cur: &mut Cursor) -> Result<Cond, ParseError> {
    let mut lhs = parse_cond_atom(cur)?;
    while cur.eat_kw("and") {
        lhs = Cond::And(Box::new(lhs), Box::new(parse_cond_atom(cur)?));
    }
    Ok(lhs)
}

fn parse_cond_atom(cur: &mut Cursor) -> Result<Cond, ParseError> {
    if cur.eat_kw("true") {
        return Ok(Cond::True);
    }
    if cur.eat_kw("false") {
        return Ok(Cond::False);
    }
    if cur.eat_kw("not") || cur.eat(&Tok::Bang) {
        return Ok(Cond::Not(Box::new(parse_cond_atom(cur)?)));
    }
    if cur.peek() == &Tok::LParen {
        let mark = cur.mark();
        cur.bump();
        if let Ok(c) = parse_cond(cur) {
            if cur.eat(&Tok::RParen) && !is_rel(cur.peek()) && !matches!(cur.peek(), Tok::Plus | Tok::Minus | Tok::Star) {
                return Ok(c);
            }
        }
        cur.reset(mark);
    }
    let a = parse_expr(cur)?;
    let rel = match cur.bump() {
        Tok::EqEq | Tok::Eq => Rel::Eq,
        Tok::Ne => Rel::Ne,
        Tok::Lt => Rel::Lt,
        Tok::Le => Rel::Le,
        Tok::Gt => Rel::Gt,
        Tok::Ge => Rel::Ge,
        other => return Err(cur.error(format!("expected a comparison, found {other}"))),
    };
    let b = parse_expr(cur)?;
    Ok(Cond::Cmp(a, rel, b))
}

fn is_rel(t: &Tok) -> bool {
    matches!(t, Tok::EqEq | Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
}

pub(crate) fn parse_expr(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut lhs = parse_term(cur)?;
    loop {
        if cur.eat(&Tok::Plus) {
            lhs = Expr::Add(Box::new(lhs), Box::new(parse_term(cur)?));
        } else if cur.eat(&Tok::Minus) {
            lhs = Expr::Sub(Box::new(lhs), Box::new(parse_term(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut lhs = parse_factor(cur)?;
    while cur.eat(&Tok::Star) {
        lhs = Expr::Mul(Box::new(lhs), Box::new(parse_factor(cur)?));
    }
    Ok(lhs)
}

fn parse_factor(cur: &mut Cursor) -> Result<Expr, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Expr::Const(n))
        }
        Tok::LParen => {
            cur.bump();
            let e = parse_expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::Ident(_) => Ok(Expr::Var(var(cur)?)),
        other => Err(cur.error(format!("expected an expression, found {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn echo_shape() {
        let p = parse_program("loop { input x; output x }").unwrap();
        let want = Stmt::Loop(Arc::new(Stmt::Seq(
            Arc::new(Stmt::Input(Arc::from("x"))),
            Arc::new(Stmt::Output(Expr::Var(Arc::from("x")))),
        )));
        assert_eq!(*p, want);
    }

    #[test]
    fn reactivity() {
        match parse_program("output 1").unwrap_err() {
            Error::Parse(e) => {
                assert!(e.message.contains("output 1"), "{}", e.message);
                assert_eq!((e.line, e.col), (1, 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_program("loop output 0").is_ok());
        assert!(parse_program("x := 0; loop { x := x + 1; output x }").is_ok());
        assert!(parse_program("if x < 1 then loop output 0 else output 1").is_err());
        assert!(parse_program("loop output 0; output 1").is_err());
    }

    #[test]
    fn round_trip() {
        let src = "x := 0; loop { havoc y; if x < 2 and not (y == 1) then { x := x + y * 2 } else { x := x - (y - 1) }; output x }";
        let p = parse_program(src).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn syntax_error_location() {
        match parse_program("loop {\n  input 3 }").unwrap_err() {
            Error::Parse(e) => assert_eq!((e.line, e.col), (2, 9)),
            other => panic!("{other:?}"),
        }
    }
}
