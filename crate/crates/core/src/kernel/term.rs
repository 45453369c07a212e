//! Expressions written in proof scripts: replies such as `2 * v1` over
//! introduced symbols, and memory invariants such as `2 * l.x == r.x`.

use std::fmt;

use crate::error::ParseError;
use crate::imp::ast::{Rel, Var};
use crate::kernel::sym::{Constraint, LinExpr};
use crate::syntax::{Cursor, Tok};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TExpr {
    Const(i64),
    Name(String),
    Mem(Which, Var),
    Add(Box<TExpr>, Box<TExpr>),
    Sub(Box<TExpr>, Box<TExpr>),
    Mul(Box<TExpr>, Box<TExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TCond {
    True,
    False,
    Cmp(TExpr, Rel, TExpr),
    Not(Box<TCond>),
    And(Box<TCond>, Box<TCond>),
    Or(Box<TCond>, Box<TCond>),
}

/// Resolves the leaves of a script expression.
pub trait Env {
    fn name(&self, n: &str) -> Result<LinExpr, String>;
    fn mem(&self, w: Which, x: &str) -> Result<LinExpr, String>;
}

impl TExpr {
    pub fn lin(&self, env: &dyn Env, m: i64) -> Result<LinExpr, String> {
        Ok(match self {
            TExpr::Const(c) => LinExpr::constant(*c, m),
            TExpr::Name(n) => env.name(n)?,
            TExpr::Mem(w, x) => env.mem(*w, x)?,
            TExpr::Add(a, b) => a.lin(env, m)?.add(&b.lin(env, m)?, m),
            TExpr::Sub(a, b) => a.lin(env, m)?.sub(&b.lin(env, m)?, m),
            TExpr::Mul(a, b) => {
                a.lin(env, m)?.mul(&b.lin(env, m)?, m).ok_or_else(|| format!("`{self}` is not linear"))?
            }
        })
    }

    fn mentions_mem(&self) -> bool {
        match self {
            TExpr::Mem(..) => true,
            TExpr::Const(_) | TExpr::Name(_) => false,
            TExpr::Add(a, b) | TExpr::Sub(a, b) | TExpr::Mul(a, b) => a.mentions_mem() || b.mentions_mem(),
        }
    }
}

impl TCond {
    pub fn constraint(&self, env: &dyn Env, m: i64) -> Result<Constraint, String> {
        Ok(match self {
            TCond::True => Constraint::True,
            TCond::False => Constraint::False,
            TCond::Cmp(a, r, b) => Constraint::Cmp(a.lin(env, m)?, *r, b.lin(env, m)?),
            TCond::Not(c) => Constraint::not(c.constraint(env, m)?),
            TCond::And(a, b) => Constraint::and(a.constraint(env, m)?, b.constraint(env, m)?),
            TCond::Or(a, b) => Constraint::Or(Box::new(a.constraint(env, m)?), Box::new(b.constraint(env, m)?)),
        })
    }

    /// Variables mentioned as `l.x` / `r.x`.
    pub fn mem_vars(&self, w: Which, out: &mut Vec<Var>) {
        fn go(e: &TExpr, w: Which, out: &mut Vec<Var>) {
            match e {
                TExpr::Mem(v, x) if *v == w => out.push(x.clone()),
                TExpr::Add(a, b) | TExpr::Sub(a, b) | TExpr::Mul(a, b) => {
                    go(a, w, out);
                    go(b, w, out);
                }
                _ => {}
            }
        }
        match self {
            TCond::True | TCond::False => {}
            TCond::Cmp(a, _, b) => {
                go(a, w, out);
                go(b, w, out);
            }
            TCond::Not(c) => c.mem_vars(w, out),
            TCond::And(a, b) | TCond::Or(a, b) => {
                a.mem_vars(w, out);
                b.mem_vars(w, out);
            }
        }
    }

    pub fn mentions_mem(&self) -> bool {
        match self {
            TCond::True | TCond::False => false,
            TCond::Cmp(a, _, b) => a.mentions_mem() || b.mentions_mem(),
            TCond::Not(c) => c.mentions_mem(),
            TCond::And(a, b) | TCond::Or(a, b) => a.mentions_mem() || b.mentions_mem(),
        }
    }
}

impl fmt::Display for TExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TExpr::Const(c) => write!(f, "{c}"),
            TExpr::Name(n) => f.write_str(n),
            TExpr::Mem(Which::L, x) => write!(f, "l.{x}"),
            TExpr::Mem(Which::R, x) => write!(f, "r.{x}"),
            TExpr::Add(a, b) => write!(f, "({a} + {b})"),
            TExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            TExpr::Mul(a, b) => write!(f, "{a} * {b}"),
        }
    }
}

impl fmt::Display for TCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TCond::True => f.write_str("true"),
            TCond::False => f.write_str("false"),
            TCond::Cmp(a, r, b) => write!(f, "{a} {} {b}", r.symbol()),
            TCond::Not(c) => write!(f, "not ({c})"),
            TCond::And(a, b) => write!(f, "({a}) and ({b})"),
            TCond::Or(a, b) => write!(f, "({a}) or ({b})"),
        }
    }
}

pub(crate) fn parse_texpr(cur: &mut Cursor) -> Result<TExpr, ParseError> {
    let mut lhs = parse_term(cur)?;
    loop {
        if cur.eat(&Tok::Plus) {
            lhs = TExpr::Add(Box::new(lhs), Box::new(parse_term(cur)?));
        } else if cur.eat(&Tok::Minus) {
            lhs = TExpr::Sub(Box::new(lhs), Box::new(parse_term(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(cur: &mut Cursor) -> Result<TExpr, ParseError> {
    let mut lhs = parse_factor(cur)?;
    while cur.eat(&Tok::Star) {
        lhs = TExpr::Mul(Box::new(lhs), Box::new(parse_factor(cur)?));
    }
    Ok(lhs)
}

fn parse_factor(cur: &mut Cursor) -> Result<TExpr, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(TExpr::Const(n))
        }
        Tok::LParen => {
            cur.bump();
            let e = parse_texpr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::Ident(n) => {
            cur.bump();
            let side = match n.as_str() {
                "l" => Some(Which::L),
                "r" => Some(Which::R),
                _ => None,
            };
            if let Some(w) = side {
                if cur.peek() == &Tok::Dot && matches!(cur.peek_at(1), Tok::Ident(_)) {
                    cur.bump();
                    let x = cur.ident()?;
                    return Ok(TExpr::Mem(w, Var::from(x.as_str())));
                }
            }
            Ok(TExpr::Name(n))
        }
        other => Err(cur.error(format!("expected an expression, found {other}"))),
    }
}

pub(crate) fn parse_tcond(cur: &mut Cursor) -> Result<TCond, ParseError> {
    let mut lhs = parse_and(cur)?;
    while cur.eat_kw("or") {
        lhs = TCond::Or(Box::new(lhs), Box::new(parse_and(cur)?));
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor) -> Result<TCond, ParseError> {
    let mut lhs = parse_catom(cur)?;
    while cur.eat_kw("and") {
        lhs = TCond::And(Box::new(lhs), Box::new(parse_catom(cur)?));
    }
    Ok(lhs)
}

fn parse_catom(cur: &mut Cursor) -> Result<TCond, ParseError> {
    if cur.eat_kw("true") {
        return Ok(TCond::True);
    }
    if cur.eat_kw("false") {
        return Ok(TCond::False);
    }
    if cur.eat_kw("not") || cur.eat(&Tok::Bang) {
        return Ok(TCond::Not(Box::new(parse_catom(cur)?)));
    }
    if cur.peek() == &Tok::LParen {
        let mark = cur.mark();
        cur.bump();
        if let Ok(c) = parse_tcond(cur) {
            if cur.eat(&Tok::RParen) && !is_rel(cur.peek()) && !matches!(cur.peek(), Tok::Plus | Tok::Minus | Tok::Star) {
                return Ok(c);
            }
        }
        cur.reset(mark);
    }
    let a = parse_texpr(cur)?;
    let r = match cur.bump() {
        Tok::EqEq | Tok::Eq => Rel::Eq,
        Tok::Ne => Rel::Ne,
        Tok::Lt => Rel::Lt,
        Tok::Le => Rel::Le,
        Tok::Gt => Rel::Gt,
        Tok::Ge => Rel::Ge,
        other => return Err(cur.error(format!("expected a comparison, found {other}"))),
    };
    Ok(TCond::Cmp(a, r, parse_texpr(cur)?))
}

fn is_rel(t: &Tok) -> bool {
    matches!(t, Tok::EqEq | Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
}
