//! Atom tables: named predicates over event tuples.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::lts::EventLabel;
use crate::syntax::{Cursor, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arith {
    Const(i64),
    Var(String),
    Add(Box<Arith>, Box<Arith>),
    Sub(Box<Arith>, Box<Arith>),
    Mul(Box<Arith>, Box<Arith>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvTerm {
    Param(usize),
    In(Arith),
    Out(Arith),
    Sym(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatArg {
    Any,
    Var(String),
    Lit(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    In(PatArg),
    Out(PatArg),
    Sym(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pred {
    True,
    False,
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    Is(usize, Pattern),
    EvEq(EvTerm, EvTerm),
    EvNe(EvTerm, EvTerm),
    Cmp(Arith, CmpOp, Arith),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomDef {
    pub name: String,
    pub params: Vec<String>,
    pub pred: Pred,
}

impl AtomDef {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Atom declarations plus the arithmetic modulus used for payloads.
///
/// `eq` is built in (all events of the tuple are equal) unless redeclared.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    atoms: BTreeMap<String, AtomDef>,
    modulus: Option<i64>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a sequence of `atom NAME(p, ...) := PRED;` declarations.
    pub fn parse(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src)?;
        let mut t = AtomTable::new();
        while !cur.at_eof() {
            cur.expect_kw("atom")?;
            t.insert(parse_atom_decl(&mut cur)?)?;
        }
        Ok(t)
    }

    pub fn with_modulus(mut self, m: Option<i64>) -> Self {
        self.modulus = m;
        self
    }

    pub fn set_modulus(&mut self, m: Option<i64>) {
        self.modulus = m;
    }

    pub fn modulus(&self) -> Option<i64> {
        self.modulus
    }

    pub fn insert(&mut self, def: AtomDef) -> Result<()> {
        if self.atoms.contains_key(&def.name) {
            return Err(Error::input(format!("atom `{}` declared twice", def.name)));
        }
        self.atoms.insert(def.name.clone(), def);
        Ok(())
    }

    /// Declares an atom from its textual predicate.
    pub fn declare(&mut self, name: &str, params: &[&str], pred: &str) -> Result<()> {
        let params: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        let mut cur = Cursor::new(pred)?;
        let pred = parse_pred(&mut cur, &params)?;
        cur.expect_eof()?;
        self.insert(AtomDef { name: name.to_string(), params, pred })
    }

    pub fn get(&self, name: &str) -> Option<&AtomDef> {
        self.atoms.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(String::as_str)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        name == "eq" || self.atoms.contains_key(name)
    }

    /// Arity of a declared atom; `None` for the arity-polymorphic built-in `eq`.
    pub fn arity(&self, name: &str) -> Result<Option<usize>> {
        match self.atoms.get(name) {
            Some(d) => Ok(Some(d.arity())),
            None if name == "eq" => Ok(None),
            None => Err(Error::input(format!("undeclared atom `{name}`"))),
        }
    }

    pub fn eval_atom(&self, name: &str, events: &[EventLabel]) -> Result<bool> {
        match self.atoms.get(name) {
            Some(def) => {
                if def.arity() != events.len() {
                    return Err(Error::input(format!(
                        "atom `{name}` has arity {} but was applied to {} events",
                        def.arity(),
                        events.len()
                    )));
                }
                let mut env = HashMap::new();
                Ok(self.eval_pred(&def.pred, events, &mut env))
            }
            None if name == "eq" => Ok(events.windows(2).all(|w| w[0] == w[1])),
            None => Err(Error::input(format!("undeclared atom `{name}`"))),
        }
    }

    fn norm(&self, v: i64) -> i64 {
        match self.modulus {
            Some(m) => v.rem_euclid(m),
            None => v,
        }
    }

    fn arith(&self, a: &Arith, env: &HashMap<String, i64>) -> Option<i64> {
        let v = match a {
            Arith::Const(c) => *c,
            Arith::Var(x) => *env.get(x)?,
            Arith::Add(l, r) => self.arith(l, env)?.wrapping_add(self.arith(r, env)?),
            Arith::Sub(l, r) => self.arith(l, env)?.wrapping_sub(self.arith(r, env)?),
            Arith::Mul(l, r) => self.arith(l, env)?.wrapping_mul(self.arith(r, env)?),
        };
        Some(self.norm(v))
    }

    fn term(&self, t: &EvTerm, events: &[EventLabel], env: &HashMap<String, i64>) -> Option<EventLabel> {
        Some(match t {
            EvTerm::Param(i) => events[*i].clone(),
            EvTerm::In(a) => EventLabel::In(self.arith(a, env)?),
            EvTerm::Out(a) => EventLabel::Out(self.arith(a, env)?),
            EvTerm::Sym(s) => EventLabel::sym(s),
        })
    }

    fn bind(&self, arg: &PatArg, v: i64, env: &mut HashMap<String, i64>) -> bool {
        match arg {
            PatArg::Any => true,
            PatArg::Lit(n) => self.norm(*n) == self.norm(v),
            PatArg::Var(x) => match env.get(x) {
                Some(&b) => b == self.norm(v),
                None => {
                    env.insert(x.clone(), self.norm(v));
                    true
                }
            },
        }
    }

    fn eval_pred(&self, p: &Pred, events: &[EventLabel], env: &mut HashMap<String, i64>) -> bool {
        match p {
            Pred::True => true,
            Pred::False => false,
            Pred::Not(q) => !self.eval_pred(q, events, env),
            Pred::And(a, b) => self.eval_pred(a, events, env) && self.eval_pred(b, events, env),
            Pred::Or(a, b) => self.eval_pred(a, events, env) || self.eval_pred(b, events, env),
            Pred::Implies(a, b) => !self.eval_pred(a, events, env) || self.eval_pred(b, events, env),
            Pred::Is(i, pat) => match (pat, &events[*i]) {
                (Pattern::In(arg), EventLabel::In(v)) | (Pattern::Out(arg), EventLabel::Out(v)) => self.bind(arg, *v, env),
                (Pattern::Sym(s), EventLabel::Sym(t)) => s.as_str() == &**t,
                _ => false,
            },
            Pred::EvEq(a, b) => match (self.term(a, events, env), self.term(b, events, env)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
            Pred::EvNe(a, b) => match (self.term(a, events, env), self.term(b, events, env)) {
                (Some(x), Some(y)) => x != y,
                _ => false,
            },
            Pred::Cmp(a, op, b) => match (self.arith(a, env), self.arith(b, env)) {
                (Some(x), Some(y)) => match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                },
                _ => false,
            },
        }
    }
}

/// Parses `NAME(p, ...) := PRED;` (the `atom` keyword already consumed).
pub(crate) fn parse_atom_decl(cur: &mut Cursor) -> Result<AtomDef, ParseError> {
    let name = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let mut params = Vec::new();
    if !cur.eat(&Tok::RParen) {
        loop {
            let pos = cur.pos();
            let p = cur.ident()?;
            if params.contains(&p) {
                return Err(ParseError::new(pos, format!("duplicate parameter `{p}`")));
            }
            params.push(p);
            if cur.eat(&Tok::RParen) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    cur.expect(&Tok::Assign)?;
    let pred = parse_pred(cur, &params)?;
    cur.expect(&Tok::Semi)?;
    Ok(AtomDef { name, params, pred })
}

pub(crate) fn parse_pred(cur: &mut Cursor, params: &[String]) -> Result<Pred, ParseError> {
    let lhs = parse_or(cur, params)?;
    if cur.eat_kw("implies") {
        let rhs = parse_pred(cur, params)?;
        return Ok(Pred::Implies(Box::new(lhs), Box::new(rhs)));
    }
    Ok(lhs)
}

fn parse_or(cur: &mut Cursor, params: &[String]) -> Result<Pred, ParseError> {
    let mut lhs = parse_and(cur, params)?;
    while cur.eat_kw("or") {
        let rhs = parse_and(cur, params)?;
        lhs = Pred::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor, params: &[String]) -> Result<Pred, ParseError> {
    let mut lhs = parse_unary(cur, params)?;
    while cur.eat_kw("and") {
        let rhs = parse_unary(cur, params)?;
        lhs = Pred::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor, params: &[String]) -> Result<Pred, ParseError> {
    if cur.eat_kw("not") || cur.eat(&Tok::Bang) {
        return Ok(Pred::Not(Box::new(parse_unary(cur, params)?)));
    }
    if cur.eat_kw("true") {
        return Ok(Pred::True);
    }
    if cur.eat_kw("false") {
        return Ok(Pred::False);
    }
    if cur.peek() == &Tok::LParen {
        let mark = cur.mark();
        cur.bump();
        if let Ok(p) = parse_pred(cur, params) {
            if cur.eat(&Tok::RParen) && !is_cmp_op(cur.peek()) && !is_arith_op(cur.peek()) {
                return Ok(p);
            }
        }
        cur.reset(mark);
    }
    parse_comparison(cur, params)
}

fn is_cmp_op(t: &Tok) -> bool {
    matches!(t, Tok::EqEq | Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
}

fn is_arith_op(t: &Tok) -> bool {
    matches!(t, Tok::Plus | Tok::Minus | Tok::Star)
}

fn param_index(params: &[String], name: &str) -> Option<usize> {
    params.iter().position(|p| p == name)
}

fn parse_comparison(cur: &mut Cursor, params: &[String]) -> Result<Pred, ParseError> {
    let event_side = match cur.peek() {
        Tok::Ident(s) if param_index(params, s).is_some() => true,
        Tok::Ident(s) if (s == "in" || s == "out") && cur.peek_at(1) == &Tok::LParen => true,
        _ => false,
    };
    if event_side {
        if let Tok::Ident(s) = cur.peek().clone() {
            if let Some(i) = param_index(params, &s) {
                if matches!(cur.peek_at(1), Tok::Ident(k) if k == "is") {
                    cur.bump();
                    cur.bump();
                    return Ok(Pred::Is(i, parse_pattern(cur)?));
                }
            }
        }
        let lhs = parse_evterm(cur, params)?;
        let op = cur.bump();
        let rhs = parse_evterm(cur, params)?;
        return match op {
            Tok::EqEq | Tok::Eq => Ok(Pred::EvEq(lhs, rhs)),
            Tok::Ne => Ok(Pred::EvNe(lhs, rhs)),
            other => Err(cur.error(format!("expected `==` or `!=` between events, found {other}"))),
        };
    }
    let lhs = parse_arith(cur)?;
    let op = match cur.bump() {
        Tok::EqEq | Tok::Eq => CmpOp::Eq,
        Tok::Ne => CmpOp::Ne,
        Tok::Lt => CmpOp::Lt,
        Tok::Le => CmpOp::Le,
        Tok::Gt => CmpOp::Gt,
        Tok::Ge => CmpOp::Ge,
        other => return Err(cur.error(format!("expected a comparison operator, found {other}"))),
    };
    let rhs = parse_arith(cur)?;
    Ok(Pred::Cmp(lhs, op, rhs))
}

fn parse_pattern(cur: &mut Cursor) -> Result<Pattern, ParseError> {
    let name = cur.ident()?;
    if name == "in" || name == "out" {
        let arg = if cur.eat(&Tok::LParen) {
            let a = match cur.peek().clone() {
                Tok::Ident(x) if x == "_" => {
                    cur.bump();
                    PatArg::Any
                }
                Tok::Ident(x) => {
                    cur.bump();
                    PatArg::Var(x)
                }
                _ => PatArg::Lit(cur.int()?),
            };
            cur.expect(&Tok::RParen)?;
            a
        } else {
            PatArg::Any
        };
        return Ok(if name == "in" { Pattern::In(arg) } else { Pattern::Out(arg) });
    }
    Ok(Pattern::Sym(name))
}

fn parse_evterm(cur: &mut Cursor, params: &[String]) -> Result<EvTerm, ParseError> {
    let name = cur.ident()?;
    if let Some(i) = param_index(params, &name) {
        return Ok(EvTerm::Param(i));
    }
    if (name == "in" || name == "out") && cur.eat(&Tok::LParen) {
        let a = parse_arith(cur)?;
        cur.expect(&Tok::RParen)?;
        return Ok(if name == "in" { EvTerm::In(a) } else { EvTerm::Out(a) });
    }
    Ok(EvTerm::Sym(name))
}

pub(crate) fn parse_arith(cur: &mut Cursor) -> Result<Arith, ParseError> {
    let mut lhs = parse_term(cur)?;
    loop {
        if cur.eat(&Tok::Plus) {
            lhs = Arith::Add(Box::new(lhs), Box::new(parse_term(cur)?));
        } else if cur.eat(&Tok::Minus) {
            lhs = Arith::Sub(Box::new(lhs), Box::new(parse_term(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(cur: &mut Cursor) -> Result<Arith, ParseError> {
    let mut lhs = parse_factor(cur)?;
    while cur.eat(&Tok::Star) {
        lhs = Arith::Mul(Box::new(lhs), Box::new(parse_factor(cur)?));
    }
    Ok(lhs)
}

fn parse_factor(cur: &mut Cursor) -> Result<Arith, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Arith::Const(n))
        }
        Tok::Ident(x) => {
            cur.bump();
            Ok(Arith::Var(x))
        }
        Tok::LParen => {
            cur.bump();
            let a = parse_arith(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(a)
        }
        Tok::Minus => {
            cur.bump();
            Ok(Arith::Sub(Box::new(Arith::Const(0)), Box::new(parse_factor(cur)?)))
        }
        other => Err(cur.error(format!("expected an arithmetic expression, found {other}"))),
    }
}

impl fmt::Display for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arith::Const(c) => write!(f, "{c}"),
            Arith::Var(x) => f.write_str(x),
            Arith::Add(a, b) => write!(f, "({a} + {b})"),
            Arith::Sub(a, b) => write!(f, "({a} - {b})"),
            Arith::Mul(a, b) => write!(f, "{a} * {b}"),
        }
    }
}
