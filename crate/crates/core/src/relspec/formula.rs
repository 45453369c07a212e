//! Safety-fragment formulas: syntax trees, parsing and printing.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, ParseError, Result};
use crate::relspec::atoms::AtomTable;
use crate::syntax::{Cursor, Tok};

/// A trace-relation term.
///
/// Trees built by hand may be in any shape; [`Formula::canonicalize`] yields
/// the canonical representative (flattened, sorted, duplicate-free
/// `And`/`Or`, no constant children).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Next(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(vec![a, b])
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(vec![a, b])
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        Formula::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn always(a: Formula) -> Self {
        Formula::Always(Box::new(a))
    }

    pub fn next(a: Formula) -> Self {
        Formula::Next(Box::new(a))
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src)?;
        let f = parse_formula(&mut cur)?;
        cur.expect_eof()?;
        Ok(f)
    }

    pub fn canonicalize(&self) -> Formula {
        let mut store = super::FormulaStore::new();
        let id = store.intern(self);
        store.to_formula(id)
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Arc<str>>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            Formula::WeakUntil(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Always(a) | Formula::Next(a) => a.collect_atoms(out),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::WeakUntil(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Always(a) | Formula::Next(a) => 1 + a.depth(),
        }
    }

    /// Checks that every atom is declared with the given arity.
    pub fn check_atoms(&self, atoms: &AtomTable, arity: usize) -> Result<()> {
        for a in self.atoms() {
            match atoms.arity(&a)? {
                Some(k) if k != arity => {
                    return Err(Error::input(format!(
                        "atom `{a}` has arity {k} but the query quantifies over {arity} systems"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Or(cs) if cs.len() > 1 => 0,
            Formula::And(cs) if cs.len() > 1 => 1,
            Formula::WeakUntil(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::And(cs) | Formula::Or(cs) if cs.is_empty() => {
                f.write_str(if matches!(self, Formula::And(_)) { "true" } else { "false" })
            }
            Formula::And(cs) | Formula::Or(cs) if cs.len() == 1 => cs[0].fmt_prec(f, min),
            Formula::And(cs) => join(f, cs, " and ", 2),
            Formula::Or(cs) => join(f, cs, " or ", 1),
            Formula::WeakUntil(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" weakuntil ")?;
                b.fmt_prec(f, 2)
            }
            Formula::Always(a) => {
                f.write_str("always ")?;
                a.fmt_prec(f, 3)
            }
            Formula::Next(a) => {
                f.write_str("next ")?;
                a.fmt_prec(f, 3)
            }
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, cs: &[Formula], sep: &str, min: u8) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        c.fmt_prec(f, min)?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

const KEYWORDS: [&str; 7] = ["always", "next", "weakuntil", "and", "or", "true", "false"];

pub(crate) fn parse_formula(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut cs = vec![parse_and(cur)?];
    while cur.eat_kw("or") {
        cs.push(parse_and(cur)?);
    }
    Ok(if cs.len() == 1 { cs.pop().unwrap() } else { Formula::Or(cs) })
}

fn parse_and(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut cs = vec![parse_wu(cur)?];
    while cur.eat_kw("and") {
        cs.push(parse_wu(cur)?);
    }
    Ok(if cs.len() == 1 { cs.pop().unwrap() } else { Formula::And(cs) })
}

fn parse_wu(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = parse_unary(cur)?;
    if cur.eat_kw("weakuntil") || cur.eat_kw("W") {
        let rhs = parse_wu(cur)?;
        return Ok(Formula::weak_until(lhs, rhs));
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    if cur.eat_kw("always") {
        return Ok(Formula::always(parse_unary(cur)?));
    }
    if cur.eat_kw("next") {
        return Ok(Formula::next(parse_unary(cur)?));
    }
    if cur.eat_kw("true") {
        return Ok(Formula::True);
    }
    if cur.eat_kw("false") {
        return Ok(Formula::False);
    }
    if cur.eat(&Tok::LParen) {
        let f = parse_formula(cur)?;
        cur.expect(&Tok::RParen)?;
        return Ok(f);
    }
    match cur.peek().clone() {
        Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) && name != "W" => {
            cur.bump();
            Ok(Formula::atom(&name))
        }
        other => Err(cur.error(format!("expected a formula, found {other}"))),
    }
}
