//! Symbolic values: linear expressions modulo M over introduced symbols.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::imp::ast::{Cond, Expr, Rel, Var};
use crate::lts::EventLabel;

pub type Sym = u32;

/// Values of symbols, keyed by symbol.
pub type Assignment = BTreeMap<Sym, i64>;

#[derive(Clone, Debug, Default)]
pub struct Symbols {
    names: Vec<String>,
    ranges: Vec<Option<Vec<i64>>>,
    counters: HashMap<String, usize>,
}

impl Symbols {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh symbol `prefix1`, `prefix2`, ... ranging over `range`
    /// (`None` is all of `[0, M)`).
    pub fn fresh(&mut self, prefix: &str, range: Option<Vec<i64>>) -> Sym {
        let k = self.counters.entry(prefix.to_string()).or_insert(0);
        *k += 1;
        self.names.push(format!("{prefix}{k}"));
        self.ranges.push(range);
        (self.names.len() - 1) as Sym
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn range(&self, s: Sym) -> Option<&[i64]> {
        self.ranges[s as usize].as_deref()
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.names.iter().rposition(|n| n == name).map(|i| i as Sym)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn show_assignment(&self, a: &Assignment) -> String {
        let parts: Vec<String> = a.iter().map(|(s, v)| format!("{}={v}", self.name(*s))).collect();
        parts.join(", ")
    }
}

/// `c0 + sum ci * si (mod M)`, terms sorted by symbol with nonzero
/// coefficients in `[1, M)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    c0: i64,
    terms: Vec<(Sym, i64)>,
}

impl LinExpr {
    pub fn constant(c: i64, m: i64) -> Self {
        LinExpr { c0: c.rem_euclid(m), terms: Vec::new() }
    }

    pub fn symbol(s: Sym, m: i64) -> Self {
        LinExpr { c0: 0, terms: vec![(s, 1)] }.normalized(m)
    }

    fn normalized(mut self, m: i64) -> Self {
        self.c0 = self.c0.rem_euclid(m);
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(Sym, i64)> = Vec::with_capacity(self.terms.len());
        for (s, c) in self.terms {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += c,
                _ => out.push((s, c)),
            }
        }
        out.iter_mut().for_each(|t| t.1 = t.1.rem_euclid(m));
        out.retain(|t| t.1 != 0);
        self.terms = out;
        self
    }

    pub fn as_const(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.c0)
    }

    pub fn constant_part(&self) -> i64 {
        self.c0
    }

    pub fn terms(&self) -> &[(Sym, i64)] {
        &self.terms
    }

    pub fn coeff(&self, s: Sym) -> i64 {
        self.terms.iter().find(|t| t.0 == s).map_or(0, |t| t.1)
    }

    pub fn syms(&self) -> impl Iterator<Item = Sym> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    pub fn add(&self, o: &LinExpr, m: i64) -> LinExpr {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&o.terms);
        LinExpr { c0: self.c0 + o.c0, terms }.normalized(m)
    }

    pub fn scale(&self, k: i64, m: i64) -> LinExpr {
        let k = k.rem_euclid(m);
        LinExpr { c0: self.c0 * k, terms: self.terms.iter().map(|&(s, c)| (s, c * k)).collect() }.normalized(m)
    }

    pub fn sub(&self, o: &LinExpr, m: i64) -> LinExpr {
        self.add(&o.scale(m - 1, m), m)
    }

    /// Product, defined when one side is constant.
    pub fn mul(&self, o: &LinExpr, m: i64) -> Option<LinExpr> {
        match (self.as_const(), o.as_const()) {
            (Some(k), _) => Some(o.scale(k, m)),
            (_, Some(k)) => Some(self.scale(k, m)),
            _ => None,
        }
    }

    pub fn substitute(&self, s: Sym, by: &LinExpr, m: i64) -> LinExpr {
        let c = self.coeff(s);
        if c == 0 {
            return self.clone();
        }
        let rest = LinExpr { c0: self.c0, terms: self.terms.iter().copied().filter(|t| t.0 != s).collect() };
        rest.add(&by.scale(c, m), m)
    }

    /// Value in `[0, M)`; symbols missing from the assignment read as 0.
    pub fn eval(&self, a: &Assignment, m: i64) -> i64 {
        self.terms
            .iter()
            .fold(self.c0, |acc, &(s, c)| (acc + c * a.get(&s).copied().unwrap_or(0)).rem_euclid(m))
    }

    pub fn show(&self, syms: &Symbols) -> String {
        if self.terms.is_empty() {
            return self.c0.to_string();
        }
        let mut s = String::new();
        for (i, &(x, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            if c == 1 {
                s.push_str(syms.name(x));
            } else {
                let _ = write!(s, "{c}*{}", syms.name(x));
            }
        }
        if self.c0 != 0 {
            let _ = write!(s, " + {}", self.c0);
        }
        s
    }
}

/// Boolean combinations of comparisons between linear expressions.
/// Comparisons other than `==`/`!=` compare representatives in `[0, M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    False,
    Cmp(LinExpr, Rel, LinExpr),
    Not(Box<Constraint>),
    And(Box<Constraint>, Box<Constraint>),
    Or(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn not(c: Constraint) -> Constraint {
        Constraint::Not(Box::new(c))
    }

    pub fn and(a: Constraint, b: Constraint) -> Constraint {
        Constraint::And(Box::new(a), Box::new(b))
    }

    pub fn eq(a: LinExpr, b: LinExpr) -> Constraint {
        Constraint::Cmp(a, Rel::Eq, b)
    }

    pub fn eval(&self, a: &Assignment, m: i64) -> bool {
        match self {
            Constraint::True => true,
            Constraint::False => false,
            Constraint::Cmp(x, r, y) => r.holds(x.eval(a, m), y.eval(a, m)),
            Constraint::Not(c) => !c.eval(a, m),
            Constraint::And(x, y) => x.eval(a, m) && y.eval(a, m),
            Constraint::Or(x, y) => x.eval(a, m) || y.eval(a, m),
        }
    }

    pub fn syms(&self, out: &mut Vec<Sym>) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Cmp(x, _, y) => {
                out.extend(x.syms());
                out.extend(y.syms());
            }
            Constraint::Not(c) => c.syms(out),
            Constraint::And(x, y) | Constraint::Or(x, y) => {
                x.syms(out);
                y.syms(out);
            }
        }
    }

    pub fn substitute(&self, s: Sym, by: &LinExpr, m: i64) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::Cmp(x, r, y) => Constraint::Cmp(x.substitute(s, by, m), *r, y.substitute(s, by, m)),
            Constraint::Not(c) => Constraint::not(c.substitute(s, by, m)),
            Constraint::And(x, y) => Constraint::and(x.substitute(s, by, m), y.substitute(s, by, m)),
            Constraint::Or(x, y) => Constraint::Or(Box::new(x.substitute(s, by, m)), Box::new(y.substitute(s, by, m))),
        }
    }

    /// Folds comparisons decided by linear normalization alone.
    pub fn simplify(&self, m: i64) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::Cmp(x, r, y) => {
                let decided = match (x.as_const(), y.as_const(), r) {
                    (Some(a), Some(b), _) => Some(r.holds(a, b)),
                    (_, _, Rel::Eq | Rel::Ne) => x.sub(y, m).as_const().map(|d| (d == 0) == (*r == Rel::Eq)),
                    _ => None,
                };
                match decided {
                    Some(true) => Constraint::True,
                    Some(false) => Constraint::False,
                    None => self.clone(),
                }
            }
            Constraint::Not(c) => match c.simplify(m) {
                Constraint::True => Constraint::False,
                Constraint::False => Constraint::True,
                c => Constraint::not(c),
            },
            Constraint::And(x, y) => match (x.simplify(m), y.simplify(m)) {
                (Constraint::False, _) | (_, Constraint::False) => Constraint::False,
                (Constraint::True, c) | (c, Constraint::True) => c,
                (a, b) => Constraint::and(a, b),
            },
            Constraint::Or(x, y) => match (x.simplify(m), y.simplify(m)) {
                (Constraint::True, _) | (_, Constraint::True) => Constraint::True,
                (Constraint::False, c) | (c, Constraint::False) => c,
                (a, b) => Constraint::Or(Box::new(a), Box::new(b)),
            },
        }
    }

    pub fn show(&self, syms: &Symbols) -> String {
        match self {
            Constraint::True => "true".into(),
            Constraint::False => "false".into(),
            Constraint::Cmp(x, r, y) => format!("{} {} {}", x.show(syms), r.symbol(), y.show(syms)),
            Constraint::Not(c) => format!("not ({})", c.show(syms)),
            Constraint::And(x, y) => format!("({}) and ({})", x.show(syms), y.show(syms)),
            Constraint::Or(x, y) => format!("({}) or ({})", x.show(syms), y.show(syms)),
        }
    }
}

/// Program memory with symbolic contents; unmentioned variables hold 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymMemory(BTreeMap<Var, LinExpr>);

impl SymMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> LinExpr {
        self.0.get(x).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, x: &Var, v: LinExpr) {
        if v.as_const() == Some(0) {
            self.0.remove(x);
        } else {
            self.0.insert(x.clone(), v);
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn show(&self, syms: &Symbols) -> String {
        let parts: Vec<String> = self.0.iter().map(|(x, v)| format!("{x}: {}", v.show(syms))).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// An event whose payload may be symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymEvent {
    In(LinExpr),
    Out(LinExpr),
    Label(EventLabel),
}

impl SymEvent {
    pub fn concrete(&self, a: &Assignment, m: i64) -> EventLabel {
        match self {
            SymEvent::In(v) => EventLabel::In(v.eval(a, m)),
            SymEvent::Out(v) => EventLabel::Out(v.eval(a, m)),
            SymEvent::Label(e) => e.clone(),
        }
    }

    pub fn syms(&self) -> Vec<Sym> {
        match self {
            SymEvent::In(v) | SymEvent::Out(v) => v.syms().collect(),
            SymEvent::Label(_) => Vec::new(),
        }
    }

    pub fn show(&self, syms: &Symbols) -> String {
        match self {
            SymEvent::In(v) => format!("in({})", v.show(syms)),
            SymEvent::Out(v) => format!("out({})", v.show(syms)),
            SymEvent::Label(e) => e.to_string(),
        }
    }
}

pub fn eval_expr(e: &Expr, mem: &SymMemory, m: i64) -> Result<LinExpr, String> {
    Ok(match e {
        Expr::Const(c) => LinExpr::constant(*c, m),
        Expr::Var(x) => mem.get(x),
        Expr::Add(a, b) => eval_expr(a, mem, m)?.add(&eval_expr(b, mem, m)?, m),
        Expr::Sub(a, b) => eval_expr(a, mem, m)?.sub(&eval_expr(b, mem, m)?, m),
        Expr::Mul(a, b) => eval_expr(a, mem, m)?
            .mul(&eval_expr(b, mem, m)?, m)
            .ok_or_else(|| format!("`{e}` multiplies two symbolic values"))?,
    })
}

pub fn eval_cond(c: &Cond, mem: &SymMemory, m: i64) -> Result<Constraint, String> {
    Ok(match c {
        Cond::True => Constraint::True,
        Cond::False => Constraint::False,
        Cond::Cmp(a, r, b) => Constraint::Cmp(eval_expr(a, mem, m)?, *r, eval_expr(b, mem, m)?),
        Cond::Not(c) => Constraint::not(eval_cond(c, mem, m)?),
        Cond::And(a, b) => Constraint::and(eval_cond(a, mem, m)?, eval_cond(b, mem, m)?),
        Cond::Or(a, b) => Constraint::Or(Box::new(eval_cond(a, mem, m)?), Box::new(eval_cond(b, mem, m)?)),
    })
}
