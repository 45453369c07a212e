//! Small-step semantics over memories with values modulo M.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::imp::ast::{Cond, Expr, Prog, Stmt, Var};
use crate::lts::EventLabel;

/// Variables to values in `[0, M)`. Zero entries are not stored, so equal
/// memories compare and hash equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Memory(BTreeMap<Var, i64>);

impl Memory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> i64 {
        self.0.get(x).copied().unwrap_or(0)
    }

    pub fn set(&mut self, x: &Var, v: i64, modulus: i64) {
        let v = v.rem_euclid(modulus);
        if v == 0 {
            self.0.remove(x);
        } else {
            self.0.insert(x.clone(), v);
        }
    }

    pub fn with(&self, x: &Var, v: i64, modulus: i64) -> Memory {
        let mut m = self.clone();
        m.set(x, v, modulus);
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &i64)> {
        self.0.iter()
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub prog: Prog,
    pub mem: Memory,
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.prog, self.mem)
    }
}

pub fn eval_expr(e: &Expr, m: &Memory, modulus: i64) -> i64 {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var(x) => m.get(x),
        Expr::Add(a, b) => eval_expr(a, m, modulus) + eval_expr(b, m, modulus),
        Expr::Sub(a, b) => eval_expr(a, m, modulus) - eval_expr(b, m, modulus),
        Expr::Mul(a, b) => eval_expr(a, m, modulus) * eval_expr(b, m, modulus),
    };
    v.rem_euclid(modulus)
}

pub fn eval_cond(c: &Cond, m: &Memory, modulus: i64) -> bool {
    match c {
        Cond::True => true,
        Cond::False => false,
        Cond::Cmp(a, r, b) => r.holds(eval_expr(a, m, modulus), eval_expr(b, m, modulus)),
        Cond::Not(c) => !eval_cond(c, m, modulus),
        Cond::And(a, b) => eval_cond(a, m, modulus) && eval_cond(b, m, modulus),
        Cond::Or(a, b) => eval_cond(a, m, modulus) || eval_cond(b, m, modulus),
    }
}

/// The instruction a program executes next. `rest` is the enclosing
/// continuation when the instruction sits at the head of a `;`.
#[derive(Clone, Debug)]
pub enum Head {
    Loop { body: Prog, rest: Option<Prog> },
    If { cond: Cond, then: Prog, els: Prog, rest: Option<Prog> },
    /// `(P1; P2); P3`
    Continue { p1: Prog, p2: Prog, p3: Prog },
    Input { x: Var, rest: Prog },
    Output { e: Expr, rest: Prog },
    Havoc { x: Var, rest: Prog },
    Assign { x: Var, e: Expr, rest: Prog },
    /// A basic instruction with no continuation.
    Stuck,
}

pub fn head(p: &Prog) -> Head {
    match &**p {
        Stmt::Loop(b) => Head::Loop { body: b.clone(), rest: None },
        Stmt::If(c, t, e) => Head::If { cond: c.clone(), then: t.clone(), els: e.clone(), rest: None },
        Stmt::Seq(a, r) => match &**a {
            Stmt::Seq(p1, p2) => Head::Continue { p1: p1.clone(), p2: p2.clone(), p3: r.clone() },
            Stmt::Loop(b) => Head::Loop { body: b.clone(), rest: Some(r.clone()) },
            Stmt::If(c, t, e) => Head::If { cond: c.clone(), then: t.clone(), els: e.clone(), rest: Some(r.clone()) },
            Stmt::Input(x) => Head::Input { x: x.clone(), rest: r.clone() },
            Stmt::Output(e) => Head::Output { e: e.clone(), rest: r.clone() },
            Stmt::Havoc(x) => Head::Havoc { x: x.clone(), rest: r.clone() },
            Stmt::Assign(x, e) => Head::Assign { x: x.clone(), e: e.clone(), rest: r.clone() },
        },
        _ => Head::Stuck,
    }
}

pub fn plug(p: Prog, rest: &Option<Prog>) -> Prog {
    match rest {
        Some(r) => Arc::new(Stmt::Seq(p, r.clone())),
        None => p,
    }
}

pub fn unfold(body: &Prog) -> Prog {
    Arc::new(Stmt::Seq(body.clone(), Arc::new(Stmt::Loop(body.clone()))))
}

pub fn reassociate(p1: &Prog, p2: &Prog, p3: &Prog) -> Prog {
    Arc::new(Stmt::Seq(p1.clone(), Arc::new(Stmt::Seq(p2.clone(), p3.clone()))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semantics {
    pub modulus: i64,
    pub input_domain: Vec<i64>,
}

impl Semantics {
    /// Inputs and havoc range over all of `[0, M)`.
    pub fn full(modulus: i64) -> Self {
        Semantics { modulus, input_domain: (0..modulus).collect() }
    }
}

/// All successors of a configuration under the small-step rules.
pub fn step(c: &Config, sem: &Semantics) -> Vec<(Option<EventLabel>, Config)> {
    let m = sem.modulus;
    let cfg = |prog: Prog, mem: Memory| Config { prog, mem };
    match head(&c.prog) {
        Head::Loop { body, rest } => vec![(None, cfg(plug(unfold(&body), &rest), c.mem.clone()))],
        Head::If { cond, then, els, rest } => {
            let branch = if eval_cond(&cond, &c.mem, m) { then } else { els };
            vec![(None, cfg(plug(branch, &rest), c.mem.clone()))]
        }
        Head::Continue { p1, p2, p3 } => vec![(None, cfg(reassociate(&p1, &p2, &p3), c.mem.clone()))],
        Head::Input { x, rest } => sem
            .input_domain
            .iter()
            .map(|&v| (Some(EventLabel::In(v.rem_euclid(m))), cfg(rest.clone(), c.mem.with(&x, v, m))))
            .collect(),
        Head::Output { e, rest } => vec![(Some(EventLabel::Out(eval_expr(&e, &c.mem, m))), cfg(rest, c.mem.clone()))],
        Head::Havoc { x, rest } => {
            sem.input_domain.iter().map(|&v| (None, cfg(rest.clone(), c.mem.with(&x, v, m)))).collect()
        }
        Head::Assign { x, e, rest } => {
            let v = eval_expr(&e, &c.mem, m);
            vec![(None, cfg(rest, c.mem.with(&x, v, m)))]
        }
        Head::Stuck => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imp::parse::parse_program;

    fn var(x: &str) -> Var {
        Arc::from(x)
    }

    #[test]
    fn expressions_wrap() {
        let mut m = Memory::new();
        m.set(&var("x"), 1, 8);
        let e = |s: &str| {
            let p = parse_program(&format!("output {s}; loop output 0")).unwrap();
            match &*p {
                Stmt::Seq(a, _) => match &**a {
                    Stmt::Output(e) => e.clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            }
        };
        assert_eq!(eval_expr(&e("x + 1"), &m, 8), 2);
        m.set(&var("x"), 6, 8);
        m.set(&var("y"), 3, 8);
        assert_eq!(eval_expr(&e("x + y"), &m, 8), 1);
        assert_eq!(eval_expr(&e("0 - 1"), &m, 8), 7);
        let c = Cond::Cmp(Expr::Var(var("z")), crate::imp::ast::Rel::Lt, Expr::Const(2));
        assert!(eval_cond(&c, &m, 8));
    }

    #[test]
    fn output_step() {
        let p = parse_program("output x; loop output 0").unwrap();
        let mut mem = Memory::new();
        mem.set(&var("x"), 3, 8);
        let succ = step(&Config { prog: p.clone(), mem: mem.clone() }, &Semantics::full(8));
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].0, Some(EventLabel::Out(3)));
        assert_eq!(succ[0].1.mem, mem);
    }

    #[test]
    fn havoc_step() {
        let p = parse_program("havoc y; loop output y").unwrap();
        let sem = Semantics { modulus: 8, input_domain: vec![0, 1] };
        let succ = step(&Config { prog: p, mem: Memory::new() }, &sem);
        assert_eq!(succ.len(), 2);
        assert!(succ.iter().all(|(e, _)| e.is_none()));
        assert_eq!(succ[0].1.mem.get("y"), 0);
        assert_eq!(succ[1].1.mem.get("y"), 1);
    }

    #[test]
    fn loop_unfolds() {
        let p = parse_program("loop { input x; output x }").unwrap();
        let succ = step(&Config { prog: p.clone(), mem: Memory::new() }, &Semantics::full(2));
        let body = match &*p {
            Stmt::Loop(b) => b.clone(),
            _ => unreachable!(),
        };
        assert_eq!(succ, vec![(None, Config { prog: Arc::new(Stmt::Seq(body, p.clone())), mem: Memory::new() })]);
    }

    #[test]
    fn stuck_without_continuation() {
        let p: Prog = Arc::new(Stmt::Output(Expr::Const(1)));
        assert!(step(&Config { prog: p, mem: Memory::new() }, &Semantics::full(2)).is_empty());
    }
}
