use std::fmt;
use std::sync::Arc;

pub type Var = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(i64),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cond {
    True,
    False,
    Cmp(Expr, Rel, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

/// Comparison operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "==",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stmt {
    Loop(Arc<Stmt>),
    If(Cond, Arc<Stmt>, Arc<Stmt>),
    Input(Var),
    Output(Expr),
    Havoc(Var),
    Seq(Arc<Stmt>, Arc<Stmt>),
    Assign(Var, Expr),
}

pub type Prog = Arc<Stmt>;

impl Stmt {
    pub fn is_basic(&self) -> bool {
        matches!(self, Stmt::Input(_) | Stmt::Output(_) | Stmt::Havoc(_) | Stmt::Assign(..))
    }

    /// Fully right-nested form of every `;` chain.
    pub fn right_nested(p: &Prog) -> Prog {
        match &**p {
            Stmt::Seq(a, b) => {
                let b = Stmt::right_nested(b);
                let mut items = Vec::new();
                flatten(a, &mut items);
                items.into_iter().rev().fold(b, |acc, s| Arc::new(Stmt::Seq(s, acc)))
            }
            Stmt::Loop(b) => Arc::new(Stmt::Loop(Stmt::right_nested(b))),
            Stmt::If(c, t, e) => Arc::new(Stmt::If(c.clone(), Stmt::right_nested(t), Stmt::right_nested(e))),
            _ => p.clone(),
        }
    }

    /// Variables mentioned anywhere in the program, sorted.
    pub fn vars(p: &Prog) -> Vec<Var> {
        let mut out = Vec::new();
        collect_vars(p, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn flatten(p: &Prog, out: &mut Vec<Prog>) {
    match &**p {
        Stmt::Seq(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        _ => out.push(Stmt::right_nested(p)),
    }
}

fn collect_vars(p: &Stmt, out: &mut Vec<Var>) {
    match p {
        Stmt::Loop(b) => collect_vars(b, out),
        Stmt::If(c, t, e) => {
            c.vars(out);
            collect_vars(t, out);
            collect_vars(e, out);
        }
        Stmt::Input(x) | Stmt::Havoc(x) => out.push(x.clone()),
        Stmt::Output(e) => e.vars(out),
        Stmt::Seq(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Stmt::Assign(x, e) => {
            out.push(x.clone());
            e.vars(out);
        }
    }
}

impl Expr {
    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => out.push(x.clone()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl Cond {
    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Cond::True | Cond::False => {}
            Cond::Cmp(a, _, b) => {
                a.vars(out);
                b.vars(out);
            }
            Cond::Not(c) => c.vars(out),
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(x) => f.write_str(x),
            Expr::Add(a, b) => write!(f, "{a} + {}", Paren(b, 1)),
            Expr::Sub(a, b) => write!(f, "{a} - {}", Paren(b, 1)),
            Expr::Mul(a, b) => write!(f, "{} * {}", Paren(a, 2), Paren(b, 2)),
        }
    }
}

struct Paren<'a>(&'a Expr, u8);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = match self.0 {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) => 1,
            _ => 2,
        };
        if prec < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::True => f.write_str("true"),
            Cond::False => f.write_str("false"),
            Cond::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Cond::Not(c) => write!(f, "not ({c})"),
            Cond::And(a, b) => write!(f, "({a}) and ({b})"),
            Cond::Or(a, b) => write!(f, "({a}) or ({b})"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Loop(b) => write!(f, "loop {{ {b} }}"),
            Stmt::If(c, t, e) => write!(f, "if {c} then {{ {t} }} else {{ {e} }}"),
            Stmt::Input(x) => write!(f, "input {x}"),
            Stmt::Output(e) => write!(f, "output {e}"),
            Stmt::Havoc(x) => write!(f, "havoc {x}"),
            Stmt::Assign(x, e) => write!(f, "{x} := {e}"),
            Stmt::Seq(a, b) => {
                if matches!(**a, Stmt::Seq(..)) {
                    write!(f, "{{ {a} }}; {b}")
                } else {
                    write!(f, "{a}; {b}")
                }
            }
        }
    }
}
