//! The proof kernel: goals are only created and transformed by the rules
//! implemented here.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::imp::ast::{Prog, Stmt, Var};
use crate::imp::semantics::{head, plug, reassociate, unfold, Head};
use crate::imp::ImpOptions;
use crate::kernel::discharge::{Discharger, Outcome, DEFAULT_BUDGET};
use crate::kernel::goal::{DerivKind, Goal, Guard, HypEntry, Refusal, Rule, RuleApp, Side};
use crate::kernel::sym::{self, Assignment, Constraint, LinExpr, SymEvent, SymMemory, Symbols};
use crate::kernel::term::{Env, TCond, TExpr, Which};
use crate::lts::{EventLabel, Lts};
use crate::relspec::{AtomTable, ClosureGraph, Formula, FormulaId, FormulaStore, Node, DEFAULT_CLOSURE_CAP};
use crate::solver::check_simulation;

/// Upper bound on the rule applications performed by one `sync`.
pub const SYNC_LIMIT: usize = 10_000;

#[derive(Clone, Debug)]
pub enum SystemDef {
    Lts(Lts),
    Imp(Prog),
}

#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub def: SystemDef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelOptions {
    pub modulus: i64,
    pub input_domain: Option<Vec<i64>>,
    pub budget: usize,
    pub max_closure: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            modulus: crate::imp::DEFAULT_MODULUS,
            input_domain: None,
            budget: DEFAULT_BUDGET,
            max_closure: DEFAULT_CLOSURE_CAP,
        }
    }
}

/// A reply to one left observable move in the LTS form of Step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsReply {
    pub left_event: EventLabel,
    pub left_state: String,
    pub right_event: EventLabel,
    pub right_state: String,
}

/// How a `sync` ended.
#[derive(Clone, Debug)]
pub enum SyncOutcome {
    /// Both sides are at observable instructions.
    Synced(Goal),
    /// Nothing more applies automatically; the reason says why.
    Stopped(Goal, String),
}

pub struct Kernel {
    left: System,
    right: System,
    atoms: AtomTable,
    store: FormulaStore,
    closures: Vec<ClosureGraph>,
    root: FormulaId,
    domain: Vec<i64>,
    full_domain: bool,
    modulus: i64,
    max_closure: usize,
    symbols: Symbols,
    discharger: Discharger,
    trace: Vec<RuleApp>,
}

struct GoalEnv<'a> {
    syms: &'a Symbols,
    left: Option<&'a SymMemory>,
    right: Option<&'a SymMemory>,
    modulus: i64,
}

impl Env for GoalEnv<'_> {
    fn name(&self, n: &str) -> std::result::Result<LinExpr, String> {
        self.syms.lookup(n).map(|s| LinExpr::symbol(s, self.modulus)).ok_or_else(|| format!("unknown symbol `{n}`"))
    }

    fn mem(&self, w: Which, x: &str) -> std::result::Result<LinExpr, String> {
        let m = match w {
            Which::L => self.left,
            Which::R => self.right,
        };
        m.map(|m| m.get(x)).ok_or_else(|| "memory references need program goals".to_string())
    }
}

struct MemEnv<'a> {
    left: &'a SymMemory,
    right: &'a SymMemory,
}

impl Env for MemEnv<'_> {
    fn name(&self, n: &str) -> std::result::Result<LinExpr, String> {
        Err(format!("invariants may only mention l.x and r.x, found `{n}`"))
    }

    fn mem(&self, w: Which, x: &str) -> std::result::Result<LinExpr, String> {
        Ok(match w {
            Which::L => self.left.get(x),
            Which::R => self.right.get(x),
        })
    }
}

fn same_prog(a: &Prog, b: &Prog) -> bool {
    Stmt::right_nested(a) == Stmt::right_nested(b)
}

impl Kernel {
    pub fn new(left: System, right: System, formula: &Formula, atoms: AtomTable, opts: &KernelOptions) -> Result<Kernel> {
        let mut atoms = atoms;
        formula.check_atoms(&atoms, 2)?;
        let m = opts.modulus;
        let sem = ImpOptions { modulus: m, input_domain: opts.input_domain.clone(), ..Default::default() }.semantics()?;
        let alphabets = match (&left.def, &right.def) {
            (SystemDef::Lts(l), SystemDef::Lts(r)) => vec![l.alphabet().to_vec(), r.alphabet().to_vec()],
            (SystemDef::Imp(_), SystemDef::Imp(_)) => {
                atoms.set_modulus(Some(m));
                let evs: Vec<EventLabel> = (0..m).map(EventLabel::In).chain((0..m).map(EventLabel::Out)).collect();
                vec![evs.clone(), evs]
            }
            _ => {
                return Err(Error::input(format!(
                    "`{}` and `{}` must both be LTSs or both be programs",
                    left.name, right.name
                )))
            }
        };
        let mut store = FormulaStore::new();
        let root = store.intern(formula);
        let closure = ClosureGraph::build(&mut store, root, &alphabets, &atoms, opts.max_closure)?;
        let root = closure.root();
        let full_domain = sem.input_domain.len() as i64 == m;
        Ok(Kernel {
            left,
            right,
            atoms,
            store,
            closures: vec![closure],
            root,
            domain: sem.input_domain,
            full_domain,
            modulus: m,
            max_closure: opts.max_closure,
            symbols: Symbols::new(),
            discharger: Discharger { modulus: m, budget: opts.budget },
            trace: Vec::new(),
        })
    }

    pub fn is_imp(&self) -> bool {
        matches!(self.left.def, SystemDef::Imp(_))
    }

    pub fn trace(&self) -> &[RuleApp] {
        &self.trace
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn formula(&self, f: FormulaId) -> Formula {
        self.store.to_formula(f)
    }

    pub fn left(&self) -> &System {
        &self.left
    }

    pub fn right(&self) -> &System {
        &self.right
    }

    fn closure_of(&self, f: FormulaId) -> &ClosureGraph {
        self.closures.iter().find(|c| c.contains(f)).expect("every goal formula lies in a built closure")
    }

    fn ensure_closure(&mut self, f: FormulaId) -> Result<()> {
        if self.closures.iter().any(|c| c.contains(f)) {
            return Ok(());
        }
        let alphabets = self.closures[0].alphabets().to_vec();
        let g = ClosureGraph::build(&mut self.store, f, &alphabets, &self.atoms, self.max_closure)?;
        self.closures.push(g);
        Ok(())
    }

    fn record(&mut self, rule: Rule, before: Option<&Goal>, after: &[Goal]) {
        self.trace.push(RuleApp { rule, before: before.map(|g| g.guard), after: after.iter().map(|g| g.guard).collect() });
    }

    fn lts(&self, w: Which) -> Option<&Lts> {
        match &self.sys(w).def {
            SystemDef::Lts(l) => Some(l),
            SystemDef::Imp(_) => None,
        }
    }

    fn sys(&self, w: Which) -> &System {
        match w {
            Which::L => &self.left,
            Which::R => &self.right,
        }
    }

    pub fn describe_side(&self, s: &Side, w: Which) -> String {
        match s {
            Side::State(q) => self.lts(w).map_or_else(|| format!("#{}", q.0), |l| l.state_name(*q).to_string()),
            Side::Imp { prog, mem } => format!("<{prog} | {}>", mem.show(&self.symbols)),
        }
    }

    pub fn describe(&self, g: &Goal) -> String {
        let (l, r) = (self.describe_side(&g.left, Which::L), self.describe_side(&g.right, Which::R));
        let sides = match &g.pending {
            Some((e1, e2)) => format!("{} > {l}, {} > {r}", e1.show(&self.symbols), e2.show(&self.symbols)),
            None => format!("{l}, {r}"),
        };
        let mut s = format!("<{} H({}) | {sides} | {}>", g.guard, g.hyp.len(), self.formula(g.fid));
        if !g.assumptions.is_empty() {
            let a: Vec<String> = g.assumptions.iter().map(|c| c.show(&self.symbols)).collect();
            s.push_str(&format!(" assuming {}", a.join(", ")));
        }
        s
    }

    fn symbol_range(&self) -> Option<Vec<i64>> {
        (!self.full_domain).then(|| self.domain.clone())
    }

    fn generalize(&mut self, prog: &Prog, mem: &SymMemory, extra: &[Var], side: char) -> SymMemory {
        let mut vars = Stmt::vars(prog);
        vars.extend(mem.vars().cloned());
        vars.extend(extra.iter().cloned());
        vars.sort();
        vars.dedup();
        let mut out = SymMemory::new();
        for x in vars {
            let s = self.symbols.fresh(&format!("{side}{x}"), None);
            out.set(&x, LinExpr::symbol(s, self.modulus));
        }
        out
    }

    // ---- proof management ------------------------------------------------

    /// `<[] | I1, I2 | formula>`, with the initial pair added to the
    /// hypothesis. Programs start from memories generalized over all values.
    pub fn init(&mut self) -> Goal {
        let root = self.root;
        let goal = match (&self.left.def.clone(), &self.right.def.clone()) {
            (SystemDef::Lts(l), SystemDef::Lts(r)) => Goal {
                guard: Guard::Guarded,
                hyp: Arc::new(vec![HypEntry::Concrete { left: l.init(), right: r.init(), fid: root }]),
                left: Side::State(l.init()),
                right: Side::State(r.init()),
                fid: root,
                pending: None,
                assumptions: Vec::new(),
            },
            (SystemDef::Imp(p1), SystemDef::Imp(p2)) => {
                let m1 = self.generalize(p1, &SymMemory::new(), &[], 'l');
                let m2 = self.generalize(p2, &SymMemory::new(), &[], 'r');
                Goal {
                    guard: Guard::Guarded,
                    hyp: Arc::new(vec![HypEntry::Lifted {
                        left: p1.clone(),
                        right: p2.clone(),
                        fid: root,
                        inv: TCond::True,
                    }]),
                    left: Side::Imp { prog: p1.clone(), mem: m1 },
                    right: Side::Imp { prog: p2.clone(), mem: m2 },
                    fid: root,
                    pending: None,
                    assumptions: Vec::new(),
                }
            }
            _ => unreachable!("checked by Kernel::new"),
        };
        self.record(Rule::Init, None, std::slice::from_ref(&goal));
        goal
    }

    fn quadruple(&self, g: &Goal, rule: Rule) -> std::result::Result<(), Refusal> {
        if g.pending.is_some() {
            return Err(Refusal::new(rule, "the goal has pending events; apply deriv first"));
        }
        Ok(())
    }

    /// Adds pairs of states to the hypothesis and restores the guard. One goal
    /// is produced per pair, the current one first.
    pub fn invariant(&mut self, g: &Goal, pairs: &[(String, String, Option<Formula>)]) -> std::result::Result<Vec<Goal>, Refusal> {
        let rule = Rule::Invariant;
        self.quadruple(g, rule)?;
        let (Some(l), Some(r)) = (self.lts(Which::L).cloned(), self.lts(Which::R).cloned()) else {
            return Err(Refusal::new(rule, "program goals take a memory invariant, e.g. `invariant (l.x == r.x)`"));
        };
        let mut entries = Vec::new();
        for (a, b, f) in pairs {
            let s1 = l.state_by_name(a).ok_or_else(|| Refusal::new(rule, format!("`{}` has no state `{a}`", l.name())))?;
            let s2 = r.state_by_name(b).ok_or_else(|| Refusal::new(rule, format!("`{}` has no state `{b}`", r.name())))?;
            let fid = match f {
                Some(f) => {
                    f.check_atoms(&self.atoms, 2).map_err(|e| Refusal::new(rule, e.to_string()))?;
                    let id = self.store.intern(f);
                    let id = self.store.normalize(id);
                    self.ensure_closure(id).map_err(|e| Refusal::new(rule, e.to_string()))?;
                    id
                }
                None => g.fid,
            };
            entries.push((s1, s2, fid));
        }
        let (Side::State(c1), Side::State(c2)) = (&g.left, &g.right) else { unreachable!() };
        let current = (*c1, *c2, g.fid);
        if !entries.contains(&current) {
            return Err(Refusal::new(rule, "the current triple is not in the new hypothesis"));
        }
        let mut hyp = (*g.hyp).clone();
        for &(left, right, fid) in &entries {
            let e = HypEntry::Concrete { left, right, fid };
            if !hyp.contains(&e) {
                hyp.push(e);
            }
        }
        let hyp = Arc::new(hyp);
        let mut order = vec![current];
        for e in entries {
            if !order.contains(&e) {
                order.push(e);
            }
        }
        let children: Vec<Goal> = order
            .into_iter()
            .map(|(s1, s2, fid)| Goal {
                guard: Guard::Guarded,
                hyp: hyp.clone(),
                left: Side::State(s1),
                right: Side::State(s2),
                fid,
                pending: None,
                assumptions: Vec::new(),
            })
            .collect();
        self.record(rule, Some(g), &children);
        Ok(children)
    }

    /// Extends the hypothesis with every pair of memories satisfying `inv` at
    /// the current programs, and generalizes the goal accordingly.
    pub fn memory_invariant(&mut self, g: &Goal, inv: &TCond) -> std::result::Result<Goal, Refusal> {
        let rule = Rule::MemoryInvariant;
        self.quadruple(g, rule)?;
        let (Side::Imp { prog: p1, mem: m1 }, Side::Imp { prog: p2, mem: m2 }) = (&g.left, &g.right) else {
            return Err(Refusal::new(rule, "LTS goals take a set of state pairs, e.g. `invariant { s1 s2 }`"));
        };
        let m = self.modulus;
        let here = inv.constraint(&MemEnv { left: m1, right: m2 }, m).map_err(|e| Refusal::new(rule, e))?;
        match self.discharger.prove(&self.symbols, &g.assumptions, &here) {
            Outcome::Proven { .. } => {}
            Outcome::Unproven { counterexample, reason } => {
                let at = counterexample.map(|a| format!(" at {}", self.symbols.show_assignment(&a))).unwrap_or_default();
                return Err(Refusal::new(rule, format!("the invariant `{inv}` does not hold for the current memories{at} ({reason})")));
            }
        }
        let mut lv = Vec::new();
        inv.mem_vars(Which::L, &mut lv);
        let mut rv = Vec::new();
        inv.mem_vars(Which::R, &mut rv);
        let n1 = self.generalize(p1, m1, &lv, 'l');
        let n2 = self.generalize(p2, m2, &rv, 'r');
        let assumption = inv.constraint(&MemEnv { left: &n1, right: &n2 }, m).map_err(|e| Refusal::new(rule, e))?;
        let mut hyp = (*g.hyp).clone();
        hyp.push(HypEntry::Lifted { left: p1.clone(), right: p2.clone(), fid: g.fid, inv: inv.clone() });
        let child = Goal {
            guard: Guard::Guarded,
            hyp: Arc::new(hyp),
            left: Side::Imp { prog: p1.clone(), mem: n1 },
            right: Side::Imp { prog: p2.clone(), mem: n2 },
            fid: g.fid,
            pending: None,
            assumptions: vec![assumption],
        };
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Closes an unguarded goal whose triple belongs to the hypothesis.
    pub fn cycle(&mut self, g: &Goal) -> std::result::Result<(), Refusal> {
        let rule = Rule::Cycle;
        if g.guard == Guard::Guarded {
            return Err(Refusal::new(rule, "guarded hypothesis: the hypothesis is released only by a Deriv step"));
        }
        self.quadruple(g, rule)?;
        let mut misses = Vec::new();
        for e in g.hyp.iter() {
            match (e, &g.left, &g.right) {
                (HypEntry::Concrete { left, right, fid }, Side::State(s1), Side::State(s2)) => {
                    if left == s1 && right == s2 && *fid == g.fid {
                        self.record(rule, Some(g), &[]);
                        return Ok(());
                    }
                    if *fid == g.fid {
                        misses.push(format!(
                            "({}, {})",
                            self.describe_side(&Side::State(*left), Which::L),
                            self.describe_side(&Side::State(*right), Which::R)
                        ));
                    }
                }
                (HypEntry::Lifted { left, right, fid, inv }, Side::Imp { prog: p1, mem: m1 }, Side::Imp { prog: p2, mem: m2 }) => {
                    if *fid != g.fid {
                        continue;
                    }
                    if !same_prog(left, p1) || !same_prog(right, p2) {
                        misses.push(format!("programs differ from `{left}` / `{right}`"));
                        continue;
                    }
                    let c = inv
                        .constraint(&MemEnv { left: m1, right: m2 }, self.modulus)
                        .map_err(|e| Refusal::new(rule, e))?;
                    match self.discharger.prove(&self.symbols, &g.assumptions, &c) {
                        Outcome::Proven { .. } => {
                            self.record(rule, Some(g), &[]);
                            return Ok(());
                        }
                        Outcome::Unproven { counterexample, reason } => {
                            let at = counterexample.map(|a| format!(" at {}", self.symbols.show_assignment(&a))).unwrap_or_default();
                            misses.push(format!("invariant `{inv}` not entailed{at} ({reason})"));
                        }
                    }
                }
                _ => {}
            }
        }
        let mut msg = "the current triple is not in the hypothesis".to_string();
        if !misses.is_empty() {
            misses.truncate(3);
            msg.push_str("; nearest entries: ");
            msg.push_str(&misses.join("; "));
        }
        Err(Refusal::new(rule, msg))
    }

    // ---- observable steps ----------------------------------------------

    /// LTS form of Step: every left observable move gets one reply.
    pub fn step_lts(&mut self, g: &Goal, replies: &[LtsReply]) -> std::result::Result<Vec<Goal>, Refusal> {
        let rule = Rule::Step;
        self.quadruple(g, rule)?;
        let (Side::State(s1), Side::State(s2)) = (&g.left, &g.right) else {
            return Err(Refusal::new(rule, "program goals use `step` at input/output instructions"));
        };
        let l = self.lts(Which::L).expect("LTS goal").clone();
        let r = self.lts(Which::R).expect("LTS goal").clone();
        let lmoves = l.obs_successors(*s1).map_err(|e| Refusal::new(rule, e.to_string()))?;
        let rmoves = r.obs_successors(*s2).map_err(|e| Refusal::new(rule, e.to_string()))?;
        for rep in replies {
            if !lmoves.iter().any(|(e, t)| *e == rep.left_event && l.state_name(*t) == rep.left_state) {
                return Err(Refusal::new(rule, format!("`{} {}` is not a move of `{}`", rep.left_event, rep.left_state, l.name())));
            }
        }
        let mut children = Vec::new();
        for (e1, t1) in lmoves {
            let rep = replies
                .iter()
                .find(|rep| rep.left_event == *e1 && rep.left_state == l.state_name(*t1))
                .ok_or_else(|| Refusal::new(rule, format!("no reply for the left move `{e1} {}`", l.state_name(*t1))))?;
            let (e2, t2) = rmoves
                .iter()
                .find(|(e, t)| *e == rep.right_event && r.state_name(*t) == rep.right_state)
                .ok_or_else(|| {
                    Refusal::new(rule, format!("`{} {}` is not a move of `{}`", rep.right_event, rep.right_state, r.name()))
                })?;
            children.push(Goal {
                guard: Guard::Guarded,
                hyp: g.hyp.clone(),
                left: Side::State(*t1),
                right: Side::State(*t2),
                fid: g.fid,
                pending: Some((SymEvent::Label(e1.clone()), SymEvent::Label(e2.clone()))),
                assumptions: g.assumptions.clone(),
            });
        }
        self.record(rule, Some(g), &children);
        Ok(children)
    }

    fn in_domain(&self, g: &Goal, v: &LinExpr, rule: Rule) -> std::result::Result<(), Refusal> {
        if self.full_domain {
            return Ok(());
        }
        let c = self
            .domain
            .iter()
            .map(|&d| Constraint::eq(v.clone(), LinExpr::constant(d, self.modulus)))
            .reduce(|a, b| Constraint::Or(Box::new(a), Box::new(b)))
            .unwrap_or(Constraint::False);
        match self.discharger.prove(&self.symbols, &g.assumptions, &c) {
            Outcome::Proven { .. } => Ok(()),
            Outcome::Unproven { .. } => {
                Err(Refusal::new(rule, format!("`{}` may leave the input domain", v.show(&self.symbols))))
            }
        }
    }

    /// Input-input and Output-output.
    pub fn step_io(&mut self, g: &Goal, reply: Option<&TExpr>) -> std::result::Result<Goal, Refusal> {
        self.quadruple(g, Rule::Step)?;
        let (Side::Imp { prog: p1, mem: m1 }, Side::Imp { prog: p2, mem: m2 }) = (&g.left, &g.right) else {
            return Err(Refusal::new(Rule::Step, "LTS goals need a reply list, e.g. `step (a q1 -> a s1)`"));
        };
        let m = self.modulus;
        match (head(p1), head(p2)) {
            (Head::Input { x: x1, rest: r1 }, Head::Input { x: x2, rest: r2 }) => {
                let rule = Rule::InputInput;
                let reply = reply.ok_or_else(|| Refusal::new(rule, "choose the right input, e.g. `step (v1)`"))?;
                let v = self.symbols.fresh("v", self.symbol_range());
                let v1 = LinExpr::symbol(v, m);
                let mut n1 = m1.clone();
                n1.set(&x1, v1.clone());
                let env = GoalEnv { syms: &self.symbols, left: Some(m1), right: Some(m2), modulus: m };
                let v2 = reply.lin(&env, m).map_err(|e| Refusal::new(rule, e))?;
                self.in_domain(g, &v2, rule)?;
                let mut n2 = m2.clone();
                n2.set(&x2, v2.clone());
                let child = Goal {
                    guard: Guard::Guarded,
                    hyp: g.hyp.clone(),
                    left: Side::Imp { prog: r1, mem: n1 },
                    right: Side::Imp { prog: r2, mem: n2 },
                    fid: g.fid,
                    pending: Some((SymEvent::In(v1), SymEvent::In(v2))),
                    assumptions: g.assumptions.clone(),
                };
                self.record(rule, Some(g), std::slice::from_ref(&child));
                Ok(child)
            }
            (Head::Output { e: e1, rest: r1 }, Head::Output { e: e2, rest: r2 }) => {
                let rule = Rule::OutputOutput;
                if reply.is_some() {
                    return Err(Refusal::new(rule, "outputs take no reply"));
                }
                let o1 = sym::eval_expr(&e1, m1, m).map_err(|e| Refusal::new(rule, e))?;
                let o2 = sym::eval_expr(&e2, m2, m).map_err(|e| Refusal::new(rule, e))?;
                let child = Goal {
                    guard: Guard::Guarded,
                    hyp: g.hyp.clone(),
                    left: Side::Imp { prog: r1, mem: m1.clone() },
                    right: Side::Imp { prog: r2, mem: m2.clone() },
                    fid: g.fid,
                    pending: Some((SymEvent::Out(o1), SymEvent::Out(o2))),
                    assumptions: g.assumptions.clone(),
                };
                self.record(rule, Some(g), std::slice::from_ref(&child));
                Ok(child)
            }
            (h1, h2) => Err(Refusal::new(
                Rule::Step,
                format!("no I/O rule matches {} against {}", head_name(&h1), head_name(&h2)),
            )),
        }
    }

    fn deriv_kind(&self, f: FormulaId, result: Option<FormulaId>) -> DerivKind {
        match self.store.node(f) {
            Node::Always(_) => DerivKind::Always,
            Node::Next(_) => DerivKind::Next,
            Node::WeakUntil(..) => match result {
                Some(FormulaId::TRUE) => DerivKind::WeakUntilNow,
                Some(_) => DerivKind::WeakUntilLater,
                None => DerivKind::WeakUntil,
            },
            _ => DerivKind::General,
        }
    }

    /// Consumes the pending events and releases the guard.
    pub fn deriv(&mut self, g: &Goal) -> std::result::Result<Goal, Refusal> {
        let Some((e1, e2)) = &g.pending else {
            return Err(Refusal::new(Rule::Deriv(DerivKind::General), "no pending events; apply step first"));
        };
        let m = self.modulus;
        let mut relevant = e1.syms();
        relevant.extend(e2.syms());
        let closure = self.closure_of(g.fid);
        let mut result: Option<FormulaId> = None;
        let mut problem = String::new();
        let outcome = self.discharger.forall(&self.symbols, &g.assumptions, &relevant, |a: &Assignment| {
            let ev = [e1.concrete(a, m), e2.concrete(a, m)];
            match closure.step(g.fid, &ev) {
                None => {
                    problem = format!("({}, {}) is outside the alphabets", ev[0], ev[1]);
                    false
                }
                Some(d) if !closure.nonempty(d) => {
                    problem = format!("the events ({}, {}) empty the derivative", ev[0], ev[1]);
                    false
                }
                Some(d) => match result {
                    Some(r) if r != d => {
                        problem = "the derivative depends on the symbolic values".into();
                        false
                    }
                    _ => {
                        result = Some(d);
                        true
                    }
                },
            }
        });
        let fail_kind = self.deriv_kind(g.fid, None);
        match outcome {
            Outcome::Proven { .. } => {}
            Outcome::Unproven { counterexample, reason } => {
                let at = match counterexample {
                    Some(a) if !a.is_empty() => format!(" at {}", self.symbols.show_assignment(&a)),
                    _ => String::new(),
                };
                let what = if problem.is_empty() { reason } else { problem };
                return Err(Refusal::new(Rule::Deriv(fail_kind), format!("side condition refuted{at}: {what}")));
            }
        }
        let Some(d) = result else {
            return Err(Refusal::new(Rule::Deriv(fail_kind), "no assignment satisfies the assumptions"));
        };
        let rule = Rule::Deriv(self.deriv_kind(g.fid, Some(d)));
        let child = Goal {
            guard: Guard::Unguarded,
            hyp: g.hyp.clone(),
            left: g.left.clone(),
            right: g.right.clone(),
            fid: d,
            pending: None,
            assumptions: g.assumptions.clone(),
        };
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    // ---- silent steps ---------------------------------------------------

    fn det_imp(&self, g: &Goal, prog: &Prog, mem: &SymMemory, w: Which, rule: Rule) -> std::result::Result<(Prog, SymMemory), Refusal> {
        let m = self.modulus;
        match head(prog) {
            Head::Loop { body, rest } => Ok((plug(unfold(&body), &rest), mem.clone())),
            Head::Continue { p1, p2, p3 } => Ok((reassociate(&p1, &p2, &p3), mem.clone())),
            Head::Assign { x, e, rest } => {
                let v = sym::eval_expr(&e, mem, m).map_err(|e| Refusal::new(rule, e))?;
                let mut n = mem.clone();
                n.set(&x, v);
                Ok((rest, n))
            }
            Head::If { cond, then, els, rest } => {
                let c = sym::eval_cond(&cond, mem, m).map_err(|e| Refusal::new(rule, e))?;
                if self.discharger.prove(&self.symbols, &g.assumptions, &c).is_proven() {
                    Ok((plug(then, &rest), mem.clone()))
                } else if self.discharger.prove(&self.symbols, &g.assumptions, &Constraint::not(c)).is_proven() {
                    Ok((plug(els, &rest), mem.clone()))
                } else {
                    Err(Refusal::new(rule, format!("cannot decide the condition `{cond}`")))
                }
            }
            Head::Havoc { x, .. } => Err(Refusal::new(
                rule,
                match w {
                    Which::L => format!("`havoc {x}` is not deterministic; use havoc_l"),
                    Which::R => format!("`havoc {x}` needs a value; use havoc_r <expr>"),
                },
            )),
            h @ (Head::Input { .. } | Head::Output { .. }) => {
                Err(Refusal::new(rule, format!("{} emits an event; use step", head_name(&h))))
            }
            Head::Stuck => Err(Refusal::new(rule, "the program has no successor")),
        }
    }

    fn steps(&mut self, g: &Goal, n: usize, w: Which) -> std::result::Result<Goal, Refusal> {
        let rule = if w == Which::L { Rule::StepsL } else { Rule::StepsR };
        self.quadruple(g, rule)?;
        let mut side = match w {
            Which::L => g.left.clone(),
            Which::R => g.right.clone(),
        };
        for k in 0..n {
            side = match &side {
                Side::State(s) => {
                    let l = self.lts(w).expect("LTS goal");
                    match l.det_step(*s).map_err(|e| Refusal::new(rule, e.to_string()))? {
                        Some(t) => Side::State(t),
                        None => {
                            let hint = if w == Which::R { "; use `right STATE` to pick a silent path" } else { "" };
                            return Err(Refusal::new(
                                rule,
                                format!("step {} of {n}: `{}` has no deterministic silent step{hint}", k + 1, l.state_name(*s)),
                            ));
                        }
                    }
                }
                Side::Imp { prog, mem } => {
                    let (p, m) = self.det_imp(g, prog, mem, w, rule).map_err(|r| {
                        Refusal::new(rule, format!("step {} of {n}: {}", k + 1, r.message))
                    })?;
                    Side::Imp { prog: p, mem: m }
                }
            };
        }
        let mut child = g.clone();
        match w {
            Which::L => child.left = side,
            Which::R => child.right = side,
        }
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Steps-L: `n` deterministic silent steps on the left.
    pub fn steps_l(&mut self, g: &Goal, n: usize) -> std::result::Result<Goal, Refusal> {
        self.steps(g, n, Which::L)
    }

    /// Steps-R: `n` deterministic silent steps on the right.
    pub fn steps_r(&mut self, g: &Goal, n: usize) -> std::result::Result<Goal, Refusal> {
        self.steps(g, n, Which::R)
    }

    /// Steps-R along a chosen silent path to the named state.
    pub fn steps_r_to(&mut self, g: &Goal, target: &str) -> std::result::Result<Goal, Refusal> {
        let rule = Rule::StepsR;
        self.quadruple(g, rule)?;
        let (Side::State(s), Some(r)) = (&g.right, self.lts(Which::R)) else {
            return Err(Refusal::new(rule, "`right STATE` applies to LTS goals"));
        };
        let t = r.state_by_name(target).ok_or_else(|| Refusal::new(rule, format!("`{}` has no state `{target}`", r.name())))?;
        let mut seen = HashSet::from([*s]);
        let mut queue = VecDeque::from([*s]);
        let mut found = false;
        while let Some(q) = queue.pop_front() {
            for n in r.silent_successors(q) {
                if n == t {
                    found = true;
                }
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        if !found {
            return Err(Refusal::new(rule, format!("`{target}` is not reachable by silent steps from `{}`", r.state_name(*s))));
        }
        let mut child = g.clone();
        child.right = Side::State(t);
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Havoc-L: the havocked variable takes a fresh universal value.
    pub fn havoc_l(&mut self, g: &Goal) -> std::result::Result<Goal, Refusal> {
        let rule = Rule::HavocL;
        self.quadruple(g, rule)?;
        let Side::Imp { prog, mem } = &g.left else {
            return Err(Refusal::new(rule, "havoc_l applies to program goals"));
        };
        let Head::Havoc { x, rest } = head(prog) else {
            return Err(Refusal::new(rule, "the left program is not at a havoc instruction"));
        };
        let h = self.symbols.fresh("h", self.symbol_range());
        let mut n = mem.clone();
        n.set(&x, LinExpr::symbol(h, self.modulus));
        let mut child = g.clone();
        child.left = Side::Imp { prog: rest, mem: n };
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Havoc-R: the havocked variable takes the chosen value.
    pub fn havoc_r(&mut self, g: &Goal, value: &TExpr) -> std::result::Result<Goal, Refusal> {
        let rule = Rule::HavocR;
        self.quadruple(g, rule)?;
        let (Side::Imp { mem: m1, .. }, Side::Imp { prog, mem }) = (&g.left, &g.right) else {
            return Err(Refusal::new(rule, "havoc_r applies to program goals"));
        };
        let Head::Havoc { x, rest } = head(prog) else {
            return Err(Refusal::new(rule, "the right program is not at a havoc instruction"));
        };
        let env = GoalEnv { syms: &self.symbols, left: Some(m1), right: Some(mem), modulus: self.modulus };
        let v = value.lin(&env, self.modulus).map_err(|e| Refusal::new(rule, e))?;
        self.in_domain(g, &v, rule)?;
        let mut n = mem.clone();
        n.set(&x, v);
        let mut child = g.clone();
        child.right = Side::Imp { prog: rest, mem: n };
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Deterministic steps and left havocs on both sides until both programs
    /// reach an input or output instruction.
    pub fn sync(&mut self, g: &Goal) -> std::result::Result<SyncOutcome, Refusal> {
        self.quadruple(g, Rule::Sync)?;
        let mut g = g.clone();
        for _ in 0..SYNC_LIMIT {
            if let Some(next) = self.sync_one(&g, Which::L)? {
                g = next;
                continue;
            }
            if let Some(next) = self.sync_one(&g, Which::R)? {
                g = next;
                continue;
            }
            return Ok(match (&g.left, &g.right) {
                (Side::Imp { prog: p1, .. }, Side::Imp { prog: p2, .. }) => {
                    let (h1, h2) = (head(p1), head(p2));
                    if is_io(&h1) && is_io(&h2) {
                        SyncOutcome::Synced(g)
                    } else {
                        let why = format!("sync stopped at {} / {}", head_name(&h1), head_name(&h2));
                        SyncOutcome::Stopped(g, why)
                    }
                }
                _ => SyncOutcome::Synced(g),
            });
        }
        Err(Refusal::new(Rule::Sync, format!("no input or output reached within {SYNC_LIMIT} steps")))
    }

    fn sync_one(&mut self, g: &Goal, w: Which) -> std::result::Result<Option<Goal>, Refusal> {
        let side = if w == Which::L { &g.left } else { &g.right };
        match side {
            Side::State(s) => {
                let l = self.lts(w).expect("LTS goal");
                if l.det_step(*s).ok().flatten().is_some() {
                    return self.steps(g, 1, w).map(Some);
                }
                Ok(None)
            }
            Side::Imp { prog, .. } => match head(prog) {
                Head::Loop { .. } | Head::Continue { .. } | Head::Assign { .. } | Head::If { .. } => {
                    self.steps(g, 1, w).map(Some)
                }
                Head::Havoc { .. } if w == Which::L => self.havoc_l(g).map(Some),
                _ => Ok(None),
            },
        }
    }

    // ---- up-to techniques ---------------------------------------------

    /// Replaces the goal formula by a stronger one.
    pub fn strengthen(&mut self, g: &Goal, f: &Formula) -> std::result::Result<Goal, Refusal> {
        let rule = Rule::Strengthen;
        self.quadruple(g, rule)?;
        f.check_atoms(&self.atoms, 2).map_err(|e| Refusal::new(rule, e.to_string()))?;
        let id = self.store.intern(f);
        let id = self.store.normalize(id);
        self.ensure_closure(id).map_err(|e| Refusal::new(rule, e.to_string()))?;
        let sub = self.closure_of(id);
        if !sub.nonempty(id) {
            return Err(Refusal::new(rule, format!("`{f}` is empty")));
        }
        let sup = self.closure_of(g.fid);
        let ok = sub.included_in(id, sup, g.fid).map_err(|e| Refusal::new(rule, e.to_string()))?;
        if !ok {
            return Err(Refusal::new(rule, format!("`{f}` is not included in `{}`", self.formula(g.fid))));
        }
        let mut child = g.clone();
        child.fid = id;
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    fn sim(&mut self, g: &Goal, w: Which, target: Option<&str>) -> std::result::Result<Goal, Refusal> {
        let rule = if w == Which::L { Rule::SimL } else { Rule::SimR };
        self.quadruple(g, rule)?;
        let side = if w == Which::L { &g.left } else { &g.right };
        let new = match (side, target) {
            (Side::State(s), Some(t)) => {
                let l = self.lts(w).expect("LTS goal");
                let t = l.state_by_name(t).ok_or_else(|| Refusal::new(rule, format!("`{}` has no state `{t}`", l.name())))?;
                let here = l.with_init(*s).map_err(|e| Refusal::new(rule, e.to_string()))?;
                let there = l.with_init(t).map_err(|e| Refusal::new(rule, e.to_string()))?;
                let (small, big) = if w == Which::L { (&here, &there) } else { (&there, &here) };
                let res = check_simulation(small, big).map_err(|e| Refusal::new(rule, e.to_string()))?;
                if !res.is_proved() {
                    return Err(Refusal::new(
                        rule,
                        format!(
                            "`{}` is not simulated by `{}`",
                            small.state_name(small.init()),
                            big.state_name(big.init())
                        ),
                    ));
                }
                Side::State(t)
            }
            (Side::State(_), None) => return Err(Refusal::new(rule, "name the replacement state")),
            (Side::Imp { prog, mem }, None) => Side::Imp { prog: Stmt::right_nested(prog), mem: mem.clone() },
            (Side::Imp { .. }, Some(_)) => {
                return Err(Refusal::new(rule, "program goals are replaced by their reassociated form; give no argument"))
            }
        };
        let mut child = g.clone();
        match w {
            Which::L => child.left = new,
            Which::R => child.right = new,
        }
        self.record(rule, Some(g), std::slice::from_ref(&child));
        Ok(child)
    }

    /// Sim-L: the left state is replaced by one that simulates it.
    pub fn sim_l(&mut self, g: &Goal, target: Option<&str>) -> std::result::Result<Goal, Refusal> {
        self.sim(g, Which::L, target)
    }

    /// Sim-R: the right state is replaced by one it simulates.
    pub fn sim_r(&mut self, g: &Goal, target: Option<&str>) -> std::result::Result<Goal, Refusal> {
        self.sim(g, Which::R, target)
    }
}

fn is_io(h: &Head) -> bool {
    matches!(h, Head::Input { .. } | Head::Output { .. })
}

fn head_name(h: &Head) -> String {
    match h {
        Head::Loop { body, .. } => format!("`loop {{ {body} }}`"),
        Head::If { cond, .. } => format!("`if {cond}`"),
        Head::Continue { .. } => "a nested sequence".into(),
        Head::Input { x, .. } => format!("`input {x}`"),
        Head::Output { e, .. } => format!("`output {e}`"),
        Head::Havoc { x, .. } => format!("`havoc {x}`"),
        Head::Assign { x, e, .. } => format!("`{x} := {e}`"),
        Head::Stuck => "a finished program".into(),
    }
}
