//! Proof scripts: a sequence of tactics, each ending in `.`, closed by `qed`.
//!
//! ```text
//! init. sync. step (2 * v1). deriv. step. deriv. cycle. qed
//! ```
//!
//! Goals are kept on a stack; a tactic applies to the goal on top and the
//! goals it produces are pushed so that the first one is worked on next.

use std::fmt;

use crate::error::{ParseError, Result};
use crate::kernel::goal::Goal;
use crate::kernel::rules::{Kernel, LtsReply, SyncOutcome};
use crate::kernel::term::{parse_tcond, parse_texpr, TCond, TExpr};
use crate::lts::{parse_event, EventLabel};
use crate::relspec::formula::parse_formula;
use crate::relspec::Formula;
use crate::syntax::{Cursor, Tok};

#[derive(Clone, Debug, PartialEq)]
pub enum StepArg {
    None,
    Value(TExpr),
    Replies(Vec<LtsReply>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Count {
    Steps(usize),
    State(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tactic {
    Init,
    Step(StepArg),
    Sync,
    Deriv,
    Cycle,
    MemoryInvariant(TCond),
    Invariant(Vec<(String, String, Option<Formula>)>),
    Left(Count),
    Right(Count),
    HavocL,
    HavocR(TExpr),
    Strengthen(Formula),
    SimL(Option<String>),
    SimR(Option<String>),
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Steps(n) => write!(f, "{n}"),
            Count::State(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Init => f.write_str("init"),
            Tactic::Step(StepArg::None) => f.write_str("step"),
            Tactic::Step(StepArg::Replies(rs)) if rs.is_empty() => f.write_str("step"),
            Tactic::Step(StepArg::Value(e)) => write!(f, "step ({e})"),
            Tactic::Step(StepArg::Replies(rs)) => {
                let rs: Vec<String> = rs
                    .iter()
                    .map(|r| format!("{} {} -> {} {}", r.left_event, r.left_state, r.right_event, r.right_state))
                    .collect();
                write!(f, "step ({})", rs.join(", "))
            }
            Tactic::Sync => f.write_str("sync"),
            Tactic::Deriv => f.write_str("deriv"),
            Tactic::Cycle => f.write_str("cycle"),
            Tactic::MemoryInvariant(c) => write!(f, "invariant ({c})"),
            Tactic::Invariant(ps) => {
                let ps: Vec<String> = ps
                    .iter()
                    .map(|(a, b, phi)| match phi {
                        Some(phi) => format!("{a} {b} : {phi}"),
                        None => format!("{a} {b}"),
                    })
                    .collect();
                write!(f, "invariant {{ {} }}", ps.join(", "))
            }
            Tactic::Left(c) => write!(f, "left {c}"),
            Tactic::Right(c) => write!(f, "right {c}"),
            Tactic::HavocL => f.write_str("havoc_l"),
            Tactic::HavocR(e) => write!(f, "havoc_r {e}"),
            Tactic::Strengthen(phi) => write!(f, "strengthen {phi}"),
            Tactic::SimL(s) => write!(f, "sim_l{}", s.as_ref().map(|s| format!(" {s}")).unwrap_or_default()),
            Tactic::SimR(s) => write!(f, "sim_r{}", s.as_ref().map(|s| format!(" {s}")).unwrap_or_default()),
        }
    }
}

/// Parses a standalone script.
pub fn parse_script(src: &str) -> Result<Vec<Tactic>> {
    let mut cur = Cursor::new(src)?;
    let ts = parse_tactics(&mut cur)?;
    cur.expect_eof()?;
    Ok(ts)
}

/// Parses tactics up to and including `qed`.
pub(crate) fn parse_tactics(cur: &mut Cursor) -> std::result::Result<Vec<Tactic>, ParseError> {
    let mut out = Vec::new();
    while !cur.eat_kw("qed") {
        if cur.at_eof() {
            return Err(cur.error("expected `qed` at the end of the proof"));
        }
        out.push(parse_tactic(cur)?);
        cur.expect(&Tok::Dot)?;
    }
    Ok(out)
}

fn parse_count(cur: &mut Cursor) -> std::result::Result<Count, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) if n >= 0 => {
            cur.bump();
            Ok(Count::Steps(n as usize))
        }
        Tok::Ident(_) => Ok(Count::State(cur.ident()?)),
        other => Err(cur.error(format!("expected a step count or a state, found {other}"))),
    }
}

fn optional_state(cur: &mut Cursor) -> std::result::Result<Option<String>, ParseError> {
    Ok(if matches!(cur.peek(), Tok::Ident(_)) { Some(cur.ident()?) } else { None })
}

fn parse_reply(cur: &mut Cursor) -> std::result::Result<LtsReply, ParseError> {
    let left_event = parse_event(cur)?;
    let left_state = cur.ident()?;
    cur.expect(&Tok::Arrow)?;
    let right_event: EventLabel = parse_event(cur)?;
    let right_state = cur.ident()?;
    Ok(LtsReply { left_event, left_state, right_event, right_state })
}

fn parse_step_arg(cur: &mut Cursor) -> std::result::Result<StepArg, ParseError> {
    if cur.peek() == &Tok::Dot {
        return Ok(StepArg::None);
    }
    if cur.peek() == &Tok::LParen {
        let mark = cur.mark();
        cur.bump();
        if let Ok(first) = parse_reply(cur) {
            let mut rs = vec![first];
            while cur.eat(&Tok::Comma) {
                rs.push(parse_reply(cur)?);
            }
            cur.expect(&Tok::RParen)?;
            return Ok(StepArg::Replies(rs));
        }
        cur.reset(mark);
    }
    Ok(StepArg::Value(parse_texpr(cur)?))
}

fn parse_pairs(cur: &mut Cursor) -> std::result::Result<Vec<(String, String, Option<Formula>)>, ParseError> {
    let mut out = Vec::new();
    loop {
        let a = cur.ident()?;
        let b = cur.ident()?;
        let phi = if cur.eat(&Tok::Colon) { Some(parse_formula(cur)?) } else { None };
        out.push((a, b, phi));
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(&Tok::RBrace)?;
    Ok(out)
}

fn parse_tactic(cur: &mut Cursor) -> std::result::Result<Tactic, ParseError> {
    let name = match cur.peek().clone() {
        Tok::Ident(n) => n,
        other => return Err(cur.error(format!("expected a tactic, found {other}"))),
    };
    cur.bump();
    Ok(match name.as_str() {
        "init" => Tactic::Init,
        "step" => Tactic::Step(parse_step_arg(cur)?),
        "sync" => Tactic::Sync,
        "deriv" => Tactic::Deriv,
        "cycle" => Tactic::Cycle,
        "invariant" => {
            if cur.eat(&Tok::LBrace) {
                Tactic::Invariant(parse_pairs(cur)?)
            } else {
                Tactic::MemoryInvariant(parse_tcond(cur)?)
            }
        }
        "left" => Tactic::Left(parse_count(cur)?),
        "right" => Tactic::Right(parse_count(cur)?),
        "havoc_l" => Tactic::HavocL,
        "havoc_r" => Tactic::HavocR(parse_texpr(cur)?),
        "strengthen" => Tactic::Strengthen(parse_formula(cur)?),
        "sim_l" => Tactic::SimL(optional_state(cur)?),
        "sim_r" => Tactic::SimR(optional_state(cur)?),
        other => return Err(cur.error(format!("unknown tactic `{other}`"))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofResult {
    /// Every goal was closed.
    Closed { rules: usize },
    /// A tactic was refused.
    Failed { index: usize, tactic: String, goal: String, reason: String },
    /// The script ended with goals left open, or ran out of goals early.
    Stuck { open: Vec<String>, reason: String },
}

impl ProofResult {
    pub fn is_closed(&self) -> bool {
        matches!(self, ProofResult::Closed { .. })
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ProofResult::Closed { .. } => 0,
            ProofResult::Failed { .. } => 1,
            ProofResult::Stuck { .. } => 1,
        }
    }

    pub fn report(&self) -> String {
        match self {
            ProofResult::Closed { rules } => format!("QED ({rules} rule applications)\n"),
            ProofResult::Failed { index, tactic, goal, reason } => {
                format!("FAILED at tactic {} `{tactic}`\n  goal: {goal}\n  {reason}\n", index + 1)
            }
            ProofResult::Stuck { open, reason } => {
                let mut s = format!("INCOMPLETE: {reason}\n");
                for g in open {
                    s.push_str(&format!("  open: {g}\n"));
                }
                s
            }
        }
    }
}

/// Runs a script to completion against a fresh kernel.
pub fn run_script(kernel: &mut Kernel, tactics: &[Tactic]) -> ProofResult {
    let mut stack: Vec<Goal> = Vec::new();
    let mut started = false;
    for (index, t) in tactics.iter().enumerate() {
        let fail = |goal: String, reason: String| ProofResult::Failed { index, tactic: t.to_string(), goal, reason };
        if !started {
            if *t != Tactic::Init {
                return fail(String::new(), "a proof starts with `init`".into());
            }
            started = true;
            stack.push(kernel.init());
            continue;
        }
        let Some(g) = stack.pop() else {
            return ProofResult::Stuck { open: Vec::new(), reason: format!("no goals left for tactic {} `{t}`", index + 1) };
        };
        let children = match apply(kernel, &g, t) {
            Ok(c) => c,
            Err(reason) => return fail(kernel.describe(&g), reason),
        };
        stack.extend(children.into_iter().rev());
    }
    if !started {
        return ProofResult::Stuck { open: Vec::new(), reason: "the proof is empty".into() };
    }
    if stack.is_empty() {
        ProofResult::Closed { rules: kernel.trace().len() }
    } else {
        let open = stack.iter().rev().map(|g| kernel.describe(g)).collect();
        ProofResult::Stuck { open, reason: format!("{} goal(s) remain at qed", stack.len()) }
    }
}

fn apply(k: &mut Kernel, g: &Goal, t: &Tactic) -> std::result::Result<Vec<Goal>, String> {
    let one = |r: std::result::Result<Goal, crate::kernel::goal::Refusal>| r.map(|g| vec![g]).map_err(|e| e.to_string());
    match t {
        Tactic::Init => Err("`init` may only start the proof".into()),
        Tactic::Step(StepArg::Replies(rs)) => k.step_lts(g, rs).map_err(|e| e.to_string()),
        Tactic::Step(StepArg::Value(e)) => one(k.step_io(g, Some(e))),
        Tactic::Step(StepArg::None) => {
            if k.is_imp() {
                one(k.step_io(g, None))
            } else {
                k.step_lts(g, &[]).map_err(|e| e.to_string())
            }
        }
        Tactic::Sync => match k.sync(g).map_err(|e| e.to_string())? {
            SyncOutcome::Synced(g) | SyncOutcome::Stopped(g, _) => Ok(vec![g]),
        },
        Tactic::Deriv => one(k.deriv(g)),
        Tactic::Cycle => k.cycle(g).map(|()| Vec::new()).map_err(|e| e.to_string()),
        Tactic::MemoryInvariant(c) => one(k.memory_invariant(g, c)),
        Tactic::Invariant(ps) => k.invariant(g, ps).map_err(|e| e.to_string()),
        Tactic::Left(Count::Steps(n)) => one(k.steps_l(g, *n)),
        Tactic::Left(Count::State(s)) => Err(format!("Steps-L: the left side only takes deterministic steps; use `left N` instead of `{s}`")),
        Tactic::Right(Count::Steps(n)) => one(k.steps_r(g, *n)),
        Tactic::Right(Count::State(s)) => one(k.steps_r_to(g, s)),
        Tactic::HavocL => one(k.havoc_l(g)),
        Tactic::HavocR(e) => one(k.havoc_r(g, e)),
        Tactic::Strengthen(phi) => one(k.strengthen(g, phi)),
        Tactic::SimL(s) => one(k.sim_l(g, s.as_deref())),
        Tactic::SimR(s) => one(k.sim_r(g, s.as_deref())),
    }
}
