use std::fmt;
use std::sync::Arc;

use crate::imp::ast::Prog;
use crate::kernel::sym::{Constraint, SymEvent, SymMemory};
use crate::kernel::term::TCond;
use crate::lts::StateId;
use crate::relspec::FormulaId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guard {
    /// The hypothesis may not be used yet.
    Guarded,
    /// Cycle may close the goal.
    Unguarded,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guard::Guarded => "guarded",
            Guard::Unguarded => "unguarded",
        })
    }
}

/// One side of a goal: a state of an LTS or a symbolic program configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    State(StateId),
    Imp { prog: Prog, mem: SymMemory },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypEntry {
    Concrete { left: StateId, right: StateId, fid: FormulaId },
    /// Every pair of memories satisfying `inv` at the two programs.
    Lifted { left: Prog, right: Prog, fid: FormulaId, inv: TCond },
}

/// `<H | left, right | formula>`, or the pending form
/// `<H | e1 > left, e2 > right | formula>` when `pending` is set.
#[derive(Clone, Debug)]
pub struct Goal {
    pub guard: Guard,
    pub hyp: Arc<Vec<HypEntry>>,
    pub left: Side,
    pub right: Side,
    pub fid: FormulaId,
    pub pending: Option<(SymEvent, SymEvent)>,
    /// Facts about the symbols in scope.
    pub assumptions: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivKind {
    Always,
    Next,
    WeakUntilNow,
    WeakUntilLater,
    WeakUntil,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Init,
    Step,
    InputInput,
    OutputOutput,
    Deriv(DerivKind),
    Invariant,
    MemoryInvariant,
    Cycle,
    StepsL,
    StepsR,
    HavocL,
    HavocR,
    Strengthen,
    SimL,
    SimR,
    Sync,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Init => "Init",
            Rule::Step => "Step",
            Rule::InputInput => "Input-input",
            Rule::OutputOutput => "Output-output",
            Rule::Deriv(DerivKind::Always) => "Deriv-□",
            Rule::Deriv(DerivKind::Next) => "Deriv-○",
            Rule::Deriv(DerivKind::WeakUntilNow) => "Deriv-W-Now",
            Rule::Deriv(DerivKind::WeakUntilLater) => "Deriv-W-Later",
            Rule::Deriv(DerivKind::WeakUntil) => "Deriv-W",
            Rule::Deriv(DerivKind::General) => "Deriv",
            Rule::Invariant => "Invariant",
            Rule::MemoryInvariant => "Memory-Invariant",
            Rule::Cycle => "Cycle",
            Rule::StepsL => "Steps-L",
            Rule::StepsR => "Steps-R",
            Rule::HavocL => "Havoc-L",
            Rule::HavocR => "Havoc-R",
            Rule::Strengthen => "Strengthen",
            Rule::SimL => "Sim-L",
            Rule::SimR => "Sim-R",
            Rule::Sync => "sync",
        })
    }
}

impl Rule {
    pub fn is_deriv(self) -> bool {
        matches!(self, Rule::Deriv(_))
    }
}

/// One successful rule application, for auditing the guard discipline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApp {
    pub rule: Rule,
    /// `None` for Init, which has no premise goal.
    pub before: Option<Guard>,
    pub after: Vec<Guard>,
}

/// A rule that does not apply to the goal at hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refusal {
    pub rule: Rule,
    pub message: String,
}

impl Refusal {
    pub fn new(rule: Rule, message: impl Into<String>) -> Self {
        Refusal { rule, message: message.into() }
    }
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}
