//! Automatic checking of `forall^m exists^n phi` over finite systems.
//!
//! The arena pairs `m + n` system states with a derivative of the formula.
//! The existential player wins from a node if it can answer every tuple of
//! universal observable steps with existential steps whose derivative stays
//! nonempty, forever. The winning region is the greatest such set.

pub mod arena;
pub mod region;
pub mod witness;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lts::Lts;
use crate::relspec::{AtomTable, Formula, DEFAULT_CLOSURE_CAP};

pub use arena::{Arena, GameNode, Reply, Step, UniversalMove};
pub use region::{oracle_region, reachable, winning_region, Region, Strategy};
pub use witness::{extract_witness, is_run_of, Witness};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct HyperQuery {
    pub universal: Vec<Lts>,
    pub existential: Vec<Lts>,
    pub formula: Formula,
    pub atoms: AtomTable,
}

impl HyperQuery {
    pub fn new(universal: Vec<Lts>, existential: Vec<Lts>, formula: Formula, atoms: AtomTable) -> Self {
        HyperQuery { universal, existential, formula, atoms }
    }

    pub fn arity(&self) -> usize {
        self.universal.len() + self.existential.len()
    }

    pub fn systems(&self) -> impl Iterator<Item = &Lts> {
        self.universal.iter().chain(&self.existential)
    }

    pub fn validate(&self) -> Result<()> {
        if self.arity() == 0 {
            return Err(Error::input("a query needs at least one system"));
        }
        self.formula.check_atoms(&self.atoms, self.arity())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_nodes: usize,
    pub max_closure: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_nodes: DEFAULT_MAX_NODES, max_closure: DEFAULT_CLOSURE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The initial node is winning; the strategy lives in [`CheckResult::region`].
    Proved,
    /// The initial node is losing (or the formula is empty). `losing` lists
    /// the losing reachable nodes in breadth-first order.
    Unknown { losing: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stats {
    pub arena_nodes: usize,
    pub region_size: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub stats: Stats,
    pub arena: Arena,
    pub region: Region,
    pub formula: Formula,
    pub atoms: AtomTable,
}

impl CheckResult {
    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }

    pub fn strategy(&self) -> Option<&Strategy> {
        self.is_proved().then_some(&self.region.strategy)
    }

    /// Deterministic line-oriented report.
    pub fn report(&self, strategy_dump: bool) -> String {
        let mut s = String::new();
        s.push_str(if self.is_proved() { "PROVED\n" } else { "UNKNOWN\n" });
        let _ = writeln!(s, "arena nodes: {}", self.stats.arena_nodes);
        let _ = writeln!(s, "region size: {}", self.stats.region_size);
        let _ = writeln!(s, "rounds: {}", self.stats.rounds);
        if let Verdict::Unknown { losing } = &self.verdict {
            if self.arena.root().is_none() {
                s.push_str("the formula is empty over the system alphabets\n");
            }
            for &v in losing.iter().take(5) {
                let _ = writeln!(s, "losing: {}", self.arena.describe(v));
            }
            if losing.len() > 5 {
                let _ = writeln!(s, "losing: ... {} more", losing.len() - 5);
            }
        }
        if strategy_dump && self.is_proved() {
            s.push_str("strategy:\n");
            for v in reachable(&self.arena) {
                if !self.region.winning[v] {
                    continue;
                }
                let _ = writeln!(s, "  node {v} {}", self.arena.describe(v));
                for (k, mv) in self.arena.moves(v).iter().enumerate() {
                    let r = self.region.strategy.reply(&self.arena, v, k).expect("winning node");
                    let _ = writeln!(
                        s,
                        "    on {} play {} -> node {}",
                        self.arena.describe_steps(&mv.steps, false),
                        self.arena.describe_steps(&r.steps, true),
                        r.target
                    );
                }
            }
        }
        s
    }
}

pub fn check_hyper(q: &HyperQuery, caps: &Caps) -> Result<CheckResult> {
    let arena = Arena::build(q, caps)?;
    let region = winning_region(&arena);
    let proved = arena.root().is_some_and(|r| region.winning[r]);
    let verdict = if proved {
        Verdict::Proved
    } else {
        Verdict::Unknown { losing: reachable(&arena).into_iter().filter(|&v| !region.winning[v]).collect() }
    };
    let stats = Stats { arena_nodes: arena.len(), region_size: region.size(), rounds: region.rounds() };
    Ok(CheckResult { verdict, stats, arena, region, formula: q.formula.clone(), atoms: q.atoms.clone() })
}

/// `forall l1 exists l2 . always eq` over the union of both alphabets.
pub fn check_simulation(l1: &Lts, l2: &Lts) -> Result<CheckResult> {
    check_simulation_with(l1, l2, &Caps::default())
}

pub fn check_simulation_with(l1: &Lts, l2: &Lts, caps: &Caps) -> Result<CheckResult> {
    let union: Vec<_> = l1.alphabet().iter().chain(l2.alphabet()).cloned().collect();
    let q = HyperQuery::new(
        vec![l1.with_alphabet(union.clone())],
        vec![l2.with_alphabet(union)],
        Formula::always(Formula::atom("eq")),
        AtomTable::new(),
    );
    check_hyper(&q, caps)
}
