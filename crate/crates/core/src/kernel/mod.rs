//! Interactive proofs of binary forall-exists properties.
//!
//! A [`Kernel`] owns the two systems and the formula. Goals are created only
//! by its rules, so a script that closes every goal is a proof. Programs are
//! handled symbolically: memories map variables to linear expressions over
//! introduced symbols, and side conditions go to a [`Discharger`].

pub mod discharge;
pub mod goal;
pub mod rules;
pub mod script;
pub mod sym;
pub mod term;

pub use discharge::{Discharger, Method, Outcome, DEFAULT_BUDGET};
pub use goal::{DerivKind, Goal, Guard, HypEntry, Refusal, Rule, RuleApp, Side};
pub use rules::{Kernel, KernelOptions, LtsReply, SyncOutcome, System, SystemDef, SYNC_LIMIT};
pub use script::{parse_script, run_script, Count, ProofResult, StepArg, Tactic};
pub use sym::{Assignment, Constraint, LinExpr, Sym, SymEvent, SymMemory, Symbols};
pub use term::{TCond, TExpr, Which};
