//! Trace relations: atoms, safety-fragment formulas, derivatives, closures
//! and lasso membership.

pub mod atoms;
pub mod closure;
pub mod eval;
pub mod formula;
pub mod store;

pub use atoms::{AtomDef, AtomTable};
pub use closure::{ClosureGraph, DEFAULT_CLOSURE_CAP};
pub use eval::{lasso_models_derivative, lasso_models_direct, Aligned};
pub use formula::Formula;
pub use store::{canonicalize, derive, FormulaId, FormulaStore, Node};

use crate::error::Result;
use crate::lts::EventLabel;

/// Builds the closure of a formula tree in a fresh store.
pub fn closure(
    f: &Formula,
    alphabets: &[Vec<EventLabel>],
    atoms: &AtomTable,
    cap: usize,
) -> Result<(FormulaStore, ClosureGraph)> {
    let mut store = FormulaStore::new();
    let root = store.intern(f);
    let g = ClosureGraph::build(&mut store, root, alphabets, atoms, cap)?;
    Ok((store, g))
}

/// Whether some tuple of infinite words over the alphabets satisfies `f`.
pub fn nonempty(f: &Formula, alphabets: &[Vec<EventLabel>], atoms: &AtomTable) -> Result<bool> {
    let (_, g) = closure(f, alphabets, atoms, DEFAULT_CLOSURE_CAP)?;
    Ok(g.nonempty(g.root()))
}
