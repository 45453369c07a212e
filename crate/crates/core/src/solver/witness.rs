//! Driving a winning strategy along universal lassos.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lasso::{Lasso, RunLasso};
use crate::lts::Lts;
use crate::relspec::lasso_models_direct;
use crate::solver::arena::Step;
use crate::solver::CheckResult;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// One run per existential system.
    pub runs: Vec<RunLasso>,
    pub words: Vec<Lasso>,
}

/// Whether `run` follows observable steps of `lts` from its initial state.
pub fn is_run_of(lts: &Lts, run: &RunLasso) -> bool {
    if run.start != lts.init() || run.cycle.is_empty() {
        return false;
    }
    let mut here = run.start;
    for (e, s) in run.prefix.iter().chain(&run.cycle) {
        match lts.obs_successors(here) {
            Ok(succ) if succ.iter().any(|(x, t)| x == e && t == s) => here = *s,
            _ => return false,
        }
    }
    here == run.state_before(run.prefix.len())
}

/// Plays the strategy of a proved query against the given universal runs and
/// returns the existential lassos it produces, validated against the query.
pub fn extract_witness(res: &CheckResult, universal: &[RunLasso]) -> Result<Witness> {
    let arena = &res.arena;
    if universal.len() != arena.universal().len() {
        return Err(Error::input(format!(
            "expected {} universal lassos, got {}",
            arena.universal().len(),
            universal.len()
        )));
    }
    for (i, (l, r)) in arena.universal().iter().zip(universal).enumerate() {
        if !is_run_of(l, r) {
            return Err(Error::input(format!("universal lasso {} is not a run of `{}`", i + 1, l.name())));
        }
    }
    let root = arena.root().filter(|&r| res.region.winning[r]).ok_or_else(|| {
        Error::Precondition("the initial node is not in the winning region".into())
    })?;

    let m = universal.len();
    let n = arena.existential().len();
    let mut pos = vec![0usize; m];
    let mut node = root;
    let mut seen: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
    let mut trail: Vec<Vec<Step>> = Vec::new();
    let cut = loop {
        if let Some(&k) = seen.get(&(pos.clone(), node)) {
            break k;
        }
        seen.insert((pos.clone(), node), trail.len());
        let steps: Vec<Step> = (0..m).map(|i| universal[i].step(pos[i]).clone()).collect();
        let mv = arena
            .moves(node)
            .iter()
            .position(|mv| mv.steps == steps)
            .expect("every universal step tuple is a move of the arena");
        let reply = res.region.strategy.reply(arena, node, mv).ok_or_else(|| {
            Error::Precondition(format!("no strategy entry at node {}", arena.describe(node)))
        })?;
        trail.push(reply.steps.clone());
        node = reply.target;
        for i in 0..m {
            pos[i] = universal[i].next_pos(pos[i]);
        }
    };
    if trail.len() == cut {
        return Err(Error::Precondition("strategy produced an empty cycle".into()));
    }
    let runs: Vec<RunLasso> = (0..n)
        .map(|j| {
            let col = |r: &[Vec<Step>]| r.iter().map(|s| s[j].clone()).collect::<Vec<_>>();
            RunLasso::new(arena.existential()[j].init(), col(&trail[..cut]), col(&trail[cut..]))
        })
        .collect();
    for (j, (l, r)) in arena.existential().iter().zip(&runs).enumerate() {
        if !is_run_of(l, r) {
            return Err(Error::Precondition(format!("witness {} is not a run of `{}`", j + 1, l.name())));
        }
    }
    let words: Vec<Lasso> = runs.iter().map(RunLasso::word).collect();
    let all: Vec<Lasso> = universal.iter().map(RunLasso::word).chain(words.iter().cloned()).collect();
    if !lasso_models_direct(&all, &res.formula, &res.atoms)? {
        return Err(Error::Precondition("witness tuple does not satisfy the formula".into()));
    }
    Ok(Witness { runs, words })
}
