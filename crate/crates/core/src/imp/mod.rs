//! IMP_io: a small imperative language with `input`, `output` and `havoc`,
//! and its compilation to finite LTSs over integers modulo M.

pub mod ast;
pub mod parse;
pub mod semantics;

use std::collections::HashMap;

use crate::error::{Error, Resource, Result};
use crate::lts::{EventLabel, Lts, LtsBuilder, StateId};

pub use ast::{Cond, Expr, Prog, Rel, Stmt, Var};
pub use parse::parse_program;
pub use semantics::{eval_cond, eval_expr, head, step, Config, Head, Memory, Semantics};

pub const DEFAULT_MODULUS: i64 = 8;
pub const DEFAULT_MAX_STATES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpOptions {
    pub modulus: i64,
    /// Values for `input` and `havoc`; `None` means all of `[0, M)`.
    pub input_domain: Option<Vec<i64>>,
    pub max_states: usize,
    /// Store configurations with right-nested sequences.
    pub canonical_seq: bool,
}

impl Default for ImpOptions {
    fn default() -> Self {
        ImpOptions { modulus: DEFAULT_MODULUS, input_domain: None, max_states: DEFAULT_MAX_STATES, canonical_seq: true }
    }
}

impl ImpOptions {
    pub fn with_modulus(modulus: i64) -> Self {
        ImpOptions { modulus, ..Default::default() }
    }

    pub fn semantics(&self) -> Result<Semantics> {
        if self.modulus < 1 {
            return Err(Error::input(format!("modulus must be positive, got {}", self.modulus)));
        }
        let mut domain: Vec<i64> = match &self.input_domain {
            Some(d) => d.iter().map(|v| v.rem_euclid(self.modulus)).collect(),
            None => (0..self.modulus).collect(),
        };
        domain.sort_unstable();
        domain.dedup();
        if domain.is_empty() {
            return Err(Error::input("the input domain is empty"));
        }
        Ok(Semantics { modulus: self.modulus, input_domain: domain })
    }
}

#[derive(Clone, Debug)]
pub struct CompiledProgram {
    pub lts: Lts,
    /// Configuration of each state, indexed by `StateId`.
    pub configs: Vec<Config>,
}

impl CompiledProgram {
    pub fn config(&self, s: StateId) -> &Config {
        &self.configs[s.index()]
    }
}

/// Explores every configuration reachable from `<p, 0>`.
pub fn compile_lts(name: &str, p: &Prog, opts: &ImpOptions) -> Result<CompiledProgram> {
    let sem = opts.semantics()?;
    let norm = |c: Config| {
        if opts.canonical_seq {
            Config { prog: Stmt::right_nested(&c.prog), mem: c.mem }
        } else {
            c
        }
    };
    let mut b = Lts::builder(name);
    for v in 0..sem.modulus {
        b.event(EventLabel::In(v));
        b.event(EventLabel::Out(v));
    }
    let mut ids: HashMap<Config, StateId> = HashMap::new();
    let mut configs: Vec<Config> = Vec::new();
    let mut intern = |c: Config, b: &mut LtsBuilder, configs: &mut Vec<Config>| -> Result<StateId> {
        if let Some(&s) = ids.get(&c) {
            return Ok(s);
        }
        if configs.len() >= opts.max_states {
            return Err(Error::Resource {
                resource: Resource::ProgramStates,
                cap: opts.max_states,
                detail: format!("while adding {c}"),
            });
        }
        let s = b.state(&format!("c{}", configs.len()));
        ids.insert(c.clone(), s);
        configs.push(c);
        Ok(s)
    };
    let init = intern(norm(Config { prog: p.clone(), mem: Memory::new() }), &mut b, &mut configs)?;
    b.init(init);
    let mut i = 0;
    while i < configs.len() {
        let src = StateId(i as u32);
        for (e, next) in step(&configs[i].clone(), &sem) {
            let t = intern(norm(next), &mut b, &mut configs)?;
            b.edge(src, e, t);
        }
        i += 1;
    }
    Ok(CompiledProgram { lts: b.build()?, configs })
}
