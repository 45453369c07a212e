//! The four commands behind the `hyperprove` binary.
//!
//! Each command returns a deterministic report and an exit code: 0 when the
//! property is proved, the proof is closed or the logs are compatible; 1 when
//! it is not established or violated; 2 on usage, parse and resource errors.

use std::fmt::Write as _;
use std::path::Path;

use crate::decl::{Settings, SpecFile};
use crate::error::{Error, Result};
use crate::kernel::{run_script, DEFAULT_BUDGET};
use crate::lasso::Lasso;
use crate::lts::{parse_event, EventLabel};
use crate::relspec::{lasso_models_direct, ClosureGraph, FormulaStore, DEFAULT_CLOSURE_CAP};
use crate::solver::{check_hyper, extract_witness, oracle_region, Caps, CheckResult};
use crate::syntax::{Cursor, Tok};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub modulus: Option<i64>,
    pub input_domain: Option<(i64, i64)>,
    pub max_nodes: Option<usize>,
    pub max_closure: Option<usize>,
    pub oracle: bool,
    pub strategy_dump: bool,
}

impl Flags {
    fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps { max_nodes: self.max_nodes.unwrap_or(d.max_nodes), max_closure: self.max_closure.unwrap_or(d.max_closure) }
    }

    fn settings(&self, spec: &SpecFile) -> Settings {
        spec.settings(self.modulus, self.input_domain, None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

impl Outcome {
    fn error(e: &Error) -> Outcome {
        Outcome { report: format!("error: {e}\n"), code: 2 }
    }

    fn from(r: Result<Outcome>) -> Outcome {
        r.unwrap_or_else(|e| Outcome::error(&e))
    }
}

/// Parses `in(1) out(2), a` as a sequence of events.
pub fn parse_events(src: &str) -> Result<Vec<EventLabel>> {
    let mut cur = Cursor::new(src)?;
    let mut out = Vec::new();
    while !cur.at_eof() {
        out.push(parse_event(&mut cur)?);
        cur.eat(&Tok::Comma);
    }
    Ok(out)
}

fn solve(spec: &SpecFile, flags: &Flags) -> Result<CheckResult> {
    let s = flags.settings(spec);
    check_hyper(&spec.hyper_query(&s)?, &flags.caps())
}

pub fn cmd_check(path: &Path, flags: &Flags) -> Outcome {
    Outcome::from(SpecFile::load(path).map(|spec| check_spec(&spec, flags)))
}

pub fn check_spec(spec: &SpecFile, flags: &Flags) -> Outcome {
    Outcome::from((|| {
        let res = solve(spec, flags)?;
        let mut report = res.report(flags.strategy_dump);
        let mut code = if res.is_proved() { 0 } else { 1 };
        if flags.oracle {
            let oracle = oracle_region(&res.arena);
            let diff = (0..oracle.len()).filter(|&v| oracle[v] != res.region.winning[v]).count();
            if diff == 0 {
                report.push_str("oracle: agrees\n");
            } else {
                let _ = writeln!(report, "oracle: MISMATCH on {diff} nodes");
                code = 2;
            }
        }
        Ok(Outcome { report, code })
    })())
}

pub fn cmd_prove(path: &Path, flags: &Flags) -> Outcome {
    Outcome::from(SpecFile::load(path).map(|spec| prove_spec(&spec, flags)))
}

pub fn prove_spec(spec: &SpecFile, flags: &Flags) -> Outcome {
    Outcome::from((|| {
        let tactics = spec.proof.as_ref().ok_or_else(|| Error::input("the spec has no `proof ... qed` block"))?;
        let s = flags.settings(spec);
        let mut k = spec.kernel(&s, DEFAULT_BUDGET, flags.max_closure.unwrap_or(DEFAULT_CLOSURE_CAP))?;
        let q = spec.query()?;
        let r = run_script(&mut k, tactics);
        let m = if spec.uses_programs() { format!(" (M={})", s.modulus) } else { String::new() };
        let report =
            format!("goal: forall {} exists {} : {}{m}\n{}", q.universal[0], q.existential[0], q.formula, r.report());
        Ok(Outcome { report, code: r.exit_code() })
    })())
}

pub fn cmd_witness(path: &Path, lassos: &[String], flags: &Flags) -> Outcome {
    Outcome::from(SpecFile::load(path).map(|spec| witness_spec(&spec, lassos, flags)))
}

pub fn witness_spec(spec: &SpecFile, lassos: &[String], flags: &Flags) -> Outcome {
    Outcome::from((|| {
        let words = lassos.iter().map(|l| Lasso::parse(l)).collect::<Result<Vec<_>>>()?;
        let res = solve(spec, flags)?;
        let q = spec.query()?;
        if words.len() != q.universal.len() {
            return Err(Error::input(format!("expected {} universal lassos, got {}", q.universal.len(), words.len())));
        }
        if !res.is_proved() {
            return Ok(Outcome { report: "UNKNOWN: the query is not proved, so there is no strategy\n".into(), code: 1 });
        }
        let mut runs = Vec::new();
        for ((w, l), name) in words.iter().zip(res.arena.universal()).zip(&q.universal) {
            match l.realize(w) {
                Some(r) => runs.push(r),
                None => {
                    return Ok(Outcome { report: format!("NOT A TRACE: `{w}` is not a trace of `{name}`\n"), code: 1 })
                }
            }
        }
        let wit = extract_witness(&res, &runs)?;
        let all: Vec<Lasso> = words.iter().chain(&wit.words).cloned().collect();
        if !lasso_models_direct(&all, &res.formula, &res.atoms)? {
            return Err(Error::Precondition("the extracted witness does not satisfy the formula".into()));
        }
        let mut report = String::from("PROVED\n");
        for (w, name) in words.iter().zip(&q.universal) {
            let _ = writeln!(report, "forall {name}: {w}");
        }
        for (w, name) in wit.words.iter().zip(&q.existential) {
            let _ = writeln!(report, "exists {name}: {w}");
        }
        Ok(Outcome { report, code: 0 })
    })())
}

pub fn cmd_monitor(path: &Path, logs: &[impl AsRef<Path>], flags: &Flags) -> Outcome {
    Outcome::from((|| {
        let spec = SpecFile::load(path)?;
        let seqs = logs
            .iter()
            .map(|p| {
                let p = p.as_ref();
                let src = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                parse_events(&src)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(monitor_spec(&spec, &seqs, flags))
    })())
}

/// Runs the derivative of the query formula over the joint prefix of the
/// logs and reports the first position where it becomes unsatisfiable.
pub fn monitor_spec(spec: &SpecFile, logs: &[Vec<EventLabel>], flags: &Flags) -> Outcome {
    Outcome::from((|| {
        let q = spec.query()?;
        if logs.len() != q.arity() {
            return Err(Error::input(format!("expected {} logs, one per system, got {}", q.arity(), logs.len())));
        }
        let len = logs[0].len();
        if logs.iter().any(|l| l.len() != len) {
            let lens: Vec<String> = logs.iter().map(|l| l.len().to_string()).collect();
            return Err(Error::input(format!("the logs have different lengths ({})", lens.join(", "))));
        }
        let s = flags.settings(spec);
        let alphabets = spec.alphabets(&s)?;
        let atoms = spec.atoms_for(&s);
        let mut store = FormulaStore::new();
        let root = store.intern(&q.formula);
        let g = ClosureGraph::build(&mut store, root, &alphabets, &atoms, flags.caps().max_closure)?;
        if !g.nonempty(root) {
            return Ok(Outcome { report: "VIOLATION at 0: the formula is unsatisfiable\n".into(), code: 1 });
        }
        let names: Vec<&String> = q.names().collect();
        let mut f = root;
        for i in 0..len {
            let events: Vec<EventLabel> = logs.iter().map(|l| l[i].clone()).collect();
            for (k, e) in events.iter().enumerate() {
                if !alphabets[k].contains(e) {
                    return Err(Error::input(format!("event `{e}` at position {i} is not in the alphabet of `{}`", names[k])));
                }
            }
            let d = g.step(f, &events).expect("events checked against the alphabets");
            if !g.nonempty(d) {
                let ev: Vec<String> = events.iter().map(ToString::to_string).collect();
                let report = format!("VIOLATION at {i}\nevents: ({})\nbefore: {}\n", ev.join(", "), store.to_formula(f));
                return Ok(Outcome { report, code: 1 });
            }
            f = d;
        }
        Ok(Outcome { report: format!("OK\nresidual: {}\n", store.to_formula(f)), code: 0 })
    })())
}
