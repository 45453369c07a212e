mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::rng;
use hyperprove::imp::{
    compile_lts, eval_expr, head, parse_program, step, Cond, Expr, Head, ImpOptions, Memory, Prog, Rel, Semantics,
    Stmt, Var,
};
use hyperprove::solver::check_simulation;
use hyperprove::EventLabel;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 2] = ["x", "y"];

fn var(r: &mut ChaCha8Rng) -> Var {
    Arc::from(VARS[r.gen_range(0..VARS.len())])
}

fn expr(r: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.4) {
        return if r.gen_bool(0.5) { Expr::Const(r.gen_range(0..4)) } else { Expr::Var(var(r)) };
    }
    let (a, b) = (Box::new(expr(r, depth - 1)), Box::new(expr(r, depth - 1)));
    match r.gen_range(0..3) {
        0 => Expr::Add(a, b),
        1 => Expr::Sub(a, b),
        _ => Expr::Mul(a, b),
    }
}

fn cond(r: &mut ChaCha8Rng) -> Cond {
    let rel = [Rel::Eq, Rel::Ne, Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge][r.gen_range(0..6)];
    Cond::Cmp(expr(r, 1), rel, expr(r, 1))
}

fn basic(r: &mut ChaCha8Rng) -> Prog {
    Arc::new(match r.gen_range(0..4) {
        0 => Stmt::Input(var(r)),
        1 => Stmt::Output(expr(r, 2)),
        2 => Stmt::Havoc(var(r)),
        _ => Stmt::Assign(var(r), expr(r, 2)),
    })
}

/// Any statement; used as a loop body or as the first part of a `;`.
fn stmt(r: &mut ChaCha8Rng, depth: usize) -> Prog {
    if depth == 0 || r.gen_bool(0.3) {
        return basic(r);
    }
    let d = depth - 1;
    Arc::new(match r.gen_range(0..4) {
        0 | 1 => Stmt::Seq(stmt(r, d), stmt(r, d)),
        2 => Stmt::If(cond(r), stmt(r, d), stmt(r, d)),
        _ => Stmt::Loop(stmt(r, d)),
    })
}

/// A statement whose every control path ends in a loop.
fn reactive(r: &mut ChaCha8Rng, depth: usize) -> Prog {
    if depth == 0 || r.gen_bool(0.25) {
        return Arc::new(Stmt::Loop(stmt(r, depth.min(2))));
    }
    let d = depth - 1;
    Arc::new(match r.gen_range(0..3) {
        0 => Stmt::Seq(stmt(r, d), reactive(r, d)),
        1 => Stmt::If(cond(r), reactive(r, d), reactive(r, d)),
        _ => Stmt::Loop(stmt(r, d)),
    })
}

fn small_opts(canonical_seq: bool) -> ImpOptions {
    ImpOptions { modulus: 3, input_domain: None, max_states: 20_000, canonical_seq }
}

fn naive_eval(e: &Expr, m: &Memory) -> i128 {
    match e {
        Expr::Const(c) => *c as i128,
        Expr::Var(x) => m.get(x) as i128,
        Expr::Add(a, b) => naive_eval(a, m) + naive_eval(b, m),
        Expr::Sub(a, b) => naive_eval(a, m) - naive_eval(b, m),
        Expr::Mul(a, b) => naive_eval(a, m) * naive_eval(b, m),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arithmetic_is_integer_arithmetic_mod_m(seed in any::<u64>(), modulus in 1i64..=9, x in 0i64..9, y in 0i64..9) {
        let mut r = rng(seed);
        let e = expr(&mut r, 4);
        let mut m = Memory::new();
        m.set(&Arc::from("x"), x, modulus);
        m.set(&Arc::from("y"), y, modulus);
        let v = eval_expr(&e, &m, modulus);
        prop_assert!((0..modulus).contains(&v));
        prop_assert_eq!(v as i128, naive_eval(&e, &m).rem_euclid(modulus as i128));
    }

    #[test]
    fn printed_programs_parse_back(seed in any::<u64>()) {
        let p = reactive(&mut rng(seed), 4);
        let q = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(Stmt::right_nested(&q), Stmt::right_nested(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn determinism_partition(seed in any::<u64>()) {
        let p = reactive(&mut rng(seed), 4);
        let c = compile_lts("P", &p, &small_opts(true)).unwrap();
        let sem = small_opts(true).semantics().unwrap();
        for s in c.lts.states() {
            let cfg = c.config(s);
            let out: Vec<_> = c.lts.transitions().iter().filter(|t| t.src == s).collect();
            let succ = step(cfg, &sem);
            match head(&cfg.prog) {
                Head::Loop { .. } | Head::If { .. } | Head::Continue { .. } | Head::Assign { .. } => {
                    prop_assert_eq!(succ.len(), 1);
                    prop_assert!(out.len() == 1 && out[0].label.is_none());
                    prop_assert_eq!(c.lts.det_step(s).unwrap(), Some(out[0].dst));
                }
                Head::Input { .. } | Head::Output { .. } => {
                    prop_assert!(!out.is_empty() && out.iter().all(|t| t.label.is_some()));
                    prop_assert_eq!(c.lts.det_step(s).unwrap(), None);
                }
                Head::Havoc { .. } => {
                    prop_assert_eq!(succ.len(), 3);
                    prop_assert!(out.iter().all(|t| t.label.is_none()));
                }
                Head::Stuck => prop_assert!(false, "reachable stuck configuration {}", cfg),
            }
        }
    }

    #[test]
    fn outputs_and_branches_keep_memory(seed in any::<u64>()) {
        let p = reactive(&mut rng(seed), 4);
        let c = compile_lts("P", &p, &small_opts(true)).unwrap();
        for t in c.lts.transitions() {
            let src = c.config(t.src);
            if matches!(head(&src.prog), Head::Output { .. } | Head::If { .. }) {
                prop_assert_eq!(&c.config(t.dst).mem, &src.mem);
            }
        }
    }

    #[test]
    fn reassociation_preserves_traces(seed in any::<u64>()) {
        let p = reactive(&mut rng(seed), 4);
        let raw = compile_lts("P", &p, &small_opts(false)).unwrap().lts;
        let canon = compile_lts("Q", &p, &small_opts(true)).unwrap().lts;
        prop_assert!(canon.num_states() <= raw.num_states());
        prop_assert!(check_simulation(&raw, &canon).unwrap().is_proved());
        prop_assert!(check_simulation(&canon, &raw).unwrap().is_proved());
    }
}

fn obs_shape(src: &str, modulus: i64) -> (usize, BTreeSet<EventLabel>) {
    let p = parse_program(src).unwrap();
    let c = compile_lts("P", &p, &ImpOptions::with_modulus(modulus)).unwrap();
    let events = c.lts.transitions().iter().filter_map(|t| t.label.clone()).collect();
    (c.lts.num_states(), events)
}

#[test]
fn echo_alternates_inputs_and_outputs() {
    let p = parse_program("loop { input x; output x }").unwrap();
    let c = compile_lts("echo", &p, &ImpOptions::with_modulus(2)).unwrap();
    let l = &c.lts;
    let first = l.obs_successors(l.init()).unwrap().to_vec();
    assert_eq!(first.iter().map(|(e, _)| e.clone()).collect::<Vec<_>>(), vec![EventLabel::In(0), EventLabel::In(1)]);
    for (e, s) in first {
        let v = match e {
            EventLabel::In(v) => v,
            _ => unreachable!(),
        };
        let second = l.obs_successors(s).unwrap();
        assert_eq!(second.len(), 1);
        assert_eq!(second[0].0, EventLabel::Out(v));
        let back: Vec<EventLabel> = l.obs_successors(second[0].1).unwrap().iter().map(|(e, _)| e.clone()).collect();
        assert_eq!(back, vec![EventLabel::In(0), EventLabel::In(1)]);
    }
}

#[test]
fn constant_output_loop() {
    let (_, events) = obs_shape("loop output 0", 2);
    assert_eq!(events, BTreeSet::from([EventLabel::Out(0)]));
}

#[test]
fn incr_visits_every_residue() {
    let p = parse_program("loop { x := x + 1; output x }").unwrap();
    let c = compile_lts("incr", &p, &ImpOptions::with_modulus(8)).unwrap();
    let mems: BTreeSet<i64> = c.configs.iter().map(|cfg| cfg.mem.get("x")).collect();
    assert_eq!(mems, (0..8).collect());
    let (_, events) = obs_shape("loop { x := x + 1; output x }", 8);
    assert_eq!(events, (0..8).map(EventLabel::Out).collect());
}

#[test]
fn havoc_is_silent() {
    let (_, events) = obs_shape("loop { havoc y; output y }", 4);
    assert_eq!(events, (0..4).map(EventLabel::Out).collect());
}

#[test]
fn reactivity_is_enforced() {
    assert!(parse_program("output 1").is_err());
    assert!(parse_program("loop output 0").is_ok());
    assert!(parse_program("if x == 0 then loop output 0 else output 1").is_err());
    let err = parse_program("input x; output x").unwrap_err().to_string();
    assert!(err.contains("output"), "{err}");
}

#[test]
fn restricted_domain_limits_inputs() {
    let p = parse_program("loop { input x; output x }").unwrap();
    let opts = ImpOptions { input_domain: Some(vec![1, 3]), ..ImpOptions::with_modulus(4) };
    let c = compile_lts("echo", &p, &opts).unwrap();
    let ins: BTreeSet<EventLabel> =
        c.lts.transitions().iter().filter_map(|t| t.label.clone()).filter(|e| matches!(e, EventLabel::In(_))).collect();
    assert_eq!(ins, BTreeSet::from([EventLabel::In(1), EventLabel::In(3)]));
    assert_eq!(Semantics { modulus: 4, input_domain: vec![1, 3] }, opts.semantics().unwrap());
}
