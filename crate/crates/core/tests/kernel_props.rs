mod common;

use std::collections::BTreeMap;

use common::*;
use hyperprove::imp::Rel;
use hyperprove::kernel::{
    parse_script, run_script, Constraint, Discharger, Kernel, KernelOptions, LinExpr, Outcome, ProofResult, System,
    Sym, SystemDef, Symbols,
};
use hyperprove::solver::{check_hyper, reachable, Caps, CheckResult, HyperQuery};
use hyperprove::{EventLabel, Lts};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---- discharger -------------------------------------------------------

fn lin(r: &mut ChaCha8Rng, syms: &[Sym], m: i64) -> LinExpr {
    let mut e = LinExpr::constant(r.gen_range(0..m), m);
    for &s in syms {
        if r.gen_bool(0.6) {
            e = e.add(&LinExpr::symbol(s, m).scale(r.gen_range(0..m), m), m);
        }
    }
    if r.gen_bool(0.2) {
        let (a, b) = (LinExpr::symbol(syms[0], m), LinExpr::symbol(*syms.last().unwrap(), m));
        if let Some(p) = a.mul(&b, m) {
            e = e.add(&p, m);
        }
    }
    e
}

fn constraint(r: &mut ChaCha8Rng, syms: &[Sym], m: i64, depth: usize) -> Constraint {
    if depth == 0 || r.gen_bool(0.5) {
        let rel = [Rel::Eq, Rel::Eq, Rel::Ne, Rel::Lt, Rel::Le][r.gen_range(0..5)];
        return Constraint::Cmp(lin(r, syms, m), rel, lin(r, syms, m));
    }
    let (a, b) = (constraint(r, syms, m, depth - 1), constraint(r, syms, m, depth - 1));
    match r.gen_range(0..3) {
        0 => Constraint::and(a, b),
        1 => Constraint::Or(Box::new(a), Box::new(b)),
        _ => Constraint::not(a),
    }
}

fn assignments(syms: &Symbols, all: &[Sym], m: i64) -> Vec<BTreeMap<Sym, i64>> {
    let mut out = vec![BTreeMap::new()];
    for &s in all {
        let dom: Vec<i64> = syms.range(s).map_or_else(|| (0..m).collect(), |d| d.to_vec());
        out = out
            .into_iter()
            .flat_map(|a| {
                dom.iter().map(move |&v| {
                    let mut a = a.clone();
                    a.insert(s, v);
                    a
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn discharger_agrees_with_brute_force(seed in any::<u64>(), m in 2i64..=8) {
        let mut r = rng(seed);
        let mut syms = Symbols::new();
        let n = r.gen_range(1..=3);
        let all: Vec<_> = (0..n)
            .map(|i| {
                let range = r.gen_bool(0.3).then(|| vec![0, 1]);
                syms.fresh(&format!("v{i}"), range)
            })
            .collect();
        let assumptions: Vec<Constraint> = (0..r.gen_range(0..=2)).map(|_| constraint(&mut r, &all, m, 1)).collect();
        let goal = constraint(&mut r, &all, m, 2);
        let worlds = assignments(&syms, &all, m);
        let holds = |a: &BTreeMap<_, i64>| assumptions.iter().all(|c| c.eval(a, m));
        let valid = worlds.iter().filter(|a| holds(a)).all(|a| goal.eval(a, m));
        let satisfiable = worlds.iter().any(|a| holds(a));
        match Discharger::new(m).prove(&syms, &assumptions, &goal) {
            Outcome::Proven { method } => prop_assert!(valid, "proved by {:?} but invalid", method),
            Outcome::Unproven { counterexample, reason } => {
                prop_assert!(!valid || !satisfiable, "valid goal not proved: {}", reason);
                if let Some(cex) = counterexample {
                    let extends = worlds
                        .iter()
                        .any(|a| holds(a) && !goal.eval(a, m) && cex.iter().all(|(s, v)| a.get(s) == Some(v)));
                    prop_assert!(
                        extends,
                        "counterexample {:?} is not a real one: {} |- {}",
                        cex,
                        assumptions.iter().map(|c| c.show(&syms)).collect::<Vec<_>>().join(", "),
                        goal.show(&syms)
                    );
                }
            }
        }
    }
}

// ---- kernel versus solver ---------------------------------------------

fn pair_query(r: &mut ChaCha8Rng) -> HyperQuery {
    let l = random_lts(r, "L", 4, 2);
    let e = random_lts(r, "R", 4, 2);
    let names = atom_names(r);
    let mut f = random_formula(r, 2, &names);
    if r.gen_bool(0.5) {
        f = hyperprove::relspec::Formula::always(f);
    }
    HyperQuery::new(vec![l], vec![e], f, atoms(2))
}

fn lts_kernel(q: &HyperQuery) -> Kernel {
    let sys = |l: &Lts| System { name: l.name().into(), def: SystemDef::Lts(l.clone()) };
    Kernel::new(sys(&q.universal[0]), sys(&q.existential[0]), &q.formula, q.atoms.clone(), &KernelOptions::default())
        .unwrap()
}

/// A script that declares the triples of `nodes` (the root first) as the
/// invariant and answers each left move with `reply(node, move index)`.
fn script(res: &CheckResult, nodes: &[usize], mut reply: impl FnMut(usize, usize) -> Option<(EventLabel, String)>) -> String {
    let a = &res.arena;
    let (l, e) = (&a.universal()[0], &a.existential()[0]);
    let triple = |v: usize| {
        let n = a.node(v);
        format!(
            "{} {} : {}",
            l.state_name(n.ustates[0]),
            e.state_name(n.estates[0]),
            a.store.to_formula(n.fid)
        )
    };
    let mut s = String::from("init.\n");
    let triples: Vec<String> = nodes.iter().map(|&v| triple(v)).collect();
    s.push_str(&format!("invariant {{ {} }}.\n", triples.join(", ")));
    for &v in nodes {
        let moves = a.moves(v);
        let mut replies = Vec::new();
        for (k, mv) in moves.iter().enumerate() {
            let (e1, t1) = &mv.steps[0];
            let Some((e2, t2)) = reply(v, k) else { return s + "qed" };
            replies.push(format!("{e1} {} -> {e2} {t2}", l.state_name(*t1)));
        }
        if replies.is_empty() {
            s.push_str("step.\n");
        } else {
            s.push_str(&format!("step ({}).\n", replies.join(", ")));
        }
        for _ in moves {
            s.push_str("deriv. cycle.\n");
        }
    }
    s + "qed"
}

fn run(q: &HyperQuery, src: &str) -> ProofResult {
    let tactics = parse_script(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    run_script(&mut lts_kernel(q), &tactics)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_strategies_replay_in_the_kernel(seed in any::<u64>()) {
        let q = pair_query(&mut rng(seed));
        let res = check_hyper(&q, &Caps::default()).unwrap();
        if !res.is_proved() {
            return Ok(());
        }
        let a = &res.arena;
        let e = &a.existential()[0];
        let nodes: Vec<usize> = reachable(a).into_iter().filter(|&v| res.region.winning[v]).collect();
        let src = script(&res, &nodes, |v, k| {
            let (e2, t2) = &res.region.strategy.reply(a, v, k).unwrap().steps[0];
            Some((e2.clone(), e.state_name(*t2).to_string()))
        });
        let out = run(&q, &src);
        prop_assert!(out.is_closed(), "{}\n{}", src, out.report());
    }

    #[test]
    fn closed_scripts_only_use_winning_triples(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = pair_query(&mut r);
        let res = check_hyper(&q, &Caps::default()).unwrap();
        let a = &res.arena;
        let Some(root) = a.root() else { return Ok(()) };
        let mut nodes: Vec<usize> = reachable(a).into_iter().filter(|&v| v != root && r.gen_bool(0.7)).collect();
        nodes.shuffle(&mut r);
        nodes.insert(0, root);
        let e = a.existential()[0].clone();
        let src = script(&res, &nodes, |v, _| {
            let moves = e.obs_successors(a.node(v).estates[0]).unwrap();
            let (e2, t2) = moves.choose(&mut r)?;
            Some((e2.clone(), e.state_name(*t2).to_string()))
        });
        let out = run(&q, &src);
        if out.is_closed() {
            prop_assert!(res.is_proved());
            for &v in &nodes {
                prop_assert!(res.region.winning[v], "closed with losing triple {}\n{}", a.describe(v), src);
            }
        }
    }
}
