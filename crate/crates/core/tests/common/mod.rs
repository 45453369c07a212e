#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use hyperprove::relspec::{AtomTable, Formula};
use hyperprove::solver::HyperQuery;
use hyperprove::{EventLabel, Lasso, Lts, StateId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYMS: [&str; 3] = ["a", "b", "c"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn events(n: usize) -> Vec<EventLabel> {
    SYMS[..n].iter().map(|s| EventLabel::sym(s)).collect()
}

/// A random LTS with up to `max_states` states over the first `syms` symbols.
/// Every symbol is declared even if no edge carries it.
pub fn random_lts(r: &mut ChaCha8Rng, name: &str, max_states: usize, syms: usize) -> Lts {
    let n = r.gen_range(1..=max_states);
    let evs = events(syms);
    let mut b = Lts::builder(name);
    let ids: Vec<StateId> = (0..n).map(|i| b.state(&format!("s{i}"))).collect();
    b.init(ids[0]);
    for e in &evs {
        b.event(e.clone());
    }
    for &s in &ids {
        let out = if r.gen_bool(0.15) { 0 } else { r.gen_range(1..=3) };
        for _ in 0..out {
            let e = evs.choose(r).unwrap().clone();
            b.labeled(s, e, *ids.choose(r).unwrap());
        }
        if r.gen_bool(0.25) {
            b.silent(s, *ids.choose(r).unwrap());
        }
    }
    b.build().expect("generated LTS is well formed")
}

/// `p` and `q` look at single components, `r` compares the first and last.
pub fn atoms(arity: usize) -> AtomTable {
    let ps: Vec<String> = (1..=arity).map(|i| format!("e{i}")).collect();
    let params = ps.join(", ");
    let last = &ps[arity - 1];
    AtomTable::parse(&format!(
        "atom p({params}) := e1 is a;
         atom q({params}) := {last} is b;
         atom r({params}) := e1 == {last};"
    ))
    .unwrap()
}

pub fn random_formula(r: &mut ChaCha8Rng, depth: usize, names: &[&str]) -> Formula {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(names.choose(r).unwrap()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..6) {
        0 => Formula::and(random_formula(r, d, names), random_formula(r, d, names)),
        1 => Formula::or(random_formula(r, d, names), random_formula(r, d, names)),
        2 => Formula::weak_until(random_formula(r, d, names), random_formula(r, d, names)),
        3 | 4 => Formula::always(random_formula(r, d, names)),
        _ => Formula::next(random_formula(r, d, names)),
    }
}

/// A random query with one or two universal and one or two existential
/// systems (at most three in total), LTSs of at most five states over
/// `syms` symbols and a formula of depth at most three, often under `always`.
pub fn random_query(r: &mut ChaCha8Rng, syms: usize) -> HyperQuery {
    let m = r.gen_range(1..=2);
    let n = if m == 2 { 1 } else { r.gen_range(1..=2) };
    let universal = (0..m).map(|i| random_lts(r, &format!("U{i}"), 5, syms)).collect();
    let existential = (0..n).map(|i| random_lts(r, &format!("E{i}"), 5, syms)).collect();
    let names = atom_names(r);
    let mut f = random_formula(r, 3, &names);
    if r.gen_bool(0.5) && f.depth() < 3 {
        f = Formula::always(f);
    }
    HyperQuery::new(universal, existential, f, atoms(m + n))
}

/// Up to two of the three atoms.
pub fn atom_names(r: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut all = vec!["p", "q", "r"];
    all.shuffle(r);
    all.truncate(r.gen_range(1..=2));
    all
}

pub fn random_lasso(r: &mut ChaCha8Rng, alphabet: &[EventLabel], max_prefix: usize, max_cycle: usize) -> Lasso {
    let p = r.gen_range(0..=max_prefix);
    let c = r.gen_range(1..=max_cycle);
    let pick = |r: &mut ChaCha8Rng| alphabet.choose(r).unwrap().clone();
    let prefix = (0..p).map(|_| pick(r)).collect();
    let cycle = (0..c).map(|_| pick(r)).collect();
    Lasso::new(prefix, cycle).unwrap()
}

/// `(e, t)` such that a silent path from `s` followed by one `e`-edge reaches `t`.
pub fn naive_obs(l: &Lts, s: StateId) -> BTreeSet<(EventLabel, StateId)> {
    let mut seen = BTreeSet::from([s]);
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for t in l.transitions() {
            if t.src == x && t.label.is_none() && seen.insert(t.dst) {
                q.push_back(t.dst);
            }
        }
    }
    l.transitions()
        .iter()
        .filter(|t| seen.contains(&t.src))
        .filter_map(|t| t.label.clone().map(|e| (e, t.dst)))
        .collect()
}

/// Naive evaluation of `f` on the infinite words of `ls`, by unfolding the
/// semantics position by position on the aligned lasso.
pub fn naive_models(ls: &[Lasso], f: &Formula, atoms: &AtomTable) -> bool {
    let pre = ls.iter().map(|l| l.prefix().len()).max().unwrap();
    let per = ls.iter().map(|l| l.cycle().len()).fold(1, lcm);
    let width = pre + per;
    let next = |i: usize| if i + 1 < width { i + 1 } else { pre };
    let letter = |i: usize| -> Vec<EventLabel> { ls.iter().map(|l| l.at(i).clone()).collect() };
    fn go(
        f: &Formula,
        width: usize,
        next: &dyn Fn(usize) -> usize,
        letter: &dyn Fn(usize) -> Vec<EventLabel>,
        atoms: &AtomTable,
    ) -> Vec<bool> {
        match f {
            Formula::True => vec![true; width],
            Formula::False => vec![false; width],
            Formula::Atom(a) => (0..width).map(|i| atoms.eval_atom(a, &letter(i)).unwrap()).collect(),
            Formula::And(cs) => {
                let vs: Vec<Vec<bool>> = cs.iter().map(|c| go(c, width, next, letter, atoms)).collect();
                (0..width).map(|i| vs.iter().all(|v| v[i])).collect()
            }
            Formula::Or(cs) => {
                let vs: Vec<Vec<bool>> = cs.iter().map(|c| go(c, width, next, letter, atoms)).collect();
                (0..width).map(|i| vs.iter().any(|v| v[i])).collect()
            }
            Formula::Next(a) => {
                let v = go(a, width, next, letter, atoms);
                (0..width).map(|i| v[next(i)]).collect()
            }
            Formula::Always(a) => {
                let v = go(a, width, next, letter, atoms);
                (0..width).map(|i| walk(i, width, next).all(|j| v[j])).collect()
            }
            Formula::WeakUntil(a, b) => {
                let va = go(a, width, next, letter, atoms);
                let vb = go(b, width, next, letter, atoms);
                (0..width)
                    .map(|i| {
                        for j in walk(i, width, next) {
                            if vb[j] {
                                return true;
                            }
                            if !va[j] {
                                return false;
                            }
                        }
                        true
                    })
                    .collect()
            }
        }
    }
    go(f, width, &next, &letter, atoms)[0]
}

/// Every position reachable from `i`, each once, in order.
fn walk(i: usize, width: usize, next: &dyn Fn(usize) -> usize) -> impl Iterator<Item = usize> {
    let mut seen = vec![false; width];
    let mut out = Vec::new();
    let mut j = i;
    while !seen[j] {
        seen[j] = true;
        out.push(j);
        j = next(j);
    }
    out.into_iter()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// All lassos over `alphabet` with prefix plus cycle length at most `max_len`.
pub fn all_lassos(alphabet: &[EventLabel], max_len: usize) -> Vec<Lasso> {
    let mut out = BTreeSet::new();
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            let word: Vec<EventLabel> = idx.iter().map(|&i| alphabet[i].clone()).collect();
            for split in 0..len {
                out.insert(Lasso::new(word[..split].to_vec(), word[split..].to_vec()).unwrap());
            }
            let mut k = 0;
            while k < len {
                idx[k] += 1;
                if idx[k] < alphabet.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// Naive greatest fixed point on an arena: repeatedly drops nodes with a
/// universal move whose replies all leave the current set.
pub fn naive_gfp(arena: &hyperprove::solver::Arena) -> Vec<bool> {
    let mut alive = vec![true; arena.len()];
    loop {
        let next: Vec<bool> = (0..arena.len())
            .map(|v| alive[v] && arena.moves(v).iter().all(|mv| mv.replies.iter().any(|r| alive[r.target])))
            .collect();
        if next == alive {
            return alive;
        }
        alive = next;
    }
}

/// Whether `run` is a run of `l`, checked against [`naive_obs`].
pub fn naive_is_run(l: &Lts, run: &hyperprove::RunLasso) -> bool {
    let mut here = l.init();
    if run.start != here || run.cycle.is_empty() {
        return false;
    }
    for (e, s) in run.prefix.iter().chain(&run.cycle) {
        if !naive_obs(l, here).contains(&(e.clone(), *s)) {
            return false;
        }
        here = *s;
    }
    let loop_start = match run.prefix.last() {
        Some((_, s)) => *s,
        None => run.start,
    };
    here == loop_start
}

/// Every tuple of runs, one per system, with total length at most `budget`.
pub fn run_tuples(ls: &[Lts], budget: usize) -> Vec<Vec<hyperprove::RunLasso>> {
    let mut out = vec![(Vec::new(), 0usize)];
    for l in ls {
        let runs = l.enumerate_runs(l.init(), budget).unwrap();
        let mut next = Vec::new();
        for (tuple, used) in &out {
            for run in &runs {
                let len = run.prefix.len() + run.cycle.len();
                if used + len <= budget {
                    let mut t: Vec<hyperprove::RunLasso> = tuple.clone();
                    t.push(run.clone());
                    next.push((t, used + len));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(t, _)| t).collect()
}
