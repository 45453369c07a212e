//! Side conditions over symbolic values.
//!
//! Equalities among the assumptions that can be solved for a symbol are used
//! as substitutions first. Whatever remains is decided by linear
//! normalization when possible, and otherwise by enumerating every
//! assignment of the remaining symbols within a budget.

use crate::kernel::sym::{Assignment, Constraint, LinExpr, Sym, Symbols};

pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Decided by normalizing linear terms.
    Linear,
    /// No symbols were left to enumerate.
    Ground,
    /// Every one of this many assignments was checked.
    Enumeration(usize),
    /// The assumptions are contradictory.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proven { method: Method },
    Unproven { counterexample: Option<Assignment>, reason: String },
}

impl Outcome {
    pub fn is_proven(&self) -> bool {
        matches!(self, Outcome::Proven { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Discharger {
    pub modulus: i64,
    pub budget: usize,
}

struct Solved {
    subst: Vec<(Sym, LinExpr)>,
    rest: Vec<Constraint>,
    contradiction: bool,
}

fn conjuncts(c: &Constraint, out: &mut Vec<Constraint>) {
    match c {
        Constraint::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        Constraint::True => {}
        _ => out.push(c.clone()),
    }
}

fn inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1, mut t0, mut t1) = (m, a.rem_euclid(m), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m))
}

impl Discharger {
    pub fn new(modulus: i64) -> Self {
        Discharger { modulus, budget: DEFAULT_BUDGET }
    }

    fn solve(&self, syms: &Symbols, assumptions: &[Constraint]) -> Solved {
        let m = self.modulus;
        let mut pending = Vec::new();
        for a in assumptions {
            conjuncts(a, &mut pending);
        }
        let mut subst: Vec<(Sym, LinExpr)> = Vec::new();
        let mut rest: Vec<Constraint> = Vec::new();
        for c in pending {
            let c = subst.iter().fold(c, |c, (s, e)| c.substitute(*s, e, m)).simplify(m);
            match &c {
                Constraint::True => continue,
                Constraint::False => return Solved { subst, rest, contradiction: true },
                Constraint::Cmp(a, crate::imp::ast::Rel::Eq, b) => {
                    let d = a.sub(b, m);
                    let pick = d
                        .terms()
                        .iter()
                        .rev()
                        .find(|&&(s, k)| syms.range(s).is_none() && inverse(k, m).is_some())
                        .copied();
                    if let Some((s, k)) = pick {
                        let others = d.substitute(s, &LinExpr::default(), m);
                        let e = others.scale(-inverse(k, m).unwrap(), m);
                        for (_, prev) in subst.iter_mut() {
                            *prev = prev.substitute(s, &e, m);
                        }
                        rest = rest.into_iter().map(|r| r.substitute(s, &e, m).simplify(m)).collect();
                        if rest.contains(&Constraint::False) {
                            return Solved { subst, rest, contradiction: true };
                        }
                        rest.retain(|r| *r != Constraint::True);
                        subst.push((s, e));
                        continue;
                    }
                    rest.push(c);
                }
                _ => rest.push(c),
            }
        }
        Solved { subst, rest, contradiction: false }
    }

    /// Whether `goal` holds for every assignment satisfying `assumptions`.
    pub fn prove(&self, syms: &Symbols, assumptions: &[Constraint], goal: &Constraint) -> Outcome {
        let m = self.modulus;
        let solved = self.solve(syms, assumptions);
        if solved.contradiction {
            return Outcome::Proven { method: Method::Vacuous };
        }
        let g = solved.subst.iter().fold(goal.clone(), |g, (s, e)| g.substitute(*s, e, m)).simplify(m);
        if g == Constraint::True {
            return Outcome::Proven { method: Method::Linear };
        }
        let mut relevant = Vec::new();
        goal.syms(&mut relevant);
        self.enumerate(syms, &solved, &relevant, |a| goal.eval(a, m))
    }

    /// Runs `check` on every assignment of the symbols in `relevant` (and the
    /// symbols they are constrained by) that satisfies `assumptions`.
    pub fn forall(
        &self,
        syms: &Symbols,
        assumptions: &[Constraint],
        relevant: &[Sym],
        check: impl FnMut(&Assignment) -> bool,
    ) -> Outcome {
        let solved = self.solve(syms, assumptions);
        if solved.contradiction {
            return Outcome::Proven { method: Method::Vacuous };
        }
        self.enumerate(syms, &solved, relevant, check)
    }

    fn enumerate(
        &self,
        syms: &Symbols,
        solved: &Solved,
        relevant: &[Sym],
        mut check: impl FnMut(&Assignment) -> bool,
    ) -> Outcome {
        let m = self.modulus;
        let mut free: Vec<Sym> = Vec::new();
        for &s in relevant {
            match solved.subst.iter().find(|(t, _)| *t == s) {
                Some((_, e)) => free.extend(e.syms()),
                None => free.push(s),
            }
        }
        free.sort_unstable();
        free.dedup();
        let mut used = vec![false; solved.rest.len()];
        loop {
            let mut grew = false;
            for (i, c) in solved.rest.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let mut cs = Vec::new();
                c.syms(&mut cs);
                if cs.iter().any(|s| free.contains(s)) {
                    used[i] = true;
                    free.extend(cs);
                    free.sort_unstable();
                    free.dedup();
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let rest: Vec<&Constraint> = solved.rest.iter().zip(&used).filter(|(_, u)| **u).map(|(c, _)| c).collect();
        let domains: Vec<Vec<i64>> = free
            .iter()
            .map(|&s| syms.range(s).map_or_else(|| (0..m).collect(), |r| r.to_vec()))
            .collect();
        let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()).filter(|&n| n <= self.budget));
        let Some(total) = total else {
            return Outcome::Unproven {
                counterexample: None,
                reason: format!("enumeration budget of {} assignments exceeded", self.budget),
            };
        };
        let derived: Vec<&(Sym, LinExpr)> = solved.subst.iter().filter(|(s, _)| relevant.contains(s)).collect();
        let mut idx = vec![0usize; free.len()];
        for _ in 0..total {
            let mut a: Assignment = free.iter().zip(&idx).zip(&domains).map(|((&s, &i), d)| (s, d[i])).collect();
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if !rest.iter().all(|c| c.eval(&a, m)) {
                continue;
            }
            for (s, e) in &derived {
                let v = e.eval(&a, m);
                a.insert(*s, v);
            }
            if !check(&a) {
                // The other constraints share no symbol with `a`, so they only
                // matter through their own satisfiability.
                let others: Vec<&Constraint> = solved.rest.iter().zip(&used).filter(|(_, u)| !**u).map(|(c, _)| c).collect();
                return match self.satisfiable(syms, &others) {
                    Some(true) => Outcome::Unproven { counterexample: Some(a), reason: "refuted".into() },
                    Some(false) => Outcome::Proven { method: Method::Vacuous },
                    None => Outcome::Unproven {
                        counterexample: None,
                        reason: format!("enumeration budget of {} assignments exceeded", self.budget),
                    },
                };
            }
        }
        Outcome::Proven { method: if free.is_empty() { Method::Ground } else { Method::Enumeration(total) } }
    }

    /// Whether some assignment satisfies every constraint; `None` when the
    /// search exceeds the budget.
    fn satisfiable(&self, syms: &Symbols, cs: &[&Constraint]) -> Option<bool> {
        let m = self.modulus;
        let mut vars = Vec::new();
        for c in cs {
            c.syms(&mut vars);
        }
        vars.sort_unstable();
        vars.dedup();
        let domains: Vec<Vec<i64>> =
            vars.iter().map(|&s| syms.range(s).map_or_else(|| (0..m).collect(), |r| r.to_vec())).collect();
        let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()).filter(|&n| n <= self.budget))?;
        let mut idx = vec![0usize; vars.len()];
        for _ in 0..total {
            let a: Assignment = vars.iter().zip(&idx).zip(&domains).map(|((&s, &i), d)| (s, d[i])).collect();
            if cs.iter().all(|c| c.eval(&a, m)) {
                return Some(true);
            }
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Some(false)
    }
}
