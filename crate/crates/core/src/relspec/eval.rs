//! Membership of lasso tuples in formulas.
//!
//! Two independent procedures: a direct evaluation of the modal semantics on
//! the finite window of an aligned lasso tuple, and a run of the derivative
//! automaton.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lasso::Lasso;
use crate::lts::EventLabel;
use crate::relspec::atoms::AtomTable;
use crate::relspec::closure::{ClosureGraph, DEFAULT_CLOSURE_CAP};
use crate::relspec::formula::Formula;
use crate::relspec::store::FormulaStore;

/// A lasso tuple unrolled to a common prefix length and cycle length.
#[derive(Clone, Debug)]
pub struct Aligned {
    pub prefix: usize,
    pub cycle: usize,
    pub letters: Vec<Vec<EventLabel>>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Aligned {
    pub fn new(lassos: &[Lasso]) -> Result<Self> {
        if lassos.is_empty() {
            return Err(Error::input("an empty lasso tuple has no positions"));
        }
        let prefix = lassos.iter().map(|l| l.prefix().len()).max().unwrap();
        let mut cycle = 1usize;
        for l in lassos {
            let c = l.cycle().len();
            cycle = cycle / gcd(cycle, c) * c;
            if cycle > 1 << 20 {
                return Err(Error::input("lasso cycles are too long to align"));
            }
        }
        let letters = (0..prefix + cycle).map(|i| lassos.iter().map(|l| l.at(i).clone()).collect()).collect();
        Ok(Aligned { prefix, cycle, letters })
    }

    pub fn width(&self) -> usize {
        self.prefix + self.cycle
    }

    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.width() {
            i + 1
        } else {
            self.prefix
        }
    }
}

/// Direct evaluation of the modal semantics.
pub fn lasso_models_direct(lassos: &[Lasso], f: &Formula, atoms: &AtomTable) -> Result<bool> {
    f.check_atoms(atoms, lassos.len())?;
    let al = Aligned::new(lassos)?;
    Ok(sat(f, &al, atoms)?[0])
}

fn sat(f: &Formula, al: &Aligned, atoms: &AtomTable) -> Result<Vec<bool>> {
    let w = al.width();
    Ok(match f {
        Formula::True => vec![true; w],
        Formula::False => vec![false; w],
        Formula::Atom(a) => {
            let mut v = Vec::with_capacity(w);
            for t in &al.letters {
                v.push(atoms.eval_atom(a, t)?);
            }
            v
        }
        Formula::And(cs) => {
            let mut v = vec![true; w];
            for c in cs {
                let s = sat(c, al, atoms)?;
                v.iter_mut().zip(s).for_each(|(x, y)| *x &= y);
            }
            v
        }
        Formula::Or(cs) => {
            let mut v = vec![false; w];
            for c in cs {
                let s = sat(c, al, atoms)?;
                v.iter_mut().zip(s).for_each(|(x, y)| *x |= y);
            }
            v
        }
        Formula::Next(a) => {
            let s = sat(a, al, atoms)?;
            (0..w).map(|i| s[al.next(i)]).collect()
        }
        Formula::Always(a) => {
            // for all j >= i
            let s = sat(a, al, atoms)?;
            let cycle_ok = s[al.prefix..].iter().all(|&b| b);
            (0..w).map(|i| cycle_ok && s[i.min(al.prefix)..al.prefix].iter().all(|&b| b)).collect()
        }
        Formula::WeakUntil(a, b) => {
            let sa = sat(a, al, atoms)?;
            let sb = sat(b, al, atoms)?;
            (0..w)
                .map(|i| {
                    // walk i, i+1, ... through every reachable position once
                    let mut j = i;
                    for _ in 0..w {
                        if sb[j] {
                            return true;
                        }
                        if !sa[j] {
                            return false;
                        }
                        j = al.next(j);
                    }
                    true
                })
                .collect()
        }
    })
}

/// Membership via the derivative automaton: accepts iff every derivative
/// visited along the tuple is nonempty over the letters of the tuple.
pub fn lasso_models_derivative(lassos: &[Lasso], f: &Formula, atoms: &AtomTable) -> Result<bool> {
    f.check_atoms(atoms, lassos.len())?;
    let al = Aligned::new(lassos)?;
    let alphabets: Vec<Vec<EventLabel>> = lassos.iter().map(Lasso::letters).collect();
    let mut store = FormulaStore::new();
    let root = store.intern(f);
    let g = ClosureGraph::build(&mut store, root, &alphabets, atoms, DEFAULT_CLOSURE_CAP)?;
    let mut seen = HashSet::new();
    let (mut i, mut node) = (0usize, root);
    loop {
        if !g.nonempty(node) {
            return Ok(false);
        }
        if !seen.insert((i, node)) {
            return Ok(true);
        }
        node = g.step(node, &al.letters[i]).expect("letters belong to their own alphabets");
        i = al.next(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms() -> AtomTable {
        AtomTable::parse(
            "atom a1(e1, e2) := e1 is a; atom a2(e1, e2) := e2 is a; atom b2(e1, e2) := e2 is b;
             atom ab(e1, e2) := (e1 is a and e2 is b) or (e1 is b and e2 is a);",
        )
        .unwrap()
    }

    fn tup(xs: &[&str]) -> Vec<Lasso> {
        xs.iter().map(|s| Lasso::parse(s).unwrap()).collect()
    }

    fn both(g: &[Lasso], f: &str) -> bool {
        let f = Formula::parse(f).unwrap();
        let d = lasso_models_direct(g, &f, &atoms()).unwrap();
        let r = lasso_models_derivative(g, &f, &atoms()).unwrap();
        assert_eq!(d, r, "evaluators disagree on {f}");
        d
    }

    #[test]
    fn examples() {
        assert!(both(&tup(&["a^w", "b^w"]), "always ab"));
        assert!(both(&tup(&["a^w", "a b^w"]), "(a1 and a2) weakuntil b2"));
        assert!(both(&tup(&["a^w", "a^w"]), "(a1 and a2) weakuntil b2"));
        assert!(!both(&tup(&["a x^w", "b x^w"]), "always eq"));
        assert!(!both(&tup(&["a^w", "b^w"]), "false"));
        assert!(!both(&tup(&["b a^w", "a^w"]), "(a1 and a2) weakuntil b2"));
        assert!(both(&tup(&["(a b)^w", "(a a b)^w"]), "next a2 or b2"));
    }
}
