//! Derivative closure of a formula over a finite alphabet product.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Resource, Result};
use crate::lts::EventLabel;
use crate::relspec::atoms::AtomTable;
use crate::relspec::store::{FormulaId, FormulaStore};

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;
const MAX_TUPLES: usize = 1 << 22;

/// The finite automaton of derivatives reachable from a root formula.
///
/// Event tuples are grouped into classes by the truth values they give to the
/// root's atoms; every edge of the graph is labeled by a class. Nodes are kept
/// in the store's normal form; the root also answers to the id it was built from.
#[derive(Clone, Debug)]
pub struct ClosureGraph {
    alphabets: Vec<Vec<EventLabel>>,
    tuple_class: Vec<u32>,
    class_repr: Vec<usize>,
    nodes: Vec<FormulaId>,
    node_of: HashMap<FormulaId, u32>,
    succ: Vec<Vec<u32>>,
    nonempty: Vec<bool>,
    root: u32,
}

impl ClosureGraph {
    pub fn build(
        store: &mut FormulaStore,
        root: FormulaId,
        alphabets: &[Vec<EventLabel>],
        atoms: &AtomTable,
        cap: usize,
    ) -> Result<Self> {
        let atom_names: Vec<Arc<str>> = store.atoms_of(root);
        if atom_names.len() > 64 {
            return Err(Error::input("formulas may mention at most 64 distinct atoms"));
        }
        let total = alphabets.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()).filter(|&n| n <= MAX_TUPLES));
        let total = total.ok_or_else(|| Error::Resource {
            resource: Resource::Enumeration,
            cap: MAX_TUPLES,
            detail: "event tuple product is too large".into(),
        })?;

        let mut tuple_class = Vec::with_capacity(total);
        let mut class_repr = Vec::new();
        let mut class_vals: Vec<u64> = Vec::new();
        let mut class_of: HashMap<u64, u32> = HashMap::new();
        let mut tuple = Vec::with_capacity(alphabets.len());
        for t in 0..total {
            decode(alphabets, t, &mut tuple);
            let mut bits = 0u64;
            for (k, a) in atom_names.iter().enumerate() {
                if atoms.eval_atom(a, &tuple)? {
                    bits |= 1 << k;
                }
            }
            let c = *class_of.entry(bits).or_insert_with(|| {
                class_repr.push(t);
                class_vals.push(bits);
                (class_vals.len() - 1) as u32
            });
            tuple_class.push(c);
        }

        let entry = root;
        let root = store.normalize(root);
        let mut g = ClosureGraph {
            alphabets: alphabets.to_vec(),
            tuple_class,
            class_repr,
            nodes: vec![root],
            node_of: HashMap::from([(root, 0), (entry, 0)]),
            succ: Vec::new(),
            nonempty: Vec::new(),
            root: 0,
        };
        let mut at = 0;
        while at < g.nodes.len() {
            let f = g.nodes[at];
            let mut row = Vec::with_capacity(class_vals.len());
            for &bits in &class_vals {
                let d = store.derive_by(f, &mut |a| {
                    atom_names.iter().position(|n| &**n == a).is_some_and(|k| bits & (1 << k) != 0)
                });
                let d = store.normalize(d);
                let next = match g.node_of.get(&d) {
                    Some(&n) => n,
                    None => {
                        if g.nodes.len() >= cap {
                            return Err(Error::Resource {
                                resource: Resource::ClosureNodes,
                                cap,
                                detail: format!("last formula added: {}", store.to_formula(d)),
                            });
                        }
                        let n = g.nodes.len() as u32;
                        g.nodes.push(d);
                        g.node_of.insert(d, n);
                        n
                    }
                };
                row.push(next);
            }
            g.succ.push(row);
            at += 1;
        }
        g.nonempty = g.compute_nonempty();
        Ok(g)
    }

    fn compute_nonempty(&self) -> Vec<bool> {
        let mut alive: Vec<bool> = self.nodes.iter().map(|&f| f != FormulaId::FALSE).collect();
        loop {
            let mut changed = false;
            for n in 0..self.nodes.len() {
                if alive[n] && !self.succ[n].iter().any(|&m| alive[m as usize]) {
                    alive[n] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    pub fn root(&self) -> FormulaId {
        self.nodes[self.root as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[FormulaId] {
        &self.nodes
    }

    pub fn alphabets(&self) -> &[Vec<EventLabel>] {
        &self.alphabets
    }

    pub fn num_classes(&self) -> usize {
        self.class_repr.len()
    }

    pub fn num_tuples(&self) -> usize {
        self.tuple_class.len()
    }

    pub fn contains(&self, f: FormulaId) -> bool {
        self.node_of.contains_key(&f)
    }

    /// A representative event tuple of a class.
    pub fn class_representative(&self, class: usize) -> Vec<EventLabel> {
        let mut t = Vec::new();
        decode(&self.alphabets, self.class_repr[class], &mut t);
        t
    }

    /// Mixed-radix index of an event tuple, if every event is in its alphabet.
    pub fn tuple_index(&self, events: &[EventLabel]) -> Option<usize> {
        if events.len() != self.alphabets.len() {
            return None;
        }
        let mut idx = 0usize;
        for (a, e) in self.alphabets.iter().zip(events) {
            let k = a.iter().position(|x| x == e)?;
            idx = idx * a.len() + k;
        }
        Some(idx)
    }

    pub fn class_of_index(&self, tuple: usize) -> usize {
        self.tuple_class[tuple] as usize
    }

    pub fn class_of(&self, events: &[EventLabel]) -> Option<usize> {
        self.tuple_index(events).map(|t| self.class_of_index(t))
    }

    /// Derivative of a closure member by a tuple class.
    pub fn step_class(&self, f: FormulaId, class: usize) -> Option<FormulaId> {
        let n = *self.node_of.get(&f)?;
        Some(self.nodes[self.succ[n as usize][class] as usize])
    }

    /// Derivative of a closure member by an event tuple over the alphabets.
    pub fn step(&self, f: FormulaId, events: &[EventLabel]) -> Option<FormulaId> {
        self.step_class(f, self.class_of(events)?)
    }

    /// Whether some infinite tuple of words over the alphabets satisfies `f`.
    /// Formulas outside the closure report `false`.
    pub fn nonempty(&self, f: FormulaId) -> bool {
        self.node_of.get(&f).is_some_and(|&n| self.nonempty[n as usize])
    }
}

impl ClosureGraph {
    /// Whether every word tuple satisfying `a` (a node of `self`) satisfies
    /// `b` (a node of `other`). Explores pairs of derivatives and fails when
    /// some prefix keeps `a` nonempty but empties `b`. Both graphs must share
    /// their alphabets.
    pub fn included_in(&self, a: FormulaId, other: &ClosureGraph, b: FormulaId) -> Result<bool> {
        if self.alphabets != other.alphabets {
            return Err(Error::input("inclusion needs closures over the same alphabets"));
        }
        let (Some(&na), Some(&nb)) = (self.node_of.get(&a), other.node_of.get(&b)) else {
            return Err(Error::input("inclusion needs formulas inside their closures"));
        };
        let mut joint: Vec<(u32, u32)> = self.tuple_class.iter().copied().zip(other.tuple_class.iter().copied()).collect();
        joint.sort_unstable();
        joint.dedup();
        let mut seen = std::collections::HashSet::from([(na, nb)]);
        let mut stack = vec![(na, nb)];
        while let Some((x, y)) = stack.pop() {
            if !self.nonempty[x as usize] {
                continue;
            }
            if !other.nonempty[y as usize] {
                return Ok(false);
            }
            for &(cx, cy) in &joint {
                let next = (self.succ[x as usize][cx as usize], other.succ[y as usize][cy as usize]);
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        Ok(true)
    }
}

pub(crate) fn decode(alphabets: &[Vec<EventLabel>], mut t: usize, out: &mut Vec<EventLabel>) {
    out.clear();
    out.resize(alphabets.len(), EventLabel::In(0));
    for (i, a) in alphabets.iter().enumerate().rev() {
        out[i] = a[t % a.len()].clone();
        t /= a.len();
    }
}

/// Calls `f` on every tuple of the alphabet product in index order.
pub fn for_each_tuple(alphabets: &[Vec<EventLabel>], mut f: impl FnMut(&[EventLabel])) {
    let total: usize = alphabets.iter().map(Vec::len).product();
    let mut t = Vec::new();
    for i in 0..total {
        decode(alphabets, i, &mut t);
        f(&t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relspec::formula::Formula;

    fn syms(xs: &[&str]) -> Vec<EventLabel> {
        xs.iter().map(|x| EventLabel::sym(x)).collect()
    }

    #[test]
    fn example_closure_is_small() {
        let atoms = AtomTable::parse(
            "atom a1(e1, e2) := e1 is a; atom a2(e1, e2) := e2 is a; atom b2(e1, e2) := e2 is b;",
        )
        .unwrap();
        let mut s = FormulaStore::new();
        let f = s.intern(&Formula::parse("(a1 and a2) weakuntil b2").unwrap());
        let g = ClosureGraph::build(&mut s, f, &[syms(&["a", "b"]), syms(&["a", "b"])], &atoms, 100).unwrap();
        let mut members: Vec<FormulaId> = g.nodes().to_vec();
        members.sort();
        assert_eq!(members, vec![FormulaId::TRUE, FormulaId::FALSE, f]);
        assert!(g.nonempty(f));
        assert!(g.nonempty(FormulaId::TRUE));
        assert!(!g.nonempty(FormulaId::FALSE));
    }

    #[test]
    fn double_closure() {
        let atoms = AtomTable::parse("atom double(e1, e2) := (e1 is out(x)) implies (e2 == out(2*x));").unwrap();
        let ev: Vec<EventLabel> = vec![EventLabel::In(0), EventLabel::In(1), EventLabel::Out(0), EventLabel::Out(1)];
        let mut s = FormulaStore::new();
        let f = s.intern(&Formula::parse("always double").unwrap());
        let g = ClosureGraph::build(&mut s, f, &[ev.clone(), ev], &atoms, 100).unwrap();
        let mut members: Vec<FormulaId> = g.nodes().to_vec();
        members.sort();
        assert_eq!(members, vec![FormulaId::FALSE, f]);
    }

    #[test]
    fn contradictory_atoms_are_empty() {
        let atoms = AtomTable::parse("atom o1(e) := e is out(1); atom o2(e) := e is out(2);").unwrap();
        let mut s = FormulaStore::new();
        let f = s.intern(&Formula::parse("o1 and o2").unwrap());
        let g = ClosureGraph::build(&mut s, f, &[vec![EventLabel::Out(1), EventLabel::Out(2)]], &atoms, 100).unwrap();
        assert!(!g.nonempty(f));
    }

    #[test]
    fn cap_is_enforced() {
        let atoms = AtomTable::parse("atom p(e) := e is a;").unwrap();
        let mut s = FormulaStore::new();
        let f = s.intern(&Formula::parse("next next next p").unwrap());
        let err = ClosureGraph::build(&mut s, f, &[syms(&["a", "b"])], &atoms, 2).unwrap_err();
        assert!(matches!(err, Error::Resource { resource: Resource::ClosureNodes, cap: 2, .. }));
    }

    #[test]
    fn nested_weak_until_stays_finite() {
        let atoms = AtomTable::parse("atom p(e) := e is a;").unwrap();
        let mut s = FormulaStore::new();
        let f = s.intern(&Formula::parse("always (p weakuntil p) weakuntil always next p").unwrap());
        let g = ClosureGraph::build(&mut s, f, &[syms(&["a", "b"])], &atoms, 50).unwrap();
        assert!(g.len() < 10);
        assert!(g.nonempty(f));
        let b = syms(&["b"]);
        let once = g.step(f, &b).unwrap();
        assert!(g.nonempty(once));
        assert_eq!(g.step(once, &b), Some(FormulaId::FALSE));
    }

    #[test]
    fn inclusion() {
        let atoms = AtomTable::parse(
            "atom a1(e1, e2) := e1 is a; atom a2(e1, e2) := e2 is a; atom b2(e1, e2) := e2 is b;",
        )
        .unwrap();
        let alphabets = vec![syms(&["a", "b"]), syms(&["a", "b"])];
        let mut store = FormulaStore::new();
        let mut graph = |f: &str| {
            let id = store.intern(&Formula::parse(f).unwrap());
            (id, ClosureGraph::build(&mut store, id, &alphabets, &atoms, 100).unwrap())
        };
        let (strong, gs) = graph("always (a1 and a2)");
        let (weak, gw) = graph("(a1 and a2) weakuntil b2");
        let (fls, gf) = graph("false");
        assert!(gs.included_in(strong, &gw, weak).unwrap());
        assert!(!gw.included_in(weak, &gs, strong).unwrap());
        assert!(gw.included_in(weak, &gw, weak).unwrap());
        assert!(gf.included_in(fls, &gs, strong).unwrap());
    }
}
