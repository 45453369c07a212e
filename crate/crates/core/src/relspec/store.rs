//! Hash-consed formula store with canonicalizing constructors and derivatives.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::lts::EventLabel;
use crate::relspec::atoms::AtomTable;
use crate::relspec::formula::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaId(pub u32);

impl FormulaId {
    pub const TRUE: FormulaId = FormulaId(0);
    pub const FALSE: FormulaId = FormulaId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Atom(Arc<str>),
    And(Vec<FormulaId>),
    Or(Vec<FormulaId>),
    WeakUntil(FormulaId, FormulaId),
    Always(FormulaId),
    Next(FormulaId),
}

/// Interning table. Structurally equal canonical formulas share one id.
#[derive(Clone, Debug)]
pub struct FormulaStore {
    nodes: Vec<Node>,
    index: HashMap<Node, FormulaId>,
    normal: HashMap<FormulaId, FormulaId>,
}

impl Default for FormulaStore {
    fn default() -> Self {
        Self::new()
    }
}

impl FormulaStore {
    pub fn new() -> Self {
        let mut s = FormulaStore { nodes: Vec::new(), index: HashMap::new(), normal: HashMap::new() };
        s.hashcons(Node::True);
        s.hashcons(Node::False);
        s
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: FormulaId) -> &Node {
        &self.nodes[id.index()]
    }

    fn hashcons(&mut self, n: Node) -> FormulaId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = FormulaId(self.nodes.len() as u32);
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    pub fn mk_atom(&mut self, name: &str) -> FormulaId {
        self.hashcons(Node::Atom(Arc::from(name)))
    }

    pub fn mk_and(&mut self, children: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut cs = Vec::new();
        for c in children {
            match self.node(c) {
                Node::True => {}
                Node::False => return FormulaId::FALSE,
                Node::And(inner) => cs.extend_from_slice(inner),
                _ => cs.push(c),
            }
        }
        cs.sort();
        cs.dedup();
        // absorption: a and (a or b) = a
        let keep: Vec<FormulaId> = cs
            .iter()
            .copied()
            .filter(|&c| match self.node(c) {
                Node::Or(ds) => !ds.iter().any(|d| cs.binary_search(d).is_ok()),
                _ => true,
            })
            .collect();
        match keep.len() {
            0 => FormulaId::TRUE,
            1 => keep[0],
            _ => self.hashcons(Node::And(keep)),
        }
    }

    pub fn mk_or(&mut self, children: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut cs = Vec::new();
        for c in children {
            match self.node(c) {
                Node::False => {}
                Node::True => return FormulaId::TRUE,
                Node::Or(inner) => cs.extend_from_slice(inner),
                _ => cs.push(c),
            }
        }
        cs.sort();
        cs.dedup();
        // absorption: a or (a and b) = a
        let keep: Vec<FormulaId> = cs
            .iter()
            .copied()
            .filter(|&c| match self.node(c) {
                Node::And(ds) => !ds.iter().any(|d| cs.binary_search(d).is_ok()),
                _ => true,
            })
            .collect();
        match keep.len() {
            0 => FormulaId::FALSE,
            1 => keep[0],
            _ => self.hashcons(Node::Or(keep)),
        }
    }

    pub fn mk_weak_until(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        if b == FormulaId::TRUE || a == FormulaId::TRUE {
            return FormulaId::TRUE;
        }
        if a == FormulaId::FALSE || a == b {
            return b;
        }
        self.hashcons(Node::WeakUntil(a, b))
    }

    pub fn mk_always(&mut self, a: FormulaId) -> FormulaId {
        if a == FormulaId::TRUE || a == FormulaId::FALSE {
            return a;
        }
        if let Node::Always(_) = self.node(a) {
            return a;
        }
        self.hashcons(Node::Always(a))
    }

    pub fn mk_next(&mut self, a: FormulaId) -> FormulaId {
        if a == FormulaId::TRUE || a == FormulaId::FALSE {
            return a;
        }
        self.hashcons(Node::Next(a))
    }

    pub fn intern(&mut self, f: &Formula) -> FormulaId {
        match f {
            Formula::True => FormulaId::TRUE,
            Formula::False => FormulaId::FALSE,
            Formula::Atom(a) => self.mk_atom(a),
            Formula::And(cs) => {
                let ids: Vec<FormulaId> = cs.iter().map(|c| self.intern(c)).collect();
                self.mk_and(ids)
            }
            Formula::Or(cs) => {
                let ids: Vec<FormulaId> = cs.iter().map(|c| self.intern(c)).collect();
                self.mk_or(ids)
            }
            Formula::WeakUntil(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.mk_weak_until(a, b)
            }
            Formula::Always(a) => {
                let a = self.intern(a);
                self.mk_always(a)
            }
            Formula::Next(a) => {
                let a = self.intern(a);
                self.mk_next(a)
            }
        }
    }

    /// Exports an interned formula with `And`/`Or` children sorted by the
    /// structural order, so the result does not depend on interning order.
    pub fn to_formula(&self, id: FormulaId) -> Formula {
        match self.node(id) {
            Node::True => Formula::True,
            Node::False => Formula::False,
            Node::Atom(a) => Formula::Atom(a.clone()),
            Node::And(cs) => {
                let mut v: Vec<Formula> = cs.iter().map(|&c| self.to_formula(c)).collect();
                v.sort();
                Formula::And(v)
            }
            Node::Or(cs) => {
                let mut v: Vec<Formula> = cs.iter().map(|&c| self.to_formula(c)).collect();
                v.sort();
                Formula::Or(v)
            }
            Node::WeakUntil(a, b) => Formula::weak_until(self.to_formula(*a), self.to_formula(*b)),
            Node::Always(a) => Formula::always(self.to_formula(*a)),
            Node::Next(a) => Formula::next(self.to_formula(*a)),
        }
    }

    /// Atoms reachable from `id`, in order of first occurrence.
    pub fn atoms_of(&self, id: FormulaId) -> Vec<Arc<str>> {
        self.to_formula(id).atoms()
    }

    /// The derivative under an atom valuation.
    pub fn derive_by(&mut self, f: FormulaId, val: &mut dyn FnMut(&str) -> bool) -> FormulaId {
        match self.node(f).clone() {
            Node::True => FormulaId::TRUE,
            Node::False => FormulaId::FALSE,
            Node::Atom(a) => {
                if val(&a) {
                    FormulaId::TRUE
                } else {
                    FormulaId::FALSE
                }
            }
            Node::And(cs) => {
                let ds: Vec<FormulaId> = cs.iter().map(|&c| self.derive_by(c, val)).collect();
                self.mk_and(ds)
            }
            Node::Or(cs) => {
                let ds: Vec<FormulaId> = cs.iter().map(|&c| self.derive_by(c, val)).collect();
                self.mk_or(ds)
            }
            Node::WeakUntil(a, b) => {
                let db = self.derive_by(b, val);
                let da = self.derive_by(a, val);
                let later = self.mk_and([da, f]);
                self.mk_or([db, later])
            }
            Node::Always(a) => {
                let da = self.derive_by(a, val);
                self.mk_and([da, f])
            }
            Node::Next(a) => a,
        }
    }

    /// Boolean normal form: a disjunction of conjunctions of temporal leaves
    /// (atoms, `always`, `weakuntil`, `next`), with subsumed clauses removed.
    /// Positive formulas have a unique such form up to leaf identity, so
    /// iterated derivatives stay inside a finite set.
    pub fn normalize(&mut self, f: FormulaId) -> FormulaId {
        if let Some(&n) = self.normal.get(&f) {
            return n;
        }
        let clauses = self.dnf(f);
        let ors: Vec<FormulaId> = clauses.into_iter().map(|c| self.mk_and(c)).collect();
        let n = self.mk_or(ors);
        self.normal.insert(f, n);
        self.normal.insert(n, n);
        n
    }

    fn dnf(&self, f: FormulaId) -> Vec<BTreeSet<FormulaId>> {
        match self.node(f) {
            Node::True => vec![BTreeSet::new()],
            Node::False => Vec::new(),
            Node::Or(cs) => absorb(cs.iter().flat_map(|&c| self.dnf(c)).collect()),
            Node::And(cs) => cs.iter().fold(vec![BTreeSet::new()], |acc, &c| {
                let rhs = self.dnf(c);
                absorb(acc.iter().flat_map(|a| rhs.iter().map(move |b| a | b)).collect())
            }),
            _ => vec![BTreeSet::from([f])],
        }
    }

    /// The derivative under a concrete event tuple. Atoms that fail to
    /// evaluate (undeclared, wrong arity) count as false.
    pub fn derive(&mut self, f: FormulaId, events: &[EventLabel], atoms: &AtomTable) -> FormulaId {
        self.derive_by(f, &mut |a| atoms.eval_atom(a, events).unwrap_or(false))
    }
}

/// Drops duplicate clauses and clauses that contain another clause.
fn absorb(mut cs: Vec<BTreeSet<FormulaId>>) -> Vec<BTreeSet<FormulaId>> {
    cs.sort_by_key(BTreeSet::len);
    let mut out: Vec<BTreeSet<FormulaId>> = Vec::new();
    for c in cs {
        if !out.iter().any(|o| o.is_subset(&c)) {
            out.push(c);
        }
    }
    out
}

/// Derivative of a formula tree under an event tuple, in canonical form.
pub fn derive(f: &Formula, events: &[EventLabel], atoms: &AtomTable) -> Formula {
    let mut s = FormulaStore::new();
    let id = s.intern(f);
    let d = s.derive(id, events, atoms);
    s.to_formula(d)
}

/// Canonical representative of a formula tree.
pub fn canonicalize(f: &Formula) -> Formula {
    f.canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms() -> AtomTable {
        AtomTable::parse(
            "atom a1(e1, e2) := e1 is a;
             atom a2(e1, e2) := e2 is a;
             atom b2(e1, e2) := e2 is b;",
        )
        .unwrap()
    }

    fn ev(a: &str, b: &str) -> Vec<EventLabel> {
        vec![EventLabel::sym(a), EventLabel::sym(b)]
    }

    #[test]
    fn weak_until_derivatives() {
        let f = Formula::parse("(a1 and a2) weakuntil b2").unwrap();
        assert_eq!(derive(&f, &ev("a", "a"), &atoms()), f.canonicalize());
        assert_eq!(derive(&f, &ev("a", "b"), &atoms()), Formula::True);
        assert_eq!(derive(&Formula::True, &ev("b", "a"), &atoms()), Formula::True);
        assert_eq!(derive(&f, &ev("b", "a"), &atoms()), Formula::False);
    }

    #[test]
    fn canonical_laws() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        assert_eq!(Formula::and(Formula::True, p.clone()).canonicalize(), p);
        assert_eq!(Formula::or(p.clone(), p.clone()).canonicalize(), p);
        assert_eq!(Formula::and(q.clone(), p.clone()).canonicalize(), Formula::and(p.clone(), q.clone()).canonicalize());
        assert_eq!(Formula::and(p.clone(), Formula::or(p.clone(), q.clone())).canonicalize(), p);
        let nested = Formula::And(vec![p.clone(), Formula::And(vec![q.clone(), Formula::True])]);
        assert_eq!(nested.canonicalize(), Formula::And(vec![p.clone(), q.clone()]));
        assert_eq!(Formula::And(vec![]).canonicalize(), Formula::True);
        assert_eq!(Formula::Or(vec![]).canonicalize(), Formula::False);
    }

    #[test]
    fn always_and_next() {
        let a = atoms();
        let f = Formula::parse("always a1").unwrap();
        assert_eq!(derive(&f, &ev("a", "b"), &a), f);
        assert_eq!(derive(&f, &ev("b", "b"), &a), Formula::False);
        let g = Formula::parse("next b2").unwrap();
        assert_eq!(derive(&g, &ev("x", "x"), &a), Formula::atom("b2"));
    }
}
