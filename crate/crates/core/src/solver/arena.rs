//! The product game arena of a forall-exists query.

use std::collections::HashMap;

use crate::error::{Error, Resource, Result};
use crate::lts::{EventLabel, Lts, StateId};
use crate::relspec::{ClosureGraph, FormulaId, FormulaStore};
use crate::solver::{Caps, HyperQuery};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameNode {
    pub ustates: Vec<StateId>,
    pub estates: Vec<StateId>,
    pub fid: FormulaId,
}

pub type Step = (EventLabel, StateId);

/// An existential answer to a universal move: one step per existential
/// system and the node it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reply {
    pub steps: Vec<Step>,
    pub target: usize,
}

/// One step per universal system, with every existential reply whose
/// derivative stays nonempty, in increasing order.
///
/// With no universal systems each node has exactly one move with no steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalMove {
    pub steps: Vec<Step>,
    pub replies: Vec<Reply>,
}

#[derive(Clone, Debug)]
pub struct Arena {
    pub store: FormulaStore,
    pub closure: ClosureGraph,
    universal: Vec<Lts>,
    existential: Vec<Lts>,
    nodes: Vec<GameNode>,
    index: HashMap<GameNode, usize>,
    moves: Vec<Vec<UniversalMove>>,
    root: Option<usize>,
}

/// All tuples picking one element from each list, in lexicographic order.
fn product<T: Clone>(lists: &[&[T]]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l.iter() {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

impl Arena {
    pub fn build(q: &HyperQuery, caps: &Caps) -> Result<Self> {
        q.validate()?;
        let alphabets: Vec<Vec<EventLabel>> = q.systems().map(|l| l.alphabet().to_vec()).collect();
        let mut store = FormulaStore::new();
        let root_f = store.intern(&q.formula);
        let closure = ClosureGraph::build(&mut store, root_f, &alphabets, &q.atoms, caps.max_closure)?;
        let root_f = closure.root();
        let mut arena = Arena {
            store,
            closure,
            universal: q.universal.clone(),
            existential: q.existential.clone(),
            nodes: Vec::new(),
            index: HashMap::new(),
            moves: Vec::new(),
            root: None,
        };
        if !arena.closure.nonempty(root_f) {
            return Ok(arena);
        }
        let init = GameNode {
            ustates: q.universal.iter().map(Lts::init).collect(),
            estates: q.existential.iter().map(Lts::init).collect(),
            fid: root_f,
        };
        arena.root = Some(arena.intern(init, caps)?);
        let mut at = 0;
        while at < arena.nodes.len() {
            let mv = arena.expand(at, caps)?;
            arena.moves.push(mv);
            at += 1;
        }
        Ok(arena)
    }

    fn intern(&mut self, n: GameNode, caps: &Caps) -> Result<usize> {
        if let Some(&i) = self.index.get(&n) {
            return Ok(i);
        }
        if self.nodes.len() >= caps.max_nodes {
            return Err(Error::Resource {
                resource: Resource::ArenaNodes,
                cap: caps.max_nodes,
                detail: format!("{} nodes explored", self.nodes.len()),
            });
        }
        let i = self.nodes.len();
        self.nodes.push(n.clone());
        self.index.insert(n, i);
        Ok(i)
    }

    fn expand(&mut self, at: usize, caps: &Caps) -> Result<Vec<UniversalMove>> {
        let node = self.nodes[at].clone();
        let ulists: Vec<&[Step]> =
            self.universal.iter().zip(&node.ustates).map(|(l, &s)| l.obs_successors(s)).collect::<Result<_>>()?;
        let elists: Vec<&[Step]> =
            self.existential.iter().zip(&node.estates).map(|(l, &s)| l.obs_successors(s)).collect::<Result<_>>()?;
        let umoves = product(&ulists);
        let emoves = product(&elists);
        let mut out = Vec::with_capacity(umoves.len());
        let mut events = Vec::new();
        for us in umoves {
            let mut replies = Vec::new();
            for es in &emoves {
                events.clear();
                events.extend(us.iter().chain(es).map(|(e, _)| e.clone()));
                let d = self.closure.step(node.fid, &events).expect("events lie in the system alphabets");
                if !self.closure.nonempty(d) {
                    continue;
                }
                let target = GameNode {
                    ustates: us.iter().map(|(_, s)| *s).collect(),
                    estates: es.iter().map(|(_, s)| *s).collect(),
                    fid: d,
                };
                let target = self.intern(target, caps)?;
                replies.push(Reply { steps: es.clone(), target });
            }
            out.push(UniversalMove { steps: us, replies });
        }
        Ok(out)
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &GameNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[GameNode] {
        &self.nodes
    }

    pub fn find(&self, n: &GameNode) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn moves(&self, i: usize) -> &[UniversalMove] {
        &self.moves[i]
    }

    pub fn universal(&self) -> &[Lts] {
        &self.universal
    }

    pub fn existential(&self) -> &[Lts] {
        &self.existential
    }

    /// Human-readable rendering of a node: `(q0, s0 | always eq)`.
    pub fn describe(&self, i: usize) -> String {
        let n = &self.nodes[i];
        let us: Vec<&str> = self.universal.iter().zip(&n.ustates).map(|(l, &s)| l.state_name(s)).collect();
        let es: Vec<&str> = self.existential.iter().zip(&n.estates).map(|(l, &s)| l.state_name(s)).collect();
        format!("({} | {} | {})", us.join(", "), es.join(", "), self.store.to_formula(n.fid))
    }

    pub fn describe_steps(&self, steps: &[Step], existential: bool) -> String {
        let systems = if existential { &self.existential } else { &self.universal };
        let parts: Vec<String> = systems.iter().zip(steps).map(|(l, (e, s))| format!("{e} {}", l.state_name(*s))).collect();
        format!("[{}]", parts.join(", "))
    }
}
