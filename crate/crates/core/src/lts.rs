//! Explicit labeled transition systems.
//!
//! States are dense ids assigned at construction. The observable-step relation
//! (`s ->* s'' -e-> s'`) and the deterministic silent step are computed once per
//! state when the system is built; an [`Lts`] is immutable afterwards.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, ParseError, Result};
use crate::lasso::{Lasso, RunLasso};
use crate::syntax::{Cursor, Tok};

/// An observable event: an abstract symbol or an IMP_io input/output.
///
/// The derived order (symbols, then inputs, then outputs) is the total order
/// used for canonical sorting and tie-breaking everywhere in the crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventLabel {
    Sym(Arc<str>),
    In(i64),
    Out(i64),
}

impl EventLabel {
    pub fn sym(name: &str) -> Self {
        EventLabel::Sym(Arc::from(name))
    }

    /// Parses a single event: `name`, `in(<int>)` or `out(<int>)`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src)?;
        let e = parse_event(&mut cur)?;
        cur.expect_eof()?;
        Ok(e)
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventLabel::Sym(s) => f.write_str(s),
            EventLabel::In(v) => write!(f, "in({v})"),
            EventLabel::Out(v) => write!(f, "out({v})"),
        }
    }
}

pub(crate) fn parse_event(cur: &mut Cursor) -> Result<EventLabel, ParseError> {
    let name = cur.ident()?;
    if (name == "in" || name == "out") && cur.peek() == &Tok::LParen {
        cur.bump();
        let v = cur.int()?;
        cur.expect(&Tok::RParen)?;
        Ok(if name == "in" { EventLabel::In(v) } else { EventLabel::Out(v) })
    } else {
        Ok(EventLabel::Sym(Arc::from(name.as_str())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    /// `None` is the silent label.
    pub label: Option<EventLabel>,
    pub dst: StateId,
}

#[derive(Clone, Debug)]
pub struct Lts {
    name: String,
    state_names: Vec<String>,
    alphabet: Vec<EventLabel>,
    init: StateId,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    obs: Vec<Vec<(EventLabel, StateId)>>,
    det: Vec<Option<StateId>>,
}

#[derive(Debug, Default)]
pub struct LtsBuilder {
    name: String,
    state_names: Vec<String>,
    index: HashMap<String, StateId>,
    alphabet: BTreeSet<EventLabel>,
    init: Option<StateId>,
    transitions: Vec<Transition>,
}

impl LtsBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        LtsBuilder { name: name.into(), ..Default::default() }
    }

    /// Returns the id of the named state, adding it if needed.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = StateId(self.state_names.len() as u32);
        self.state_names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn init(&mut self, s: StateId) -> &mut Self {
        self.init = Some(s);
        self
    }

    pub fn event(&mut self, e: EventLabel) -> &mut Self {
        self.alphabet.insert(e);
        self
    }

    pub fn edge(&mut self, src: StateId, label: Option<EventLabel>, dst: StateId) -> &mut Self {
        if let Some(e) = &label {
            self.alphabet.insert(e.clone());
        }
        self.transitions.push(Transition { src, label, dst });
        self
    }

    pub fn silent(&mut self, src: StateId, dst: StateId) -> &mut Self {
        self.edge(src, None, dst)
    }

    pub fn labeled(&mut self, src: StateId, e: EventLabel, dst: StateId) -> &mut Self {
        self.edge(src, Some(e), dst)
    }

    pub fn build(self) -> Result<Lts> {
        let n = self.state_names.len();
        if n == 0 {
            return Err(Error::input(format!("lts `{}` has no states", self.name)));
        }
        let init = self.init.ok_or_else(|| Error::input(format!("lts `{}` has no initial state", self.name)))?;
        if init.index() >= n {
            return Err(Error::input(format!("lts `{}`: initial state out of range", self.name)));
        }
        let mut transitions = self.transitions;
        transitions.sort_by(|a, b| (a.src, &a.label, a.dst).cmp(&(b.src, &b.label, b.dst)));
        transitions.dedup();
        let mut outgoing = vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            if t.src.index() >= n || t.dst.index() >= n {
                return Err(Error::input(format!("lts `{}`: transition endpoint out of range", self.name)));
            }
            outgoing[t.src.index()].push(i);
        }
        let mut lts = Lts {
            name: self.name,
            state_names: self.state_names,
            alphabet: self.alphabet.into_iter().collect(),
            init,
            transitions,
            outgoing,
            obs: Vec::new(),
            det: Vec::new(),
        };
        lts.obs = (0..n).map(|s| lts.compute_obs(StateId(s as u32))).collect();
        lts.det = (0..n).map(|s| lts.compute_det(StateId(s as u32))).collect();
        Ok(lts)
    }
}

impl Lts {
    pub fn builder(name: impl Into<String>) -> LtsBuilder {
        LtsBuilder::new(name)
    }

    /// Parses one `lts NAME { ... }` declaration.
    pub fn parse(src: &str) -> Result<Lts> {
        let mut cur = Cursor::new(src)?;
        cur.expect_kw("lts")?;
        let lts = parse_lts_body(&mut cur)?;
        cur.expect_eof()?;
        Ok(lts)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        self.state_names.get(s.index()).map(String::as_str).unwrap_or("?")
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(|i| StateId(i as u32))
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn alphabet(&self) -> &[EventLabel] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// A copy of this system whose initial state is `s`.
    pub fn with_init(&self, s: StateId) -> Result<Lts> {
        self.check(s)?;
        let mut l = self.clone();
        l.init = s;
        Ok(l)
    }

    /// A copy with a larger alphabet (transitions unchanged).
    pub fn with_alphabet(&self, extra: impl IntoIterator<Item = EventLabel>) -> Lts {
        let mut set: BTreeSet<EventLabel> = self.alphabet.iter().cloned().collect();
        set.extend(extra);
        let mut l = self.clone();
        l.alphabet = set.into_iter().collect();
        l
    }

    fn check(&self, s: StateId) -> Result<()> {
        if s.index() < self.state_names.len() {
            Ok(())
        } else {
            Err(Error::input(format!("lts `{}` has no state with id {}", self.name, s.0)))
        }
    }

    pub fn silent_successors(&self, s: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.outgoing[s.index()].iter().filter_map(|&i| {
            let t = &self.transitions[i];
            t.label.is_none().then_some(t.dst)
        })
    }

    fn compute_obs(&self, s: StateId) -> Vec<(EventLabel, StateId)> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([s]);
        seen[s.index()] = true;
        let mut out = BTreeSet::new();
        while let Some(q) = queue.pop_front() {
            for &i in &self.outgoing[q.index()] {
                let t = &self.transitions[i];
                match &t.label {
                    Some(e) => {
                        out.insert((e.clone(), t.dst));
                    }
                    None => {
                        if !seen[t.dst.index()] {
                            seen[t.dst.index()] = true;
                            queue.push_back(t.dst);
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    fn compute_det(&self, s: StateId) -> Option<StateId> {
        match self.outgoing[s.index()].as_slice() {
            [only] => {
                let t = &self.transitions[*only];
                t.label.is_none().then_some(t.dst)
            }
            _ => None,
        }
    }

    /// `{ (e, s') | s ->* s'' -e-> s' }`, sorted by event then target.
    pub fn obs_successors(&self, s: StateId) -> Result<&[(EventLabel, StateId)]> {
        self.check(s)?;
        Ok(&self.obs[s.index()])
    }

    /// The unique successor of `s` when its only transition is silent.
    pub fn det_step(&self, s: StateId) -> Result<Option<StateId>> {
        self.check(s)?;
        Ok(self.det[s.index()])
    }

    /// States from which an infinite sequence of observable steps exists
    /// (greatest fixed point of "has an observable successor inside the set").
    pub fn trace_states(&self) -> Vec<bool> {
        let mut alive = vec![true; self.num_states()];
        loop {
            let mut changed = false;
            for s in 0..self.num_states() {
                if alive[s] && !self.obs[s].iter().any(|(_, t)| alive[t.index()]) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    pub fn has_trace(&self, s: StateId) -> Result<bool> {
        self.check(s)?;
        Ok(self.trace_states()[s.index()])
    }

    /// All runs from `s` of at most `max_len` observable steps whose last
    /// state revisits an earlier state of the run.
    pub fn enumerate_runs(&self, s: StateId, max_len: usize) -> Result<Vec<RunLasso>> {
        self.check(s)?;
        let mut out = Vec::new();
        let mut path_states = vec![s];
        let mut steps: Vec<(EventLabel, StateId)> = Vec::new();
        self.runs_dfs(s, max_len, &mut path_states, &mut steps, &mut out);
        Ok(out)
    }

    fn runs_dfs(
        &self,
        start: StateId,
        max_len: usize,
        path_states: &mut Vec<StateId>,
        steps: &mut Vec<(EventLabel, StateId)>,
        out: &mut Vec<RunLasso>,
    ) {
        if steps.len() >= max_len {
            return;
        }
        let here = *path_states.last().unwrap();
        for (e, t) in &self.obs[here.index()] {
            steps.push((e.clone(), *t));
            for j in 0..path_states.len() {
                if path_states[j] == *t {
                    out.push(RunLasso::new(start, steps[..j].to_vec(), steps[j..].to_vec()));
                }
            }
            path_states.push(*t);
            self.runs_dfs(start, max_len, path_states, steps, out);
            path_states.pop();
            steps.pop();
        }
    }

    /// Distinct ultimately periodic traces from `s` realizable by a run of at
    /// most `max_len` observable steps that closes a cycle; sorted.
    pub fn enumerate_lassos(&self, s: StateId, max_len: usize) -> Result<Vec<Lasso>> {
        let set: BTreeSet<Lasso> = self.enumerate_runs(s, max_len)?.iter().map(RunLasso::word).collect();
        Ok(set.into_iter().collect())
    }

    /// Finds a run from the initial state producing exactly the word `lasso`.
    pub fn realize(&self, lasso: &Lasso) -> Option<RunLasso> {
        self.realize_from(self.init, lasso)
    }

    pub fn realize_from(&self, s: StateId, lasso: &Lasso) -> Option<RunLasso> {
        if s.index() >= self.num_states() {
            return None;
        }
        let p = lasso.prefix().len();
        let width = p + lasso.cycle().len();
        let next = |i: usize| if i + 1 < width { i + 1 } else { p };
        // product nodes (position, state) reachable from (0, s)
        let key = |i: usize, q: StateId| i * self.num_states() + q.index();
        let mut succ: HashMap<usize, Vec<(usize, StateId)>> = HashMap::new();
        let mut order = vec![(0usize, s)];
        let mut seen = BTreeSet::from([key(0, s)]);
        let mut at = 0;
        while at < order.len() {
            let (i, q) = order[at];
            at += 1;
            let letter = lasso.at(i);
            let mut next_nodes = Vec::new();
            for (e, t) in &self.obs[q.index()] {
                if e == letter {
                    let n = (next(i), *t);
                    next_nodes.push(n);
                    if seen.insert(key(n.0, n.1)) {
                        order.push(n);
                    }
                }
            }
            succ.insert(key(i, q), next_nodes);
        }
        let mut alive: HashMap<usize, bool> = seen.iter().map(|&k| (k, true)).collect();
        loop {
            let mut changed = false;
            for &(i, q) in &order {
                let k = key(i, q);
                if alive[&k] && !succ[&k].iter().any(|&(j, t)| alive[&key(j, t)]) {
                    alive.insert(k, false);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !alive[&key(0, s)] {
            return None;
        }
        let mut visited: HashMap<usize, usize> = HashMap::new();
        let mut steps = Vec::new();
        let (mut i, mut q) = (0usize, s);
        loop {
            if let Some(&first) = visited.get(&key(i, q)) {
                let cycle = steps.split_off(first);
                return Some(RunLasso::new(s, steps, cycle));
            }
            visited.insert(key(i, q), steps.len());
            let &(j, t) = succ[&key(i, q)].iter().find(|&&(j, t)| alive[&key(j, t)])?;
            steps.push((lasso.at(i).clone(), t));
            i = j;
            q = t;
        }
    }
}

impl fmt::Display for Lts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lts {} {{", self.name)?;
        write!(f, "  states")?;
        for n in &self.state_names {
            write!(f, " {n}")?;
        }
        writeln!(f, ";")?;
        writeln!(f, "  init {};", self.state_name(self.init))?;
        if !self.alphabet.is_empty() {
            write!(f, "  alphabet")?;
            for e in &self.alphabet {
                write!(f, " {e}")?;
            }
            writeln!(f, ";")?;
        }
        for t in &self.transitions {
            match &t.label {
                Some(e) => writeln!(f, "  {} -{}-> {};", self.state_name(t.src), e, self.state_name(t.dst))?,
                None => writeln!(f, "  {} -> {};", self.state_name(t.src), self.state_name(t.dst))?,
            }
        }
        write!(f, "}}")
    }
}

/// Parses `NAME { states ...; init ...; [alphabet ...;] edges... }` (the
/// `lts` keyword already consumed).
pub(crate) fn parse_lts_body(cur: &mut Cursor) -> Result<Lts, Error> {
    let name = cur.ident()?;
    cur.expect(&Tok::LBrace)?;
    let mut b = LtsBuilder::new(name.clone());
    let mut declared = false;
    let mut init = None;
    while !cur.eat(&Tok::RBrace) {
        if cur.is_kw("states") && matches!(cur.peek_at(1), Tok::Ident(_)) && !declared {
            cur.bump();
            while let Tok::Ident(s) = cur.peek().clone() {
                cur.bump();
                b.state(&s);
            }
            cur.expect(&Tok::Semi)?;
            declared = true;
            continue;
        }
        if cur.is_kw("init") && matches!(cur.peek_at(1), Tok::Ident(_)) && matches!(cur.peek_at(2), Tok::Semi) {
            cur.bump();
            let pos = cur.pos();
            let s = cur.ident()?;
            let id = b.lookup(&s).ok_or_else(|| ParseError::new(pos, format!("undeclared state `{s}`")))?;
            init = Some(id);
            cur.expect(&Tok::Semi)?;
            continue;
        }
        if cur.is_kw("alphabet") && !matches!(cur.peek_at(1), Tok::Minus | Tok::Arrow) {
            cur.bump();
            while !cur.eat(&Tok::Semi) {
                let e = parse_event(cur)?;
                b.event(e);
            }
            continue;
        }
        let pos = cur.pos();
        let src = cur.ident()?;
        let src_id = b.lookup(&src).ok_or_else(|| ParseError::new(pos, format!("undeclared state `{src}`")))?;
        let label = if cur.eat(&Tok::Arrow) {
            None
        } else {
            cur.expect(&Tok::Minus)?;
            let e = parse_event(cur)?;
            cur.expect(&Tok::Arrow)?;
            Some(e)
        };
        let pos = cur.pos();
        let dst = cur.ident()?;
        let dst_id = b.lookup(&dst).ok_or_else(|| ParseError::new(pos, format!("undeclared state `{dst}`")))?;
        cur.expect(&Tok::Semi)?;
        b.edge(src_id, label, dst_id);
    }
    if !declared {
        return Err(Error::input(format!("lts `{name}` declares no states")));
    }
    let init = init.ok_or_else(|| Error::input(format!("lts `{name}` declares no initial state")))?;
    b.init(init);
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> EventLabel {
        EventLabel::sym(s)
    }

    /// TS2 of the simulation example: s0 -a-> s1, s1 loops on b and c.
    fn ts2() -> Lts {
        Lts::parse("lts TS2 { states s0 s1; init s0; s0 -a-> s1; s1 -b-> s1; s1 -c-> s1; }").unwrap()
    }

    /// Alignment example: s0 silently reaches s1, which loops on a.
    fn silent_then_a() -> Lts {
        Lts::parse("lts TS1 { states s0 s1; init s0; s0 -> s1; s1 -a-> s1; }").unwrap()
    }

    #[test]
    fn obs_successors_examples() {
        let l = ts2();
        assert_eq!(l.obs_successors(StateId(0)).unwrap(), &[(ev("a"), StateId(1))]);
        let l = silent_then_a();
        assert_eq!(l.obs_successors(StateId(0)).unwrap(), &[(ev("a"), StateId(1))]);
        let iso = Lts::parse("lts I { states q; init q; }").unwrap();
        assert!(iso.obs_successors(StateId(0)).unwrap().is_empty());
        assert!(matches!(iso.obs_successors(StateId(3)), Err(Error::Input(_))));
    }

    #[test]
    fn det_step_examples() {
        let l = silent_then_a();
        assert_eq!(l.det_step(StateId(0)).unwrap(), Some(StateId(1)));
        assert_eq!(l.det_step(StateId(1)).unwrap(), None);
        let two = Lts::parse("lts T { states a b c; init a; a -> b; a -> c; }").unwrap();
        assert_eq!(two.det_step(StateId(0)).unwrap(), None);
    }

    #[test]
    fn has_trace_examples() {
        assert!(ts2().has_trace(StateId(0)).unwrap());
        let dead = Lts::parse("lts D { states q; init q; }").unwrap();
        assert!(!dead.has_trace(StateId(0)).unwrap());
        let silent_loop = Lts::parse("lts S { states p q; init p; p -> q; q -> p; }").unwrap();
        assert!(!silent_loop.has_trace(StateId(0)).unwrap());
    }

    #[test]
    fn enumerate_lassos_examples() {
        let l = ts2();
        let got = l.enumerate_lassos(StateId(0), 2).unwrap();
        let want = vec![Lasso::parse("a b^w").unwrap(), Lasso::parse("a c^w").unwrap()];
        assert_eq!(got, want);

        let dead = Lts::parse("lts D { states q; init q; }").unwrap();
        assert!(dead.enumerate_lassos(StateId(0), 4).unwrap().is_empty());

        let branch = Lts::parse("lts TS { states s0 s1 s2; init s0; s0 -> s1; s0 -> s2; s1 -a-> s1; s2 -b-> s2; }").unwrap();
        let got = branch.enumerate_lassos(StateId(0), 3).unwrap();
        assert_eq!(got, vec![Lasso::parse("a^w").unwrap(), Lasso::parse("b^w").unwrap()]);
    }

    #[test]
    fn parser_rejects_undeclared_states() {
        let err = Lts::parse("lts T { states q0; init q0; q0 -a-> q9; }").unwrap_err();
        match err {
            Error::Parse(p) => {
                assert!(p.message.contains("q9"));
                assert_eq!(p.line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let src = "lts TS1 { states q0 q1 q2; init q0;\n q0 -> q1; # silent\n q1 -a-> q1; q2 -in(3)-> q2; }";
        let l = Lts::parse(src).unwrap();
        let again = Lts::parse(&l.to_string()).unwrap();
        assert_eq!(again.transitions(), l.transitions());
        assert_eq!(again.alphabet(), l.alphabet());
        assert_eq!(again.alphabet(), &[ev("a"), EventLabel::In(3)]);
    }

    #[test]
    fn realize_finds_runs() {
        let l = ts2();
        let run = l.realize(&Lasso::parse("a b c^w").unwrap()).unwrap();
        assert_eq!(run.word(), Lasso::parse("a b c^w").unwrap());
        assert!(l.realize(&Lasso::parse("b^w").unwrap()).is_none());
    }
}
