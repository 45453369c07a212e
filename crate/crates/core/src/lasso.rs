//! Ultimately periodic words `u v^w` and runs producing them.

use std::fmt;

use crate::error::{Error, Result};
use crate::lts::{parse_event, EventLabel, StateId};
use crate::syntax::{Cursor, Tok};

/// An ultimately periodic word `prefix cycle^w`.
///
/// Values are always kept canonical: the cycle is primitive and the prefix is
/// as short as possible. Two lassos are therefore equal exactly when they
/// denote the same infinite word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    prefix: Vec<EventLabel>,
    cycle: Vec<EventLabel>,
}

impl Lasso {
    pub fn new(prefix: Vec<EventLabel>, cycle: Vec<EventLabel>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::input("a lasso needs a nonempty cycle"));
        }
        Ok(Self::canonical(prefix, cycle))
    }

    fn canonical(mut prefix: Vec<EventLabel>, mut cycle: Vec<EventLabel>) -> Self {
        let n = cycle.len();
        if let Some(d) = (1..=n).find(|&d| n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d])) {
            cycle.truncate(d);
        }
        while let Some(last) = prefix.last() {
            if last != cycle.last().unwrap() {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Lasso { prefix, cycle }
    }

    /// Parses `a b (c d)^w`, `a^w` or `in(1) (out(2))^w`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src)?;
        let l = parse_lasso(&mut cur)?;
        cur.expect_eof()?;
        Ok(l)
    }

    pub fn prefix(&self) -> &[EventLabel] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[EventLabel] {
        &self.cycle
    }

    /// The letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> &EventLabel {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The word with its first `i` letters removed.
    pub fn suffix(&self, i: usize) -> Lasso {
        if i <= self.prefix.len() {
            return Lasso { prefix: self.prefix[i..].to_vec(), cycle: self.cycle.clone() };
        }
        let mut cycle = self.cycle.clone();
        cycle.rotate_left((i - self.prefix.len()) % self.cycle.len());
        Lasso { prefix: Vec::new(), cycle }
    }

    pub fn prepend(&self, e: EventLabel) -> Lasso {
        let mut prefix = vec![e];
        prefix.extend(self.prefix.iter().cloned());
        Self::canonical(prefix, self.cycle.clone())
    }

    /// Number of letters needed to write the lasso down.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letters in order of first occurrence, without repeats.
    pub fn letters(&self) -> Vec<EventLabel> {
        let mut out: Vec<EventLabel> = Vec::new();
        for e in self.prefix.iter().chain(&self.cycle) {
            if !out.contains(e) {
                out.push(e.clone());
            }
        }
        out
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.prefix {
            write!(f, "{e} ")?;
        }
        if self.cycle.len() == 1 {
            write!(f, "{}^w", self.cycle[0])
        } else {
            f.write_str("(")?;
            for (i, e) in self.cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")^w")
        }
    }
}

pub(crate) fn parse_lasso(cur: &mut Cursor) -> Result<Lasso> {
    let mut prefix = Vec::new();
    loop {
        if cur.eat(&Tok::LParen) {
            let mut cycle = Vec::new();
            while !cur.eat(&Tok::RParen) {
                cycle.push(parse_event(cur)?);
            }
            expect_omega(cur)?;
            return Lasso::new(prefix, cycle);
        }
        if !matches!(cur.peek(), Tok::Ident(_)) {
            return Err(cur.error(format!("expected an event or `(`, found {}", cur.peek())).into());
        }
        let e = parse_event(cur)?;
        if cur.peek() == &Tok::Caret {
            expect_omega(cur)?;
            return Lasso::new(prefix, vec![e]);
        }
        prefix.push(e);
    }
}

fn expect_omega(cur: &mut Cursor) -> Result<()> {
    cur.expect(&Tok::Caret)?;
    let pos = cur.pos();
    let w = cur.ident()?;
    if w != "w" && w != "omega" {
        return Err(crate::error::ParseError::new(pos, "expected `w` after `^`").into());
    }
    Ok(())
}

/// A run `s0 -e1-> s1 -e2-> ...` that eventually loops back.
///
/// Each step records the event and the state reached. The state reached by
/// the last cycle step equals the state the cycle starts from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLasso {
    pub start: StateId,
    pub prefix: Vec<(EventLabel, StateId)>,
    pub cycle: Vec<(EventLabel, StateId)>,
}

impl RunLasso {
    pub fn new(start: StateId, prefix: Vec<(EventLabel, StateId)>, cycle: Vec<(EventLabel, StateId)>) -> Self {
        RunLasso { start, prefix, cycle }
    }

    pub fn word(&self) -> Lasso {
        Lasso::canonical(
            self.prefix.iter().map(|(e, _)| e.clone()).collect(),
            self.cycle.iter().map(|(e, _)| e.clone()).collect(),
        )
    }

    pub fn step(&self, i: usize) -> &(EventLabel, StateId) {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The state before step `i`.
    pub fn state_before(&self, i: usize) -> StateId {
        if i == 0 {
            self.start
        } else {
            self.step(i - 1).1
        }
    }

    /// Position following `i` when the run is viewed as a finite graph.
    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.prefix.len() + self.cycle.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn width(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }
}
