//! Greatest fixed point on the arena and an independent attractor oracle.

use std::collections::VecDeque;

use crate::solver::arena::{Arena, Reply};

/// Chosen reply index per winning node and universal move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    choice: Vec<Option<Vec<u32>>>,
}

impl Strategy {
    /// The reply played at `node` against universal move `mv`.
    pub fn reply<'a>(&self, arena: &'a Arena, node: usize, mv: usize) -> Option<&'a Reply> {
        let k = *self.choice.get(node)?.as_ref()?.get(mv)?;
        arena.moves(node).get(mv)?.replies.get(k as usize)
    }

    pub fn is_winning(&self, node: usize) -> bool {
        self.choice.get(node).is_some_and(Option::is_some)
    }
}

#[derive(Clone, Debug)]
pub struct Region {
    pub winning: Vec<bool>,
    /// Region size after each deletion wave; the first entry is the arena size.
    pub sizes: Vec<usize>,
    pub strategy: Strategy,
}

impl Region {
    pub fn size(&self) -> usize {
        self.winning.iter().filter(|&&w| w).count()
    }

    pub fn rounds(&self) -> usize {
        self.sizes.len() - 1
    }
}

/// Deletes, wave by wave, every node with a universal move that has no
/// surviving reply. Counter-based worklist over reply edges.
pub fn winning_region(arena: &Arena) -> Region {
    let n = arena.len();
    let mut alive = vec![true; n];
    let mut count: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut wave = Vec::new();
    for v in 0..n {
        let mut row = Vec::new();
        for (k, mv) in arena.moves(v).iter().enumerate() {
            row.push(mv.replies.len());
            for r in &mv.replies {
                preds[r.target].push((v as u32, k as u32));
            }
        }
        if row.contains(&0) {
            alive[v] = false;
            wave.push(v);
        }
        count.push(row);
    }
    let mut sizes = vec![n];
    let mut size = n;
    while !wave.is_empty() {
        size -= wave.len();
        sizes.push(size);
        let mut next = Vec::new();
        for t in wave {
            for &(v, k) in &preds[t] {
                let c = &mut count[v as usize][k as usize];
                *c -= 1;
                if *c == 0 && alive[v as usize] {
                    alive[v as usize] = false;
                    next.push(v as usize);
                }
            }
        }
        wave = next;
    }
    let choice = (0..n)
        .map(|v| {
            alive[v].then(|| {
                arena
                    .moves(v)
                    .iter()
                    .map(|mv| mv.replies.iter().position(|r| alive[r.target]).expect("winning node has a reply") as u32)
                    .collect()
            })
        })
        .collect();
    Region { winning: alive, sizes, strategy: Strategy { choice } }
}

/// Winning set computed as the complement of the universal player's
/// attractor, by naive iteration to a least fixed point.
pub fn oracle_region(arena: &Arena) -> Vec<bool> {
    let n = arena.len();
    let mut losing = vec![false; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if losing[v] {
                continue;
            }
            let forced = arena.moves(v).iter().any(|mv| mv.replies.iter().all(|r| losing[r.target]));
            if forced {
                losing[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    losing.into_iter().map(|l| !l).collect()
}

/// Nodes reachable from the root, in breadth-first order.
pub fn reachable(arena: &Arena) -> Vec<usize> {
    let Some(root) = arena.root() else { return Vec::new() };
    let mut seen = vec![false; arena.len()];
    let mut order = Vec::new();
    let mut q = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = q.pop_front() {
        order.push(v);
        for mv in arena.moves(v) {
            for r in &mv.replies {
                if !seen[r.target] {
                    seen[r.target] = true;
                    q.push_back(r.target);
                }
            }
        }
    }
    order
}
