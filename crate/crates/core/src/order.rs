//! Weak-order bookkeeping shared by act preferences and event orders.
//!
//! Nodes are dense indices. Edges are `a ≤ b` (weak) or `a < b` (strict);
//! an indifference is recorded as two weak edges. The closure answers
//! `leq`/`lt` queries either over the declared edges only (raw mode) or
//! over their transitive closure.

use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn new(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn or_with(&mut self, other: &BitRow) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let next = *a | *b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct Closure {
    n: usize,
    transitive: bool,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    reach: Vec<BitRow>,
    reach_strict: Vec<BitRow>,
    direct: Vec<BitRow>,
    direct_strict: Vec<BitRow>,
}

impl Closure {
    #[allow(clippy::needless_range_loop)]
    pub fn build(n: usize, edges: Vec<Edge>, transitive: bool) -> Closure {
        let mut direct: Vec<BitRow> = (0..n).map(|_| BitRow::new(n)).collect();
        let mut direct_strict: Vec<BitRow> = (0..n).map(|_| BitRow::new(n)).collect();
        let mut adjacency = vec![Vec::new(); n];
        for (i, row) in direct.iter_mut().enumerate() {
            row.set(i);
        }
        for e in &edges {
            direct[e.from].set(e.to);
            if e.strict {
                direct_strict[e.from].set(e.to);
            }
            if !adjacency[e.from].contains(&e.to) {
                adjacency[e.from].push(e.to);
            }
        }

        // Warshall over bit rows.
        let mut reach = direct.clone();
        for k in 0..n {
            let row_k = reach[k].clone();
            for i in 0..n {
                if reach[i].get(k) {
                    reach[i].or_with(&row_k);
                }
            }
        }

        // lt = reach ∘ strict ∘ reach
        let mut strict_then_reach: Vec<BitRow> = (0..n).map(|_| BitRow::new(n)).collect();
        for a in 0..n {
            for b in 0..n {
                if direct_strict[a].get(b) {
                    let row_b = reach[b].clone();
                    strict_then_reach[a].or_with(&row_b);
                }
            }
        }
        let mut reach_strict: Vec<BitRow> = (0..n).map(|_| BitRow::new(n)).collect();
        for i in 0..n {
            for a in 0..n {
                if reach[i].get(a) {
                    let row_a = strict_then_reach[a].clone();
                    reach_strict[i].or_with(&row_a);
                }
            }
        }

        Closure {
            n,
            transitive,
            edges,
            adjacency,
            reach,
            reach_strict,
            direct,
            direct_strict,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `a ≤ b` is known.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        if self.transitive {
            self.reach[a].get(b)
        } else {
            self.direct[a].get(b)
        }
    }

    /// `a < b` is known.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        if self.transitive {
            self.reach_strict[a].get(b)
        } else {
            self.direct_strict[a].get(b)
        }
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Strict cycles in the declared edge graph (independent of mode),
    /// each rotated to start at its smallest node and deduplicated.
    pub fn strict_cycles(&self) -> Vec<Vec<usize>> {
        let mut found = BTreeSet::new();
        for e in self.edges.iter().filter(|e| e.strict) {
            if !self.reach[e.to].get(e.from) {
                continue;
            }
            let Some(path) = self.path(e.to, e.from) else {
                continue;
            };
            // path runs to .. from; the cycle is from -> to -> .. -> from.
            let mut cycle = vec![e.from];
            cycle.extend(path.into_iter().take_while(|&x| x != e.from));
            if cycle.len() == 1 {
                // Self-loop `a < a` cannot be declared; defensive skip.
                continue;
            }
            let pivot = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| **v)
                .map(|(i, _)| i)
                .unwrap_or(0);
            cycle.rotate_left(pivot);
            found.insert(cycle);
        }
        found.into_iter().collect()
    }

    /// Shortest path `from -> .. -> to` along declared edges (BFS).
    fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    if y == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while cur != from {
                            cur = prev[cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict(from: usize, to: usize) -> Edge {
        Edge {
            from,
            to,
            strict: true,
        }
    }

    fn weak(from: usize, to: usize) -> Edge {
        Edge {
            from,
            to,
            strict: false,
        }
    }

    #[test]
    fn chain_closes_transitively() {
        let c = Closure::build(3, vec![strict(0, 1), strict(1, 2)], true);
        assert!(c.lt(0, 2));
        assert!(c.leq(0, 2));
        assert!(!c.leq(2, 0));
        let raw = Closure::build(3, vec![strict(0, 1), strict(1, 2)], false);
        assert!(!raw.leq(0, 2));
        assert!(raw.lt(0, 1));
    }

    #[test]
    fn weak_then_strict_is_strict() {
        let c = Closure::build(3, vec![weak(0, 1), weak(1, 0), strict(1, 2)], true);
        assert!(c.lt(0, 2));
        assert!(c.equivalent(0, 1));
        assert!(c.strict_cycles().is_empty());
    }

    #[test]
    fn finds_three_cycle() {
        let c = Closure::build(3, vec![strict(0, 1), strict(1, 2), strict(2, 0)], true);
        assert_eq!(c.strict_cycles(), vec![vec![0, 1, 2]]);
        assert!(c.lt(0, 0));
    }

    #[test]
    fn indifference_against_strictness_is_a_two_cycle() {
        let c = Closure::build(2, vec![strict(0, 1), weak(0, 1), weak(1, 0)], true);
        assert_eq!(c.strict_cycles(), vec![vec![0, 1]]);
    }

    #[test]
    fn wide_graphs_cross_word_boundaries() {
        let n = 130;
        let edges = (0..n - 1).map(|i| strict(i, i + 1)).collect();
        let c = Closure::build(n, edges, true);
        assert!(c.lt(0, n - 1));
        assert!(!c.leq(n - 1, 0));
    }
}
