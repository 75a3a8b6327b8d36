//! Finite automaton for `{w : L ⪯ σⁿ(w) ⪯ U for all n}` and brute-force
//! checks against it: word counts, spectral entropy and extremal sequences.
//!
//! A state is the pair of strongest pending constraints `(M, N)`, a shift of
//! `L` and a shift of `U`: the unread suffix must satisfy `M ⪯ suffix ⪯ N`.
//! Every earlier start position contributes one such constraint and the
//! conjunction of `suffix ⪰ Xᵢ` is `suffix ⪰ max Xᵢ`, so the pair is exact.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::seq::EpSeq;
use crate::survivor::SurvivorShift;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the constrained language is empty")]
    EmptyLanguage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct BoundAutomaton {
    lower: EpSeq,
    upper: EpSeq,
    states: Vec<(EpSeq, EpSeq)>,
    trans: Vec<[Option<usize>; 2]>,
    live: Vec<bool>,
    start: usize,
}

impl BoundAutomaton {
    /// Automaton of the survivor shift `Ω(1s, 0t)`.
    pub fn build(shift: &SurvivorShift) -> Self {
        Self::build_bounds(&shift.s, &shift.t)
    }

    /// Automaton of the raw constraint bounds `(L, U)`.
    pub fn build_bounds(lower: &EpSeq, upper: &EpSeq) -> Self {
        let mut index: HashMap<(EpSeq, EpSeq), usize> = HashMap::new();
        let mut states = Vec::new();
        let mut trans = Vec::new();
        let start_key = (lower.clone(), upper.clone());
        index.insert(start_key.clone(), 0);
        states.push(start_key);
        trans.push([None, None]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for x in 0..2u8 {
                let Some(next) = step(&states[i], x, lower, upper) else { continue };
                let j = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    trans.push([None, None]);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                trans[i][x as usize] = Some(j);
            }
        }
        let live = prune(&trans);
        BoundAutomaton { lower: lower.clone(), upper: upper.clone(), states, trans, live, start: 0 }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn live_count(&self) -> usize {
        self.live.iter().filter(|&&l| l).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.live[self.start]
    }

    fn live_next(&self, i: usize, x: u8) -> Option<usize> {
        self.trans[i][x as usize].filter(|&j| self.live[j])
    }

    /// Path-following acceptance of an eventually periodic sequence.
    pub fn accepts(&self, w: &EpSeq) -> bool {
        let mut seen = HashMap::new();
        let mut state = self.start;
        for pos in 0.. {
            if pos >= w.pre_len() {
                let phase = (pos - w.pre_len()) % w.per_len();
                if seen.insert((state, phase), pos).is_some() {
                    return true;
                }
            }
            match self.trans[state][w.at(pos) as usize] {
                Some(j) => state = j,
                None => return false,
            }
        }
        unreachable!()
    }

    /// Whether the finite word extends to an accepted sequence.
    pub fn accepts_word(&self, w: &[u8]) -> bool {
        let mut state = self.start;
        for &x in w {
            match self.live_next(state, x) {
                Some(j) => state = j,
                None => return false,
            }
        }
        self.live[state]
    }

    /// Number of length-`n` words that extend to an accepted sequence.
    pub fn count_words(&self, n: usize) -> BigUint {
        if self.is_empty() {
            return BigUint::zero();
        }
        let mut counts = vec![BigUint::zero(); self.states.len()];
        counts[self.start] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); self.states.len()];
            for (i, c) in counts.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for x in 0..2 {
                    if let Some(j) = self.live_next(i, x) {
                        next[j] += c;
                    }
                }
            }
            counts = next;
        }
        counts.into_iter().sum()
    }

    /// `ln` of the spectral radius of the live part.
    pub fn entropy_estimate(&self) -> f64 {
        let mut g = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..self.states.len()).map(|i| g.add_node(i)).collect();
        for i in (0..self.states.len()).filter(|&i| self.live[i]) {
            for x in 0..2 {
                if let Some(j) = self.live_next(i, x) {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let rho = tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.iter().all(|n| self.live[g[*n]]))
            .map(|c| {
                let members: Vec<usize> = c.iter().map(|n| g[*n]).collect();
                self.component_radius(&members)
            })
            .fold(0.0, f64::max);
        if rho > 1.0 {
            rho.ln()
        } else {
            0.0
        }
    }

    /// Perron root of one strongly connected component, by power iteration on `I + A`.
    fn component_radius(&self, members: &[usize]) -> f64 {
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let edges: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|&i| (0..2).filter_map(move |x| self.live_next(i, x).map(|j| (i, j))))
            .filter_map(|(i, j)| Some((pos[&i], *pos.get(&j)?)))
            .collect();
        if edges.is_empty() {
            return 0.0;
        }
        if edges.len() == members.len() {
            return 1.0;
        }
        // Collatz-Wielandt: min and max of (Bv)_j / v_j bracket the Perron root of B = I + A.
        let n = members.len();
        let mut v = vec![1.0 / n as f64; n];
        let (mut lo, mut hi) = (0.0, f64::INFINITY);
        for _ in 0..1_000_000 {
            let mut w = v.clone();
            for &(i, j) in &edges {
                w[j] += v[i];
            }
            lo = f64::INFINITY;
            hi = 0.0;
            for (x, y) in v.iter().zip(&w) {
                lo = f64::min(lo, y / x);
                hi = f64::max(hi, y / x);
            }
            let total: f64 = w.iter().sum();
            v = w.into_iter().map(|x| x / total).collect();
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        (lo + hi) / 2.0 - 1.0
    }

    /// Lexicographically smallest or largest accepted sequence.
    pub fn extremal(&self, which: Extreme) -> Result<EpSeq, OracleError> {
        if self.is_empty() {
            return Err(OracleError::EmptyLanguage);
        }
        let order: [u8; 2] = match which {
            Extreme::Min => [0, 1],
            Extreme::Max => [1, 0],
        };
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut word = Vec::new();
        let mut state = self.start;
        loop {
            if let Some(&k) = seen.get(&state) {
                return Ok(EpSeq::new(&word[..k], &word[k..]).expect("cycle is non-empty"));
            }
            seen.insert(state, word.len());
            let (x, j) = order
                .iter()
                .find_map(|&x| self.live_next(state, x).map(|j| (x, j)))
                .expect("live states have a live successor");
            word.push(x);
            state = j;
        }
    }

    /// Graphviz rendering of the live part.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph bounds {\n  rankdir=LR;\n");
        for (i, (m, n)) in self.states.iter().enumerate().filter(|(i, _)| self.live[*i]) {
            let shape = if i == self.start { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{i} [shape={shape}, label=\"{m}\\n{n}\"];");
        }
        for i in (0..self.states.len()).filter(|&i| self.live[i]) {
            for x in 0..2 {
                if let Some(j) = self.live_next(i, x) {
                    let _ = writeln!(out, "  q{i} -> q{j} [label=\"{x}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn bounds(&self) -> (&EpSeq, &EpSeq) {
        (&self.lower, &self.upper)
    }
}

fn step(state: &(EpSeq, EpSeq), x: u8, lower: &EpSeq, upper: &EpSeq) -> Option<(EpSeq, EpSeq)> {
    let (m, n) = state;
    let m2 = match x.cmp(&m.first()) {
        std::cmp::Ordering::Less => return None,
        std::cmp::Ordering::Greater => lower.clone(),
        std::cmp::Ordering::Equal => m.shift(1).max(lower.clone()),
    };
    let n2 = match x.cmp(&n.first()) {
        std::cmp::Ordering::Greater => return None,
        std::cmp::Ordering::Less => upper.clone(),
        std::cmp::Ordering::Equal => n.shift(1).min(upper.clone()),
    };
    Some((m2, n2))
}

/// States from which an infinite path exists.
fn prune(trans: &[[Option<usize>; 2]]) -> Vec<bool> {
    let mut live = vec![true; trans.len()];
    loop {
        let mut changed = false;
        for i in 0..trans.len() {
            if live[i] && !trans[i].iter().flatten().any(|&j| live[j]) {
                live[i] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}
