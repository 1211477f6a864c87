//! Nondeterministic finite automata and the automata algebra used by the
//! probability and reduction layers.
//!
//! States are dense indices `0..num_states`. Operations that drop or rename
//! states return the mapping from new indices back to the old ones so callers
//! can track which original states survived.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

pub type StateId = usize;
pub type StateSet = BTreeSet<StateId>;

/// Default bound on the number of subset-states materialized by determinization.
pub const DEFAULT_DET_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    /// Outgoing transitions per state, sorted by (symbol, target), no duplicates.
    succ: Vec<Vec<(Symbol, StateId)>>,
    initial: Vec<bool>,
    finals: Vec<bool>,
    name: Option<String>,
}

/// An automaton derived from another one by keeping a subset of its states.
#[derive(Clone, Debug)]
pub struct SubAutomaton {
    pub nfa: Nfa,
    /// `kept[new] = old`, ascending.
    pub kept: Vec<StateId>,
}

impl SubAutomaton {
    pub fn kept_set(&self) -> StateSet {
        self.kept.iter().copied().collect()
    }
}

/// Result of the synchronous product; `pairs[q]` names the operand states of `q`.
#[derive(Clone, Debug)]
pub struct Product {
    pub nfa: Nfa,
    pub pairs: Vec<(StateId, StateId)>,
}

/// Result of the subset construction; `subsets[q]` is the sorted set of
/// original states represented by `q`.
#[derive(Clone, Debug)]
pub struct Determinized {
    pub nfa: Nfa,
    pub subsets: Vec<Vec<StateId>>,
}

impl Nfa {
    /// An automaton with `num_states` states and no transitions, initial or final states.
    pub fn new(alphabet: Alphabet, num_states: usize) -> Self {
        Nfa {
            alphabet,
            succ: vec![Vec::new(); num_states],
            initial: vec![false; num_states],
            finals: vec![false; num_states],
            name: None,
        }
    }

    /// The empty automaton (no states).
    pub fn empty(alphabet: Alphabet) -> Self {
        Nfa::new(alphabet, 0)
    }

    /// One initial and final state with a self-loop on every symbol.
    pub fn universal(alphabet: Alphabet) -> Self {
        let mut a = Nfa::new(alphabet, 1);
        a.set_initial(0, true);
        a.set_final(0, true);
        for s in a.alphabet.symbols() {
            a.succ[0].push((s, 0));
        }
        a
    }

    /// Acceptor of a single word, as a chain of `|word| + 1` states.
    pub fn word(alphabet: Alphabet, word: &[Symbol]) -> Self {
        let mut a = Nfa::new(alphabet, word.len() + 1);
        a.set_initial(0, true);
        a.set_final(word.len(), true);
        for (i, &s) in word.iter().enumerate() {
            a.add_transition(i, s, i + 1);
        }
        a
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn add_state(&mut self) -> StateId {
        self.succ.push(Vec::new());
        self.initial.push(false);
        self.finals.push(false);
        self.succ.len() - 1
    }

    pub fn add_transition(&mut self, src: StateId, sym: Symbol, dst: StateId) {
        assert!(src < self.num_states() && dst < self.num_states(), "state out of range");
        assert!(sym < self.alphabet.len(), "symbol out of range");
        let list = &mut self.succ[src];
        if let Err(pos) = list.binary_search(&(sym, dst)) {
            list.insert(pos, (sym, dst));
        }
    }

    pub fn set_initial(&mut self, q: StateId, on: bool) {
        self.initial[q] = on;
    }

    pub fn set_final(&mut self, q: StateId, on: bool) {
        self.finals[q] = on;
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial[q]
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.initial[q])
    }

    pub fn final_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.finals[q])
    }

    pub fn initial_set(&self) -> StateSet {
        self.initial_states().collect()
    }

    pub fn final_set(&self) -> StateSet {
        self.final_states().collect()
    }

    /// Outgoing transitions of `q`, sorted by (symbol, target).
    pub fn successors(&self, q: StateId) -> &[(Symbol, StateId)] {
        &self.succ[q]
    }

    /// Targets of `q` on `sym` (as a sorted slice of `(sym, target)` pairs).
    pub fn successors_on(&self, q: StateId, sym: Symbol) -> &[(Symbol, StateId)] {
        let list = &self.succ[q];
        let lo = list.partition_point(|&(s, _)| s < sym);
        let hi = list.partition_point(|&(s, _)| s <= sym);
        &list[lo..hi]
    }

    /// All transitions in (src, symbol, dst) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Symbol, StateId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(p, l)| l.iter().map(move |&(s, q)| (p, s, q)))
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial_states().count() <= 1
            && self
                .succ
                .iter()
                .all(|l| l.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// Every state has at least one successor per symbol.
    pub fn is_complete(&self) -> bool {
        self.first_missing_transition().is_none()
    }

    pub(crate) fn first_missing_transition(&self) -> Option<(StateId, Symbol)> {
        for q in self.states() {
            for s in self.alphabet.symbols() {
                if self.successors_on(q, s).is_empty() {
                    return Some((q, s));
                }
            }
        }
        None
    }

    /// Forward-reachable states from `from`, including `from` itself.
    pub fn reach(&self, from: &StateSet) -> StateSet {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = from.iter().copied().collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(p) = stack.pop() {
            for &(_, q) in &self.succ[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        self.states().filter(|&q| seen[q]).collect()
    }

    /// States from which some state of `to` is reachable (including `to`).
    pub fn coreach(&self, to: &StateSet) -> StateSet {
        let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for (p, _, q) in self.transitions() {
            pred[q].push(p);
        }
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = to.iter().copied().collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &pred[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        self.states().filter(|&q| seen[q]).collect()
    }

    /// States lying on some path from an initial to a final state.
    pub fn useful_states(&self) -> StateSet {
        let fwd = self.reach(&self.initial_set());
        let bwd = self.coreach(&self.final_set());
        fwd.intersection(&bwd).copied().collect()
    }

    /// Restriction to states both reachable and co-reachable.
    pub fn trim(&self) -> SubAutomaton {
        self.restrict(&self.useful_states())
    }

    pub fn is_trim(&self) -> bool {
        self.useful_states().len() == self.num_states()
    }

    /// Restriction to `keep`; states are renumbered in ascending order.
    pub fn restrict(&self, keep: &StateSet) -> SubAutomaton {
        let mut new_id = vec![usize::MAX; self.num_states()];
        let kept: Vec<StateId> = keep.iter().copied().collect();
        for (i, &q) in kept.iter().enumerate() {
            new_id[q] = i;
        }
        let mut out = Nfa::new(self.alphabet.clone(), kept.len());
        out.name = self.name.clone();
        for (i, &q) in kept.iter().enumerate() {
            out.initial[i] = self.initial[q];
            out.finals[i] = self.finals[q];
            // Source list is sorted by (sym, dst) and renaming is monotone.
            out.succ[i] = self.succ[q]
                .iter()
                .filter(|&&(_, d)| new_id[d] != usize::MAX)
                .map(|&(s, d)| (s, new_id[d]))
                .collect();
        }
        SubAutomaton { nfa: out, kept }
    }

    /// Replaces the outgoing transitions of every state in `r` by self-loops
    /// over the whole alphabet and makes those states accepting.
    pub fn self_loop(&self, r: &StateSet) -> Nfa {
        let mut out = self.clone();
        for &q in r {
            out.succ[q] = self.alphabet.symbols().map(|s| (s, q)).collect();
            out.finals[q] = true;
        }
        out
    }

    /// Disjoint union: states of `other` are shifted by `self.num_states()`.
    pub fn union(&self, other: &Nfa) -> Result<Nfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let off = self.num_states();
        let mut out = self.clone();
        out.succ.extend(
            other
                .succ
                .iter()
                .map(|l| l.iter().map(|&(s, q)| (s, q + off)).collect()),
        );
        out.initial.extend_from_slice(&other.initial);
        out.finals.extend_from_slice(&other.finals);
        Ok(out)
    }

    /// Synchronous product over pairs reachable from `I1 × I2`.
    pub fn product(&self, other: &Nfa) -> Result<Product> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |pair, pairs: &mut Vec<_>, queue: &mut VecDeque<_>| -> StateId {
            *ids.entry(pair).or_insert_with(|| {
                pairs.push(pair);
                queue.push_back(pair);
                pairs.len() - 1
            })
        };
        for p in self.initial_states() {
            for q in other.initial_states() {
                intern((p, q), &mut pairs, &mut queue);
            }
        }
        let mut edges: Vec<(StateId, Symbol, StateId)> = Vec::new();
        let mut next = 0;
        while let Some((p, q)) = queue.pop_front() {
            let src = next;
            next += 1;
            let (l1, l2) = (&self.succ[p], &other.succ[q]);
            let (mut i, mut j) = (0, 0);
            while i < l1.len() && j < l2.len() {
                let (s1, s2) = (l1[i].0, l2[j].0);
                if s1 < s2 {
                    i += 1;
                } else if s2 < s1 {
                    j += 1;
                } else {
                    let i_end = i + l1[i..].partition_point(|t| t.0 == s1);
                    let j_end = j + l2[j..].partition_point(|t| t.0 == s1);
                    for &(_, p2) in &l1[i..i_end] {
                        for &(_, q2) in &l2[j..j_end] {
                            let dst = intern((p2, q2), &mut pairs, &mut queue);
                            edges.push((src, s1, dst));
                        }
                    }
                    i = i_end;
                    j = j_end;
                }
            }
        }
        let mut nfa = Nfa::new(self.alphabet.clone(), pairs.len());
        for (i, &(p, q)) in pairs.iter().enumerate() {
            nfa.initial[i] = self.initial[p] && other.initial[q];
            nfa.finals[i] = self.finals[p] && other.finals[q];
        }
        nfa.extend_transitions(edges);
        Ok(Product { nfa, pairs })
    }

    /// Every accepted word has exactly one accepting run: no useful state of
    /// the self-product pairs two distinct states.
    pub fn is_unambiguous(&self) -> bool {
        let prod = self.product(self).expect("same alphabet");
        prod.nfa
            .useful_states()
            .iter()
            .all(|&s| prod.pairs[s].0 == prod.pairs[s].1)
    }

    /// Subset construction over subsets reachable from the initial set. The
    /// empty subset is not materialized, so the result may be partial.
    pub fn determinize(&self, cap: usize) -> Result<Determinized> {
        let start: Vec<StateId> = self.initial_states().collect();
        if start.is_empty() {
            return Ok(Determinized {
                nfa: Nfa::empty(self.alphabet.clone()),
                subsets: Vec::new(),
            });
        }
        let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut subsets = vec![start.clone()];
        ids.insert(start, 0);
        let mut edges = Vec::new();
        let mut work = 0;
        let mut buckets: Vec<Vec<StateId>> = vec![Vec::new(); self.alphabet.len()];
        while work < subsets.len() {
            for b in buckets.iter_mut() {
                b.clear();
            }
            for &p in &subsets[work] {
                for &(s, q) in &self.succ[p] {
                    buckets[s].push(q);
                }
            }
            for (s, bucket) in buckets.iter_mut().enumerate() {
                if bucket.is_empty() {
                    continue;
                }
                bucket.sort_unstable();
                bucket.dedup();
                let dst = match ids.get(bucket.as_slice()) {
                    Some(&d) => d,
                    None => {
                        if subsets.len() >= cap {
                            return Err(Error::DeterminizationCap { cap });
                        }
                        let d = subsets.len();
                        ids.insert(bucket.clone(), d);
                        subsets.push(bucket.clone());
                        d
                    }
                };
                edges.push((work, s, dst));
            }
            work += 1;
        }
        let mut nfa = Nfa::new(self.alphabet.clone(), subsets.len());
        nfa.name = self.name.clone();
        nfa.initial[0] = true;
        for (i, set) in subsets.iter().enumerate() {
            nfa.finals[i] = set.iter().any(|&q| self.finals[q]);
        }
        nfa.extend_transitions(edges);
        Ok(Determinized { nfa, subsets })
    }

    /// Automaton for the words having an accepting run that visits `q`.
    ///
    /// States are pairs `(p, seen)` where `seen` records whether the run has
    /// entered `q`; only pairs reachable from the initial ones are built.
    pub fn through_state(&self, q: StateId) -> Nfa {
        assert!(q < self.num_states(), "state out of range");
        let mut ids: HashMap<(StateId, bool), StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, bool)> = Vec::new();
        let mut edges = Vec::new();
        for p in self.initial_states() {
            let key = (p, p == q);
            ids.entry(key).or_insert_with(|| {
                pairs.push(key);
                pairs.len() - 1
            });
        }
        let mut work = 0;
        while work < pairs.len() {
            let (p, seen) = pairs[work];
            for &(s, p2) in &self.succ[p] {
                let key = (p2, seen || p2 == q);
                let dst = *ids.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                edges.push((work, s, dst));
            }
            work += 1;
        }
        let mut out = Nfa::new(self.alphabet.clone(), pairs.len());
        for (i, &(p, seen)) in pairs.iter().enumerate() {
            out.initial[i] = self.initial[p] && seen == (p == q);
            out.finals[i] = seen && self.finals[p];
        }
        out.extend_transitions(edges);
        out
    }

    /// Copy of the automaton whose final set is `targets`; its language is
    /// the banguage of `targets`.
    pub fn with_finals(&self, targets: &StateSet) -> Nfa {
        let mut out = self.clone();
        out.finals = vec![false; self.num_states()];
        for &q in targets {
            out.finals[q] = true;
        }
        out
    }

    /// Membership via on-the-fly subset propagation.
    pub fn accepts(&self, word: &[Symbol]) -> Result<bool> {
        let mut cur = vec![false; self.num_states()];
        for q in self.initial_states() {
            cur[q] = true;
        }
        let mut next = vec![false; self.num_states()];
        for &s in word {
            if s >= self.alphabet.len() {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
            next.iter_mut().for_each(|b| *b = false);
            for p in self.states().filter(|&p| cur[p]) {
                for &(_, q) in self.successors_on(p, s) {
                    next[q] = true;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(self.states().any(|q| cur[q] && self.finals[q]))
    }

    /// Weakly-connected components of the transition graph, ordered by their
    /// smallest state.
    pub fn components(&self) -> Vec<StateSet> {
        let mut parent: Vec<StateId> = self.states().collect();
        fn find(parent: &mut [StateId], mut x: StateId) -> StateId {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (p, _, q) in self.transitions() {
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                parent[rp.max(rq)] = rp.min(rq);
            }
        }
        let mut groups: Vec<StateSet> = Vec::new();
        let mut slot: HashMap<StateId, usize> = HashMap::new();
        for q in self.states() {
            let r = find(&mut parent, q);
            let idx = *slot.entry(r).or_insert_with(|| {
                groups.push(StateSet::new());
                groups.len() - 1
            });
            groups[idx].insert(q);
        }
        groups
    }

    fn extend_transitions(&mut self, edges: impl IntoIterator<Item = (StateId, Symbol, StateId)>) {
        for (p, s, q) in edges {
            self.succ[p].push((s, q));
        }
        for l in &mut self.succ {
            l.sort_unstable();
            l.dedup();
        }
    }
}
