//! Learning a traffic model from a hand-made DFA skeleton and a corpus, and
//! measuring empirical misclassification on a packet sample.

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::nfa::{Nfa, StateId};
use crate::pa::{Pa, Ppa};

/// Event counts collected by running a corpus through a DFA skeleton.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    pub visit: Vec<u64>,
    /// `trans_count[q][a]`
    pub trans_count: Vec<Vec<u64>>,
    pub end_count: Vec<u64>,
}

impl CountTable {
    pub fn new(num_states: usize, num_symbols: usize) -> Self {
        CountTable {
            visit: vec![0; num_states],
            trans_count: vec![vec![0; num_symbols]; num_states],
            end_count: vec![0; num_states],
        }
    }

    /// Outgoing events (transitions taken plus words ending) at `q`.
    pub fn events(&self, q: StateId) -> u64 {
        self.trans_count[q].iter().sum::<u64>() + self.end_count[q]
    }

    /// Adds the counts of `other`; counting is a commutative fold.
    pub fn merge(&mut self, other: &CountTable) {
        for q in 0..self.visit.len() {
            self.visit[q] += other.visit[q];
            self.end_count[q] += other.end_count[q];
            for (x, y) in self.trans_count[q].iter_mut().zip(&other.trans_count[q]) {
                *x += y;
            }
        }
    }
}

fn check_skeleton(skeleton: &Nfa) -> Result<StateId> {
    if !skeleton.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    if let Some((state, sym)) = skeleton.first_missing_transition() {
        return Err(Error::NotComplete {
            state,
            symbol: skeleton.alphabet().token(sym).to_string(),
        });
    }
    skeleton
        .initial_states()
        .next()
        .ok_or_else(|| Error::Internal("skeleton has no initial state".into()))
}

/// Runs every word through the skeleton and tallies visits, transitions and word ends.
pub fn count_corpus<'w, I>(skeleton: &Nfa, corpus: I) -> Result<CountTable>
where
    I: IntoIterator<Item = &'w [Symbol]>,
{
    let start = check_skeleton(skeleton)?;
    let k = skeleton.alphabet().len();
    let mut table = CountTable::new(skeleton.num_states(), k);
    let mut words = 0u64;
    for word in corpus {
        words += 1;
        let mut q = start;
        table.visit[q] += 1;
        for &s in word {
            if s >= k {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
            table.trans_count[q][s] += 1;
            q = skeleton.successors_on(q, s)[0].1;
            table.visit[q] += 1;
        }
        table.end_count[q] += 1;
    }
    if words == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(table)
}

/// Builds the PA from counts: each state's transition and stop frequencies
/// are normalized by its number of outgoing events. Unvisited states vanish.
pub fn pa_from_counts(skeleton: &Nfa, table: &CountTable) -> Result<Pa> {
    let start = check_skeleton(skeleton)?;
    let mut p = Ppa::new(skeleton.alphabet().clone(), skeleton.num_states());
    p.set_initial(start, 1.0);
    for q in skeleton.states() {
        let total = table.events(q);
        if total == 0 {
            continue;
        }
        let total = total as f64;
        p.set_final(q, table.end_count[q] as f64 / total);
        for (s, &c) in table.trans_count[q].iter().enumerate() {
            if c > 0 {
                let dst = skeleton.successors_on(q, s)[0].1;
                p.set_transition(q, s, dst, c as f64 / total);
            }
        }
    }
    let useful = p.support().useful_states();
    if let Some(q) = useful.iter().find(|&&q| table.events(q) == 0) {
        return Err(Error::Internal(format!("state {q} survives trimming without events")));
    }
    Pa::new(p)
}

/// Learns a PA from a deterministic, complete skeleton and a nonempty corpus.
pub fn learn_pa<'w, I>(skeleton: &Nfa, corpus: I) -> Result<Pa>
where
    I: IntoIterator<Item = &'w [Symbol]>,
{
    let table = count_corpus(skeleton, corpus)?;
    pa_from_counts(skeleton, &table)
}

/// Adds a non-final sink absorbing every missing transition. Complete inputs
/// are returned unchanged.
pub fn complete_dfa(skeleton: &Nfa) -> Result<Nfa> {
    if !skeleton.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    if skeleton.is_complete() {
        return Ok(skeleton.clone());
    }
    let mut out = skeleton.clone();
    let sink = out.add_state();
    for q in out.states() {
        for s in out.alphabet().symbols() {
            if out.successors_on(q, s).is_empty() {
                out.add_transition(q, s, sink);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrafficError {
    pub mismatches: u64,
    /// Accepted by the original, rejected by the reduced automaton.
    pub false_negatives: u64,
    /// Rejected by the original, accepted by the reduced automaton.
    pub false_positives: u64,
    pub total: u64,
    pub ratio: f64,
}

/// Fraction of sample words classified differently by the two automata.
/// Duplicates count with multiplicity.
pub fn traffic_error<'w, I>(a: &Nfa, reduced: &Nfa, sample: I) -> Result<TrafficError>
where
    I: IntoIterator<Item = &'w [Symbol]>,
{
    if a.alphabet() != reduced.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let (mut fneg, mut fpos, mut total) = (0u64, 0u64, 0u64);
    for w in sample {
        total += 1;
        match (a.accepts(w)?, reduced.accepts(w)?) {
            (true, false) => fneg += 1,
            (false, true) => fpos += 1,
            _ => {}
        }
    }
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mismatches = fneg + fpos;
    Ok(TrafficError {
        mismatches,
        false_negatives: fneg,
        false_positives: fpos,
        total,
        ratio: mismatches as f64 / total as f64,
    })
}
