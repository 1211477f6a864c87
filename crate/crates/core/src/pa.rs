//! Probabilistic and pseudo-probabilistic automata.

use std::fmt;
use std::ops::Deref;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::nfa::{Nfa, StateId, StateSet};

/// Absolute tolerance for the stochasticity conditions.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Weighted automaton with nonnegative weights and no stochasticity constraints.
///
/// Transition weights are stored sparsely per source state, sorted by
/// (symbol, target); zero weights are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Ppa {
    alphabet: Alphabet,
    initial: Vec<f64>,
    finals: Vec<f64>,
    trans: Vec<Vec<(Symbol, StateId, f64)>>,
}

impl Ppa {
    pub fn new(alphabet: Alphabet, num_states: usize) -> Self {
        Ppa {
            alphabet,
            initial: vec![0.0; num_states],
            finals: vec![0.0; num_states],
            trans: vec![Vec::new(); num_states],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn finals(&self) -> &[f64] {
        &self.finals
    }

    pub fn set_initial(&mut self, q: StateId, w: f64) {
        self.initial[q] = w;
    }

    pub fn set_final(&mut self, q: StateId, w: f64) {
        self.finals[q] = w;
    }

    /// Sets the weight of `src --sym--> dst`; a zero weight removes the entry.
    pub fn set_transition(&mut self, src: StateId, sym: Symbol, dst: StateId, w: f64) {
        assert!(src < self.num_states() && dst < self.num_states(), "state out of range");
        assert!(sym < self.alphabet.len(), "symbol out of range");
        let list = &mut self.trans[src];
        match list.binary_search_by(|&(s, d, _)| (s, d).cmp(&(sym, dst))) {
            Ok(i) if w == 0.0 => {
                list.remove(i);
            }
            Ok(i) => list[i].2 = w,
            Err(_) if w == 0.0 => {}
            Err(i) => list.insert(i, (sym, dst, w)),
        }
    }

    pub fn transitions_from(&self, q: StateId) -> &[(Symbol, StateId, f64)] {
        &self.trans[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Symbol, StateId, f64)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(p, l)| l.iter().map(move |&(s, q, w)| (p, s, q, w)))
    }

    /// Total outgoing mass of `q`: transitions plus final weight.
    pub fn row_mass(&self, q: StateId) -> f64 {
        self.trans[q].iter().map(|t| t.2).sum::<f64>() + self.finals[q]
    }

    /// NFA of the strictly positive entries.
    pub fn support(&self) -> Nfa {
        let mut a = Nfa::new(self.alphabet.clone(), self.num_states());
        for q in 0..self.num_states() {
            a.set_initial(q, self.initial[q] > 0.0);
            a.set_final(q, self.finals[q] > 0.0);
        }
        for (p, s, q, w) in self.transitions() {
            if w > 0.0 {
                a.add_transition(p, s, q);
            }
        }
        a
    }

    /// Restriction to `keep`, renumbered ascending.
    pub fn restrict(&self, keep: &StateSet) -> Ppa {
        let mut new_id = vec![usize::MAX; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            new_id[q] = i;
        }
        let mut out = Ppa::new(self.alphabet.clone(), keep.len());
        for (i, &q) in keep.iter().enumerate() {
            out.initial[i] = self.initial[q];
            out.finals[i] = self.finals[q];
            out.trans[i] = self.trans[q]
                .iter()
                .filter(|t| new_id[t.1] != usize::MAX)
                .map(|&(s, d, w)| (s, new_id[d], w))
                .collect();
        }
        out
    }

    /// Restriction to the states of the trimmed support.
    pub fn trim(&self) -> Ppa {
        self.restrict(&self.support().useful_states())
    }

    /// The same automaton with every final weight set to 1.
    pub fn with_unit_finals(&self) -> Ppa {
        let mut out = self.clone();
        out.finals.iter_mut().for_each(|f| *f = 1.0);
        out
    }

    /// Row vector `initial^T · Γ_word`.
    pub fn forward(&self, word: &[Symbol]) -> Result<Vec<f64>> {
        let mut v = self.initial.clone();
        let mut next = vec![0.0; self.num_states()];
        for &s in word {
            if s >= self.alphabet.len() {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
            self.step(&v, s, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        Ok(v)
    }

    /// `out = v · Γ_sym`.
    pub(crate) fn step(&self, v: &[f64], sym: Symbol, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (p, &vp) in v.iter().enumerate() {
            if vp == 0.0 {
                continue;
            }
            let list = &self.trans[p];
            let lo = list.partition_point(|t| t.0 < sym);
            for &(s, q, w) in &list[lo..] {
                if s != sym {
                    break;
                }
                out[q] += vp * w;
            }
        }
    }

    /// `initial^T · Γ_word · finals`.
    pub fn word_prob(&self, word: &[Symbol]) -> Result<f64> {
        let v = self.forward(word)?;
        Ok(dot(&v, &self.finals))
    }

    /// `initial^T · Γ_word · 1`.
    pub fn word_weight(&self, word: &[Symbol]) -> Result<f64> {
        Ok(self.forward(word)?.iter().sum())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A stochasticity or well-formedness violation.
#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostic {
    InitialMass(f64),
    RowMass { state: StateId, mass: f64 },
    OutOfRange { what: &'static str, state: StateId, value: f64 },
    NotTrim { states: Vec<StateId> },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::InitialMass(m) => write!(f, "initial weights sum to {m}, expected 1"),
            Diagnostic::RowMass { state, mass } => {
                write!(f, "state {state} has outgoing mass {mass}, expected 1")
            }
            Diagnostic::OutOfRange { what, state, value } => {
                write!(f, "{what} weight {value} at state {state} is outside [0, 1]")
            }
            Diagnostic::NotTrim { states } => write!(f, "support is not trim at states {states:?}"),
        }
    }
}

/// Checks the two stochasticity conditions, entry ranges and trimness of the support.
pub fn validate_pa(p: &Ppa) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let in_range = |v: f64| (0.0..=1.0).contains(&v);
    for q in 0..p.num_states() {
        if !in_range(p.initial[q]) {
            diags.push(Diagnostic::OutOfRange { what: "initial", state: q, value: p.initial[q] });
        }
        if !in_range(p.finals[q]) {
            diags.push(Diagnostic::OutOfRange { what: "final", state: q, value: p.finals[q] });
        }
        for &(_, _, w) in &p.trans[q] {
            if !in_range(w) {
                diags.push(Diagnostic::OutOfRange { what: "transition", state: q, value: w });
            }
        }
    }
    let init: f64 = p.initial.iter().sum();
    if (init - 1.0).abs() > STOCHASTIC_TOL {
        diags.push(Diagnostic::InitialMass(init));
    }
    for q in 0..p.num_states() {
        let mass = p.row_mass(q);
        if (mass - 1.0).abs() > STOCHASTIC_TOL {
            diags.push(Diagnostic::RowMass { state: q, mass });
        }
    }
    let useful = p.support().useful_states();
    if useful.len() != p.num_states() {
        let states = (0..p.num_states()).filter(|q| !useful.contains(q)).collect();
        diags.push(Diagnostic::NotTrim { states });
    }
    diags
}

/// A validated probabilistic automaton: its support is trim and both
/// stochasticity conditions hold within [`STOCHASTIC_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pa(Ppa);

impl Pa {
    /// Trims the support of `ppa` and validates the result. Nothing is renormalized.
    pub fn new(ppa: Ppa) -> Result<Pa> {
        let trimmed = ppa.trim();
        let diags = validate_pa(&trimmed);
        if diags.is_empty() {
            Ok(Pa(trimmed))
        } else {
            Err(Error::InvalidPa(diags.iter().map(ToString::to_string).collect()))
        }
    }

    pub fn as_ppa(&self) -> &Ppa {
        &self.0
    }

    pub fn into_ppa(self) -> Ppa {
        self.0
    }
}

impl Deref for Pa {
    type Target = Ppa;

    fn deref(&self) -> &Ppa {
        &self.0
    }
}

/// One-state automaton giving every word `w` probability `μ^(|w|+1)` with
/// `μ = 1/(|Σ|+1)`.
pub fn make_p_exp(alphabet: &Alphabet) -> Pa {
    let mu = 1.0 / (alphabet.len() as f64 + 1.0);
    let mut p = Ppa::new(alphabet.clone(), 1);
    p.set_initial(0, 1.0);
    p.set_final(0, mu);
    for s in alphabet.symbols() {
        p.set_transition(0, s, 0, mu);
    }
    Pa::new(p).expect("P_exp is stochastic")
}
