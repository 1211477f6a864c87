//! Random and structured instance generators for tests and benchmarks.

use rand::Rng;

use crate::alphabet::Alphabet;
use crate::nfa::Nfa;
use crate::pa::{Pa, Ppa};

/// Random PA with `1..=max_states` states. Entries are drawn sparsely, the
/// support is trimmed, and each row is then normalized.
pub fn random_pa<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, max_states: usize) -> Pa {
    loop {
        let n = rng.gen_range(1..=max_states.max(1));
        let mut p = Ppa::new(alphabet.clone(), n);
        for q in 0..n {
            if rng.gen_bool(0.4) {
                p.set_initial(q, rng.gen_range(0.1..1.0));
            }
            if rng.gen_bool(0.7) {
                p.set_final(q, rng.gen_range(0.05..1.0));
            }
            for s in alphabet.symbols() {
                for r in 0..n {
                    if rng.gen_bool(0.35) {
                        p.set_transition(q, s, r, rng.gen_range(0.05..1.0));
                    }
                }
            }
        }
        if let Some(pa) = normalize(p.trim()) {
            return pa;
        }
    }
}

fn normalize(mut p: Ppa) -> Option<Pa> {
    let n = p.num_states();
    let init: f64 = p.initial().iter().sum();
    if n == 0 || init <= 0.0 {
        return None;
    }
    for q in 0..n {
        let w = p.initial()[q] / init;
        p.set_initial(q, w);
        let mass = p.row_mass(q);
        let f = p.finals()[q] / mass;
        p.set_final(q, f);
        let row: Vec<_> = p.transitions_from(q).to_vec();
        for (s, r, w) in row {
            p.set_transition(q, s, r, w / mass);
        }
    }
    Pa::new(p).ok()
}

/// Random NFA with `1..=max_states` states; each possible transition is
/// present with probability `density`.
pub fn random_nfa<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &Alphabet,
    max_states: usize,
    density: f64,
) -> Nfa {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut a = Nfa::new(alphabet.clone(), n);
    for q in 0..n {
        a.set_initial(q, rng.gen_bool(0.25));
        a.set_final(q, rng.gen_bool(0.4));
        for s in alphabet.symbols() {
            for r in 0..n {
                if rng.gen_bool(density) {
                    a.add_transition(q, s, r);
                }
            }
        }
    }
    if a.initial_states().next().is_none() {
        let q = rng.gen_range(0..n);
        a.set_initial(q, true);
    }
    a
}

/// Disjoint union of `count` chains, each with its own initial state and a
/// random length in `min_len..=max_len` transitions. Every chain accepts at
/// its end and, with probability 1/3, also at one inner state.
pub fn tentacles<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &Alphabet,
    count: usize,
    min_len: usize,
    max_len: usize,
) -> Nfa {
    let mut a = Nfa::new(alphabet.clone(), 0);
    for _ in 0..count {
        let len = rng.gen_range(min_len..=max_len);
        let start = a.add_state();
        a.set_initial(start, true);
        let mut prev = start;
        for i in 1..=len {
            let q = a.add_state();
            let s = rng.gen_range(0..alphabet.len());
            a.add_transition(prev, s, q);
            // Occasional branching keeps the chains nondeterministic.
            if rng.gen_bool(0.15) {
                let s2 = rng.gen_range(0..alphabet.len());
                a.add_transition(prev, s2, q);
            }
            if i < len && rng.gen_bool(0.05) {
                a.set_final(q, true);
            }
            prev = q;
        }
        a.set_final(prev, true);
    }
    a
}
