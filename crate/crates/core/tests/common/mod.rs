#![allow(dead_code)]

use nfa_approx::synth::{random_nfa, random_pa};
use nfa_approx::{Alphabet, Nfa, Pa, Symbol, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(k: usize) -> Alphabet {
    Alphabet::new(["a", "b", "c", "d"].into_iter().take(k)).unwrap()
}

/// A random (PA, NFA) pair over a shared alphabet of 1 to 3 symbols.
pub fn instance(seed: u64, max_pa: usize, max_nfa: usize) -> (Pa, Nfa) {
    let mut r = rng(seed);
    let k = r.gen_range(1..=3);
    let sigma = alphabet(k);
    let p = random_pa(&mut r, &sigma, max_pa);
    let density = r.gen_range(0.1..0.45);
    let a = random_nfa(&mut r, &sigma, max_nfa, density);
    (p, a)
}

/// Every word of length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for s in alphabet.symbols() {
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn accepts(a: &Nfa, w: &[Symbol]) -> bool {
    a.accepts(w).unwrap()
}

pub fn random_subset<R: Rng>(r: &mut R, n: usize) -> nfa_approx::StateSet {
    let bias = r.gen_range(0.0..1.0);
    (0..n).filter(|_| r.gen_bool(bias)).collect()
}
