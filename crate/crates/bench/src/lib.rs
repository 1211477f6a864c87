//! Fixtures shared by the benchmarks.

use nfa_approx::synth::{random_pa, tentacles};
use nfa_approx::{Alphabet, Nfa, Pa};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn alphabet() -> Alphabet {
    Alphabet::new(["a", "b", "c", "d"]).expect("distinct tokens")
}

/// A union of `chains` tentacles of length 5 to 10 with a random 4-state model.
pub fn tentacle_instance(chains: usize, seed: u64) -> (Nfa, Pa) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = alphabet();
    let a = tentacles(&mut rng, &sigma, chains, 5, 10);
    let p = random_pa(&mut rng, &sigma, 4);
    (a, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        let (a, p) = tentacle_instance(5, 1);
        let (b, q) = tentacle_instance(5, 1);
        assert_eq!(a, b);
        assert_eq!(p.as_ppa(), q.as_ppa());
        assert_eq!(a.components().len(), 5);
    }
}
