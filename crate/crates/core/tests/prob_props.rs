mod common;

use common::{alphabet, instance, words_up_to};
use nfa_approx::lang_prob::{prob_lang_with, weight_lang};
use nfa_approx::traffic::complete_dfa;
use nfa_approx::{bf_prob_lang, distance, make_p_exp, prob_lang, Nfa, ProbOptions, DEFAULT_DET_CAP};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn complement(a: &Nfa) -> Nfa {
    let d = complete_dfa(&a.determinize(DEFAULT_DET_CAP).unwrap().nfa).unwrap();
    let mut c = d.clone();
    for q in d.states() {
        c.set_final(q, !d.is_final(q));
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prob_within_enumeration_bounds(seed in any::<u64>()) {
        let (p, a) = instance(seed, 4, 6);
        let max_len = if a.alphabet().len() == 3 { 8 } else { 11 };
        let bf = bf_prob_lang(&p, &a, max_len).unwrap();
        let rho = prob_lang(&p, &a).unwrap();
        prop_assert!(rho >= bf.lower - TOL, "{rho} < {}", bf.lower);
        prop_assert!(rho <= bf.lower + bf.tail + TOL, "{rho} > {} + {}", bf.lower, bf.tail);
    }

    #[test]
    fn language_and_complement_sum_to_one(seed in any::<u64>()) {
        let (p, a) = instance(seed, 4, 6);
        let total = prob_lang(&p, &a).unwrap() + prob_lang(&p, &complement(&a)).unwrap();
        prop_assert!((total - 1.0).abs() <= TOL, "{total}");
        let universal = prob_lang(&p, &Nfa::universal(a.alphabet().clone())).unwrap();
        prop_assert!((universal - 1.0).abs() <= TOL);
        prop_assert_eq!(prob_lang(&p, &Nfa::empty(a.alphabet().clone())).unwrap(), 0.0);
    }

    #[test]
    fn dense_and_iterative_solvers_agree(seed in any::<u64>()) {
        let (p, a) = instance(seed, 5, 7);
        let dense = prob_lang(&p, &a).unwrap();
        let opts = ProbOptions { dense_limit: 0, ..ProbOptions::default() };
        let iterative = prob_lang_with(&p, &a, &opts).unwrap();
        prop_assert!((dense - iterative).abs() <= 1e-10, "{dense} vs {iterative}");
    }

    #[test]
    fn weight_dominates_probability(seed in any::<u64>()) {
        let (p, a) = instance(seed, 4, 6);
        let w = weight_lang(&p, &a).unwrap();
        prop_assert!(w + TOL >= prob_lang(&p, &a).unwrap());
    }

    #[test]
    fn single_words_match_forward_probability(seed in any::<u64>(), len in 0usize..6) {
        let (p, a) = instance(seed, 4, 1);
        let word: Vec<_> = (0..len).map(|i| (seed as usize >> (2 * i)) % a.alphabet().len()).collect();
        let acceptor = Nfa::word(a.alphabet().clone(), &word);
        let rho = prob_lang(&p, &acceptor).unwrap();
        prop_assert!((rho - p.word_prob(&word).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn distance_is_a_pseudometric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (p, x) = instance(s1, 3, 5);
        let pick = |s: u64| {
            let b = instance(s, 1, 5).1;
            if b.alphabet() == x.alphabet() { b } else { Nfa::universal(x.alphabet().clone()) }
        };
        let (y, z) = (pick(s2), pick(s3));
        let xy = distance(&x, &y, &p).unwrap();
        prop_assert!((xy - distance(&y, &x, &p).unwrap()).abs() <= TOL);
        prop_assert!(distance(&x, &x, &p).unwrap() <= TOL);
        let xz = distance(&x, &z, &p).unwrap();
        let zy = distance(&z, &y, &p).unwrap();
        prop_assert!(xy <= xz + zy + TOL, "{xy} > {xz} + {zy}");
    }
}

#[test]
fn exponential_model_word_probabilities() {
    for k in 1..=3 {
        let sigma = alphabet(k);
        let p = make_p_exp(&sigma);
        let mu = 1.0 / (k as f64 + 1.0);
        for w in words_up_to(&sigma, 4) {
            let expected = mu.powi(w.len() as i32 + 1);
            assert!((p.word_prob(&w).unwrap() - expected).abs() <= 1e-12);
        }
    }
}
