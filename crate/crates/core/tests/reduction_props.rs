mod common;

use common::{accepts, instance, random_subset, rng, words_up_to};
use nfa_approx::reduction::{estimate_error, minimize_prune_set, minimize_selfloop_set, reduce_greedy};
use nfa_approx::{
    distance, label, reduce, reduce_prune, reduce_selfloop, LabelOptions, LabelVariant, Mode,
    ReductionConfig, ReductionKind, StateSet,
};
use nfa_approx::synth::{random_pa, tentacles};
use proptest::prelude::*;
use rand::Rng;

const KINDS: [ReductionKind; 2] = [ReductionKind::Prune, ReductionKind::SelfLoop];
const SLACK: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn label_chains_are_non_increasing(seed in any::<u64>()) {
        let (p, a) = instance(seed, 4, 7);
        for kind in KINDS {
            let labs: Vec<_> = LabelVariant::ALL
                .iter()
                .map(|&v| label(&a, &p, kind, v, &LabelOptions::default()).unwrap())
                .collect();
            for q in a.states() {
                prop_assert!(labs[0].get(q) + SLACK >= labs[1].get(q), "{kind} q={q}");
                prop_assert!(labs[1].get(q) + SLACK >= labs[2].get(q), "{kind} q={q}");
            }
        }
    }

    #[test]
    fn error_bound_is_sound(seed in any::<u64>()) {
        let (p, a) = instance(seed, 4, 7);
        let mut r = rng(seed ^ 0x5eed);
        let v = random_subset(&mut r, a.num_states());
        for kind in KINDS {
            let reduced = reduce(kind, &a, &v).nfa;
            let d = distance(&a, &reduced, &p).unwrap();
            for variant in LabelVariant::ALL {
                let lab = label(&a, &p, kind, variant, &LabelOptions::default()).unwrap();
                let bound = estimate_error(kind, &a, &v, &lab).bound();
                prop_assert!(bound + SLACK >= d, "{kind} {variant:?}: {bound} < {d}");
            }
        }
    }

    #[test]
    fn reductions_approximate_in_the_right_direction(seed in any::<u64>()) {
        let (_, a) = instance(seed, 1, 7);
        let mut r = rng(seed ^ 0xd1);
        let v = random_subset(&mut r, a.num_states());
        let pruned = reduce_prune(&a, &v).nfa;
        let looped = reduce_selfloop(&a, &v).nfa;
        for w in words_up_to(a.alphabet(), 5) {
            let orig = accepts(&a, &w);
            prop_assert!(!accepts(&pruned, &w) || orig);
            prop_assert!(!orig || accepts(&looped, &w));
        }
    }

    #[test]
    fn extreme_sets(seed in any::<u64>()) {
        let (_, a) = instance(seed, 1, 8);
        let all: StateSet = a.states().collect();
        prop_assert_eq!(reduce_prune(&a, &all).nfa.num_states(), 0);
        let n_init = a.initial_states().count();
        prop_assert!(reduce_selfloop(&a, &all).nfa.num_states() <= n_init.max(1));
        // Reductions trim, so the empty set is the identity on trim inputs.
        let a = a.trim().nfa;
        for kind in KINDS {
            let same = reduce(kind, &a, &StateSet::new());
            prop_assert_eq!(&same.nfa, &a);
            prop_assert_eq!(same.kept, a.states().collect::<Vec<_>>());
        }
    }

    #[test]
    fn minimized_sets_reduce_identically(seed in any::<u64>()) {
        let (p, a) = instance(seed, 3, 8);
        let mut r = rng(seed ^ 0x31);
        let v = random_subset(&mut r, a.num_states());
        let lab = label(&a, &p, ReductionKind::Prune, LabelVariant::One, &LabelOptions::default()).unwrap();
        let m = minimize_prune_set(&a, &v, &lab);
        prop_assert!(m.is_subset(&v));
        prop_assert_eq!(reduce_prune(&a, &m).kept, reduce_prune(&a, &v).kept);
        let m = minimize_selfloop_set(&a, &v);
        prop_assert!(m.is_subset(&v));
        prop_assert_eq!(reduce_selfloop(&a, &m).kept, reduce_selfloop(&a, &v).kept);
    }

    #[test]
    fn size_driven_contract(seed in any::<u64>(), variant in 1u8..=3) {
        let (p, a) = instance(seed, 4, 8);
        let variant = LabelVariant::try_from(variant).unwrap();
        let mut r = rng(seed ^ 0x51);
        for kind in KINDS {
            let floor = match kind {
                ReductionKind::Prune => 1,
                ReductionKind::SelfLoop => a.initial_states().count().max(1),
            };
            let n = r.gen_range(floor..=a.num_states().max(floor));
            let rep = reduce_greedy(&a, &p, &ReductionConfig::new(kind, variant, Mode::Size(n))).unwrap();
            prop_assert!(rep.output_size <= n);
            prop_assert!(rep.error_bound <= 1.0);
            let d = distance(&a, &rep.reduced, &p).unwrap();
            prop_assert!(d <= rep.error_bound + SLACK, "{kind}: {d} > {}", rep.error_bound);
        }
    }

    #[test]
    fn error_driven_contract(seed in any::<u64>(), variant in 1u8..=3, eps in 0.0f64..=1.0) {
        let (p, a) = instance(seed, 4, 8);
        let variant = LabelVariant::try_from(variant).unwrap();
        for kind in KINDS {
            let rep = reduce_greedy(&a, &p, &ReductionConfig::new(kind, variant, Mode::Error(eps))).unwrap();
            prop_assert!(rep.error_bound <= eps);
            prop_assert!(rep.output_size <= a.num_states());
            let d = distance(&a, &rep.reduced, &p).unwrap();
            prop_assert!(d <= rep.error_bound + SLACK, "{kind}: {d} > {}", rep.error_bound);
        }
    }

    #[test]
    fn component_wise_labels_match_whole(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sigma = common::alphabet(r.gen_range(1..=3));
        let a = tentacles(&mut r, &sigma, 4, 2, 5);
        let p = random_pa(&mut r, &sigma, 3);
        let whole = LabelOptions { component_wise: false, ..LabelOptions::default() };
        for kind in KINDS {
            for v in LabelVariant::ALL {
                let x = label(&a, &p, kind, v, &LabelOptions::default()).unwrap();
                let y = label(&a, &p, kind, v, &whole).unwrap();
                for q in a.states() {
                    prop_assert!((x.get(q) - y.get(q)).abs() <= SLACK);
                }
            }
        }
    }
}
