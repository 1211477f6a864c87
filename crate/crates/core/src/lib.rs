//! Approximate reduction of nondeterministic finite automata.
//!
//! Automata are reduced either by pruning states (under-approximation) or by
//! trapping states in universal self-loops (over-approximation). The error of
//! a reduction is the probability, under a probabilistic automaton modelling
//! the input, of the words on which the reduced automaton disagrees with the
//! original. Every reduction comes with a sound upper bound on that error.

pub mod alphabet;
pub mod error;
pub mod format;
pub mod labelling;
pub mod lang_prob;
pub mod nfa;
pub mod pa;
pub mod reduction;
pub mod synth;
pub mod traffic;

pub use alphabet::{Alphabet, Symbol, Word};
pub use error::{Error, Result};
pub use labelling::{label, label_prune, label_selfloop, LabelOptions, LabelVariant, ReductionKind, StateLabelling};
pub use lang_prob::{bf_prob_lang, prob_lang, product_pa_nfa, weight_lang, BruteForce, ProbOptions, ProductPpa};
pub use nfa::{Nfa, StateId, StateSet, SubAutomaton, DEFAULT_DET_CAP};
pub use pa::{make_p_exp, validate_pa, Diagnostic, Pa, Ppa};
pub use reduction::{
    distance, err_prune, err_selfloop, greedy_error_driven, greedy_size_driven, reduce, reduce_prune,
    reduce_selfloop, Mode, ReductionConfig, ReductionReport, StateOrder,
};
pub use traffic::{complete_dfa, learn_pa, traffic_error, CountTable, TrafficError};
