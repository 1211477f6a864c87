//! Per-state error estimates for the pruning and self-loop reductions.
//!
//! Every label is the probability (or weight) of a language derived from the
//! automaton at one state. All runs from an initial state to `q`, and from
//! `q` to a final state, stay inside the weakly-connected component of `q`,
//! so labels are computed on each component separately.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lang_prob::{prob_lang_with, weight_lang_with, ProbOptions};
use crate::nfa::{Nfa, StateId, StateSet};
use crate::pa::Ppa;

/// Negative round-off below this magnitude is clamped to zero.
const NEGATIVE_LABEL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Prune,
    SelfLoop,
}

impl FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prune" | "pruning" => Ok(ReductionKind::Prune),
            "selfloop" | "self-loop" | "sl" => Ok(ReductionKind::SelfLoop),
            _ => Err(format!("unknown reduction kind `{s}`")),
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::Prune => "prune",
            ReductionKind::SelfLoop => "selfloop",
        })
    }
}

/// Precision level of a labelling; higher variants are tighter and costlier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelVariant {
    One,
    Two,
    Three,
}

impl LabelVariant {
    pub const ALL: [LabelVariant; 3] = [LabelVariant::One, LabelVariant::Two, LabelVariant::Three];

    pub fn number(self) -> u8 {
        match self {
            LabelVariant::One => 1,
            LabelVariant::Two => 2,
            LabelVariant::Three => 3,
        }
    }
}

impl TryFrom<u8> for LabelVariant {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(LabelVariant::One),
            2 => Ok(LabelVariant::Two),
            3 => Ok(LabelVariant::Three),
            _ => Err(format!("label variant must be 1, 2 or 3, got {v}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateLabelling {
    pub kind: ReductionKind,
    pub variant: LabelVariant,
    values: Vec<f64>,
}

impl StateLabelling {
    pub fn new(kind: ReductionKind, variant: LabelVariant, values: Vec<f64>) -> Self {
        assert!(values.iter().all(|&v| v >= 0.0), "labels are nonnegative");
        StateLabelling { kind, variant, values }
    }

    pub fn get(&self, q: StateId) -> f64 {
        self.values[q]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// States in ascending label order, ties by ascending index.
    pub fn ascending_order(&self) -> Vec<StateId> {
        let mut order: Vec<StateId> = (0..self.values.len()).collect();
        order.sort_by(|&x, &y| self.values[x].total_cmp(&self.values[y]).then(x.cmp(&y)));
        order
    }
}

#[derive(Clone, Debug)]
pub struct LabelOptions {
    pub prob: ProbOptions,
    pub component_wise: bool,
    pub parallel: bool,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions {
            prob: ProbOptions::default(),
            component_wise: true,
            parallel: true,
        }
    }
}

pub fn label_prune(a: &Nfa, p: &Ppa, variant: LabelVariant) -> Result<StateLabelling> {
    label(a, p, ReductionKind::Prune, variant, &LabelOptions::default())
}

pub fn label_selfloop(a: &Nfa, p: &Ppa, variant: LabelVariant) -> Result<StateLabelling> {
    label(a, p, ReductionKind::SelfLoop, variant, &LabelOptions::default())
}

pub fn label(
    a: &Nfa,
    p: &Ppa,
    kind: ReductionKind,
    variant: LabelVariant,
    opts: &LabelOptions,
) -> Result<StateLabelling> {
    if a.alphabet() != p.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let values = if opts.component_wise {
        let comps = a.components();
        let per_comp = map_maybe_par(&comps, opts.parallel, |comp| {
            let sub = a.restrict(comp);
            label_values(&sub.nfa, p, kind, variant, opts)
        })?;
        let mut values = vec![0.0; a.num_states()];
        for (comp, vals) in comps.iter().zip(per_comp) {
            for (&q, v) in comp.iter().zip(vals) {
                values[q] = v;
            }
        }
        values
    } else {
        label_values(a, p, kind, variant, opts)?
    };
    Ok(StateLabelling::new(kind, variant, values))
}

fn map_maybe_par<T, U, F>(items: &[T], parallel: bool, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(&f).collect()
    }
}

fn label_values(
    a: &Nfa,
    p: &Ppa,
    kind: ReductionKind,
    variant: LabelVariant,
    opts: &LabelOptions,
) -> Result<Vec<f64>> {
    let states: Vec<StateId> = a.states().collect();
    let prob = |nfa: &Nfa| prob_lang_with(p, nfa, &opts.prob);
    match (kind, variant) {
        (ReductionKind::Prune, LabelVariant::One) => {
            let finals: Vec<StateId> = a.final_states().collect();
            let bang = map_maybe_par(&finals, opts.parallel, |&f| {
                prob(&a.with_finals(&StateSet::from([f])))
            })?;
            let bang: HashMap<StateId, f64> = finals.into_iter().zip(bang).collect();
            Ok(states
                .iter()
                .map(|&q| {
                    a.reach(&StateSet::from([q]))
                        .iter()
                        .filter_map(|f| bang.get(f))
                        .sum()
                })
                .collect())
        }
        (ReductionKind::Prune, LabelVariant::Two) => {
            let targets: Vec<StateSet> = states
                .iter()
                .map(|&q| {
                    a.reach(&StateSet::from([q]))
                        .into_iter()
                        .filter(|&r| a.is_final(r))
                        .collect()
                })
                .collect();
            let mut unique: Vec<StateSet> = targets.clone();
            unique.sort();
            unique.dedup();
            let probs = map_maybe_par(&unique, opts.parallel, |t| prob(&a.with_finals(t)))?;
            let cache: HashMap<&StateSet, f64> = unique.iter().zip(probs).collect();
            Ok(targets.iter().map(|t| cache[t]).collect())
        }
        (ReductionKind::Prune, LabelVariant::Three) => {
            map_maybe_par(&states, opts.parallel, |&q| prob(&a.through_state(q)))
        }
        (ReductionKind::SelfLoop, LabelVariant::One) => map_maybe_par(&states, opts.parallel, |&q| {
            weight_lang_with(p, &a.with_finals(&StateSet::from([q])), &opts.prob)
        }),
        (ReductionKind::SelfLoop, LabelVariant::Two) => {
            map_maybe_par(&states, opts.parallel, |&q| prob(&banguage_then_anything(a, q)))
        }
        (ReductionKind::SelfLoop, LabelVariant::Three) => map_maybe_par(&states, opts.parallel, |&q| {
            let pumped = prob(&banguage_then_anything(a, q))?;
            let through = prob(&a.through_state(q))?;
            let v = pumped - through;
            if v < -NEGATIVE_LABEL_TOL {
                return Err(Error::Internal(format!(
                    "self-loop label of state {q} is {v} (pumped {pumped}, through {through})"
                )));
            }
            Ok(v.max(0.0))
        }),
    }
}

/// Acceptor of `B(q)·Σ*`: `q` feeds a fresh accepting sink that loops on
/// every symbol; the original final states are dropped and `q` itself
/// accepts (the empty suffix).
pub fn banguage_then_anything(a: &Nfa, q: StateId) -> Nfa {
    let mut out = a.with_finals(&StateSet::from([q]));
    let sink = out.add_state();
    out.set_final(sink, true);
    for s in a.alphabet().symbols() {
        out.add_transition(q, s, sink);
        out.add_transition(sink, s, sink);
    }
    out
}
