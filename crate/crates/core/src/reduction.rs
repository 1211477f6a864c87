//! Pruning and self-loop reductions, their error bounds, and the greedy
//! size-driven and error-driven drivers.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::labelling::{label, LabelOptions, LabelVariant, ReductionKind, StateLabelling};
use crate::lang_prob::{prob_lang_with, ProbOptions, PROB_TOL};
use crate::nfa::{Nfa, StateId, StateSet, SubAutomaton};
use crate::pa::Ppa;

/// `trim(A restricted to Q \ V)`. Under-approximates `L(a)`.
pub fn reduce_prune(a: &Nfa, v: &StateSet) -> SubAutomaton {
    let keep: StateSet = a.states().filter(|q| !v.contains(q)).collect();
    let restricted = a.restrict(&keep);
    let trimmed = restricted.nfa.trim();
    SubAutomaton {
        kept: trimmed.kept.iter().map(|&q| restricted.kept[q]).collect(),
        nfa: trimmed.nfa,
    }
}

/// `trim(self_loop(A, V))`. Over-approximates `L(a)`.
pub fn reduce_selfloop(a: &Nfa, v: &StateSet) -> SubAutomaton {
    a.self_loop(v).trim()
}

pub fn reduce(kind: ReductionKind, a: &Nfa, v: &StateSet) -> SubAutomaton {
    match kind {
        ReductionKind::Prune => reduce_prune(a, v),
        ReductionKind::SelfLoop => reduce_selfloop(a, v),
    }
}

/// Greedily shrinks `v` without changing the set of surviving states of the
/// pruning reduction. High-label states are tried first.
pub fn minimize_prune_set(a: &Nfa, v: &StateSet, lab: &StateLabelling) -> StateSet {
    let target = reduce_prune(a, v).kept;
    let mut order: Vec<StateId> = v.iter().copied().collect();
    order.sort_by(|&x, &y| lab.get(y).total_cmp(&lab.get(x)).then(y.cmp(&x)));
    let mut current = v.clone();
    for q in order {
        current.remove(&q);
        if reduce_prune(a, &current).kept != target {
            current.insert(q);
        }
    }
    current
}

/// The unique minimal set with the same self-loop reduction: the states of
/// `v` that survive it.
pub fn minimize_selfloop_set(a: &Nfa, v: &StateSet) -> StateSet {
    reduce_selfloop(a, v)
        .kept
        .into_iter()
        .filter(|q| v.contains(q))
        .collect()
}

/// Error estimate of a reduction at `v`: the label sum over the minimized set.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub raw: f64,
    pub minimized: StateSet,
}

impl ErrorEstimate {
    /// The raw sum capped at 1, since a larger probability bound is vacuous.
    pub fn bound(&self) -> f64 {
        self.raw.min(1.0)
    }
}

pub fn estimate_error(
    kind: ReductionKind,
    a: &Nfa,
    v: &StateSet,
    lab: &StateLabelling,
) -> ErrorEstimate {
    let minimized = match kind {
        ReductionKind::Prune => minimize_prune_set(a, v, lab),
        ReductionKind::SelfLoop => minimize_selfloop_set(a, v),
    };
    let raw = minimized.iter().map(|&q| lab.get(q)).sum();
    ErrorEstimate { raw, minimized }
}

pub fn err_prune(a: &Nfa, v: &StateSet, lab: &StateLabelling) -> f64 {
    estimate_error(ReductionKind::Prune, a, v, lab).bound()
}

pub fn err_selfloop(a: &Nfa, v: &StateSet, lab: &StateLabelling) -> f64 {
    estimate_error(ReductionKind::SelfLoop, a, v, lab).bound()
}

/// Probability of the symmetric difference of the two languages.
pub fn distance(a1: &Nfa, a2: &Nfa, p: &Ppa) -> Result<f64> {
    distance_with(a1, a2, p, &ProbOptions::default())
}

pub fn distance_with(a1: &Nfa, a2: &Nfa, p: &Ppa, opts: &ProbOptions) -> Result<f64> {
    if a1.alphabet() != a2.alphabet() || a1.alphabet() != p.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let both = a1.product(a2)?.nfa;
    let d = prob_lang_with(p, a1, opts)? + prob_lang_with(p, a2, opts)?
        - 2.0 * prob_lang_with(p, &both, opts)?;
    if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&d) {
        return Err(Error::ProbabilityOutOfRange(d));
    }
    Ok(d.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    /// Reduce to at most this many states.
    Size(usize),
    /// Keep the error bound at or below this probability.
    Error(f64),
}

/// Order in which the greedy drivers visit states. Ties are broken by
/// ascending state index.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum StateOrder {
    /// `SelfLoopTwo` for the self-loop reduction, `Labels` for pruning.
    #[default]
    Default,
    /// Ascending value of the labelling used for the error bound.
    Labels,
    /// Ascending value of the second self-loop labelling, whatever labelling
    /// provides the bound.
    SelfLoopTwo,
    /// An explicit permutation of all states.
    Custom(Vec<StateId>),
}

#[derive(Clone, Debug)]
pub struct ReductionConfig {
    pub kind: ReductionKind,
    pub variant: LabelVariant,
    pub mode: Mode,
    pub order: StateOrder,
    pub label_opts: LabelOptions,
}

impl ReductionConfig {
    pub fn new(kind: ReductionKind, variant: LabelVariant, mode: Mode) -> Self {
        ReductionConfig {
            kind,
            variant,
            mode,
            order: StateOrder::Default,
            label_opts: LabelOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Size(0) => Err(Error::parse(0, "size bound must be at least 1")),
            Mode::Error(e) if !(0.0..=1.0).contains(&e) => {
                Err(Error::parse(0, format!("error bound {e} is outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub reduced: Nfa,
    /// Upper bound on the distance between input and output, at most 1.
    pub error_bound: f64,
    /// Uncapped label sum behind `error_bound`.
    pub raw_error: f64,
    /// States where error was introduced, in original indices.
    pub chosen_set: StateSet,
    /// The minimized subset of `chosen_set` whose labels make up the bound.
    pub minimized_set: StateSet,
    /// Original indices of the states of `reduced`.
    pub kept: Vec<StateId>,
    pub input_size: usize,
    pub output_size: usize,
    pub labelling: StateLabelling,
    pub label_time: Duration,
    pub reduce_time: Duration,
}

fn processing_order(a: &Nfa, lab: &StateLabelling, custom: Option<&[StateId]>) -> Result<Vec<StateId>> {
    match custom {
        None => Ok(lab.ascending_order()),
        Some(order) => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            if sorted != a.states().collect::<Vec<_>>() {
                return Err(Error::parse(0, "state order must be a permutation of all states"));
            }
            Ok(order.to_vec())
        }
    }
}

/// Greedy size-driven reduction with precomputed labels.
pub fn size_driven_with_labels(
    a: &Nfa,
    kind: ReductionKind,
    lab: &StateLabelling,
    n: usize,
    order: Option<&[StateId]>,
) -> Result<(SubAutomaton, StateSet, ErrorEstimate)> {
    if n == 0 {
        return Err(Error::parse(0, "size bound must be at least 1"));
    }
    let unchanged = || SubAutomaton {
        nfa: a.clone(),
        kept: a.states().collect(),
    };
    if a.num_states() <= n {
        let est = ErrorEstimate { raw: 0.0, minimized: StateSet::new() };
        return Ok((unchanged(), StateSet::new(), est));
    }
    let order = processing_order(a, lab, order)?;
    let mut v = StateSet::new();
    let mut reduced = unchanged();
    for q in order {
        v.insert(q);
        reduced = reduce(kind, a, &v);
        if reduced.nfa.num_states() <= n {
            break;
        }
    }
    let est = estimate_error(kind, a, &v, lab);
    Ok((reduced, v, est))
}

/// Greedy error-driven reduction with precomputed labels.
pub fn error_driven_with_labels(
    a: &Nfa,
    kind: ReductionKind,
    lab: &StateLabelling,
    eps: f64,
    order: Option<&[StateId]>,
) -> Result<(SubAutomaton, StateSet, ErrorEstimate)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::parse(0, format!("error bound {eps} is outside [0, 1]")));
    }
    let order = processing_order(a, lab, order)?;
    let mut v = StateSet::new();
    for q in order {
        v.insert(q);
        if estimate_error(kind, a, &v, lab).bound() > eps {
            v.remove(&q);
        }
    }
    let est = estimate_error(kind, a, &v, lab);
    Ok((reduce(kind, a, &v), v, est))
}

fn run(a: &Nfa, p: &Ppa, cfg: &ReductionConfig) -> Result<ReductionReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let lab = label(a, p, cfg.kind, cfg.variant, &cfg.label_opts)?;
    let by_sl2 = matches!(
        (&cfg.order, cfg.kind),
        (StateOrder::SelfLoopTwo, _) | (StateOrder::Default, ReductionKind::SelfLoop)
    );
    let order: Option<Vec<StateId>> = match &cfg.order {
        StateOrder::Custom(o) => Some(o.clone()),
        _ if by_sl2 && !(cfg.kind == ReductionKind::SelfLoop && cfg.variant == LabelVariant::Two) => {
            let sl2 = label(a, p, ReductionKind::SelfLoop, LabelVariant::Two, &cfg.label_opts)?;
            Some(sl2.ascending_order())
        }
        _ => None,
    };
    let label_time = t0.elapsed();
    let t1 = Instant::now();
    let order = order.as_deref();
    let (reduced, chosen, est) = match cfg.mode {
        Mode::Size(n) => size_driven_with_labels(a, cfg.kind, &lab, n, order)?,
        Mode::Error(e) => error_driven_with_labels(a, cfg.kind, &lab, e, order)?,
    };
    let reduce_time = t1.elapsed();
    Ok(ReductionReport {
        input_size: a.num_states(),
        output_size: reduced.nfa.num_states(),
        reduced: reduced.nfa,
        kept: reduced.kept,
        error_bound: est.bound(),
        raw_error: est.raw,
        chosen_set: chosen,
        minimized_set: est.minimized,
        labelling: lab,
        label_time,
        reduce_time,
    })
}

/// Adds states to the reduction set in order until the result has at most `n` states.
pub fn greedy_size_driven(a: &Nfa, p: &Ppa, cfg: &ReductionConfig) -> Result<ReductionReport> {
    if !matches!(cfg.mode, Mode::Size(_)) {
        return Err(Error::parse(0, "size-driven reduction needs a size bound"));
    }
    run(a, p, cfg)
}

/// Visits every state in order and admits it when the bound stays within the budget.
pub fn greedy_error_driven(a: &Nfa, p: &Ppa, cfg: &ReductionConfig) -> Result<ReductionReport> {
    if !matches!(cfg.mode, Mode::Error(_)) {
        return Err(Error::parse(0, "error-driven reduction needs an error bound"));
    }
    run(a, p, cfg)
}

/// Dispatches on `cfg.mode`.
pub fn reduce_greedy(a: &Nfa, p: &Ppa, cfg: &ReductionConfig) -> Result<ReductionReport> {
    run(a, p, cfg)
}
