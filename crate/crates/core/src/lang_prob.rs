//! Probability and weight of a regular language under a probabilistic automaton.
//!
//! The language automaton is made unambiguous (by determinization when the
//! self-product test fails), multiplied with the PA, and the resulting
//! pseudo-probabilistic product is summed over all paths by solving
//! `(I - E) x = φ` with `E = Σ_a Γ_a`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::nfa::{Nfa, StateId, DEFAULT_DET_CAP};
use crate::pa::{dot, Ppa};

/// Tolerance for results falling slightly outside `[0, 1]`.
pub const PROB_TOL: f64 = 1e-9;

/// Default guard on the number of words enumerated by [`bf_prob_lang`].
pub const DEFAULT_ENUM_GUARD: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct ProbOptions {
    pub det_cap: usize,
    /// Products with at most this many states are solved by dense LU;
    /// larger ones by Neumann iteration.
    pub dense_limit: usize,
    pub neumann_tol: f64,
    pub neumann_max_iter: usize,
}

impl Default for ProbOptions {
    fn default() -> Self {
        ProbOptions {
            det_cap: DEFAULT_DET_CAP,
            dense_limit: 2000,
            neumann_tol: 1e-12,
            neumann_max_iter: 1_000_000,
        }
    }
}

/// Trimmed product of a PA and an NFA; `pair_map[r] = (pa_state, nfa_state)`.
#[derive(Clone, Debug)]
pub struct ProductPpa {
    pub ppa: Ppa,
    pub pair_map: Vec<(StateId, StateId)>,
}

/// Product `P ⊗ A` restricted to its trim part. When `a` is unambiguous the
/// product assigns every word of `L(a)` its probability under `p` and every
/// other word zero.
pub fn product_pa_nfa(p: &Ppa, a: &Nfa) -> Result<ProductPpa> {
    if p.alphabet() != a.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    for pp in (0..p.num_states()).filter(|&i| p.initial()[i] > 0.0) {
        for qa in a.initial_states() {
            ids.insert((pp, qa), pairs.len());
            pairs.push((pp, qa));
        }
    }
    let mut edges: Vec<(StateId, Symbol, StateId, f64)> = Vec::new();
    let mut work = 0;
    while work < pairs.len() {
        let (pp, qa) = pairs[work];
        let (l1, l2) = (p.transitions_from(pp), a.successors(qa));
        let (mut i, mut j) = (0, 0);
        while i < l1.len() && j < l2.len() {
            let (s1, s2) = (l1[i].0, l2[j].0);
            if s1 < s2 {
                i += 1;
            } else if s2 < s1 {
                j += 1;
            } else {
                let i_end = i + l1[i..].partition_point(|t| t.0 == s1);
                let j_end = j + l2[j..].partition_point(|t| t.0 == s1);
                for &(_, p2, w) in &l1[i..i_end] {
                    for &(_, q2) in &l2[j..j_end] {
                        let key = (p2, q2);
                        let dst = *ids.entry(key).or_insert_with(|| {
                            pairs.push(key);
                            pairs.len() - 1
                        });
                        edges.push((work, s1, dst, w));
                    }
                }
                i = i_end;
                j = j_end;
            }
        }
        work += 1;
    }
    let mut raw = Ppa::new(p.alphabet().clone(), pairs.len());
    for (r, &(pp, qa)) in pairs.iter().enumerate() {
        if a.is_initial(qa) {
            raw.set_initial(r, p.initial()[pp]);
        }
        if a.is_final(qa) {
            raw.set_final(r, p.finals()[pp]);
        }
    }
    for (src, s, dst, w) in edges {
        raw.set_transition(src, s, dst, w);
    }
    let keep = raw.support().useful_states();
    let pair_map = keep.iter().map(|&r| pairs[r]).collect();
    Ok(ProductPpa {
        ppa: raw.restrict(&keep),
        pair_map,
    })
}

/// Sum over all paths: returns `x` with `(I - E) x = finals`.
pub fn solve_paths(r: &Ppa, opts: &ProbOptions) -> Result<Vec<f64>> {
    let n = r.num_states();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= opts.dense_limit {
        let mut m = DMatrix::<f64>::identity(n, n);
        for (i, _, j, w) in r.transitions() {
            m[(i, j)] -= w;
        }
        let rhs = DVector::from_column_slice(r.finals());
        let x = m
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem { states: n })?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem { states: n });
        }
        Ok(x.iter().copied().collect())
    } else {
        neumann(r, opts)
    }
}

/// `x_{k+1} = E x_k + φ` until the sup-norm step falls below the tolerance.
fn neumann(r: &Ppa, opts: &ProbOptions) -> Result<Vec<f64>> {
    let n = r.num_states();
    // Collapse symbols: E[i][j] = Σ_a Γ_a[i][j], summed in ascending symbol order.
    let rows: Vec<Vec<(StateId, f64)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(StateId, f64)> = r
                .transitions_from(i)
                .iter()
                .map(|&(_, j, w)| (j, w))
                .collect();
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(StateId, f64)> = Vec::with_capacity(row.len());
            for (j, w) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += w,
                    _ => merged.push((j, w)),
                }
            }
            merged
        })
        .collect();
    let phi = r.finals();
    let mut x = phi.to_vec();
    let mut next = vec![0.0; n];
    for _ in 0..opts.neumann_max_iter {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let v = rows[i].iter().map(|&(j, w)| w * x[j]).sum::<f64>() + phi[i];
            delta = delta.max((v - x[i]).abs());
            next[i] = v;
        }
        std::mem::swap(&mut x, &mut next);
        if !delta.is_finite() {
            return Err(Error::SingularSystem { states: n });
        }
        if delta < opts.neumann_tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.neumann_max_iter,
    })
}

/// Trimmed, unambiguous automaton with the same language.
pub fn unambiguous_equivalent(a: &Nfa, det_cap: usize) -> Result<Nfa> {
    let t = a.trim().nfa;
    if t.is_unambiguous() {
        Ok(t)
    } else {
        Ok(t.determinize(det_cap)?.nfa.trim().nfa)
    }
}

fn path_sum(p: &Ppa, a: &Nfa, opts: &ProbOptions) -> Result<f64> {
    let ua = unambiguous_equivalent(a, opts.det_cap)?;
    let prod = product_pa_nfa(p, &ua)?;
    let x = solve_paths(&prod.ppa, opts)?;
    Ok(dot(prod.ppa.initial(), &x))
}

/// Probability of `L(a)` under `p`.
pub fn prob_lang(p: &Ppa, a: &Nfa) -> Result<f64> {
    prob_lang_with(p, a, &ProbOptions::default())
}

pub fn prob_lang_with(p: &Ppa, a: &Nfa, opts: &ProbOptions) -> Result<f64> {
    let v = path_sum(p, a, opts)?;
    if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
        return Err(Error::ProbabilityOutOfRange(v));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Weight of `L(a)`: the probability computation with all final weights of `p` set to 1.
pub fn weight_lang(p: &Ppa, a: &Nfa) -> Result<f64> {
    weight_lang_with(p, a, &ProbOptions::default())
}

pub fn weight_lang_with(p: &Ppa, a: &Nfa, opts: &ProbOptions) -> Result<f64> {
    let v = path_sum(&p.with_unit_finals(), a, opts)?;
    if v < -PROB_TOL || !v.is_finite() {
        return Err(Error::ProbabilityOutOfRange(v));
    }
    Ok(v.max(0.0))
}

/// Enumeration bounds: the probability of `L(a)` lies in `[lower, lower + tail]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForce {
    pub lower: f64,
    pub tail: f64,
}

/// Sums word probabilities of all accepted words up to `max_len`; `tail` is
/// the mass of all longer words.
pub fn bf_prob_lang(p: &Ppa, a: &Nfa, max_len: usize) -> Result<BruteForce> {
    bf_prob_lang_with(p, a, max_len, DEFAULT_ENUM_GUARD)
}

pub fn bf_prob_lang_with(p: &Ppa, a: &Nfa, max_len: usize, guard: u64) -> Result<BruteForce> {
    if p.alphabet() != a.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let k = p.alphabet().len() as u128;
    let mut words: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..=max_len {
        words = words.saturating_add(layer);
        layer = layer.saturating_mul(k);
    }
    if words > guard as u128 {
        return Err(Error::EnumerationGuard { words, guard });
    }

    // Mass of all words up to max_len, layer by layer.
    let n = p.num_states();
    let mut total = 0.0;
    let mut v = p.initial().to_vec();
    let mut next = vec![0.0; n];
    for len in 0..=max_len {
        total += dot(&v, p.finals());
        if len == max_len {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, _, j, w) in p.transitions() {
            next[j] += v[i] * w;
        }
        std::mem::swap(&mut v, &mut next);
    }

    let mut subset = vec![false; a.num_states()];
    for q in a.initial_states() {
        subset[q] = true;
    }
    let mut lower = 0.0;
    enumerate(p, a, p.initial(), &subset, max_len, &mut lower);
    Ok(BruteForce {
        lower,
        tail: (1.0 - total).max(0.0),
    })
}

fn enumerate(p: &Ppa, a: &Nfa, vec: &[f64], subset: &[bool], left: usize, lower: &mut f64) {
    if a.states().any(|q| subset[q] && a.is_final(q)) {
        *lower += dot(vec, p.finals());
    }
    if left == 0 {
        return;
    }
    let mut v2 = vec![0.0; p.num_states()];
    let mut s2 = vec![false; a.num_states()];
    for sym in p.alphabet().symbols() {
        p.step(vec, sym, &mut v2);
        if v2.iter().all(|&x| x == 0.0) {
            continue;
        }
        s2.iter_mut().for_each(|b| *b = false);
        let mut any = false;
        for q in a.states().filter(|&q| subset[q]) {
            for &(_, r) in a.successors_on(q, sym) {
                s2[r] = true;
                any = true;
            }
        }
        if any {
            enumerate(p, a, &v2, &s2, left - 1, lower);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfa::tests::{a2, ab};
    use crate::pa::make_p_exp;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn starts_with_a() -> Nfa {
        let mut a = Nfa::new(ab(), 2);
        a.set_initial(0, true);
        a.set_final(1, true);
        a.add_transition(0, 0, 1);
        a.add_transition(1, 0, 1);
        a.add_transition(1, 1, 1);
        a
    }

    #[test]
    fn product_with_universal_is_identity() {
        let p = make_p_exp(&ab());
        let r = product_pa_nfa(&p, &Nfa::universal(ab())).unwrap();
        assert_eq!(&r.ppa, p.as_ppa());
        assert_eq!(r.pair_map, vec![(0, 0)]);
    }

    #[test]
    fn product_with_word_acceptor() {
        let p = make_p_exp(&ab());
        let r = product_pa_nfa(&p, &Nfa::word(ab(), &[0, 1])).unwrap();
        assert_eq!(r.ppa.num_states(), 3);
        assert!(close(r.ppa.word_prob(&[0, 1]).unwrap(), 1.0 / 27.0, 1e-15));
        assert_eq!(r.ppa.word_prob(&[0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn product_with_empty_language() {
        let p = make_p_exp(&ab());
        let mut a = Nfa::new(ab(), 1);
        a.set_initial(0, true);
        let r = product_pa_nfa(&p, &a).unwrap();
        assert_eq!(r.ppa.num_states(), 0);
        assert_eq!(prob_lang(&p, &a).unwrap(), 0.0);
    }

    #[test]
    fn prob_lang_examples() {
        let p = make_p_exp(&ab());
        assert!(close(prob_lang(&p, &Nfa::word(ab(), &[0, 1])).unwrap(), 1.0 / 27.0, 1e-15));
        assert!(close(prob_lang(&p, &Nfa::universal(ab())).unwrap(), 1.0, 1e-12));
        assert!(close(prob_lang(&p, &starts_with_a()).unwrap(), 1.0 / 3.0, 1e-12));
        assert!(close(prob_lang(&p, &a2()).unwrap(), 4.0 / 27.0, 1e-15));
    }

    #[test]
    fn ambiguous_input_is_determinized() {
        // Two runs for every word starting with `a`.
        let mut a = Nfa::new(ab(), 3);
        a.set_initial(0, true);
        for q in [1, 2] {
            a.set_final(q, true);
            a.add_transition(0, 0, q);
            a.add_transition(q, 0, q);
            a.add_transition(q, 1, q);
        }
        assert!(!a.is_unambiguous());
        let p = make_p_exp(&ab());
        assert!(close(prob_lang(&p, &a).unwrap(), 1.0 / 3.0, 1e-12));
        let opts = ProbOptions { det_cap: 1, ..Default::default() };
        assert!(matches!(
            prob_lang_with(&p, &a, &opts),
            Err(Error::DeterminizationCap { .. })
        ));
    }

    #[test]
    fn weight_lang_examples() {
        let p = make_p_exp(&ab());
        assert!(close(weight_lang(&p, &Nfa::word(ab(), &[0])).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(weight_lang(&p, &Nfa::word(ab(), &[])).unwrap(), 1.0, 1e-15));
        let two = Nfa::word(ab(), &[0]).union(&Nfa::word(ab(), &[0, 1])).unwrap();
        assert!(close(weight_lang(&p, &two).unwrap(), 4.0 / 9.0, 1e-15));
        // Weights of all words exceed 1: Σ_n (2μ)^n = 3.
        assert!(close(weight_lang(&p, &Nfa::universal(ab())).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn dense_and_neumann_agree() {
        let p = make_p_exp(&ab());
        let forced = ProbOptions { dense_limit: 0, ..Default::default() };
        for a in [starts_with_a(), a2(), Nfa::universal(ab())] {
            let x = prob_lang(&p, &a).unwrap();
            let y = prob_lang_with(&p, &a, &forced).unwrap();
            assert!(close(x, y, 1e-10), "{x} vs {y}");
        }
    }

    #[test]
    fn brute_force_examples() {
        let p = make_p_exp(&ab());
        let u = bf_prob_lang(&p, &Nfa::universal(ab()), 16).unwrap();
        assert!(close(u.lower + u.tail, 1.0, 1e-12));
        let mut empty = Nfa::new(ab(), 1);
        empty.set_initial(0, true);
        assert_eq!(bf_prob_lang(&p, &empty, 10).unwrap().lower, 0.0);
        let b = bf_prob_lang(&p, &starts_with_a(), 20).unwrap();
        assert!(close(b.lower, 1.0 / 3.0, 1e-3));
        assert!(b.tail < 1e-3);
        assert!(matches!(
            bf_prob_lang(&p, &starts_with_a(), 30),
            Err(Error::EnumerationGuard { .. })
        ));
    }
}
