//! Line-oriented text formats for automata and probabilistic automata, and
//! the word-corpus formats.
//!
//! ```text
//! # comment
//! %Alphabet a b
//! %Initial q0
//! %Final q2
//! q0 a q1
//! q1 b q2
//! ```
//!
//! Without an `%Alphabet` line the alphabet is all 256 bytes, written `0xHH`.
//! The PA format pairs `%Initial`/`%Final` states with weights and appends a
//! probability to each transition line.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};
use crate::nfa::{Nfa, StateId};
use crate::pa::{Pa, Ppa};

/// Decimal rendering with 17 significant digits (lossless for `f64`).
pub fn fmt_prob(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=16).contains(&exp) {
        return format!("{x:.16e}");
    }
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

struct Line<'a> {
    no: usize,
    tokens: Vec<&'a str>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let tokens: Vec<&str> = raw
                .split_whitespace()
                .take_while(|t| !t.starts_with('#'))
                .collect();
            (!tokens.is_empty()).then_some(Line { no: i + 1, tokens })
        })
        .collect()
}

#[derive(Default)]
struct StateNames {
    ids: HashMap<String, StateId>,
    names: Vec<String>,
    count: usize,
}

impl StateNames {
    fn get(&mut self, name: &str) -> StateId {
        let next = self.count;
        let id = *self.ids.entry(name.to_string()).or_insert(next);
        if id == next {
            self.names.push(name.to_string());
            self.count += 1;
        }
        id
    }

    /// Renumbers states in natural order of their names, so indices do not
    /// depend on the order of lines in the file. Returns the map from
    /// provisional to final index, and the names by final index.
    fn into_numbering(self) -> (Vec<StateId>, Vec<String>) {
        let mut order: Vec<StateId> = (0..self.count).collect();
        order.sort_by(|&x, &y| natural_cmp(&self.names[x], &self.names[y]));
        let mut remap = vec![0; self.count];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let mut names = self.names;
        let sorted = order.iter().map(|&q| std::mem::take(&mut names[q])).collect();
        (remap, sorted)
    }
}

/// Compares names chunk by chunk, with runs of digits compared as numbers:
/// `q2 < q10`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (&(da, x), &(db, y)) in ca.iter().zip(&cb) {
        let ord = if da && db {
            let (x, y) = (x.trim_start_matches('0'), y.trim_start_matches('0'));
            x.len().cmp(&y.len()).then_with(|| x.cmp(y))
        } else {
            x.cmp(y)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

fn alphabet_of(lines: &[Line<'_>]) -> Result<Alphabet> {
    let mut tokens: Vec<String> = Vec::new();
    let mut declared = false;
    for l in lines {
        if l.tokens[0] == "%Alphabet" {
            declared = true;
            tokens.extend(l.tokens[1..].iter().map(|t| t.to_string()));
        }
    }
    if !declared {
        return Ok(Alphabet::bytes());
    }
    Alphabet::new(tokens).map_err(|e| match e {
        Error::Parse { msg, .. } => {
            let line = lines.iter().find(|l| l.tokens[0] == "%Alphabet").map_or(0, |l| l.no);
            Error::parse(line, msg)
        }
        other => other,
    })
}

fn symbol(alphabet: &Alphabet, tok: &str, line: usize) -> Result<Symbol> {
    alphabet
        .lookup(tok)
        .map_err(|_| Error::parse(line, format!("unknown symbol `{tok}`")))
}

fn weight(tok: &str, line: usize) -> Result<f64> {
    let w: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid weight `{tok}`")))?;
    if !w.is_finite() || w < 0.0 {
        return Err(Error::parse(line, format!("weight `{tok}` must be finite and nonnegative")));
    }
    Ok(w)
}

/// Parses the FA text format. States are numbered in natural order of their
/// names (`q2` before `q10`).
pub fn parse_fa(text: &str) -> Result<Nfa> {
    parse_fa_named(text).map(|(a, _)| a)
}

/// Like [`parse_fa`], also returning the state names indexed by state.
pub fn parse_fa_named(text: &str) -> Result<(Nfa, Vec<String>)> {
    let lines = tokenize(text);
    let alphabet = alphabet_of(&lines)?;
    let mut names = StateNames::default();
    let mut initial = Vec::new();
    let mut finals = Vec::new();
    let mut edges = Vec::new();
    for l in &lines {
        match l.tokens[0] {
            "%Alphabet" => {}
            "%Initial" => initial.extend(l.tokens[1..].iter().map(|t| names.get(t))),
            "%Final" => finals.extend(l.tokens[1..].iter().map(|t| names.get(t))),
            d if d.starts_with('%') => {
                return Err(Error::parse(l.no, format!("unknown directive `{d}`")));
            }
            _ => {
                let [src, tok, dst] = l.tokens[..] else {
                    return Err(Error::parse(l.no, "expected `SRC TOK DST`"));
                };
                let s = names.get(src);
                let sym = symbol(&alphabet, tok, l.no)?;
                let d = names.get(dst);
                edges.push((s, sym, d));
            }
        }
    }
    let (id, names) = names.into_numbering();
    let mut a = Nfa::new(alphabet, names.len());
    for q in initial {
        a.set_initial(id[q], true);
    }
    for q in finals {
        a.set_final(id[q], true);
    }
    for (s, sym, d) in edges {
        a.add_transition(id[s], sym, id[d]);
    }
    Ok((a, names))
}

/// Serializes as Alphabet, Initial, Final, then transitions sorted by (src,
/// symbol, dst). States are written as their indices.
pub fn write_fa(a: &Nfa) -> String {
    let names: Vec<String> = a.states().map(|q| q.to_string()).collect();
    write_fa_named(a, &names)
}

/// Serializes with `names[q]` as the name of state `q`.
pub fn write_fa_named(a: &Nfa, names: &[String]) -> String {
    assert_eq!(names.len(), a.num_states(), "one name per state");
    let mut out = String::new();
    if let Some(name) = a.name() {
        let _ = writeln!(out, "# {name}");
    }
    if !a.alphabet().is_bytes() {
        let _ = writeln!(out, "%Alphabet {}", a.alphabet().tokens().join(" "));
    }
    let join = |it: &mut dyn Iterator<Item = StateId>| {
        it.map(|q| format!(" {}", names[q])).collect::<String>()
    };
    let _ = writeln!(out, "%Initial{}", join(&mut a.initial_states()));
    let _ = writeln!(out, "%Final{}", join(&mut a.final_states()));
    for (p, s, q) in a.transitions() {
        let _ = writeln!(out, "{} {} {}", names[p], a.alphabet().token(s), names[q]);
    }
    out
}

fn weighted_pairs<'a>(
    tokens: &[&'a str],
    line: usize,
) -> Result<Vec<(&'a str, f64)>> {
    if !tokens.len().is_multiple_of(2) {
        return Err(Error::parse(line, "expected `STATE WEIGHT` pairs"));
    }
    tokens
        .chunks(2)
        .map(|c| Ok((c[0], weight(c[1], line)?)))
        .collect()
}

/// Parses the PA text format into an unvalidated pseudo-probabilistic automaton.
pub fn parse_ppa(text: &str) -> Result<Ppa> {
    parse_ppa_named(text).map(|(p, _)| p)
}

/// Like [`parse_ppa`], also returning the state names indexed by state.
pub fn parse_ppa_named(text: &str) -> Result<(Ppa, Vec<String>)> {
    let lines = tokenize(text);
    let alphabet = alphabet_of(&lines)?;
    let mut names = StateNames::default();
    let mut initial = Vec::new();
    let mut finals = Vec::new();
    let mut edges = Vec::new();
    for l in &lines {
        match l.tokens[0] {
            "%Alphabet" => {}
            "%Initial" => {
                for (q, w) in weighted_pairs(&l.tokens[1..], l.no)? {
                    initial.push((names.get(q), w));
                }
            }
            "%Final" => {
                for (q, w) in weighted_pairs(&l.tokens[1..], l.no)? {
                    finals.push((names.get(q), w));
                }
            }
            d if d.starts_with('%') => {
                return Err(Error::parse(l.no, format!("unknown directive `{d}`")));
            }
            _ => {
                let [src, tok, dst, w] = l.tokens[..] else {
                    return Err(Error::parse(l.no, "expected `SRC TOK DST PROB`"));
                };
                let s = names.get(src);
                let sym = symbol(&alphabet, tok, l.no)?;
                let d = names.get(dst);
                edges.push((s, sym, d, weight(w, l.no)?, l.no));
            }
        }
    }
    let (id, names) = names.into_numbering();
    let mut p = Ppa::new(alphabet, names.len());
    for (q, w) in initial {
        p.set_initial(id[q], w);
    }
    for (q, w) in finals {
        p.set_final(id[q], w);
    }
    let mut seen = HashMap::new();
    for (s, sym, d, w, no) in edges {
        if seen.insert((s, sym, d), no).is_some() {
            return Err(Error::parse(no, "duplicate transition"));
        }
        p.set_transition(id[s], sym, id[d], w);
    }
    Ok((p, names))
}

/// Parses and validates a PA.
pub fn parse_pa(text: &str) -> Result<Pa> {
    Pa::new(parse_ppa(text)?)
}

pub fn write_ppa(p: &Ppa) -> String {
    let mut out = String::new();
    if !p.alphabet().is_bytes() {
        let _ = writeln!(out, "%Alphabet {}", p.alphabet().tokens().join(" "));
    }
    let pairs = |v: &[f64]| {
        v.iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(q, &w)| format!(" {q} {}", fmt_prob(w)))
            .collect::<String>()
    };
    let _ = writeln!(out, "%Initial{}", pairs(p.initial()));
    let _ = writeln!(out, "%Final{}", pairs(p.finals()));
    for (src, s, dst, w) in p.transitions() {
        let _ = writeln!(out, "{src} {} {dst} {}", p.alphabet().token(s), fmt_prob(w));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One word per line, whitespace-separated tokens; a blank line is the empty word.
    Text,
    /// Records of a little-endian `u32` length followed by that many payload bytes.
    Bin,
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(CorpusFormat::Text),
            "bin" => Ok(CorpusFormat::Bin),
            _ => Err(format!("unknown corpus format `{s}` (expected text or bin)")),
        }
    }
}

pub fn read_corpus<R: Read>(mut input: R, format: CorpusFormat, alphabet: &Alphabet) -> Result<Vec<Word>> {
    match format {
        CorpusFormat::Text => {
            let mut text = String::new();
            input.read_to_string(&mut text)?;
            text.lines()
                .enumerate()
                .map(|(i, l)| {
                    l.split_whitespace()
                        .map(|t| symbol(alphabet, t, i + 1))
                        .collect()
                })
                .collect()
        }
        CorpusFormat::Bin => {
            let mut bytes = Vec::new();
            input.read_to_end(&mut bytes)?;
            let mut words = Vec::new();
            let mut pos = 0;
            while pos < bytes.len() {
                let record = words.len() + 1;
                let header = bytes
                    .get(pos..pos + 4)
                    .ok_or_else(|| Error::parse(record, "truncated length prefix"))?;
                let len = u32::from_le_bytes(header.try_into().expect("4 bytes")) as usize;
                pos += 4;
                let payload = bytes
                    .get(pos..pos + len)
                    .ok_or_else(|| Error::parse(record, "truncated payload"))?;
                pos += len;
                let word = payload
                    .iter()
                    .map(|&b| {
                        alphabet
                            .lookup_byte(b)
                            .map_err(|_| Error::parse(record, format!("byte 0x{b:02x} not in alphabet")))
                    })
                    .collect::<Result<Word>>()?;
                words.push(word);
            }
            Ok(words)
        }
    }
}

pub fn write_corpus<W: Write>(mut out: W, format: CorpusFormat, alphabet: &Alphabet, words: &[Word]) -> Result<()> {
    match format {
        CorpusFormat::Text => {
            for w in words {
                writeln!(out, "{}", alphabet.format_word(w))?;
            }
        }
        CorpusFormat::Bin => {
            for w in words {
                let bytes: Vec<u8> = w
                    .iter()
                    .map(|&s| byte_of(alphabet, s))
                    .collect::<Result<_>>()?;
                out.write_all(&(bytes.len() as u32).to_le_bytes())?;
                out.write_all(&bytes)?;
            }
        }
    }
    Ok(())
}

fn byte_of(alphabet: &Alphabet, s: Symbol) -> Result<u8> {
    if alphabet.is_bytes() {
        return Ok(s as u8);
    }
    let tok = alphabet.token(s);
    if let Some(hex) = tok.strip_prefix("0x") {
        if let Ok(b) = u8::from_str_radix(hex, 16) {
            return Ok(b);
        }
    }
    match tok.as_bytes() {
        [b] => Ok(*b),
        _ => Err(Error::UnknownSymbol(tok.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfa::tests::a2;
    use crate::pa::make_p_exp;

    #[test]
    fn fmt_prob_digits() {
        assert_eq!(fmt_prob(1.0 / 27.0), "0.037037037037037035");
        assert_eq!(fmt_prob(1.0), "1.0000000000000000");
        assert_eq!(fmt_prob(0.0), "0");
        assert_eq!(fmt_prob(2.0 / 3.0).parse::<f64>().unwrap(), 2.0 / 3.0);
        let tiny = fmt_prob(1e-300);
        assert_eq!(tiny.parse::<f64>().unwrap(), 1e-300);
    }

    #[test]
    fn fa_round_trip() {
        let text = write_fa(&a2());
        assert_eq!(
            text,
            "%Alphabet a b\n%Initial 0\n%Final 2 3\n0 a 1\n0 b 3\n1 b 2\n"
        );
        let (b, names) = parse_fa_named(&text).unwrap();
        assert_eq!(names, ["0", "1", "2", "3"]);
        assert_eq!(b, a2());
        assert_eq!(write_fa_named(&b, &names), text);
        assert_eq!(b.num_transitions(), 3);
    }

    #[test]
    fn states_numbered_by_natural_name_order() {
        let (a, names) = parse_fa_named("%Alphabet a\n%Initial q10\n%Final q2\nq10 a q2\nq2 a q01\n").unwrap();
        assert_eq!(names, ["q01", "q2", "q10"]);
        assert!(a.is_initial(2) && a.is_final(1));
        assert_eq!(natural_cmp("s9", "s10"), Ordering::Less);
        assert_eq!(natural_cmp("a", "a1"), Ordering::Less);
        assert_eq!(natural_cmp("b", "a2"), Ordering::Greater);
    }

    #[test]
    fn fa_names_and_comments() {
        let a = parse_fa(
            "# demo\n%Alphabet x 0x41\n%Initial start\n%Final end # trailing\nstart x mid\nmid 0X41 end\n",
        )
        .unwrap();
        assert_eq!(a.num_states(), 3);
        assert!(a.accepts(&[0, 1]).unwrap());
    }

    #[test]
    fn fa_byte_alphabet_default() {
        let a = parse_fa("%Initial 0\n%Final 1\n0 0x61 1\n").unwrap();
        assert!(a.alphabet().is_bytes());
        assert!(a.accepts(&[0x61]).unwrap());
        assert!(!write_fa(&a).contains("%Alphabet"));
    }

    #[test]
    fn fa_errors() {
        assert!(matches!(parse_fa("%Alphabet a\n0 b 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_fa("%Alphabet a\n0 a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_fa("%Bogus\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn pa_round_trip() {
        let p = make_p_exp(&crate::nfa::tests::ab());
        let text = write_ppa(&p);
        let q = parse_pa(&text).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn pa_validation_on_parse() {
        let bad = "%Alphabet a\n%Initial 0 0.5\n%Final 0 1.0\n";
        assert!(matches!(parse_pa(bad), Err(Error::InvalidPa(_))));
        assert!(parse_ppa(bad).is_ok());
        assert!(parse_ppa("%Alphabet a\n%Initial 0\n").is_err());
        assert!(parse_ppa("%Alphabet a\n0 a 0 -0.5\n").is_err());
    }

    #[test]
    fn corpus_formats() {
        let ab = crate::nfa::tests::ab();
        let words = vec![vec![0, 1], vec![], vec![1]];
        for fmt in [CorpusFormat::Text, CorpusFormat::Bin] {
            let mut buf = Vec::new();
            write_corpus(&mut buf, fmt, &ab, &words).unwrap();
            assert_eq!(read_corpus(buf.as_slice(), fmt, &ab).unwrap(), words);
        }
        let raw = [2u8, 0, 0, 0, b'a', b'b', 0, 0, 0, 0];
        let got = read_corpus(&raw[..], CorpusFormat::Bin, &ab).unwrap();
        assert_eq!(got, vec![vec![0, 1], vec![]]);
        assert!(read_corpus(&raw[..7], CorpusFormat::Bin, &ab).is_err());
        let bytes = read_corpus(&raw[..], CorpusFormat::Bin, &Alphabet::bytes()).unwrap();
        assert_eq!(bytes[0], vec![97, 98]);
    }
}
