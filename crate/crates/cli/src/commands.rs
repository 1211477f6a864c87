use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nfa_approx::format::{fmt_prob, parse_fa_named, parse_pa, read_corpus, write_fa_named, write_ppa};
use nfa_approx::lang_prob::ProbOptions;
use nfa_approx::reduction::{distance_with, reduce_greedy};
use nfa_approx::{
    complete_dfa, label as compute_labels, learn_pa, make_p_exp, traffic_error, Alphabet, Error,
    LabelOptions, Mode, Nfa, Pa, ReductionConfig, ReductionKind, StateSet,
};

use crate::report::Report;
use crate::{Common, DistanceArgs, EvalArgs, LabelArgs, LearnArgs, ModeArg, ReduceArgs};

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource_cap() {
            EXIT_RESOURCE
        } else if matches!(e, Error::Internal(_)) {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path, report: &mut Report) -> Result<Vec<u8>, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    report.input(path, &bytes);
    Ok(bytes)
}

fn in_file<T>(path: &Path, r: nfa_approx::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load_fa(path: &Path, report: &mut Report) -> Result<(Nfa, Vec<String>), Failure> {
    let bytes = read(path, report)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::input(format!("{}: not valid UTF-8", path.display())))?;
    in_file(path, parse_fa_named(&text))
}

/// The PA at `path`, or the exponential model when no path is given.
fn load_model(path: Option<&Path>, alphabet: &Alphabet, report: &mut Report) -> Result<Pa, Failure> {
    let Some(path) = path else {
        report.config("model", "exponential");
        return Ok(make_p_exp(alphabet));
    };
    report.config("model", path.display());
    let bytes = read(path, report)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::input(format!("{}: not valid UTF-8", path.display())))?;
    let p = in_file(path, parse_pa(&text))?;
    if p.alphabet() != alphabet {
        return Err(Failure::input(format!(
            "{}: model alphabet differs from the automaton alphabet",
            path.display()
        )));
    }
    Ok(p)
}

fn setup(common: &Common) -> Result<ProbOptions, Failure> {
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Failure::input("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })?;
    }
    Ok(ProbOptions { det_cap: common.det_cap, ..ProbOptions::default() })
}

fn emit(dest: Option<&Path>, contents: &str) -> CmdResult {
    match dest {
        Some(path) => fs::write(path, contents)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })
        }
    }
}

fn finish(report: &Report, common: &Common, argv: &[String], table: bool) -> CmdResult {
    let mut text = report.render();
    if table {
        text.push('\n');
        text.push_str(&report.render_table());
    }
    emit(None, &text)?;
    write_manifest(report, common, argv)
}

fn write_manifest(report: &Report, common: &Common, argv: &[String]) -> CmdResult {
    let Some(path) = &common.manifest else {
        return Ok(());
    };
    let mut json = serde_json::to_string_pretty(&report.manifest(argv))
        .map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })?;
    json.push('\n');
    emit(Some(path), &json)
}

fn named_set(set: &StateSet, names: &[String]) -> String {
    set.iter().map(|&q| names[q].as_str()).collect::<Vec<_>>().join(",")
}

/// Size bound for size mode: `param >= 1` is absolute, `param` in (0, 1) a
/// ratio of `states`.
fn size_bound(param: f64, states: usize) -> Result<usize, Failure> {
    if param >= 1.0 {
        if param.fract() != 0.0 || param > usize::MAX as f64 {
            return Err(Failure::input(format!("size bound {param} is not a whole number")));
        }
        Ok(param as usize)
    } else if param > 0.0 {
        Ok(((param * states as f64).ceil() as usize).max(1))
    } else {
        Err(Failure::input(format!("size parameter {param} must be positive")))
    }
}

pub fn reduce(args: &ReduceArgs, argv: &[String]) -> CmdResult {
    let opts = setup(&args.common)?;
    let mut report = Report::default();
    report.config("command", "reduce");
    let (a, names) = load_fa(&args.input, &mut report)?;
    let p = load_model(args.model.as_deref(), a.alphabet(), &mut report)?;
    let kind: ReductionKind = args.kind.into();
    report.config("input", args.input.display());
    report.config("type", kind);
    report.config("label", args.label.number());
    let mode = match args.mode {
        ModeArg::Size => {
            let n = size_bound(args.param, a.num_states())?;
            report.config("mode", "size");
            report.config("size_bound", n);
            Mode::Size(n)
        }
        ModeArg::Error => {
            if !(0.0..=1.0).contains(&args.param) {
                return Err(Failure::input(format!("error budget {} is outside [0, 1]", args.param)));
            }
            report.config("mode", "error");
            report.config("error_budget", fmt_prob(args.param));
            Mode::Error(args.param)
        }
    };
    let mut cfg = ReductionConfig::new(kind, args.label, mode);
    cfg.label_opts = LabelOptions { prob: opts.clone(), ..LabelOptions::default() };
    let rep = reduce_greedy(&a, &p, &cfg)?;

    let out_names: Vec<String> = rep.kept.iter().map(|&q| names[q].clone()).collect();
    if let Some(out) = &args.output {
        emit(Some(out), &write_fa_named(&rep.reduced, &out_names))?;
        report.config("output", out.display());
    }
    report.result("input_states", rep.input_size);
    report.result("output_states", rep.output_size);
    report.result("error_bound", fmt_prob(rep.error_bound));
    report.result("raw_error", fmt_prob(rep.raw_error));
    report.result("chosen_set", named_set(&rep.chosen_set, &names));
    report.result("minimized_set", named_set(&rep.minimized_set, &names));
    if args.exact {
        let t = Instant::now();
        match distance_with(&a, &rep.reduced, &p, &opts) {
            Ok(d) => report.result("exact_error", fmt_prob(d)),
            Err(e) if e.is_resource_cap() => report.result("exact_error", "infeasible"),
            Err(e) => return Err(e.into()),
        }
        report.timing("exact_time_ms", t.elapsed());
    }
    report.timing("label_time_ms", rep.label_time);
    report.timing("reduce_time_ms", rep.reduce_time);
    finish(&report, &args.common, argv, args.table)
}

pub fn distance(args: &DistanceArgs, argv: &[String]) -> CmdResult {
    let opts = setup(&args.common)?;
    let mut report = Report::default();
    report.config("command", "distance");
    let (a1, _) = load_fa(&args.input, &mut report)?;
    let (a2, _) = load_fa(&args.against, &mut report)?;
    if a1.alphabet() != a2.alphabet() {
        return Err(Failure::input("the two automata have different alphabets"));
    }
    let p = load_model(args.model.as_deref(), a1.alphabet(), &mut report)?;
    report.config("input", args.input.display());
    report.config("against", args.against.display());
    let t = Instant::now();
    let d = distance_with(&a1, &a2, &p, &opts)?;
    report.result("distance", fmt_prob(d));
    report.timing("time_ms", t.elapsed());
    finish(&report, &args.common, argv, false)
}

pub fn label(args: &LabelArgs, argv: &[String]) -> CmdResult {
    let opts = setup(&args.common)?;
    let mut report = Report::default();
    report.config("command", "label");
    let (a, names) = load_fa(&args.input, &mut report)?;
    let p = load_model(args.model.as_deref(), a.alphabet(), &mut report)?;
    let lab_opts = LabelOptions { prob: opts, ..LabelOptions::default() };
    let t = Instant::now();
    let lab = compute_labels(&a, &p, args.kind.into(), args.label, &lab_opts)?;
    let elapsed = t.elapsed();
    let mut tsv = String::new();
    for q in a.states() {
        tsv.push_str(&format!("{}\t{}\n", names[q], fmt_prob(lab.get(q))));
    }
    emit(args.output.as_deref(), &tsv)?;
    if args.common.manifest.is_some() {
        report.config("type", ReductionKind::from(args.kind));
        report.config("label", args.label.number());
        report.result("states", a.num_states());
        report.timing("label_time_ms", elapsed);
        write_manifest(&report, &args.common, argv)?;
    }
    Ok(())
}

pub fn learn(args: &LearnArgs, argv: &[String]) -> CmdResult {
    setup(&args.common)?;
    let mut report = Report::default();
    report.config("command", "learn");
    let (mut skeleton, _) = load_fa(&args.input, &mut report)?;
    if args.complete {
        skeleton = complete_dfa(&skeleton)?;
    }
    let bytes = read(&args.corpus, &mut report)?;
    let corpus = in_file(
        &args.corpus,
        read_corpus(bytes.as_slice(), args.format.into(), skeleton.alphabet()),
    )?;
    let t = Instant::now();
    let p = learn_pa(&skeleton, corpus.iter().map(Vec::as_slice))?;
    let elapsed = t.elapsed();
    emit(args.output.as_deref(), &write_ppa(&p))?;
    if args.common.manifest.is_some() {
        report.config("complete", args.complete);
        report.result("words", corpus.len());
        report.result("model_states", p.num_states());
        report.timing("learn_time_ms", elapsed);
        write_manifest(&report, &args.common, argv)?;
    }
    Ok(())
}

pub fn eval(args: &EvalArgs, argv: &[String]) -> CmdResult {
    setup(&args.common)?;
    let mut report = Report::default();
    report.config("command", "eval");
    let (a, _) = load_fa(&args.input, &mut report)?;
    let (r, _) = load_fa(&args.reduced, &mut report)?;
    if a.alphabet() != r.alphabet() {
        return Err(Failure::input("the two automata have different alphabets"));
    }
    let bytes = read(&args.sample, &mut report)?;
    let sample = in_file(&args.sample, read_corpus(bytes.as_slice(), args.format.into(), a.alphabet()))?;
    report.config("input", args.input.display());
    report.config("reduced", args.reduced.display());
    let e = traffic_error(&a, &r, sample.iter().map(Vec::as_slice))?;
    report.result("mismatches", e.mismatches);
    report.result("false_negatives", e.false_negatives);
    report.result("false_positives", e.false_positives);
    report.result("total", e.total);
    report.result("ratio", fmt_prob(e.ratio));
    finish(&report, &args.common, argv, false)
}
