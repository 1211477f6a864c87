mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nfa_approx::format::CorpusFormat;
use nfa_approx::{LabelVariant, ReductionKind, DEFAULT_DET_CAP};

/// Approximate reduction of NFAs with certified probabilistic error bounds.
#[derive(Parser, Debug)]
#[command(name = "nfa-approx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce an automaton under a state budget or an error budget.
    Reduce(ReduceArgs),
    /// Probability of the symmetric difference of two automata.
    Distance(DistanceArgs),
    /// Per-state labels as tab-separated `state label` lines.
    Label(LabelArgs),
    /// Learn a probabilistic automaton from a DFA skeleton and a corpus.
    Learn(LearnArgs),
    /// Fraction of sample words classified differently by two automata.
    Eval(EvalArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads for label computation (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Cap on subset-states during determinization.
    #[arg(long, default_value_t = DEFAULT_DET_CAP)]
    det_cap: usize,
    /// Write a JSON run manifest with input digests, configuration and results.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Prune,
    Selfloop,
}

impl From<KindArg> for ReductionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Prune => ReductionKind::Prune,
            KindArg::Selfloop => ReductionKind::SelfLoop,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Size,
    Error,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Bin,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => CorpusFormat::Text,
            FormatArg::Bin => CorpusFormat::Bin,
        }
    }
}

fn parse_variant(s: &str) -> Result<LabelVariant, String> {
    let n: u8 = s.parse().map_err(|_| format!("label variant must be 1, 2 or 3, got `{s}`"))?;
    LabelVariant::try_from(n)
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// Automaton to reduce (FA text format).
    #[arg(long)]
    input: PathBuf,
    /// Input model (PA text format); defaults to the exponential model over the input alphabet.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Where to write the reduced automaton.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long = "type", value_enum, default_value_t = KindArg::Prune)]
    kind: KindArg,
    /// Labelling variant: 1, 2 or 3.
    #[arg(long, value_parser = parse_variant, default_value = "3")]
    label: LabelVariant,
    #[arg(long, value_enum, default_value_t = ModeArg::Size)]
    mode: ModeArg,
    /// Size mode: an absolute state bound (>= 1) or a ratio in (0, 1) of the
    /// input size. Error mode: the error budget in [0, 1].
    #[arg(long)]
    param: f64,
    /// Also compute the exact distance between input and output.
    #[arg(long)]
    exact: bool,
    /// Append a human-readable table to the report.
    #[arg(long)]
    table: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    input: PathBuf,
    /// Second automaton.
    #[arg(long)]
    against: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// TSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long = "type", value_enum, default_value_t = KindArg::Prune)]
    kind: KindArg,
    #[arg(long, value_parser = parse_variant, default_value = "3")]
    label: LabelVariant,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Deterministic skeleton (FA text format).
    #[arg(long)]
    input: PathBuf,
    /// Training corpus.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Route missing transitions of the skeleton to a fresh sink first.
    #[arg(long)]
    complete: bool,
    /// PA destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reduced automaton.
    #[arg(long)]
    reduced: PathBuf,
    /// Sample of words to classify.
    #[arg(long)]
    sample: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let result = match &cli.command {
        Command::Reduce(a) => commands::reduce(a, &argv),
        Command::Distance(a) => commands::distance(a, &argv),
        Command::Label(a) => commands::label(a, &argv),
        Command::Learn(a) => commands::learn(a, &argv),
        Command::Eval(a) => commands::eval(a, &argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
