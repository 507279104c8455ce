//! `vnpos`: clean corpora, train and apply taggers, run the evaluation
//! protocol.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal error.

mod commands;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{Failure, Kind};

#[derive(Parser, Debug)]
#[command(name = "vnpos", version, about = "Vietnamese part-of-speech tagging")]
struct Cli {
    /// Seed for every random choice (fold shuffling, training order).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// `open` (default), `closed`, or a file listing one tag per line.
    #[arg(long, global = true, default_value = "open")]
    tagset: String,

    /// Only report errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Repair known annotation errors in a tagged corpus.
    Clean(CleanArgs),
    /// Write the word → tag-count lexicon of a tagged corpus.
    Lexicon(LexiconArgs),
    /// Train the linear tagger.
    #[command(alias = "train")]
    TrainLinear(TrainLinearArgs),
    /// Train the ripple-down-rules tagger.
    TrainScrdr(TrainScrdrArgs),
    /// Tag raw text (one sentence per line) with a saved model.
    Tag(TagArgs),
    /// Score a saved model on a gold corpus.
    Eval(EvalArgs),
    /// k-fold cross-validation of one tagger configuration.
    Kfold(KfoldArgs),
    /// Cross-validated accuracy plus single-threaded throughput.
    Bench(BenchArgs),
    /// Cross-validate the cumulative feature sets and the rule tagger.
    Ablate(AblateArgs),
}

#[derive(Args, Debug)]
struct CleanArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Where to write the per-rule counts; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LexiconArgs {
    corpus: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LinearOpts {
    /// Feature sets joined with `+`: spl, bi, affix, ds, jvn, vn.
    #[arg(long, default_value = "spl+bi+affix")]
    features: String,
    /// Brown cluster paths file, needed by `ds`.
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-6)]
    l2: f64,
    /// logistic or perceptron.
    #[arg(long, default_value = "logistic")]
    loss: String,
    /// Examples per update, or `full` for full-batch gradient descent.
    #[arg(long, default_value = "1")]
    batch_size: String,
    /// Keep corpus order in every epoch.
    #[arg(long)]
    no_shuffle: bool,
    /// left-to-right or two-pass; two-pass by default when right tags are used.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug, Clone, Copy)]
struct ScrdrOpts {
    /// Minimum net error reduction for a rule to be attached.
    #[arg(long, default_value_t = 2)]
    min_gain: usize,
    /// Minimum number of objects a rule must fire on.
    #[arg(long, default_value_t = 2)]
    min_fired: usize,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
}

#[derive(Args, Debug)]
struct TrainLinearArgs {
    corpus: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    opts: LinearOpts,
}

#[derive(Args, Debug)]
struct TrainScrdrArgs {
    corpus: PathBuf,
    /// Tree file; the lexicon is written beside it with a `.lex` suffix.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    opts: ScrdrOpts,
}

#[derive(Args, Debug)]
struct TagArgs {
    #[arg(short, long)]
    model: PathBuf,
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the decode mode of a linear model.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(short, long)]
    model: PathBuf,
    gold: PathBuf,
    /// Training lexicon for the unknown-word split; rule models carry their own.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TaggerKind {
    Linear,
    Scrdr,
}

#[derive(Args, Debug)]
struct CvArgs {
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "linear")]
    tagger: TaggerKind,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Cut folds as contiguous blocks instead of shuffling.
    #[arg(long)]
    contiguous: bool,
    #[arg(long)]
    parallel_folds: bool,
    #[command(flatten)]
    linear: LinearOpts,
    #[command(flatten)]
    scrdr: ScrdrOpts,
    /// Text report; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KfoldArgs {
    #[command(flatten)]
    cv: CvArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    cv: CvArgs,
    /// Raw text timed after training on the whole corpus.
    #[arg(long)]
    speed_corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Speed report; stdout when absent. Kept apart from the accuracy
    /// report, which is deterministic.
    #[arg(long)]
    speed_output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AblateArgs {
    corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long)]
    contiguous: bool,
    #[arg(long)]
    parallel_folds: bool,
    #[command(flatten)]
    linear: LinearOpts,
    #[command(flatten)]
    scrdr: ScrdrOpts,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { Kind::Usage.exit_code() } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .parse_default_env()
        .init();
    vnpos::corpus::set_quiet(cli.quiet);
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { kind, message }) => {
            eprintln!("error: {message}");
            kind.exit_code()
        }
    }
}
