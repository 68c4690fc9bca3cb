mod commands;
mod context;
mod text;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tweet aggression/grief classification pipeline.
#[derive(Parser)]
#[command(name = "streetlex", version)]
struct Cli {
    /// Pipeline config file (TOML). Relative paths inside it are resolved
    /// against its directory.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for every randomized stage, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override one config value, e.g. `--set aligner.iterations=20`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus, optionally cut a time window, and re-serialize it.
    Ingest(IngestArgs),
    /// Cohen's kappa between two annotators.
    Kappa(KappaArgs),
    /// Map fine codes to aggression / grief / other.
    Collapse(CollapseArgs),
    /// Train the domain-adapted tagger.
    TagTrain(TagTrainArgs),
    /// Tag one tweet per input line.
    Tag(TagArgs),
    /// Train a Model 1 translation table on a parallel corpus.
    AlignTrain(AlignTrainArgs),
    /// Extract a nonstandard-to-standard glossary from a translation table.
    Glossary(GlossaryArgs),
    /// Affect coverage and aggregates for one tweet per input line.
    Affect(AffectArgs),
    /// Tokenize, tag and featurize a labeled corpus.
    Featurize(FeaturizeArgs),
    /// Train the classifier on a feature file.
    Train(TrainArgs),
    /// Classify every record in a feature file.
    Predict(PredictArgs),
    /// Score a model against the labels in a feature file.
    Evaluate(EvaluateArgs),
    /// k-fold cross-validation on a feature file.
    Xval(XvalArgs),
    /// align-train, glossary, tag-train, featurize, train and evaluate in one go.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
pub struct CorpusArgs {
    /// Corpus file (tweets and annotations); defaults to paths.corpus.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Corpus encoding; defaults to paths.corpus_format.
    #[arg(long, value_enum)]
    corpus_format: Option<InputFormat>,
    /// Fine-code table; defaults to paths.codebook, then the built-in codebook.
    #[arg(long, value_name = "PATH")]
    codebook: Option<PathBuf>,
}

#[derive(Args)]
pub struct IngestArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Keep tweets created at or after this RFC 3339 instant.
    #[arg(long)]
    from: Option<String>,
    /// Keep tweets created before this RFC 3339 instant.
    #[arg(long)]
    to: Option<String>,
    /// Where to write the corpus; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Jsonl)]
    output_format: InputFormat,
}

#[derive(Args)]
pub struct KappaArgs {
    /// Two annotation files, one per annotator.
    #[arg(num_args = 0..=2, value_name = "ANNOTATIONS")]
    files: Vec<PathBuf>,
    /// Two annotator ids to compare inside the corpus instead.
    #[arg(long, value_delimiter = ',', value_name = "A,B")]
    annotators: Vec<String>,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Compare collapsed categories or fine codes.
    #[arg(long, default_value = "collapsed")]
    level: String,
    /// Also list the items the annotators disagree on.
    #[arg(long)]
    disagreements: bool,
}

#[derive(Args)]
pub struct CollapseArgs {
    /// Annotation file; with no file, each positional code is collapsed.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Jsonl)]
    input_format: InputFormat,
    #[arg(long, value_name = "PATH")]
    codebook: Option<PathBuf>,
    codes: Vec<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct TagTrainArgs {
    /// Standard-domain tagged sentences; defaults to paths.tagged_source.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Tweet-domain tagged sentences; defaults to paths.tagged_target.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Train on pooled, unaugmented features.
    #[arg(long)]
    no_augment: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
pub struct TagArgs {
    /// Tagger model; defaults to paths.tagger_model.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value = "target")]
    domain: String,
    /// One tweet per line; stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct AlignTrainArgs {
    /// Parallel corpus; defaults to paths.parallel.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Leave out the NULL source token.
    #[arg(long)]
    no_null: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
pub struct GlossaryArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct AffectArgs {
    /// Defaults to paths.lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Defaults to paths.glossary.
    #[arg(long)]
    glossary: Option<PathBuf>,
    /// Look tokens up in the lexicon only.
    #[arg(long)]
    no_glossary: bool,
    /// One tweet per line; stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct FeaturizeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    tagger_model: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    glossary: Option<PathBuf>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
pub struct ClassifierFlags {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Loss weights for aggression, grief, other.
    #[arg(long, value_delimiter = ',', num_args = 3, value_name = "A,G,O")]
    class_weights: Vec<f64>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Feature file written by `featurize`.
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    flags: ClassifierFlags,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Classifier model; defaults to paths.classifier_model.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    features: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    features: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct XvalArgs {
    #[arg(long)]
    features: PathBuf,
    /// Number of folds; defaults to eval.folds.
    #[arg(long, short)]
    k: Option<usize>,
    #[command(flatten)]
    flags: ClassifierFlags,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PipelineArgs {
    /// Defaults to paths.output_dir.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed downstream pipe is not a failure of ours.
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    use std::io::ErrorKind::BrokenPipe;
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == BrokenPipe)
            || c.downcast_ref::<serde_json::Error>().and_then(|j| j.io_error_kind()) == Some(BrokenPipe)
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = context::Context::load(cli.config.as_deref(), &cli.overrides, cli.seed, cli.format)?;
    match cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Kappa(a) => commands::kappa(&ctx, a),
        Command::Collapse(a) => commands::collapse(&ctx, a),
        Command::TagTrain(a) => commands::tag_train(&ctx, a),
        Command::Tag(a) => commands::tag(&ctx, a),
        Command::AlignTrain(a) => commands::align_train(&ctx, a),
        Command::Glossary(a) => commands::glossary(&ctx, a),
        Command::Affect(a) => commands::affect(&ctx, a),
        Command::Featurize(a) => commands::featurize(&ctx, a),
        Command::Train(a) => commands::train(&ctx, a),
        Command::Predict(a) => commands::predict(&ctx, a),
        Command::Evaluate(a) => commands::evaluate(&ctx, a),
        Command::Xval(a) => commands::xval(&ctx, a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
    }
}
