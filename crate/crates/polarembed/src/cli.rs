//! Command-line surface. Every artifact is written atomically and starts with
//! comment lines recording the arguments and seed that produced it.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polarembed_core::{
    effective_rank, evaluate_splits_tuned, evaluate_splits_with, generate_synthetic, neighbors,
    stratified_splits, train_with_initial, tune_lambda, Dimension, Direction, EmbeddingMatrix,
    Init, Label, LabeledDocument, LsaScaling, StepSchedule, SynthConfig, TrainConfig, TrainingSet,
    Weighting,
};

use crate::artifact::{provenance_header, write_atomic};
use crate::corpus_io::{read_corpus, read_unlabeled, write_corpus, LabelMap};
use crate::embeddings_io::{import_embeddings, read_embeddings, write_embeddings, EmbeddingTable};
use crate::model_file::{model_from_str, model_to_string};
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "polarembed",
    version,
    about = "Supervised polarity-aware word embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic polarized corpus.
    Synth(SynthArgs),
    /// Effective-rank curve of the document-term matrix and the chosen k.
    Rank(RankArgs),
    /// Train embeddings and classifier on a whole corpus.
    Train(TrainArgs),
    /// Train and score one model per stratified train/test split.
    Eval(EvalArgs),
    /// Score documents with a trained model.
    Predict(PredictArgs),
    /// Most or least similar words to a query word.
    Neighbors(NeighborArgs),
    /// Cross-validate lambda over a grid.
    Tune(TuneArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 400)]
    docs: usize,
    #[arg(long, default_value_t = 0.10)]
    pos_frac: f64,
    #[arg(long, default_value_t = 0.70)]
    threshold: f64,
    #[arg(long, default_value_t = 8)]
    min_len: usize,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Class labels as POS,NEG. Default: 1/+1 positive, 0/-1 negative.
    #[arg(long, value_parser = LabelMap::parse)]
    label_map: Option<LabelMap>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightingArg {
    Tf,
    Tfidf,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Tf => Weighting::Tf,
            WeightingArg::Tfidf => Weighting::TfIdf,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    /// eta0 / t
    Harmonic,
    /// eta divided by t after every step
    LiteralFactorial,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Relative error threshold (0.3 for real corpora, 0.15 for the noise-free synthetic corpus).
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "tf")]
    weighting: WeightingArg,
    /// Write the curve here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Embedding dimension. Without it, k is the effective rank at --epsilon.
    #[arg(long, conflicts_with = "epsilon")]
    k: Option<usize>,
    /// Effective-rank threshold (0.3 for real corpora, 0.15 for the noise-free synthetic corpus).
    #[arg(long)]
    epsilon: Option<f64>,
    /// lsa, lsa-scaled, random, or file:PATH (word-vector text format; k comes from the file).
    #[arg(long, default_value = "lsa")]
    init: String,
    #[arg(long = "lambda", default_value_t = 0.01)]
    lambda_theta: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 50)]
    tau: usize,
    /// Maximum outer iterations.
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, value_enum, default_value = "tf")]
    weighting: WeightingArg,
    #[arg(long, value_enum, default_value = "harmonic")]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also write the learned vectors in word-vector text format.
    #[arg(long)]
    export_embeddings: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = 10)]
    splits: usize,
    #[arg(long, default_value_t = 0.2)]
    test_frac: f64,
    /// Report TSV path; printed to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot data: rank curve of the first training partition and per-split metrics.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Tune lambda per split over this grid on each training partition.
    #[arg(long, value_delimiter = ',')]
    tune_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Documents, one per line, optionally `label<TAB>text`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = LabelMap::parse)]
    label_map: Option<LabelMap>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NeighborArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// List the least similar words first.
    #[arg(long)]
    farthest: bool,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

enum InitSource {
    Config(Init),
    File(PathBuf, EmbeddingTable),
}

impl ModelArgs {
    fn init(&self) -> Result<InitSource> {
        Ok(match self.init.as_str() {
            "lsa" => InitSource::Config(Init::Lsa(LsaScaling::Unscaled)),
            "lsa-scaled" => InitSource::Config(Init::Lsa(LsaScaling::SingularValues)),
            "random" => InitSource::Config(Init::Random),
            s => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => {
                    let path = PathBuf::from(p);
                    let table = read_embeddings(BufReader::new(open(&path)?))
                        .with_context(|| format!("in {}", path.display()))?;
                    InitSource::File(path, table)
                }
                _ => bail!("--init must be lsa, lsa-scaled, random or file:PATH, got {s:?}"),
            },
        })
    }

    fn config(&self, init: &InitSource) -> TrainConfig {
        let dimension = match (self.k, self.epsilon, init) {
            (Some(k), _, _) => Dimension::Fixed(k),
            (None, None, InitSource::File(_, t)) => Dimension::Fixed(t.k()),
            (None, e, _) => Dimension::Auto {
                epsilon: e.unwrap_or(0.3),
            },
        };
        TrainConfig {
            dimension,
            lambda_theta: self.lambda_theta,
            eta0: self.eta,
            tau: self.tau,
            max_outer_iters: self.iters,
            convergence_tol: self.tol,
            seed: self.seed,
            init: match init {
                InitSource::Config(i) => i.clone(),
                InitSource::File(p, _) => Init::File(p.display().to_string()),
            },
            weighting: self.weighting.into(),
            solver: Default::default(),
            schedule: match self.schedule {
                ScheduleArg::Harmonic => StepSchedule::Harmonic,
                ScheduleArg::LiteralFactorial => StepSchedule::LiteralFactorial,
            },
        }
    }
}

/// `W₀` for a training partition: imported vectors for file init, otherwise
/// left to the configuration.
fn initial_for(
    init: &InitSource,
    set: &TrainingSet,
    seed: u64,
) -> polarembed_core::Result<Option<EmbeddingMatrix>> {
    match init {
        InitSource::Config(_) => Ok(None),
        InitSource::File(_, table) => {
            import_embeddings(&set.vocab, table, seed).map(|(w, _)| Some(w))
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn load_corpus(args: &CorpusArgs) -> Result<Vec<LabeledDocument>> {
    let map = args.label_map.clone().unwrap_or_default();
    read_corpus(BufReader::new(open(&args.corpus)?), &map)
        .with_context(|| format!("in {}", args.corpus.display()))
}

fn labels_of(docs: &[LabeledDocument]) -> Vec<Label> {
    docs.iter().map(|d| d.label).collect()
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// human-readable output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    let recorded: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match cli.command {
        Command::Synth(a) => synth(a, &recorded, out),
        Command::Rank(a) => rank(a, &recorded, out),
        Command::Train(a) => train_cmd(a, &recorded, out),
        Command::Eval(a) => eval(a, &recorded, out),
        Command::Predict(a) => predict(a, &recorded, out),
        Command::Neighbors(a) => neighbors_cmd(a, out),
        Command::Tune(a) => tune(a, &recorded, out),
    }
}

fn synth(a: SynthArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let cfg = SynthConfig {
        n_docs: a.docs,
        positive_fraction: a.pos_frac,
        polarity_threshold: a.threshold,
        min_len: a.min_len,
        max_len: a.max_len,
        seed: a.seed,
        ..Default::default()
    };
    let docs = generate_synthetic(&cfg)?;
    let mut buf = Vec::new();
    write_corpus(
        &mut buf,
        &provenance_header(argv, Some(a.seed)),
        &docs,
        &LabelMap::Auto,
    )?;
    write_atomic(&a.out, &buf)?;
    let n_pos = docs.iter().filter(|d| d.label.is_positive()).count();
    writeln!(
        out,
        "wrote {} documents ({} positive) to {}",
        docs.len(),
        n_pos,
        a.out.display()
    )?;
    Ok(())
}

fn rank(a: RankArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let set = TrainingSet::from_documents(&docs, a.weighting.into())?;
    let curve = effective_rank(&set.phi, a.epsilon)?;
    let tsv = report::rank_tsv(&provenance_header(argv, None), &curve);
    match &a.out {
        Some(p) => {
            write_atomic(p, tsv.as_bytes())?;
            writeln!(
                out,
                "chosen k = {} at epsilon {}",
                curve.chosen_k, curve.epsilon
            )?;
        }
        None => out.write_all(tsv.as_bytes())?,
    }
    Ok(())
}

fn train_cmd(a: TrainArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let init = a.model.init()?;
    let cfg = a.model.config(&init);
    let set = TrainingSet::from_documents(&docs, cfg.weighting)?;
    let w0 = initial_for(&init, &set, cfg.seed)?;
    let model = train_with_initial(&set, &cfg, w0)?;
    let header = provenance_header(argv, Some(cfg.seed));
    let text = model_to_string(&model, &header)?;
    let export = match &a.export_embeddings {
        Some(p) => {
            let mut buf = Vec::new();
            write_embeddings(&mut buf, &header, &model.vocab, &model.embeddings)?;
            Some((p, buf))
        }
        None => None,
    };
    write_atomic(&a.out, text.as_bytes())?;
    if let Some((p, buf)) = export {
        write_atomic(p, &buf)?;
    }
    writeln!(
        out,
        "k = {}, {} words, {} outer iterations ({:?}), objective {} -> {}",
        model.k(),
        model.vocab.len(),
        model.trace.iterations(),
        model.trace.stop,
        model.trace.initial_objective,
        model.trace.final_objective()
    )?;
    writeln!(out, "wrote model to {}", a.out.display())?;
    Ok(())
}

fn eval(a: EvalArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let init = a.model.init()?;
    let cfg = a.model.config(&init);
    let splits = stratified_splits(&labels_of(&docs), a.splits, a.test_frac, cfg.seed)?;
    let mut initial = |set: &TrainingSet| initial_for(&init, set, cfg.seed);
    let report = match &a.tune_grid {
        Some(grid) => evaluate_splits_tuned(&docs, &splits, &cfg, grid, a.folds, &mut initial)?,
        None => evaluate_splits_with(&docs, &splits, &cfg, &mut initial)?,
    };
    let header = provenance_header(argv, Some(cfg.seed));
    let tsv = report::eval_tsv(&header, &report);
    let plot = match &a.plot_data {
        Some(p) => {
            let first: Vec<LabeledDocument> = splits.pairs[0]
                .train
                .iter()
                .map(|&i| docs[i].clone())
                .collect();
            let set = TrainingSet::from_documents(&first, cfg.weighting)?;
            let eps = match cfg.dimension {
                Dimension::Auto { epsilon } => epsilon,
                Dimension::Fixed(_) => 0.3,
            };
            let curve = effective_rank(&set.phi, eps)?;
            Some((p, report::plot_data(&header, Some(&curve), &report)))
        }
        None => None,
    };
    match &a.out {
        Some(p) => write_atomic(p, tsv.as_bytes())?,
        None => out.write_all(tsv.as_bytes())?,
    }
    if let Some((p, text)) = plot {
        write_atomic(p, text.as_bytes())?;
    }
    out.write_all(report::eval_summary(&report).as_bytes())?;
    Ok(())
}

fn predict(a: PredictArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.model)
        .with_context(|| format!("cannot read {}", a.model.display()))?;
    let model = model_from_str(&text).with_context(|| format!("in {}", a.model.display()))?;
    let map = a.label_map.unwrap_or_default();
    let rows = read_unlabeled(BufReader::new(open(&a.input)?), &map)?;
    let mut s = provenance_header(argv, None);
    s.push_str("line\tprobability\tpredicted\tlabel\n");
    for (line, label, doc) in rows {
        let p = model.predict_text(&doc);
        let predicted = if p >= 0.5 {
            Label::Positive
        } else {
            Label::Negative
        };
        s.push_str(&format!(
            "{line}\t{p}\t{}\t{}\n",
            map.render(predicted),
            label.map_or("", |l| map.render(l))
        ));
    }
    match &a.out {
        Some(p) => write_atomic(p, s.as_bytes())?,
        None => out.write_all(s.as_bytes())?,
    }
    Ok(())
}

fn neighbors_cmd(a: NeighborArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.model)
        .with_context(|| format!("cannot read {}", a.model.display()))?;
    let model = model_from_str(&text).with_context(|| format!("in {}", a.model.display()))?;
    let dir = if a.farthest {
        Direction::Farthest
    } else {
        Direction::Nearest
    };
    let res = neighbors(&model, &a.word, a.top, dir).map_err(|e| match e {
        polarembed_core::Error::OutOfVocabulary { query, suggestions }
            if !suggestions.is_empty() =>
        {
            anyhow::anyhow!(
                "{query:?} is not in the vocabulary; did you mean {}?",
                suggestions.join(", ")
            )
        }
        e => e.into(),
    })?;
    writeln!(out, "rank\tword\tsimilarity")?;
    for (i, (w, s)) in res.ranked.iter().enumerate() {
        writeln!(out, "{}\t{w}\t{s}", i + 1)?;
    }
    Ok(())
}

fn tune(a: TuneArgs, argv: &[String], out: &mut dyn Write) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let init = a.model.init()?;
    if matches!(init, InitSource::File(..)) {
        bail!("tune supports lsa, lsa-scaled and random initialization");
    }
    let cfg = a.model.config(&init);
    let sel = tune_lambda(&docs, &a.grid, &cfg, a.folds, cfg.seed)?;
    let tsv = report::tuning_tsv(&provenance_header(argv, Some(cfg.seed)), &sel);
    match &a.out {
        Some(p) => {
            write_atomic(p, tsv.as_bytes())?;
            writeln!(out, "best lambda = {}", sel.best)?;
        }
        None => out.write_all(tsv.as_bytes())?,
    }
    Ok(())
}
