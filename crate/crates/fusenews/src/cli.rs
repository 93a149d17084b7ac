//! The `fusenews` command-line tool.

use std::ffi::OsString;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fusenews_core::dataset::{featurize, labels, Example};
use fusenews_core::encoder::EmbeddingStore;
use fusenews_core::explain::{attention_heatmap, exact_shapley, sampled_shapley};
use fusenews_core::model::{Ablation, EncoderKind};
use fusenews_core::synthetic::synthetic_corpus;
use fusenews_core::text::{Article, Label, Lexicon};
use fusenews_core::train::{stratified_kfold, train, TrainedModel};

use crate::clock::MonotonicClock;
use crate::config::RunConfig;
use crate::dataset::{load_articles, write_articles, LabelColumn};
use crate::embeddings::load_embeddings;
use crate::error::{CliError, ExitCode};
use crate::export::{heatmap_svg, shapley_summary, write_heatmap_csv, write_shapley_csv};
use crate::lexicon::load_lexicon;
use crate::parallel::{cross_validate_parallel, run_ablation_parallel};
use crate::reports::{
    write_ablation, write_features, write_history, write_metrics, write_predictions, write_timing, Provenance, Verdict,
};
use crate::weights::{load_weights, save_weights, WeightsMeta};

#[derive(Debug, Parser)]
#[command(name = "fusenews", version, about = "Hybrid feature-fusion fake-news classifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the eight raw statistical features of every article.
    Features(FeaturesArgs),
    /// Train on the whole dataset and save weights plus training history.
    Train(RunArgs),
    /// Stratified k-fold cross-validation, optionally over all ablations.
    Eval(EvalArgs),
    /// Fake probability and verdict per article.
    Predict(PredictArgs),
    /// Attention heatmap and Shapley attribution for one article.
    Explain(ExplainArgs),
    /// Write a synthetic corpus with a planted label rule.
    Synth(SynthArgs),
}

/// Settings shared by `train` and `eval`; flags override `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset CSV with columns id,title,text,label.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Label value (0 or 1) that marks fake articles.
    #[arg(long)]
    pub label_fake: Option<u8>,
    /// Precomputed embedding interchange file; selects the precomputed encoder.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub builtin_dim: Option<usize>,
    #[arg(long)]
    pub hidden_dim: Option<usize>,
    #[arg(long)]
    pub heads: Option<usize>,
    #[arg(long)]
    pub ffn_dim: Option<usize>,
    /// semantic-only, stat, attention or full.
    #[arg(long)]
    pub ablate: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for fold-level parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$($field).+ = v.clone().into(); })*
            };
        }
        set!(
            dataset => dataset,
            embeddings => embeddings,
            ffn_dim => ffn_dim,
            out => output,
        );
        macro_rules! set_plain {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        set_plain!(
            label_fake => label_fake,
            builtin_dim => builtin_dim,
            hidden_dim => hidden_dim,
            heads => heads,
            ablate => ablation,
            folds => folds,
            seed => seed,
            threads => threads,
            epochs => train.max_epochs,
            batch_size => train.batch_size,
            patience => train.patience,
            lr => train.learning_rate,
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub label_fake: Option<u8>,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Evaluate all four configurations and write an ablation table.
    #[arg(long)]
    pub ablation: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub weights: PathBuf,
    /// CSV with columns id,title,text (label optional).
    #[arg(long, conflicts_with_all = ["title", "text"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub text: Option<String>,
    /// Embedding file, required for models using the precomputed encoder.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Also write the verdicts as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, conflicts_with_all = ["title", "text"])]
    pub input: Option<PathBuf>,
    /// Article id within --input; the first row when omitted.
    #[arg(long, requires = "input")]
    pub id: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub text: Option<String>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// attention, shapley or both.
    #[arg(long, default_value = "both")]
    pub method: String,
    /// Use the sampled Shapley estimator with this many permutations
    /// instead of exact enumeration.
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Seed for the sampled estimator; defaults to the training seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "explain")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitCode::InputMalformed
            } else {
                ExitCode::Success
            };
            let _ = e.print();
            return match code {
                ExitCode::Success => Ok(()),
                c => Err(CliError::new(c, "invalid command line")),
            };
        }
    };
    match cli.command {
        Command::Features(a) => cmd_features(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Explain(a) => cmd_explain(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::new(ExitCode::Failure, format!("cannot create {}: {e}", path.display())))
}

fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance {
        config_hash: cfg.hash(),
        seed: cfg.seed,
    }
}

struct Loaded {
    examples: Vec<Example>,
    semantic_dim: usize,
}

fn load_dataset(cfg: &RunConfig, lexicon: &Lexicon) -> Result<Loaded, CliError> {
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::input("no dataset given (--dataset or \"dataset\" in the config)"))?;
    let articles = load_articles(path, LabelColumn::Required { fake: cfg.label_fake })?;
    let store = cfg.embeddings.as_deref().map(load_embeddings).transpose()?;
    let examples = featurize(&articles, lexicon, store.as_ref())?;
    Ok(Loaded {
        examples,
        semantic_dim: store.map_or(cfg.builtin_dim, |s| s.dim()),
    })
}

fn require_both_classes(examples: &[Example]) -> Result<(), CliError> {
    let fake = examples.iter().filter(|e| e.label == Label::Fake).count();
    if examples.is_empty() {
        return Err(CliError::new(ExitCode::Degenerate, "dataset has no articles"));
    }
    if fake == 0 || fake == examples.len() {
        return Err(CliError::new(
            ExitCode::Degenerate,
            "dataset contains a single class; training needs both fake and real articles",
        ));
    }
    Ok(())
}

fn cmd_features(a: &FeaturesArgs) -> Result<(), CliError> {
    let cfg = RunArgs {
        config: a.config.clone(),
        dataset: a.dataset.clone(),
        label_fake: a.label_fake,
        ..RunArgs::default()
    }
    .resolve()?;
    let lexicon = load_lexicon()?;
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::input("no dataset given (--dataset or \"dataset\" in the config)"))?;
    let articles = load_articles(path, LabelColumn::Required { fake: cfg.label_fake })?;
    if articles.is_empty() {
        eprintln!("warning: dataset {} has no articles; writing header only", path.display());
    }
    let examples = featurize(&articles, &lexicon, None)?;
    write_features(create(&a.out)?, &examples, cfg.label_fake, &provenance(&cfg))?;
    println!("wrote {} feature rows to {}", examples.len(), a.out.display());
    Ok(())
}

fn cmd_train(a: &RunArgs) -> Result<(), CliError> {
    let cfg = a.resolve()?;
    let lexicon = load_lexicon()?;
    let data = load_dataset(&cfg, &lexicon)?;
    require_both_classes(&data.examples)?;
    let model_cfg = cfg.model_config(data.semantic_dim)?;
    let tc = cfg.train_config();
    let indices: Vec<usize> = (0..data.examples.len()).collect();
    let outcome = train(&data.examples, &indices, &model_cfg, &tc, None)?;
    let prov = provenance(&cfg);
    fs::create_dir_all(&cfg.output)?;
    let weights = save_weights(
        &outcome.model,
        &WeightsMeta {
            seed: cfg.seed,
            config_hash: prov.config_hash.clone(),
            train: Some(tc),
        },
    );
    let weights_path = cfg.output.join("weights.json");
    fs::write(&weights_path, weights)?;
    write_history(create(&cfg.output.join("history.csv"))?, &outcome.history, &prov)?;
    let v = outcome.validation;
    println!(
        "validation f1={:.4} precision={:.4} recall={:.4} accuracy={:.4} (best epoch {} of {})",
        v.f1,
        v.precision,
        v.recall,
        v.accuracy,
        outcome.best_epoch,
        outcome.history.len()
    );
    println!("wrote {}", weights_path.display());
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    let cfg = a.run.resolve()?;
    let lexicon = load_lexicon()?;
    let data = load_dataset(&cfg, &lexicon)?;
    require_both_classes(&data.examples)?;
    let model_cfg = cfg.model_config(data.semantic_dim)?;
    let tc = cfg.train_config();
    let plan = stratified_kfold(&labels(&data.examples), cfg.folds, cfg.seed)?;
    let prov = provenance(&cfg);
    let clock = MonotonicClock::new();
    fs::create_dir_all(&cfg.output)?;
    if a.ablation {
        let rows = run_ablation_parallel(&data.examples, &plan, &model_cfg, &tc, &Ablation::ALL, cfg.threads, &clock)?;
        write_ablation(create(&cfg.output.join("ablation.csv"))?, &rows, &prov)?;
        for r in &rows {
            let name = r.ablation.name();
            write_metrics(create(&cfg.output.join(format!("metrics-{name}.csv")))?, &r.report, &prov)?;
            write_timing(create(&cfg.output.join(format!("timing-{name}.csv")))?, &r.report, &prov)?;
            let m = &r.report.mean;
            println!(
                "{name:<14} f1={:.4} precision={:.4} recall={:.4}",
                m.f1, m.precision, m.recall
            );
        }
    } else {
        let report = cross_validate_parallel(&data.examples, &plan, &model_cfg, &tc, cfg.threads, &clock)?;
        write_metrics(create(&cfg.output.join("metrics.csv"))?, &report, &prov)?;
        write_timing(create(&cfg.output.join("timing.csv"))?, &report, &prov)?;
        let (m, s) = (&report.mean, &report.std);
        println!(
            "{}-fold f1={:.4}±{:.4} precision={:.4}±{:.4} recall={:.4}±{:.4} accuracy={:.4}±{:.4} ({:.4} ms/sample)",
            cfg.folds, m.f1, s.f1, m.precision, s.precision, m.recall, s.recall, m.accuracy, s.accuracy,
            report.mean_ms_per_sample
        );
    }
    println!("wrote reports to {}", cfg.output.display());
    Ok(())
}

fn read_weights(path: &Path) -> Result<(TrainedModel, WeightsMeta), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::weights(format!("cannot read weights {}: {e}", path.display())))?;
    Ok(load_weights(&text)?)
}

/// Loads the embedding store a model needs and checks its width.
fn store_for(model: &TrainedModel, path: Option<&Path>) -> Result<Option<EmbeddingStore>, CliError> {
    match (model.model.config.encoder, path) {
        (EncoderKind::Builtin { .. }, _) => Ok(None),
        (EncoderKind::Precomputed, None) => Err(CliError::input(
            "this model uses precomputed embeddings; pass --embeddings",
        )),
        (EncoderKind::Precomputed, Some(p)) => {
            let store = load_embeddings(p)?;
            let want = model.model.config.semantic_dim;
            if store.dim() != want {
                return Err(CliError::weights(format!(
                    "embedding dimension {} does not match the model's semantic dimension {want}",
                    store.dim()
                )));
            }
            Ok(Some(store))
        }
    }
}

fn inline_article(title: &Option<String>, text: &Option<String>) -> Option<Article> {
    if title.is_none() && text.is_none() {
        return None;
    }
    Some(Article::new(
        "input",
        title.clone().unwrap_or_default(),
        text.clone().unwrap_or_default(),
        Label::Real,
    ))
}

fn cmd_predict(a: &PredictArgs) -> Result<(), CliError> {
    let (trained, meta) = read_weights(&a.weights)?;
    let lexicon = load_lexicon()?;
    let articles = match (&a.input, inline_article(&a.title, &a.text)) {
        (Some(path), _) => load_articles(path, LabelColumn::Optional { fake: 1 })?,
        (None, Some(article)) => vec![article],
        (None, None) => return Err(CliError::input("give --input or --title/--text")),
    };
    let store = store_for(&trained, a.embeddings.as_deref())?;
    let examples = featurize(&articles, &lexicon, store.as_ref())?;
    let verdicts = examples
        .iter()
        .map(|e| {
            let p = trained.predict(e).map_err(CliError::from_inference)?;
            Ok(Verdict {
                id: e.id.clone(),
                p_fake: p[1],
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for v in &verdicts {
        println!("{},{},{}", v.id, v.p_fake, v.label());
    }
    if let Some(out) = &a.out {
        let prov = Provenance {
            config_hash: meta.config_hash,
            seed: meta.seed,
        };
        write_predictions(create(out)?, &verdicts, &prov)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Attention,
    Shapley,
    Both,
}

fn cmd_explain(a: &ExplainArgs) -> Result<(), CliError> {
    let method = match a.method.as_str() {
        "attention" => Method::Attention,
        "shapley" => Method::Shapley,
        "both" => Method::Both,
        other => {
            return Err(CliError::new(
                ExitCode::UnsupportedExplain,
                format!("unsupported explain method {other:?}; expected attention, shapley or both"),
            ))
        }
    };
    let (trained, meta) = read_weights(&a.weights)?;
    if method != Method::Shapley && !trained.model.config.use_attention {
        return Err(CliError::new(
            ExitCode::UnsupportedExplain,
            "no attention in this configuration; use --method shapley",
        ));
    }
    let lexicon = load_lexicon()?;
    let article = match (&a.input, inline_article(&a.title, &a.text)) {
        (Some(path), _) => {
            let articles = load_articles(path, LabelColumn::Optional { fake: 1 })?;
            match &a.id {
                Some(id) => articles
                    .into_iter()
                    .find(|x| &x.id == id)
                    .ok_or_else(|| CliError::input(format!("article {id:?} not found in {}", path.display())))?,
                None => articles
                    .into_iter()
                    .next()
                    .ok_or_else(|| CliError::input(format!("{} has no articles", path.display())))?,
            }
        }
        (None, Some(article)) => article,
        (None, None) => return Err(CliError::input("give --input or --title/--text")),
    };
    let store = store_for(&trained, a.embeddings.as_deref())?;
    let example = Example::from_article(&article, &lexicon, store.as_ref())?;
    let prov = Provenance {
        config_hash: meta.config_hash,
        seed: a.seed.unwrap_or(meta.seed),
    };
    fs::create_dir_all(&a.out)?;
    if method != Method::Shapley {
        let map = attention_heatmap(&trained, &example).map_err(CliError::from_inference)?;
        write_heatmap_csv(create(&a.out.join("heatmap.csv"))?, &map, &example.id, &prov)?;
        fs::write(a.out.join("heatmap.svg"), heatmap_svg(&map, &example.id, &prov))?;
    }
    if method != Method::Attention {
        let report = match a.permutations {
            Some(p) => sampled_shapley(&trained, &example, p, prov.seed),
            None => exact_shapley(&trained, &example),
        }
        .map_err(CliError::from_inference)?;
        write_shapley_csv(create(&a.out.join("shapley.csv"))?, &report, &example.id, &prov)?;
        let summary = shapley_summary(&report, &example.id, &prov);
        fs::write(a.out.join("shapley.txt"), &summary)?;
        println!("p_fake={:.6} base={:.6}", report.prediction, report.base_value);
        println!("shapley efficiency residual: {:.3e}", report.residual);
    }
    println!("wrote explanation for {} to {}", example.id, a.out.display());
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let corpus = synthetic_corpus(a.n, a.seed);
    write_articles(create(&a.out)?, &corpus)?;
    println!("wrote {} synthetic articles to {}", corpus.len(), a.out.display());
    Ok(())
}
