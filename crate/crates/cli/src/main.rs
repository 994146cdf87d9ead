use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use udm_core::evaluate::{AblationScope, Method};
use udm_core::negatives::{Aggregate, NegativeStrategy};
use udm_core::vae::EmbeddingMode;

mod commands;
mod config;
mod error;

use config::RunConfig;
use error::CliError;

/// Grounded concept learning from object features and free-text descriptions.
///
/// Settings come from built-in defaults, then `--config`, then flags; flags win.
/// Set `UDM_LOG` (error, warn, info, debug, trace) to control log output.
#[derive(Parser, Debug)]
#[command(name = "udm", version, about, long_about)]
struct Cli {
    /// JSON run configuration; any field may be omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for folds and concepts (1 is the determinism reference).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic dataset (features, descriptions, category files).
    Synth(SynthArgs),
    /// Train the variational autoencoder on a feature file.
    TrainVae(TrainVaeArgs),
    /// Encode every feature row with a trained autoencoder.
    Embed(EmbedArgs),
    /// Train one classifier per concept on the whole dataset.
    TrainConcepts(TrainConceptsArgs),
    /// Cross-validated evaluation; writes report CSVs.
    Evaluate(EvaluateArgs),
    /// Evaluation at several fractions of the training objects.
    Ablate(AblateArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 72)]
    objects: usize,
    /// Feature dimension.
    #[arg(long, default_value_t = 120)]
    dim: usize,
    /// Number of concept categories (1 to 3).
    #[arg(long, default_value_t = 3)]
    categories: usize,
    /// Probability that a description token is replaced by a wrong one.
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    /// Cluster centre distance from the origin, in noise standard deviations.
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    #[arg(long, default_value_t = 4)]
    images_per_object: usize,
    #[arg(long, default_value_t = 3)]
    descriptions_per_object: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Default)]
struct DataArgs {
    /// Feature CSV: instance_id,object_id,f0,...
    #[arg(long, value_name = "FILE")]
    features: Option<PathBuf>,
    /// Description TSV: object_id<TAB>text
    #[arg(long, value_name = "FILE")]
    descriptions: Option<PathBuf>,
    /// Category manifest JSON (feature slice per category).
    #[arg(long, value_name = "FILE")]
    categories: Option<PathBuf>,
    /// Concept-to-category TSV.
    #[arg(long, value_name = "FILE")]
    concept_categories: Option<PathBuf>,
    /// One stopword per line; replaces the built-in list.
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Language tag of the descriptions (en, es, hi, ...).
    #[arg(long)]
    language: Option<String>,
    /// Minimum corpus frequency for a concept.
    #[arg(long)]
    min_count: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct VaeArgs {
    /// Latent size d; a comma-separated list sweeps several.
    #[arg(long, value_delimiter = ',', value_name = "D[,D...]")]
    latent_dim: Vec<usize>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    vae_epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    vae_learning_rate: Option<f64>,
    /// Which encoder outputs form the embedding.
    #[arg(long, value_enum)]
    embedding: Option<EmbeddingArg>,
}

#[derive(Args, Debug, Default)]
struct ClassifierArgs {
    /// Negative examples: every non-positive object, or the semantically most distant ones.
    #[arg(long, value_enum)]
    negatives: Option<NegativesArg>,
    /// Semantic negatives per positive object.
    #[arg(long)]
    negative_ratio: Option<f64>,
    /// Distance from a candidate to the positive set.
    #[arg(long, value_enum)]
    aggregate: Option<AggregateArg>,
    #[arg(long)]
    pvdm_dim: Option<usize>,
    #[arg(long)]
    pvdm_epochs: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    clf_epochs: Option<usize>,
    #[arg(long)]
    clf_learning_rate: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct ProtocolArgs {
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct TrainVaeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    vae: VaeArgs,
    /// Model JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    /// Model JSON from `train-vae`.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    /// Embedding CSV to write (same layout as the feature CSV).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainConceptsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    vae: VaeArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Encoder for `--method udm`; trained on all features when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Classifier bundle JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    vae: VaeArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Report directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    vae: VaeArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Methods to compare, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    method: Vec<MethodArg>,
    /// Training fractions in (0, 1], comma-separated.
    #[arg(long, value_delimiter = ',', value_name = "F[,F...]")]
    fractions: Vec<f64>,
    /// What a fraction below 1 removes.
    #[arg(long, value_enum)]
    scope: Option<ScopeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Udm,
    CategoryFreeLr,
    PredefinedCategory,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Udm => Method::Udm,
            MethodArg::CategoryFreeLr => Method::CategoryFreeLr,
            MethodArg::PredefinedCategory => Method::PredefinedCategory,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NegativesArg {
    All,
    Semantic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregateArg {
    Max,
    Centroid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EmbeddingArg {
    MuOnly,
    MuAndVar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScopeArg {
    /// Images, descriptions and labels alike.
    All,
    /// Only labeled objects; the autoencoder keeps every training image.
    Labels,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl DataArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let some = |p: Option<PathBuf>, slot: &mut Option<PathBuf>| {
            if p.is_some() {
                *slot = p;
            }
        };
        some(self.features, &mut cfg.features);
        some(self.descriptions, &mut cfg.descriptions);
        some(self.categories, &mut cfg.categories);
        some(self.concept_categories, &mut cfg.concept_categories);
        some(self.stopwords, &mut cfg.stopwords);
        set(&mut cfg.language, self.language);
        set(&mut cfg.min_count, self.min_count);
    }
}

impl VaeArgs {
    fn apply(self, cfg: &mut RunConfig) {
        match self.latent_dim.as_slice() {
            [] => {}
            [d] => {
                cfg.vae.latent_dim = *d;
                cfg.latent_dims.clear();
            }
            many => cfg.latent_dims = many.to_vec(),
        }
        set(&mut cfg.vae.hidden_dim, self.hidden_dim);
        set(&mut cfg.vae.epochs, self.vae_epochs);
        set(&mut cfg.vae.batch_size, self.batch_size);
        set(&mut cfg.vae.learning_rate, self.vae_learning_rate);
        set(
            &mut cfg.vae.embedding,
            self.embedding.map(|e| match e {
                EmbeddingArg::MuOnly => EmbeddingMode::MuOnly,
                EmbeddingArg::MuAndVar => EmbeddingMode::MuAndVar,
            }),
        );
    }
}

impl ClassifierArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let n = &mut cfg.negatives;
        set(
            &mut n.strategy,
            self.negatives.map(|s| match s {
                NegativesArg::All => NegativeStrategy::AllNonpositive,
                NegativesArg::Semantic => NegativeStrategy::SemanticDistant,
            }),
        );
        set(&mut n.ratio, self.negative_ratio);
        set(
            &mut n.aggregate,
            self.aggregate.map(|a| match a {
                AggregateArg::Max => Aggregate::Max,
                AggregateArg::Centroid => Aggregate::Centroid,
            }),
        );
        set(&mut n.pvdm.dim, self.pvdm_dim);
        set(&mut n.pvdm.epochs, self.pvdm_epochs);
        set(&mut cfg.classifier.l2, self.l2);
        set(&mut cfg.classifier.epochs, self.clf_epochs);
        set(&mut cfg.classifier.learning_rate, self.clf_learning_rate);
    }
}

impl ProtocolArgs {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.protocol.k, self.folds);
        set(&mut cfg.protocol.trials, self.trials);
        set(&mut cfg.protocol.threshold, self.threshold);
    }
}

fn base_config(path: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut cfg = base_config(cli.config.as_ref())?;
    match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::TrainVae(a) => {
            a.data.apply(&mut cfg);
            a.vae.apply(&mut cfg);
            set(&mut cfg.out, a.out.map(Some));
            set(&mut cfg.seed, a.seed);
            if cfg.latent_dims.len() > 1 {
                return Err(CliError::Usage("train-vae takes a single --latent-dim".into()));
            }
            commands::train_vae(&cfg)
        }
        Command::Embed(a) => {
            set(&mut cfg.model, a.model.map(Some));
            set(&mut cfg.features, a.features.map(Some));
            set(&mut cfg.out, a.out.map(Some));
            commands::embed(&cfg)
        }
        Command::TrainConcepts(a) => {
            a.data.apply(&mut cfg);
            a.vae.apply(&mut cfg);
            a.classifier.apply(&mut cfg);
            if let Some(m) = a.method {
                cfg.methods = vec![m.into()];
            }
            set(&mut cfg.model, a.model.map(Some));
            set(&mut cfg.out, a.out.map(Some));
            set(&mut cfg.seed, a.seed);
            commands::train_concepts(&cfg)
        }
        Command::Evaluate(a) => {
            a.data.apply(&mut cfg);
            a.vae.apply(&mut cfg);
            a.classifier.apply(&mut cfg);
            a.protocol.apply(&mut cfg);
            if let Some(m) = a.method {
                cfg.methods = vec![m.into()];
            }
            set(&mut cfg.out, a.out.map(Some));
            set(&mut cfg.seed, a.seed);
            commands::evaluate(&cfg)
        }
        Command::Ablate(a) => {
            a.data.apply(&mut cfg);
            a.vae.apply(&mut cfg);
            a.classifier.apply(&mut cfg);
            a.protocol.apply(&mut cfg);
            if !a.method.is_empty() {
                cfg.methods = a.method.into_iter().map(Method::from).collect();
            }
            if !a.fractions.is_empty() {
                cfg.fractions = a.fractions;
            }
            set(
                &mut cfg.ablation_scope,
                a.scope.map(|s| match s {
                    ScopeArg::All => AblationScope::All,
                    ScopeArg::Labels => AblationScope::Labels,
                }),
            );
            set(&mut cfg.out, a.out.map(Some));
            set(&mut cfg.seed, a.seed);
            commands::ablate(&cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("UDM_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::ThreadPool(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(cli))),
        None => dispatch(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
