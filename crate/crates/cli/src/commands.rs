use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use udm_core::dataset::{
    build_vocabulary, builtin_stopwords, load_category_manifest, load_concept_categories, load_descriptions,
    load_features, load_stopwords, write_features, ConceptCategoryMap, ConceptVocabulary, DescriptionCorpus,
    FeatureTable, Instance, Language,
};
use udm_core::evaluate::{
    ablate as run_ablation, emit_ablation, emit_report, emit_sweep, fit_classifiers, run, EvalInputs, Method,
};
use udm_core::synth::{generate, SynthConfig};
use udm_core::vae::{train, VaeConfig, VaeModel};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::SynthArgs;

pub fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let mut cfg = SynthConfig::benchmark_with(a.objects, a.dim, a.categories, a.noise, a.seed, a.separation, 1.0);
    cfg.images_per_object = a.images_per_object;
    cfg.descriptions_per_object = a.descriptions_per_object;
    let out = generate(&cfg, &a.out)?;
    for p in [
        &out.features,
        &out.descriptions,
        &out.categories,
        &out.concept_categories,
    ] {
        println!("{}", p.display());
    }
    println!(
        "corrupted tokens: {} of {}",
        out.stats.corrupted_tokens, out.stats.total_tokens
    );
    Ok(())
}

/// Loaded inputs shared by the training and evaluation commands.
struct Data {
    features: FeatureTable,
    corpus: DescriptionCorpus,
    vocab: ConceptVocabulary,
    concept_categories: Option<ConceptCategoryMap>,
}

impl Data {
    fn inputs(&self) -> EvalInputs<'_> {
        EvalInputs {
            features: &self.features,
            corpus: &self.corpus,
            vocab: &self.vocab,
            concept_categories: self.concept_categories.as_ref(),
        }
    }
}

fn load_features_with_manifest(cfg: &RunConfig) -> Result<FeatureTable, CliError> {
    let features = load_features(cfg.require(&cfg.features, "--features")?)?;
    Ok(match &cfg.categories {
        Some(p) => features.with_category_slices(load_category_manifest(p)?)?,
        None => features,
    })
}

fn load_data(cfg: &RunConfig) -> Result<Data, CliError> {
    let descriptions = cfg.require(&cfg.descriptions, "--descriptions")?;
    cfg.check_optional(&cfg.categories, "--categories")?;
    cfg.check_optional(&cfg.concept_categories, "--concept-categories")?;
    cfg.check_optional(&cfg.stopwords, "--stopwords")?;
    let features = load_features_with_manifest(cfg)?;
    let language = Language::new(&cfg.language);
    let corpus = load_descriptions(descriptions, &language)?;
    let stopwords: BTreeSet<String> = match &cfg.stopwords {
        Some(p) => load_stopwords(p, &language)?,
        None => builtin_stopwords(&language),
    };
    let vocab = build_vocabulary(&corpus, cfg.min_count, &stopwords)?;
    let concept_categories = cfg
        .concept_categories
        .as_ref()
        .map(load_concept_categories)
        .transpose()?;
    log::info!(
        "{} images of {} objects, {} descriptions, {} concepts",
        features.len(),
        features.object_ids().len(),
        corpus.len(),
        vocab.len()
    );
    if let Some(map) = &concept_categories {
        let mut per_category: std::collections::BTreeMap<&str, usize> = Default::default();
        for t in vocab.tokens() {
            if let Some(c) = map.primary_category(t) {
                *per_category.entry(c).or_default() += 1;
            }
        }
        for (c, n) in per_category {
            log::info!("{n} {c} concepts");
        }
    }
    Ok(Data {
        features,
        corpus,
        vocab,
        concept_categories,
    })
}

fn out_path<'a>(cfg: &'a RunConfig, flag: &str) -> Result<&'a Path, CliError> {
    cfg.out
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("{flag} is required (flag or config file)")))
}

pub fn train_vae(cfg: &RunConfig) -> Result<(), CliError> {
    let out = out_path(cfg, "--out")?;
    let features = load_features(cfg.require(&cfg.features, "--features")?)?;
    let vae = VaeConfig {
        input_dim: features.dim(),
        seed: cfg.seed,
        ..cfg.vae.clone()
    };
    println!("{}", serde_json::to_string(&vae).expect("config serializes"));
    let (model, history) = train(&features, &vae)?;
    model.save(out)?;
    println!(
        "loss: first epoch {:.4}, last epoch {:.4}",
        history.first().unwrap_or(f64::NAN),
        history.last().unwrap_or(f64::NAN)
    );
    println!("{}", out.display());
    Ok(())
}

pub fn embed(cfg: &RunConfig) -> Result<(), CliError> {
    let out = out_path(cfg, "--out")?;
    let model = VaeModel::load(cfg.require(&cfg.model, "--model")?)?;
    let features = load_features(cfg.require(&cfg.features, "--features")?)?;
    let instances = features
        .instances()
        .iter()
        .map(|inst| {
            Ok(Instance {
                instance_id: inst.instance_id.clone(),
                object_id: inst.object_id.clone(),
                x: model.embed(&inst.x)?.0,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let table = FeatureTable::new(model.config().embedding_dim(), instances)?;
    write_features(&table, out)?;
    println!("{}", out.display());
    Ok(())
}

fn single_method(cfg: &RunConfig, command: &str) -> Result<Method, CliError> {
    match cfg.methods() {
        m if m.len() == 1 => Ok(m[0]),
        _ => Err(CliError::Usage(format!("{command} takes a single --method"))),
    }
}

pub fn train_concepts(cfg: &RunConfig) -> Result<(), CliError> {
    let out = out_path(cfg, "--out")?;
    let method = single_method(cfg, "train-concepts")?;
    if cfg.latent_dims.len() > 1 {
        return Err(CliError::Usage("train-concepts takes a single --latent-dim".into()));
    }
    if cfg.model.is_some() && method != Method::Udm {
        return Err(CliError::Usage("--model only applies to --method udm".into()));
    }
    let model = match &cfg.model {
        Some(_) => Some(VaeModel::load(cfg.require(&cfg.model, "--model")?)?),
        None => None,
    };
    let data = load_data(cfg)?;
    let settings = cfg.run_settings().remove(0);
    let (bundle, skipped) = fit_classifiers(&data.inputs(), &settings, model.as_ref())?;
    bundle.save(out)?;
    for s in &skipped {
        log::warn!("`{}` not trained: {}", s.concept, s.reason);
    }
    println!("{} classifiers, {} skipped", bundle.len(), skipped.len());
    println!("{}", out.display());
    Ok(())
}

fn check_sweep(cfg: &RunConfig, methods: &[Method]) -> Result<(), CliError> {
    if cfg.latent_dims.len() > 1 && !methods.contains(&Method::Udm) {
        return Err(CliError::Usage("a --latent-dim sweep needs --method udm".into()));
    }
    Ok(())
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let out = out_path(cfg, "--out")?.to_path_buf();
    let method = single_method(cfg, "evaluate")?;
    check_sweep(cfg, &[method])?;
    let data = load_data(cfg)?;
    let mut reports = Vec::new();
    for settings in cfg.run_settings() {
        reports.push(run(&data.inputs(), &settings)?);
    }
    let written: Vec<PathBuf> = if reports.len() == 1 {
        emit_report(&reports[0], &out)?
    } else {
        emit_sweep(&reports, &out)?
    };
    for r in &reports {
        println!(
            "{}: mean F1 {:.4} (min {:.4}, max {:.4}), micro F1 {:.4}",
            r.label(),
            r.mean_f1,
            r.min_f1,
            r.max_f1,
            r.micro_f1
        );
    }
    for p in written {
        log::info!("wrote {}", p.display());
    }
    println!("{}", out.display());
    Ok(())
}

pub fn ablate(cfg: &RunConfig) -> Result<(), CliError> {
    let out = out_path(cfg, "--out")?.to_path_buf();
    if cfg.fractions.is_empty() {
        return Err(CliError::Usage("--fractions is required".into()));
    }
    check_sweep(cfg, &cfg.methods())?;
    let data = load_data(cfg)?;
    let mut rows = Vec::new();
    for settings in cfg.run_settings() {
        let ablation = run_ablation(&data.inputs(), &settings, &cfg.fractions)?;
        for r in &ablation.reports {
            let dir = out
                .join(&ablation.label)
                .join(format!("fraction{}", (r.settings.fraction * 100.0).round() as i64));
            emit_report(r, dir)?;
        }
        println!(
            "{}: {}",
            ablation.label,
            ablation
                .mean_f1
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        rows.push(ablation);
    }
    let path = emit_ablation(&rows, &out)?;
    println!("{}", path.display());
    Ok(())
}
