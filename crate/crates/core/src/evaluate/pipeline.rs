use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::{LeakageAudit, Role};
use super::{evaluate_concept, Confusion, EvalProtocol, EvaluateError, Method, Result};
use crate::classifier::{train_concept, ClassifierBundle, ClassifierConfig, ConceptClassifier, InputKind, TrainSet};
use crate::dataset::{
    split_folds, ConceptCategoryMap, ConceptVocabulary, DescriptionCorpus, FeatureTable, FoldAssignment,
};
use crate::negatives::{
    negatives_all, negatives_semantic, train_pvdm, Aggregate, NegativeStrategy, NegativesError, ParagraphVectors,
    PvdmConfig,
};
use crate::rng::{derive_seed, name_stream, rng_for};
use crate::vae::{train_rows, VaeConfig, VaeModel};

const STREAM_VAE: u64 = 1;
const STREAM_PVDM: u64 = 2;
const STREAM_TRIALS: u64 = 3;
const STREAM_SUBSAMPLE: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NegativeConfig {
    pub strategy: NegativeStrategy,
    /// Negatives per positive object for the semantic strategy.
    pub ratio: f64,
    pub aggregate: Aggregate,
    pub pvdm: PvdmConfig,
}

impl Default for NegativeConfig {
    fn default() -> Self {
        NegativeConfig {
            strategy: NegativeStrategy::AllNonpositive,
            ratio: 1.5,
            aggregate: Aggregate::Max,
            pvdm: PvdmConfig::default(),
        }
    }
}

/// Which data a training fraction below 1 removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationScope {
    /// Every training input: images for the autoencoder, descriptions and
    /// labeled images for the classifiers.
    #[default]
    All,
    /// Only the described (labeled) objects; the autoencoder still sees every
    /// training-fold image.
    Labels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub method: Method,
    pub protocol: EvalProtocol,
    pub vae: VaeConfig,
    pub negatives: NegativeConfig,
    pub classifier: ClassifierConfig,
    /// Share of each training fold's objects used, in (0, 1].
    pub fraction: f64,
    pub ablation_scope: AblationScope,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            method: Method::Udm,
            protocol: EvalProtocol::default(),
            vae: VaeConfig::default(),
            negatives: NegativeConfig::default(),
            classifier: ClassifierConfig::default(),
            fraction: 1.0,
            ablation_scope: AblationScope::default(),
        }
    }
}

impl RunSettings {
    /// Column label used in summary tables, e.g. `udm_dim50`.
    pub fn label(&self) -> String {
        match self.method {
            Method::Udm => format!("udm_dim{}", self.vae.latent_dim),
            m => m.as_str().to_string(),
        }
    }
}

/// Loaded data shared by every fold.
#[derive(Debug, Clone, Copy)]
pub struct EvalInputs<'a> {
    pub features: &'a FeatureTable,
    pub corpus: &'a DescriptionCorpus,
    /// Concepts to evaluate, with positives mined from the whole corpus.
    pub vocab: &'a ConceptVocabulary,
    /// Category tags: reporting only for the category-free methods, the
    /// classifier layout for the predefined-category method.
    pub concept_categories: Option<&'a ConceptCategoryMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NoTrainingPositives,
    NoNegatives,
    InsufficientTestInstances { positives: usize, negatives: usize },
    Failed(String),
}

impl std::fmt::Display for SkipReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SkipReason::NoTrainingPositives => f.write_str("no_training_positives"),
            SkipReason::NoNegatives => f.write_str("no_negatives"),
            SkipReason::InsufficientTestInstances { positives, negatives } => {
                write!(
                    f,
                    "insufficient_test_instances ({positives} positive, {negatives} negative)"
                )
            }
            SkipReason::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkipRecord {
    pub concept: String,
    pub category: Option<String>,
    pub fold: usize,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub concept: String,
    pub category: Option<String>,
    pub fold: usize,
    pub trial: usize,
    pub confusion: Confusion,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptResult {
    pub concept: String,
    pub category: Option<String>,
    /// Occurrences of the concept token in the corpus.
    pub support: usize,
    /// Trial-averaged F1 per fold; `None` where the concept was skipped.
    pub per_fold_f1: Vec<Option<f64>>,
    /// Mean over the evaluated folds.
    pub mean_f1: f64,
    /// Confusion counts pooled over every trial.
    pub confusion: Confusion,
}

/// Mean predicted probability of each held-out object.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRow {
    pub concept: String,
    pub category: Option<String>,
    pub by_object: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub settings: RunSettings,
    pub concept_results: Vec<ConceptResult>,
    pub trials: Vec<TrialRecord>,
    pub skipped: Vec<SkipRecord>,
    pub probabilities: Vec<ProbabilityRow>,
    /// Every object of the feature table, sorted.
    pub objects: Vec<String>,
    /// Mean over concepts of the F1 of each concept's pooled counts.
    pub macro_f1: f64,
    /// F1 of the counts pooled over every concept and trial.
    pub micro_f1: f64,
    pub min_f1: f64,
    pub mean_f1: f64,
    pub max_f1: f64,
    pub audit: LeakageAudit,
}

impl EvaluationReport {
    pub fn method(&self) -> Method {
        self.settings.method
    }

    pub fn label(&self) -> String {
        self.settings.label()
    }

    /// Concepts skipped in every fold.
    pub fn never_evaluated(&self) -> BTreeSet<(String, Option<String>)> {
        let done: BTreeSet<(&str, Option<&str>)> = self
            .concept_results
            .iter()
            .map(|r| (r.concept.as_str(), r.category.as_deref()))
            .collect();
        self.skipped
            .iter()
            .filter(|s| !done.contains(&(s.concept.as_str(), s.category.as_deref())))
            .map(|s| (s.concept.clone(), s.category.clone()))
            .collect()
    }
}

/// A classifier to train per fold: a concept over the whole input or one slice.
#[derive(Debug, Clone)]
struct Unit {
    concept: String,
    category: Option<String>,
    slice: Option<Range<usize>>,
}

impl Unit {
    fn view<'v>(&self, x: &'v [f64]) -> &'v [f64] {
        match &self.slice {
            Some(r) => &x[r.clone()],
            None => x,
        }
    }

    fn input_kind(&self, method: Method) -> InputKind {
        match (method, &self.category) {
            (Method::Udm, _) => InputKind::Latent,
            (Method::PredefinedCategory, Some(c)) => InputKind::RawSlice(c.clone()),
            _ => InputKind::Raw,
        }
    }
}

enum UnitOutcome {
    Evaluated {
        trials: Vec<super::TrialOutcome>,
        probabilities: BTreeMap<String, f64>,
    },
    Skipped(SkipReason),
}

struct FoldOutcome {
    units: Vec<UnitOutcome>,
    audit: LeakageAudit,
}

fn plan_units(inputs: &EvalInputs, method: Method) -> Result<Vec<Unit>> {
    let cats = inputs.concept_categories;
    if method != Method::PredefinedCategory {
        return Ok(inputs
            .vocab
            .tokens()
            .map(|t| Unit {
                concept: t.to_string(),
                category: cats.and_then(|m| m.primary_category(t)).map(str::to_string),
                slice: None,
            })
            .collect());
    }
    let manifest = inputs
        .features
        .category_slices()
        .ok_or(EvaluateError::MissingCategoryManifest)?;
    let map = cats.ok_or(EvaluateError::MissingConceptCategories)?;
    let mut units = Vec::new();
    for (concept, category) in map.pairs() {
        let range = manifest.get(category).ok_or_else(|| EvaluateError::UnknownCategory {
            concept: concept.to_string(),
            category: category.to_string(),
        })?;
        if inputs.vocab.get(concept).is_none() {
            log::info!("`{concept}` has a category but is not in the evaluated vocabulary");
            continue;
        }
        units.push(Unit {
            concept: concept.to_string(),
            category: Some(category.to_string()),
            slice: Some(range),
        });
    }
    units.sort_by(|a, b| (&a.concept, &a.category).cmp(&(&b.concept, &b.category)));
    Ok(units)
}

/// Nested subsets: one fixed shuffle per fold, a prefix per fraction.
fn subsample(objects: &BTreeSet<String>, fraction: f64, seed: u64, fold: usize) -> BTreeSet<String> {
    if fraction >= 1.0 {
        return objects.clone();
    }
    let mut order: Vec<&String> = objects.iter().collect();
    order.shuffle(&mut rng_for(seed, &[STREAM_SUBSAMPLE, fold as u64]));
    let n = ((fraction * objects.len() as f64).ceil() as usize).clamp(1, objects.len());
    order.into_iter().take(n).cloned().collect()
}

/// Everything needed to fit per-concept classifiers on one set of training objects.
struct FitContext<'a> {
    settings: &'a RunSettings,
    vocab: ConceptVocabulary,
    labeled: &'a BTreeSet<String>,
    pv: Option<std::result::Result<ParagraphVectors, String>>,
    reps: Vec<Vec<f64>>,
    by_object: BTreeMap<&'a str, Vec<usize>>,
}

impl<'a> FitContext<'a> {
    /// Trains the representation (for the autoencoder method, unless `vae` is
    /// given) on `visual` objects and paragraph vectors on `labeled` objects,
    /// recording every item used in `audit` under `fold`.
    #[allow(clippy::too_many_arguments)]
    fn prepare(
        inputs: &EvalInputs<'a>,
        settings: &'a RunSettings,
        labeled: &'a BTreeSet<String>,
        visual: &BTreeSet<String>,
        fold: usize,
        audit: &mut LeakageAudit,
        vae: Option<&VaeModel>,
    ) -> Result<Self> {
        let instances = inputs.features.instances();
        let seed = settings.protocol.seed;
        let reps: Vec<Vec<f64>> = if settings.method == Method::Udm {
            let trained;
            let model = match vae {
                Some(m) => m,
                None => {
                    let idx: Vec<usize> = (0..instances.len())
                        .filter(|&i| visual.contains(&instances[i].object_id))
                        .collect();
                    let rows: Vec<&[f64]> = idx.iter().map(|&i| instances[i].x.as_slice()).collect();
                    for &i in &idx {
                        let inst = &instances[i];
                        audit.record(fold, Role::VaeTraining, &inst.object_id, &inst.instance_id);
                        audit.record(fold, Role::Standardization, &inst.object_id, &inst.instance_id);
                    }
                    let mut cfg = settings.vae.clone();
                    cfg.input_dim = inputs.features.dim();
                    cfg.seed = derive_seed(seed, &[STREAM_VAE, fold as u64, settings.vae.seed]);
                    let (model, history) = train_rows(&rows, &cfg)?;
                    log::info!(
                        "fold {fold}: autoencoder on {} images, loss {:.3} -> {:.3}",
                        rows.len(),
                        history.first().unwrap_or(f64::NAN),
                        history.last().unwrap_or(f64::NAN)
                    );
                    trained = model;
                    &trained
                }
            };
            instances
                .iter()
                .map(|inst| model.embed(&inst.x).map(|z| z.0))
                .collect::<std::result::Result<_, _>>()?
        } else {
            instances.iter().map(|inst| inst.x.clone()).collect()
        };

        let pv = (settings.negatives.strategy == NegativeStrategy::SemanticDistant).then(|| {
            let mut entries = Vec::new();
            for (i, e) in inputs.corpus.entries().iter().enumerate() {
                if labeled.contains(&e.object_id) {
                    audit.record(fold, Role::PvdmTraining, &e.object_id, &format!("description:{i}"));
                    entries.push(e.clone());
                }
            }
            let mut cfg = settings.negatives.pvdm.clone();
            cfg.seed = derive_seed(seed, &[STREAM_PVDM, fold as u64, cfg.seed]);
            train_pvdm(&DescriptionCorpus::new(entries), &cfg).map_err(|e| e.to_string())
        });

        let mut by_object: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, inst) in instances.iter().enumerate() {
            by_object.entry(inst.object_id.as_str()).or_default().push(i);
        }
        Ok(FitContext {
            settings,
            vocab: inputs.vocab.restrict_objects(labeled),
            labeled,
            pv,
            reps,
            by_object,
        })
    }

    fn images_of(&self, objects: &BTreeSet<String>) -> Vec<usize> {
        objects
            .iter()
            .flat_map(|o| self.by_object.get(o.as_str()).into_iter().flatten().copied())
            .collect()
    }

    /// Trains `unit`'s classifier. Also returns the instance indices it used.
    fn fit(&self, unit: &Unit) -> std::result::Result<(ConceptClassifier, Vec<usize>), SkipReason> {
        let concept = unit.concept.as_str();
        let settings = self.settings;
        let pos_objects = &self
            .vocab
            .get(concept)
            .expect("unit concepts come from the vocabulary")
            .positive_objects;
        if pos_objects.is_empty() {
            return Err(SkipReason::NoTrainingPositives);
        }
        let negs = match &self.pv {
            None => negatives_all(concept, &self.vocab, self.labeled),
            Some(Ok(pv)) => negatives_semantic(
                concept,
                &self.vocab,
                pv,
                settings.negatives.ratio,
                settings.negatives.aggregate,
            ),
            Some(Err(msg)) => return Err(SkipReason::Failed(format!("paragraph vectors: {msg}"))),
        };
        let negs = match negs {
            Ok(n) => n,
            Err(NegativesError::NoNegativesAvailable(_)) => return Err(SkipReason::NoNegatives),
            Err(e) => return Err(SkipReason::Failed(e.to_string())),
        };
        let pos_idx = self.images_of(pos_objects);
        let neg_idx = self.images_of(&negs.object_ids);
        let vecs = |idx: &[usize]| {
            idx.iter()
                .map(|&i| unit.view(&self.reps[i]).to_vec())
                .collect::<Vec<_>>()
        };
        let ts = TrainSet::new(vecs(&pos_idx), vecs(&neg_idx)).map_err(|e| SkipReason::Failed(e.to_string()))?;
        let clf = train_concept(concept, &ts, unit.input_kind(settings.method), &settings.classifier)
            .map_err(|e| SkipReason::Failed(e.to_string()))?
            .classifier;
        Ok((clf, pos_idx.into_iter().chain(neg_idx).collect()))
    }
}

fn run_fold(
    inputs: &EvalInputs,
    settings: &RunSettings,
    units: &[Unit],
    folds: &FoldAssignment,
    fold: usize,
) -> Result<FoldOutcome> {
    let protocol = &settings.protocol;
    let instances = inputs.features.instances();
    let test_objects = folds.test_objects(fold);
    let train_objects = folds.train_objects(fold);
    let labeled = subsample(&train_objects, settings.fraction, protocol.seed, fold);
    let visual = match settings.ablation_scope {
        AblationScope::All => &labeled,
        AblationScope::Labels => &train_objects,
    };
    let mut audit = LeakageAudit::new();
    audit.set_test_objects(fold, test_objects.clone());
    let ctx = FitContext::prepare(inputs, settings, &labeled, visual, fold, &mut audit, None)?;
    let test_idx = ctx.images_of(&test_objects);

    let results: Vec<(UnitOutcome, Vec<usize>)> = units
        .par_iter()
        .map(|unit| -> Result<(UnitOutcome, Vec<usize>)> {
            let concept = unit.concept.as_str();
            let (clf, used) = match ctx.fit(unit) {
                Ok(fitted) => fitted,
                Err(reason) => return Ok((UnitOutcome::Skipped(reason), Vec::new())),
            };
            let skip = |r| Ok((UnitOutcome::Skipped(r), used.clone()));
            let reps = &ctx.reps;
            let by_object = &ctx.by_object;
            let truth = &inputs.vocab.get(concept).expect("vocabulary concept").positive_objects;
            let (test_pos, test_neg): (Vec<usize>, Vec<usize>) =
                test_idx.iter().partition(|&&i| truth.contains(&instances[i].object_id));
            let pos_x: Vec<&[f64]> = test_pos.iter().map(|&i| unit.view(&reps[i])).collect();
            let neg_x: Vec<&[f64]> = test_neg.iter().map(|&i| unit.view(&reps[i])).collect();
            let mut rng = rng_for(
                protocol.seed,
                &[
                    STREAM_TRIALS,
                    fold as u64,
                    name_stream(concept),
                    name_stream(unit.category.as_deref().unwrap_or("")),
                ],
            );
            let trials = match evaluate_concept(concept, &clf, &pos_x, &neg_x, protocol, &mut rng) {
                Ok(t) => t,
                Err(EvaluateError::InsufficientTestInstances {
                    positives, negatives, ..
                }) => return skip(SkipReason::InsufficientTestInstances { positives, negatives }),
                Err(e) => return Err(e),
            };
            let mut probabilities = BTreeMap::new();
            for o in &test_objects {
                let idx = by_object.get(o.as_str()).map(Vec::as_slice).unwrap_or_default();
                if idx.is_empty() {
                    continue;
                }
                let mut sum = 0.0;
                for &i in idx {
                    sum += clf.predict_proba(unit.view(&reps[i]))?;
                }
                probabilities.insert(o.clone(), sum / idx.len() as f64);
            }
            Ok((UnitOutcome::Evaluated { trials, probabilities }, used))
        })
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::with_capacity(results.len());
    for (outcome, used) in results {
        for i in used {
            let inst = &instances[i];
            audit.record(fold, Role::ClassifierTraining, &inst.object_id, &inst.instance_id);
        }
        outcomes.push(outcome);
    }
    Ok(FoldOutcome { units: outcomes, audit })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Cross-validated run of `settings.method`. Folds are split by object; each
/// fold fits everything on its training objects and scores the held-out ones.
pub fn run(inputs: &EvalInputs, settings: &RunSettings) -> Result<EvaluationReport> {
    settings.protocol.validate()?;
    if !(settings.fraction > 0.0 && settings.fraction <= 1.0) {
        return Err(EvaluateError::InvalidFraction(settings.fraction));
    }
    let units = plan_units(inputs, settings.method)?;
    let objects = inputs.features.object_ids();
    let k = settings.protocol.k;
    let folds = split_folds(&objects, k, settings.protocol.seed)?;
    log::info!(
        "{}: {} classifiers, {} objects, {k} folds, fraction {}",
        settings.method,
        units.len(),
        objects.len(),
        settings.fraction
    );

    let fold_outcomes: Vec<FoldOutcome> = (0..k)
        .into_par_iter()
        .map(|fold| run_fold(inputs, settings, &units, &folds, fold))
        .collect::<Result<_>>()?;

    let mut audit = LeakageAudit::new();
    let mut trials = Vec::new();
    let mut skipped = Vec::new();
    let mut concept_results = Vec::new();
    let mut probabilities = Vec::new();
    for (u, unit) in units.iter().enumerate() {
        let mut pooled = Confusion::default();
        let mut per_fold = Vec::with_capacity(k);
        let mut by_object = BTreeMap::new();
        for (fold, fo) in fold_outcomes.iter().enumerate() {
            match &fo.units[u] {
                UnitOutcome::Evaluated {
                    trials: ts,
                    probabilities: p,
                } => {
                    for (t, outcome) in ts.iter().enumerate() {
                        pooled += outcome.confusion;
                        trials.push(TrialRecord {
                            concept: unit.concept.clone(),
                            category: unit.category.clone(),
                            fold,
                            trial: t,
                            confusion: outcome.confusion,
                            f1: outcome.f1,
                        });
                    }
                    per_fold.push(Some(mean(&ts.iter().map(|t| t.f1).collect::<Vec<_>>())));
                    by_object.extend(p.iter().map(|(o, v)| (o.clone(), *v)));
                }
                UnitOutcome::Skipped(reason) => {
                    log::debug!("fold {fold}: skipping `{}`: {reason}", unit.concept);
                    skipped.push(SkipRecord {
                        concept: unit.concept.clone(),
                        category: unit.category.clone(),
                        fold,
                        reason: reason.clone(),
                    });
                    per_fold.push(None);
                }
            }
        }
        let evaluated: Vec<f64> = per_fold.iter().flatten().copied().collect();
        if evaluated.is_empty() {
            continue;
        }
        concept_results.push(ConceptResult {
            concept: unit.concept.clone(),
            category: unit.category.clone(),
            support: inputs.vocab.get(&unit.concept).map_or(0, |c| c.count),
            per_fold_f1: per_fold,
            mean_f1: mean(&evaluated),
            confusion: pooled,
        });
        probabilities.push(ProbabilityRow {
            concept: unit.concept.clone(),
            category: unit.category.clone(),
            by_object,
        });
    }
    for fo in fold_outcomes {
        audit.merge(fo.audit);
    }

    let means: Vec<f64> = concept_results.iter().map(|r| r.mean_f1).collect();
    let mut pooled = Confusion::default();
    for t in &trials {
        pooled += t.confusion;
    }
    let macro_f1 = mean(&concept_results.iter().map(|r| r.confusion.f1()).collect::<Vec<_>>());
    let report = EvaluationReport {
        settings: settings.clone(),
        macro_f1,
        micro_f1: pooled.f1(),
        min_f1: if means.is_empty() {
            0.0
        } else {
            means.iter().copied().fold(f64::INFINITY, f64::min)
        },
        mean_f1: mean(&means),
        max_f1: means.iter().copied().fold(0.0, f64::max),
        concept_results,
        trials,
        skipped,
        probabilities,
        objects: objects.into_iter().collect(),
        audit,
    };
    log::info!(
        "{}: mean F1 {:.4}, micro F1 {:.4}, {} skipped entries",
        report.label(),
        report.mean_f1,
        report.micro_f1,
        report.skipped.len()
    );
    Ok(report)
}

pub fn run_udm(inputs: &EvalInputs, settings: &RunSettings) -> Result<EvaluationReport> {
    run(
        inputs,
        &RunSettings {
            method: Method::Udm,
            ..settings.clone()
        },
    )
}

pub fn run_category_free_lr(inputs: &EvalInputs, settings: &RunSettings) -> Result<EvaluationReport> {
    run(
        inputs,
        &RunSettings {
            method: Method::CategoryFreeLr,
            ..settings.clone()
        },
    )
}

pub fn run_predefined_category(inputs: &EvalInputs, settings: &RunSettings) -> Result<EvaluationReport> {
    run(
        inputs,
        &RunSettings {
            method: Method::PredefinedCategory,
            ..settings.clone()
        },
    )
}

/// Trains one classifier per concept on every object, for deployment rather
/// than evaluation. For the autoencoder method `vae` supplies the encoder;
/// when it is `None` one is trained on all images. Predefined-category
/// classifiers are keyed `concept@category`.
pub fn fit_classifiers(
    inputs: &EvalInputs,
    settings: &RunSettings,
    vae: Option<&VaeModel>,
) -> Result<(ClassifierBundle, Vec<SkipRecord>)> {
    let units = plan_units(inputs, settings.method)?;
    let objects = inputs.features.object_ids();
    let mut audit = LeakageAudit::new();
    let ctx = FitContext::prepare(inputs, settings, &objects, &objects, 0, &mut audit, vae)?;
    let fitted: Vec<_> = units.par_iter().map(|u| ctx.fit(u)).collect();
    let mut bundle = ClassifierBundle::default();
    let mut skipped = Vec::new();
    for (unit, outcome) in units.into_iter().zip(fitted) {
        match outcome {
            Ok((mut clf, _)) => {
                if let (Method::PredefinedCategory, Some(c)) = (settings.method, &unit.category) {
                    clf.concept = format!("{}@{c}", unit.concept);
                }
                bundle.insert(clf);
            }
            Err(reason) => skipped.push(SkipRecord {
                concept: unit.concept,
                category: unit.category,
                fold: 0,
                reason,
            }),
        }
    }
    Ok((bundle, skipped))
}
