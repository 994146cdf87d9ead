//! Cross-validated evaluation of concept classifiers.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{ClassifierError, ConceptClassifier};
use crate::dataset::DatasetError;
use crate::negatives::NegativesError;
use crate::rng::Rng;
use crate::vae::VaeError;

mod ablate;
mod audit;
mod pipeline;
mod report;

pub use ablate::{ablate, AblationReport, AblationRow};
pub use audit::{AuditEntry, LeakageAudit, Role};
pub use pipeline::{
    fit_classifiers, run, run_category_free_lr, run_predefined_category, run_udm, AblationScope, ConceptResult,
    EvalInputs, EvaluationReport, NegativeConfig, ProbabilityRow, RunSettings, SkipReason, SkipRecord, TrialRecord,
};
pub use report::{emit_ablation, emit_report, emit_sweep, format_f};

#[derive(Debug, Error)]
pub enum EvaluateError {
    #[error("`{concept}`: test fold has {positives} positive and {negatives} negative images, need at least {need_pos} and {need_neg}")]
    InsufficientTestInstances {
        concept: String,
        positives: usize,
        negatives: usize,
        need_pos: usize,
        need_neg: usize,
    },
    #[error("the predefined-category method needs a category manifest for the features")]
    MissingCategoryManifest,
    #[error("the predefined-category method needs a concept-to-category map")]
    MissingConceptCategories,
    #[error("concept `{concept}` is mapped to category `{category}`, which the manifest does not define")]
    UnknownCategory { concept: String, category: String },
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Vae(#[from] VaeError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Negatives(#[from] NegativesError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, EvaluateError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Udm,
    CategoryFreeLr,
    PredefinedCategory,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Udm => "udm",
            Method::CategoryFreeLr => "category_free_lr",
            Method::PredefinedCategory => "predefined_category",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "udm" => Ok(Method::Udm),
            "category_free_lr" => Ok(Method::CategoryFreeLr),
            "predefined_category" => Ok(Method::PredefinedCategory),
            other => Err(format!(
                "unknown method `{other}` (expected udm, category_free_lr or predefined_category)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalProtocol {
    pub k: usize,
    pub trials: usize,
    /// Inclusive range of positive test images per trial.
    pub pos_per_trial: [usize; 2],
    /// Inclusive range of negative test images per trial.
    pub neg_per_trial: [usize; 2],
    pub threshold: f64,
    pub seed: u64,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            k: 4,
            trials: 10,
            pos_per_trial: [3, 4],
            neg_per_trial: [4, 6],
            threshold: 0.5,
            seed: 0,
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EvaluateError::InvalidProtocol(m));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        for (name, [lo, hi]) in [
            ("pos_per_trial", self.pos_per_trial),
            ("neg_per_trial", self.neg_per_trial),
        ] {
            if lo == 0 || lo > hi {
                return bad(format!("{name} must be a range 1 ≤ lo ≤ hi, got [{lo}, {hi}]"));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        Ok(())
    }
}

/// Confusion counts of binary predictions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn f1(&self) -> f64 {
        f1(self.tp, self.fp, self.fn_)
    }
}

impl std::ops::AddAssign for Confusion {
    fn add_assign(&mut self, o: Confusion) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.tn += o.tn;
    }
}

/// `2tp / (2tp + fp + fn)`, and 0 when nothing was positive on either side.
pub fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

/// Anything that scores an input vector with a positive-class probability.
pub trait ProbabilityModel {
    fn probability(&self, x: &[f64]) -> std::result::Result<f64, ClassifierError>;
}

impl ProbabilityModel for ConceptClassifier {
    fn probability(&self, x: &[f64]) -> std::result::Result<f64, ClassifierError> {
        self.predict_proba(x)
    }
}

impl<F: Fn(&[f64]) -> f64> ProbabilityModel for F {
    fn probability(&self, x: &[f64]) -> std::result::Result<f64, ClassifierError> {
        Ok(self(x))
    }
}

/// One sampled test trial: the chosen indices and their confusion counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
    pub confusion: Confusion,
    pub f1: f64,
}

/// Runs `protocol.trials` trials. Each draws a positive and a negative count
/// uniformly from the protocol ranges (capped by what the fold holds), samples
/// that many test images without replacement and scores thresholded predictions.
pub fn evaluate_concept<M: ProbabilityModel + ?Sized>(
    concept: &str,
    model: &M,
    positives: &[&[f64]],
    negatives: &[&[f64]],
    protocol: &EvalProtocol,
    rng: &mut Rng,
) -> Result<Vec<TrialOutcome>> {
    let [pos_lo, pos_hi] = protocol.pos_per_trial;
    let [neg_lo, neg_hi] = protocol.neg_per_trial;
    if positives.len() < pos_lo || negatives.len() < neg_lo {
        return Err(EvaluateError::InsufficientTestInstances {
            concept: concept.to_string(),
            positives: positives.len(),
            negatives: negatives.len(),
            need_pos: pos_lo,
            need_neg: neg_lo,
        });
    }
    let mut out = Vec::with_capacity(protocol.trials);
    for _ in 0..protocol.trials {
        let n_pos = rng.random_range(pos_lo..=pos_hi).min(positives.len());
        let n_neg = rng.random_range(neg_lo..=neg_hi).min(negatives.len());
        let mut pos_idx = sample(rng, positives.len(), n_pos).into_vec();
        let mut neg_idx = sample(rng, negatives.len(), n_neg).into_vec();
        pos_idx.sort_unstable();
        neg_idx.sort_unstable();
        let mut c = Confusion::default();
        for &i in &pos_idx {
            if model.probability(positives[i])? > protocol.threshold {
                c.tp += 1;
            } else {
                c.fn_ += 1;
            }
        }
        for &i in &neg_idx {
            if model.probability(negatives[i])? > protocol.threshold {
                c.fp += 1;
            } else {
                c.tn += 1;
            }
        }
        out.push(TrialOutcome {
            positives: pos_idx,
            negatives: neg_idx,
            confusion: c,
            f1: c.f1(),
        });
    }
    Ok(out)
}
