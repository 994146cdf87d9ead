//! Binary logistic-regression concept classifiers.
//!
//! One classifier per concept, trained by full-batch gradient descent on the
//! mean logistic loss plus `l2·‖w‖²/2` (bias unpenalized), starting from zero.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BUNDLE_VERSION: &str = "udm-clf-v1";

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training set has no {0} examples")]
    EmptyClass(&'static str),
    #[error("input dimension must be at least 1")]
    DegenerateDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid classifier bundle: {0}")]
    InvalidBundle(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, ClassifierError>;

/// What a classifier consumes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Latent,
    Raw,
    RawSlice(String),
}

/// Positive and negative example vectors of one concept.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSet {
    positives: Vec<Vec<f64>>,
    negatives: Vec<Vec<f64>>,
    dim: usize,
}

impl TrainSet {
    pub fn new(positives: Vec<Vec<f64>>, negatives: Vec<Vec<f64>>) -> Result<Self> {
        if positives.is_empty() {
            return Err(ClassifierError::EmptyClass("positive"));
        }
        if negatives.is_empty() {
            return Err(ClassifierError::EmptyClass("negative"));
        }
        let dim = positives[0].len();
        if dim == 0 {
            return Err(ClassifierError::DegenerateDimension);
        }
        for v in positives.iter().chain(&negatives) {
            if v.len() != dim {
                return Err(ClassifierError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ClassifierError::NonFiniteInput);
            }
        }
        Ok(TrainSet {
            positives,
            negatives,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positives(&self) -> &[Vec<f64>] {
        &self.positives
    }

    pub fn negatives(&self) -> &[Vec<f64>] {
        &self.negatives
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn labeled(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.positives
            .iter()
            .map(|v| (v.as_slice(), 1.0))
            .chain(self.negatives.iter().map(|v| (v.as_slice(), 0.0)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            l2: 1e-3,
            epochs: 500,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptClassifier {
    pub concept: String,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub input_kind: InputKind,
    pub l2: f64,
}

/// A trained classifier together with the objective before and after fitting.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub classifier: ConceptClassifier,
    pub initial_loss: f64,
    pub final_loss: f64,
}

pub fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˢ)` without overflow.
fn softplus(s: f64) -> f64 {
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean logistic loss plus `l2·‖w‖²/2`.
pub fn objective(weights: &[f64], bias: f64, ts: &TrainSet, l2: f64) -> f64 {
    let n = ts.len() as f64;
    let data: f64 = ts
        .labeled()
        .map(|(x, y)| {
            let s = dot(weights, x) + bias;
            softplus(s) - y * s
        })
        .sum();
    data / n + 0.5 * l2 * dot(weights, weights)
}

/// Objective value and its gradient `(∂/∂w, ∂/∂b)`.
pub fn objective_gradient(weights: &[f64], bias: f64, ts: &TrainSet, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = ts.len() as f64;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    let mut loss = 0.0;
    for (x, y) in ts.labeled() {
        let s = dot(weights, x) + bias;
        loss += softplus(s) - y * s;
        let r = sigmoid(s) - y;
        gb += r;
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += r * xi;
        }
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (loss / n + 0.5 * l2 * dot(weights, weights), gw, gb / n)
}

/// Upper bound on the curvature of [`objective`]: `¼·λ + l2`, where `λ`
/// bounds the largest eigenvalue of the mean outer product of `[x; 1]`. Takes
/// the smaller of the largest squared norm and the Gershgorin row-sum bound.
fn smoothness_bound(ts: &TrainSet, l2: f64) -> f64 {
    let d = ts.dim() + 1;
    let n = ts.len() as f64;
    let mut gram = vec![0.0; d * d];
    let mut max_sq: f64 = 0.0;
    let mut row = vec![0.0; d];
    for (x, _) in ts.labeled() {
        row[..d - 1].copy_from_slice(x);
        row[d - 1] = 1.0;
        max_sq = max_sq.max(dot(&row, &row));
        for (j, &rj) in row.iter().enumerate() {
            for (g, &rk) in gram[j * d..(j + 1) * d].iter_mut().zip(&row) {
                *g += rj * rk;
            }
        }
    }
    let gershgorin = gram
        .chunks(d)
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>() / n)
        .fold(0.0, f64::max);
    0.25 * max_sq.min(gershgorin) + l2
}

pub fn train_concept(
    concept: &str,
    ts: &TrainSet,
    input_kind: InputKind,
    cfg: &ClassifierConfig,
) -> Result<TrainOutcome> {
    train_concept_from(concept, ts, input_kind, cfg, vec![0.0; ts.dim()], 0.0)
}

/// Full-batch gradient descent from an explicit starting point, with
/// Nesterov momentum. The step is the configured learning rate capped at
/// `1/L`. Momentum is reset whenever a step would raise the objective, and
/// that step is discarded, so the objective never increases.
pub fn train_concept_from(
    concept: &str,
    ts: &TrainSet,
    input_kind: InputKind,
    cfg: &ClassifierConfig,
    mut weights: Vec<f64>,
    mut bias: f64,
) -> Result<TrainOutcome> {
    if !(cfg.l2 >= 0.0 && cfg.l2.is_finite()) {
        return Err(ClassifierError::InvalidArgument("l2 must be non-negative".into()));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(ClassifierError::InvalidArgument(
            "learning_rate must be positive".into(),
        ));
    }
    if weights.len() != ts.dim() {
        return Err(ClassifierError::DimensionMismatch {
            expected: ts.dim(),
            found: weights.len(),
        });
    }
    let step = cfg.learning_rate.min(1.0 / smoothness_bound(ts, cfg.l2));
    let initial_loss = objective(&weights, bias, ts, cfg.l2);
    let mut loss = initial_loss;
    let (mut yw, mut yb) = (weights.clone(), bias);
    let mut t = 1.0_f64;
    for _ in 0..cfg.epochs {
        let (_, gw, gb) = objective_gradient(&yw, yb, ts, cfg.l2);
        let next_w: Vec<f64> = yw.iter().zip(&gw).map(|(y, g)| y - step * g).collect();
        let next_b = yb - step * gb;
        let next_loss = objective(&next_w, next_b, ts, cfg.l2);
        if next_loss > loss {
            t = 1.0;
            yw.clone_from(&weights);
            yb = bias;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        for ((y, n), w) in yw.iter_mut().zip(&next_w).zip(&weights) {
            *y = n + beta * (n - w);
        }
        yb = next_b + beta * (next_b - bias);
        weights = next_w;
        bias = next_b;
        loss = next_loss;
        t = t_next;
    }
    let final_loss = objective(&weights, bias, ts, cfg.l2);
    Ok(TrainOutcome {
        classifier: ConceptClassifier {
            concept: concept.to_string(),
            weights,
            bias,
            input_kind,
            l2: cfg.l2,
        },
        initial_loss,
        final_loss,
    })
}

impl ConceptClassifier {
    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    /// `σ(w·x + b)`, kept strictly inside (0, 1).
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.weights.len(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFiniteInput);
        }
        let p = sigmoid(dot(&self.weights, x) + self.bias);
        Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }

    /// Positive iff the probability is strictly above `threshold`.
    pub fn predict(&self, x: &[f64], threshold: f64) -> Result<bool> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(ClassifierError::InvalidArgument(format!(
                "threshold {threshold} outside (0, 1)"
            )));
        }
        Ok(self.predict_proba(x)? > threshold)
    }
}

#[derive(Serialize, Deserialize)]
struct BundleEntry {
    w: Vec<f64>,
    b: f64,
    input_kind: InputKind,
    l2: f64,
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    version: String,
    classifiers: BTreeMap<String, BundleEntry>,
}

/// Classifiers keyed by concept, serialized as one JSON document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassifierBundle {
    classifiers: BTreeMap<String, ConceptClassifier>,
}

impl ClassifierBundle {
    pub fn insert(&mut self, clf: ConceptClassifier) {
        self.classifiers.insert(clf.concept.clone(), clf);
    }

    pub fn get(&self, concept: &str) -> Option<&ConceptClassifier> {
        self.classifiers.get(concept)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConceptClassifier> {
        self.classifiers.values()
    }

    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    pub fn to_json(&self) -> String {
        let file = BundleFile {
            version: BUNDLE_VERSION.to_string(),
            classifiers: self
                .classifiers
                .iter()
                .map(|(k, c)| {
                    (
                        k.clone(),
                        BundleEntry {
                            w: c.weights.clone(),
                            b: c.bias,
                            input_kind: c.input_kind.clone(),
                            l2: c.l2,
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("bundle serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BundleFile = serde_json::from_str(text).map_err(|e| ClassifierError::InvalidBundle(e.to_string()))?;
        if file.version != BUNDLE_VERSION {
            return Err(ClassifierError::InvalidBundle(format!(
                "unsupported version `{}`",
                file.version
            )));
        }
        let mut bundle = ClassifierBundle::default();
        for (concept, e) in file.classifiers {
            if e.w.is_empty() || e.w.iter().any(|v| !v.is_finite()) || !e.b.is_finite() {
                return Err(ClassifierError::InvalidBundle(format!(
                    "classifier `{concept}` has empty or non-finite weights"
                )));
            }
            if !(e.l2 >= 0.0 && e.l2.is_finite()) {
                return Err(ClassifierError::InvalidBundle(format!(
                    "classifier `{concept}` has invalid l2"
                )));
            }
            bundle.insert(ConceptClassifier {
                concept,
                weights: e.w,
                bias: e.b,
                input_kind: e.input_kind,
                l2: e.l2,
            });
        }
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_json()).map_err(|source| ClassifierError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|source| ClassifierError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}
