//! Negative example selection for a concept.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ConceptVocabulary;

mod pvdm;

pub use pvdm::{train_pvdm, ParagraphVectors, PvdmConfig};

#[derive(Debug, Error)]
pub enum NegativesError {
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("no negatives available for concept `{0}`")]
    NoNegativesAvailable(String),
    #[error("corpus too small for PV-DM: {documents} documents, {tokens} tokens (need at least 2 documents)")]
    CorpusTooSmall { documents: usize, tokens: usize },
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no positive object of `{0}` has a document vector")]
    MissingDocVector(String),
    #[error("PV-DM loss became non-finite in epoch {epoch}")]
    NonFinite { epoch: usize },
    #[error("invalid negative selection config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, NegativesError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeStrategy {
    #[default]
    AllNonpositive,
    SemanticDistant,
}

/// How similarity to a set of positive documents is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    /// Highest cosine to any single positive.
    #[default]
    Max,
    /// Cosine to the mean positive vector.
    Centroid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeSet {
    pub concept: String,
    pub strategy: NegativeStrategy,
    pub object_ids: BTreeSet<String>,
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(NegativesError::LengthMismatch(a.len(), b.len()));
    }
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(NegativesError::ZeroVector);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

fn positives<'a>(concept: &str, vocab: &'a ConceptVocabulary) -> Result<&'a BTreeSet<String>> {
    vocab
        .get(concept)
        .map(|c| &c.positive_objects)
        .ok_or_else(|| NegativesError::UnknownConcept(concept.to_string()))
}

/// Every object of `objects` not positive for `concept`.
pub fn negatives_all(concept: &str, vocab: &ConceptVocabulary, objects: &BTreeSet<String>) -> Result<NegativeSet> {
    let pos = positives(concept, vocab)?;
    let object_ids: BTreeSet<String> = objects.difference(pos).cloned().collect();
    if object_ids.is_empty() {
        return Err(NegativesError::NoNegativesAvailable(concept.to_string()));
    }
    Ok(NegativeSet {
        concept: concept.to_string(),
        strategy: NegativeStrategy::AllNonpositive,
        object_ids,
    })
}

/// Non-positive documents ranked by similarity to the positives, ascending.
/// Ties are ordered by object id.
pub fn rank_by_distance(
    concept: &str,
    vocab: &ConceptVocabulary,
    pv: &ParagraphVectors,
    aggregate: Aggregate,
) -> Result<Vec<(String, f64)>> {
    let pos = positives(concept, vocab)?;
    let pos_vecs: Vec<&[f64]> = pos.iter().filter_map(|o| pv.doc_vector(o)).collect();
    if pos_vecs.is_empty() {
        return Err(NegativesError::MissingDocVector(concept.to_string()));
    }
    let centroid: Vec<f64> = (0..pos_vecs[0].len())
        .map(|j| pos_vecs.iter().map(|v| v[j]).sum::<f64>() / pos_vecs.len() as f64)
        .collect();
    let mut ranked = Vec::new();
    for (oid, v) in pv.doc_vectors() {
        if pos.contains(oid) {
            continue;
        }
        let score = match aggregate {
            Aggregate::Max => {
                let mut best = f64::NEG_INFINITY;
                for p in &pos_vecs {
                    best = best.max(cosine(v, p)?);
                }
                best
            }
            Aggregate::Centroid => cosine(v, &centroid)?,
        };
        ranked.push((oid.clone(), score));
    }
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked)
}

/// The ⌈ratio·|positives|⌉ (at least one) most distant non-positive documents.
pub fn negatives_semantic(
    concept: &str,
    vocab: &ConceptVocabulary,
    pv: &ParagraphVectors,
    ratio: f64,
    aggregate: Aggregate,
) -> Result<NegativeSet> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(NegativesError::InvalidConfig(format!(
            "ratio must be positive, got {ratio}"
        )));
    }
    let ranked = rank_by_distance(concept, vocab, pv, aggregate)?;
    if ranked.is_empty() {
        return Err(NegativesError::NoNegativesAvailable(concept.to_string()));
    }
    let n_pos = positives(concept, vocab)?.len();
    let want = ((ratio * n_pos as f64).ceil() as usize).max(1).min(ranked.len());
    Ok(NegativeSet {
        concept: concept.to_string(),
        strategy: NegativeStrategy::SemanticDistant,
        object_ids: ranked.into_iter().take(want).map(|(o, _)| o).collect(),
    })
}

#[cfg(test)]
mod tests;
