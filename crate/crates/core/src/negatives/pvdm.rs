use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{NegativesError, Result};
use crate::dataset::DescriptionCorpus;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PvdmConfig {
    pub dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for PvdmConfig {
    fn default() -> Self {
        PvdmConfig {
            dim: 50,
            window: 3,
            negative_samples: 5,
            epochs: 100,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            seed: 0,
        }
    }
}

impl PvdmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(NegativesError::InvalidConfig(m.into()));
        if self.dim == 0 || self.epochs == 0 {
            return bad("dim and epochs must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.min_learning_rate >= 0.0 && self.min_learning_rate <= self.learning_rate) {
            return bad("min_learning_rate must lie in [0, learning_rate]");
        }
        Ok(())
    }
}

/// Document and word vectors of a trained PV-DM model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParagraphVectors {
    doc_vectors: BTreeMap<String, Vec<f64>>,
    word_vectors: BTreeMap<String, Vec<f64>>,
    config: PvdmConfig,
    loss_history: Vec<f64>,
}

impl ParagraphVectors {
    /// Wraps precomputed document vectors (no word vectors, no history).
    pub fn from_doc_vectors(doc_vectors: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let dim = doc_vectors.values().next().map_or(0, Vec::len);
        if doc_vectors
            .values()
            .any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite()))
        {
            return Err(NegativesError::InvalidConfig(
                "document vectors must share one length and be finite".into(),
            ));
        }
        Ok(ParagraphVectors {
            doc_vectors,
            word_vectors: BTreeMap::new(),
            config: PvdmConfig {
                dim,
                ..PvdmConfig::default()
            },
            loss_history: Vec::new(),
        })
    }

    pub fn doc_vector(&self, object_id: &str) -> Option<&[f64]> {
        self.doc_vectors.get(object_id).map(Vec::as_slice)
    }

    pub fn doc_vectors(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.doc_vectors
    }

    pub fn word_vectors(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.word_vectors
    }

    pub fn config(&self) -> &PvdmConfig {
        &self.config
    }

    /// Mean logistic loss per prediction, one entry per epoch.
    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    /// `object_id,v0,...` with a header row.
    pub fn write_doc_vectors_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "object_id")?;
        for j in 0..self.config.dim {
            write!(w, ",v{j}")?;
        }
        writeln!(w)?;
        for (id, v) in &self.doc_vectors {
            write!(w, "{id}")?;
            for x in v {
                write!(w, ",{x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// -ln σ(x), stable for large |x|.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[usize]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Trains PV-DM (mean of document and context vectors) with negative
/// sampling. One document per object: its descriptions' tokens in corpus order.
pub fn train_pvdm(corpus: &DescriptionCorpus, cfg: &PvdmConfig) -> Result<ParagraphVectors> {
    cfg.validate()?;
    let mut docs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in corpus.entries() {
        docs.entry(e.object_id.as_str())
            .or_default()
            .extend(e.tokens.iter().map(String::as_str));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for toks in docs.values() {
        for t in toks {
            *counts.entry(t).or_default() += 1;
        }
    }
    if docs.len() < 2 || counts.is_empty() {
        return Err(NegativesError::CorpusTooSmall {
            documents: docs.len(),
            tokens: counts.values().sum(),
        });
    }

    let words: Vec<&str> = counts.keys().copied().collect();
    let index: BTreeMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let doc_ids: Vec<&str> = docs.keys().copied().collect();
    let doc_tokens: Vec<Vec<usize>> = docs.values().map(|ts| ts.iter().map(|t| index[t]).collect()).collect();
    let noise = NoiseTable::new(&counts.values().copied().collect::<Vec<_>>());

    let m = cfg.dim;
    let mut rng = Rng::seed_from_u64(cfg.seed);
    let mut init = |n: usize| -> Vec<f64> { (0..n * m).map(|_| (rng.random::<f64>() - 0.5) / m as f64).collect() };
    let mut doc_vecs = init(doc_ids.len());
    let mut word_vecs = init(words.len());
    let mut out_vecs = vec![0.0; words.len() * m];

    let total_tokens: usize = doc_tokens.iter().map(Vec::len).sum();
    let total_steps = (cfg.epochs * total_tokens).max(1) as f64;
    let mut step = 0usize;
    let mut order: Vec<usize> = (0..doc_ids.len()).collect();
    let mut h = vec![0.0; m];
    let mut grad_h = vec![0.0; m];
    let mut ctx = Vec::with_capacity(2 * cfg.window);
    let mut loss_history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let (mut loss_sum, mut predictions) = (0.0, 0usize);
        for &d in &order {
            let toks = &doc_tokens[d];
            for i in 0..toks.len() {
                let alpha =
                    cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) * (step as f64 / total_steps);
                step += 1;
                ctx.clear();
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(toks.len());
                ctx.extend((lo..hi).filter(|&j| j != i).map(|j| toks[j]));
                let count = (1 + ctx.len()) as f64;

                h.copy_from_slice(&doc_vecs[d * m..(d + 1) * m]);
                for &c in &ctx {
                    for (hv, wv) in h.iter_mut().zip(&word_vecs[c * m..(c + 1) * m]) {
                        *hv += wv;
                    }
                }
                h.iter_mut().for_each(|v| *v /= count);
                grad_h.iter_mut().for_each(|v| *v = 0.0);

                let center = toks[i];
                for k in 0..=cfg.negative_samples {
                    let (target, label) = if k == 0 {
                        (center, 1.0)
                    } else {
                        let t = noise.sample(&mut rng);
                        if t == center {
                            continue;
                        }
                        (t, 0.0)
                    };
                    let out = &mut out_vecs[target * m..(target + 1) * m];
                    let s: f64 = h.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                    loss_sum += neg_log_sigmoid(if label > 0.5 { s } else { -s });
                    predictions += 1;
                    let g = (label - sigmoid(s)) * alpha;
                    for j in 0..m {
                        grad_h[j] += g * out[j];
                        out[j] += g * h[j];
                    }
                }

                // word2vec convention: the undivided error goes to every input
                for (dv, g) in doc_vecs[d * m..(d + 1) * m].iter_mut().zip(&grad_h) {
                    *dv += g;
                }
                for &c in &ctx {
                    for (wv, g) in word_vecs[c * m..(c + 1) * m].iter_mut().zip(&grad_h) {
                        *wv += g;
                    }
                }
            }
        }
        let mean = loss_sum / predictions.max(1) as f64;
        if !mean.is_finite() {
            return Err(NegativesError::NonFinite { epoch });
        }
        log::trace!("pv-dm epoch {epoch}: loss {mean:.6}");
        loss_history.push(mean);
    }

    let split = |flat: &[f64], names: &[&str]| -> BTreeMap<String, Vec<f64>> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), flat[i * m..(i + 1) * m].to_vec()))
            .collect()
    };
    Ok(ParagraphVectors {
        doc_vectors: split(&doc_vecs, &doc_ids),
        word_vectors: split(&word_vecs, &words),
        config: cfg.clone(),
        loss_history,
    })
}
