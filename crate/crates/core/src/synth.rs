//! Deterministic synthetic objects, features and noisy descriptions.
//!
//! Every category owns a contiguous block of feature dimensions (laid out in
//! order of first appearance, starting at 0). An image of an object draws each
//! category block from the cluster of the object's concept in that category;
//! the dimensions after the last block are isotropic background noise.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{
    tokenize, CategorySlices, ConceptCategoryMap, DescriptionCorpus, FeatureTable, Instance, Language,
};
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, SynthError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptSpec {
    pub token: String,
    pub category: String,
    /// Cluster centre over the category's feature block.
    pub mean: Vec<f64>,
    /// Per-dimension standard deviation around the centre.
    pub scale: f64,
    /// Relative share of objects carrying this concept within its category.
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_objects: usize,
    #[serde(default = "default_images")]
    pub images_per_object: usize,
    pub dim: usize,
    pub concepts: Vec<ConceptSpec>,
    /// Standard deviation of the background dimensions.
    #[serde(default = "one")]
    pub background_scale: f64,
    /// Probability that a description token is replaced by a different concept token.
    #[serde(default)]
    pub annotation_noise: f64,
    #[serde(default = "default_descriptions")]
    pub descriptions_per_object: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_images() -> usize {
    4
}

fn default_descriptions() -> usize {
    3
}

fn default_folds() -> usize {
    4
}

const BENCH_VOCAB: [(&str, &[&str]); 3] = [
    ("color", &["red", "blue", "green", "yellow", "purple"]),
    ("shape", &["cube", "ball", "cylinder", "triangle", "arch"]),
    ("object", &["apple", "banana", "lime", "block", "carrot", "plum"]),
];

impl SynthConfig {
    /// A color/shape/object style benchmark: `n_categories` (≤ 3) blocks of
    /// `dim / (2·n_categories)` dimensions each, the rest background. Cluster
    /// centres are random directions of length `separation` (6 here, in units
    /// of the per-dimension noise scale) drawn from `seed`.
    pub fn benchmark(n_objects: usize, dim: usize, n_categories: usize, annotation_noise: f64, seed: u64) -> Self {
        Self::benchmark_with(n_objects, dim, n_categories, annotation_noise, seed, 6.0, 1.0)
    }

    pub fn benchmark_with(
        n_objects: usize,
        dim: usize,
        n_categories: usize,
        annotation_noise: f64,
        seed: u64,
        separation: f64,
        scale: f64,
    ) -> Self {
        let n_categories = n_categories.clamp(1, BENCH_VOCAB.len());
        let width = (dim / (2 * n_categories)).max(1);
        let mut rng = Rng::seed_from_u64(derive_seed(seed, &[0x5e7]));
        let mut concepts = Vec::new();
        for (category, tokens) in BENCH_VOCAB.iter().take(n_categories) {
            for token in tokens.iter() {
                let dir: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                concepts.push(ConceptSpec {
                    token: token.to_string(),
                    category: category.to_string(),
                    mean: dir.iter().map(|v| v / norm * separation).collect(),
                    scale,
                    weight: 1.0,
                });
            }
        }
        SynthConfig {
            n_objects,
            images_per_object: 4,
            dim,
            concepts,
            background_scale: scale,
            annotation_noise,
            descriptions_per_object: 3,
            folds: 4,
            seed,
        }
    }

    /// Category blocks in layout order.
    pub fn category_slices(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut out: Vec<(String, std::ops::Range<usize>)> = Vec::new();
        let mut start = 0;
        for c in &self.concepts {
            if !out.iter().any(|(name, _)| *name == c.category) {
                out.push((c.category.clone(), start..start + c.mean.len()));
                start += c.mean.len();
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.folds < 2 || self.n_objects < 2 * self.folds {
            return bad(format!(
                "n_objects ({}) must be at least twice the fold count ({})",
                self.n_objects, self.folds
            ));
        }
        if !(0.0..0.5).contains(&self.annotation_noise) {
            return bad("annotation_noise must be in [0, 0.5)".into());
        }
        if self.images_per_object == 0 || self.descriptions_per_object == 0 {
            return bad("images_per_object and descriptions_per_object must be at least 1".into());
        }
        if self.concepts.is_empty() {
            return bad("at least one concept is required".into());
        }
        if !(self.background_scale >= 0.0 && self.background_scale.is_finite()) {
            return bad("background_scale must be non-negative".into());
        }
        let mut tokens = BTreeSet::new();
        let mut widths: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.concepts {
            if tokenize(&c.token, &Language::default()) != [c.token.clone()] {
                return bad(format!("concept token `{}` is not a single normalized token", c.token));
            }
            if !tokens.insert(c.token.as_str()) {
                return bad(format!("duplicate concept token `{}`", c.token));
            }
            if c.category.is_empty() || c.mean.is_empty() {
                return bad(format!("concept `{}` needs a category and a non-empty mean", c.token));
            }
            if *widths.entry(&c.category).or_insert(c.mean.len()) != c.mean.len() {
                return bad(format!("concepts of category `{}` disagree on block width", c.category));
            }
            if !(c.scale >= 0.0 && c.scale.is_finite()) || !(c.weight > 0.0 && c.weight.is_finite()) {
                return bad(format!("concept `{}` needs scale ≥ 0 and weight > 0", c.token));
            }
            if c.mean.iter().any(|v| !v.is_finite()) {
                return bad(format!("concept `{}` has a non-finite mean", c.token));
            }
        }
        let used: usize = widths.values().sum();
        if used > self.dim || self.dim == 0 {
            return bad(format!(
                "category blocks need {used} dimensions but dim is {}",
                self.dim
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SynthStats {
    pub total_tokens: usize,
    pub corrupted_tokens: usize,
}

/// Everything [`generate`] writes, kept in memory.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub features: FeatureTable,
    /// `(object_id, description)` in file order.
    pub descriptions: Vec<(String, String)>,
    /// Ground-truth concept tokens of every object.
    pub assignment: BTreeMap<String, BTreeSet<String>>,
    pub concept_categories: ConceptCategoryMap,
    pub stats: SynthStats,
}

impl SynthDataset {
    pub fn corpus(&self, language: &Language) -> DescriptionCorpus {
        DescriptionCorpus::from_pairs(self.descriptions.iter().cloned(), language)
    }
}

/// Splits `n` into integer shares proportional to `weights` (largest remainder).
fn apportion(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    counts
}

pub fn generate_dataset(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let mut rng = Rng::seed_from_u64(cfg.seed);
    let slices = cfg.category_slices();
    let object_ids: Vec<String> = (0..cfg.n_objects).map(|i| format!("obj{i:03}")).collect();

    // per category: concept index of every object
    let mut object_concepts: Vec<Vec<usize>> = vec![Vec::new(); cfg.n_objects];
    for (category, _) in &slices {
        let members: Vec<usize> = (0..cfg.concepts.len())
            .filter(|&i| cfg.concepts[i].category == *category)
            .collect();
        let weights: Vec<f64> = members.iter().map(|&i| cfg.concepts[i].weight).collect();
        let mut pool: Vec<usize> = apportion(cfg.n_objects, &weights)
            .into_iter()
            .zip(&members)
            .flat_map(|(count, &m)| std::iter::repeat_n(m, count))
            .collect();
        pool.shuffle(&mut rng);
        for (obj, c) in object_concepts.iter_mut().zip(pool) {
            obj.push(c);
        }
    }

    let mut instances = Vec::with_capacity(cfg.n_objects * cfg.images_per_object);
    let signal_end = slices.last().map_or(0, |(_, r)| r.end);
    for (o, oid) in object_ids.iter().enumerate() {
        for img in 0..cfg.images_per_object {
            let mut x = vec![0.0; cfg.dim];
            for &ci in &object_concepts[o] {
                let c = &cfg.concepts[ci];
                let range = &slices
                    .iter()
                    .find(|(n, _)| *n == c.category)
                    .expect("category laid out")
                    .1;
                for (k, j) in range.clone().enumerate() {
                    x[j] = c.mean[k] + c.scale * rng.sample::<f64, _>(StandardNormal);
                }
            }
            for v in x.iter_mut().skip(signal_end) {
                *v = cfg.background_scale * rng.sample::<f64, _>(StandardNormal);
            }
            instances.push(Instance {
                instance_id: format!("{oid}_img{img}"),
                object_id: oid.clone(),
                x,
            });
        }
    }

    let all_tokens: Vec<&str> = cfg.concepts.iter().map(|c| c.token.as_str()).collect();
    let mut stats = SynthStats::default();
    let mut descriptions = Vec::new();
    for (o, oid) in object_ids.iter().enumerate() {
        for _ in 0..cfg.descriptions_per_object {
            let words: Vec<&str> = object_concepts[o]
                .iter()
                .map(|&ci| {
                    let truth = cfg.concepts[ci].token.as_str();
                    stats.total_tokens += 1;
                    if all_tokens.len() > 1 && rng.random::<f64>() < cfg.annotation_noise {
                        stats.corrupted_tokens += 1;
                        let mut other = truth;
                        while other == truth {
                            other = all_tokens[rng.random_range(0..all_tokens.len())];
                        }
                        other
                    } else {
                        truth
                    }
                })
                .collect();
            descriptions.push((oid.clone(), format!("{}.", words.join(" "))));
        }
    }

    let manifest =
        CategorySlices::new(slices.iter().cloned().collect()).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let features = FeatureTable::new(cfg.dim, instances)
        .and_then(|t| t.with_category_slices(manifest))
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let assignment = object_ids
        .iter()
        .zip(&object_concepts)
        .map(|(oid, cs)| {
            (
                oid.clone(),
                cs.iter().map(|&ci| cfg.concepts[ci].token.clone()).collect(),
            )
        })
        .collect();
    let mut concept_categories = ConceptCategoryMap::default();
    for c in &cfg.concepts {
        concept_categories.insert(c.token.clone(), c.category.clone());
    }
    Ok(SynthDataset {
        features,
        descriptions,
        assignment,
        concept_categories,
        stats,
    })
}

/// Paths of the files written by [`generate`].
#[derive(Debug, Clone)]
pub struct SynthOutputs {
    pub features: PathBuf,
    pub descriptions: PathBuf,
    pub categories: PathBuf,
    pub concept_categories: PathBuf,
    pub stats: SynthStats,
}

/// Writes `features.csv`, `descriptions.tsv`, `categories.json` and
/// `concept_categories.tsv` into `out_dir`.
pub fn generate(cfg: &SynthConfig, out_dir: impl AsRef<Path>) -> Result<SynthOutputs> {
    let data = generate_dataset(cfg)?;
    let dir = out_dir.as_ref();
    let io = |p: &Path, source| SynthError::Io {
        path: p.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let out = SynthOutputs {
        features: dir.join("features.csv"),
        descriptions: dir.join("descriptions.tsv"),
        categories: dir.join("categories.json"),
        concept_categories: dir.join("concept_categories.tsv"),
        stats: data.stats,
    };

    let mut buf = Vec::new();
    data.features.write_csv(&mut buf).map_err(|e| io(&out.features, e))?;
    fs::write(&out.features, buf).map_err(|e| io(&out.features, e))?;

    let tsv: String = data.descriptions.iter().map(|(o, d)| format!("{o}\t{d}\n")).collect();
    fs::write(&out.descriptions, tsv).map_err(|e| io(&out.descriptions, e))?;

    let manifest = data.features.category_slices().cloned().unwrap_or_default();
    let json = serde_json::to_string(&manifest).expect("manifest serializes");
    fs::write(&out.categories, json).map_err(|e| io(&out.categories, e))?;

    fs::write(&out.concept_categories, data.concept_categories.to_tsv()).map_err(|e| io(&out.concept_categories, e))?;
    Ok(out)
}

/// Documents drawn from two disjoint topic vocabularies.
#[derive(Debug, Clone)]
pub struct TwoTopicCorpus {
    pub corpus: DescriptionCorpus,
    /// Topic (0 or 1) of every object.
    pub topic_of: BTreeMap<String, usize>,
    pub vocabularies: [Vec<String>; 2],
}

/// `docs_per_topic` objects per topic, each with three descriptions of
/// `words_per_description` tokens. With probability `noise` a token comes from
/// the other topic's vocabulary.
pub fn two_topic_corpus(docs_per_topic: usize, words_per_description: usize, noise: f64, seed: u64) -> TwoTopicCorpus {
    let vocab: [Vec<String>; 2] = [
        [
            "red", "apple", "round", "sweet", "fruit", "shiny", "tomato", "cherry", "juicy", "ripe", "berry", "peach",
            "plum", "soft", "fresh", "orchard",
        ]
        .map(String::from)
        .to_vec(),
        [
            "wooden", "block", "cube", "square", "toy", "flat", "arch", "plank", "timber", "pine", "carved", "stack",
            "corner", "heavy", "board", "brick",
        ]
        .map(String::from)
        .to_vec(),
    ];
    let mut rng = Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut topic_of = BTreeMap::new();
    for topic in 0..2 {
        for d in 0..docs_per_topic {
            let oid = format!("t{topic}_obj{d:02}");
            topic_of.insert(oid.clone(), topic);
            for _ in 0..3 {
                let words: Vec<&str> = (0..words_per_description)
                    .map(|_| {
                        let t = if rng.random::<f64>() < noise { 1 - topic } else { topic };
                        vocab[t][rng.random_range(0..vocab[t].len())].as_str()
                    })
                    .collect();
                pairs.push((oid.clone(), words.join(" ")));
            }
        }
    }
    TwoTopicCorpus {
        corpus: DescriptionCorpus::from_pairs(pairs, &Language::default()),
        topic_of,
        vocabularies: vocab,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{
        build_vocabulary, load_category_manifest, load_concept_categories, load_descriptions, load_features,
    };

    #[test]
    fn apportion_sums() {
        assert_eq!(apportion(10, &[1.0, 1.0, 1.0]), [4, 3, 3]);
        assert_eq!(apportion(72, &[1.0; 5]).iter().sum::<usize>(), 72);
        assert_eq!(apportion(20, &[0.1, 1.0, 1.0]), [1, 10, 9]);
    }

    #[test]
    fn files_load_cleanly_and_are_reproducible() {
        let cfg = SynthConfig::benchmark(16, 30, 3, 0.1, 7);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let oa = generate(&cfg, a.path()).unwrap();
        let ob = generate(&cfg, b.path()).unwrap();
        for (x, y) in [
            (&oa.features, &ob.features),
            (&oa.descriptions, &ob.descriptions),
            (&oa.categories, &ob.categories),
            (&oa.concept_categories, &ob.concept_categories),
        ] {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let t = load_features(&oa.features).unwrap();
        assert_eq!(t.len(), 16 * 4);
        assert_eq!(t.dim(), 30);
        let m = load_category_manifest(&oa.categories).unwrap();
        assert_eq!(m.get("color"), Some(0..5));
        assert_eq!(m.get("object"), Some(10..15));
        assert!(t.with_category_slices(m).is_ok());
        let c = load_descriptions(&oa.descriptions, &Language::default()).unwrap();
        assert_eq!(c.len(), 16 * 3);
        assert!(load_concept_categories(&oa.concept_categories)
            .unwrap()
            .categories("red")
            .is_some());
    }

    #[test]
    fn noiseless_labels_are_recoverable() {
        let cfg = SynthConfig::benchmark(24, 36, 3, 0.0, 3);
        let data = generate_dataset(&cfg).unwrap();
        assert_eq!(data.stats.corrupted_tokens, 0);
        let v = build_vocabulary(&data.corpus(&Language::default()), 1, &BTreeSet::new()).unwrap();
        for concept in v.concepts() {
            let truth: BTreeSet<String> = data
                .assignment
                .iter()
                .filter(|(_, ts)| ts.contains(&concept.token))
                .map(|(o, _)| o.clone())
                .collect();
            assert_eq!(concept.positive_objects, truth, "{}", concept.token);
        }
    }

    #[test]
    fn corruption_rate_concentrates() {
        let mut cfg = SynthConfig::benchmark(120, 30, 3, 0.3, 11);
        cfg.descriptions_per_object = 4;
        let data = generate_dataset(&cfg).unwrap();
        assert!(data.stats.total_tokens >= 1000);
        let rate = data.stats.corrupted_tokens as f64 / data.stats.total_tokens as f64;
        assert!((rate - 0.3).abs() <= 0.05, "{rate}");
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SynthConfig::benchmark(7, 30, 3, 0.1, 0);
        assert!(cfg.validate().is_err());
        cfg.n_objects = 8;
        assert!(cfg.validate().is_ok());
        cfg.annotation_noise = 0.5;
        assert!(cfg.validate().is_err());
        cfg.annotation_noise = 0.0;
        cfg.dim = 10;
        assert!(cfg.validate().is_err());
        cfg.dim = 30;
        cfg.concepts[1].token = "red".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn weights_control_sparsity() {
        let mut cfg = SynthConfig::benchmark(72, 60, 3, 0.0, 1);
        cfg.concepts[0].weight = 0.2;
        let data = generate_dataset(&cfg).unwrap();
        let n = data
            .assignment
            .values()
            .filter(|ts| ts.contains(&cfg.concepts[0].token))
            .count();
        assert!((1..=5).contains(&n), "{n}");
    }

    #[test]
    fn two_topic_vocabularies_are_disjoint_at_zero_noise() {
        let t = two_topic_corpus(5, 6, 0.0, 2);
        for e in t.corpus.entries() {
            let topic = t.topic_of[&e.object_id];
            assert!(e.tokens.iter().all(|w| t.vocabularies[topic].contains(w)));
        }
        assert_eq!(t.topic_of.len(), 10);
    }
}
