use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::dataset::{build_vocabulary, DescriptionCorpus, Language};
use crate::synth::two_topic_corpus;

fn vocab_of(pairs: &[(&str, &str)]) -> ConceptVocabulary {
    let corpus = DescriptionCorpus::from_pairs(pairs.iter().copied(), &Language::default());
    build_vocabulary(&corpus, 1, &BTreeSet::new()).unwrap()
}

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

fn small_cfg(seed: u64) -> PvdmConfig {
    PvdmConfig {
        dim: 20,
        epochs: 60,
        seed,
        ..PvdmConfig::default()
    }
}

#[test]
fn cosine_examples() {
    assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    assert!((cosine(&[1.0, 0.0], &[-2.0, 0.0]).unwrap() + 1.0).abs() < 1e-12);
    assert!(matches!(
        cosine(&[0.0, 0.0], &[1.0, 0.0]),
        Err(NegativesError::ZeroVector)
    ));
    assert!(matches!(
        cosine(&[1.0], &[1.0, 0.0]),
        Err(NegativesError::LengthMismatch(1, 2))
    ));
}

#[test]
fn all_nonpositive_examples() {
    let v = vocab_of(&[("a", "red"), ("b", "blue"), ("c", "blue")]);
    let n = negatives_all("red", &v, &set(&["a", "b", "c"])).unwrap();
    assert_eq!(n.object_ids, set(&["b", "c"]));
    assert_eq!(n.strategy, NegativeStrategy::AllNonpositive);
    assert!(matches!(
        negatives_all("red", &v, &set(&["a"])),
        Err(NegativesError::NoNegativesAvailable(_))
    ));
    assert!(matches!(
        negatives_all("green", &v, &set(&["a"])),
        Err(NegativesError::UnknownConcept(_))
    ));
}

fn unit_at_cosine(c: f64) -> Vec<f64> {
    vec![c, (1.0 - c * c).sqrt()]
}

fn fixed_pv() -> (ConceptVocabulary, ParagraphVectors) {
    let v = vocab_of(&[("p", "apple"), ("n1", "pear"), ("n2", "pear"), ("n3", "pear")]);
    let docs: BTreeMap<String, Vec<f64>> = [
        ("p", vec![1.0, 0.0]),
        ("n1", unit_at_cosine(0.9)),
        ("n2", unit_at_cosine(0.1)),
        ("n3", unit_at_cosine(-0.3)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    (v, ParagraphVectors::from_doc_vectors(docs).unwrap())
}

#[test]
fn semantic_rank_selection() {
    let (v, pv) = fixed_pv();
    let n = negatives_semantic("apple", &v, &pv, 2.0, Aggregate::Max).unwrap();
    assert_eq!(n.object_ids, set(&["n2", "n3"]));
    let all = negatives_semantic("apple", &v, &pv, 100.0, Aggregate::Max).unwrap();
    assert_eq!(all.object_ids, set(&["n1", "n2", "n3"]));
    let one = negatives_semantic("apple", &v, &pv, 0.01, Aggregate::Centroid).unwrap();
    assert_eq!(one.object_ids, set(&["n3"]));
    assert!(negatives_semantic("apple", &v, &pv, 0.0, Aggregate::Max).is_err());
}

#[test]
fn semantic_ties_break_by_object_id() {
    let v = vocab_of(&[("p", "apple"), ("zz", "pear"), ("aa", "pear"), ("mm", "pear")]);
    let docs: BTreeMap<String, Vec<f64>> = [
        ("p", vec![1.0, 0.0]),
        ("zz", vec![0.0, 1.0]),
        ("aa", vec![0.0, 2.0]),
        ("mm", vec![1.0, 1.0]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let pv = ParagraphVectors::from_doc_vectors(docs).unwrap();
    let n = negatives_semantic("apple", &v, &pv, 1.0, Aggregate::Max).unwrap();
    assert_eq!(n.object_ids, set(&["aa"]));
}

#[test]
fn semantic_without_candidates_fails() {
    let v = vocab_of(&[("p", "apple"), ("q", "apple")]);
    let docs = [("p", vec![1.0, 0.0]), ("q", vec![0.0, 1.0])]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let pv = ParagraphVectors::from_doc_vectors(docs).unwrap();
    assert!(matches!(
        negatives_semantic("apple", &v, &pv, 1.5, Aggregate::Max),
        Err(NegativesError::NoNegativesAvailable(_))
    ));
}

#[test]
fn single_document_is_too_small() {
    let c = DescriptionCorpus::from_pairs([("a", "red cube"), ("a", "a red block")], &Language::default());
    assert!(matches!(
        train_pvdm(&c, &PvdmConfig::default()),
        Err(NegativesError::CorpusTooSmall { documents: 1, .. })
    ));
}

#[test]
fn training_is_deterministic_and_loss_falls() {
    let t = two_topic_corpus(6, 6, 0.0, 1);
    let a = train_pvdm(&t.corpus, &small_cfg(3)).unwrap();
    let b = train_pvdm(&t.corpus, &small_cfg(3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.doc_vectors().len(), 12);
    assert!(a
        .doc_vectors()
        .values()
        .all(|v| v.len() == 20 && v.iter().all(|x| x.is_finite())));
    let h = a.loss_history();
    assert!(h.last().unwrap() < h.first().unwrap(), "{h:?}");
    let mut csv = Vec::new();
    a.write_doc_vectors_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 13);
}

#[test]
fn identical_documents_end_up_close() {
    for seed in 0..5 {
        let pairs = [
            ("twin1", "red apple shiny fruit on a round plate"),
            ("twin1", "sweet red apple"),
            ("twin2", "red apple shiny fruit on a round plate"),
            ("twin2", "sweet red apple"),
            ("other", "flat wooden block toy with square edges"),
            ("other", "plank of wood"),
            ("filler", "green lime and yellow banana"),
        ];
        let c = DescriptionCorpus::from_pairs(pairs, &Language::default());
        let pv = train_pvdm(
            &c,
            &PvdmConfig {
                seed,
                ..PvdmConfig::default()
            },
        )
        .unwrap();
        let d = |o: &str| pv.doc_vector(o).unwrap();
        let twins = cosine(d("twin1"), d("twin2")).unwrap();
        let random = cosine(d("twin1"), d("other")).unwrap();
        assert!(twins >= random, "seed {seed}: {twins} < {random}");
    }
}

/// Mean pairwise cosine within and across topics, by direct double loop.
fn topic_cosines(pv: &ParagraphVectors, topic_of: &BTreeMap<String, usize>) -> (f64, f64) {
    let ids: Vec<&String> = topic_of.keys().collect();
    let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0, 0.0, 0);
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let a = pv.doc_vector(ids[i]).unwrap();
            let b = pv.doc_vector(ids[j]).unwrap();
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if topic_of[ids[i]] == topic_of[ids[j]] {
                intra += dot / (na * nb);
                ni += 1;
            } else {
                inter += dot / (na * nb);
                nx += 1;
            }
        }
    }
    (intra / ni as f64, inter / nx as f64)
}

#[test]
fn two_topics_separate() {
    let t = two_topic_corpus(8, 8, 0.0, 5);
    let pv = train_pvdm(&t.corpus, &small_cfg(5)).unwrap();
    let (intra, inter) = topic_cosines(&pv, &t.topic_of);
    assert!(intra > inter, "intra {intra} inter {inter}");
}

/// Concepts of topic 0 whose requested negative count fits inside topic 1.
fn separable_concepts<'a>(t: &'a crate::synth::TwoTopicCorpus, vocab: &ConceptVocabulary, ratio: f64) -> Vec<&'a str> {
    let other = t.topic_of.values().filter(|&&k| k == 1).count();
    t.vocabularies[0]
        .iter()
        .filter(|w| {
            vocab
                .get(w)
                .is_some_and(|c| (ratio * c.positive_objects.len() as f64).ceil() as usize <= other)
        })
        .map(String::as_str)
        .collect()
}

#[test]
fn semantic_negatives_come_from_the_other_topic() {
    let t = two_topic_corpus(10, 4, 0.0, 9);
    let vocab = build_vocabulary(&t.corpus, 1, &BTreeSet::new()).unwrap();
    let pv = train_pvdm(
        &t.corpus,
        &PvdmConfig {
            seed: 9,
            ..PvdmConfig::default()
        },
    )
    .unwrap();
    let concepts = separable_concepts(&t, &vocab, 1.5);
    assert!(concepts.len() >= 5, "{concepts:?}");
    for concept in concepts {
        let n = negatives_semantic(concept, &vocab, &pv, 1.5, Aggregate::Max).unwrap();
        let pos = &vocab.get(concept).unwrap().positive_objects;
        assert!(n.object_ids.is_disjoint(pos));
        for o in &n.object_ids {
            assert_eq!(t.topic_of[o], 1, "concept {concept} picked {o}");
        }
    }
}

fn arb_docs() -> impl Strategy<Value = BTreeMap<String, Vec<f64>>> {
    prop::collection::btree_map("[a-e]{1,2}", prop::collection::vec(-2.0f64..2.0, 3), 2..10).prop_map(|m| {
        m.into_iter()
            .map(|(k, mut v)| {
                v[0] += 3.0;
                (k, v)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn negative_sets_avoid_positives(docs in arb_docs(), mask in prop::collection::vec(any::<bool>(), 10), ratio in 0.1f64..4.0) {
        let ids: Vec<&String> = docs.keys().collect();
        let pairs: Vec<(String, String)> = ids
            .iter()
            .enumerate()
            .map(|(i, o)| (o.to_string(), if mask[i] || i == 0 { "hit".into() } else { "miss".into() }))
            .collect();
        let vocab = build_vocabulary(&DescriptionCorpus::from_pairs(pairs, &Language::default()), 1, &BTreeSet::new()).unwrap();
        let pos = vocab.get("hit").unwrap().positive_objects.clone();
        let objects: BTreeSet<String> = docs.keys().cloned().collect();
        let pv = ParagraphVectors::from_doc_vectors(docs).unwrap();
        if pos.len() < objects.len() {
            let all = negatives_all("hit", &vocab, &objects).unwrap();
            prop_assert!(all.object_ids.is_disjoint(&pos));
            prop_assert_eq!(all.object_ids.len() + pos.len(), objects.len());
            for agg in [Aggregate::Max, Aggregate::Centroid] {
                let a = negatives_semantic("hit", &vocab, &pv, ratio, agg).unwrap();
                let b = negatives_semantic("hit", &vocab, &pv, ratio, agg).unwrap();
                prop_assert!(a.object_ids.is_disjoint(&pos));
                prop_assert!(!a.object_ids.is_empty());
                prop_assert_eq!(&a, &b);
                prop_assert!(a.object_ids.is_subset(&all.object_ids));
            }
        } else {
            prop_assert!(negatives_all("hit", &vocab, &objects).is_err());
        }
    }
}
