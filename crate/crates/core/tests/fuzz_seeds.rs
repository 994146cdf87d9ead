//! Replays the checked-in fuzz corpus through the same parsers and checks the
//! fuzz targets use, so a seed that crashes shows up under `cargo test`.

use std::fs;
use std::path::PathBuf;

use udm_core::classifier::ClassifierBundle;
use udm_core::dataset::{
    build_vocabulary, parse_concept_categories, parse_stopwords, tokenize, CategorySlices, DescriptionCorpus,
    FeatureTable, Language,
};
use udm_core::vae::VaeModel;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn features_csv() {
    let mut parsed = 0;
    for (_, data) in seeds("features_csv") {
        if let Ok(table) = FeatureTable::from_reader(data.as_slice()) {
            let mut out = Vec::new();
            table.write_csv(&mut out).unwrap();
            let again = FeatureTable::from_reader(out.as_slice()).unwrap();
            assert_eq!(again.len(), table.len());
            assert_eq!(again.dim(), table.dim());
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn descriptions_tsv() {
    let mut parsed = 0;
    for (_, data) in seeds("descriptions_tsv") {
        if let Ok(corpus) = DescriptionCorpus::from_bytes(&data, &Language::default()) {
            let vocab = build_vocabulary(&corpus, 1, &Default::default()).unwrap();
            assert!(vocab.concepts().iter().all(|c| !c.positive_objects.is_empty()));
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn category_manifest() {
    let mut parsed = 0;
    for (_, data) in seeds("category_manifest") {
        if let Ok(slices) = CategorySlices::from_json_str(std::str::from_utf8(&data).unwrap()) {
            assert!(slices.iter().all(|(_, r)| r.start < r.end));
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn concept_categories() {
    for (name, data) in seeds("concept_categories") {
        if let Ok(map) = parse_concept_categories(data.as_slice()) {
            let again = parse_concept_categories(map.to_tsv().as_bytes()).unwrap();
            assert_eq!(again.pairs().count(), map.pairs().count(), "{name}");
        }
    }
}

#[test]
fn stopwords() {
    for (_, data) in seeds("stopwords") {
        let words = parse_stopwords(data.as_slice(), &Language::new("es")).unwrap();
        assert!(!words.is_empty());
    }
}

#[test]
fn tokenize_seeds() {
    for (_, data) in seeds("tokenize") {
        let s = std::str::from_utf8(&data).unwrap();
        let toks = tokenize(s, &Language::default());
        assert!(!toks.is_empty());
        for tok in toks {
            assert!(!tok.is_empty() && !tok.chars().any(char::is_whitespace));
        }
    }
}

#[test]
fn vae_model_json() {
    let mut parsed = 0;
    for (_, data) in seeds("vae_model_json") {
        if let Ok(model) = VaeModel::from_json(std::str::from_utf8(&data).unwrap()) {
            model.embed(&vec![0.0; model.config().input_dim]).unwrap();
            parsed += 1;
        }
    }
    assert_eq!(parsed, 1);
}

#[test]
fn classifier_bundle_json() {
    let mut parsed = 0;
    for (_, data) in seeds("classifier_bundle_json") {
        if let Ok(bundle) = ClassifierBundle::from_json(std::str::from_utf8(&data).unwrap()) {
            for clf in bundle.iter() {
                let p = clf.predict_proba(&vec![0.0; clf.input_dim()]).unwrap();
                assert!(p > 0.0 && p < 1.0);
            }
            parsed += 1;
        }
    }
    assert!(parsed >= 1);
}
