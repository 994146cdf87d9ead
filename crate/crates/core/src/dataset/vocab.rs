use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{utf8_lines, DatasetError, DescriptionCorpus, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub token: String,
    /// Occurrences of the token across all descriptions.
    pub count: usize,
    /// Objects with at least one description containing the token.
    pub positive_objects: BTreeSet<String>,
}

/// Concepts sorted lexicographically by token.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptVocabulary {
    concepts: Vec<Concept>,
}

impl ConceptVocabulary {
    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn get(&self, token: &str) -> Option<&Concept> {
        self.concepts
            .binary_search_by(|c| c.token.as_str().cmp(token))
            .ok()
            .map(|i| &self.concepts[i])
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(|c| c.token.as_str())
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Keeps only the listed tokens (unknown tokens are ignored).
    pub fn restrict_to<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> ConceptVocabulary {
        let keep: BTreeSet<&str> = tokens.into_iter().collect();
        ConceptVocabulary {
            concepts: self
                .concepts
                .iter()
                .filter(|c| keep.contains(c.token.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// Same concepts, with positive sets intersected with `objects`.
    pub fn restrict_objects(&self, objects: &BTreeSet<String>) -> ConceptVocabulary {
        ConceptVocabulary {
            concepts: self
                .concepts
                .iter()
                .map(|c| Concept {
                    token: c.token.clone(),
                    count: c.count,
                    positive_objects: c.positive_objects.intersection(objects).cloned().collect(),
                })
                .collect(),
        }
    }
}

pub fn build_vocabulary(
    corpus: &DescriptionCorpus,
    min_count: usize,
    stopwords: &BTreeSet<String>,
) -> Result<ConceptVocabulary> {
    if min_count == 0 {
        return Err(DatasetError::InvalidArgument("min_count must be at least 1".into()));
    }
    let mut acc: BTreeMap<&str, (usize, BTreeSet<String>)> = BTreeMap::new();
    for entry in corpus.entries() {
        for tok in &entry.tokens {
            let slot = acc.entry(tok.as_str()).or_default();
            slot.0 += 1;
            if !slot.1.contains(&entry.object_id) {
                slot.1.insert(entry.object_id.clone());
            }
        }
    }
    let concepts = acc
        .into_iter()
        .filter(|(tok, (count, _))| *count >= min_count && !stopwords.contains(*tok))
        .map(|(tok, (count, positive_objects))| Concept {
            token: tok.to_string(),
            count,
            positive_objects,
        })
        .collect();
    Ok(ConceptVocabulary { concepts })
}

/// Concept → feature categories, from `concept<TAB>category` lines.
/// A concept may appear on several lines to pair it with several categories.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptCategoryMap {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl ConceptCategoryMap {
    pub fn insert(&mut self, concept: impl Into<String>, category: impl Into<String>) {
        self.map.entry(concept.into()).or_default().insert(category.into());
    }

    pub fn categories(&self, concept: &str) -> Option<&BTreeSet<String>> {
        self.map.get(concept)
    }

    /// The single reporting tag for a concept: its first category in sort order.
    pub fn primary_category(&self, concept: &str) -> Option<&str> {
        self.map.get(concept).and_then(|s| s.iter().next()).map(String::as_str)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map
            .iter()
            .flat_map(|(c, cats)| cats.iter().map(move |k| (c.as_str(), k.as_str())))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        self.pairs().map(|(c, k)| format!("{c}\t{k}\n")).collect()
    }
}

pub fn parse_concept_categories(bytes: &[u8]) -> Result<ConceptCategoryMap> {
    let mut out = ConceptCategoryMap::default();
    for (i, line) in utf8_lines(bytes)?.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: &str| DatasetError::MalformedLine {
            line: i as u64 + 1,
            reason: reason.into(),
        };
        let (concept, category) = line
            .split_once('\t')
            .ok_or_else(|| malformed("missing tab separator"))?;
        let (concept, category) = (concept.trim(), category.trim());
        if concept.is_empty() || category.is_empty() || category.contains('\t') {
            return Err(malformed("expected `concept<TAB>category`"));
        }
        out.insert(concept, category);
    }
    Ok(out)
}

pub fn load_concept_categories(path: impl AsRef<Path>) -> Result<ConceptCategoryMap> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    parse_concept_categories(&bytes)
}
