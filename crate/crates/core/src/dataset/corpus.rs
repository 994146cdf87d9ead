use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use super::{utf8_lines, DatasetError, Result};

/// Language tag of a description corpus (`en`, `es`, `hi`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Language(String);

impl Language {
    pub fn new(tag: impl Into<String>) -> Self {
        Language(tag.into().to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for Language {
    fn default() -> Self {
        Language::new("en")
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits on Unicode whitespace, strips punctuation from both token edges and
/// lowercases. Interior hyphens and apostrophes survive; scripts without case
/// (Devanagari) are untouched by lowercasing.
pub fn tokenize(raw: &str, _language: &Language) -> Vec<String> {
    raw.split_whitespace()
        .filter_map(|piece| {
            let trimmed = piece.trim_matches(is_punctuation);
            (!trimmed.is_empty()).then(|| trimmed.to_lowercase())
        })
        .collect()
}

fn is_punctuation(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Punctuation
}

#[derive(Debug, Clone, PartialEq)]
pub struct Description {
    pub object_id: String,
    pub language: Language,
    pub raw: String,
    pub tokens: Vec<String>,
}

/// Natural-language descriptions of objects, one entry per TSV line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescriptionCorpus {
    entries: Vec<Description>,
}

impl DescriptionCorpus {
    pub fn new(entries: Vec<Description>) -> Self {
        DescriptionCorpus { entries }
    }

    /// Builds a corpus from `(object_id, raw text)` pairs, tokenizing each.
    pub fn from_pairs<I, A, B>(pairs: I, language: &Language) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        DescriptionCorpus {
            entries: pairs
                .into_iter()
                .map(|(o, raw)| {
                    let raw = raw.into();
                    Description {
                        object_id: o.into(),
                        language: language.clone(),
                        tokens: tokenize(&raw, language),
                        raw,
                    }
                })
                .collect(),
        }
    }

    /// Parses `object_id<TAB>description` lines. Blank lines are skipped.
    pub fn from_bytes(bytes: &[u8], language: &Language) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in utf8_lines(bytes)?.into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = i as u64 + 1;
            let (object_id, raw) = line.split_once('\t').ok_or(DatasetError::MalformedLine {
                line: line_no,
                reason: "missing tab separator".into(),
            })?;
            let object_id = object_id.trim();
            if object_id.is_empty() {
                return Err(DatasetError::MalformedLine {
                    line: line_no,
                    reason: "empty object_id".into(),
                });
            }
            entries.push(Description {
                object_id: object_id.to_string(),
                language: language.clone(),
                tokens: tokenize(raw, language),
                raw: raw.to_string(),
            });
        }
        Ok(DescriptionCorpus { entries })
    }

    pub fn entries(&self) -> &[Description] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn object_ids(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.object_id.clone()).collect()
    }

    pub fn subset_by_objects(&self, objects: &BTreeSet<String>) -> DescriptionCorpus {
        DescriptionCorpus {
            entries: self
                .entries
                .iter()
                .filter(|e| objects.contains(&e.object_id))
                .cloned()
                .collect(),
        }
    }
}

pub fn load_descriptions(path: impl AsRef<Path>, language: &Language) -> Result<DescriptionCorpus> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    DescriptionCorpus::from_bytes(&bytes, language)
}

const EN_STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "of", "in", "on", "with", "to", "for", "is", "it", "its", "this", "that", "these",
    "those", "are", "was", "be", "has", "have", "as", "at", "by", "from", "very", "some", "there", "which", "object",
    "looks", "like", "kind",
];

const ES_STOPWORDS: &[&str] = &[
    "el", "la", "los", "las", "un", "una", "unos", "unas", "y", "o", "de", "del", "en", "con", "es", "son", "que",
    "por", "para", "al", "se", "su", "sus", "lo", "muy", "esta", "este", "como",
];

const HI_STOPWORDS: &[&str] = &[
    "है",
    "हैं",
    "का",
    "की",
    "के",
    "और",
    "एक",
    "में",
    "से",
    "को",
    "यह",
    "वह",
    "पर",
    "था",
    "थी",
    "भी",
    "तथा",
    "या",
    "जो",
    "इस",
];

/// Small built-in function-word list for the language; empty for unknown tags.
pub fn builtin_stopwords(language: &Language) -> BTreeSet<String> {
    let list: &[&str] = match language.as_str() {
        "en" | "eng" | "english" => EN_STOPWORDS,
        "es" | "spa" | "spanish" => ES_STOPWORDS,
        "hi" | "hin" | "hindi" => HI_STOPWORDS,
        _ => &[],
    };
    list.iter().map(|s| s.to_string()).collect()
}

/// One stopword per line; entries are normalized with [`tokenize`].
pub fn parse_stopwords(bytes: &[u8], language: &Language) -> Result<BTreeSet<String>> {
    Ok(utf8_lines(bytes)?
        .into_iter()
        .flat_map(|l| tokenize(l, language))
        .collect())
}

pub fn load_stopwords(path: impl AsRef<Path>, language: &Language) -> Result<BTreeSet<String>> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    parse_stopwords(&bytes, language)
}
