use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// What a piece of data was used for while fitting a fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Standardization,
    VaeTraining,
    PvdmTraining,
    ClassifierTraining,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Standardization => "standardization",
            Role::VaeTraining => "vae_training",
            Role::PvdmTraining => "pvdm_training",
            Role::ClassifierTraining => "classifier_training",
        }
    }
}

/// One item (an image instance or a description) consumed in a fitting role.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuditEntry {
    pub fold: usize,
    pub role: Role,
    pub object_id: String,
    pub item: String,
}

/// Record of every item each fold fitted on, checked against the fold's
/// held-out objects.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LeakageAudit {
    entries: BTreeSet<AuditEntry>,
    test_objects: BTreeMap<usize, BTreeSet<String>>,
}

impl LeakageAudit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_test_objects(&mut self, fold: usize, objects: BTreeSet<String>) {
        self.test_objects.insert(fold, objects);
    }

    pub fn record(&mut self, fold: usize, role: Role, object_id: &str, item: &str) {
        self.entries.insert(AuditEntry {
            fold,
            role,
            object_id: object_id.to_string(),
            item: item.to_string(),
        });
    }

    pub fn merge(&mut self, other: LeakageAudit) {
        self.entries.extend(other.entries);
        self.test_objects.extend(other.test_objects);
    }

    pub fn entries(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter()
    }

    pub fn test_objects(&self, fold: usize) -> Option<&BTreeSet<String>> {
        self.test_objects.get(&fold)
    }

    /// Entries whose object was held out in the same fold.
    pub fn violations(&self) -> Vec<&AuditEntry> {
        self.entries
            .iter()
            .filter(|e| self.test_objects.get(&e.fold).is_some_and(|t| t.contains(&e.object_id)))
            .collect()
    }

    /// `(fold, role) → (items, distinct objects)`.
    pub fn summary(&self) -> BTreeMap<(usize, Role), (usize, usize)> {
        let mut items: BTreeMap<(usize, Role), (usize, BTreeSet<&str>)> = BTreeMap::new();
        for e in &self.entries {
            let slot = items.entry((e.fold, e.role)).or_default();
            slot.0 += 1;
            slot.1.insert(&e.object_id);
        }
        items.into_iter().map(|(k, (n, objs))| (k, (n, objs.len()))).collect()
    }
}
