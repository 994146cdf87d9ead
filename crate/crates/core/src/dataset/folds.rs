use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::{DatasetError, Result};
use crate::rng::Rng;

/// Object-level k-fold partition: every image of an object lands in the same fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, object_id: &str) -> Option<usize> {
        self.assignment.get(object_id).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, usize> {
        &self.assignment
    }

    pub fn test_objects(&self, fold: usize) -> BTreeSet<String> {
        self.assignment
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(o, _)| o.clone())
            .collect()
    }

    pub fn train_objects(&self, fold: usize) -> BTreeSet<String> {
        self.assignment
            .iter()
            .filter(|(_, &f)| f != fold)
            .map(|(o, _)| o.clone())
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

pub fn split_folds(objects: &BTreeSet<String>, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(DatasetError::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if objects.len() < k {
        return Err(DatasetError::TooFewObjects {
            objects: objects.len(),
            k,
        });
    }
    let mut order: Vec<&String> = objects.iter().collect();
    order.shuffle(&mut Rng::seed_from_u64(seed));
    let assignment = order.into_iter().enumerate().map(|(i, o)| (o.clone(), i % k)).collect();
    Ok(FoldAssignment { k, assignment })
}
