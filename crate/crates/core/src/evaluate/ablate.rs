use super::pipeline::{run, EvalInputs, EvaluationReport, RunSettings};
use super::{EvaluateError, Result};

/// Mean F1 of one method at each training fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub label: String,
    pub fractions: Vec<f64>,
    pub mean_f1: Vec<f64>,
    pub reports: Vec<EvaluationReport>,
}

impl AblationReport {
    pub fn row(&self) -> AblationRow<'_> {
        AblationRow {
            label: &self.label,
            cells: self
                .fractions
                .iter()
                .copied()
                .zip(self.mean_f1.iter().copied())
                .collect(),
        }
    }
}

/// `(fraction, mean F1)` pairs of one ablation line.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow<'a> {
    pub label: &'a str,
    pub cells: Vec<(f64, f64)>,
}

/// Reruns `settings` at every fraction of each training fold's objects.
/// The kept objects are nested prefixes of one shuffle per fold, so larger
/// fractions always include the smaller ones.
pub fn ablate(inputs: &EvalInputs, settings: &RunSettings, fractions: &[f64]) -> Result<AblationReport> {
    if fractions.is_empty() {
        return Err(EvaluateError::Inconsistent("no fractions given".into()));
    }
    if let Some(&bad) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(EvaluateError::InvalidFraction(bad));
    }
    let mut reports = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        log::info!("ablation: {} at fraction {fraction}", settings.label());
        reports.push(run(
            inputs,
            &RunSettings {
                fraction,
                ..settings.clone()
            },
        )?);
    }
    Ok(AblationReport {
        label: settings.label(),
        fractions: fractions.to_vec(),
        mean_f1: reports.iter().map(|r| r.mean_f1).collect(),
        reports,
    })
}
