use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use udm_core::classifier::ClassifierConfig;
use udm_core::evaluate::{AblationScope, EvalProtocol, Method, NegativeConfig, RunSettings};
use udm_core::vae::VaeConfig;

use crate::error::CliError;

/// Everything a run needs. Loaded from `--config` when given, then
/// overridden field by field from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub features: Option<PathBuf>,
    pub descriptions: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub concept_categories: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub language: String,
    pub min_count: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Latent sizes to sweep; empty means `vae.latent_dim` alone.
    pub latent_dims: Vec<usize>,
    pub fractions: Vec<f64>,
    pub ablation_scope: AblationScope,
    pub vae: VaeConfig,
    pub protocol: EvalProtocol,
    pub negatives: NegativeConfig,
    pub classifier: ClassifierConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            features: None,
            descriptions: None,
            categories: None,
            concept_categories: None,
            stopwords: None,
            model: None,
            out: None,
            language: "en".into(),
            min_count: 2,
            seed: 0,
            methods: Vec::new(),
            latent_dims: Vec::new(),
            fractions: Vec::new(),
            ablation_scope: AblationScope::default(),
            vae: VaeConfig::default(),
            protocol: EvalProtocol::default(),
            negatives: NegativeConfig::default(),
            classifier: ClassifierConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn require<'a>(&self, field: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
        let path = field
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("{flag} is required (flag or config file)")))?;
        if !path.exists() {
            return Err(CliError::Usage(format!("{flag}: `{}` does not exist", path.display())));
        }
        Ok(path)
    }

    /// Fails if an optional input path is set but missing.
    pub fn check_optional(&self, field: &Option<PathBuf>, flag: &str) -> Result<(), CliError> {
        match field {
            Some(p) if !p.exists() => Err(CliError::Usage(format!("{flag}: `{}` does not exist", p.display()))),
            _ => Ok(()),
        }
    }

    pub fn latent_dims(&self) -> Vec<usize> {
        if self.latent_dims.is_empty() {
            vec![self.vae.latent_dim]
        } else {
            self.latent_dims.clone()
        }
    }

    pub fn methods(&self) -> Vec<Method> {
        if self.methods.is_empty() {
            vec![Method::Udm]
        } else {
            self.methods.clone()
        }
    }

    /// One settings value per (method, latent size) combination, seeded from `seed`.
    pub fn run_settings(&self) -> Vec<RunSettings> {
        let mut out = Vec::new();
        for method in self.methods() {
            let dims = if method == Method::Udm {
                self.latent_dims()
            } else {
                vec![self.vae.latent_dim]
            };
            for d in dims {
                out.push(RunSettings {
                    method,
                    protocol: EvalProtocol {
                        seed: self.seed,
                        ..self.protocol.clone()
                    },
                    vae: VaeConfig {
                        latent_dim: d,
                        ..self.vae.clone()
                    },
                    negatives: self.negatives.clone(),
                    classifier: self.classifier.clone(),
                    fraction: 1.0,
                    ablation_scope: self.ablation_scope,
                });
            }
        }
        out
    }
}
