use thiserror::Error;
use udm_core::classifier::ClassifierError;
use udm_core::dataset::DatasetError;
use udm_core::evaluate::EvaluateError;
use udm_core::negatives::NegativesError;
use udm_core::synth::SynthError;
use udm_core::vae::VaeError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: invalid config: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Vae(#[from] VaeError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    /// 1 for numerical or internal failures, 2 for anything the user can fix.
    pub fn exit_code(&self) -> u8 {
        let internal = matches!(
            self,
            CliError::ThreadPool(_)
                | CliError::Vae(VaeError::NonFiniteLoss { .. })
                | CliError::Evaluate(EvaluateError::Vae(VaeError::NonFiniteLoss { .. }))
                | CliError::Evaluate(EvaluateError::Negatives(NegativesError::NonFinite { .. }))
                | CliError::Evaluate(EvaluateError::Inconsistent(_))
        );
        if internal {
            1
        } else {
            2
        }
    }
}
