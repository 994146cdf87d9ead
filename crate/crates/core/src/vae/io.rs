use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dense, Layers, Result, Standardization, VaeConfig, VaeError, VaeModel, MODEL_VERSION};

#[derive(Serialize, Deserialize)]
struct DenseFile {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LayersFile {
    enc_hidden: DenseFile,
    enc_mu: DenseFile,
    enc_logvar: DenseFile,
    dec_hidden: DenseFile,
    dec_out: DenseFile,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: String,
    config: VaeConfig,
    standardization: Standardization,
    layers: LayersFile,
}

impl From<&Dense> for DenseFile {
    fn from(d: &Dense) -> Self {
        DenseFile {
            rows: d.rows,
            cols: d.cols,
            weights: d.weights.clone(),
            bias: d.bias.clone(),
        }
    }
}

impl From<DenseFile> for Dense {
    fn from(d: DenseFile) -> Self {
        Dense {
            rows: d.rows,
            cols: d.cols,
            weights: d.weights,
            bias: d.bias,
        }
    }
}

impl VaeModel {
    /// Single JSON document: version, config echo, standardization and row-major weights.
    pub fn to_json(&self) -> String {
        let l = &self.layers;
        let file = ModelFile {
            version: MODEL_VERSION.to_string(),
            config: self.config.clone(),
            standardization: self.standardization.clone(),
            layers: LayersFile {
                enc_hidden: (&l.enc_hidden).into(),
                enc_mu: (&l.enc_mu).into(),
                enc_logvar: (&l.enc_logvar).into(),
                dec_hidden: (&l.dec_hidden).into(),
                dec_out: (&l.dec_out).into(),
            },
        };
        serde_json::to_string(&file).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| VaeError::InvalidModel(e.to_string()))?;
        if file.version != MODEL_VERSION {
            return Err(VaeError::InvalidModel(format!(
                "unsupported version `{}` (expected `{MODEL_VERSION}`)",
                file.version
            )));
        }
        let layers = Layers {
            enc_hidden: file.layers.enc_hidden.into(),
            enc_mu: file.layers.enc_mu.into(),
            enc_logvar: file.layers.enc_logvar.into(),
            dec_hidden: file.layers.dec_hidden.into(),
            dec_out: file.layers.dec_out.into(),
        };
        VaeModel::from_parts(file.config, file.standardization, layers)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_json()).map_err(|source| VaeError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|source| VaeError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })?;
        VaeModel::from_json(&text)
    }
}
