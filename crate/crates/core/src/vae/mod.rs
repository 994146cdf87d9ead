//! Gaussian variational autoencoder over visual feature vectors.
//!
//! ```text
//! x ─standardize─▶ x̃ ─tanh(W1·x̃+b1)─▶ h ─┬─ Wμ·h+bμ ──────▶ μ
//!                                         └─ Wlv·h+blv ─exp─▶ σ²
//! z = μ + √σ² ⊙ ε,  ε ~ N(0, I)
//! z ─tanh(W2·z+b2)─▶ g ─W3·g+b3─▶ x̂
//! ```
//!
//! The per-example objective is `½‖x̃ − x̂‖² + KL(N(μ, σ²) ‖ N(0, I))`, i.e. a
//! unit-variance Gaussian reconstruction likelihood on standardized features
//! plus the closed-form KL term. Gradients are computed by hand.

mod dense;
mod io;
mod train;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Rng;

pub use dense::Dense;
pub use train::{train, train_rows, Adam, TrainingHistory};

pub const MODEL_VERSION: &str = "udm-vae-v1";

#[derive(Debug, Error)]
pub enum VaeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("variance must be strictly positive and finite (index {index}: {value})")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("invalid VAE configuration: {0}")]
    InvalidConfig(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    NonFiniteLoss { epoch: usize, batch: usize, detail: String },
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, VaeError>;

/// Which encoder outputs form the latent embedding handed to classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    MuOnly,
    #[default]
    MuAndVar,
}

/// Whether the spread half of the embedding is the variance or the standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    #[default]
    Var,
    Stddev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VaeConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub latent_dim: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub standardize: bool,
    pub embedding: EmbeddingMode,
    pub variance_form: VarianceForm,
}

impl Default for VaeConfig {
    fn default() -> Self {
        VaeConfig {
            input_dim: 0,
            hidden_dim: 500,
            latent_dim: 50,
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 300,
            seed: 0,
            standardize: true,
            embedding: EmbeddingMode::MuAndVar,
            variance_form: VarianceForm::Var,
        }
    }
}

impl VaeConfig {
    pub fn new(input_dim: usize) -> Self {
        VaeConfig {
            input_dim,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(VaeError::InvalidConfig(m.to_string()));
        if self.input_dim == 0 || self.hidden_dim == 0 || self.latent_dim == 0 {
            return bad("input_dim, hidden_dim and latent_dim must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        Ok(())
    }

    pub fn embedding_dim(&self) -> usize {
        match self.embedding {
            EmbeddingMode::MuOnly => self.latent_dim,
            EmbeddingMode::MuAndVar => 2 * self.latent_dim,
        }
    }
}

/// Per-dimension affine standardization `x̃ = (x − mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardization {
    pub fn identity(dim: usize) -> Self {
        Standardization {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    /// Population statistics over `rows`; constant dimensions get std 1.
    pub fn fit(rows: &[&[f64]], dim: usize) -> Self {
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardization { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// The five dense layers of the network. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct Layers {
    pub enc_hidden: Dense,
    pub enc_mu: Dense,
    pub enc_logvar: Dense,
    pub dec_hidden: Dense,
    pub dec_out: Dense,
}

impl Layers {
    pub fn zeros(input: usize, hidden: usize, latent: usize) -> Self {
        Layers {
            enc_hidden: Dense::zeros(hidden, input),
            enc_mu: Dense::zeros(latent, hidden),
            enc_logvar: Dense::zeros(latent, hidden),
            dec_hidden: Dense::zeros(hidden, latent),
            dec_out: Dense::zeros(input, hidden),
        }
    }

    fn glorot(input: usize, hidden: usize, latent: usize, rng: &mut Rng) -> Self {
        Layers {
            enc_hidden: Dense::glorot(hidden, input, rng),
            enc_mu: Dense::glorot(latent, hidden, rng),
            enc_logvar: Dense::glorot(latent, hidden, rng),
            dec_hidden: Dense::glorot(hidden, latent, rng),
            dec_out: Dense::glorot(input, hidden, rng),
        }
    }

    pub const TENSOR_NAMES: [&'static str; 10] = [
        "enc_hidden.w",
        "enc_hidden.b",
        "enc_mu.w",
        "enc_mu.b",
        "enc_logvar.w",
        "enc_logvar.b",
        "dec_hidden.w",
        "dec_hidden.b",
        "dec_out.w",
        "dec_out.b",
    ];

    /// All parameter tensors, in [`Layers::TENSOR_NAMES`] order.
    pub fn tensors(&self) -> [&[f64]; 10] {
        [
            &self.enc_hidden.weights,
            &self.enc_hidden.bias,
            &self.enc_mu.weights,
            &self.enc_mu.bias,
            &self.enc_logvar.weights,
            &self.enc_logvar.bias,
            &self.dec_hidden.weights,
            &self.dec_hidden.bias,
            &self.dec_out.weights,
            &self.dec_out.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 10] {
        [
            &mut self.enc_hidden.weights,
            &mut self.enc_hidden.bias,
            &mut self.enc_mu.weights,
            &mut self.enc_mu.bias,
            &mut self.enc_logvar.weights,
            &mut self.enc_logvar.bias,
            &mut self.dec_hidden.weights,
            &mut self.dec_hidden.bias,
            &mut self.dec_out.weights,
            &mut self.dec_out.bias,
        ]
    }

    fn is_finite(&self) -> bool {
        [
            &self.enc_hidden,
            &self.enc_mu,
            &self.enc_logvar,
            &self.dec_hidden,
            &self.dec_out,
        ]
        .iter()
        .all(|d| d.is_finite())
    }

    fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

/// Loss components for one example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub recon: f64,
    pub kl: f64,
}

/// `[μ(x); σ²(x)]` (or the configured variant) for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentEmbedding(pub Vec<f64>);

impl LatentEmbedding {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaeModel {
    config: VaeConfig,
    standardization: Standardization,
    layers: Layers,
}

struct Pass {
    xs: Vec<f64>,
    h: Vec<f64>,
    mu: Vec<f64>,
    logvar: Vec<f64>,
    eps: Vec<f64>,
    z: Vec<f64>,
    g: Vec<f64>,
    xhat: Vec<f64>,
}

impl VaeModel {
    /// All weights zero, identity standardization.
    pub fn zeros(config: VaeConfig) -> Result<Self> {
        config.validate()?;
        Ok(VaeModel {
            standardization: Standardization::identity(config.input_dim),
            layers: Layers::zeros(config.input_dim, config.hidden_dim, config.latent_dim),
            config,
        })
    }

    /// Glorot-initialized weights with the given standardization.
    pub fn init(config: VaeConfig, standardization: Standardization, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        if standardization.mean.len() != config.input_dim || standardization.std.len() != config.input_dim {
            return Err(VaeError::DimensionMismatch {
                expected: config.input_dim,
                found: standardization.mean.len(),
            });
        }
        Ok(VaeModel {
            layers: Layers::glorot(config.input_dim, config.hidden_dim, config.latent_dim, rng),
            standardization,
            config,
        })
    }

    pub fn from_parts(config: VaeConfig, standardization: Standardization, layers: Layers) -> Result<Self> {
        config.validate()?;
        let (d_in, h, d) = (config.input_dim, config.hidden_dim, config.latent_dim);
        let expected = [
            (&layers.enc_hidden, h, d_in),
            (&layers.enc_mu, d, h),
            (&layers.enc_logvar, d, h),
            (&layers.dec_hidden, h, d),
            (&layers.dec_out, d_in, h),
        ];
        for (layer, rows, cols) in expected {
            if layer.rows != rows
                || layer.cols != cols
                || layer.weights.len() != rows * cols
                || layer.bias.len() != rows
            {
                return Err(VaeError::InvalidModel(format!(
                    "layer shape {}x{} does not match configuration {rows}x{cols}",
                    layer.rows, layer.cols
                )));
            }
        }
        if standardization.mean.len() != d_in || standardization.std.len() != d_in {
            return Err(VaeError::InvalidModel("standardization length mismatch".into()));
        }
        if standardization.std.iter().any(|s| !(s.is_finite() && *s > 0.0))
            || standardization.mean.iter().any(|m| !m.is_finite())
        {
            return Err(VaeError::InvalidModel(
                "standardization must be finite with positive std".into(),
            ));
        }
        if !layers.is_finite() {
            return Err(VaeError::InvalidModel("non-finite weight".into()));
        }
        Ok(VaeModel {
            config,
            standardization,
            layers,
        })
    }

    pub fn config(&self) -> &VaeConfig {
        &self.config
    }

    pub fn standardization(&self) -> &Standardization {
        &self.standardization
    }

    pub fn layers(&self) -> &Layers {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut Layers {
        &mut self.layers
    }

    fn check_input(&self, x: &[f64], expected: usize) -> Result<()> {
        if x.len() != expected {
            return Err(VaeError::DimensionMismatch {
                expected,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(VaeError::NonFiniteInput);
        }
        Ok(())
    }

    fn encode_standardized(&self, xs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let l = &self.layers;
        let mut h = vec![0.0; self.config.hidden_dim];
        l.enc_hidden.forward(xs, &mut h);
        h.iter_mut().for_each(|v| *v = v.tanh());
        let mut mu = vec![0.0; self.config.latent_dim];
        l.enc_mu.forward(&h, &mut mu);
        let mut logvar = vec![0.0; self.config.latent_dim];
        l.enc_logvar.forward(&h, &mut logvar);
        (h, mu, logvar)
    }

    fn decode_hidden(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let l = &self.layers;
        let mut g = vec![0.0; self.config.hidden_dim];
        l.dec_hidden.forward(z, &mut g);
        g.iter_mut().for_each(|v| *v = v.tanh());
        let mut xhat = vec![0.0; self.config.input_dim];
        l.dec_out.forward(&g, &mut xhat);
        (g, xhat)
    }

    /// Posterior parameters `(μ, σ²)` for a raw (unstandardized) input.
    pub fn encode(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(x, self.config.input_dim)?;
        let (_, mu, logvar) = self.encode_standardized(&self.standardization.apply(x));
        Ok((mu, logvar.into_iter().map(f64::exp).collect()))
    }

    /// Reconstruction in standardized feature space.
    pub fn decode(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_input(z, self.config.latent_dim)?;
        Ok(self.decode_hidden(z).1)
    }

    /// Deterministic latent embedding; no sampling.
    pub fn embed(&self, x: &[f64]) -> Result<LatentEmbedding> {
        let (mut mu, var) = self.encode(x)?;
        if self.config.embedding == EmbeddingMode::MuAndVar {
            match self.config.variance_form {
                VarianceForm::Var => mu.extend(var),
                VarianceForm::Stddev => mu.extend(var.into_iter().map(f64::sqrt)),
            }
        }
        Ok(LatentEmbedding(mu))
    }

    fn forward_pass(&self, x: &[f64], eps: &[f64]) -> Result<Pass> {
        self.check_input(x, self.config.input_dim)?;
        if eps.len() != self.config.latent_dim {
            return Err(VaeError::DimensionMismatch {
                expected: self.config.latent_dim,
                found: eps.len(),
            });
        }
        let xs = self.standardization.apply(x);
        let (h, mu, logvar) = self.encode_standardized(&xs);
        let z: Vec<f64> = mu
            .iter()
            .zip(&logvar)
            .zip(eps)
            .map(|((m, lv), e)| m + (0.5 * lv).exp() * e)
            .collect();
        let (g, xhat) = self.decode_hidden(&z);
        Ok(Pass {
            xs,
            h,
            mu,
            logvar,
            eps: eps.to_vec(),
            z,
            g,
            xhat,
        })
    }

    fn breakdown(pass: &Pass) -> LossBreakdown {
        let recon = 0.5
            * pass
                .xs
                .iter()
                .zip(&pass.xhat)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        let kl = 0.5
            * pass
                .mu
                .iter()
                .zip(&pass.logvar)
                .map(|(m, lv)| lv.exp() + m * m - 1.0 - lv)
                .sum::<f64>();
        LossBreakdown {
            total: recon + kl,
            recon,
            kl,
        }
    }

    /// Single-sample loss estimate with noise drawn from `rng`.
    pub fn loss(&self, x: &[f64], rng: &mut Rng) -> Result<LossBreakdown> {
        let eps = standard_normal(self.config.latent_dim, rng);
        self.loss_with_noise(x, &eps)
    }

    /// Loss with the reparameterization noise supplied by the caller.
    pub fn loss_with_noise(&self, x: &[f64], eps: &[f64]) -> Result<LossBreakdown> {
        Ok(Self::breakdown(&self.forward_pass(x, eps)?))
    }

    /// Loss and its gradient with respect to every parameter, for fixed noise.
    pub fn loss_and_gradient(&self, x: &[f64], eps: &[f64]) -> Result<(LossBreakdown, Layers)> {
        let (din, hd, ld) = (self.config.input_dim, self.config.hidden_dim, self.config.latent_dim);
        let mut grad = Layers::zeros(din, hd, ld);
        let loss = self.accumulate_gradient(x, eps, &mut grad)?;
        Ok((loss, grad))
    }

    pub(crate) fn accumulate_gradient(&self, x: &[f64], eps: &[f64], grad: &mut Layers) -> Result<LossBreakdown> {
        let p = self.forward_pass(x, eps)?;
        let loss = Self::breakdown(&p);
        let l = &self.layers;
        let (hd, ld) = (self.config.hidden_dim, self.config.latent_dim);

        // decoder output head
        let d_xhat: Vec<f64> = p.xhat.iter().zip(&p.xs).map(|(a, b)| a - b).collect();
        l.dec_out.accumulate(&mut grad.dec_out, &p.g, &d_xhat);
        let mut d_g = vec![0.0; hd];
        l.dec_out.backprop(&d_xhat, &mut d_g);
        let d_a2: Vec<f64> = d_g.iter().zip(&p.g).map(|(d, g)| d * (1.0 - g * g)).collect();
        l.dec_hidden.accumulate(&mut grad.dec_hidden, &p.z, &d_a2);
        let mut d_z = vec![0.0; ld];
        l.dec_hidden.backprop(&d_a2, &mut d_z);

        // z = μ + exp(lv/2)·ε, plus the KL terms
        let d_mu: Vec<f64> = d_z.iter().zip(&p.mu).map(|(dz, m)| dz + m).collect();
        let d_lv: Vec<f64> = (0..ld)
            .map(|i| {
                let sd = (0.5 * p.logvar[i]).exp();
                0.5 * d_z[i] * p.eps[i] * sd + 0.5 * (sd * sd - 1.0)
            })
            .collect();
        l.enc_mu.accumulate(&mut grad.enc_mu, &p.h, &d_mu);
        l.enc_logvar.accumulate(&mut grad.enc_logvar, &p.h, &d_lv);
        let mut d_h = vec![0.0; hd];
        l.enc_mu.backprop(&d_mu, &mut d_h);
        let mut d_h_lv = vec![0.0; hd];
        l.enc_logvar.backprop(&d_lv, &mut d_h_lv);
        let d_a1: Vec<f64> = d_h
            .iter()
            .zip(&d_h_lv)
            .zip(&p.h)
            .map(|((a, b), h)| (a + b) * (1.0 - h * h))
            .collect();
        l.enc_hidden.accumulate(&mut grad.enc_hidden, &p.xs, &d_a1);
        debug_assert_eq!(p.z.len(), ld);
        Ok(loss)
    }
}

impl VaeModel {
    /// Gradient summed over a batch of standardized rows (`n × input_dim`)
    /// with noise `eps` (`n × latent_dim`). Returns the summed loss.
    pub(crate) fn accumulate_gradient_batch(
        &self,
        xs: &[f64],
        eps: &[f64],
        n: usize,
        grad: &mut Layers,
    ) -> LossBreakdown {
        let l = &self.layers;
        let (din, hd, ld) = (self.config.input_dim, self.config.hidden_dim, self.config.latent_dim);

        let mut h = vec![0.0; n * hd];
        l.enc_hidden.forward_batch(xs, n, &mut h);
        h.iter_mut().for_each(|v| *v = v.tanh());
        let mut mu = vec![0.0; n * ld];
        l.enc_mu.forward_batch(&h, n, &mut mu);
        let mut logvar = vec![0.0; n * ld];
        l.enc_logvar.forward_batch(&h, n, &mut logvar);
        let sd: Vec<f64> = logvar.iter().map(|lv| (0.5 * lv).exp()).collect();
        let z: Vec<f64> = (0..n * ld).map(|i| mu[i] + sd[i] * eps[i]).collect();
        let mut g = vec![0.0; n * hd];
        l.dec_hidden.forward_batch(&z, n, &mut g);
        g.iter_mut().for_each(|v| *v = v.tanh());
        let mut xhat = vec![0.0; n * din];
        l.dec_out.forward_batch(&g, n, &mut xhat);

        let d_xhat: Vec<f64> = xhat.iter().zip(xs).map(|(a, b)| a - b).collect();
        let recon = 0.5 * d_xhat.iter().map(|d| d * d).sum::<f64>();
        let kl = 0.5
            * (0..n * ld)
                .map(|i| sd[i] * sd[i] + mu[i] * mu[i] - 1.0 - logvar[i])
                .sum::<f64>();

        l.dec_out.accumulate_batch(&mut grad.dec_out, &g, &d_xhat, n);
        let mut d_a2 = vec![0.0; n * hd];
        l.dec_out.backprop_batch(&d_xhat, n, &mut d_a2);
        d_a2.iter_mut().zip(&g).for_each(|(d, g)| *d *= 1.0 - g * g);
        l.dec_hidden.accumulate_batch(&mut grad.dec_hidden, &z, &d_a2, n);
        let mut d_z = vec![0.0; n * ld];
        l.dec_hidden.backprop_batch(&d_a2, n, &mut d_z);

        let d_mu: Vec<f64> = (0..n * ld).map(|i| d_z[i] + mu[i]).collect();
        let d_lv: Vec<f64> = (0..n * ld)
            .map(|i| 0.5 * d_z[i] * eps[i] * sd[i] + 0.5 * (sd[i] * sd[i] - 1.0))
            .collect();
        l.enc_mu.accumulate_batch(&mut grad.enc_mu, &h, &d_mu, n);
        l.enc_logvar.accumulate_batch(&mut grad.enc_logvar, &h, &d_lv, n);
        let mut d_a1 = vec![0.0; n * hd];
        l.enc_mu.backprop_batch(&d_mu, n, &mut d_a1);
        let mut d_h_lv = vec![0.0; n * hd];
        l.enc_logvar.backprop_batch(&d_lv, n, &mut d_h_lv);
        for ((d, e), h) in d_a1.iter_mut().zip(&d_h_lv).zip(&h) {
            *d = (*d + e) * (1.0 - h * h);
        }
        l.enc_hidden.accumulate_batch(&mut grad.enc_hidden, xs, &d_a1, n);
        LossBreakdown {
            total: recon + kl,
            recon,
            kl,
        }
    }
}

pub(crate) fn standard_normal(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn check_variance(var: &[f64]) -> Result<()> {
    match var.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(index) => Err(VaeError::NonPositiveVariance {
            index,
            value: var[index],
        }),
        None => Ok(()),
    }
}

/// `z = μ + √σ² ⊙ ε` with ε drawn from `rng`.
pub fn reparameterize(mu: &[f64], var: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
    check_variance(var)?;
    let eps = standard_normal(mu.len(), rng);
    reparameterize_with_noise(mu, var, &eps)
}

/// `z = μ + √σ² ⊙ ε` for caller-supplied ε.
pub fn reparameterize_with_noise(mu: &[f64], var: &[f64], eps: &[f64]) -> Result<Vec<f64>> {
    check_variance(var)?;
    if var.len() != mu.len() || eps.len() != mu.len() {
        return Err(VaeError::DimensionMismatch {
            expected: mu.len(),
            found: if var.len() != mu.len() { var.len() } else { eps.len() },
        });
    }
    Ok(mu
        .iter()
        .zip(var)
        .zip(eps)
        .map(|((m, v), e)| m + v.sqrt() * e)
        .collect())
}

/// Closed-form `KL(N(μ, diag σ²) ‖ N(0, I)) = ½ Σ (σ² + μ² − 1 − ln σ²)`.
pub fn kl_gaussian(mu: &[f64], var: &[f64]) -> Result<f64> {
    check_variance(var)?;
    if var.len() != mu.len() {
        return Err(VaeError::DimensionMismatch {
            expected: mu.len(),
            found: var.len(),
        });
    }
    Ok(0.5 * mu.iter().zip(var).map(|(m, v)| v + m * m - 1.0 - v.ln()).sum::<f64>())
}
