use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::{standard_normal, Layers, Result, Standardization, VaeConfig, VaeError, VaeModel};
use crate::dataset::FeatureTable;
use crate::rng::Rng;

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64, shapes: &[usize]) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
    }
}

/// Mean per-example loss components for every epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingHistory {
    pub total: Vec<f64>,
    pub recon: Vec<f64>,
    pub kl: Vec<f64>,
}

impl TrainingHistory {
    pub fn first(&self) -> Option<f64> {
        self.total.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.total.last().copied()
    }

    /// Mean total loss over the first `n` epochs.
    pub fn head_mean(&self, n: usize) -> f64 {
        let n = n.min(self.total.len()).max(1);
        self.total[..n].iter().sum::<f64>() / n as f64
    }

    /// Mean total loss over the last `n` epochs.
    pub fn tail_mean(&self, n: usize) -> f64 {
        let n = n.min(self.total.len()).max(1);
        self.total[self.total.len() - n..].iter().sum::<f64>() / n as f64
    }
}

/// Trains on every instance of `features`. Standardization statistics come
/// from the same instances.
pub fn train(features: &FeatureTable, cfg: &VaeConfig) -> Result<(VaeModel, TrainingHistory)> {
    if features.dim() != cfg.input_dim {
        return Err(VaeError::DimensionMismatch {
            expected: cfg.input_dim,
            found: features.dim(),
        });
    }
    let rows: Vec<&[f64]> = features.instances().iter().map(|i| i.x.as_slice()).collect();
    train_rows(&rows, cfg)
}

/// Minibatch Adam on the mean per-batch loss. Deterministic given `cfg.seed`.
pub fn train_rows(rows: &[&[f64]], cfg: &VaeConfig) -> Result<(VaeModel, TrainingHistory)> {
    cfg.validate()?;
    if rows.is_empty() {
        return Err(VaeError::EmptyTrainingSet);
    }
    for r in rows {
        if r.len() != cfg.input_dim {
            return Err(VaeError::DimensionMismatch {
                expected: cfg.input_dim,
                found: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(VaeError::NonFiniteInput);
        }
    }

    let mut rng = Rng::seed_from_u64(cfg.seed);
    let standardization = if cfg.standardize {
        Standardization::fit(rows, cfg.input_dim)
    } else {
        Standardization::identity(cfg.input_dim)
    };
    let mut model = VaeModel::init(cfg.clone(), standardization, &mut rng)?;
    let shapes: Vec<usize> = model.layers.tensors().iter().map(|t| t.len()).collect();
    let mut adam = Adam::new(cfg.learning_rate, &shapes);
    let mut grad = Layers::zeros(cfg.input_dim, cfg.hidden_dim, cfg.latent_dim);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut history = TrainingHistory::default();
    let standardized: Vec<Vec<f64>> = rows.iter().map(|r| model.standardization.apply(r)).collect();
    let mut xs = Vec::with_capacity(cfg.batch_size * cfg.input_dim);
    let mut eps = Vec::with_capacity(cfg.batch_size * cfg.latent_dim);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let (mut sum_total, mut sum_recon, mut sum_kl) = (0.0, 0.0, 0.0);
        for (batch_idx, batch) in order.chunks(cfg.batch_size).enumerate() {
            grad.scale(0.0);
            xs.clear();
            eps.clear();
            for &i in batch {
                xs.extend_from_slice(&standardized[i]);
                eps.extend(standard_normal(cfg.latent_dim, &mut rng));
            }
            let l = model.accumulate_gradient_batch(&xs, &eps, batch.len(), &mut grad);
            if !l.total.is_finite() {
                return Err(VaeError::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                    detail: format!("recon={} kl={}", l.recon, l.kl),
                });
            }
            sum_total += l.total;
            sum_recon += l.recon;
            sum_kl += l.kl;
            grad.scale(1.0 / batch.len() as f64);
            {
                let grads = grad.tensors();
                let mut params = model.layers.tensors_mut();
                adam.step(&mut params, &grads);
            }
            if !model.layers.is_finite() {
                return Err(VaeError::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                    detail: "weights became non-finite after the update".into(),
                });
            }
        }
        let n = rows.len() as f64;
        history.total.push(sum_total / n);
        history.recon.push(sum_recon / n);
        history.kl.push(sum_kl / n);
        log::trace!("vae epoch {epoch}: loss {:.6}", sum_total / n);
    }
    log::debug!(
        "vae trained on {} rows: loss {:.4} -> {:.4}",
        rows.len(),
        history.first().unwrap_or(f64::NAN),
        history.last().unwrap_or(f64::NAN)
    );
    Ok((model, history))
}
