pub mod classifier;
pub mod dataset;
pub mod evaluate;
pub mod negatives;
pub mod rng;
pub mod synth;
pub mod vae;
