//! Labeled stochastic block models: sampling, the divergence that governs
//! the optimal misclassification rate, and a two-stage clustering algorithm
//! (spectral partition followed by likelihood-based refinement).

pub mod cli;
pub mod divergence;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod refinement;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{LabelGraph, Partition};
pub use model::{ModelParams, ScaledModel, Scaling};
pub use rng::SampleSeed;
