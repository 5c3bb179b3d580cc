//! The full clustering algorithm: spectral partition, parameter estimation,
//! then refinement sweeps.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{LabelGraph, Partition};
use crate::refinement::{estimate_params, refine, EstimatedParams, RefineConfig, Refinement};
use crate::rng::SampleSeed;
use crate::spectral::{spectral_partition, SpectralConfig, SpectralOutput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ClusterConfig {
    pub spectral: SpectralConfig,
    pub refine: RefineConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutput {
    pub spectral: SpectralOutput,
    pub estimated: EstimatedParams,
    pub refinement: Refinement,
}

impl ClusterOutput {
    pub fn partition(&self) -> &Partition {
        &self.refinement.partition
    }
}

/// Runs both stages. With `truth`, the refinement records its error trace.
pub fn cluster(graph: &LabelGraph, cfg: &ClusterConfig, seed: SampleSeed, truth: Option<&Partition>) -> Result<ClusterOutput> {
    let spectral = spectral_partition(graph, &cfg.spectral, seed)?;
    let estimated = estimate_params(graph, &spectral.initial)?;
    let refinement = refine(graph, &spectral.initial, &estimated, &cfg.refine, seed, truth)?;
    Ok(ClusterOutput { spectral, estimated, refinement })
}
