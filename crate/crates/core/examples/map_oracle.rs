//! Exhaustive MAP clustering on a tiny graph, next to the two-stage
//! algorithm run with known parameters.

use lsbm::evaluation::misclassified;
use lsbm::model::build_scaled_model;
use lsbm::oracle::map_oracle;
use lsbm::refinement::{refine, EstimatedParams, RefineConfig};
use lsbm::sampler::sample;
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    let params = build_scaled_model(&ScaledModel::planted(12, 2, 8.0, 1.0, Scaling::Constant))?;
    for seed in 0..5 {
        let (truth, graph) = sample(&params, SampleSeed(seed))?;
        let map = map_oracle(&graph, &params)?;
        // One refinement pass from the truth with the true parameters.
        let est = EstimatedParams::from_model(&params);
        let cfg = RefineConfig { sweeps: Some(1), re_estimate: false };
        let step = refine(&graph, &truth, &est, &cfg, SampleSeed(seed), None)?;
        println!(
            "seed {seed}: MAP errors = {}, ties = {}, one-sweep errors = {}",
            misclassified(&map.partition, &truth)?.errors,
            map.ties,
            misclassified(&step.partition, &truth)?.errors
        );
    }
    Ok(())
}
