//! Spectral partition followed by refinement, with the per-sweep error trace
//! against the planted truth.

use lsbm::divergence::{divergence, error_floor};
use lsbm::evaluation::misclassified;
use lsbm::model::build_scaled_model;
use lsbm::pipeline::{cluster, ClusterConfig};
use lsbm::sampler::sample;
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    let n = 10_000;
    let params = build_scaled_model(&ScaledModel::binary(n, 0.5, 5.0, 1.0, Scaling::Log))?;
    let d = divergence(&params)?.d_value;
    println!("nD = {:.3}, floor = {:.2}", n as f64 * d, error_floor(n, d));

    for seed in 0..3 {
        let (truth, graph) = sample(&params, SampleSeed(seed))?;
        let out = cluster(&graph, &ClusterConfig::default(), SampleSeed(seed), Some(&truth))?;
        println!(
            "seed {seed}: k_hat = {}, final errors = {}, trace = {:?}",
            out.spectral.k_hat,
            misclassified(out.partition(), &truth)?.errors,
            out.refinement.trace.as_deref().unwrap_or_default()
        );
    }
    Ok(())
}
