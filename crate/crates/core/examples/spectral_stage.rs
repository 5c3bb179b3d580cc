//! The spectral stage on its own: density estimate, trimming, singular
//! values above the threshold, and the initial clusters.

use lsbm::evaluation::misclassified;
use lsbm::model::build_scaled_model;
use lsbm::sampler::sample;
use lsbm::spectral::{spectral_partition, SpectralConfig};
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    let params = build_scaled_model(&ScaledModel::planted(4000, 3, 12.0, 2.0, Scaling::Log))?;
    let seed = SampleSeed(11);
    let (truth, graph) = sample(&params, seed)?;

    let out = spectral_partition(&graph, &SpectralConfig::default(), seed)?;
    println!("p_tilde = {:.4e}, trimmed = {}", out.p_tilde, out.trimmed.len());
    println!("label weights = {:?}", out.weights);
    println!("threshold = {:.2}", out.threshold);
    println!("accepted singular values = {:?}", out.sigmas.iter().map(|s| format!("{s:.2}")).collect::<Vec<_>>());
    println!("k_tilde = {}, k_hat = {}", out.k_tilde, out.k_hat);
    println!("initial errors = {}", misclassified(&out.initial, &truth)?.errors);
    Ok(())
}
