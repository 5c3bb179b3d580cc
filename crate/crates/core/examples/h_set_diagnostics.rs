//! Items that satisfy the degree, likelihood-margin and outside-connectivity
//! conditions used in the analysis of the refinement step.

use lsbm::evaluation::h_set;
use lsbm::model::build_scaled_model;
use lsbm::sampler::sample;
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    for a in [3.0, 6.0, 12.0] {
        let params = build_scaled_model(&ScaledModel::binary(5000, 0.5, a, 1.0, Scaling::Log))?;
        let (truth, graph) = sample(&params, SampleSeed(1))?;
        let h = h_set(&graph, &truth, &params)?;
        let count = |v: &[bool]| v.iter().filter(|&&x| !x).count();
        println!(
            "a = {a:>4}: fail H1 = {:>4}, fail H2 = {:>4}, outside H = {:>4}",
            count(&h.h1),
            count(&h.h2),
            h.outside
        );
    }
    Ok(())
}
