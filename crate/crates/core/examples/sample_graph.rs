//! Sample a three-cluster labeled graph and compare label counts with their
//! expectations.
//!
//! ```text
//! cargo run --release --example sample_graph
//! ```

use lsbm::model::build_scaled_model;
use lsbm::sampler::{expected_label_counts, sample};
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    // Two labels: label 1 inside clusters is frequent, label 2 marks rare
    // cross-cluster links.
    let spec = ScaledModel {
        n: 3000,
        alpha: vec![0.5, 0.3, 0.2],
        constants: (0..3)
            .map(|i| (0..3).map(|j| if i == j { vec![6.0, 0.5] } else { vec![0.5, 1.5] }).collect())
            .collect(),
        scaling: Scaling::Log,
    };
    let params = build_scaled_model(&spec)?;
    let (truth, graph) = sample(&params, SampleSeed(7))?;

    println!("n = {}, cluster sizes = {:?}", graph.n(), truth.sizes());
    println!("labeled pairs: {}", graph.edge_count());

    let expected = expected_label_counts(&params);
    let mut observed = vec![vec![vec![0usize; params.labels() + 1]; 3]; 3];
    for (u, v, l) in graph.iter_edges() {
        let (a, b) = (truth.cluster_of(u), truth.cluster_of(v));
        let (a, b) = (a.min(b), a.max(b));
        observed[a][b][l] += 1;
    }
    println!("block  label  observed  expected");
    for i in 0..3 {
        for j in i..3 {
            for l in 1..=params.labels() {
                println!("({i},{j})  {l:>5}  {:>8}  {:>8.1}", observed[i][j][l], expected[i][j][l - 1]);
            }
        }
    }
    Ok(())
}
