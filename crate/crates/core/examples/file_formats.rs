//! Write a sampled graph and partition to disk and read them back.

use lsbm::io;
use lsbm::model::build_scaled_model;
use lsbm::sampler::sample;
use lsbm::{ScaledModel, Scaling, SampleSeed};

fn main() -> lsbm::Result<()> {
    let params = build_scaled_model(&ScaledModel::signed(200, 6.0, 1.0, 1.0, 4.0, Scaling::Log))?;
    let (truth, graph) = sample(&params, SampleSeed(5))?;

    let dir = std::env::temp_dir().join(format!("lsbm-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let (gp, tp, mp) = (dir.join("g.graph.tsv"), dir.join("g.truth.tsv"), dir.join("model.json"));
    io::write_atomic(&gp, io::format_graph(&graph).as_bytes())?;
    io::write_atomic(&tp, io::format_partition(&truth).as_bytes())?;
    io::write_atomic(&mp, io::format_model(&params)?.as_bytes())?;

    assert_eq!(io::read_graph(&gp)?, graph);
    assert_eq!(io::read_partition(&tp)?, truth);
    println!("round trip ok: {} labeled pairs in {}", graph.edge_count(), dir.display());
    println!("{}", io::format_graph(&graph).lines().take(4).collect::<Vec<_>>().join("\n"));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
