//! A small sweep over models and seeds, printed as CSV.

use lsbm::evaluation::{run_experiment, to_csv, Experiment, ExperimentModel};
use lsbm::model::build_scaled_model;
use lsbm::pipeline::ClusterConfig;
use lsbm::{ScaledModel, Scaling};

fn main() -> lsbm::Result<()> {
    let mut models = Vec::new();
    for a in [4.0, 8.0, 16.0] {
        models.push(ExperimentModel {
            id: format!("binary-a{a}"),
            params: build_scaled_model(&ScaledModel::binary(3000, 0.5, a, 1.0, Scaling::Log))?,
        });
    }
    let exp = Experiment { models, seeds: 0..4, cluster: ClusterConfig::default(), timing: false };
    print!("{}", to_csv(&run_experiment(&exp)));
    Ok(())
}
