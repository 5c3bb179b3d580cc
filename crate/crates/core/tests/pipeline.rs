mod common;

use lsbm::evaluation::{h_set, misclassified, run_experiment, to_csv, Experiment, ExperimentModel};
use lsbm::pipeline::{cluster, ClusterConfig};
use lsbm::refinement::RefineConfig;
use lsbm::sampler::sample;
use lsbm::{ModelParams, Partition, SampleSeed};

use common::{binary_log, planted_log};

#[test]
fn strong_signal_is_recovered_exactly() {
    let params = planted_log(3000, 3, 20.0, 1.0);
    for seed in 0..3 {
        let (truth, g) = sample(&params, SampleSeed(seed)).unwrap();
        let out = cluster(&g, &ClusterConfig::default(), SampleSeed(seed), Some(&truth)).unwrap();
        assert_eq!(misclassified(out.partition(), &truth).unwrap().errors, 0);
        let trace = out.refinement.trace.unwrap();
        assert_eq!(trace.len(), out.refinement.sweeps + 1);
        assert_eq!(out.refinement.sweeps, (3000f64).ln().floor() as usize);
    }
}

#[test]
fn perfect_clusters_are_a_fixed_point() {
    let params = binary_log(2000, 30.0, 1.0);
    let (truth, g) = sample(&params, SampleSeed(5)).unwrap();
    let est = lsbm::refinement::EstimatedParams::from_model(&params);
    let r = lsbm::refinement::refine(&g, &truth, &est, &RefineConfig::default(), SampleSeed(5), Some(&truth)).unwrap();
    assert_eq!(r.partition, truth);
    assert!(r.trace.unwrap().iter().all(|&e| e == 0));
}

#[test]
fn re_estimation_option_runs() {
    let params = binary_log(2000, 8.0, 1.0);
    let (truth, g) = sample(&params, SampleSeed(2)).unwrap();
    let cfg = ClusterConfig { refine: RefineConfig { sweeps: Some(3), re_estimate: true }, ..ClusterConfig::default() };
    let out = cluster(&g, &cfg, SampleSeed(2), Some(&truth)).unwrap();
    assert_eq!(out.refinement.sweeps, 3);
    assert!(misclassified(out.partition(), &truth).unwrap().errors <= 20);
}

#[test]
fn experiment_rows_and_order() {
    let models = vec![
        ExperimentModel { id: "a".into(), params: binary_log(800, 12.0, 1.0) },
        ExperimentModel { id: "b".into(), params: planted_log(900, 3, 14.0, 1.0) },
    ];
    let exp = Experiment { models, seeds: 3..6, cluster: ClusterConfig::default(), timing: false };
    let records = run_experiment(&exp);
    assert_eq!(records.len(), 6);
    let keys: Vec<(String, u64)> = records.iter().map(|r| (r.model_id.clone(), r.seed)).collect();
    assert_eq!(keys[0], ("a".into(), 3));
    assert_eq!(keys[5], ("b".into(), 5));
    let csv = to_csv(&records);
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 11));
    assert_eq!(csv, to_csv(&run_experiment(&exp)));
}

#[test]
fn failed_runs_are_reported_not_raised() {
    // an empty graph gives n p_tilde = 0, so the spectral threshold is undefined
    let params = ModelParams::new(50, vec![0.5, 0.5], vec![vec![vec![1.0, 0.0]; 2]; 2]).unwrap();
    let exp = Experiment {
        models: vec![ExperimentModel { id: "empty".into(), params }],
        seeds: 0..2,
        cluster: ClusterConfig::default(),
        timing: false,
    };
    let records = run_experiment(&exp);
    assert!(records.iter().all(|r| r.status != "ok" && r.errors_final.is_none()));
}

#[test]
fn h_set_desk_check() {
    // Strong separation: every item satisfies the conditions.
    let params = binary_log(4000, 12.0, 1.0);
    let (truth, g) = sample(&params, SampleSeed(1)).unwrap();
    let h = h_set(&g, &truth, &params).unwrap();
    assert_eq!(h.outside, 0);
    assert!(h.in_h.iter().all(|&x| x));

    // Near the threshold some items fail the likelihood margin, and every
    // item outside H1 or H2 is outside H.
    let params = binary_log(4000, 3.0, 1.0);
    let (truth, g) = sample(&params, SampleSeed(1)).unwrap();
    let h = h_set(&g, &truth, &params).unwrap();
    assert!(h.outside > 0);
    for v in 0..g.n() {
        if !(h.h1[v] && h.h2[v]) {
            assert!(!h.in_h[v]);
        }
    }
    assert_eq!(h.in_h.iter().filter(|&&x| !x).count(), h.outside);
}

#[test]
fn trimmed_items_get_a_cluster() {
    let params = binary_log(3000, 10.0, 1.0);
    let (truth, g) = sample(&params, SampleSeed(9)).unwrap();
    let out = cluster(&g, &ClusterConfig::default(), SampleSeed(9), Some(&truth)).unwrap();
    let sp = &out.spectral;
    assert_eq!(sp.gamma.len() + sp.trimmed.len(), g.n());
    for &v in &sp.trimmed {
        assert!(sp.clusters[v].is_none());
        assert!(sp.initial.cluster_of(v) < sp.k_hat);
    }
    let _: &Partition = out.partition();
}
