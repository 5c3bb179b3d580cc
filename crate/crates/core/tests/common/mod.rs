//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use lsbm::model::build_scaled_model;
use lsbm::{ModelParams, Partition, ScaledModel, Scaling};
use rand::{Rng, RngExt};

/// Random symmetric connectivity with non-zero-label entries log-uniform in
/// `[lo, hi]` and weights drawn from `[0.5, 1.5]` then normalized.
pub fn random_model(rng: &mut impl Rng, n: usize, k: usize, labels: usize, lo: f64, hi: f64) -> ModelParams {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let alpha = raw.iter().map(|a| a / total).collect();
    let mut p = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in i..k {
            let mut row: Vec<f64> = (0..labels).map(|_| (rng.random_range(lo.ln()..hi.ln())).exp()).collect();
            row.insert(0, 1.0 - row.iter().sum::<f64>());
            p[i][j] = row.clone();
            p[j][i] = row;
        }
    }
    ModelParams::new(n, alpha, p).expect("random model is valid")
}

/// Random assignment of `n` items to `k` clusters, every cluster non-empty.
pub fn random_partition(rng: &mut impl Rng, n: usize, k: usize) -> Partition {
    assert!(n >= k);
    let mut a: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.random_range(0..k) }).collect();
    for v in (1..n).rev() {
        a.swap(v, rng.random_range(0..=v));
    }
    Partition::new(a, k).unwrap()
}

/// Balanced binary model `a ln(n)/n` inside clusters, `b ln(n)/n` across.
pub fn binary_log(n: usize, a: f64, b: f64) -> ModelParams {
    build_scaled_model(&ScaledModel::binary(n, 0.5, a, b, Scaling::Log)).unwrap()
}

pub fn planted_log(n: usize, k: usize, a: f64, b: f64) -> ModelParams {
    build_scaled_model(&ScaledModel::planted(n, k, a, b, Scaling::Log)).unwrap()
}
