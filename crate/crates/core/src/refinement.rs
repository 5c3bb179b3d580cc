//! Likelihood refinement of a provisional partition.
//!
//! Parameters are estimated once from the provisional clusters, then every
//! item is moved to the cluster maximizing its log-likelihood given the
//! other items' current clusters. Sweeps are synchronous: all items are
//! scored against the partition of the previous sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::misclassified;
use crate::graph::{LabelGraph, Partition};
use crate::model::ModelParams;
use crate::rng::{SampleSeed, Stream};

const TIE_TOL: f64 = 1e-12;

/// Label probabilities between estimated clusters, `K x K x (L+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedParams {
    k_hat: usize,
    labels: usize,
    p: Vec<f64>,
    log_p: Vec<f64>,
    sizes: Vec<usize>,
}

impl EstimatedParams {
    /// Wraps explicit probabilities indexed `[k][i][label]`.
    pub fn new(p: Vec<Vec<Vec<f64>>>, sizes: Vec<usize>) -> Result<Self> {
        let k_hat = p.len();
        if k_hat == 0 || p.iter().any(|r| r.len() != k_hat) {
            return Err(Error::DegenerateModel("estimated parameters must be square".into()));
        }
        let width = p[0][0].len();
        if width == 0 || p.iter().flatten().any(|row| row.len() != width) {
            return Err(Error::DegenerateModel("label dimension must be uniform".into()));
        }
        let flat: Vec<f64> = p.into_iter().flatten().flatten().collect();
        let log_p = flat.iter().map(|x| x.ln()).collect();
        Ok(Self { k_hat, labels: width - 1, p: flat, log_p, sizes })
    }

    /// The true parameters, in the user's cluster numbering.
    pub fn from_model(params: &ModelParams) -> Self {
        let k = params.k();
        let internal: Vec<usize> = (0..k).map(|u| params.internal_index(u).expect("user index in range")).collect();
        let p = (0..k)
            .map(|a| (0..k).map(|b| params.row(internal[a], internal[b]).to_vec()).collect())
            .collect();
        Self::new(p, Vec::new()).expect("model parameters are well formed")
    }

    pub fn k_hat(&self) -> usize {
        self.k_hat
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    fn at(&self, k: usize, i: usize, l: usize) -> usize {
        (k * self.k_hat + i) * (self.labels + 1) + l
    }

    pub fn p(&self, k: usize, i: usize, l: usize) -> f64 {
        self.p[self.at(k, i, l)]
    }

    pub fn log_p(&self, k: usize, i: usize, l: usize) -> f64 {
        self.log_p[self.at(k, i, l)]
    }

    /// Cluster sizes used for the estimate (empty when built from a model).
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Nested copy indexed `[k][i][label]`.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.k_hat)
            .map(|k| (0..self.k_hat).map(|i| (0..=self.labels).map(|l| self.p(k, i, l)).collect()).collect())
            .collect()
    }
}

/// Empirical label frequencies between clusters. Non-zero labels are floored
/// at `1/n^2`, label 0 takes the complement, and each row is renormalized.
pub fn estimate_params(graph: &LabelGraph, clusters: &Partition) -> Result<EstimatedParams> {
    let n = graph.n();
    if clusters.n() != n {
        return Err(Error::SizeMismatch(clusters.n(), n));
    }
    let k = clusters.k_hat();
    let sizes = clusters.sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    let labels = graph.labels();
    let mut counts = vec![vec![vec![0usize; labels + 1]; k]; k];
    for (u, v, l) in graph.iter_edges() {
        let (a, b) = (clusters.cluster_of(u), clusters.cluster_of(v));
        counts[a][b][l] += 1;
        if a != b {
            counts[b][a][l] += 1;
        }
    }
    let floor = 1.0 / (n as f64 * n as f64);
    let mut p = vec![vec![Vec::new(); k]; k];
    for a in 0..k {
        for b in 0..k {
            let pairs = if a == b {
                sizes[a] as f64 * (sizes[a] as f64 - 1.0) / 2.0
            } else {
                sizes[a] as f64 * sizes[b] as f64
            };
            let mut row = vec![0.0; labels + 1];
            for l in 1..=labels {
                let raw = if pairs > 0.0 { counts[a][b][l] as f64 / pairs } else { 0.0 };
                row[l] = raw.max(floor);
            }
            let rest: f64 = row[1..].iter().sum();
            row[0] = (1.0 - rest).max(floor);
            let total: f64 = row.iter().sum();
            for x in &mut row {
                *x /= total;
            }
            p[a][b] = row;
        }
    }
    EstimatedParams::new(p, sizes)
}

/// `score[v][k] = sum_i |S_i \ {v}| log p(k,i,0)
///   + sum over labeled pairs (v,w) of log p(k,c(w),l) - log p(k,c(w),0)`.
pub fn scores(graph: &LabelGraph, partition: &Partition, est: &EstimatedParams) -> Vec<Vec<f64>> {
    let ctx = Scorer::new(partition, est);
    (0..graph.n()).into_par_iter().map(|v| ctx.item(graph, partition, v)).collect()
}

struct Scorer<'a> {
    est: &'a EstimatedParams,
    base: Vec<f64>,
}

impl<'a> Scorer<'a> {
    fn new(partition: &Partition, est: &'a EstimatedParams) -> Self {
        let k = est.k_hat();
        let mut sizes = partition.sizes();
        sizes.resize(k, 0);
        let base = (0..k)
            .map(|c| (0..k).map(|i| sizes[i] as f64 * est.log_p(c, i, 0)).sum())
            .collect();
        Self { est, base }
    }

    fn item(&self, graph: &LabelGraph, partition: &Partition, v: usize) -> Vec<f64> {
        let own = partition.cluster_of(v);
        let k = self.est.k_hat();
        let mut out: Vec<f64> = (0..k).map(|c| self.base[c] - self.est.log_p(c, own, 0)).collect();
        for &(w, l) in graph.neighbors(v) {
            let i = partition.cluster_of(w as usize);
            for (c, slot) in out.iter_mut().enumerate() {
                *slot += self.est.log_p(c, i, l as usize) - self.est.log_p(c, i, 0);
            }
        }
        out
    }
}

fn choose(row: &[f64], seed: SampleSeed, key: u64) -> usize {
    let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slack = if best.is_finite() { TIE_TOL * best.abs().max(1.0) } else { 0.0 };
    let tied: Vec<usize> = (0..row.len()).filter(|&c| row[c] >= best - slack || row[c] == best).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    let u = seed.unit(Stream::Ties, key);
    tied[((u * tied.len() as f64) as usize).min(tied.len() - 1)]
}

/// One synchronous sweep. Ties are broken uniformly with a stream keyed by
/// `(sweep, item)`.
pub fn improve_once(
    graph: &LabelGraph,
    partition: &Partition,
    est: &EstimatedParams,
    seed: SampleSeed,
    sweep: u64,
) -> Result<Partition> {
    if partition.n() != graph.n() {
        return Err(Error::SizeMismatch(partition.n(), graph.n()));
    }
    if partition.k_hat() > est.k_hat() {
        return Err(Error::InvalidPartition(format!(
            "partition uses {} clusters, estimates cover {}",
            partition.k_hat(),
            est.k_hat()
        )));
    }
    let ctx = Scorer::new(partition, est);
    let n = graph.n() as u64;
    let next: Vec<usize> = (0..graph.n())
        .into_par_iter()
        .map(|v| choose(&ctx.item(graph, partition, v), seed, sweep * n + v as u64))
        .collect();
    Partition::new(next, est.k_hat())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RefineConfig {
    /// Number of sweeps; `None` means `floor(ln n)`.
    pub sweeps: Option<usize>,
    /// Re-estimate parameters after every sweep.
    pub re_estimate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub partition: Partition,
    pub sweeps: usize,
    /// Errors against the supplied truth before the first sweep and after
    /// each sweep.
    pub trace: Option<Vec<usize>>,
}

/// Applies `floor(ln n)` sweeps (or the configured count).
pub fn refine(
    graph: &LabelGraph,
    initial: &Partition,
    est: &EstimatedParams,
    cfg: &RefineConfig,
    seed: SampleSeed,
    truth: Option<&Partition>,
) -> Result<Refinement> {
    let sweeps = cfg.sweeps.unwrap_or_else(|| (graph.n() as f64).ln().floor().max(0.0) as usize);
    let mut trace = match truth {
        Some(t) => Some(vec![misclassified(initial, t)?.errors]),
        None => None,
    };
    let mut current = initial.clone();
    let mut est = est.clone();
    for t in 0..sweeps {
        current = improve_once(graph, &current, &est, seed, t as u64)?;
        if let (Some(tr), Some(truth)) = (trace.as_mut(), truth) {
            tr.push(misclassified(&current, truth)?.errors);
        }
        if cfg.re_estimate {
            if let Ok(next) = estimate_params(graph, &current) {
                est = next;
            }
        }
    }
    Ok(Refinement { partition: current, sweeps, trace })
}
