//! Spectral partition: density estimate, random label weights, trimming,
//! power iteration with singular-value thresholding, and clustering of the
//! rank-reduced columns around reference items.

mod sparse;

pub use sparse::SymCsr;

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabelGraph, Partition};
use crate::rng::{SampleSeed, Stream};

/// When reference balls are large enough to become clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ClusterSizeRule {
    /// Extract at most `k_tilde` clusters, each at least
    /// `min(log(n p)^4 / p, min_fraction * |Gamma| / k_tilde)` items.
    Adaptive { min_fraction: f64 },
    /// Keep extracting while balls hold at least `log(n p)^4 / p` items.
    /// This bound only becomes smaller than `n` for very large `n`.
    Asymptotic,
}

impl Default for ClusterSizeRule {
    fn default() -> Self {
        ClusterSizeRule::Adaptive { min_fraction: 0.1 }
    }
}

/// How reference items are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceDraw {
    /// `ceil(ln n)` fresh references among the still unassigned items before
    /// every extraction.
    #[default]
    PerRound,
    /// A single draw of `ceil(ln n)` references used for every extraction.
    Once,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// The power method applies the matrix `ceil(factor * ln n)` times.
    pub power_iterations_factor: f64,
    /// Scales the acceptance threshold `sqrt(n p) ln(n p)`.
    pub threshold_multiplier: f64,
    /// Largest rank explored; `None` means `ceil(sqrt(n))`.
    pub max_rank_cap: Option<usize>,
    pub cluster_size_rule: ClusterSizeRule,
    pub reference_draw: ReferenceDraw,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            power_iterations_factor: 2.0,
            threshold_multiplier: 1.0,
            max_rank_cap: None,
            cluster_size_rule: ClusterSizeRule::default(),
            reference_draw: ReferenceDraw::default(),
        }
    }
}

/// `p_tilde = 2m / (n(n-1))` with `m` the number of labeled pairs.
pub fn estimate_density(graph: &LabelGraph) -> f64 {
    let n = graph.n() as f64;
    if graph.n() < 2 {
        return 0.0;
    }
    2.0 * graph.edge_count() as f64 / (n * (n - 1.0))
}

/// Label weights drawn uniformly on `[0, 1]` and rescaled so the largest is 1.
pub fn draw_weights(labels: usize, seed: SampleSeed) -> Vec<f64> {
    let mut rng = seed.rng(Stream::Weights, 0);
    let mut w: Vec<f64> = (0..labels).map(|_| rng.random::<f64>()).collect();
    let top = w.iter().cloned().fold(0.0, f64::max);
    if top > 0.0 {
        for x in &mut w {
            *x /= top;
        }
    }
    w
}

/// `A = sum_l w_l A^l`.
pub fn aggregate(graph: &LabelGraph, weights: &[f64]) -> SymCsr {
    SymCsr::from_pairs(graph.n(), graph.iter_edges().map(|(u, v, l)| (u, v, weights[l - 1])))
}

/// `floor(n exp(-n p_tilde))`, at most `n`.
pub fn trim_count(n: usize, p_tilde: f64) -> usize {
    let x = n as f64 * (-(n as f64) * p_tilde).exp();
    (x.floor() as usize).min(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trimmed {
    /// Retained items, sorted.
    pub kept: Vec<usize>,
    /// Removed items, sorted.
    pub removed: Vec<usize>,
    /// Principal submatrix on `kept`.
    pub matrix: SymCsr,
}

/// Removes the `floor(n exp(-n p_tilde))` items with most labeled pairs.
/// Among equal degrees the larger index goes first.
pub fn trim(a: &SymCsr, graph: &LabelGraph, p_tilde: f64) -> Trimmed {
    let n = graph.n();
    let count = trim_count(n, p_tilde);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| graph.degree(y).cmp(&graph.degree(x)).then(y.cmp(&x)));
    let mut removed = order[..count].to_vec();
    removed.sort_unstable();
    let mut drop = vec![false; n];
    for &v in &removed {
        drop[v] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&v| !drop[v]).collect();
    let matrix = a.principal(&kept);
    Trimmed { kept, removed, matrix }
}

/// Output of the thresholded power method.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSvd {
    /// Accepted orthonormal directions.
    pub u: Vec<Vec<f64>>,
    /// `A u_k` for each accepted direction; column `v` of `U^T A` is
    /// `(au[0][v], .., au[k-1][v])`.
    pub au: Vec<Vec<f64>>,
    /// `||A u_k||` for accepted directions.
    pub sigmas: Vec<f64>,
    /// Estimate of the first rejected direction, if one was tried.
    pub rejected: Option<f64>,
    pub threshold: f64,
    pub rank_cap_reached: bool,
}

impl PowerSvd {
    pub fn k_tilde(&self) -> usize {
        self.u.len()
    }

    /// Row `v` of the embedding `(U^T A)^T`.
    pub fn embedding(&self, v: usize) -> Vec<f64> {
        self.au.iter().map(|col| col[v]).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

fn project_out(x: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of Gram-Schmidt keep orthogonality near machine precision
    for _ in 0..2 {
        for b in basis {
            let c = dot(x, b);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
}

/// Power method with deflation. Directions are accepted while
/// `||A u|| >= multiplier * sqrt(n p) ln(n p)`, where `n` is the size of the
/// full item set.
pub fn power_svd(a: &SymCsr, n: usize, p_tilde: f64, cfg: &SpectralConfig, seed: SampleSeed) -> Result<PowerSvd> {
    let np = n as f64 * p_tilde;
    if !(np > 1.0) {
        return Err(Error::ThresholdUndefined(np));
    }
    let threshold = cfg.threshold_multiplier * np.sqrt() * np.ln();
    let iterations = (cfg.power_iterations_factor * (n as f64).ln()).ceil().max(1.0) as usize;
    let m = a.n();
    let cap = cfg.max_rank_cap.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize).min(m);

    let mut out = PowerSvd { u: Vec::new(), au: Vec::new(), sigmas: Vec::new(), rejected: None, threshold, rank_cap_reached: false };
    let mut y = vec![0.0; m];
    loop {
        if out.u.len() >= cap {
            out.rank_cap_reached = true;
            break;
        }
        let mut rng = seed.rng(Stream::PowerStarts, out.u.len() as u64);
        let mut x: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        project_out(&mut x, &out.u);
        let mut alive = normalize(&mut x) > 0.0;
        for _ in 0..iterations {
            if !alive {
                break;
            }
            a.matvec(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            project_out(&mut x, &out.u);
            alive = normalize(&mut x) > 0.0;
        }
        let mut ax = vec![0.0; m];
        let chi = if alive {
            a.matvec(&x, &mut ax);
            dot(&ax, &ax).sqrt()
        } else {
            0.0
        };
        if chi >= threshold && alive {
            out.u.push(x);
            out.au.push(ax);
            out.sigmas.push(chi);
        } else {
            out.rejected = Some(chi);
            break;
        }
    }
    Ok(out)
}

/// Clusters found around reference items, indexed by position in the
/// trimmed item set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceClusters {
    pub assignment: Vec<usize>,
    pub k_hat: usize,
    /// Position of the reference defining each cluster.
    pub centers: Vec<usize>,
    /// Members captured by each ball before leftovers were assigned.
    pub ball_sizes: Vec<usize>,
    /// Every sampled reference position, in draw order.
    pub sampled: Vec<usize>,
    pub radius_sq: f64,
    pub min_size: f64,
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[&[f64]]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (k, c) in centers.iter().enumerate() {
        let d = dist_sq(point, c);
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

/// Greedy ball extraction around `ceil(ln n)` random reference points of
/// `points`, followed by nearest-reference assignment of the rest.
pub fn reference_cluster(
    points: &[Vec<f64>],
    n: usize,
    p_tilde: f64,
    k_tilde: usize,
    cfg: &SpectralConfig,
    seed: SampleSeed,
) -> Result<ReferenceClusters> {
    let m = points.len();
    let np = n as f64 * p_tilde;
    let draws = (n as f64).ln().ceil().max(1.0) as usize;

    let radius_sq = n as f64 * p_tilde * p_tilde / np.ln();
    let literal = np.ln().powi(4) / p_tilde;
    let (min_size, max_clusters) = match cfg.cluster_size_rule {
        ClusterSizeRule::Adaptive { min_fraction } => {
            (literal.min(min_fraction * m as f64 / k_tilde.max(1) as f64), k_tilde.max(1))
        }
        ClusterSizeRule::Asymptotic => (literal, usize::MAX),
    };

    const FREE: usize = usize::MAX;
    let mut assignment = vec![FREE; m];
    let mut centers = Vec::new();
    let mut ball_sizes = Vec::new();
    let mut sampled = Vec::new();
    let mut candidates: Vec<usize> = Vec::new();
    while centers.len() < max_clusters {
        let round = centers.len();
        if round == 0 || cfg.reference_draw == ReferenceDraw::PerRound {
            let pool: Vec<usize> = (0..m).filter(|&v| assignment[v] == FREE).collect();
            if pool.is_empty() {
                break;
            }
            let mut rng = seed.rng(Stream::References, round as u64);
            candidates = rand::seq::index::sample(&mut rng, pool.len(), draws.min(pool.len()))
                .into_iter()
                .map(|i| pool[i])
                .collect();
            sampled.extend_from_slice(&candidates);
        }
        let mut best = (0usize, 0usize);
        for &r in &candidates {
            let free = (0..m)
                .filter(|&v| assignment[v] == FREE && dist_sq(&points[v], &points[r]) <= radius_sq)
                .count();
            if free > best.0 {
                best = (free, r);
            }
        }
        let (size, r) = best;
        if size == 0 || (size as f64) < min_size {
            break;
        }
        let k = centers.len();
        for v in 0..m {
            if assignment[v] == FREE && dist_sq(&points[v], &points[r]) <= radius_sq {
                assignment[v] = k;
            }
        }
        centers.push(r);
        ball_sizes.push(size);
    }
    if centers.is_empty() {
        return Err(Error::NoClusters);
    }

    let center_points: Vec<&[f64]> = centers.iter().map(|&c| points[c].as_slice()).collect();
    for v in 0..m {
        if assignment[v] == FREE {
            assignment[v] = nearest(&points[v], &center_points);
        }
    }
    Ok(ReferenceClusters { k_hat: centers.len(), assignment, centers, ball_sizes, sampled, radius_sq, min_size })
}

/// Everything produced by the spectral stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOutput {
    pub p_tilde: f64,
    pub weights: Vec<f64>,
    /// Items kept after trimming, sorted.
    pub gamma: Vec<usize>,
    pub trimmed: Vec<usize>,
    pub k_tilde: usize,
    pub sigmas: Vec<f64>,
    pub threshold: f64,
    pub rank_cap_reached: bool,
    pub k_hat: usize,
    /// Reference item of each cluster.
    pub references: Vec<usize>,
    /// Cluster of each item of the full set; `None` for trimmed items.
    pub clusters: Vec<Option<usize>>,
    /// Clusters with trimmed items attached to their nearest reference.
    pub initial: Partition,
}

/// Runs the spectral stage on `graph`.
pub fn spectral_partition(graph: &LabelGraph, cfg: &SpectralConfig, seed: SampleSeed) -> Result<SpectralOutput> {
    let n = graph.n();
    let p_tilde = estimate_density(graph);
    let weights = draw_weights(graph.labels(), seed);
    let a = aggregate(graph, &weights);
    let trimmed = trim(&a, graph, p_tilde);
    let svd = power_svd(&trimmed.matrix, n, p_tilde, cfg, seed)?;
    let points: Vec<Vec<f64>> = (0..trimmed.kept.len()).map(|v| svd.embedding(v)).collect();
    let refs = reference_cluster(&points, n, p_tilde, svd.k_tilde(), cfg, seed)?;

    let mut clusters = vec![None; n];
    for (pos, &v) in trimmed.kept.iter().enumerate() {
        clusters[v] = Some(refs.assignment[pos]);
    }

    // trimmed items: project their row of A onto the accepted directions
    let mut position = vec![usize::MAX; n];
    for (pos, &v) in trimmed.kept.iter().enumerate() {
        position[v] = pos;
    }
    let sizes = {
        let mut s = vec![0usize; refs.k_hat];
        for &k in &refs.assignment {
            s[k] += 1;
        }
        s
    };
    let largest = (0..refs.k_hat).max_by(|&x, &y| sizes[x].cmp(&sizes[y]).then(y.cmp(&x))).unwrap_or(0);
    let center_points: Vec<&[f64]> = refs.centers.iter().map(|&c| points[c].as_slice()).collect();
    let mut initial = Vec::with_capacity(n);
    for (v, c) in clusters.iter().enumerate() {
        initial.push(match c {
            Some(k) => *k,
            None => {
                let (idx, val) = a.row(v);
                let mut proj = vec![0.0; svd.k_tilde()];
                let mut touched = false;
                for (&w, &x) in idx.iter().zip(val) {
                    let pos = position[w as usize];
                    if pos != usize::MAX {
                        touched = true;
                        for (slot, u) in proj.iter_mut().zip(&svd.u) {
                            *slot += x * u[pos];
                        }
                    }
                }
                if touched { nearest(&proj, &center_points) } else { largest }
            }
        });
    }

    let references = refs.centers.iter().map(|&pos| trimmed.kept[pos]).collect();
    Ok(SpectralOutput {
        p_tilde,
        weights,
        gamma: trimmed.kept,
        trimmed: trimmed.removed,
        k_tilde: svd.k_tilde(),
        sigmas: svd.sigmas,
        threshold: svd.threshold,
        rank_cap_reached: svd.rank_cap_reached,
        k_hat: refs.k_hat,
        references,
        initial: Partition::new(initial, refs.k_hat)?,
        clusters,
    })
}
