//! Brute-force references for testing: exhaustive MAP clustering, two
//! independent divergence solvers, and a naive per-item likelihood.
//!
//! Nothing here reuses the divergence or refinement code paths.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{LabelGraph, Partition};
use crate::model::ModelParams;
use crate::refinement::EstimatedParams;

/// Largest number of assignments [`map_oracle`] will enumerate.
pub const MAP_LIMIT: f64 = 1e7;
const CHUNK: u64 = 1 << 14;
/// Relative gap below which two log-posteriors count as tied; summation
/// order alone moves scores by a few ulps.
const TIE_TOL: f64 = 1e-12;

/// Result of exhaustive MAP search.
#[derive(Debug, Clone, PartialEq)]
pub struct MapResult {
    /// Maximizer in the user's cluster numbering; the lexicographically
    /// smallest one when several attain the maximum.
    pub partition: Partition,
    pub log_posterior: f64,
    /// Number of assignments attaining the maximum up to `TIE_TOL`.
    pub ties: usize,
}

fn log_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `sum_v log alpha(s_v) + sum_{u<v} log p(s_u, s_v, x_uv)` with clusters in
/// user numbering.
pub fn log_posterior(graph: &LabelGraph, params: &ModelParams, assignment: &[usize]) -> f64 {
    let n = graph.n();
    let internal: Vec<usize> = assignment.iter().map(|&u| params.internal_index(u).expect("cluster in range")).collect();
    let mut total = 0.0;
    for v in 0..n {
        total += log_or_neg_inf(params.alpha()[internal[v]]);
        for w in (v + 1)..n {
            total += log_or_neg_inf(params.p(internal[v], internal[w], graph.label(v, w)));
        }
    }
    total
}

/// Enumerates all `K^n` assignments.
pub fn map_oracle(graph: &LabelGraph, params: &ModelParams) -> Result<MapResult> {
    let n = graph.n();
    let k = params.k();
    let count = (k as f64).powi(n as i32);
    if count > MAP_LIMIT {
        return Err(Error::TooLarge(count));
    }
    let total = count as u64;
    let decode = |mut idx: u64| -> Vec<usize> {
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = (idx % k as u64) as usize;
            idx /= k as u64;
        }
        out
    };

    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let range = |c: u64| (c * CHUNK)..((c + 1) * CHUNK).min(total);
    // Two passes keep the parallel reduction associative: the exact maximum
    // first, then every assignment within the tie tolerance of it.
    let max = chunks
        .par_iter()
        .map(|&c| range(c).map(|idx| log_posterior(graph, params, &decode(idx))).fold(f64::NEG_INFINITY, f64::max))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::ZeroLikelihood);
    }
    let cutoff = max - TIE_TOL * max.abs().max(1.0);
    let (first, ties) = chunks
        .par_iter()
        .map(|&c| {
            range(c)
                .filter(|&idx| log_posterior(graph, params, &decode(idx)) >= cutoff)
                .fold((u64::MAX, 0usize), |(first, n), idx| (first.min(idx), n + 1))
        })
        .reduce(|| (u64::MAX, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
    let best = (log_posterior(graph, params, &decode(first)), first, ties);
    Ok(MapResult { partition: Partition::new(decode(best.1), k)?, log_posterior: best.0, ties: best.2 })
}

/// Log-posterior of every single-item deviation: entry `k` is the score of
/// `assignment` with item `v` moved to cluster `k` (user numbering).
pub fn single_item_map(graph: &LabelGraph, params: &ModelParams, assignment: &[usize], v: usize) -> Vec<f64> {
    (0..params.k())
        .map(|k| {
            let mut trial = assignment.to_vec();
            trial[v] = k;
            log_posterior(graph, params, &trial)
        })
        .collect()
}

fn kl_row(y: &[f64], p: &[f64]) -> f64 {
    y.iter()
        .zip(p)
        .map(|(&a, &b)| match (a > 0.0, b > 0.0) {
            (false, _) => 0.0,
            (true, true) => a * (a.ln() - b.ln()),
            (true, false) => f64::INFINITY,
        })
        .sum()
}

fn objective(alpha: &[f64], y: &[Vec<f64>], p_i: &[Vec<f64>], p_j: &[Vec<f64>]) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for k in 0..alpha.len() {
        a += alpha[k] * kl_row(&y[k], &p_i[k]);
        b += alpha[k] * kl_row(&y[k], &p_j[k]);
    }
    (a, b)
}

/// Minimizes `max(sum_k alpha_k KL(y_k || p_i,k), sum_k alpha_k KL(y_k || p_j,k))`
/// over products of simplices by mirror descent (projected subgradient
/// steps in the geometry of `sum_k alpha_k sum_l y log y`) with steps
/// `1/(t+2)`, keeping the best iterate. Within one step of the kink `A = B` the minimum-norm
/// subgradient is used instead of the gradient of the larger term.
pub fn divergence_pg_oracle(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>]) -> f64 {
    divergence_pg_oracle_with(alpha, p_i, p_j, 200_000)
}

pub fn divergence_pg_oracle_with(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>], iterations: usize) -> f64 {
    // start from the arithmetic mean on the common support
    let mut y: Vec<Vec<f64>> = p_i
        .iter()
        .zip(p_j)
        .map(|(ri, rj)| {
            let mut row: Vec<f64> =
                ri.iter().zip(rj).map(|(&a, &b)| if a > 0.0 && b > 0.0 { 0.5 * (a + b) } else { 0.0 }).collect();
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|x| *x /= s);
            }
            row
        })
        .collect();
    if y.iter().any(|r| r.iter().all(|&x| x == 0.0)) {
        return f64::INFINITY;
    }
    let (a, b) = objective(alpha, &y, p_i, p_j);
    let mut best = a.max(b);
    let rows = y.len();
    let mut grad_a = vec![Vec::new(); rows];
    let mut grad_b = vec![Vec::new(); rows];
    for t in 0..iterations {
        let (a, b) = objective(alpha, &y, p_i, p_j);
        for k in 0..rows {
            grad_a[k] = y[k].iter().zip(&p_i[k]).map(|(&x, &p)| if x > 0.0 { alpha[k] * (x.ln() - p.ln()) } else { 0.0 }).collect();
            grad_b[k] = y[k].iter().zip(&p_j[k]).map(|(&x, &p)| if x > 0.0 { alpha[k] * (x.ln() - p.ln()) } else { 0.0 }).collect();
        }
        // local dual inner product of the weighted entropic geometry
        let inner = |g: &[Vec<f64>], h: &[Vec<f64>]| -> f64 {
            (0..rows)
                .map(|k| {
                    let yk = &y[k];
                    let mg: f64 = yk.iter().zip(&g[k]).map(|(a, b)| a * b).sum();
                    let mh: f64 = yk.iter().zip(&h[k]).map(|(a, b)| a * b).sum();
                    yk.iter().zip(g[k].iter().zip(&h[k])).map(|(w, (x, z))| w * (x - mg) * (z - mh)).sum::<f64>() / alpha[k]
                })
                .sum()
        };
        let step = 1.0 / (t as f64 + 2.0);
        let diff: Vec<Vec<f64>> = grad_a.iter().zip(&grad_b).map(|(ga, gb)| ga.iter().zip(gb).map(|(x, z)| x - z).collect()).collect();
        let dd = inner(&diff, &diff);
        // near the kink step along the shortest combination of both gradients
        let mu = if dd > 0.0 && (a - b).abs() <= step * dd {
            (inner(&grad_a, &diff) / dd).clamp(0.0, 1.0)
        } else if a >= b {
            0.0
        } else {
            1.0
        };
        for k in 0..rows {
            let row = &mut y[k];
            let mut mass = 0.0;
            for (l, x) in row.iter_mut().enumerate() {
                if *x > 0.0 {
                    let g = (1.0 - mu) * grad_a[k][l] + mu * grad_b[k][l];
                    *x *= (-step * g / alpha[k]).exp();
                    mass += *x;
                }
            }
            row.iter_mut().for_each(|x| *x /= mass);
        }
        let (a, b) = objective(alpha, &y, p_i, p_j);
        best = best.min(a.max(b));
    }
    best
}

fn mixture_family(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>], lam: f64) -> f64 {
    let y: Vec<Vec<f64>> = p_i
        .iter()
        .zip(p_j)
        .map(|(ri, rj)| {
            let row: Vec<f64> = ri
                .iter()
                .zip(rj)
                .map(|(&a, &b)| if a > 0.0 && b > 0.0 { (a.ln() * (1.0 - lam) + b.ln() * lam).exp() } else { 0.0 })
                .collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let (a, b) = objective(alpha, &y, p_i, p_j);
    a.max(b)
}

/// Minimum of `max(A, B)` along the geometric-mixture family: a scan on
/// `points` equally spaced values of `lambda` in `[0, 1]`, then a
/// golden-section polish on the cells around the best grid point.
pub fn divergence_grid_oracle(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>], points: usize) -> f64 {
    let grid: Vec<f64> = (0..points).map(|m| m as f64 / (points - 1) as f64).collect();
    let values: Vec<f64> = grid.par_iter().map(|&lam| mixture_family(alpha, p_i, p_j, lam)).collect();
    let best = (0..points).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("grid is non-empty");
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(points - 1)];
    let f = |lam: f64| mixture_family(alpha, p_i, p_j, lam);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    values[best].min(f1).min(f2)
}

/// `score[v][k] = sum_{w != v} log p_hat(k, c(w), x_vw)`, evaluated pair by
/// pair.
pub fn naive_likelihood(graph: &LabelGraph, partition: &Partition, est: &EstimatedParams) -> Vec<Vec<f64>> {
    let n = graph.n();
    (0..n)
        .into_par_iter()
        .map(|v| {
            (0..est.k_hat())
                .map(|k| {
                    (0..n)
                        .filter(|&w| w != v)
                        .map(|w| est.p(k, partition.cluster_of(w), graph.label(v, w)).ln())
                        .sum()
                })
                .collect()
        })
        .collect()
}
