//! Scoring partitions against ground truth, the well-behaved item set used
//! in the error analysis, and seed sweeps.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::time::Instant;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{divergence, error_floor};
use crate::error::{Error, Result};
use crate::graph::{LabelGraph, Partition};
use crate::model::{validate, ModelParams};
use crate::pipeline::{cluster, ClusterConfig};
use crate::rng::SampleSeed;
use crate::sampler::sample;

const EXHAUSTIVE_LIMIT: usize = 8;

/// Best relabeling of estimated clusters onto true clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub errors: usize,
    /// `mapping[a]` is the true cluster matched to estimated cluster `a`.
    pub mapping: Vec<Option<usize>>,
}

/// `table[a][b]` = items in estimated cluster `a` and true cluster `b`.
/// Items with no estimated cluster are left out.
pub fn contingency(est: &[Option<usize>], k_est: usize, truth: &Partition) -> Result<Vec<Vec<usize>>> {
    if est.len() != truth.n() {
        return Err(Error::SizeMismatch(est.len(), truth.n()));
    }
    let mut table = vec![vec![0usize; truth.k_hat()]; k_est];
    for (v, c) in est.iter().enumerate() {
        if let Some(a) = *c {
            if a >= k_est {
                return Err(Error::InvalidPartition(format!("item {v} in cluster {a} >= {k_est}")));
            }
            table[a][truth.cluster_of(v)] += 1;
        }
    }
    Ok(table)
}

fn square(table: &[Vec<usize>]) -> (usize, Vec<Vec<usize>>) {
    let cols = table.first().map_or(0, Vec::len);
    let m = table.len().max(cols).max(1);
    let mut out = vec![vec![0; m]; m];
    for (a, row) in table.iter().enumerate() {
        out[a][..row.len()].copy_from_slice(row);
    }
    (m, out)
}

fn finish(n: usize, table: &[Vec<usize>], perm: &[usize]) -> Matching {
    let cols = table.first().map_or(0, Vec::len);
    let agree: usize = table.iter().enumerate().map(|(a, row)| if perm[a] < cols { row[perm[a]] } else { 0 }).sum();
    Matching {
        errors: n - agree,
        mapping: (0..table.len()).map(|a| (perm[a] < cols).then_some(perm[a])).collect(),
    }
}

/// Maximum agreement by trying every permutation, first found on ties.
pub fn match_exhaustive(n: usize, table: &[Vec<usize>]) -> Matching {
    let (m, sq) = square(table);
    fn search(a: usize, m: usize, sq: &[Vec<usize>], used: &mut [bool], cur: &mut Vec<usize>, acc: usize, best: &mut (usize, Vec<usize>)) {
        if a == m {
            if acc > best.0 || best.1.is_empty() {
                *best = (acc, cur.clone());
            }
            return;
        }
        for b in 0..m {
            if !used[b] {
                used[b] = true;
                cur.push(b);
                search(a + 1, m, sq, used, cur, acc + sq[a][b], best);
                cur.pop();
                used[b] = false;
            }
        }
    }
    let mut best = (0, Vec::new());
    search(0, m, &sq, &mut vec![false; m], &mut Vec::with_capacity(m), 0, &mut best);
    finish(n, table, &best.1)
}

/// Maximum agreement by weighted bipartite matching.
pub fn match_hungarian(n: usize, table: &[Vec<usize>]) -> Matching {
    let (_, sq) = square(table);
    let weights = Matrix::from_rows(sq.iter().map(|r| r.iter().map(|&x| x as i64).collect::<Vec<_>>()))
        .expect("square table");
    let (_, perm) = kuhn_munkres(&weights);
    finish(n, table, &perm)
}

fn dispatch(n: usize, table: &[Vec<usize>]) -> Matching {
    let cols = table.first().map_or(0, Vec::len);
    if table.len().max(cols) <= EXHAUSTIVE_LIMIT {
        match_exhaustive(n, table)
    } else {
        match_hungarian(n, table)
    }
}

/// Misclassified items, minimized over relabelings of `est`.
pub fn misclassified(est: &Partition, truth: &Partition) -> Result<Matching> {
    let labels: Vec<Option<usize>> = est.assignment().iter().map(|&c| Some(c)).collect();
    misclassified_partial(&labels, est.k_hat(), truth)
}

/// As [`misclassified`], where unassigned items always count as errors.
pub fn misclassified_partial(est: &[Option<usize>], k_est: usize, truth: &Partition) -> Result<Matching> {
    let table = contingency(est, k_est, truth)?;
    Ok(dispatch(truth.n(), &table))
}

/// Per-item flags for the degree bound (H1), the likelihood margin (H2) and
/// the outside-connectivity bound (H3).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HSet {
    pub h1: Vec<bool>,
    pub h2: Vec<bool>,
    /// Membership in the set built by peeling; every member satisfies all
    /// three conditions.
    pub in_h: Vec<bool>,
    pub outside: usize,
    pub h1_bound: f64,
    pub h2_bound: f64,
    pub h3_bound: f64,
}

/// Builds the well-behaved set with the true parameters. `truth` uses the
/// user's cluster numbering.
pub fn h_set(graph: &LabelGraph, truth: &Partition, params: &ModelParams) -> Result<HSet> {
    let n = graph.n();
    if truth.n() != n {
        return Err(Error::SizeMismatch(truth.n(), n));
    }
    let report = validate(params)?;
    if !report.eta.is_finite() {
        return Err(Error::DomainError("the degree bound needs a finite ratio eta".into()));
    }
    let k = params.k();
    let labels = params.labels();
    let np = n as f64 * report.p_bar;
    let log_np = np.ln();
    let h1_bound = 10.0 * report.eta * np * labels as f64;
    let h2_bound = np / log_np.powi(4);
    let h3_bound = 2.0 * log_np * log_np;

    let internal: Vec<usize> = truth
        .assignment()
        .iter()
        .map(|&u| params.internal_index(u).ok_or_else(|| Error::InvalidPartition(format!("cluster {u} not in model"))))
        .collect::<Result<_>>()?;
    let mut sizes = vec![0usize; k];
    for &c in &internal {
        sizes[c] += 1;
    }

    let log_ratio = |count: usize, a: f64, b: f64| -> f64 {
        if count == 0 || (a == 0.0 && b == 0.0) {
            0.0
        } else {
            count as f64 * (a.ln() - b.ln())
        }
    };

    let flags: Vec<(bool, bool)> = (0..n)
        .into_par_iter()
        .map(|v| {
            let h1 = graph.degree(v) as f64 <= h1_bound;
            let own = internal[v];
            let mut e = vec![vec![0usize; labels + 1]; k];
            for &(w, l) in graph.neighbors(v) {
                e[internal[w as usize]][l as usize] += 1;
            }
            for (i, row) in e.iter_mut().enumerate() {
                let others = sizes[i] - usize::from(i == own);
                row[0] = others - row[1..].iter().sum::<usize>();
            }
            let h2 = (0..k).filter(|&j| j != own).all(|j| {
                let margin: f64 = (0..k)
                    .flat_map(|i| (0..=labels).map(move |l| (i, l)))
                    .map(|(i, l)| log_ratio(e[i][l], params.p(own, i, l), params.p(j, i, l)))
                    .sum();
                margin >= h2_bound
            });
            (h1, h2)
        })
        .collect();
    let h1: Vec<bool> = flags.iter().map(|f| f.0).collect();
    let h2: Vec<bool> = flags.iter().map(|f| f.1).collect();

    // grow the complement by adding items with too many labels into it
    let mut outside_set: Vec<bool> = flags.iter().map(|&(a, b)| !(a && b)).collect();
    let mut links = vec![0usize; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if outside_set[v] {
            for &(w, _) in graph.neighbors(v) {
                links[w as usize] += 1;
            }
        }
    }
    for v in 0..n {
        if !outside_set[v] && links[v] as f64 > h3_bound {
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if outside_set[v] {
            continue;
        }
        outside_set[v] = true;
        for &(w, _) in graph.neighbors(v) {
            let w = w as usize;
            links[w] += 1;
            if !outside_set[w] && links[w] as f64 > h3_bound {
                queue.push_back(w);
            }
        }
    }
    let in_h: Vec<bool> = outside_set.iter().map(|&o| !o).collect();
    let outside = outside_set.iter().filter(|&&o| o).count();
    Ok(HSet { h1, h2, in_h, outside, h1_bound, h2_bound, h3_bound })
}

/// One `(model, seed)` run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub model_id: String,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub k_hat: Option<usize>,
    pub errors_spectral: Option<usize>,
    pub errors_final: Option<usize>,
    /// Errors before the first refinement sweep and after each sweep.
    pub trace: Vec<usize>,
    pub d_value: f64,
    pub floor_s: f64,
    pub runtime_ms: u64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentModel {
    pub id: String,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub models: Vec<ExperimentModel>,
    pub seeds: std::ops::Range<u64>,
    pub cluster: ClusterConfig,
    /// Record wall-clock time; otherwise `runtime_ms` is 0 and the output
    /// depends only on the inputs.
    pub timing: bool,
}

/// Samples, clusters and scores every `(model, seed)` pair. Runs are spread
/// over the current thread pool; records come back ordered by model, then
/// seed. Stage failures are reported in `status`.
pub fn run_experiment(exp: &Experiment) -> Vec<ExperimentRecord> {
    let divergences: Vec<f64> = exp
        .models
        .iter()
        .map(|m| divergence(&m.params).map_or(f64::NAN, |r| r.d_value))
        .collect();
    let jobs: Vec<(usize, u64)> = (0..exp.models.len()).flat_map(|m| exp.seeds.clone().map(move |s| (m, s))).collect();
    jobs.par_iter()
        .map(|&(m, seed)| {
            let model = &exp.models[m];
            let d = divergences[m];
            let n = model.params.n();
            let start = Instant::now();
            let mut rec = ExperimentRecord {
                model_id: model.id.clone(),
                seed,
                n,
                k: model.params.k(),
                k_hat: None,
                errors_spectral: None,
                errors_final: None,
                trace: Vec::new(),
                d_value: d,
                floor_s: if d.is_nan() { f64::NAN } else { error_floor(n, d) },
                runtime_ms: 0,
                status: "ok".into(),
            };
            let result = (|| -> Result<()> {
                let seed = SampleSeed(seed);
                let (truth, graph) = sample(&model.params, seed)?;
                let out = cluster(&graph, &exp.cluster, seed, Some(&truth))?;
                rec.k_hat = Some(out.spectral.k_hat);
                rec.errors_spectral = Some(misclassified(&out.spectral.initial, &truth)?.errors);
                rec.errors_final = Some(misclassified(out.partition(), &truth)?.errors);
                rec.trace = out.refinement.trace.clone().unwrap_or_default();
                Ok(())
            })();
            if let Err(e) = result {
                rec.status = e.to_string().replace([',', '\n'], ";");
            }
            if exp.timing {
                rec.runtime_ms = start.elapsed().as_millis() as u64;
            }
            rec
        })
        .collect()
}

pub const CSV_HEADER: &str = "model_id,seed,n,K,k_hat,errors_spectral,errors_final,d_value,floor_s,runtime_ms,status";

/// Fixed 17-significant-digit rendering.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn to_csv(records: &[ExperimentRecord]) -> String {
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.model_id.replace(',', ";"),
            r.seed,
            r.n,
            r.k,
            opt(r.k_hat),
            opt(r.errors_spectral),
            opt(r.errors_final),
            fmt_float(r.d_value),
            fmt_float(r.floor_s),
            r.runtime_ms,
            r.status
        );
    }
    out
}
