//! Instance generation.
//!
//! Items are assigned i.i.d. from `alpha`. Labels are drawn per block of
//! cluster pairs: the pairs of a block are walked in lexicographic order with
//! geometric jumps between pairs carrying a non-zero label, and the label of
//! each hit is then drawn conditionally. Work is proportional to `n` plus the
//! number of labeled pairs. Each block owns a derived random stream, so the
//! output does not depend on how blocks are scheduled across threads.

use rand::RngExt;
use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{LabelGraph, Partition};
use crate::model::ModelParams;
use crate::rng::{SampleSeed, Stream};

/// Draws a ground-truth partition (in the user's cluster numbering) and the
/// observed labels.
pub fn sample(params: &ModelParams, seed: SampleSeed) -> Result<(Partition, LabelGraph)> {
    let n = params.n();
    let k = params.k();

    let mut rng = seed.rng(Stream::Assignment, 0);
    let cumulative: Vec<f64> = params
        .alpha()
        .iter()
        .scan(0.0, |acc, &a| {
            *acc += a;
            Some(*acc)
        })
        .collect();
    let internal: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cumulative.iter().position(|&c| u < c).unwrap_or(k - 1)
        })
        .collect();

    let mut members = vec![Vec::new(); k];
    for (v, &c) in internal.iter().enumerate() {
        members[c].push(v);
    }

    let blocks: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let edges: Vec<Vec<(usize, usize, usize)>> = blocks
        .par_iter()
        .map(|&(i, j)| sample_block(params, seed, &members, i, j))
        .collect();

    let graph = LabelGraph::from_edges(n, params.labels(), edges.into_iter().flatten())?;
    let truth = Partition::new(internal.iter().map(|&c| params.user_index(c)).collect(), k)?;
    Ok((truth, graph))
}

fn sample_block(
    params: &ModelParams,
    seed: SampleSeed,
    members: &[Vec<usize>],
    i: usize,
    j: usize,
) -> Vec<(usize, usize, usize)> {
    let k = params.k();
    let row = params.row(i, j);
    let q: f64 = row[1..].iter().sum();
    let (left, right) = (&members[i], &members[j]);
    let total: u64 = if i == j {
        let m = left.len() as u64;
        m * m.saturating_sub(1) / 2
    } else {
        left.len() as u64 * right.len() as u64
    };
    if q <= 0.0 || total == 0 {
        return Vec::new();
    }

    let mut rng = seed.rng(Stream::Labels, (i * k + j) as u64);
    let log_miss = (-q).ln_1p();
    let mut out = Vec::new();
    let mut pos: u64 = 0;
    let mut first = true;
    // within-block cursor: current row and the flat index where it starts
    let m = left.len() as u64;
    let (mut row_a, mut row_start) = (0u64, 0u64);
    loop {
        let skip = if q >= 1.0 {
            0.0
        } else {
            let u: f64 = 1.0 - rng.random::<f64>();
            (u.ln() / log_miss).floor()
        };
        let step = if first { skip } else { skip + 1.0 };
        first = false;
        if step >= (total - pos) as f64 {
            break;
        }
        pos += step as u64;
        if pos >= total {
            break;
        }

        let (a, b) = if i == j {
            while pos >= row_start + (m - 1 - row_a) {
                row_start += m - 1 - row_a;
                row_a += 1;
            }
            (row_a, row_a + 1 + (pos - row_start))
        } else {
            (pos / right.len() as u64, pos % right.len() as u64)
        };

        let target = rng.random::<f64>() * q;
        let mut acc = 0.0;
        let mut label = row.len() - 1;
        for (l, &x) in row.iter().enumerate().skip(1) {
            acc += x;
            if target < acc {
                label = l;
                break;
            }
        }
        out.push((left[a as usize], right[b as usize], label));
    }
    out
}

/// Expected number of unordered pairs carrying each non-zero label between
/// clusters `i` and `j` (user numbering), indexed `[i][j][l - 1]`.
///
/// Cluster sizes are random, so the counts use `E|V_i||V_j| = n(n-1) a_i a_j`
/// across clusters and `E C(|V_i|, 2) = n(n-1) a_i^2 / 2` within a cluster.
pub fn expected_label_counts(params: &ModelParams) -> Vec<Vec<Vec<f64>>> {
    let k = params.k();
    let n = params.n() as f64;
    let pairs = n * (n - 1.0);
    let mut out = vec![vec![vec![0.0; params.labels()]; k]; k];
    for i in 0..k {
        for j in 0..k {
            let (ai, aj) = (params.alpha()[i], params.alpha()[j]);
            let count = if i == j { pairs * ai * ai / 2.0 } else { pairs * ai * aj };
            let cell = &mut out[params.user_index(i)][params.user_index(j)];
            for (l, c) in cell.iter_mut().enumerate() {
                *c = count * params.p(i, j, l + 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: usize, p1: f64) -> ModelParams {
        ModelParams::new(n, vec![1.0], vec![vec![vec![1.0 - p1, p1]]]).unwrap()
    }

    #[test]
    fn zero_probability_gives_empty_graph() {
        let (truth, g) = sample(&single(300, 0.0), SampleSeed(3)).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(truth.assignment().iter().all(|&c| c == 0));
    }

    #[test]
    fn half_density_edge_count() {
        // 19900 pairs, sd about 70.5
        let (_, g) = sample(&single(200, 0.5), SampleSeed(3)).unwrap();
        assert!((g.edge_count() as f64 - 9950.0).abs() < 5.0 * 70.6);
    }

    #[test]
    fn deterministic() {
        let m = ModelParams::new(
            500,
            vec![0.4, 0.6],
            vec![
                vec![vec![0.9, 0.06, 0.04], vec![0.98, 0.01, 0.01]],
                vec![vec![0.98, 0.01, 0.01], vec![0.92, 0.05, 0.03]],
            ],
        )
        .unwrap();
        let a = sample(&m, SampleSeed(11)).unwrap();
        let b = sample(&m, SampleSeed(11)).unwrap();
        assert_eq!(a, b);
        let c = sample(&m, SampleSeed(12)).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn expected_counts_small_cases() {
        let zero = expected_label_counts(&single(100, 0.0));
        assert_eq!(zero[0][0][0], 0.0);
        let one = expected_label_counts(&single(2, 0.5));
        assert!((one[0][0][0] - 0.5).abs() < 1e-15);
    }
}
