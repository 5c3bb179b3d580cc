mod common;

use lsbm::sampler::{expected_label_counts, sample};
use lsbm::{ModelParams, SampleSeed};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

const ALPHA: f64 = 0.001;

fn model(n: usize) -> ModelParams {
    let s = (n as f64).ln() / n as f64;
    let row = |a: f64, b: f64| vec![1.0 - (a + b) * s, a * s, b * s];
    ModelParams::new(
        n,
        vec![0.3, 0.7],
        vec![vec![row(6.0, 1.0), row(1.0, 2.0)], vec![row(1.0, 2.0), row(4.0, 0.5)]],
    )
    .unwrap()
}

fn chi_square_p(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

#[test]
fn label_counts_match_expectation() {
    let n = 2000;
    let params = model(n);
    let expected = expected_label_counts(&params);
    let seeds = 200;
    // counts[seed][block][label]
    let mut counts = vec![[[0.0f64; 2]; 3]; seeds];
    for (s, c) in counts.iter_mut().enumerate() {
        let (truth, g) = sample(&params, SampleSeed(s as u64)).unwrap();
        for (u, v, l) in g.iter_edges() {
            let block = truth.cluster_of(u) + truth.cluster_of(v);
            c[block][l - 1] += 1.0;
        }
    }
    let blocks = [(0, 0), (0, 1), (1, 1)];
    for (b, &(i, j)) in blocks.iter().enumerate() {
        for l in 0..2 {
            let xs: Vec<f64> = counts.iter().map(|c| c[b][l]).collect();
            let mean = xs.iter().sum::<f64>() / seeds as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
            let se = (var / seeds as f64).sqrt();
            let e = expected[i][j][l];
            assert!((mean - e).abs() <= 5.0 * se, "block ({i},{j}) label {}: mean {mean} expected {e} se {se}", l + 1);
        }
    }
}

#[test]
fn labels_given_an_edge_follow_the_conditional_law() {
    let n = 2000;
    let params = model(n);
    let mut pooled = [[0.0f64; 2]; 3];
    for s in 0..100 {
        let (truth, g) = sample(&params, SampleSeed(1000 + s)).unwrap();
        for (u, v, l) in g.iter_edges() {
            pooled[truth.cluster_of(u) + truth.cluster_of(v)][l - 1] += 1.0;
        }
    }
    for (b, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        let (p1, p2) = (params.p(i, j, 1), params.p(i, j, 2));
        let total = pooled[b][0] + pooled[b][1];
        let expected = [total * p1 / (p1 + p2), total * p2 / (p1 + p2)];
        let p = chi_square_p(&pooled[b], &expected);
        assert!(p > ALPHA, "block ({i},{j}): p-value {p}");
    }
}

#[test]
fn cluster_sizes_are_multinomial() {
    let n = 300;
    let params = model(n);
    let seeds = 500;
    // alpha is stored in non-decreasing order, so cluster 0 has weight 0.3
    let sizes: Vec<u64> = (0..seeds).map(|s| sample(&params, SampleSeed(s)).unwrap().0.sizes()[0] as u64).collect();

    // pooled totals
    let total0 = sizes.iter().sum::<u64>() as f64;
    let all = (n as u64 * seeds) as f64;
    let p = chi_square_p(&[total0, all - total0], &[0.3 * all, 0.7 * all]);
    assert!(p > ALPHA, "pooled sizes p-value {p}");

    // per-seed sizes binned at binomial deciles
    let binom = Binomial::new(0.3, n as u64).unwrap();
    let mut edges = Vec::new();
    for q in 1..10 {
        let x = binom.inverse_cdf(q as f64 / 10.0);
        if edges.last() != Some(&x) {
            edges.push(x);
        }
    }
    let bin_of = |x: u64| edges.iter().take_while(|&&e| x > e).count();
    let mut observed = vec![0.0; edges.len() + 1];
    for &x in &sizes {
        observed[bin_of(x)] += 1.0;
    }
    let mut expected = Vec::new();
    let mut prev = 0.0;
    for &e in &edges {
        let c = binom.cdf(e);
        expected.push((c - prev) * seeds as f64);
        prev = c;
    }
    expected.push((1.0 - prev) * seeds as f64);
    let p = chi_square_p(&observed, &expected);
    assert!(p > ALPHA, "binned sizes p-value {p}");
}

#[test]
fn sampling_is_byte_deterministic() {
    let params = model(1500);
    let a = lsbm::io::format_graph(&sample(&params, SampleSeed(9)).unwrap().1);
    let b = lsbm::io::format_graph(&sample(&params, SampleSeed(9)).unwrap().1);
    assert_eq!(a, b);
    let c = lsbm::io::format_graph(&sample(&params, SampleSeed(10)).unwrap().1);
    assert_ne!(a, c);
}
