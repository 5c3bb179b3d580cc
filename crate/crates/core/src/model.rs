//! Model parameters, assumption diagnostics, and scaled-model presets.
//!
//! Clusters are stored internally in non-decreasing order of their prior
//! weight. The permutation applied at construction is kept so that anything
//! reported back to a user (truth partitions, cluster pairs, JSON files) can
//! be expressed in the cluster numbering the user supplied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Full parameterization of a labeled stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    n: usize,
    k: usize,
    labels: usize,
    alpha: Vec<f64>,
    p: Vec<f64>,
    // order[internal] = user index
    order: Vec<usize>,
}

/// On-disk model layout. Cluster indices follow the user's numbering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub labels: usize,
    pub alpha: Vec<f64>,
    pub p: Vec<Vec<Vec<f64>>>,
}

impl ModelParams {
    /// Builds and validates a model. `p` is indexed `[i][j][label]` with
    /// labels `0..=L`.
    pub fn new(n: usize, alpha: Vec<f64>, p: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let k = alpha.len();
        if n == 0 {
            return Err(Error::DegenerateModel("n must be positive".into()));
        }
        if k == 0 {
            return Err(Error::DegenerateModel("K must be positive".into()));
        }
        if p.len() != k || p.iter().any(|r| r.len() != k) {
            return Err(Error::DegenerateModel(format!("p must be {k}x{k}x(L+1)")));
        }
        let width = p[0][0].len();
        if width == 0 || p.iter().flatten().any(|row| row.len() != width) {
            return Err(Error::DegenerateModel("label dimension must be uniform and non-empty".into()));
        }
        let labels = width - 1;

        if alpha.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::DegenerateModel("every alpha must lie in (0, 1]".into()));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::DegenerateModel(format!("alpha sums to {total}")));
        }

        for i in 0..k {
            for j in 0..k {
                let row = &p[i][j];
                if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                    return Err(Error::DegenerateModel(format!("p({i},{j},.) leaves [0,1]")));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(Error::DegenerateModel(format!("p({i},{j},.) sums to {s}")));
                }
                for (a, b) in row.iter().zip(&p[j][i]) {
                    if (a - b).abs() > SUM_TOL {
                        return Err(Error::DegenerateModel(format!("p({i},{j},.) != p({j},{i},.)")));
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| alpha[a].total_cmp(&alpha[b]));

        let mut flat = Vec::with_capacity(k * k * width);
        for &i in &order {
            for &j in &order {
                flat.extend_from_slice(&p[i][j]);
            }
        }
        let model = Self {
            n,
            k,
            labels,
            alpha: order.iter().map(|&i| alpha[i]).collect(),
            p: flat,
            order,
        };

        let freq = model.label_frequencies();
        if let Some(l) = (1..=labels).find(|&l| freq[l] > freq[0]) {
            return Err(Error::DegenerateModel(format!(
                "label {l} is more frequent than label 0"
            )));
        }
        Ok(model)
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        let m = Self::new(file.n, file.alpha, file.p)?;
        if m.k != file.k || m.labels != file.labels {
            return Err(Error::DegenerateModel(format!(
                "declared K={} L={} but arrays give K={} L={}",
                file.k, file.labels, m.k, m.labels
            )));
        }
        Ok(m)
    }

    /// Model in the user's cluster numbering.
    pub fn to_file(&self) -> ModelFile {
        let k = self.k;
        let mut alpha = vec![0.0; k];
        let mut p = vec![vec![Vec::new(); k]; k];
        for i in 0..k {
            alpha[self.order[i]] = self.alpha[i];
            for j in 0..k {
                p[self.order[i]][self.order[j]] = self.row(i, j).to_vec();
            }
        }
        ModelFile { n: self.n, k, labels: self.labels, alpha, p }
    }

    /// Same parameters with a different population size.
    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of non-zero labels `L`.
    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn p(&self, i: usize, j: usize, l: usize) -> f64 {
        self.p[(i * self.k + j) * (self.labels + 1) + l]
    }

    /// Label distribution between internal clusters `i` and `j`.
    pub fn row(&self, i: usize, j: usize) -> &[f64] {
        let w = self.labels + 1;
        let start = (i * self.k + j) * w;
        &self.p[start..start + w]
    }

    /// The `K x (L+1)` matrix `p(i)`, row `k` being `p(i, k, .)`.
    pub fn matrix(&self, i: usize) -> Vec<Vec<f64>> {
        (0..self.k).map(|k| self.row(i, k).to_vec()).collect()
    }

    /// Largest non-zero label probability.
    pub fn p_bar(&self) -> f64 {
        let w = self.labels + 1;
        self.p
            .chunks(w)
            .flat_map(|row| row[1..].iter().copied())
            .fold(0.0, f64::max)
    }

    /// User-facing index of internal cluster `k`.
    pub fn user_index(&self, k: usize) -> usize {
        self.order[k]
    }

    /// Internal index of user cluster `u`.
    pub fn internal_index(&self, u: usize) -> Option<usize> {
        self.order.iter().position(|&o| o == u)
    }

    /// `sum_i sum_j alpha_i alpha_j p(i,j,l)` for every label.
    pub fn label_frequencies(&self) -> Vec<f64> {
        let mut freq = vec![0.0; self.labels + 1];
        for i in 0..self.k {
            for j in 0..self.k {
                let w = self.alpha[i] * self.alpha[j];
                for (f, &x) in freq.iter_mut().zip(self.row(i, j)) {
                    *f += w * x;
                }
            }
        }
        freq
    }

    /// Relabels clusters: internal cluster `i` of the result is cluster
    /// `perm[i]` of `self`. Used to check permutation-equivariance.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let file = self.to_file();
        let alpha = perm.iter().map(|&i| file.alpha[i]).collect();
        let p = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| file.p[i][j].clone()).collect())
            .collect();
        Self::new(self.n, alpha, p)
    }
}

/// Tightest constants for which the modelling assumptions hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// Smallest bound on `p(i,j,l) / p(i,k,l)`; infinite when a positive
    /// entry sits over a zero one.
    pub eta: f64,
    /// Largest separation constant `min_{i != j} sum (p(i,k,l) - p(j,k,l))^2 / p_bar^2`.
    pub epsilon: f64,
    /// Largest exponent with `n p(i,j,l) >= (n p_bar)^kappa` for all `l >= 1`.
    pub kappa: f64,
    pub p_bar: f64,
}

/// Computes the assumption constants of a model by direct scans over `p`.
pub fn validate(params: &ModelParams) -> Result<AssumptionReport> {
    let k = params.k();
    let labels = params.labels();
    for i in 0..k {
        for j in 0..k {
            let s: f64 = params.row(i, j).iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::DegenerateModel(format!("p({i},{j},.) sums to {s}")));
            }
        }
    }
    let p_bar = params.p_bar();

    let mut eta: f64 = 1.0;
    for i in 0..k {
        for l in 0..=labels {
            let col = (0..k).map(|j| params.p(i, j, l));
            let (lo, hi) = col.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
            if hi > 0.0 {
                eta = eta.max(if lo > 0.0 { hi / lo } else { f64::INFINITY });
            }
        }
    }

    let mut epsilon = f64::INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            let num: f64 = (0..k)
                .flat_map(|c| (1..=labels).map(move |l| (c, l)))
                .map(|(c, l)| (params.p(i, c, l) - params.p(j, c, l)).powi(2))
                .sum();
            let q = if p_bar > 0.0 { num / (p_bar * p_bar) } else { 0.0 };
            epsilon = epsilon.min(q);
        }
    }
    if !epsilon.is_finite() {
        epsilon = 0.0;
    }

    let n = params.n() as f64;
    let kappa = if labels == 0 {
        f64::INFINITY
    } else {
        let entries: Vec<f64> = (0..k)
            .flat_map(|i| (0..k).flat_map(move |j| (1..=labels).map(move |l| (i, j, l))))
            .map(|(i, j, l)| params.p(i, j, l))
            .collect();
        let scale = (n * p_bar).ln();
        if entries.contains(&0.0) {
            f64::NEG_INFINITY
        } else if scale > 0.0 {
            entries
                .iter()
                .map(|&x| (n * x).ln() / scale)
                .fold(f64::INFINITY, f64::min)
        } else if scale < 0.0 || entries.iter().all(|&x| n * x >= 1.0) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    };

    Ok(AssumptionReport { eta, epsilon, kappa, p_bar })
}

/// Growth function `f(n)` of a scaled model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Log,
    Sqrt,
    Constant,
    /// A user-evaluated value of `f(n)`.
    Value(f64),
}

impl Scaling {
    pub fn eval(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Scaling::Log => n.ln(),
            Scaling::Sqrt => n.sqrt(),
            Scaling::Constant => 1.0,
            Scaling::Value(v) => v,
        }
    }
}

/// A model whose non-zero label probabilities are `c(i,j,l) * f(n) / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledModel {
    pub n: usize,
    pub alpha: Vec<f64>,
    /// `K x K x L` constants for labels `1..=L`.
    pub constants: Vec<Vec<Vec<f64>>>,
    pub scaling: Scaling,
}

impl ScaledModel {
    /// Two clusters, one label: `a` inside clusters, `b` across.
    pub fn binary(n: usize, alpha1: f64, a: f64, b: f64, scaling: Scaling) -> Self {
        Self {
            n,
            alpha: vec![alpha1, 1.0 - alpha1],
            constants: vec![vec![vec![a], vec![b]], vec![vec![b], vec![a]]],
            scaling,
        }
    }

    /// `K` balanced clusters, one label: `a` inside clusters, `b` across.
    pub fn planted(n: usize, k: usize, a: f64, b: f64, scaling: Scaling) -> Self {
        let constants = (0..k)
            .map(|i| (0..k).map(|j| vec![if i == j { a } else { b }]).collect())
            .collect();
        Self { n, alpha: vec![1.0 / k as f64; k], constants, scaling }
    }

    /// A hidden community of weight `alpha` with internal rate `a`; every
    /// other pair has rate `b`.
    pub fn hidden_community(n: usize, alpha: f64, a: f64, b: f64, scaling: Scaling) -> Self {
        Self {
            n,
            alpha: vec![alpha, 1.0 - alpha],
            constants: vec![vec![vec![a], vec![b]], vec![vec![b], vec![b]]],
            scaling,
        }
    }

    /// Dense binary symmetric graph observed on a `delta f(n)/n` fraction of
    /// pairs. Label 0 is "not sampled", label 1 "sampled, no edge", label 2
    /// "sampled, edge".
    pub fn sampled(n: usize, delta: f64, a: f64, b: f64, scaling: Scaling) -> Self {
        let cell = |x: f64| vec![delta * (1.0 - x), delta * x];
        Self {
            n,
            alpha: vec![0.5, 0.5],
            constants: vec![vec![cell(a), cell(b)], vec![cell(b), cell(a)]],
            scaling,
        }
    }

    /// Two balanced clusters with positive (label 1) and negative (label 2)
    /// interactions.
    pub fn signed(n: usize, a_plus: f64, a_minus: f64, b_plus: f64, b_minus: f64, scaling: Scaling) -> Self {
        Self {
            n,
            alpha: vec![0.5, 0.5],
            constants: vec![
                vec![vec![a_plus, a_minus], vec![b_plus, b_minus]],
                vec![vec![b_plus, b_minus], vec![a_plus, a_minus]],
            ],
            scaling,
        }
    }
}

/// Expands a scaled description into full model parameters.
pub fn build_scaled_model(spec: &ScaledModel) -> Result<ModelParams> {
    let k = spec.alpha.len();
    let factor = spec.scaling.eval(spec.n) / spec.n as f64;
    if spec.constants.len() != k || spec.constants.iter().any(|r| r.len() != k) {
        return Err(Error::DegenerateModel(format!("constants must be {k}x{k}xL")));
    }
    let mut p = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut row = vec![0.0];
            for &c in &spec.constants[i][j] {
                let x = c * factor;
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::OutOfRange(format!("p({i},{j},.) = {x}")));
                }
                row.push(x);
            }
            let mass: f64 = row[1..].iter().sum();
            if mass > 1.0 {
                return Err(Error::OutOfRange(format!("non-zero labels of ({i},{j}) carry mass {mass}")));
            }
            row[0] = 1.0 - mass;
            p[i][j] = row;
        }
    }
    ModelParams::new(spec.n, spec.alpha.clone(), p)
}
