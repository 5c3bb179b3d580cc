//! The divergence `D(alpha, p)` and related closed forms.
//!
//! All logarithms are natural.
//!
//! For a pair of clusters `(i, j)` the inner problem minimizes, over label
//! distributions `y(k, .)` for every cluster `k`, the larger of
//! `A(y) = sum_k alpha_k KL(y(k) || p(i,k))` and `B(y) = sum_k alpha_k KL(y(k) || p(j,k))`.
//! Any minimizer of `(1 - lam) A + lam B` is, row by row, the normalized
//! geometric mixture `p(i,k)^(1-lam) p(j,k)^lam`. Along that family
//! `A - B` is non-decreasing in `lam` (its derivative is a weighted sum of
//! variances), so the min-max point is the root of `A - B`, found here by
//! bisection after a coarse scan that checks for a single sign change.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

const SCAN_POINTS: usize = 33;
const BISECT_WIDTH: f64 = 1e-15;
const GOLDEN_WIDTH: f64 = 1e-12;

/// `KL(y || p)`, with `0 log 0 = 0` and `+inf` when `y` puts mass where `p` has none.
pub fn kl(y: &[f64], p: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in y.iter().zip(p) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).ln();
        }
    }
    total.max(0.0)
}

/// Normalized entrywise `p_i^(1-lambda) p_j^lambda`.
pub fn geometric_mixture(p_i: &[f64], p_j: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if lambda == 0.0 {
        return Ok(p_i.to_vec());
    }
    if lambda == 1.0 {
        return Ok(p_j.to_vec());
    }
    let mut out: Vec<f64> = p_i
        .iter()
        .zip(p_j)
        .map(|(&a, &b)| if a > 0.0 && b > 0.0 { a.powf(1.0 - lambda) * b.powf(lambda) } else { 0.0 })
        .collect();
    let mass: f64 = out.iter().sum();
    if mass <= 0.0 {
        return Err(Error::DegenerateSupport);
    }
    for x in &mut out {
        *x /= mass;
    }
    Ok(out)
}

/// Result of the pairwise min-max problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDivergence {
    pub value: f64,
    pub lambda_star: f64,
    /// Balanced minimizer, one label distribution per cluster.
    pub q: Vec<Vec<f64>>,
    /// The coarse scan saw several sign changes of `A - B`; the value comes
    /// from a direct minimization of `max(A, B)` instead of the root.
    pub non_monotone: bool,
}

struct Eval {
    a: f64,
    b: f64,
    q: Vec<Vec<f64>>,
}

impl Eval {
    fn gap(&self) -> f64 {
        self.a - self.b
    }

    fn worst(&self) -> f64 {
        self.a.max(self.b)
    }
}

fn evaluate(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>], lambda: f64) -> Result<Eval> {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut q = Vec::with_capacity(alpha.len());
    for ((w, ri), rj) in alpha.iter().zip(p_i).zip(p_j) {
        let y = geometric_mixture(ri, rj, lambda)?;
        a += w * kl(&y, ri);
        b += w * kl(&y, rj);
        q.push(y);
    }
    Ok(Eval { a, b, q })
}

fn finish(lambda: f64, e: Eval, non_monotone: bool) -> PairDivergence {
    PairDivergence { value: e.worst(), lambda_star: lambda, q: e.q, non_monotone }
}

/// Solves the pairwise min-max problem between the `K x (L+1)` matrices
/// `p_i` and `p_j` under cluster weights `alpha`.
pub fn dl_plus(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>]) -> Result<PairDivergence> {
    for (ri, rj) in p_i.iter().zip(p_j) {
        if !ri.iter().zip(rj).any(|(&a, &b)| a > 0.0 && b > 0.0) {
            return Err(Error::DegenerateSupport);
        }
    }

    let grid: Vec<f64> = (0..SCAN_POINTS).map(|m| m as f64 / (SCAN_POINTS - 1) as f64).collect();
    let mut evals = Vec::with_capacity(SCAN_POINTS);
    for &lam in &grid {
        let e = evaluate(alpha, p_i, p_j, lam)?;
        if e.gap() == 0.0 {
            return Ok(finish(lam, e, false));
        }
        evals.push(e);
    }

    let crossings: Vec<usize> = (0..SCAN_POINTS - 1)
        .filter(|&m| (evals[m].gap() < 0.0) != (evals[m + 1].gap() < 0.0))
        .collect();

    match crossings.as_slice() {
        [m] => {
            let (mut lo, mut hi) = (grid[*m], grid[m + 1]);
            let lo_negative = evals[*m].gap() < 0.0;
            while hi - lo > BISECT_WIDTH {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let e = evaluate(alpha, p_i, p_j, mid)?;
                let g = e.gap();
                if g == 0.0 {
                    return Ok(finish(mid, e, false));
                }
                if (g < 0.0) == lo_negative {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let e_lo = evaluate(alpha, p_i, p_j, lo)?;
            let e_hi = evaluate(alpha, p_i, p_j, hi)?;
            Ok(if e_lo.worst() <= e_hi.worst() { finish(lo, e_lo, false) } else { finish(hi, e_hi, false) })
        }
        [] => {
            // one model dominates across the whole family
            let first = evals.swap_remove(0);
            let last = evals.pop().expect("scan has two endpoints");
            Ok(if first.worst() <= last.worst() { finish(0.0, first, false) } else { finish(1.0, last, false) })
        }
        _ => {
            let best = (0..SCAN_POINTS)
                .min_by(|&x, &y| evals[x].worst().total_cmp(&evals[y].worst()))
                .expect("non-empty scan");
            let lo = grid[best.saturating_sub(1)];
            let hi = grid[(best + 1).min(SCAN_POINTS - 1)];
            let lam = golden_min(lo, hi, |lam| {
                evaluate(alpha, p_i, p_j, lam).map(|e| e.worst()).unwrap_or(f64::INFINITY)
            });
            let e = evaluate(alpha, p_i, p_j, lam)?;
            let e = if e.worst() <= evals[best].worst() { (lam, e) } else { (grid[best], evals.swap_remove(best)) };
            Ok(finish(e.0, e.1, true))
        }
    }
}

fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_WIDTH {
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
    0.5 * (lo + hi)
}

/// Divergence of one cluster pair, in the user's cluster numbering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEntry {
    pub pair: (usize, usize),
    pub value: f64,
    pub lambda_star: f64,
}

/// `D(alpha, p)` together with the minimizing pair and balanced distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub d_value: f64,
    /// Minimizing pair `(i*, j*)`, `i* < j*`, user numbering (0-based).
    pub argmin_pair: (usize, usize),
    pub lambda_star: f64,
    /// Balanced minimizer, rows in user cluster order.
    pub q_matrix: Vec<Vec<f64>>,
    pub per_pair: Vec<PairEntry>,
    pub non_monotone: bool,
}

/// Computes `D(alpha, p)` over all cluster pairs. Pairs whose rows have
/// disjoint supports are infinitely far apart and never attain the minimum.
pub fn divergence(params: &ModelParams) -> Result<DivergenceReport> {
    let k = params.k();
    if k < 2 {
        return Err(Error::SingleCluster);
    }
    // user-order view of alpha and the row matrices
    let mut users: Vec<usize> = (0..k).collect();
    users.sort_by_key(|&i| params.user_index(i));
    let alpha_user: Vec<f64> = users.iter().map(|&i| params.alpha()[i]).collect();
    let matrix_user = |i: usize| -> Vec<Vec<f64>> { users.iter().map(|&c| params.row(i, c).to_vec()).collect() };

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| ((a + 1)..k).map(move |b| (a, b))).collect();
    let solved: Vec<Result<Option<PairDivergence>>> = pairs
        .par_iter()
        .map(|&(a, b)| match dl_plus(&alpha_user, &matrix_user(users[a]), &matrix_user(users[b])) {
            Ok(d) => Ok(Some(d)),
            Err(Error::DegenerateSupport) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();

    let mut per_pair = Vec::with_capacity(pairs.len());
    let mut best: Option<(usize, PairDivergence)> = None;
    for (idx, res) in solved.into_iter().enumerate() {
        let pair = pairs[idx];
        match res? {
            Some(d) => {
                per_pair.push(PairEntry { pair, value: d.value, lambda_star: d.lambda_star });
                if best.as_ref().is_none_or(|(_, b)| d.value < b.value) {
                    best = Some((idx, d));
                }
            }
            None => per_pair.push(PairEntry { pair, value: f64::INFINITY, lambda_star: f64::NAN }),
        }
    }
    Ok(match best {
        Some((idx, d)) => DivergenceReport {
            d_value: d.value,
            argmin_pair: pairs[idx],
            lambda_star: d.lambda_star,
            q_matrix: d.q,
            per_pair,
            non_monotone: d.non_monotone,
        },
        None => DivergenceReport {
            d_value: f64::INFINITY,
            argmin_pair: pairs[0],
            lambda_star: f64::NAN,
            q_matrix: Vec::new(),
            per_pair,
            non_monotone: false,
        },
    })
}

/// Small-probability form of the pairwise divergence: the maximum over
/// `lambda` of `sum_k alpha_k sum_{l>=1} ((1-lam) p_i + lam p_j - p_i^(1-lam) p_j^lam)`.
/// Returns the maximum and its maximizer.
pub fn ch_divergence(alpha: &[f64], p_i: &[Vec<f64>], p_j: &[Vec<f64>]) -> (f64, f64) {
    let objective = |lam: f64| -> f64 {
        alpha
            .iter()
            .zip(p_i.iter().zip(p_j))
            .map(|(w, (ri, rj))| {
                w * ri
                    .iter()
                    .zip(rj)
                    .skip(1)
                    .map(|(&a, &b)| (1.0 - lam) * a + lam * b - a.powf(1.0 - lam) * b.powf(lam))
                    .sum::<f64>()
            })
            .sum()
    };
    let lam = golden_min(0.0, 1.0, |x| -objective(x));
    let mut best = (objective(lam), lam);
    for end in [0.0, 1.0] {
        let v = objective(end);
        if v > best.0 {
            best = (v, end);
        }
    }
    best
}

/// `-(2/K) log sum_l sqrt(p(l) q(l))` for the symmetric balanced model.
pub fn symmetric_divergence(k: usize, p: &[f64], q: &[f64]) -> Result<f64> {
    let overlap: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    if overlap <= 0.0 {
        return Err(Error::ZeroOverlap);
    }
    Ok(-(2.0 / k as f64) * overlap.ln())
}

/// Closed-form exponents of the scaled application models. Each value
/// multiplies `f(n)` in the error exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// Binary model with cluster weights `(alpha1, 1 - alpha1)`.
    BinaryG { alpha1: f64, a: f64, b: f64 },
    /// Hidden community of weight `alpha`.
    HiddenH { alpha: f64, a: f64, b: f64 },
    /// Binary symmetric model observed on a `delta f(n)/n` fraction of pairs.
    SampledL { delta: f64, a: f64, b: f64 },
    /// Balanced signed network.
    SignedM { a_plus: f64, a_minus: f64, b_plus: f64, b_minus: f64 },
}

pub fn closed_form(kind: ClosedForm) -> Result<f64> {
    match kind {
        ClosedForm::BinaryG { alpha1, a, b } => {
            if !(alpha1 > 0.0 && alpha1 < 1.0) || !(a > b && b >= 0.0) {
                return Err(Error::DomainError(format!("g needs 0<alpha1<1, a>b>=0; got {alpha1}, {a}, {b}")));
            }
            let f = |lam: f64| {
                (1.0 - alpha1 - lam + 2.0 * alpha1 * lam) * a + (alpha1 + lam - 2.0 * alpha1 * lam) * b
                    - alpha1 * a.powf(lam) * b.powf(1.0 - lam)
                    - (1.0 - alpha1) * a.powf(1.0 - lam) * b.powf(lam)
            };
            let lam = golden_min(0.0, 1.0, |x| -f(x));
            Ok(f(lam).max(f(0.0)).max(f(1.0)))
        }
        ClosedForm::HiddenH { alpha, a, b } => {
            if !(alpha > 0.0 && alpha < 1.0) || !(a > b && b > 0.0) {
                return Err(Error::DomainError(format!("h needs 0<alpha<1, a>b>0; got {alpha}, {a}, {b}")));
            }
            let r = (a / b).ln();
            Ok(alpha * (a - (a - b) * (1.0 + (a * r).ln() - (a - b).ln()) / r))
        }
        ClosedForm::SampledL { delta, a, b } => {
            if !(delta > 0.0) || !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
                return Err(Error::DomainError(format!("l needs delta>0, a,b in (0,1); got {delta}, {a}, {b}")));
            }
            Ok(delta * (1.0 - (a * b).sqrt() - ((1.0 - a) * (1.0 - b)).sqrt()))
        }
        ClosedForm::SignedM { a_plus, a_minus, b_plus, b_minus } => {
            let ok = a_plus > b_plus && a_minus < b_minus && [a_plus, a_minus, b_plus, b_minus].iter().all(|&x| x >= 0.0);
            if !ok {
                return Err(Error::DomainError("m needs a+>b+, a-<b-, all non-negative".into()));
            }
            Ok(0.5 * ((a_plus.sqrt() - b_plus.sqrt()).powi(2) + (a_minus.sqrt() - b_minus.sqrt()).powi(2)))
        }
    }
}

/// `n exp(-n d)`, the scale below which no algorithm can push the expected
/// number of misclassified items.
pub fn error_floor(n: usize, d_value: f64) -> f64 {
    let n = n as f64;
    (n * (-n * d_value).exp()).clamp(0.0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_scaled_model, ScaledModel, Scaling};

    fn rows(x: &[[f64; 2]]) -> Vec<Vec<f64>> {
        x.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((kl(&[1.0, 0.0], &[0.5, 0.5]) - 2f64.ln()).abs() < 1e-15);
        // 0.9 ln 1.8 + 0.1 ln 0.2, evaluated independently to 20 digits
        assert!((kl(&[0.9, 0.1], &[0.5, 0.5]) - 0.368_064_207_168_497_07).abs() < 1e-15);
        assert_eq!(kl(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn mixture_endpoints_and_midpoint() {
        let (a, b) = ([0.99, 0.01], [0.96, 0.04]);
        assert_eq!(geometric_mixture(&a, &b, 0.0).unwrap(), a.to_vec());
        assert_eq!(geometric_mixture(&a, &b, 1.0).unwrap(), b.to_vec());
        let m = geometric_mixture(&a, &b, 0.5).unwrap();
        let (x, y) = ((0.99f64 * 0.96).sqrt(), (0.01f64 * 0.04).sqrt());
        assert!((m[0] - x / (x + y)).abs() < 1e-15);
        assert!((m[1] - y / (x + y)).abs() < 1e-15);
        assert!(matches!(geometric_mixture(&[1.0, 0.0], &[0.0, 1.0], 0.5), Err(Error::DegenerateSupport)));
    }

    #[test]
    fn identical_rows_have_zero_divergence() {
        let p = rows(&[[0.99, 0.01], [0.995, 0.005]]);
        let d = dl_plus(&[0.5, 0.5], &p, &p).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn symmetric_swap_balances_at_half() {
        let pi = rows(&[[1.0 - 9e-4, 9e-4], [1.0 - 1e-4, 1e-4]]);
        let pj = rows(&[[1.0 - 1e-4, 1e-4], [1.0 - 9e-4, 9e-4]]);
        let d = dl_plus(&[0.5, 0.5], &pi, &pj).unwrap();
        assert!((d.lambda_star - 0.5).abs() < 1e-12);
        let approx = 0.5 * (9e-4f64.sqrt() - 1e-4f64.sqrt()).powi(2);
        assert!((d.value - approx).abs() / approx < 0.02);
        let back = dl_plus(&[0.5, 0.5], &pj, &pi).unwrap();
        assert!((back.value - d.value).abs() < 1e-15);
    }

    #[test]
    fn balance_holds_at_solution() {
        let alpha = [0.3, 0.7];
        let pi = rows(&[[0.99, 0.01], [0.998, 0.002]]);
        let pj = rows(&[[0.995, 0.005], [0.97, 0.03]]);
        let d = dl_plus(&alpha, &pi, &pj).unwrap();
        let a: f64 = (0..2).map(|k| alpha[k] * kl(&d.q[k], &pi[k])).sum();
        let b: f64 = (0..2).map(|k| alpha[k] * kl(&d.q[k], &pj[k])).sum();
        assert!((a - b).abs() <= 1e-8 * d.value.max(1e-30));
        for row in &d.q {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let swapped = dl_plus(&alpha, &pj, &pi).unwrap();
        assert!((swapped.value - d.value).abs() < 1e-14);
        assert!((swapped.lambda_star - (1.0 - d.lambda_star)).abs() < 1e-9);
    }

    #[test]
    fn divergence_two_clusters_is_single_pair() {
        let m = build_scaled_model(&ScaledModel::binary(1000, 0.4, 6.0, 1.0, Scaling::Log)).unwrap();
        let report = divergence(&m).unwrap();
        let direct = dl_plus(m.alpha(), &m.matrix(0), &m.matrix(1)).unwrap();
        assert_eq!(report.per_pair.len(), 1);
        assert!((report.d_value - direct.value).abs() < 1e-15);
    }

    #[test]
    fn divergence_three_clusters_with_twins() {
        let row = |x: f64| vec![1.0 - x, x];
        let p = vec![
            vec![row(0.02), row(0.02), row(0.005)],
            vec![row(0.02), row(0.02), row(0.005)],
            vec![row(0.005), row(0.005), row(0.03)],
        ];
        let m = ModelParams::new(500, vec![0.3, 0.3, 0.4], p).unwrap();
        let r = divergence(&m).unwrap();
        assert_eq!(r.d_value, 0.0);
        assert_eq!(r.argmin_pair, (0, 1));
    }

    #[test]
    fn single_cluster_rejected() {
        let m = ModelParams::new(5, vec![1.0], vec![vec![vec![0.9, 0.1]]]).unwrap();
        assert!(matches!(divergence(&m), Err(Error::SingleCluster)));
    }

    #[test]
    fn ch_identical_and_symmetric() {
        let p = rows(&[[0.99, 0.01], [0.995, 0.005]]);
        assert_eq!(ch_divergence(&[0.5, 0.5], &p, &p).0, 0.0);
        let pi = rows(&[[1.0 - 9e-4, 9e-4], [1.0 - 1e-4, 1e-4]]);
        let pj = rows(&[[1.0 - 1e-4, 1e-4], [1.0 - 9e-4, 9e-4]]);
        let (v, lam) = ch_divergence(&[0.5, 0.5], &pi, &pj);
        assert!((lam - 0.5).abs() < 1e-6);
        assert!((v - 2e-4).abs() < 1e-12);
        let exact = dl_plus(&[0.5, 0.5], &pi, &pj).unwrap().value;
        assert!((v - exact).abs() / exact < 0.05);
    }

    #[test]
    fn symmetric_divergence_basics() {
        let p = [0.99, 0.006, 0.004];
        assert!(symmetric_divergence(3, &p, &p).unwrap().abs() < 1e-15);
        let q = [0.995, 0.002, 0.003];
        let two = symmetric_divergence(2, &p, &q).unwrap();
        let four = symmetric_divergence(4, &p, &q).unwrap();
        assert!((two - 2.0 * four).abs() < 1e-18);
        assert!(matches!(symmetric_divergence(2, &[1.0, 0.0], &[0.0, 1.0]), Err(Error::ZeroOverlap)));
    }

    #[test]
    fn symmetric_divergence_matches_assembled_model() {
        let (a, b) = (8e-4, 2e-4);
        let row = |x: f64| vec![1.0 - x, x];
        let m = ModelParams::new(
            1000,
            vec![0.5, 0.5],
            vec![vec![row(a), row(b)], vec![row(b), row(a)]],
        )
        .unwrap();
        let d = divergence(&m).unwrap().d_value;
        let s = symmetric_divergence(2, &row(a), &row(b)).unwrap();
        assert!((d - s).abs() / d < 0.05);
    }

    #[test]
    fn closed_forms() {
        let g = closed_form(ClosedForm::BinaryG { alpha1: 0.5, a: 9.0, b: 1.0 }).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
        assert_eq!(closed_form(ClosedForm::SampledL { delta: 2.0, a: 0.3, b: 0.3 }).unwrap(), 0.0);
        // alpha * (a - (a-b)(1 + ln(a ln(a/b)) - ln(a-b)) / ln(a/b)) at (0.3, 5, 1),
        // evaluated independently to 20 digits
        let h = closed_form(ClosedForm::HiddenH { alpha: 0.3, a: 5.0, b: 1.0 }).unwrap();
        assert!((h - 0.233_201_050_989_243_41).abs() < 1e-13, "{h}");
        let m = closed_form(ClosedForm::SignedM { a_plus: 9.0, a_minus: 1.0, b_plus: 1.0, b_minus: 4.0 }).unwrap();
        assert!((m - 2.5).abs() < 1e-15);
        assert!(closed_form(ClosedForm::BinaryG { alpha1: 0.5, a: 1.0, b: 2.0 }).is_err());
        assert!(closed_form(ClosedForm::SampledL { delta: 1.0, a: 1.5, b: 0.2 }).is_err());
    }

    #[test]
    fn g_dominates_balanced_case() {
        for alpha1 in [0.1, 0.25, 0.4, 0.5] {
            let g = closed_form(ClosedForm::BinaryG { alpha1, a: 9.0, b: 1.0 }).unwrap();
            assert!(g >= 2.0 - 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_small_probability_limit() {
        let n = 1_000_000;
        let f = (n as f64).ln() / n as f64;
        let cases = [
            (ScaledModel::hidden_community(n, 0.3, 5.0, 1.0, Scaling::Log), ClosedForm::HiddenH { alpha: 0.3, a: 5.0, b: 1.0 }),
            (ScaledModel::binary(n, 0.3, 9.0, 1.0, Scaling::Log), ClosedForm::BinaryG { alpha1: 0.3, a: 9.0, b: 1.0 }),
            (ScaledModel::sampled(n, 2.0, 0.6, 0.2, Scaling::Log), ClosedForm::SampledL { delta: 2.0, a: 0.6, b: 0.2 }),
            (ScaledModel::signed(n, 9.0, 1.0, 1.0, 4.0, Scaling::Log), ClosedForm::SignedM { a_plus: 9.0, a_minus: 1.0, b_plus: 1.0, b_minus: 4.0 }),
        ];
        for (spec, form) in cases {
            let m = build_scaled_model(&spec).unwrap();
            let (ch, _) = ch_divergence(m.alpha(), &m.matrix(0), &m.matrix(1));
            let closed = closed_form(form).unwrap() * f;
            assert!((ch - closed).abs() / closed < 1e-9, "{form:?}: {ch} vs {closed}");
            let exact = divergence(&m).unwrap().d_value;
            assert!((exact - closed).abs() / closed < 0.01, "{form:?}: {exact} vs {closed}");
        }
    }

    #[test]
    fn error_floor_values() {
        assert_eq!(error_floor(1000, 0.0), 1000.0);
        let n = 5000usize;
        let d = (n as f64).ln() / n as f64;
        assert!((error_floor(n, d) - 1.0).abs() < 1e-9);
        assert!((error_floor(10_000, 6.9078e-4) - 10_000.0 * (-6.9078f64).exp()).abs() < 1e-9);
        assert!((error_floor(10_000, 6.9078e-4) - 10.0).abs() < 1e-3);
    }
}
