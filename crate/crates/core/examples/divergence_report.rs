//! Divergence of a random three-cluster, two-label model, the balanced
//! distribution that attains it, and the resulting error floor.

use lsbm::divergence::{divergence, error_floor};
use lsbm::model::validate;
use lsbm::ModelParams;

fn main() -> lsbm::Result<()> {
    let n = 5000;
    let scale = (n as f64).ln() / n as f64;
    let rate = |i: usize, j: usize| -> Vec<f64> {
        let within = [7.0, 1.0];
        let across = [[1.0, 3.0], [2.0, 0.5], [0.5, 2.0]];
        let r = if i == j { within } else { across[i + j - 1] };
        let (a, b) = (r[0] * scale, r[1] * scale);
        vec![1.0 - a - b, a, b]
    };
    let p = (0..3).map(|i| (0..3).map(|j| rate(i, j)).collect()).collect();
    let params = ModelParams::new(n, vec![0.4, 0.35, 0.25], p)?;

    let report = validate(&params)?;
    println!("p_bar = {:.3e}, eta = {:.2}, epsilon = {:.2}", report.p_bar, report.eta, report.epsilon);

    let d = divergence(&params)?;
    println!("D = {:.6e} (nD = {:.3})", d.d_value, n as f64 * d.d_value);
    println!("closest pair {:?} at lambda* = {:.4}", d.argmin_pair, d.lambda_star);
    for entry in &d.per_pair {
        println!("  pair {:?}: {:.6e}", entry.pair, entry.value);
    }
    println!("error floor n exp(-nD) = {:.3}", error_floor(n, d.d_value));
    Ok(())
}
