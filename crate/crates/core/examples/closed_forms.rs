//! Closed-form exponents of the four application models next to the exact
//! divergence at large n. All logarithms are natural.

use lsbm::divergence::{closed_form, divergence, ClosedForm};
use lsbm::model::build_scaled_model;
use lsbm::{ScaledModel, Scaling};

fn main() -> lsbm::Result<()> {
    let n = 1_000_000;
    let cases = [
        (ClosedForm::BinaryG { alpha1: 0.3, a: 9.0, b: 1.0 }, ScaledModel::binary(n, 0.3, 9.0, 1.0, Scaling::Log)),
        (
            ClosedForm::HiddenH { alpha: 0.2, a: 5.0, b: 1.0 },
            ScaledModel::hidden_community(n, 0.2, 5.0, 1.0, Scaling::Log),
        ),
        (ClosedForm::SampledL { delta: 2.0, a: 0.7, b: 0.2 }, ScaledModel::sampled(n, 2.0, 0.7, 0.2, Scaling::Log)),
        (
            ClosedForm::SignedM { a_plus: 6.0, a_minus: 1.0, b_plus: 1.0, b_minus: 4.0 },
            ScaledModel::signed(n, 6.0, 1.0, 1.0, 4.0, Scaling::Log),
        ),
    ];
    let f = (n as f64).ln();
    println!("{:<42} {:>12} {:>12} {:>9}", "model", "closed form", "n D / f(n)", "rel diff");
    for (form, spec) in cases {
        let c = closed_form(form)?;
        let exact = n as f64 * divergence(&build_scaled_model(&spec)?)?.d_value / f;
        println!("{:<42} {c:>12.6} {exact:>12.6} {:>9.2e}", format!("{form:?}").chars().take(42).collect::<String>(), (exact - c).abs() / c);
    }
    Ok(())
}
