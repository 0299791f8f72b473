//! Zeros of Q_n for factorized operators stay inside |z| <= 3^M d.

use opdop::moments::{classical_moments, ClassicalMeasure};
use opdop::zeros;
use opdop::FactorizedOperator;

fn main() -> opdop::Result<()> {
    let ms = classical_moments(&ClassicalMeasure::Chebyshev1, 62)?;
    let ops = [
        ("((x-2) f)'", FactorizedOperator::parse(&[(1, 1, &["-2", "1"])])?),
        ("((x^2-1) f)''", FactorizedOperator::parse(&[(2, 2, &["-1", "0", "1"])])?),
    ];
    for (name, fop) in &ops {
        let rows = zeros::zero_bound_check(fop, &ms, 1..=30, &|_| None, 0)?;
        let worst = rows.iter().map(|r| r.max_modulus).fold(0.0, f64::max);
        let all = rows.iter().all(|r| r.pass);
        println!("{name}: R = {}, largest |z| over n <= 30 = {worst:.6}, all inside: {all}", rows[0].r);
    }
    let failures = zeros::random_circle_suite(100, 1)?;
    println!("iterated-integral circle suite: {} failures in 100 cases", failures.len());
    Ok(())
}
