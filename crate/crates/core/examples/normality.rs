//! Normality of the indexes 0..=8 for f'' - 2x f' + 2f against the weight
//! e^{-x^2}/(1+x^2), with the brute-force dimension count alongside.

use opdop::moments::{weight_moments, Weight};
use opdop::solver;
use opdop::ExactlySolvableOperator;

fn main() -> opdop::Result<()> {
    let op = ExactlySolvableOperator::parse(&[&["2"], &["0", "-2"], &["1"]])?;
    let w = Weight::parse("exp(-x^2)/(1+x^2)", "-inf", "inf", false)?;
    let ms = weight_moments(&w, 17, 1e-12)?;
    for n in 0..=8 {
        let r = solver::normality_report(&op, &ms, n)?;
        println!(
            "n = {n}: {:?} (branch {:?}, oracle {:?}, dim V = {})",
            r.verdict, r.branch, r.oracle_verdict, r.oracle_dimension
        );
    }
    let sol = solver::solve_index(&op, &ms, 2)?;
    println!("n = 2 solution space dimension: {}", sol.dimension());
    Ok(())
}
