//! Solves L[Q_n] = λ_n P_n for the Hermite operator f'' - 2x f' against the
//! Gaussian weight. The kernel is the constants, so Q_n is pinned by Q_n(0) = 0.

use opdop::moments::{classical_moments, ClassicalMeasure};
use opdop::operator::q;
use opdop::solver;
use opdop::ExactlySolvableOperator;

fn main() -> opdop::Result<()> {
    let op = ExactlySolvableOperator::hermite();
    let ms = classical_moments(&ClassicalMeasure::Hermite, 20)?;
    for n in 0..=6 {
        let sol = solver::solve_index(&op, &ms, n)?;
        let particular = sol.particular.as_ref().map_or("none".to_string(), |p| p.to_string());
        println!(
            "n = {n}: lambda = {}, particular = {particular}, kernel dim = {}",
            sol.lambda_n,
            sol.kernel_basis.len()
        );
    }
    let pinned = solver::unique_with_constraints(&op, &ms, 4, &[q("0")])?;
    println!("Q_4 with Q_4(0) = 0: {pinned}");
    Ok(())
}
