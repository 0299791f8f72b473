//! Difference equations satisfied by the moments of any measure whose
//! orthogonal polynomials solve L[Q_n] = λ_n P_n, and a membership check.

use opdop::moments::{classical_moments, ClassicalMeasure};
use opdop::operator::q;
use opdop::solver;
use opdop::ExactlySolvableOperator;

fn main() -> opdop::Result<()> {
    let ops = [
        ("hermite", ExactlySolvableOperator::hermite()),
        ("laguerre(1/2)", ExactlySolvableOperator::laguerre(&q("1/2"))),
        ("x f' - f", ExactlySolvableOperator::parse(&[&["-1"], &["0", "1"]])?),
    ];
    for (name, op) in &ops {
        println!("{name}:\n{}", solver::generate_systq(op).render());
    }
    let ds = solver::generate_systq(&ops[0].1);
    let scaled = classical_moments(&ClassicalMeasure::Hermite, 43)?.scaled(&q("7/3"));
    let rep = solver::check_membership(&ds, &scaled, 40)?;
    println!("7/3 * hermite measure: pass = {}, checked up to {:?}", rep.pass, rep.checked_up_to);
    let mut bumped = scaled.values().to_vec();
    bumped[2] = &bumped[2] + q("1");
    let rep = solver::check_membership(&ds, &opdop::MomentSequence::explicit(bumped)?, 40)?;
    println!("perturbed mu_2: first violation {:?}", rep.first_violation);
    Ok(())
}
