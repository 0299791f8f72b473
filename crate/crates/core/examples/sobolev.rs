//! Π_{n+1} = (x - ζ) Q_n are orthogonal for <f, g> = ∫ f' g' dμ, since
//! Π'_{n+1} = (n+1) P_n. Checked exactly for the Chebyshev measure.

use opdop::moments::{classical_moments, ClassicalMeasure};
use opdop::operator::q;
use opdop::polar;

fn main() -> opdop::Result<()> {
    let ms = classical_moments(&ClassicalMeasure::Chebyshev1, 20)?;
    for zeta in ["2", "0", "-1/3"] {
        let r = polar::sobolev_orthogonality_check(&q(zeta), &ms, 8)?;
        println!(
            "zeta = {zeta}: exact zero = {}, max off-diagonal = {:e}, min diagonal = {:.4}, Pi' = (n+1) P_n: {}",
            r.exact_zero, r.max_off_diagonal, r.min_diagonal, r.derivative_identity
        );
    }
    Ok(())
}
