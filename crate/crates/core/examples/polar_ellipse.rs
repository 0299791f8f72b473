//! Zeros of the polar polynomials for the Chebyshev measure and ζ = 2
//! approach the ellipse with foci ±1 through ζ.

use num_complex::Complex64;
use opdop::polar;
use opdop::zeros;
use opdop::{Extended, OrthogonalFamily};

fn main() -> opdop::Result<()> {
    let zeta = Extended::new(2.0);
    let e = polar::ellipse(Complex64::new(2.0, 0.0))?;
    println!("ellipse: semi-axes {:.7} and {:.7}", e.semi_major, e.semi_minor);
    let ms = opdop::moments::MeasureSpec::Chebyshev1.extended_moments(202, 1e-40)?;
    let fam = OrthogonalFamily::new(&ms, 100)?;
    for n in [10, 25, 50, 100] {
        let qn = polar::polar_from(fam.get(n)?, &zeta)?;
        let rs = zeros::roots(&qn, 0)?;
        let rs = zeros::polish(&qn, &rs, zeros::POLISH_SWEEPS);
        let d = rs.roots.iter().map(|z| polar::dist_to_e(*z, &e)).fold(0.0, f64::max);
        println!("n = {n:>3}: max distance to the ellipse {d:.4e}");
    }
    Ok(())
}
