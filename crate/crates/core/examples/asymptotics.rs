//! Bernstein–Szegő weight 1/((2-x) sqrt(1-x^2)): Chebyshev coefficient
//! limits, the Szegő constant, and strong asymptotics off [-1, 1].

use num_complex::Complex64;
use opdop::polar::{self, BernsteinSzegoMeasure};
use opdop::scalar::RealScalar;
use opdop::{OrthogonalFamily, Polynomial};

fn main() -> opdop::Result<()> {
    let bs = BernsteinSzegoMeasure::from_rho(Polynomial::parse_strs(&["2", "-1"])?)?;
    let model = bs.model()?;
    println!("limits l_k: {:?}", model.limits);
    println!("Szego constant: quadrature {:.12}, closed form {:.12}", model.szego_quadrature, model.szego_closed_form);
    let ms = bs.moments_extended(121, 1e-60)?;
    let fam = OrthogonalFamily::new(&ms, 60)?;
    for n in [5, 20, 40] {
        let tail = polar::chebyshev_tail(fam.get(n)?, bs.m())?;
        println!("n = {n}: b_(n,n-1) = {:.15}", tail[1].to_f64());
    }
    let pts = [Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0), Complex64::new(-2.5, 0.0)];
    let dev = polar::strong_asymptotics_check(&model, fam.get(60)?, &pts)?;
    for (z, d) in pts.iter().zip(dev) {
        println!("|2^60 P_60(z)/phi(z)^60 - G(phi(z))| at {z} = {d:.3e}");
    }
    Ok(())
}
