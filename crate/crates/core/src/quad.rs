//! Vector-valued numerical integration: adaptive Gauss–Kronrod (7/15) in
//! double precision and tanh-sinh in any [`Transcendental`] type.

use crate::error::{Error, Result};
use crate::scalar::Transcendental;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Segment {
    a: f64,
    b: f64,
    val: Vec<f64>,
    err: Vec<f64>,
    abs: Vec<f64>,
}

fn gk15<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut abs = vec![0.0; dim];
    let mut eval = |x: f64, wk: f64, wg: f64, buf: &mut [f64]| {
        buf.iter_mut().for_each(|v| *v = 0.0);
        f(x, buf);
        for j in 0..dim {
            let v = if buf[j].is_finite() { buf[j] } else { 0.0 };
            k[j] += wk * v;
            g[j] += wg * v;
            abs[j] += wk * v.abs();
        }
    };
    for i in 0..8 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        if i == 7 {
            eval(c, WGK[i], wg, buf);
        } else {
            eval(c - h * XGK[i], WGK[i], wg, buf);
            eval(c + h * XGK[i], WGK[i], wg, buf);
        }
    }
    let ah = h.abs();
    Segment {
        a,
        b,
        val: k.iter().map(|v| v * h).collect(),
        err: k.iter().zip(&g).map(|(x, y)| ((x - y) * h).abs()).collect(),
        abs: abs.iter().map(|v| v * ah).collect(),
    }
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand over
/// `[a, b]` (either end may be infinite). `f(x, out)` writes `dim` values.
///
/// Converges when every component's summed error estimate is below
/// `rel_tol` times the integral of its absolute value.
pub fn gauss_kronrod<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<Vec<f64>> {
    if a.is_finite() && b.is_finite() {
        return gk_adaptive(&f, dim, a, b, rel_tol, max_evals);
    }
    if a.is_infinite() && b.is_infinite() {
        let g = |t: f64, out: &mut [f64]| {
            let d = 1.0 - t * t;
            let x = t / d;
            f(x, out);
            let jac = (1.0 + t * t) / (d * d);
            out.iter_mut().for_each(|v| *v *= jac);
        };
        return gk_adaptive(&g, dim, -1.0, 1.0, rel_tol, max_evals);
    }
    // one-sided: map s ∈ [0,1) onto the half line starting at the finite end
    let (x0, dir) = if a.is_finite() { (a, 1.0) } else { (b, -1.0) };
    let g = |s: f64, out: &mut [f64]| {
        let d = 1.0 - s;
        f(x0 + dir * s / d, out);
        let jac = 1.0 / (d * d);
        out.iter_mut().for_each(|v| *v *= jac);
    };
    gk_adaptive(&g, dim, 0.0, 1.0, rel_tol, max_evals)
}

fn gk_adaptive<F: Fn(f64, &mut [f64])>(
    f: &F,
    dim: usize,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<Vec<f64>> {
    let mut buf = vec![0.0; dim];
    let mut segs = vec![gk15(f, a, b, dim, &mut buf)];
    let mut evals = 15;
    loop {
        let mut tot = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        let mut abs = vec![0.0; dim];
        for s in &segs {
            for j in 0..dim {
                tot[j] += s.val[j];
                err[j] += s.err[j];
                abs[j] += s.abs[j];
            }
        }
        let floor = |j: usize| (rel_tol * abs[j]).max(f64::MIN_POSITIVE);
        if (0..dim).all(|j| err[j] <= floor(j)) {
            return Ok(tot);
        }
        if evals + 30 > max_evals {
            return Err(Error::QuadratureNonConvergence(format!("Gauss-Kronrod exceeded {max_evals} evaluations")));
        }
        let worst = (0..segs.len())
            .max_by(|&p, &q| {
                let score = |i: usize| (0..dim).map(|j| segs[i].err[j] / floor(j)).fold(0.0, f64::max);
                score(p).total_cmp(&score(q))
            })
            .expect("at least one segment");
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            return Err(Error::QuadratureNonConvergence("interval underflow".into()));
        }
        segs.push(gk15(f, s.a, m, dim, &mut buf));
        segs.push(gk15(f, m, s.b, dim, &mut buf));
        evals += 30;
    }
}

fn t_max<T: Transcendental>() -> T {
    // decay of the node weights past u = (π/2)·sinh(t) ≈ ln(1/ε)
    let u = (1.0 / T::EPSILON).ln() + 3.0;
    T::from_f64((2.0 * u / std::f64::consts::PI).asinh())
}

/// Tanh-sinh integration over the finite interval `[a, b]`. The integrand
/// returns `None` (or non-finite values) where it cannot be evaluated, e.g.
/// at nodes that round onto a singular endpoint; those nodes are skipped.
pub fn tanh_sinh<T, F>(f: F, dim: usize, a: &T, b: &T, rel_tol: f64) -> Result<Vec<T>>
where
    T: Transcendental,
    F: Fn(&T) -> Option<Vec<T>>,
{
    let two = T::from_f64(2.0);
    let c = (a.clone() + b.clone()) / two.clone();
    let hw = (b.clone() - a.clone()) / two;
    let half_pi = T::pi() / T::from_f64(2.0);
    let node = |t: &T| -> Option<Vec<T>> {
        let u = half_pi.clone() * t.sinh();
        let ch = u.cosh();
        let x = c.clone() + hw.clone() * u.tanh();
        let w = hw.clone() * half_pi.clone() * t.cosh() / (ch.clone() * ch);
        let vals = f(&x)?;
        if vals.iter().any(|v| !v.is_finite_value()) {
            return None;
        }
        Some(vals.into_iter().map(|v| v * w.clone()).collect())
    };
    tanh_sinh_core(node, dim, rel_tol)
}

/// ∫_{−1}^{1} g(x)·(1−x²)^{−1/2} dx by tanh-sinh, with the endpoint factor
/// folded into the substitution (so `g` only needs to be smooth).
pub fn tanh_sinh_chebyshev<T, F>(g: F, dim: usize, rel_tol: f64) -> Result<Vec<T>>
where
    T: Transcendental,
    F: Fn(&T) -> Vec<T>,
{
    let half_pi = T::pi() / T::from_f64(2.0);
    let node = |t: &T| -> Option<Vec<T>> {
        let u = half_pi.clone() * t.sinh();
        let x = u.tanh();
        // dx/√(1−x²) = sech(u)·(π/2)·cosh(t) dt
        let w = half_pi.clone() * t.cosh() / u.cosh();
        Some(g(&x).into_iter().map(|v| v * w.clone()).collect())
    };
    tanh_sinh_core(node, dim, rel_tol)
}

fn tanh_sinh_core<T, N>(node: N, dim: usize, rel_tol: f64) -> Result<Vec<T>>
where
    T: Transcendental,
    N: Fn(&T) -> Option<Vec<T>>,
{
    let tmax = t_max::<T>();
    let mut sum = vec![T::zero(); dim];
    let mut abs = vec![T::zero(); dim];
    let add = |t: T, sum: &mut Vec<T>, abs: &mut Vec<T>| {
        if let Some(v) = node(&t) {
            for (j, x) in v.into_iter().enumerate() {
                abs[j] = abs[j].clone() + x.abs();
                sum[j] = sum[j].clone() + x;
            }
        }
    };
    // level 0: h = 1/2
    let mut h = T::from_f64(0.5);
    let kmax = (tmax.to_f64() / 0.5).ceil() as i64;
    for k in -kmax..=kmax {
        add(h.clone() * T::from_f64(k as f64), &mut sum, &mut abs);
    }
    let mut prev: Vec<T> = sum.iter().map(|s| s.clone() * h.clone()).collect();
    for level in 1..=16 {
        h = h / T::from_f64(2.0);
        let kmax = (tmax.to_f64() / h.to_f64()).ceil() as i64;
        let mut k = -kmax + if kmax % 2 == 0 { 1 } else { 0 };
        while k <= kmax {
            add(h.clone() * T::from_f64(k as f64), &mut sum, &mut abs);
            k += 2;
        }
        let cur: Vec<T> = sum.iter().map(|s| s.clone() * h.clone()).collect();
        let done = level >= 3
            && (0..dim).all(|j| {
                let diff = (cur[j].clone() - prev[j].clone()).abs().to_f64();
                let scale = (abs[j].clone() * h.clone()).to_f64();
                diff <= rel_tol * scale || scale == 0.0
            });
        if done {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence("tanh-sinh did not converge in 16 levels".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Extended, RealScalar, Scalar};

    #[test]
    fn gauss_kronrod_polynomial_moments() {
        let r = gauss_kronrod(
            |x, out: &mut [f64]| {
                out[0] = 1.0;
                out[1] = x * x;
                out[2] = x.powi(4);
            },
            3,
            -1.0,
            1.0,
            1e-12,
            1_000_000,
        )
        .unwrap();
        assert!((r[0] - 2.0).abs() < 1e-14);
        assert!((r[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!((r[2] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn gauss_kronrod_infinite() {
        let pi = std::f64::consts::PI;
        let r = gauss_kronrod(
            |x, out: &mut [f64]| {
                let w = (-x * x).exp();
                out[0] = w;
                out[1] = x * x * w;
            },
            2,
            f64::NEG_INFINITY,
            f64::INFINITY,
            1e-12,
            1_000_000,
        )
        .unwrap();
        assert!((r[0] - pi.sqrt()).abs() < 1e-12);
        assert!((r[1] - pi.sqrt() / 2.0).abs() < 1e-12);
        // Γ(4) = 6 on the half line
        let r = gauss_kronrod(
            |x, out: &mut [f64]| out[0] = x.powi(3) * (-x).exp(),
            1,
            0.0,
            f64::INFINITY,
            1e-12,
            1_000_000,
        )
        .unwrap();
        assert!((r[0] - 6.0).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let r =
            tanh_sinh(|x: &f64| Some(vec![1.0 / ((2.0 - x) * (1.0 - x * x).sqrt())]), 1, &-1.0, &1.0, 1e-12).unwrap();
        let exact = std::f64::consts::PI / 3f64.sqrt();
        assert!((r[0] - exact).abs() < 1e-7, "{}", r[0] - exact);
    }

    #[test]
    fn tanh_sinh_chebyshev_extended() {
        let r: Vec<Extended> =
            tanh_sinh_chebyshev(|x: &Extended| vec![Extended::one() / (Extended::new(2.0) - x.clone())], 1, 1e-100)
                .unwrap();
        let exact = Extended::pi() / Transcendental::sqrt(&Extended::new(3.0));
        let err = (r[0].clone() - exact).abs();
        assert!(err.to_f64() < 1e-95, "{:?}", err);
    }
}
