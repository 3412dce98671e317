//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// Integrates `f` over `[a, b]` split first at the given interior
/// `breakpoints`, subdividing each panel until its error estimate is below
/// its share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
) -> Result<Complex64> {
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(|x, y| x.total_cmp(y));
    edges.dedup();
    let span = b - a;
    let mut total = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let tol = abs_tol * (w[1] - w[0]) / span;
        let (est, err) = kronrod(&f, w[0], w[1]);
        total += refine(&f, w[0], w[1], est, err, tol, 0)?;
    }
    Ok(total)
}

fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    est: Complex64,
    err: f64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    if err <= tol {
        return Ok(est);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numeric(format!(
            "quadrature did not converge on [{a}, {b}] (error estimate {err:e})"
        )));
    }
    let mid = 0.5 * (a + b);
    let (left, left_err) = kronrod(f, a, mid);
    let (right, right_err) = kronrod(f, mid, b);
    Ok(refine(f, a, mid, left, left_err, 0.5 * tol, depth + 1)?
        + refine(f, mid, b, right, right_err, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory() {
        let v = integrate(|x| Complex64::new(x * x, 0.0), 0.0, 3.0, &[], 1e-12).unwrap();
        assert!((v.re - 9.0).abs() < 1e-12);

        // ∫_0^{2π} e^{-i 7 x} dx = 0, ∫ x e^{-ix} dx over [0, 2π] = 2πi
        let two_pi = std::f64::consts::TAU;
        let v = integrate(|x| Complex64::from_polar(1.0, -7.0 * x), 0.0, two_pi, &[], 1e-12).unwrap();
        assert!(v.norm() < 1e-12);
        let v = integrate(|x| Complex64::from_polar(x, -x), 0.0, two_pi, &[], 1e-12).unwrap();
        assert!((v - Complex64::new(0.0, two_pi)).norm() < 1e-11);
    }

    #[test]
    fn kink_with_breakpoint() {
        let v = integrate(|x| Complex64::new((x - 0.3).abs(), 0.0), 0.0, 1.0, &[0.3], 1e-13).unwrap();
        assert!((v.re - (0.045 + 0.245)).abs() < 1e-13);
    }
}
