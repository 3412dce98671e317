//! Weak-excitation solution in the two-photon manifold.
//!
//! With `|ψ⟩ ≈ |0⟩ + c₁|1⟩ + c₂|2⟩` and the non-Hermitian effective
//! Hamiltonian, the amplitudes obey
//!
//! ```text
//! dc₁/dt = (-iΔ - γ/2) c₁ - i ε(t)
//! dc₂/dt = [-2i(Δ+U) - γ] c₂ - i√2 ε(t) c₁
//! ```
//!
//! Expanding the periodic drive in harmonics of `ω_p = 2π/T` gives the
//! long-time (periodic) solution as Fourier series. Every `(k, k′)` pair of
//! harmonics is a separate two-photon excitation path; `c₂` is their sum.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::SystemParams;
use crate::integrator::{self, Tolerances};
use crate::pulse::{fourier_coeffs, FourierSeries, PulseSpec};

/// Populations above which the manifold truncation is no longer trusted.
pub const WEAK_EXCITATION_LIMIT: f64 = 0.1;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `χ_k^(1) = -i ε_k / [i(Δ + kω_p) + γ/2]`.
pub fn chi1(k: i64, p: &SystemParams, series: &FourierSeries) -> Complex64 {
    let den = i() * (p.delta + k as f64 * series.omega_p) + p.gamma / 2.0;
    -i() * series.coeff(k) / den
}

/// `χ_{k′k}^(2) = -i√2 ε_{k′} / [i(k+k′)ω_p + 2i(Δ+U) + γ]`.
pub fn chi2(k_prime: i64, k: i64, p: &SystemParams, series: &FourierSeries) -> Complex64 {
    -i() * 2f64.sqrt() * series.coeff(k_prime) / two_photon_denominator(k + k_prime, p, series.omega_p)
}

fn two_photon_denominator(s: i64, p: &SystemParams, omega_p: f64) -> Complex64 {
    i() * (s as f64 * omega_p + 2.0 * (p.delta + p.u)) + p.gamma
}

/// Precomputed response coefficients for one drive and one set of system constants.
#[derive(Debug, Clone)]
pub struct ManifoldAmplitudes {
    pub params: SystemParams,
    pub series: FourierSeries,
    /// `χ_k^(1)` for `k = -K..=K`.
    pub chi1: Vec<Complex64>,
    /// Harmonics of `c₂`: entry `s + 2K` holds `Σ_{k+k′=s} χ_{k′k}^(2) χ_k^(1)`.
    pub c2_harmonics: Vec<Complex64>,
    pub omega_p: f64,
    pub k_max: usize,
}

impl ManifoldAmplitudes {
    pub fn new(p: &SystemParams, series: &FourierSeries) -> Self {
        let k_max = series.k_max as i64;
        let chi1_table: Vec<Complex64> = series.indices().map(|k| chi1(k, p, series)).collect();

        // All paths sharing the total harmonic s = k + k′ share a denominator,
        // so the double sum collapses to a convolution of ε with χ^(1).
        let prefactor = -i() * 2f64.sqrt();
        let c2_harmonics = (-2 * k_max..=2 * k_max)
            .map(|s| {
                let lo = (s - k_max).max(-k_max);
                let hi = (s + k_max).min(k_max);
                let conv: Complex64 = (lo..=hi)
                    .map(|k| series.coeff(s - k) * chi1_table[(k + k_max) as usize])
                    .sum();
                prefactor * conv / two_photon_denominator(s, p, series.omega_p)
            })
            .collect();

        Self {
            params: *p,
            series: series.clone(),
            chi1: chi1_table,
            c2_harmonics,
            omega_p: series.omega_p,
            k_max: series.k_max,
        }
    }

    pub fn chi1_at(&self, k: i64) -> Complex64 {
        let idx = k + self.k_max as i64;
        if idx < 0 || idx as usize >= self.chi1.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.chi1[idx as usize]
        }
    }

    /// Contribution of the single excitation path `(k′, k)` to `c₂(t)`.
    pub fn path(&self, k_prime: i64, k: i64, t: f64) -> Complex64 {
        chi2(k_prime, k, &self.params, &self.series)
            * self.chi1_at(k)
            * Complex64::from_polar(1.0, (k + k_prime) as f64 * self.omega_p * t)
    }
}

/// `c₁(t) = Σ_k χ_k^(1) e^{ikω_p t}`.
pub fn c1_series(t: f64, amp: &ManifoldAmplitudes) -> Complex64 {
    let k_max = amp.k_max as i64;
    (-k_max..=k_max)
        .zip(&amp.chi1)
        .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * amp.omega_p * t))
        .sum()
}

/// `c₂(t) = Σ_{k′} Σ_k χ_{k′k}^(2) χ_k^(1) e^{i(k+k′)ω_p t}`.
pub fn c2_series(t: f64, amp: &ManifoldAmplitudes) -> Complex64 {
    let s_max = 2 * amp.k_max as i64;
    (-s_max..=s_max)
        .zip(&amp.c2_harmonics)
        .map(|(s, c)| c * Complex64::from_polar(1.0, s as f64 * amp.omega_p * t))
        .sum()
}

/// The same double sum evaluated path by path, without the convolution shortcut.
pub fn c2_direct(t: f64, amp: &ManifoldAmplitudes) -> Complex64 {
    let k_max = amp.k_max as i64;
    let mut total = Complex64::new(0.0, 0.0);
    for kp in -k_max..=k_max {
        for k in -k_max..=k_max {
            total += amp.path(kp, k, t);
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPopulations {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    /// Set when the largest `P₁` exceeds [`WEAK_EXCITATION_LIMIT`].
    pub weak_excitation_violated: bool,
}

/// `P₁ = |c₁|²`, `P₂ = |c₂|²` on `t_grid` from the periodic solution.
pub fn analytic_populations(
    t_grid: &[f64],
    p: &SystemParams,
    pulse: &PulseSpec,
    k_max: usize,
) -> Result<AnalyticPopulations> {
    let series = fourier_coeffs(pulse, p.gamma, k_max)?;
    Ok(populations_from(t_grid, &ManifoldAmplitudes::new(p, &series)))
}

pub fn populations_from(t_grid: &[f64], amp: &ManifoldAmplitudes) -> AnalyticPopulations {
    let p1: Vec<f64> = t_grid.iter().map(|&t| c1_series(t, amp).norm_sqr()).collect();
    let p2 = t_grid.iter().map(|&t| c2_series(t, amp).norm_sqr()).collect();
    let max_p1 = p1.iter().copied().fold(0.0, f64::max);
    let weak_excitation_violated = max_p1 > WEAK_EXCITATION_LIMIT;
    if weak_excitation_violated {
        log::warn!(
            "weak-excitation assumption violated: max P1 = {max_p1:.3e} > {WEAK_EXCITATION_LIMIT}"
        );
    }
    AnalyticPopulations {
        p1,
        p2,
        weak_excitation_violated,
    }
}

/// Time-domain amplitudes from direct integration of the manifold equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldTrajectory {
    pub times: Vec<f64>,
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
}

/// Integrates the manifold equations from `c₁ = c₂ = 0` and samples every `dt_out`.
pub fn integrate_manifold_ode(
    t_end: f64,
    dt_out: f64,
    p: &SystemParams,
    pulse: &PulseSpec,
) -> Result<ManifoldTrajectory> {
    p.validate()?;
    pulse.validate()?;
    let times = crate::fock::uniform_grid(0.0, t_end, dt_out);
    let one_photon = Complex64::new(0.0, -p.delta) - p.gamma / 2.0;
    let two_photon = Complex64::new(0.0, -2.0 * (p.delta + p.u)) - p.gamma;
    let sqrt2 = 2f64.sqrt();
    let tol = Tolerances {
        rtol: 1e-11,
        atol: 1e-16,
        h_max: pulse.max_step(p.gamma),
        ..Tolerances::default()
    };
    let mut out = ManifoldTrajectory {
        times: Vec::with_capacity(times.len()),
        c1: Vec::with_capacity(times.len()),
        c2: Vec::with_capacity(times.len()),
    };
    integrator::integrate(
        |t, y, dy| {
            let eps = pulse.envelope(p.gamma, t);
            dy[0] = one_photon * y[0] - i() * eps;
            dy[1] = two_photon * y[1] - i() * sqrt2 * eps * y[0];
        },
        0.0,
        &[Complex64::new(0.0, 0.0); 2],
        &times,
        &pulse.kinks(t_end),
        &tol,
        |_, t, y| {
            out.times.push(t);
            out.c1.push(y[0]);
            out.c2.push(y[1]);
            Ok(())
        },
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{GaussianTrain, RectTrain};
    use approx::assert_abs_diff_eq;

    fn reference_point() -> (SystemParams, PulseSpec) {
        (
            SystemParams::new(0.5, 0.05),
            PulseSpec::Gaussian(GaussianTrain {
                eps_p: 0.1,
                a_param: 5.27,
                period: 5.0,
            }),
        )
    }

    /// Series with only `ε_0` set: a constant drive.
    fn constant_series(eps0: f64, k_max: usize) -> FourierSeries {
        let mut s = FourierSeries::zero(1.3, k_max);
        s.coeffs[k_max] = Complex64::new(eps0, 0.0);
        s
    }

    #[test]
    fn chi1_examples() {
        let p = SystemParams::new(0.0, 0.0);
        let s = constant_series(0.02, 3);
        let v = chi1(0, &p, &s);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, -0.04, epsilon = 1e-15);
        assert_eq!(chi1(2, &p, &s), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chi2_examples() {
        let p = SystemParams::new(0.2, -0.2);
        let s = constant_series(0.03, 3);
        let v = chi2(0, 0, &p, &s);
        assert_abs_diff_eq!((v - Complex64::new(0.0, -2f64.sqrt() * 0.03)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(chi2(1, 0, &p, &s), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chi_bounds() {
        let (p, pulse) = reference_point();
        let s = fourier_coeffs(&pulse, 1.0, 50).unwrap();
        for k in -50..=50 {
            assert!(chi1(k, &p, &s).norm() <= 2.0 * s.coeff(k).norm() / p.gamma + 1e-18);
            for kp in [-50, -3, 0, 7, 50] {
                assert!(chi2(kp, k, &p, &s).norm() <= 2f64.sqrt() * s.coeff(kp).norm() / p.gamma + 1e-18);
            }
        }
    }

    #[test]
    fn constant_drive_collapses_to_single_path() {
        let p = SystemParams::new(0.4, 0.05);
        let eps0 = 0.02;
        let amp = ManifoldAmplitudes::new(&p, &constant_series(eps0, 4));
        let c1_expected = -i() * eps0 / (i() * p.delta + p.gamma / 2.0);
        let c2_expected = -i() * 2f64.sqrt() * eps0 / (2.0 * i() * (p.delta + p.u) + p.gamma) * c1_expected;
        for t in [0.0, 0.7, 3.1] {
            assert_abs_diff_eq!((c1_series(t, &amp) - c1_expected).norm(), 0.0, epsilon = 1e-16);
            assert_abs_diff_eq!((c2_series(t, &amp) - c2_expected).norm(), 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn zero_drive_gives_zero() {
        let p = SystemParams::new(0.4, 0.05);
        let amp = ManifoldAmplitudes::new(&p, &FourierSeries::zero(1.0, 5));
        assert_eq!(c1_series(0.3, &amp), Complex64::new(0.0, 0.0));
        assert_eq!(c2_series(0.3, &amp), Complex64::new(0.0, 0.0));
        let pops = populations_from(&[0.0, 1.0], &amp);
        assert_eq!(pops.p1, vec![0.0, 0.0]);
        assert_eq!(pops.p2, vec![0.0, 0.0]);
        assert!(!pops.weak_excitation_violated);
    }

    #[test]
    fn convolution_matches_path_sum() {
        let (p, pulse) = reference_point();
        let s = fourier_coeffs(&pulse, 1.0, 20).unwrap();
        let amp = ManifoldAmplitudes::new(&p, &s);
        for t in [0.0, 1.234, 4.79] {
            let fast = c2_series(t, &amp);
            let slow = c2_direct(t, &amp);
            assert!((fast - slow).norm() <= 1e-12 * slow.norm().max(1e-20), "{fast} vs {slow}");
        }
    }

    #[test]
    fn constant_drive_ode_reaches_fixed_point() {
        // A rectangular train with no quiet time and a flat top is constant
        // except for the ramps; use a long flat top and check the plateau.
        let p = SystemParams::new(0.3, 0.05);
        let pulse = PulseSpec::Rect(RectTrain {
            eps_m: 0.05,
            t_r: 0.01,
            t_w: 39.98,
            t_f: 0.01,
            period: 40.0,
        });
        let traj = integrate_manifold_ode(30.0, 0.5, &p, &pulse).unwrap();
        let fixed = -i() * 0.05 / (i() * p.delta + p.gamma / 2.0);
        assert!((traj.c1.last().unwrap() - fixed).norm() < 1e-7);
    }

    #[test]
    fn ode_with_zero_drive_stays_zero() {
        let p = SystemParams::new(0.3, 0.05);
        let pulse = PulseSpec::Rect(RectTrain {
            eps_m: 1e-300,
            t_r: 0.1,
            t_w: 0.1,
            t_f: 0.1,
            period: 1.0,
        });
        let traj = integrate_manifold_ode(5.0, 0.1, &p, &pulse).unwrap();
        assert!(traj.c1.iter().chain(&traj.c2).all(|c| c.norm() < 1e-250));
    }
}
