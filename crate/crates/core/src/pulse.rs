//! Periodic drive envelopes and their Fourier series.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Half-width, in units of `1/(Aγ)`, beyond which Gaussian tails are dropped.
pub const GAUSSIAN_WINDOW: f64 = 8.0;
pub const DEFAULT_K_GAUSSIAN: usize = 50;
pub const DEFAULT_K_RECT: usize = 400;
/// Absolute accuracy of every Fourier coefficient.
pub const COEFF_ABS_TOL: f64 = 1e-10;

/// Train of Gaussian pulses of unit-normalized area `eps_p / γ`, one per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTrain {
    pub eps_p: f64,
    /// Inverse duration parameter: larger is shorter.
    #[serde(rename = "A")]
    pub a_param: f64,
    #[serde(rename = "T")]
    pub period: f64,
}

/// Train of trapezoidal pulses: linear rise, flat top, linear fall, then quiet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectTrain {
    pub eps_m: f64,
    pub t_r: f64,
    pub t_w: f64,
    pub t_f: f64,
    #[serde(rename = "T")]
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PulseSpec {
    Gaussian(GaussianTrain),
    Rect(RectTrain),
}

/// Non-negative remainder of `t` modulo `period`.
fn phase(t: f64, period: f64) -> f64 {
    let r = t.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

impl GaussianTrain {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.a_param, self.period].iter().all(|v| *v > 0.0 && v.is_finite());
        if positive && self.eps_p >= 0.0 && self.eps_p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "Gaussian train needs eps_p >= 0 and positive A, T, got {self:?}"
            )))
        }
    }

    fn half_window(&self, gamma: f64) -> f64 {
        GAUSSIAN_WINDOW / (self.a_param * gamma)
    }
}

/// `(ε_p A/√π) Σ_m exp[-A²γ²(t - mT)²]`, keeping only pulses within the tail window.
pub fn gaussian_envelope(p: &GaussianTrain, gamma: f64, t: f64) -> f64 {
    let width = p.a_param * gamma;
    let reach = p.half_window(gamma);
    let prefactor = p.eps_p * p.a_param / PI.sqrt();
    let m_lo = ((t - reach) / p.period).ceil() as i64;
    let m_hi = ((t + reach) / p.period).floor() as i64;
    let mut sum = 0.0;
    for m in m_lo..=m_hi {
        let x = width * (t - m as f64 * p.period);
        sum += (-x * x).exp();
    }
    prefactor * sum
}

impl RectTrain {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.t_r, self.t_f, self.period]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !positive || !(self.t_w >= 0.0) || !(self.eps_m >= 0.0 && self.eps_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rectangular train needs positive t_r, t_f, T and eps_m, t_w >= 0, got {self:?}"
            )));
        }
        if self.t3() > self.period {
            return Err(Error::InvalidParameter(format!(
                "pulse does not fit its period: t_r + t_w + t_f = {} > T = {}",
                self.t3(),
                self.period
            )));
        }
        Ok(())
    }

    /// End of the flat top.
    pub fn t2(&self) -> f64 {
        self.t_r + self.t_w
    }

    /// End of the falling edge.
    pub fn t3(&self) -> f64 {
        self.t_r + self.t_w + self.t_f
    }

    /// Corner instants within one period, in `[0, T)`.
    pub fn corners(&self) -> [f64; 4] {
        [0.0, self.t_r, self.t2(), self.t3()]
    }
}

pub fn rect_envelope(p: &RectTrain, t: f64) -> f64 {
    let tp = phase(t, p.period);
    if tp < p.t_r {
        p.eps_m * tp / p.t_r
    } else if tp < p.t2() {
        p.eps_m
    } else if tp < p.t3() {
        p.eps_m * (p.t3() - tp) / p.t_f
    } else {
        0.0
    }
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian(g) => g.validate(),
            Self::Rect(r) => r.validate(),
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Self::Gaussian(g) => g.period,
            Self::Rect(r) => r.period,
        }
    }

    pub fn envelope(&self, gamma: f64, t: f64) -> f64 {
        match self {
            Self::Gaussian(g) => gaussian_envelope(g, gamma, t),
            Self::Rect(r) => rect_envelope(r, t),
        }
    }

    /// A copy with the amplitude parameter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Self::Gaussian(g) => Self::Gaussian(GaussianTrain {
                eps_p: g.eps_p * factor,
                ..g
            }),
            Self::Rect(r) => Self::Rect(RectTrain {
                eps_m: r.eps_m * factor,
                ..r
            }),
        }
    }

    pub fn default_k_max(&self) -> usize {
        match self {
            Self::Gaussian(_) => DEFAULT_K_GAUSSIAN,
            Self::Rect(_) => DEFAULT_K_RECT,
        }
    }

    /// Largest step an integrator may take without skipping over envelope features.
    pub fn max_step(&self, gamma: f64) -> f64 {
        match self {
            Self::Gaussian(g) => (0.25 / (g.a_param * gamma)).min(g.period / 4.0),
            Self::Rect(r) => r.period / 4.0,
        }
    }

    /// Times in `(0, t_end)` where the envelope has a slope discontinuity.
    pub fn kinks(&self, t_end: f64) -> Vec<f64> {
        match self {
            Self::Gaussian(_) => Vec::new(),
            Self::Rect(r) => {
                let mut out = Vec::new();
                let mut start = 0.0;
                let mut m = 0u64;
                while start < t_end {
                    for c in r.corners() {
                        let t = start + c;
                        if t > 0.0 && t < t_end {
                            out.push(t);
                        }
                    }
                    m += 1;
                    start = m as f64 * r.period;
                }
                out.dedup();
                out
            }
        }
    }
}

/// Truncated Fourier series `Σ_{k=-K}^{K} ε_k e^{ikω_p t}` of a periodic envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub omega_p: f64,
    /// Coefficients for `k = -K..=K`; index `k + K`.
    pub coeffs: Vec<Complex64>,
    pub k_max: usize,
}

impl FourierSeries {
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k + self.k_max as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        let k = self.k_max as i64;
        -k..=k
    }

    /// Largest violation of `ε_{-k} = conj(ε_k)`.
    pub fn reality_error(&self) -> f64 {
        (1..=self.k_max as i64)
            .map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn zero(omega_p: f64, k_max: usize) -> Self {
        Self {
            omega_p,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1],
            k_max,
        }
    }
}

/// `ε_k = (1/T) ∫_0^T ε(t) e^{-ikω_p t} dt` for `k = -K..=K`.
pub fn fourier_coeffs(pulse: &PulseSpec, gamma: f64, k_max: usize) -> Result<FourierSeries> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    pulse.validate()?;
    let period = pulse.period();
    let omega_p = TAU / period;

    // Integrate over a period chosen so that every pulse feature is a panel edge.
    let (a, b, breaks): (f64, f64, Vec<f64>) = match pulse {
        PulseSpec::Gaussian(g) => {
            let w = g.half_window(gamma).min(period / 2.0);
            let mut br = vec![0.0, -w, w];
            // Narrow pulses: a few extra panels across the peak.
            br.extend([-0.5, 0.5, -2.0, 2.0].map(|s| s / (g.a_param * gamma)).into_iter().filter(|x| x.abs() < w));
            (-period / 2.0, period / 2.0, br)
        }
        PulseSpec::Rect(r) => (0.0, period, r.corners().to_vec()),
    };

    let mut positive = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let freq = k as f64 * omega_p;
        let integral = quadrature::integrate(
            |t| Complex64::from_polar(pulse.envelope(gamma, t), -freq * t),
            a,
            b,
            &breaks,
            COEFF_ABS_TOL * period,
        )?;
        positive.push(integral / period);
    }
    let mut coeffs = Vec::with_capacity(2 * k_max + 1);
    coeffs.extend(positive[1..].iter().rev().map(|c| c.conj()));
    coeffs.extend(positive.iter().copied());
    Ok(FourierSeries {
        omega_p,
        coeffs,
        k_max,
    })
}

/// Imaginary residual above which a reconstruction is rejected.
pub const RECONSTRUCT_IMAG_TOL: f64 = 1e-6;

/// Sums the series at `t` and returns its real part.
pub fn reconstruct(series: &FourierSeries, t: f64) -> Result<f64> {
    let z: Complex64 = series
        .indices()
        .map(|k| series.coeff(k) * Complex64::from_polar(1.0, k as f64 * series.omega_p * t))
        .sum();
    if z.im.abs() > RECONSTRUCT_IMAG_TOL {
        return Err(Error::SymmetryViolation(z.im.abs(), t));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn reference_gaussian() -> GaussianTrain {
        GaussianTrain {
            eps_p: 0.1,
            a_param: 5.27,
            period: 5.0,
        }
    }

    pub(crate) fn reference_rect() -> RectTrain {
        RectTrain {
            eps_m: 0.465,
            t_r: 0.468,
            t_w: 0.372,
            t_f: 0.016,
            period: 4.365,
        }
    }

    #[test]
    fn gaussian_peak_and_trough() {
        let g = reference_gaussian();
        let peak = 0.1 * 5.27 / PI.sqrt();
        for m in 0..4 {
            assert_abs_diff_eq!(gaussian_envelope(&g, 1.0, m as f64 * 5.0), peak, epsilon = 1e-15);
            assert!(gaussian_envelope(&g, 1.0, m as f64 * 5.0 + 2.5) < 1e-100);
        }
        assert_abs_diff_eq!(peak, 0.29733, epsilon = 1e-5);
    }

    /// Composite Simpson rule on a fine grid: independent of the adaptive quadrature.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn gaussian_area_per_period() {
        let g = reference_gaussian();
        let area = simpson(|t| gaussian_envelope(&g, 1.0, t), 0.0, 5.0, 200_000);
        assert_abs_diff_eq!(area, 0.1, epsilon = 1e-9);
        let area = simpson(|t| gaussian_envelope(&g, 2.0, t), -2.5, 2.5, 200_000);
        assert_abs_diff_eq!(area, 0.05, epsilon = 1e-9);
    }

    #[test]
    fn rect_segments() {
        let r = reference_rect();
        let t3 = r.t3();
        for m in [0.0, 1.0, 7.0] {
            let off = m * r.period;
            assert_abs_diff_eq!(rect_envelope(&r, off + r.t_r), r.eps_m, epsilon = 1e-12);
            assert_abs_diff_eq!(rect_envelope(&r, off + r.t_r / 2.0), r.eps_m / 2.0, epsilon = 1e-12);
            assert_eq!(rect_envelope(&r, off + (t3 + r.period) / 2.0), 0.0);
            assert_abs_diff_eq!(rect_envelope(&r, off + t3), 0.0, epsilon = 1e-12);
        }
        // continuity at the falling corner
        let t2 = r.t2();
        assert_abs_diff_eq!(rect_envelope(&r, t2 - 1e-12), rect_envelope(&r, t2 + 1e-12), epsilon = 1e-9);
    }

    #[test]
    fn negative_times_extend_periodically() {
        let r = reference_rect();
        assert_abs_diff_eq!(rect_envelope(&r, -r.period + 0.2), rect_envelope(&r, 0.2), epsilon = 1e-12);
        let g = reference_gaussian();
        assert_abs_diff_eq!(gaussian_envelope(&g, 1.0, -0.05), gaussian_envelope(&g, 1.0, 0.05), epsilon = 1e-15);
    }

    #[test]
    fn rect_validation() {
        let mut r = reference_rect();
        r.t_w = 5.0;
        assert!(r.validate().is_err());
        assert!(reference_rect().validate().is_ok());
    }

    #[test]
    fn gaussian_coefficients_match_closed_form() {
        let g = reference_gaussian();
        let s = fourier_coeffs(&PulseSpec::Gaussian(g), 1.0, 50).unwrap();
        assert_abs_diff_eq!(s.coeff(0).re, 0.02, epsilon = 1e-9);
        for k in -50..=50_i64 {
            let w = k as f64 * s.omega_p;
            let expected = 0.1 / 5.0 * (-(w * w) / (4.0 * 5.27 * 5.27)).exp();
            assert_abs_diff_eq!(s.coeff(k).norm(), expected, epsilon = 1e-9);
        }
        assert!(s.reality_error() < 1e-10);
    }

    #[test]
    fn gaussian_series_reconstructs_envelope() {
        let g = reference_gaussian();
        let s = fourier_coeffs(&PulseSpec::Gaussian(g), 1.0, 50).unwrap();
        for i in 0..200 {
            let t = i as f64 * 0.0731;
            assert_abs_diff_eq!(reconstruct(&s, t).unwrap(), gaussian_envelope(&g, 1.0, t), epsilon = 1e-8);
        }
    }

    #[test]
    fn rect_series_flat_top() {
        let r = reference_rect();
        let s = fourier_coeffs(&PulseSpec::Rect(r), 1.0, 400).unwrap();
        assert!(s.reality_error() < 1e-10);
        let lo = r.t_r + 0.05;
        let hi = r.t2() - 0.05;
        for i in 0..=20 {
            let t = lo + (hi - lo) * i as f64 / 20.0;
            assert_abs_diff_eq!(reconstruct(&s, t).unwrap(), r.eps_m, epsilon = 1e-3);
        }
    }

    #[test]
    fn zero_series_and_symmetry_violation() {
        let s = FourierSeries::zero(1.0, 5);
        assert_eq!(reconstruct(&s, 0.3).unwrap(), 0.0);
        let mut bad = FourierSeries::zero(1.0, 2);
        bad.coeffs[3] = Complex64::new(0.0, 1.0);
        assert!(matches!(reconstruct(&bad, 0.0), Err(Error::SymmetryViolation(..))));
    }

    #[test]
    fn parseval_gaussian() {
        let g = reference_gaussian();
        let s = fourier_coeffs(&PulseSpec::Gaussian(g), 1.0, 60).unwrap();
        let spectral: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum();
        let temporal = simpson(|t| gaussian_envelope(&g, 1.0, t).powi(2), -2.5, 2.5, 200_000) / 5.0;
        assert!(((spectral - temporal) / temporal).abs() < 1e-6);
    }

    #[test]
    fn reconstruction_error_shrinks_with_k() {
        let r = reference_rect();
        let pulse = PulseSpec::Rect(r);
        let grid: Vec<f64> = (0..300).map(|i| i as f64 * r.period / 300.0).collect();
        let mut prev = f64::INFINITY;
        for k in [25, 50, 100, 200, 400] {
            let s = fourier_coeffs(&pulse, 1.0, k).unwrap();
            let err = grid
                .iter()
                .map(|&t| (reconstruct(&s, t).unwrap() - rect_envelope(&r, t)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev, "k={k}: {err} !< {prev}");
            prev = err;
        }
    }

    #[test]
    fn config_format() {
        let g: PulseSpec = serde_json::from_str(r#"{"type":"gaussian","eps_p":0.1,"A":5.27,"T":5}"#).unwrap();
        assert_eq!(g, PulseSpec::Gaussian(reference_gaussian()));
        let r: PulseSpec = serde_json::from_str(
            r#"{"type":"rect","eps_m":0.465,"t_r":0.468,"t_w":0.372,"t_f":0.016,"T":4.365}"#,
        )
        .unwrap();
        assert_eq!(r, PulseSpec::Rect(reference_rect()));
        let back = serde_json::to_value(r).unwrap();
        assert_eq!(back["type"], "rect");
        assert!(serde_json::from_str::<PulseSpec>(r#"{"type":"gaussian","eps_p":0.1,"A":5.27,"T":5,"x":1}"#).is_err());
    }
}
