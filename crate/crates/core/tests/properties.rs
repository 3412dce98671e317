use kerr_blockade::fock::{self, g2, DensityMatrix, CMatrix};
use kerr_blockade::pso::{self, Bounds, PsoConfig, Swarm};
use kerr_blockade::pulse::{fourier_coeffs, GaussianTrain, PulseSpec, RectTrain};
use num_complex::Complex64;
use proptest::prelude::*;

fn gaussian() -> impl Strategy<Value = PulseSpec> {
    (0.0..0.5f64, 0.05..10.0f64, 3.0..8.0f64).prop_map(|(eps_p, a_param, period)| {
        PulseSpec::Gaussian(GaussianTrain {
            eps_p,
            a_param,
            period,
        })
    })
}

fn rect() -> impl Strategy<Value = PulseSpec> {
    (0.0..0.5f64, 0.01..0.5f64, 0.0..0.5f64, 0.01..0.5f64, 3.0..8.0f64).prop_map(|(eps_m, t_r, t_w, t_f, period)| {
        PulseSpec::Rect(RectTrain {
            eps_m,
            t_r,
            t_w,
            t_f,
            period,
        })
    })
}

fn any_pulse() -> impl Strategy<Value = PulseSpec> {
    prop_oneof![gaussian(), rect()]
}

proptest! {
    #[test]
    fn envelope_is_periodic_and_nonnegative(pulse in any_pulse(), t in -20.0..20.0f64, m in -3i32..4) {
        let e = pulse.envelope(1.0, t);
        prop_assert!(e >= 0.0);
        let shifted = pulse.envelope(1.0, t + m as f64 * pulse.period());
        prop_assert!((shifted - e).abs() <= 1e-9 * (1.0 + e));
    }

    #[test]
    fn envelope_scales_linearly(pulse in any_pulse(), t in 0.0..8.0f64, c in 0.0..4.0f64) {
        let lhs = pulse.scaled(c).envelope(1.0, t);
        let rhs = c * pulse.envelope(1.0, t);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn fourier_coefficients_are_conjugate_symmetric(pulse in any_pulse()) {
        let s = fourier_coeffs(&pulse, 1.0, 12).unwrap();
        prop_assert!(s.reality_error() <= 1e-10);
        prop_assert!(s.coeff(0).im.abs() <= 1e-10);
    }

    #[test]
    fn coherent_states_have_unit_g2(re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let alpha = Complex64::new(re, im);
        prop_assume!(alpha.norm_sqr() > 1e-3);
        let rho = DensityMatrix::coherent(40, alpha);
        prop_assert!((g2(&rho, 1e-6).unwrap() - 1.0).abs() < 1e-9);
        prop_assert!((fock::mean_photon(&rho) - alpha.norm_sqr()).abs() < 1e-9);
    }

    #[test]
    fn positivity_check_agrees_with_spectrum(entries in prop::collection::vec(-1.0..1.0f64, 32), shift in -0.3..0.3f64) {
        // Hermitian B + shift·I with B = M†M / tr(M†M)
        let m = CMatrix::from_fn(4, 4, |i, j| Complex64::new(entries[4 * i + j], entries[16 + 4 * i + j]));
        let mut b = m.adjoint() * &m;
        let tr = b.trace().re;
        prop_assume!(tr > 1e-6);
        b /= Complex64::from(tr);
        for k in 0..4 {
            b[(k, k)] += shift;
        }
        let rho = DensityMatrix::from_matrix(b).unwrap();
        let lam = rho.min_eigenvalue();
        prop_assume!(lam.abs() > 1e-9);
        prop_assert_eq!(rho.is_positive_within(0.0), lam > 0.0);
    }

    #[test]
    fn swarm_respects_bounds_and_velocity_limit(
        seed in any::<u64>(),
        n_particles in 1usize..8,
        half in prop::collection::vec(0.1..10.0f64, 1..4),
        v_max_frac in 0.01..1.0f64,
    ) {
        let bounds = Bounds::new(half.iter().map(|h| -h).collect(), half.clone()).unwrap();
        let cfg = PsoConfig { seed, n_particles, v_max_frac, parallel: false, ..Default::default() };
        // optimum outside the box drives particles into the walls
        let f = |x: &[f64]| x.iter().map(|v| (v - 100.0).powi(2)).sum::<f64>();
        let mut swarm = Swarm::init(&bounds, &cfg, &f).unwrap();
        for _ in 0..10 {
            swarm.step(&bounds, &cfg, &f);
            for (x, v) in swarm.positions.iter().zip(&swarm.velocities) {
                prop_assert!(bounds.contains(x));
                for (j, vj) in v.iter().enumerate() {
                    prop_assert!(vj.abs() <= v_max_frac * 2.0 * half[j] * (1.0 + 1e-12));
                }
            }
            let min_pb = swarm.personal_best_fit.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(swarm.global_best_fit, min_pb);
        }
    }

    #[test]
    fn history_is_non_increasing_and_deterministic(seed in any::<u64>()) {
        let bounds = Bounds::new(vec![-3.0; 2], vec![3.0; 2]).unwrap();
        let rastrigin = |x: &[f64]| {
            10.0 * x.len() as f64
                + x.iter().map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos()).sum::<f64>()
        };
        let serial = PsoConfig { seed, n_iters: 20, parallel: false, ..Default::default() };
        let parallel = PsoConfig { parallel: true, ..serial };
        let a = pso::optimize(&bounds, &serial, rastrigin).unwrap();
        let b = pso::optimize(&bounds, &parallel, rastrigin).unwrap();
        prop_assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(&a, &b);
    }
}
