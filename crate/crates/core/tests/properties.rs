use num_complex::Complex;
use proptest::prelude::*;

use resetwalk::analytic::{monotone_propagator_dl, propagator_fl, stationary_cf, ExpJumps, PureDrift};
use resetwalk::inversion::mfpt_general;
use resetwalk::optimize::{optimal_rate_exp_jumps, optimal_rate_pure_drift, Regime};
use resetwalk::{Direction, JumpLaw, ModelParams};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn dir() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Plus), Just(Direction::Minus)]
}

fn law() -> impl Strategy<Value = JumpLaw> {
    prop_oneof![
        (0.3..5.0f64).prop_map(|rate| JumpLaw::Exponential { rate }),
        (0.01..1.0f64).prop_map(|size| JumpLaw::Deterministic { size }),
        Just(JumpLaw::Zero),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn survival_transform_at_zero_is_the_mfpt(
        lam in 0.05..5.0f64, rho in 0.05..1.0f64, speed in 0.2..3.0f64,
        gamma in 0.2..6.0f64, level in 0.2..3.0f64, frac in 0.0..1.0f64, d in dir(),
    ) {
        let x = match d { Direction::Plus => frac * level, Direction::Minus => -frac * level };
        let m = PureDrift::new(lam, speed, rho, level).unwrap();
        prop_assert!(rel(m.sp_laplace(0.0, x, d).unwrap(), m.mfpt(x, d).unwrap()) <= 1e-12);
        let e = ExpJumps::new(lam, speed, gamma, rho, level).unwrap();
        prop_assert!(rel(e.sp_laplace(0.0, 0.0, d).unwrap(), e.mfpt(0.0, d).unwrap()) <= 1e-12);
    }

    #[test]
    fn survival_transform_is_positive_and_decreasing(
        lam in 0.05..5.0f64, rho in 0.05..1.0f64, gamma in 0.2..6.0f64, d in dir(),
    ) {
        let m = PureDrift::new(lam, 1.0, rho, 1.0).unwrap();
        let e = ExpJumps::new(lam, 1.0, gamma, rho, 1.0).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for k in 0..40 {
            let s = 1e-3 * 1.5f64.powi(k);
            let cur = (m.sp_laplace(s, 0.0, d).unwrap(), e.sp_laplace(s, 0.0, d).unwrap());
            prop_assert!(cur.0 > 0.0 && cur.1 > 0.0);
            prop_assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
    }

    #[test]
    fn one_direction_reduces_to_monotone_walk(
        lam in 0.05..5.0f64, speed in 0.0..3.0f64, jr in 0.0..3.0f64, law in law(),
        omega in -10.0..10.0f64, sr in 0.01..10.0f64, si in -5.0..5.0f64,
    ) {
        prop_assume!(speed > 0.0 || (jr > 0.0 && law != JumpLaw::Zero));
        let p = ModelParams::new(lam, 1.0).with_plus(speed, jr, law).with_minus(1.0, 0.0, JumpLaw::Zero);
        let s = Complex::new(sr, si);
        let a = propagator_fl(&p, omega, s, 0.0, Direction::Plus).unwrap();
        let b = monotone_propagator_dl(lam, jr, speed, &p.jump_law_plus, Complex::new(0.0, -omega), s, 0.0);
        prop_assert!((a - b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn stationary_cf_is_normalized_and_bounded(
        lam in 0.05..5.0f64, rho in 0.0..1.0f64, sp in 0.0..3.0f64, sm in 0.0..3.0f64,
        jp in 0.0..3.0f64, jm in 0.0..3.0f64, lp in law(), lm in law(), omega in -20.0..20.0f64,
    ) {
        let p = ModelParams::new(lam, rho).with_plus(sp, jp, lp).with_minus(sm, jm, lm);
        prop_assume!(p.validate().is_ok());
        prop_assert_eq!(stationary_cf(&p, 0.0).unwrap(), Complex::new(1.0, 0.0));
        prop_assert!(stationary_cf(&p, omega).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn closed_form_mfpt_grows_with_level(
        lam in 0.05..5.0f64, rho in 0.05..1.0f64, gamma in 0.2..6.0f64, level in 0.1..3.0f64,
    ) {
        let up = level * 1.1;
        prop_assert!(
            PureDrift::new(lam, 1.0, rho, up).unwrap().mfpt_unconditional()
                > PureDrift::new(lam, 1.0, rho, level).unwrap().mfpt_unconditional()
        );
        prop_assert!(
            ExpJumps::new(lam, 1.0, gamma, rho, up).unwrap().mfpt_unconditional()
                > ExpJumps::new(lam, 1.0, gamma, rho, level).unwrap().mfpt_unconditional()
        );
    }

    #[test]
    fn interior_optima_are_local_minima(rho in 0.02..0.98f64, gl in 0.2..6.0f64) {
        let r = optimal_rate_pure_drift(1.0, 1.0, rho).unwrap();
        let lam = r.lambda_star.unwrap();
        for f in [0.9, 1.1] {
            prop_assert!(PureDrift::new(lam * f, 1.0, rho, 1.0).unwrap().mfpt_unconditional() > r.mfpt_star);
        }
        let r = optimal_rate_exp_jumps(1.0, gl, 1.0, rho).unwrap();
        if r.regime == Regime::InteriorMinimum {
            let lam = r.lambda_star.unwrap();
            for f in [0.9, 1.1] {
                prop_assert!(ExpJumps::new(lam * f, 1.0, gl, rho, 1.0).unwrap().mfpt_unconditional() > r.mfpt_star);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn numerical_mfpt_grows_with_level(
        lam in 0.1..3.0f64, rho in 0.1..1.0f64, speed in 0.0..2.0f64, jr in 0.0..2.0f64, law in law(),
    ) {
        // beyond e^{Λℓ/v} ≈ e^{25} crossing before a reset is lost in round-off
        prop_assume!(lam * 2.0 / (speed + jr * law.mean()) < 25.0);
        let p = ModelParams::new(lam, rho).with_plus(speed, jr, law).with_minus(1.0, 0.0, JumpLaw::Zero);
        let mut prev = 0.0;
        for k in 1..=8 {
            let t = mfpt_general(&p, 0.25 * k as f64, 0.0, Direction::Plus).unwrap();
            prop_assert!(t >= prev * (1.0 - 1e-9), "level {}: {} < {}", 0.25 * k as f64, t, prev);
            prev = t;
        }
    }

    #[test]
    fn minus_start_forgets_its_position(
        lam in 0.1..3.0f64, rho in 0.1..1.0f64, speed in 0.0..2.0f64, jr in 0.0..2.0f64, law in law(), frac in 0.0..1.0f64,
    ) {
        // beyond e^{Λℓ/v} ≈ e^{25} crossing before a reset is lost in round-off
        prop_assume!(lam * 2.0 / (speed + jr * law.mean()) < 25.0);
        let p = ModelParams::new(lam, rho).with_plus(speed, jr, law).with_minus(1.0, 0.0, JumpLaw::Zero);
        let a = mfpt_general(&p, 1.0, 0.0, Direction::Minus).unwrap();
        let b = mfpt_general(&p, 1.0, -frac, Direction::Minus).unwrap();
        prop_assert!(rel(a, b) <= 1e-10);
    }
}
