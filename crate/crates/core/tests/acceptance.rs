//! Acceptance criteria. Each test prints a single `PASS`/`FAIL` line.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resetwalk::analytic::{
    monotone_propagator_dl, propagator_fl, stationary_cf, ExpDriftStationary, ExpJumps, PureDrift,
};
use resetwalk::inversion::{laplace_invert, mfpt_general, survival_exp_jumps, survival_pure_drift, InversionConfig};
use resetwalk::optimize::{default_bracket, minimize_mfpt_numeric, optimal_rate_exp_jumps, xi_root, Regime};
use resetwalk::quadrature::integrate;
use resetwalk::simulate::{estimate_mfpt, estimate_stationary, estimate_survival};
use resetwalk::{Direction, JumpLaw, ModelParams};

const RHO_GRID: [f64; 5] = [0.25, 0.4375, 0.625, 0.8125, 1.0];
const RATE_GRID: [f64; 5] = [0.2, 0.9, 1.6, 2.3, 3.0];
const MC_PATHS: u64 = 100_000;

fn report(criterion: u32, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {criterion}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Counts grid points whose Monte Carlo MFPT is within four standard errors
/// of the exact value.
fn mc_grid_hits(make: impl Fn(f64, f64) -> (ModelParams, f64), seed: u64) -> (usize, Vec<String>) {
    let mut hits = 0;
    let mut misses = Vec::new();
    for (i, &rho) in RHO_GRID.iter().enumerate() {
        for (j, &x) in RATE_GRID.iter().enumerate() {
            let (p, exact) = make(rho, x);
            let est = estimate_mfpt(&p, 1.0, MC_PATHS, None, seed + (5 * i + j) as u64)
                .unwrap()
                .require_uncensored()
                .unwrap();
            if est.within(exact, 4.0) {
                hits += 1;
            } else {
                misses.push(format!("(rho={rho}, {x}: {:.5}±{:.5} vs {exact:.5})", est.mean, est.stderr));
            }
        }
    }
    (hits, misses)
}

fn criterion_1_pure_drift_monte_carlo() {
    // Λℓ/Γ on the grid with ℓ = Γ = 1
    let (hits, misses) = mc_grid_hits(
        |rho, x| {
            let p = ModelParams::pure_drift(x, rho, 1.0);
            let exact = PureDrift::from_params(&p, 1.0).unwrap().mfpt_unconditional();
            (p, exact)
        },
        1_000,
    );
    report(1, hits >= 24, format!("pure drift MFPT within 4 stderr at {hits}/25 grid points {misses:?}"));
}

fn criterion_2_exp_jumps_monte_carlo() {
    // Λ/λ on the grid with λ = ℓ = 1 and γℓ = 4
    let (hits, misses) = mc_grid_hits(
        |rho, x| {
            let p = ModelParams::exp_jumps(x, rho, 1.0, 4.0);
            let exact = ExpJumps::from_params(&p, 1.0).unwrap().mfpt_unconditional();
            (p, exact)
        },
        2_000,
    );
    report(2, hits >= 24, format!("exponential-jump MFPT within 4 stderr at {hits}/25 grid points {misses:?}"));
}

fn criterion_3_stationary_law() {
    let p = ModelParams::new(1.0, 0.5).with_plus(0.0, 1.0, JumpLaw::Exponential { rate: 1.0 }).with_minus(
        1.0,
        0.0,
        JumpLaw::Zero,
    );
    let law = ExpDriftStationary::from_params(&p).unwrap();
    let est = estimate_stationary(&p, 1_000_000, Some(20.0), (-10.0, 10.0, 200), 3).unwrap();
    let atom_ok = est.atom.within(law.atom(), 4.0) && (law.atom() - 0.25).abs() < 1e-15;
    let h = &est.histogram;
    let l1: f64 = (0..h.counts.len())
        .map(|i| {
            let (a, b) = h.edges(i);
            (h.counts[i] as f64 / est.n as f64 - law.continuous_mass(a, b)).abs()
        })
        .sum();
    report(
        3,
        atom_ok && l1 < 0.02,
        format!("atom {:.5}±{:.5} vs {}, continuous L1 {l1:.5} (< 0.02)", est.atom.mean, est.atom.stderr, law.atom()),
    );
}

fn criterion_4_optimality() {
    let worst_residual = (0..100)
        .map(|k| {
            let rho = (k as f64 + 0.5) / 100.0;
            let xi = xi_root(rho).unwrap();
            (xi.exp() * (xi - 1.0) + rho).abs()
        })
        .fold(0.0, f64::max);

    let mut worst_rate = 0.0f64;
    for rho in [0.5, 0.9] {
        let p = ModelParams::exp_jumps(1.0, rho, 1.0, 4.0);
        let exact = optimal_rate_exp_jumps(1.0, 4.0, 1.0, rho).unwrap().lambda_star.unwrap();
        let num = minimize_mfpt_numeric(&p, 1.0, default_bracket(&p, 1.0), 1e-8).unwrap().lambda_star.unwrap();
        worst_rate = worst_rate.max(rel(num, exact));
    }

    let below = optimal_rate_exp_jumps(1.0, 0.5, 1.0, 0.824).unwrap().regime;
    let above = optimal_rate_exp_jumps(1.0, 0.5, 1.0, 0.825).unwrap().regime;
    let flip_ok = below == Regime::MonotoneDecreasing && above == Regime::InteriorMinimum;

    report(
        4,
        worst_residual <= 1e-12 && worst_rate <= 1e-4 && flip_ok,
        format!(
            "xi residual {worst_residual:.1e}, optimal-rate relative gap {worst_rate:.1e}, regime flip in (0.824, 0.825): {flip_ok}"
        ),
    );
}

fn criterion_5_inversion_fidelity() {
    let grid: Vec<(f64, f64)> = (0..10).map(|k| (0.2 + 0.3 * k as f64, 0.1 + 0.1 * k as f64)).collect();
    let mut worst = 0.0f64;
    for &(lam, rho) in &grid {
        let p = ModelParams::pure_drift(lam, rho, 1.0);
        let m = PureDrift::from_params(&p, 1.0).unwrap();
        let q = ModelParams::exp_jumps(lam, rho, 1.0, 4.0);
        let e = ExpJumps::from_params(&q, 1.0).unwrap();
        for dir in [Direction::Plus, Direction::Minus] {
            worst = worst.max(rel(mfpt_general(&p, 1.0, 0.0, dir).unwrap(), m.mfpt(0.0, dir).unwrap()));
            worst = worst.max(rel(mfpt_general(&q, 1.0, 0.0, dir).unwrap(), e.mfpt(0.0, dir).unwrap()));
        }
    }

    type Pair = (fn(Complex<f64>) -> Complex<f64>, fn(f64) -> f64);
    let pairs: [Pair; 5] = [
        (|s| s.inv(), |_| 1.0),
        (|s| (s + 1.0).inv(), |t| (-t).exp()),
        (|s| (s * s).inv(), |t| t),
        (|s| (s + 0.5).inv(), |t| (-0.5 * t).exp()),
        (|s| (s * (s + 0.5)).inv(), |t| (1.0 - (-0.5 * t).exp()) / 0.5),
    ];
    let mut worst_pair = 0.0f64;
    for (f, exact) in pairs {
        for t in [0.1, 1.0, 10.0] {
            let v = laplace_invert(f, t, &InversionConfig::default()).unwrap();
            worst_pair = worst_pair.max(rel(v, exact(t)));
        }
    }
    report(
        5,
        worst <= 1e-6 && worst_pair <= 1e-7,
        format!("MFPT inversion relative error {worst:.1e} (<= 1e-6), transform pairs {worst_pair:.1e} (<= 1e-7)"),
    );
}

fn criterion_6_propagator_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = ModelParams::new(rng.random_range(0.1..3.0), 1.0)
            .with_plus(
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..2.0),
                JumpLaw::Exponential { rate: rng.random_range(0.5..4.0) },
            )
            .with_minus(1.0, 0.0, JumpLaw::Zero);
        let omega = rng.random_range(-10.0..10.0);
        let s = Complex::new(rng.random_range(0.01..10.0), rng.random_range(-5.0..5.0));
        let a = propagator_fl(&p, omega, s, 0.0, Direction::Plus).unwrap();
        let b = monotone_propagator_dl(
            p.reset_rate,
            p.jump_rate_plus,
            p.speed_plus,
            &p.jump_law_plus,
            Complex::new(0.0, -omega),
            s,
            0.0,
        );
        worst = worst.max((a - b).norm() / b.norm());
    }

    let p = ModelParams::new(1.2, 0.3).with_plus(0.7, 1.5, JumpLaw::Exponential { rate: 2.0 }).with_minus(
        0.4,
        0.8,
        JumpLaw::Exponential { rate: 1.0 },
    );
    let at_zero = (stationary_cf(&p, 0.0).unwrap() - 1.0).norm();
    let mut worst_limit = 0.0f64;
    for omega in [0.3, 1.0, 4.0] {
        let target = stationary_cf(&p, omega).unwrap();
        let s = Complex::new(1e-8, 0.0);
        for dir in [Direction::Plus, Direction::Minus] {
            let v = propagator_fl(&p, omega, s, 0.0, dir).unwrap() * s;
            worst_limit = worst_limit.max((v - target).norm());
        }
    }
    report(
        6,
        worst <= 1e-12 && at_zero <= 1e-15 && worst_limit <= 1e-6,
        format!(
            "one-direction reduction {worst:.1e} (<= 1e-12), |cf(0) - 1| = {at_zero:.1e}, small-s limit {worst_limit:.1e} (<= 1e-6)"
        ),
    );
}

/// Unconditional survival from the origin.
fn mix(rho: f64, plus: impl Fn() -> f64, minus: impl Fn() -> f64) -> f64 {
    let mut v = 0.0;
    if rho > 0.0 {
        v += rho * plus();
    }
    if rho < 1.0 {
        v += (1.0 - rho) * minus();
    }
    v
}

fn criterion_7_survival_consistency() {
    let level = 1.0;
    let drift = PureDrift::new(1.0, 1.0, 0.5, level).unwrap();
    let jumps = ExpJumps::new(0.8, 1.0, 4.0, 0.6, level).unwrap();
    let drift_surv = |t: f64| {
        mix(
            0.5,
            || survival_pure_drift(&drift, 0.0, Direction::Plus, t).unwrap(),
            || survival_pure_drift(&drift, 0.0, Direction::Minus, t).unwrap(),
        )
    };
    let jump_surv = |t: f64| {
        mix(
            0.6,
            || survival_exp_jumps(&jumps, 0.0, Direction::Plus, t).unwrap(),
            || survival_exp_jumps(&jumps, 0.0, Direction::Minus, t).unwrap(),
        )
    };

    // the drift curve is flat at 1 until the ballistic crossing time
    let drift_mean = drift.mfpt_unconditional();
    let drift_step = level / drift.speed;
    let drift_int = drift_step + integrate(drift_surv, drift_step, 50.0 * drift_mean, 80);
    let jump_mean = jumps.mfpt_unconditional();
    let jump_int = integrate(jump_surv, 0.0, 50.0 * jump_mean, 80);
    let int_ok = rel(drift_int, drift_mean) <= 1e-3 && rel(jump_int, jump_mean) <= 1e-3;

    // 4 stderr plus the inverter's own accuracy where the curve is flat
    let slack = 1e-4;
    let mut misses = Vec::new();
    let cases: [(ModelParams, f64, &dyn Fn(f64) -> f64); 2] = [
        (ModelParams::pure_drift(1.0, 0.5, 1.0), drift_mean, &drift_surv),
        (ModelParams::exp_jumps(0.8, 0.6, 1.0, 4.0), jump_mean, &jump_surv),
    ];
    for (k, (p, mean, exact)) in cases.iter().enumerate() {
        let grid: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64 * mean).collect();
        for (t, est) in estimate_survival(p, level, &grid, MC_PATHS, 70 + k as u64).unwrap() {
            let e = exact(t);
            if (est.mean - e).abs() > 4.0 * est.stderr + slack {
                misses.push(format!("(case {k}, t={t:.3}: {:.5}±{:.5} vs {e:.5})", est.mean, est.stderr));
            }
        }
    }
    report(
        7,
        int_ok && misses.is_empty(),
        format!(
            "integrated survival {drift_int:.6} vs {drift_mean:.6}, {jump_int:.6} vs {jump_mean:.6}; pointwise misses {misses:?}"
        ),
    );
}

fn main() {
    let criteria: [fn(); 7] = [
        criterion_1_pure_drift_monte_carlo,
        criterion_2_exp_jumps_monte_carlo,
        criterion_3_stationary_law,
        criterion_4_optimality,
        criterion_5_inversion_fidelity,
        criterion_6_propagator_identities,
        criterion_7_survival_consistency,
    ];
    let failed = criteria.iter().filter(|c| std::panic::catch_unwind(**c).is_err()).count();
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
