//! Invariant batteries behind `resetwalk validate <suite>`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use resetwalk::analytic::{
    monotone_propagator_dl, propagator_fl, stationary_cf, ExpDriftStationary, ExpJumps, PureDrift,
};
use resetwalk::inversion::{
    laplace_invert, mfpt_general, survival_exp_jumps, survival_pure_drift, FirstPassageSolver, InversionConfig,
};
use resetwalk::optimize::{
    default_bracket, minimize_mfpt_numeric, optimal_rate_exp_jumps, optimal_rate_pure_drift, xi_root, Regime,
};
use resetwalk::quadrature::{integrate, integrate_to_infinity};
use resetwalk::simulate::{estimate_mfpt, estimate_stationary, estimate_survival};
use resetwalk::{Direction, JumpLaw, ModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Transforms,
    ClosedForms,
    McVsAnalytic,
    Inversion,
    Optimize,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Transforms, Suite::ClosedForms, Suite::McVsAnalytic, Suite::Inversion, Suite::Optimize];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Transforms => "transforms",
            Suite::ClosedForms => "closed-forms",
            Suite::McVsAnalytic => "mc-vs-analytic",
            Suite::Inversion => "inversion",
            Suite::Optimize => "optimize",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| {
            format!("unknown suite `{s}` (expected transforms, closed-forms, mc-vs-analytic, inversion or optimize)")
        })
    }
}

/// Prints one line per check and counts failures.
#[derive(Default)]
struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, outcome: Result<(bool, String), resetwalk::Error>) {
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

/// Deterministic low-discrepancy points in `[0, 1)`, one coordinate per
/// irrational step.
fn unit(k: usize, dim: usize) -> f64 {
    const STEPS: [f64; 8] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_79,
        0.645_751_311_064_591,
        0.316_624_790_355_4,
        0.605_551_275_463_989,
        0.123_105_625_617_661,
    ];
    ((k + 1) as f64 * STEPS[dim % STEPS.len()]).fract()
}

fn lerp(u: f64, lo: f64, hi: f64) -> f64 {
    lo + u * (hi - lo)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

type Outcome = Result<(bool, String), resetwalk::Error>;

fn laws() -> Vec<JumpLaw> {
    vec![JumpLaw::Exponential { rate: 2.0 }, JumpLaw::Deterministic { size: 0.5 }, JumpLaw::Zero]
}

fn transforms(r: &mut Report) {
    r.check("jump Laplace transforms are nonincreasing", {
        let ok = laws().iter().all(|law| {
            let vals: Vec<f64> = (0..100).map(|k| law.laplace(0.1 * k as f64)).collect();
            vals.windows(2).all(|w| w[1] <= w[0])
        });
        Ok((ok, "3 laws on 100 points".into()))
    });
    r.check("jump Fourier transforms lie in the unit disk", {
        let mut worst = 0.0f64;
        let mut at_zero = true;
        for law in laws() {
            for dir in [Direction::Plus, Direction::Minus] {
                at_zero &= law.fourier(0.0, dir) == Complex::new(1.0, 0.0);
                for k in 0..200 {
                    worst = worst.max(law.fourier(-20.0 + 0.2 * k as f64, dir).norm());
                }
            }
        }
        Ok((worst <= 1.0 + 1e-15 && at_zero, format!("max modulus {worst}, exactly 1 at zero: {at_zero}")))
    });
    r.check("exponential transform matches quadrature", {
        let law = JumpLaw::Exponential { rate: 2.0 };
        let worst = (1..=100)
            .map(|k| {
                let s = 0.1 * k as f64;
                let q = integrate_to_infinity(|u| 2.0 * (-2.0 * u).exp() * (-s * u).exp(), 0.0, 0.5);
                (q - law.laplace(s)).abs()
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-10, format!("max error {worst:.1e} (<= 1e-10)")))
    });
    r.check("slope at zero is minus the mean", {
        let h = 1e-7;
        let worst =
            laws().iter().map(|law| ((law.laplace(h) - law.laplace(0.0)) / h + law.mean()).abs()).fold(0.0, f64::max);
        Ok((worst <= 1e-6, format!("max error {worst:.1e} (<= 1e-6)")))
    });
    r.check(
        "one-direction propagator reduces to the monotone walk",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for k in 0..100 {
                let law = laws()[k % 2].clone();
                let p = ModelParams::new(lerp(unit(k, 0), 0.1, 3.0), 1.0)
                    .with_plus(lerp(unit(k, 1), 0.1, 2.0), lerp(unit(k, 2), 0.0, 2.0), law)
                    .with_minus(1.0, 0.0, JumpLaw::Zero);
                let omega = lerp(unit(k, 3), -10.0, 10.0);
                let s = Complex::new(lerp(unit(k, 4), 0.01, 10.0), lerp(unit(k, 5), -5.0, 5.0));
                let a = propagator_fl(&p, omega, s, 0.0, Direction::Plus)?;
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
            Ok((worst <= 1e-12, format!("100 points, max relative gap {worst:.1e} (<= 1e-12)")))
        })(),
    );
    let p = ModelParams::new(1.2, 0.3).with_plus(0.7, 1.5, JumpLaw::Exponential { rate: 2.0 }).with_minus(
        0.4,
        0.8,
        JumpLaw::Deterministic { size: 0.3 },
    );
    r.check(
        "propagator is normalized",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for s in [0.1, 1.0, 10.0] {
                let s = Complex::new(s, 0.0);
                for dir in [Direction::Plus, Direction::Minus] {
                    worst = worst.max((propagator_fl(&p, 0.0, s, 0.0, dir)? * s - 1.0).norm());
                }
            }
            Ok((worst <= 1e-14, format!("|s p(0, s) - 1| <= {worst:.1e}")))
        })(),
    );
    r.check(
        "stationary characteristic function at zero is one",
        (|| -> Outcome {
            let v = stationary_cf(&p, 0.0)?;
            Ok((v == Complex::new(1.0, 0.0), format!("{v}")))
        })(),
    );
    r.check(
        "small-s limit of s p(ω, s) is the stationary law",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for omega in [0.3, 1.0, 4.0] {
                let target = stationary_cf(&p, omega)?;
                let s = Complex::new(1e-8, 0.0);
                for dir in [Direction::Plus, Direction::Minus] {
                    worst = worst.max((propagator_fl(&p, omega, s, 0.0, dir)? * s - target).norm());
                }
            }
            Ok((worst <= 1e-6, format!("max gap {worst:.1e} (<= 1e-6)")))
        })(),
    );
    r.check(
        "stationary density integrates to the characteristic function",
        (|| -> Outcome {
            let law = ExpDriftStationary::new(1.0, 1.0, 1.0, 1.0, 0.5)?;
            let mut worst = 0.0f64;
            for omega in [0.0, 0.5, 2.0, 5.0] {
                let part = |f: fn(f64) -> f64, sign: f64| {
                    integrate_to_infinity(|x| law.density(sign * x) * f(omega * sign * x), 0.0, 0.5)
                };
                let re = law.atom() + part(f64::cos, 1.0) + part(f64::cos, -1.0);
                let im = part(f64::sin, 1.0) + part(f64::sin, -1.0);
                worst = worst.max((Complex::new(re, im) - law.cf(omega)).norm());
            }
            Ok((worst <= 1e-8, format!("max gap {worst:.1e} (<= 1e-8)")))
        })(),
    );
}

fn closed_forms(r: &mut Report) {
    let sets: Vec<(f64, f64, f64, f64, f64)> = (0..100)
        .map(|k| {
            (
                lerp(unit(k, 0), 0.05, 5.0),
                lerp(unit(k, 1), 0.05, 1.0),
                lerp(unit(k, 2), 0.2, 3.0),
                lerp(unit(k, 3), 0.2, 6.0),
                lerp(unit(k, 4), 0.2, 3.0),
            )
        })
        .collect();
    r.check(
        "MFPT equals the survival transform at s = 0",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for &(lam, rho, v, gamma, level) in &sets {
                let m = PureDrift::new(lam, v, rho, level)?;
                let e = ExpJumps::new(lam, v, gamma, rho, level)?;
                for dir in [Direction::Plus, Direction::Minus] {
                    worst = worst.max(rel(m.sp_laplace(0.0, 0.0, dir)?, m.mfpt(0.0, dir)?));
                    worst = worst.max(rel(e.sp_laplace(0.0, 0.0, dir)?, e.mfpt(0.0, dir)?));
                }
            }
            Ok((worst <= 1e-12, format!("100 sets, max relative gap {worst:.1e} (<= 1e-12)")))
        })(),
    );
    r.check(
        "survival transforms are positive and decreasing",
        (|| -> Outcome {
            let mut ok = true;
            for &(lam, rho, v, gamma, level) in sets.iter().take(20) {
                let m = PureDrift::new(lam, v, rho, level)?;
                let e = ExpJumps::new(lam, v, gamma, rho, level)?;
                let mut prev = (f64::INFINITY, f64::INFINITY);
                for k in 0..40 {
                    let s = 1e-3 * 1.5f64.powi(k);
                    let cur = (m.sp_laplace(s, 0.0, Direction::Plus)?, e.sp_laplace(s, 0.0, Direction::Plus)?);
                    ok &= cur.0 > 0.0 && cur.1 > 0.0 && cur.0 < prev.0 && cur.1 < prev.1;
                    prev = cur;
                }
                ok &=
                    m.sp_laplace(1e9, 0.0, Direction::Plus)? < 1e-8 && e.sp_laplace(1e9, 0.0, Direction::Plus)? < 1e-8;
            }
            Ok((ok, "20 sets on 40 geometric points".into()))
        })(),
    );
    r.check(
        "MFPT grows with the level",
        (|| -> Outcome {
            let mut ok = true;
            for &(lam, rho, v, gamma, _) in sets.iter().take(20) {
                let mut prev = (0.0, 0.0);
                for k in 1..=20 {
                    let level = 0.2 * k as f64;
                    let cur = (
                        PureDrift::new(lam, v, rho, level)?.mfpt_unconditional(),
                        ExpJumps::new(lam, v, gamma, rho, level)?.mfpt_unconditional(),
                    );
                    ok &= cur.0 > prev.0 && cur.1 > prev.1;
                    prev = cur;
                }
            }
            Ok((ok, "20 sets on 20 levels".into()))
        })(),
    );
    r.check(
        "no rightward restarts means no crossing",
        (|| -> Outcome {
            let a = PureDrift::new(1.0, 1.0, 0.0, 1.0)?.mfpt(0.0, Direction::Minus)?;
            let b = ExpJumps::new(1.0, 1.0, 2.0, 0.0, 1.0)?.mfpt(0.0, Direction::Minus)?;
            Ok((a == f64::INFINITY && b == f64::INFINITY, format!("{a}, {b}")))
        })(),
    );
}

fn mc_grid(
    r: &mut Report,
    name: &str,
    n_paths: u64,
    band: f64,
    seed: u64,
    make: impl Fn(f64, f64) -> ModelParams,
    exact: impl Fn(&ModelParams) -> f64,
) {
    let rhos = [0.25, 0.4375, 0.625, 0.8125, 1.0];
    let rates = [0.2, 0.9, 1.6, 2.3, 3.0];
    r.check(
        name,
        (|| -> Outcome {
            let mut hits = 0;
            let mut misses = Vec::new();
            for (i, &rho) in rhos.iter().enumerate() {
                for (j, &x) in rates.iter().enumerate() {
                    let p = make(rho, x);
                    let t = exact(&p);
                    let est = estimate_mfpt(&p, 1.0, n_paths, None, seed + (5 * i + j) as u64)?.require_uncensored()?;
                    if est.within(t, band) {
                        hits += 1;
                    } else {
                        misses.push(format!("rho={rho} rate={x}: {:.5}±{:.5} vs {t:.5}", est.mean, est.stderr));
                    }
                }
            }
            Ok((hits >= 24, format!("{hits}/25 within {band} stderr {misses:?}")))
        })(),
    );
}

fn mc_vs_analytic(r: &mut Report, n_paths: u64) {
    // fewer paths than the reference protocol widen the band by one stderr
    let band = if n_paths >= 100_000 { 4.0 } else { 5.0 };
    println!("using {n_paths} paths per point, {band}-stderr bands");
    mc_grid(
        r,
        "pure-drift MFPT grid",
        n_paths,
        band,
        1_000,
        |rho, x| ModelParams::pure_drift(x, rho, 1.0),
        |p| PureDrift::from_params(p, 1.0).map(|m| m.mfpt_unconditional()).unwrap_or(f64::NAN),
    );
    mc_grid(
        r,
        "exponential-jump MFPT grid",
        n_paths,
        band,
        2_000,
        |rho, x| ModelParams::exp_jumps(x, rho, 1.0, 4.0),
        |p| ExpJumps::from_params(p, 1.0).map(|m| m.mfpt_unconditional()).unwrap_or(f64::NAN),
    );
    r.check(
        "stationary atom and density",
        (|| -> Outcome {
            let p = ModelParams::jumps_right_drift_left(1.0, 0.5, 1.0, 1.0, 1.0);
            let law = ExpDriftStationary::from_params(&p)?;
            let est = estimate_stationary(&p, n_paths, None, (-10.0, 10.0, 200), 3)?;
            let h = &est.histogram;
            let l1: f64 = (0..h.counts.len())
                .map(|i| {
                    let (a, b) = h.edges(i);
                    (h.counts[i] as f64 / est.n as f64 - law.continuous_mass(a, b)).abs()
                })
                .sum();
            // the sampling part of the L1 distance shrinks like n^{-1/2}
            let bound = 0.02 * (1e6 / n_paths as f64).sqrt().max(1.0);
            Ok((
                est.atom.within(law.atom(), band) && l1 < bound,
                format!(
                    "atom {:.5}±{:.5} vs {}, L1 {l1:.4} (< {bound:.3})",
                    est.atom.mean,
                    est.atom.stderr,
                    law.atom()
                ),
            ))
        })(),
    );
    r.check(
        "survival curves",
        (|| -> Outcome {
            let drift = PureDrift::new(1.0, 1.0, 0.5, 1.0)?;
            let jumps = ExpJumps::new(0.8, 1.0, 4.0, 0.6, 1.0)?;
            let mut misses = 0;
            let mut points = 0;
            for (k, p) in
                [ModelParams::pure_drift(1.0, 0.5, 1.0), ModelParams::exp_jumps(0.8, 0.6, 1.0, 4.0)].iter().enumerate()
            {
                let mean = if k == 0 { drift.mfpt_unconditional() } else { jumps.mfpt_unconditional() };
                let grid: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64 * mean).collect();
                for (t, est) in estimate_survival(p, 1.0, &grid, n_paths, 70 + k as u64)? {
                    let rho = p.direction_prob;
                    let exact = if k == 0 {
                        rho * survival_pure_drift(&drift, 0.0, Direction::Plus, t)?
                            + (1.0 - rho) * survival_pure_drift(&drift, 0.0, Direction::Minus, t)?
                    } else {
                        rho * survival_exp_jumps(&jumps, 0.0, Direction::Plus, t)?
                            + (1.0 - rho) * survival_exp_jumps(&jumps, 0.0, Direction::Minus, t)?
                    };
                    points += 1;
                    if (est.mean - exact).abs() > band * est.stderr + 1e-4 {
                        misses += 1;
                    }
                }
            }
            Ok((misses == 0, format!("{}/{points} points within {band} stderr", points - misses)))
        })(),
    );
    r.check(
        "general jump law MFPT",
        (|| -> Outcome {
            let p = ModelParams::new(1.5, 0.6).with_plus(0.3, 0.9, JumpLaw::Deterministic { size: 0.6 }).with_minus(
                1.0,
                0.0,
                JumpLaw::Zero,
            );
            let exact = FirstPassageSolver::default().mfpt_unconditional(&p, 1.75)?;
            let est = estimate_mfpt(&p, 1.75, n_paths, Some(50.0 * exact), 9)?.require_uncensored()?;
            Ok((est.within(exact, band), format!("{:.5}±{:.5} vs {exact:.5}", est.mean, est.stderr)))
        })(),
    );
}

fn inversion(r: &mut Report) {
    type Pair = (fn(Complex<f64>) -> Complex<f64>, fn(f64) -> f64);
    let pairs: [Pair; 5] = [
        (|s| s.inv(), |_| 1.0),
        (|s| (s + 1.0).inv(), |t| (-t).exp()),
        (|s| (s * s).inv(), |t| t),
        (|s| (s + 0.5).inv(), |t| (-0.5 * t).exp()),
        (|s| (s * (s + 0.5)).inv(), |t| (1.0 - (-0.5 * t).exp()) / 0.5),
    ];
    r.check(
        "known transform pairs",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for (f, exact) in pairs {
                for t in [0.1, 1.0, 10.0] {
                    worst = worst.max(rel(laplace_invert(f, t, &InversionConfig::default())?, exact(t)));
                }
            }
            Ok((worst <= 1e-7, format!("max relative error {worst:.1e} (<= 1e-7)")))
        })(),
    );
    r.check(
        "numerical MFPT matches both closed forms",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for k in 0..10 {
                let (lam, rho) = (0.2 + 0.3 * k as f64, 0.1 + 0.1 * k as f64);
                let p = ModelParams::pure_drift(lam, rho, 1.0);
                let q = ModelParams::exp_jumps(lam, rho, 1.0, 4.0);
                let m = PureDrift::from_params(&p, 1.0)?;
                let e = ExpJumps::from_params(&q, 1.0)?;
                for dir in [Direction::Plus, Direction::Minus] {
                    worst = worst.max(rel(mfpt_general(&p, 1.0, 0.0, dir)?, m.mfpt(0.0, dir)?));
                    worst = worst.max(rel(mfpt_general(&q, 1.0, 0.0, dir)?, e.mfpt(0.0, dir)?));
                }
            }
            Ok((worst <= 1e-6, format!("20 parameter sets, max relative error {worst:.1e} (<= 1e-6)")))
        })(),
    );
    r.check(
        "Gaver-Stehfest and Talbot agree on the kernel",
        (|| -> Outcome {
            let gs16 = InversionConfig::gaver_stehfest(16)?;
            let gs = FirstPassageSolver { mfpt_kernel: gs16, delayed_kernel: gs16, ..Default::default() };
            let talbot = FirstPassageSolver { delayed_kernel: InversionConfig::default(), ..Default::default() };
            let zero = Complex::new(0.0, 0.0);
            let models = [
                ModelParams::pure_drift(1.0, 0.6, 1.0),
                ModelParams::new(1.0, 0.6).with_plus(0.5, 1.0, JumpLaw::Exponential { rate: 2.0 }).with_minus(
                    1.0,
                    0.0,
                    JumpLaw::Zero,
                ),
                ModelParams::new(1.0, 0.6).with_plus(1.0, 2.0, JumpLaw::Deterministic { size: 1e-3 }).with_minus(
                    1.0,
                    0.0,
                    JumpLaw::Zero,
                ),
            ];
            let mut worst = 0.0f64;
            for p in &models {
                for k in 1..=40 {
                    let z = 0.05 * k as f64;
                    worst = worst.max((gs.kernel(p, zero, z)?.re - talbot.kernel(p, zero, z)?.re).abs());
                }
            }
            Ok((worst < 1e-5, format!("order 16 vs 24 nodes, max gap {worst:.1e} (< 1e-5)")))
        })(),
    );
    let general = ModelParams::new(1.0, 0.6).with_plus(0.8, 1.0, JumpLaw::Exponential { rate: 3.0 }).with_minus(
        1.0,
        0.0,
        JumpLaw::Zero,
    );
    r.check(
        "leftward start forgets its position",
        (|| -> Outcome {
            let base = mfpt_general(&general, 1.0, 0.0, Direction::Minus)?;
            let mut worst = 0.0f64;
            for k in 1..=10 {
                worst = worst.max(rel(mfpt_general(&general, 1.0, -0.1 * k as f64, Direction::Minus)?, base));
            }
            Ok((worst <= 1e-10, format!("max relative spread {worst:.1e} (<= 1e-10)")))
        })(),
    );
    r.check(
        "numerical MFPT grows with the level",
        (|| -> Outcome {
            let mut prev = 0.0;
            let mut ok = true;
            for k in 1..=20 {
                let t = mfpt_general(&general, 0.1 * k as f64, 0.0, Direction::Plus)?;
                ok &= t >= prev;
                prev = t;
            }
            Ok((ok, "20 levels".into()))
        })(),
    );
    r.check(
        "integrated survival equals the MFPT",
        (|| -> Outcome {
            let level = 1.0;
            let drift = PureDrift::new(1.0, 1.0, 0.5, level)?;
            let jumps = ExpJumps::new(0.8, 1.0, 4.0, 0.6, level)?;
            let mean_d = drift.mfpt(0.0, Direction::Plus)?;
            let step = level / drift.speed;
            let int_d = step
                + integrate(
                    |t| survival_pure_drift(&drift, 0.0, Direction::Plus, t).unwrap_or(f64::NAN),
                    step,
                    50.0 * mean_d,
                    80,
                );
            let mean_j = jumps.mfpt(0.0, Direction::Plus)?;
            let int_j = integrate(
                |t| survival_exp_jumps(&jumps, 0.0, Direction::Plus, t).unwrap_or(f64::NAN),
                0.0,
                50.0 * mean_j,
                80,
            );
            let worst = rel(int_d, mean_d).max(rel(int_j, mean_j));
            Ok((worst <= 1e-3, format!("max relative gap {worst:.1e} (<= 1e-3)")))
        })(),
    );
}

fn optimize(r: &mut Report) {
    r.check(
        "transcendental root residuals",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            let mut prev = f64::INFINITY;
            let mut decreasing = true;
            for k in 0..=100 {
                let rho = k as f64 / 100.0;
                let xi = xi_root(rho)?;
                worst = worst.max((xi.exp() * (xi - 1.0) + rho).abs());
                decreasing &= xi < prev;
                prev = xi;
            }
            Ok((
                worst <= 1e-12 && decreasing,
                format!("101 values, max residual {worst:.1e}, strictly decreasing: {decreasing}"),
            ))
        })(),
    );
    r.check(
        "numerical optimum matches the closed forms",
        (|| -> Outcome {
            let mut worst = 0.0f64;
            for rho in [0.5, 0.9] {
                let p = ModelParams::exp_jumps(1.0, rho, 1.0, 4.0);
                let exact = optimal_rate_exp_jumps(1.0, 4.0, 1.0, rho)?.lambda_star.unwrap_or(f64::NAN);
                let num =
                    minimize_mfpt_numeric(&p, 1.0, default_bracket(&p, 1.0), 1e-8)?.lambda_star.unwrap_or(f64::NAN);
                worst = worst.max(rel(num, exact));
                let p = ModelParams::pure_drift(1.0, rho, 1.0);
                let exact = optimal_rate_pure_drift(1.0, 1.0, rho)?.lambda_star.unwrap_or(f64::NAN);
                let num =
                    minimize_mfpt_numeric(&p, 1.0, default_bracket(&p, 1.0), 1e-8)?.lambda_star.unwrap_or(f64::NAN);
                worst = worst.max(rel(num, exact));
            }
            Ok((worst <= 1e-4, format!("max relative gap {worst:.1e} (<= 1e-4)")))
        })(),
    );
    r.check(
        "regime flip at γℓ = 1/2",
        (|| -> Outcome {
            let mut flips = Vec::new();
            let mut prev = None;
            for k in 0..=100 {
                let rho = 0.78 + 0.001 * k as f64;
                let regime = optimal_rate_exp_jumps(1.0, 0.5, 1.0, rho)?.regime;
                if prev.is_some_and(|p| p != regime) {
                    flips.push(rho);
                }
                prev = Some(regime);
            }
            let ok = flips.len() == 1
                && optimal_rate_exp_jumps(1.0, 0.5, 1.0, 0.824)?.regime == Regime::MonotoneDecreasing
                && optimal_rate_exp_jumps(1.0, 0.5, 1.0, 0.825)?.regime == Regime::InteriorMinimum;
            Ok((
                ok,
                format!("flips at {flips:?}, bracket (0.824, 0.825), threshold 0.5·e^0.5 = {:.5}", 0.5 * 0.5f64.exp()),
            ))
        })(),
    );
    r.check(
        "interior optima are local minima",
        (|| -> Outcome {
            let mut ok = true;
            let mut worst_slope = 0.0f64;
            for k in 1..20 {
                let rho = 0.05 * k as f64;
                let d = optimal_rate_pure_drift(1.0, 1.0, rho)?;
                let lam = d.lambda_star.unwrap_or(f64::NAN);
                let f = |l: f64| PureDrift::new(l, 1.0, rho, 1.0).map(|m| m.mfpt_unconditional());
                ok &= f(0.9 * lam)? > d.mfpt_star && f(1.1 * lam)? > d.mfpt_star;
                let h = 1e-6 * lam;
                worst_slope = worst_slope.max(((f(lam + h)? - f(lam - h)?) / (2.0 * h)).abs() / (d.mfpt_star / lam));
                let e = optimal_rate_exp_jumps(1.0, 4.0, 1.0, rho)?;
                if let Some(lam) = e.lambda_star {
                    let g = |l: f64| ExpJumps::new(l, 1.0, 4.0, rho, 1.0).map(|m| m.mfpt_unconditional());
                    ok &= g(0.9 * lam)? > e.mfpt_star && g(1.1 * lam)? > e.mfpt_star;
                    let h = 1e-6 * lam;
                    worst_slope =
                        worst_slope.max(((g(lam + h)? - g(lam - h)?) / (2.0 * h)).abs() / (e.mfpt_star / lam));
                }
            }
            Ok((
                ok && worst_slope <= 1e-4,
                format!("±10% certificate: {ok}, max scaled slope {worst_slope:.1e} (<= 1e-4)"),
            ))
        })(),
    );
}

/// Runs `suite`; `n_paths` only affects `mc-vs-analytic`.
pub fn run(suite: Suite, n_paths: u64) -> Result<(), CliError> {
    let mut report = Report::default();
    match suite {
        Suite::Transforms => transforms(&mut report),
        Suite::ClosedForms => closed_forms(&mut report),
        Suite::McVsAnalytic => mc_vs_analytic(&mut report, n_paths),
        Suite::Inversion => inversion(&mut report),
        Suite::Optimize => optimize(&mut report),
    }
    if report.failed > 0 {
        Err(CliError::ChecksFailed(report.failed))
    } else {
        println!("suite {suite}: all checks passed");
        Ok(())
    }
}
