//! Optimal reset rates.
//!
//! In both closed-form cases the optimum is fixed by `ξ_ρ`, the root in
//! `[0, 1]` of `e^ξ(ξ - 1) + ρ = 0`. For other jump laws the unconditional
//! MFPT is minimized numerically over the reset rate.

use crate::analytic::{ExpJumps, PureDrift};
use crate::error::{Error, Result};
use crate::inversion::FirstPassageSolver;
use crate::model::ModelParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    InteriorMinimum,
    /// Keeps improving as `Λ → ∞`; the reported MFPT is that limit.
    MonotoneDecreasing,
    /// Best without resets (`Λ → 0`).
    MonotoneIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumReport<T: Scalar = f64> {
    /// Present iff `regime` is [`Regime::InteriorMinimum`].
    pub lambda_star: Option<T>,
    pub mfpt_star: T,
    pub regime: Regime,
    /// `|e^ξ(ξ-1)+ρ|` for closed forms, final bracket width in `ln Λ` for
    /// the numeric minimizer.
    pub residual: T,
}

fn xi_residual<T: Scalar>(xi: T, rho: T) -> T {
    xi.exp() * (xi - T::one()) + rho
}

/// Root `ξ_ρ ∈ [0, 1]` of `e^ξ(ξ - 1) + ρ = 0`, by Newton steps kept inside
/// a shrinking bisection bracket.
pub fn xi_root<T: Scalar>(rho: T) -> Result<T> {
    if !(rho >= T::zero() && rho <= T::one()) {
        return Err(Error::ProbabilityOutOfRange { name: "direction_prob", value: rho.as_f64() });
    }
    if rho == T::zero() {
        return Ok(T::one());
    }
    if rho == T::one() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    // the function increases on [0, 1]: negative at 0, positive at 1
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut x = half;
    for _ in 0..200 {
        let f = xi_residual(x, rho);
        if f == T::zero() {
            return Ok(x);
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = x * x.exp();
        let newton = x - f / slope;
        let next = if slope > T::zero() && newton > lo && newton < hi { newton } else { half * (lo + hi) };
        if (next - x).abs() <= T::epsilon() * (T::one() + x.abs()) || hi - lo <= T::epsilon() {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

fn check_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} must be positive, got {v}")))
    }
}

fn check_rho<T: Scalar>(rho: T) -> Result<()> {
    if !(rho > T::zero() && rho <= T::one()) {
        return Err(Error::arg(format!("direction probability must lie in (0, 1], got {rho}")));
    }
    Ok(())
}

/// Optimal reset rate with drift only: `Λ* = Γξ_ρ/ℓ`.
pub fn optimal_rate_pure_drift<T: Scalar>(speed: T, level: T, rho: T) -> Result<OptimumReport<T>> {
    check_positive("speed", speed)?;
    check_positive("level", level)?;
    check_rho(rho)?;
    if rho == T::one() {
        return Ok(OptimumReport {
            lambda_star: None,
            mfpt_star: level / speed,
            regime: Regime::MonotoneIncreasing,
            residual: T::zero(),
        });
    }
    let xi = xi_root(rho)?;
    let lam = speed * xi / level;
    let mfpt = PureDrift::new(lam, speed, rho, level)?.mfpt_unconditional();
    Ok(OptimumReport {
        lambda_star: Some(lam),
        mfpt_star: mfpt,
        regime: Regime::InteriorMinimum,
        residual: xi_residual(xi, rho).abs(),
    })
}

/// Optimal reset rate with exponential jumps and no drift:
/// `Λ*/λ = ξ_ρ/(γℓ - ξ_ρ)` when `ξ_ρ < γℓ`.
pub fn optimal_rate_exp_jumps<T: Scalar>(jump_rate: T, gamma: T, level: T, rho: T) -> Result<OptimumReport<T>> {
    check_positive("jump_rate", jump_rate)?;
    check_positive("gamma", gamma)?;
    check_positive("level", level)?;
    check_rho(rho)?;
    let gl = gamma * level;
    if rho == T::one() {
        return Ok(OptimumReport {
            lambda_star: None,
            mfpt_star: (T::one() + gl) / jump_rate,
            regime: Regime::MonotoneIncreasing,
            residual: T::zero(),
        });
    }
    let xi = xi_root(rho)?;
    let residual = xi_residual(xi, rho).abs();
    if xi >= gl {
        return Ok(OptimumReport {
            lambda_star: None,
            mfpt_star: gl.exp() / (jump_rate * rho),
            regime: Regime::MonotoneDecreasing,
            residual,
        });
    }
    let lam = jump_rate * xi / (gl - xi);
    let mfpt = ExpJumps::new(lam, jump_rate, gamma, rho, level)?.mfpt_unconditional();
    Ok(OptimumReport { lambda_star: Some(lam), mfpt_star: mfpt, regime: Regime::InteriorMinimum, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoRegime {
    SmallRho,
    LargeRho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Example<T: Scalar = f64> {
    PureDrift { speed: T, level: T },
    ExpJumps { jump_rate: T, gamma: T, level: T },
}

/// Leading-order expansions of `(Λ*, T*)` for `ρ` near 0 or near 1.
pub fn approx_optimal<T: Scalar>(regime: RhoRegime, example: Example<T>, rho: T) -> (T, T) {
    let one = T::one();
    let e = T::E();
    let root = (T::lit(2.0) * (one - rho)).sqrt();
    match (example, regime) {
        (Example::PureDrift { speed, level }, RhoRegime::SmallRho) => {
            (speed / level * (one - rho / e), level / speed * e / rho)
        }
        (Example::PureDrift { speed, level }, RhoRegime::LargeRho) => {
            (speed / level * root, level / speed / (one - root))
        }
        (Example::ExpJumps { jump_rate, gamma, level }, RhoRegime::SmallRho) => {
            let gl = gamma * level;
            (jump_rate * (e - rho) / ((gl - one) * e + rho), gl / jump_rate * e / rho)
        }
        (Example::ExpJumps { jump_rate, gamma, level }, RhoRegime::LargeRho) => {
            let gl = gamma * level;
            (jump_rate * root / (gl - root), (gl / (one - root) + one) / jump_rate)
        }
    }
}

/// Natural rate scale of the rightward motion: `λ₊` with jumps, `Γ₊/ℓ`
/// otherwise.
pub fn natural_rate(p: &ModelParams, level: f64) -> f64 {
    if p.jump_rate_plus > 0.0 {
        p.jump_rate_plus
    } else {
        p.speed_plus / level
    }
}

/// `[10⁻³, 10³]` times [`natural_rate`].
pub fn default_bracket(p: &ModelParams, level: f64) -> (f64, f64) {
    let r = natural_rate(p, level);
    (1e-3 * r, 1e3 * r)
}

/// Golden-section search over `ln Λ` of the unconditional MFPT computed by
/// numerical inversion. `template.reset_rate` is ignored. When the search
/// ends within `max(10·tol, 10⁻⁴·width)` (in `ln Λ`) of a bracket end, the
/// corresponding monotone regime is reported. The relative margin absorbs
/// inversion noise on the flat tail of a monotone objective.
pub fn minimize_mfpt_numeric(
    template: &ModelParams,
    level: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<OptimumReport<f64>> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::arg(format!("invalid reset-rate bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let solver = FirstPassageSolver::default();
    let eval = |u: f64| -> Result<f64> {
        let mut p = template.clone();
        p.reset_rate = u.exp();
        solver.mfpt_unconditional(&p, level)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let (mut a, mut b) = (ln_lo, ln_hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (u, f) = if fc <= fd { (c, fc) } else { (d, fd) };
    let residual = b - a;
    let edge = (10.0 * tol).max(1e-4 * (ln_hi - ln_lo));
    let report = if u - ln_lo <= edge {
        OptimumReport { lambda_star: None, mfpt_star: eval(ln_lo)?, regime: Regime::MonotoneIncreasing, residual }
    } else if ln_hi - u <= edge {
        OptimumReport { lambda_star: None, mfpt_star: eval(ln_hi)?, regime: Regime::MonotoneDecreasing, residual }
    } else {
        OptimumReport { lambda_star: Some(u.exp()), mfpt_star: f, regime: Regime::InteriorMinimum, residual }
    };
    Ok(report)
}
