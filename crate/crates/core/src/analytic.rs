//! Closed-form results.
//!
//! Transform conventions: `s` is the Laplace variable conjugate to time, `ω`
//! the Fourier variable conjugate to position (`∫ dx e^{iωx} p(x)`), and `r`
//! the Laplace variable conjugate to a nonnegative length. All transform
//! evaluations run in complex arithmetic; the real-valued entry points take
//! the real part after checking the imaginary part vanishes.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Direction, JumpLaw, ModelParams};
use crate::scalar::{im, re, Scalar};

fn real_part<T: Scalar>(z: Complex<T>) -> T {
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    debug_assert!(!z.re.is_finite() || z.im.abs() <= tol * (T::one() + z.re.abs()), "expected a real value, got {z}");
    z.re
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<T> {
    if v.is_finite() && v > T::zero() {
        Ok(v)
    } else {
        Err(Error::arg(format!("{name} must be positive, got {v}")))
    }
}

fn nonnegative<T: Scalar>(name: &str, v: T) -> Result<T> {
    if v.is_finite() && v >= T::zero() {
        Ok(v)
    } else {
        Err(Error::arg(format!("{name} must be nonnegative, got {v}")))
    }
}

fn probability<T: Scalar>(rho: T) -> Result<T> {
    if rho >= T::zero() && rho <= T::one() {
        Ok(rho)
    } else {
        Err(Error::ProbabilityOutOfRange { name: "direction_prob", value: rho.as_f64() })
    }
}

/// A point of the joint transform domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint<T: Scalar = f64> {
    pub omega: T,
    pub s: Complex<T>,
    pub r: T,
}

impl<T: Scalar> TransformPoint<T> {
    pub fn new(omega: T, s: Complex<T>, r: T) -> Result<Self> {
        if !(s.re >= T::zero()) {
            return Err(Error::arg(format!("Re(s) must be nonnegative, got {s}")));
        }
        nonnegative("r", r)?;
        Ok(TransformPoint { omega, s, r })
    }
}

/// `s + Λ + λ[1 - h̃(ω)] ∓ iωΓ`, the denominator shared by every
/// propagator term of one branch.
fn branch_denominator<T: Scalar>(p: &ModelParams<T>, omega: T, s: Complex<T>, dir: Direction) -> Complex<T> {
    let h = p.jump_law(dir).fourier(omega, dir);
    s + p.reset_rate + (re(T::one()) - h) * p.jump_rate(dir) - im(dir.sign::<T>() * omega * p.speed(dir))
}

/// Fourier–Laplace transform `∫dτ e^{-sτ} ∫dx e^{iωx} p±(x, τ; x0)` of the
/// propagator for a walker currently at `x0` moving in `dir`.
pub fn propagator_fl<T: Scalar>(
    p: &ModelParams<T>,
    omega: T,
    s: Complex<T>,
    x0: T,
    dir: Direction,
) -> Result<Complex<T>> {
    p.validate()?;
    if !(s.re > T::zero()) {
        return Err(Error::arg(format!("propagator needs Re(s) > 0, got {s}")));
    }
    if !dir.admits(x0) {
        return Err(Error::IncompatibleStart { position: x0.as_f64(), direction: dir });
    }
    let inertial = Complex::new(T::zero(), omega * x0).exp() / branch_denominator(p, omega, s, dir);
    let lam = p.reset_rate;
    let plus = re::<T>(lam * p.direction_prob) / (s * branch_denominator(p, omega, s, Direction::Plus));
    let minus = re::<T>(lam * (T::one() - p.direction_prob)) / (s * branch_denominator(p, omega, s, Direction::Minus));
    Ok(inertial + plus + minus)
}

/// Double-Laplace propagator `∫dx e^{-rx} ∫dτ e^{-sτ} p(x, τ; x0)` of the
/// one-directional process (always rightwards, resets to the origin).
pub fn monotone_propagator_dl<T: Scalar>(
    reset_rate: T,
    jump_rate: T,
    speed: T,
    law: &JumpLaw<T>,
    r: Complex<T>,
    s: Complex<T>,
    x0: T,
) -> Complex<T> {
    let num = re::<T>(reset_rate) / s + (-r * x0).exp();
    let den = s + reset_rate + (re(T::one()) - law.laplace_complex(r)) * jump_rate + r * speed;
    num / den
}

/// Characteristic function of the stationary law, `lim_{s→0} s·p̂̃(ω, s)`.
pub fn stationary_cf<T: Scalar>(p: &ModelParams<T>, omega: T) -> Result<Complex<T>> {
    p.validate()?;
    if p.reset_rate <= T::zero() {
        return Err(Error::NoStationaryState);
    }
    if omega == T::zero() {
        return Ok(re(T::one()));
    }
    let z = re(T::zero());
    let lam = p.reset_rate;
    let plus = re::<T>(lam * p.direction_prob) / branch_denominator(p, omega, z, Direction::Plus);
    let minus = re::<T>(lam * (T::one() - p.direction_prob)) / branch_denominator(p, omega, z, Direction::Minus);
    Ok(plus + minus)
}

/// Stationary law when the rightward branch moves only by exponential jumps
/// and the leftward branch only by drift: an atom at the origin plus a
/// two-sided exponential density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDriftStationary<T: Scalar = f64> {
    pub reset_rate: T,
    pub jump_rate: T,
    pub gamma: T,
    pub speed: T,
    pub rho: T,
}

impl<T: Scalar> ExpDriftStationary<T> {
    pub fn new(reset_rate: T, jump_rate: T, gamma: T, speed: T, rho: T) -> Result<Self> {
        positive("reset_rate", reset_rate)?;
        nonnegative("jump_rate", jump_rate)?;
        positive("gamma", gamma)?;
        probability(rho)?;
        if rho < T::one() {
            positive("speed", speed)?;
        } else {
            nonnegative("speed", speed)?;
        }
        Ok(ExpDriftStationary { reset_rate, jump_rate, gamma, speed, rho })
    }

    pub fn from_params(p: &ModelParams<T>) -> Result<Self> {
        p.validate()?;
        let gamma = match p.jump_law_plus {
            JumpLaw::Exponential { rate } => rate,
            _ => return Err(Error::NotSpecialCase("rightward jumps must be exponential".into())),
        };
        if p.speed_plus != T::zero() {
            return Err(Error::NotSpecialCase("rightward speed must be zero".into()));
        }
        if p.jump_rate_minus != T::zero() && p.jump_law_minus.zero_mass() < T::one() {
            return Err(Error::NotSpecialCase("leftward branch must not jump".into()));
        }
        Self::new(p.reset_rate, p.jump_rate_plus, gamma, p.speed_minus, p.direction_prob)
    }

    /// Weight of the point mass at the origin, `Λρ/(Λ+λ)`.
    pub fn atom(&self) -> T {
        self.reset_rate * self.rho / (self.reset_rate + self.jump_rate)
    }

    /// Decay rate of the right tail.
    fn right_decay(&self) -> T {
        self.reset_rate * self.gamma / (self.reset_rate + self.jump_rate)
    }

    fn right_amplitude(&self) -> T {
        self.atom() * self.gamma * self.jump_rate / (self.reset_rate + self.jump_rate)
    }

    fn left_amplitude(&self) -> T {
        if self.rho == T::one() {
            T::zero()
        } else {
            self.reset_rate * (T::one() - self.rho) / self.speed
        }
    }

    /// Density of the absolutely continuous part. At `x = 0` both one-sided
    /// branches are included.
    pub fn density(&self, x: T) -> T {
        let mut d = T::zero();
        if x >= T::zero() {
            d = d + self.right_amplitude() * (-self.right_decay() * x).exp();
        }
        if x <= T::zero() && self.rho < T::one() {
            d = d + self.left_amplitude() * (self.reset_rate * x / self.speed).exp();
        }
        d
    }

    /// Continuous mass in `[a, b]`.
    pub fn continuous_mass(&self, a: T, b: T) -> T {
        let zero = T::zero();
        let mut m = zero;
        if b > zero {
            let k = self.right_decay();
            let lo = a.max(zero);
            m = m + self.right_amplitude() / k * ((-k * lo).exp() - (-k * b).exp());
        }
        if a < zero && self.rho < T::one() {
            let k = self.reset_rate / self.speed;
            let hi = b.min(zero);
            m = m + self.left_amplitude() / k * ((k * hi).exp() - (k * a).exp());
        }
        m
    }

    /// Characteristic function of the full stationary law (atom included).
    pub fn cf(&self, omega: T) -> Complex<T> {
        let kr = self.right_decay();
        let right = re::<T>(self.right_amplitude()) / Complex::new(kr, -omega);
        let left = if self.rho < T::one() {
            let kl = self.reset_rate / self.speed;
            re::<T>(self.left_amplitude()) / Complex::new(kl, omega)
        } else {
            re(T::zero())
        };
        re::<T>(self.atom()) + right + left
    }
}

/// `(continuous density at x, atom weight at 0)` of the jumps-right /
/// drift-left stationary law.
pub fn stationary_density_exp_drift<T: Scalar>(
    reset_rate: T,
    jump_rate: T,
    gamma: T,
    speed: T,
    rho: T,
    x: T,
) -> Result<(T, T)> {
    let law = ExpDriftStationary::new(reset_rate, jump_rate, gamma, speed, rho)?;
    Ok((law.density(x), law.atom()))
}

/// `β = Λ / (Γ + λ E[J])`.
pub fn tail_exponent_beta<T: Scalar>(reset_rate: T, speed: T, jump_rate: T, mean_jump: T) -> Result<T> {
    let den = speed + jump_rate * mean_jump;
    if !(den > T::zero()) {
        return Err(Error::arg("speed + jump_rate * mean_jump must be positive"));
    }
    Ok(reset_rate / den)
}

fn check_level_start<T: Scalar>(level: T, x: T, dir: Direction) -> Result<()> {
    let ok = match dir {
        Direction::Plus => x >= T::zero() && x <= level,
        Direction::Minus => x <= T::zero(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::arg(format!("start {x} moving {dir} outside the admissible range for level {level}")))
    }
}

fn check_laplace_arg<T: Scalar>(s: Complex<T>) -> Result<()> {
    if s.re > T::zero() || (s.re == T::zero() && s.im == T::zero()) {
        Ok(())
    } else {
        Err(Error::arg(format!("need Re(s) > 0 or s = 0, got {s}")))
    }
}

/// First passage above `level` with drift only (no jumps rightwards).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureDrift<T: Scalar = f64> {
    pub reset_rate: T,
    pub speed: T,
    pub rho: T,
    pub level: T,
}

impl<T: Scalar> PureDrift<T> {
    pub fn new(reset_rate: T, speed: T, rho: T, level: T) -> Result<Self> {
        positive("reset_rate", reset_rate)?;
        positive("speed", speed)?;
        probability(rho)?;
        positive("level", level)?;
        Ok(PureDrift { reset_rate, speed, rho, level })
    }

    pub fn from_params(p: &ModelParams<T>, level: T) -> Result<Self> {
        p.validate()?;
        if p.jump_rate_plus > T::zero() && p.jump_law_plus.zero_mass() < T::one() {
            return Err(Error::NotSpecialCase("rightward branch has jumps".into()));
        }
        Self::new(p.reset_rate, p.speed_plus, p.direction_prob, level)
    }

    /// Laplace transform in time of the survival probability, complex `s`.
    pub fn sp_laplace_complex(&self, s: Complex<T>, x: T, dir: Direction) -> Result<Complex<T>> {
        check_laplace_arg(s)?;
        check_level_start(self.level, x, dir)?;
        let (lam, g) = (self.reset_rate, self.speed);
        let shift = s + lam;
        let den = s + (-shift * (self.level / g)).exp() * (lam * self.rho);
        if den == re(T::zero()) {
            return Ok(re(T::infinity()));
        }
        let num = match dir {
            Direction::Plus => re::<T>(T::one()) - (-shift * ((self.level - x) / g)).exp(),
            Direction::Minus => re(T::one()),
        };
        Ok(num / den)
    }

    pub fn sp_laplace(&self, s: T, x: T, dir: Direction) -> Result<T> {
        self.sp_laplace_complex(re(s), x, dir).map(real_part)
    }

    /// Mean first-passage time from `x` moving in `dir`.
    pub fn mfpt(&self, x: T, dir: Direction) -> Result<T> {
        check_level_start(self.level, x, dir)?;
        if self.rho == T::zero() {
            return Ok(T::infinity());
        }
        let k = self.reset_rate / self.speed;
        let lr = self.reset_rate * self.rho;
        Ok(match dir {
            Direction::Plus => (k * x).exp() * (k * (self.level - x)).exp_m1() / lr,
            Direction::Minus => (k * self.level).exp() / lr,
        })
    }

    /// `ρ T(0,+) + (1-ρ) T(0,-) = (1/Λ)[e^{Λℓ/Γ}/ρ - 1]`.
    pub fn mfpt_unconditional(&self) -> T {
        if self.rho == T::zero() {
            return T::infinity();
        }
        let k = self.reset_rate * self.level / self.speed;
        (k.exp_m1() + T::one() - self.rho) / (self.reset_rate * self.rho)
    }
}

/// First passage above `level` driven by exponential jumps, no drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpJumps<T: Scalar = f64> {
    pub reset_rate: T,
    pub jump_rate: T,
    pub gamma: T,
    pub rho: T,
    pub level: T,
}

impl<T: Scalar> ExpJumps<T> {
    pub fn new(reset_rate: T, jump_rate: T, gamma: T, rho: T, level: T) -> Result<Self> {
        positive("reset_rate", reset_rate)?;
        nonnegative("jump_rate", jump_rate)?;
        positive("gamma", gamma)?;
        probability(rho)?;
        positive("level", level)?;
        Ok(ExpJumps { reset_rate, jump_rate, gamma, rho, level })
    }

    pub fn from_params(p: &ModelParams<T>, level: T) -> Result<Self> {
        p.validate()?;
        let gamma = match p.jump_law_plus {
            JumpLaw::Exponential { rate } => rate,
            _ => return Err(Error::NotSpecialCase("rightward jumps must be exponential".into())),
        };
        if p.speed_plus != T::zero() {
            return Err(Error::NotSpecialCase("rightward speed must be zero".into()));
        }
        Self::new(p.reset_rate, p.jump_rate_plus, gamma, p.direction_prob, level)
    }

    /// `α_s = γ(s+Λ)/(s+Λ+λ)`.
    pub fn alpha(&self, s: Complex<T>) -> Complex<T> {
        (s + self.reset_rate) * self.gamma / (s + self.reset_rate + self.jump_rate)
    }

    /// Laplace transform in time of the survival probability, complex `s`.
    ///
    /// Uses `(1 + Λρ P̂(s;0,+))/(s+Λρ) = (s+Λ+λ)/D(s)` with
    /// `D(s) = s(s+Λ+λ) + Λλρ e^{-α_s ℓ}`.
    pub fn sp_laplace_complex(&self, s: Complex<T>, x: T, dir: Direction) -> Result<Complex<T>> {
        check_laplace_arg(s)?;
        check_level_start(self.level, x, dir)?;
        let (lam, jr) = (self.reset_rate, self.jump_rate);
        let total = s + lam + jr;
        let alpha = self.alpha(s);
        let den = s * total + (-alpha * self.level).exp() * (lam * jr * self.rho);
        if den == re(T::zero()) {
            return Ok(re(T::infinity()));
        }
        let num = match dir {
            Direction::Plus => total - (-alpha * (self.level - x)).exp() * jr,
            Direction::Minus => total,
        };
        Ok(num / den)
    }

    pub fn sp_laplace(&self, s: T, x: T, dir: Direction) -> Result<T> {
        self.sp_laplace_complex(re(s), x, dir).map(real_part)
    }

    /// `α_0 = γΛ/(Λ+λ)`.
    pub fn alpha0(&self) -> T {
        self.gamma * self.reset_rate / (self.reset_rate + self.jump_rate)
    }

    pub fn mfpt(&self, x: T, dir: Direction) -> Result<T> {
        check_level_start(self.level, x, dir)?;
        if self.rho == T::zero() || self.jump_rate == T::zero() {
            return Ok(T::infinity());
        }
        let (lam, jr) = (self.reset_rate, self.jump_rate);
        let a0 = self.alpha0();
        let top = (lam + jr) / jr * (a0 * self.level).exp();
        Ok(match dir {
            Direction::Plus => (top - (a0 * x).exp()) / (lam * self.rho),
            Direction::Minus => top / (lam * self.rho),
        })
    }

    /// `(T(0,+), T(0,-), ρT(0,+) + (1-ρ)T(0,-))`.
    pub fn mfpt_triple(&self) -> (T, T, T) {
        let plus = self.mfpt(T::zero(), Direction::Plus).expect("origin is admissible");
        let minus = self.mfpt(T::zero(), Direction::Minus).expect("origin is admissible");
        (plus, minus, self.mfpt_unconditional())
    }

    /// `(1/Λ)[(Λ+λ)/(λρ) e^{α_0 ℓ} - 1]`.
    pub fn mfpt_unconditional(&self) -> T {
        if self.rho == T::zero() || self.jump_rate == T::zero() {
            return T::infinity();
        }
        let (lam, jr) = (self.reset_rate, self.jump_rate);
        ((lam + jr) / (jr * self.rho) * (self.alpha0() * self.level).exp() - T::one()) / lam
    }

    /// Unconditional MFPT as `Λ/λ → ∞`: `e^{γℓ}/(λρ)`.
    pub fn mfpt_fast_reset_limit(&self) -> T {
        (self.gamma * self.level).exp() / (self.jump_rate * self.rho)
    }
}

pub fn sp_laplace_pure_drift<T: Scalar>(
    s: T,
    x: T,
    dir: Direction,
    reset_rate: T,
    speed: T,
    rho: T,
    level: T,
) -> Result<T> {
    PureDrift::new(reset_rate, speed, rho, level)?.sp_laplace(s, x, dir)
}

pub fn mfpt_pure_drift<T: Scalar>(x: T, dir: Direction, reset_rate: T, speed: T, rho: T, level: T) -> Result<T> {
    PureDrift::new(reset_rate, speed, rho, level)?.mfpt(x, dir)
}

pub fn mfpt_pure_drift_unconditional<T: Scalar>(reset_rate: T, speed: T, rho: T, level: T) -> Result<T> {
    Ok(PureDrift::new(reset_rate, speed, rho, level)?.mfpt_unconditional())
}

#[allow(clippy::too_many_arguments)]
pub fn sp_laplace_exp_jumps<T: Scalar>(
    s: T,
    x: T,
    dir: Direction,
    reset_rate: T,
    jump_rate: T,
    gamma: T,
    rho: T,
    level: T,
) -> Result<T> {
    ExpJumps::new(reset_rate, jump_rate, gamma, rho, level)?.sp_laplace(s, x, dir)
}

pub fn mfpt_exp_jumps<T: Scalar>(reset_rate: T, jump_rate: T, gamma: T, rho: T, level: T) -> Result<(T, T, T)> {
    Ok(ExpJumps::new(reset_rate, jump_rate, gamma, rho, level)?.mfpt_triple())
}

/// MFPT of an observer who resets deterministically after the ballistic
/// transit time `ℓ/Γ`: `ℓ/(Γρ)`.
pub fn mfpt_rational<T: Scalar>(level: T, speed: T, rho: T) -> Result<T> {
    positive("speed", speed)?;
    positive("level", level)?;
    probability(rho)?;
    if rho == T::zero() {
        return Ok(T::infinity());
    }
    Ok(level / (speed * rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn generic_params(rng: &mut impl Rng) -> ModelParams<f64> {
        ModelParams::new(rng.random_range(0.1..3.0), rng.random_range(0.0..=1.0))
            .with_plus(
                rng.random_range(0.1..2.0),
                rng.random_range(0.0..2.0),
                JumpLaw::Exponential { rate: rng.random_range(0.5..4.0) },
            )
            .with_minus(
                rng.random_range(0.1..2.0),
                rng.random_range(0.0..2.0),
                JumpLaw::Deterministic { size: rng.random_range(0.0..1.0) },
            )
    }

    #[test]
    fn propagator_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = generic_params(&mut rng);
            let s = Complex::new(rng.random_range(0.01..5.0), rng.random_range(-3.0..3.0));
            for (x0, dir) in [(0.0, Direction::Plus), (0.7, Direction::Plus), (-0.4, Direction::Minus)] {
                let v = propagator_fl(&p, 0.0, s, x0, dir).unwrap();
                assert!((v - s.inv()).norm() < 1e-13 * s.inv().norm());
            }
        }
    }

    #[test]
    fn propagator_rejects_bad_inputs() {
        let p = ModelParams::pure_drift(1.0, 0.5, 1.0);
        assert!(matches!(propagator_fl(&p, 1.0, re(1.0), -0.5, Direction::Plus), Err(Error::IncompatibleStart { .. })));
        assert!(propagator_fl(&p, 1.0, re(0.0), 0.0, Direction::Plus).is_err());
    }

    #[test]
    fn rho_one_reduces_to_monotone_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut p = generic_params(&mut rng);
            p.direction_prob = 1.0;
            let omega = rng.random_range(-10.0..10.0);
            let s = Complex::new(rng.random_range(0.01..10.0), rng.random_range(-5.0..5.0));
            let a = propagator_fl(&p, omega, s, 0.0, Direction::Plus).unwrap();
            let b = monotone_propagator_dl(
                p.reset_rate,
                p.jump_rate_plus,
                p.speed_plus,
                &p.jump_law_plus,
                im(-omega),
                s,
                0.0,
            );
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{a} vs {b}");
        }
    }

    #[test]
    fn free_ballistic_limit() {
        let p = ModelParams::new(1e-300, 1.0).with_plus(2.0, 0.0, JumpLaw::Zero);
        let s = Complex::new(0.7, 0.2);
        let v = propagator_fl(&p, 1.3, s, 0.0, Direction::Plus).unwrap();
        let free = (s - im(1.3 * 2.0)).inv();
        assert!((v - free).norm() < 1e-12);
    }

    #[test]
    fn stationary_cf_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = generic_params(&mut rng);
        assert_eq!(stationary_cf(&p, 0.0).unwrap(), Complex::new(1.0, 0.0));
        for _ in 0..50 {
            let omega = rng.random_range(-5.0..5.0);
            let s = re(1e-8);
            let lim = propagator_fl(&p, omega, s, 0.0, Direction::Plus).unwrap() * s;
            assert!((lim - stationary_cf(&p, omega).unwrap()).norm() < 1e-6);
        }
        let mut frozen = p.clone();
        frozen.reset_rate = 0.0;
        assert_eq!(stationary_cf(&frozen, 1.0), Err(Error::NoStationaryState));
    }

    #[test]
    fn exp_drift_stationary_normalizes_and_matches_cf() {
        let law = ExpDriftStationary::new(1.3, 0.7, 2.0, 0.8, 0.35).unwrap();
        let pos = quadrature::integrate_to_infinity(|x| law.density(x), 0.0, 0.5);
        let neg = quadrature::integrate_to_infinity(|x| law.density(-x), 0.0, 0.5);
        // x = 0 double counts one node of measure zero; quadrature never hits it
        assert!((law.atom() + pos + neg - 1.0).abs() < 1e-8);
        assert!((pos - 0.35 * 0.7 / 2.0).abs() < 1e-10);
        assert!((neg - 0.65).abs() < 1e-10);
        assert!((law.continuous_mass(-50.0, 50.0) + law.atom() - 1.0).abs() < 1e-12);

        let p = ModelParams::jumps_right_drift_left(1.3, 0.35, 0.7, 2.0, 0.8);
        assert_eq!(ExpDriftStationary::from_params(&p).unwrap(), law);
        for omega in [-3.0, -0.4, 0.9, 2.5] {
            let cf = stationary_cf(&p, omega).unwrap();
            let q_re = law.atom()
                + quadrature::integrate_to_infinity(|x| law.density(x) * (omega * x).cos(), 0.0, 0.25)
                + quadrature::integrate_to_infinity(|x| law.density(-x) * (omega * x).cos(), 0.0, 0.25);
            let q_im = quadrature::integrate_to_infinity(|x| law.density(x) * (omega * x).sin(), 0.0, 0.25)
                - quadrature::integrate_to_infinity(|x| law.density(-x) * (omega * x).sin(), 0.0, 0.25);
            assert!((cf - Complex::new(q_re, q_im)).norm() < 1e-8, "{cf} vs {q_re}+{q_im}i");
            assert!((cf - law.cf(omega)).norm() < 1e-13);
        }
    }

    #[test]
    fn exp_drift_stationary_cases() {
        let (_, atom) = stationary_density_exp_drift(1.0, 1.0, 1.0, 1.0, 0.5, 0.3).unwrap();
        assert_eq!(atom, 0.25);
        let law = ExpDriftStationary::new(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(law.density(-0.5), 0.0);
        assert_eq!(law.continuous_mass(-10.0, 0.0), 0.0);
        let p = ModelParams::pure_drift(1.0, 0.5, 1.0);
        assert!(matches!(ExpDriftStationary::from_params(&p), Err(Error::NotSpecialCase(_))));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(tail_exponent_beta(1.0, 1.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(tail_exponent_beta(2.0, 0.0, 4.0, 0.5).unwrap(), 1.0);
        assert!((tail_exponent_beta(1.0f64, 1.0, 2.0, 0.25).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(tail_exponent_beta(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn pure_drift_edge_values() {
        let m = PureDrift::new(1.0f64, 2.0, 0.5, 3.0).unwrap();
        assert_eq!(m.sp_laplace(0.7, 3.0, Direction::Plus).unwrap(), 0.0);
        assert_eq!(m.mfpt(3.0, Direction::Plus).unwrap(), 0.0);
        let big = 1e6;
        assert!((big * m.sp_laplace(big, 1.0, Direction::Plus).unwrap() - 1.0).abs() < 1e-4);
        let t0 = m.sp_laplace(0.0, 0.0, Direction::Plus).unwrap();
        let k = 1.0 * 3.0 / 2.0;
        assert!(rel(t0, (f64::exp(k) - 1.0) / 0.5) < 1e-14);
        assert!(rel(t0, m.mfpt(0.0, Direction::Plus).unwrap()) < 1e-14);
        assert!(m.sp_laplace(0.1, 3.5, Direction::Plus).is_err());
        assert!(m.sp_laplace(0.1, 0.5, Direction::Minus).is_err());
    }

    #[test]
    fn pure_drift_ballistic_limit() {
        let m = PureDrift::new(1e-8, 2.0, 1.0, 3.0).unwrap();
        assert!(rel(m.mfpt_unconditional(), 1.5) < 1e-6);
        let dead = PureDrift::new(1.0, 2.0, 0.0, 3.0).unwrap();
        assert_eq!(dead.mfpt_unconditional(), f64::INFINITY);
        assert_eq!(dead.mfpt(0.0, Direction::Minus).unwrap(), f64::INFINITY);
    }

    #[test]
    fn minus_start_does_not_depend_on_position() {
        let m = PureDrift::new(0.8, 1.0, 0.3, 1.0).unwrap();
        let e = ExpJumps::new(0.8, 1.2, 3.0, 0.3, 1.0).unwrap();
        for x in [0.0, -0.5, -7.0] {
            assert_eq!(
                m.sp_laplace(0.3, x, Direction::Minus).unwrap(),
                m.sp_laplace(0.3, 0.0, Direction::Minus).unwrap()
            );
            assert_eq!(
                e.sp_laplace(0.3, x, Direction::Minus).unwrap(),
                e.sp_laplace(0.3, 0.0, Direction::Minus).unwrap()
            );
        }
    }

    #[test]
    fn mfpt_equals_sp_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let lam = rng.random_range(0.05..5.0);
            let rho = rng.random_range(0.05..=1.0);
            let level = rng.random_range(0.1..3.0);
            let pd = PureDrift::new(lam, rng.random_range(0.2..3.0), rho, level).unwrap();
            let ej = ExpJumps::new(lam, rng.random_range(0.1..3.0), rng.random_range(0.2..5.0), rho, level).unwrap();
            let x = rng.random_range(0.0..level);
            for dir in [Direction::Plus, Direction::Minus] {
                let x = if dir == Direction::Plus { x } else { -x };
                assert!(rel(pd.mfpt(x, dir).unwrap(), pd.sp_laplace(0.0, x, dir).unwrap()) <= 1e-12);
                assert!(rel(ej.mfpt(x, dir).unwrap(), ej.sp_laplace(0.0, x, dir).unwrap()) <= 1e-12);
            }
            let (tp, tm, t) = ej.mfpt_triple();
            assert!(rel(t, rho * tp + (1.0 - rho) * tm) < 1e-14);
            let tp = pd.mfpt(0.0, Direction::Plus).unwrap();
            let tm = pd.mfpt(0.0, Direction::Minus).unwrap();
            assert!(rel(pd.mfpt_unconditional(), rho * tp + (1.0 - rho) * tm) < 1e-13);
        }
    }

    #[test]
    fn closed_form_sp_positive_and_decreasing() {
        let pd = PureDrift::new(1.3, 0.9, 0.4, 1.5).unwrap();
        let ej = ExpJumps::new(0.6, 1.1, 2.0, 0.7, 1.5).unwrap();
        for (x, dir) in [(0.0, Direction::Plus), (0.8, Direction::Plus), (-1.0, Direction::Minus)] {
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for k in 0..200 {
                let s = 0.01 * 1.08f64.powi(k);
                let cur = (pd.sp_laplace(s, x, dir).unwrap(), ej.sp_laplace(s, x, dir).unwrap());
                assert!(cur.0 > 0.0 && cur.1 > 0.0);
                assert!(cur.0 < prev.0 && cur.1 < prev.1);
                prev = cur;
            }
            assert!(prev.0 < 1e-4 && prev.1 < 1e-4);
        }
    }

    #[test]
    fn exp_jumps_limits() {
        let lam_j = 1.3;
        let e = ExpJumps::new(1e6 * lam_j, lam_j, 4.0, 1.0, 1.0).unwrap();
        assert!(rel(e.mfpt_unconditional(), 4f64.exp() / lam_j) < 1e-4);
        assert!(rel(e.mfpt_fast_reset_limit(), 4f64.exp() / lam_j) < 1e-15);
        let e = ExpJumps::new(2.0, 2.0, 4.0, 1.0, 1.0).unwrap();
        assert!(rel(e.mfpt_unconditional(), (2.0 * 2f64.exp() - 1.0) / 2.0) < 1e-14);
        let tp = e.sp_laplace(0.0, 0.0, Direction::Plus).unwrap();
        let a0 = 4.0 * 2.0 / 4.0;
        assert!(rel(tp, (2.0 * f64::exp(a0) - 1.0) / 2.0) < 1e-14);
        // no jumps: never crosses
        let still = ExpJumps::new(0.9, 1e-10, 2.0, 0.6, 1.0).unwrap();
        for s in [0.1, 1.0, 10.0] {
            assert!(rel(still.sp_laplace(s, 0.0, Direction::Minus).unwrap(), 1.0 / s) < 1e-8);
            assert!(rel(still.sp_laplace(s, 0.3, Direction::Plus).unwrap(), 1.0 / s) < 1e-8);
        }
    }

    #[test]
    fn exp_jumps_at_boundary() {
        // sitting on the level, the first jump always crosses
        let e = ExpJumps::new(0.9, 1.7, 2.0, 0.6, 1.0).unwrap();
        let s = 1e5;
        let v = e.sp_laplace(s, 1.0, Direction::Plus).unwrap();
        assert!(rel(v, 1.0 / (s + 1.7)) < 1e-3);
    }

    #[test]
    fn rational_strategy() {
        assert_eq!(mfpt_rational(2.0, 4.0, 1.0).unwrap(), 0.5);
        assert_eq!(mfpt_rational(2.0, 4.0, 0.5).unwrap(), 1.0);
        assert_eq!(mfpt_rational(2.0, 4.0, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn unconditional_mfpt_grows_with_level() {
        let mut prev = 0.0;
        for k in 1..50 {
            let t = mfpt_pure_drift_unconditional(0.7, 1.0, 0.4, 0.1 * k as f64).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn works_in_f32() {
        let m = PureDrift::<f32>::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let t = m.mfpt_unconditional();
        assert!((t - (2.0 * 1f32.exp() - 1.0)).abs() < 1e-5);
        let p = ModelParams::<f32>::pure_drift(1.0, 0.5, 1.0);
        assert_eq!(stationary_cf(&p, 0.0).unwrap(), Complex::new(1.0f32, 0.0));
    }
}
