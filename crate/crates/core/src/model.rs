//! Process parameterization and jump-size laws.
//!
//! The walker restarts from the origin at Poisson times of rate `reset_rate`.
//! Each restart picks the rightward branch with probability `direction_prob`
//! and the leftward branch otherwise. Inside a branch the walker moves
//! monotonically away from the origin: a constant speed plus positive jumps
//! arriving at the branch's jump rate with sizes drawn from the branch's
//! [`JumpLaw`].

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, RngCore};
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::scalar::{im, re, Scalar};

/// Orientation of the current inter-reset stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    /// `+1` for [`Direction::Plus`], `-1` for [`Direction::Minus`].
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Direction::Plus => T::one(),
            Direction::Minus => -T::one(),
        }
    }

    /// Whether `x` lies on this direction's side of the origin (the origin
    /// belongs to both).
    pub fn admits<T: Scalar>(self, x: T) -> bool {
        match self {
            Direction::Plus => x >= T::zero(),
            Direction::Minus => x <= T::zero(),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Plus => "+",
            Direction::Minus => "-",
        })
    }
}

/// A user-supplied jump-size law on `[0, ∞)`.
///
/// `laplace` must be the analytic Laplace transform `E[e^{-rJ}]`, valid for
/// complex `r` with `Re r ≥ 0` and, for Talbot-type inversion, on the left
/// half plane wherever the continuation exists.
pub trait JumpDistribution<T: Scalar>: fmt::Debug + Send + Sync {
    fn laplace(&self, r: Complex<T>) -> Complex<T>;
    fn mean(&self) -> T;
    fn sample(&self, rng: &mut dyn RngCore) -> T;
    /// `P{J = 0}`.
    fn zero_mass(&self) -> T {
        T::zero()
    }
}

/// Distribution of the jump sizes within one direction.
#[derive(Debug, Clone)]
pub enum JumpLaw<T: Scalar = f64> {
    /// Density `γ e^{-γu}`.
    Exponential {
        rate: T,
    },
    /// Point mass at `size`.
    Deterministic {
        size: T,
    },
    /// Point mass at zero: jumps happen but move nothing.
    Zero,
    Custom(Arc<dyn JumpDistribution<T>>),
}

impl<T: Scalar> PartialEq for JumpLaw<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JumpLaw::Exponential { rate: a }, JumpLaw::Exponential { rate: b }) => a == b,
            (JumpLaw::Deterministic { size: a }, JumpLaw::Deterministic { size: b }) => a == b,
            (JumpLaw::Zero, JumpLaw::Zero) => true,
            (JumpLaw::Custom(a), JumpLaw::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl<T: Scalar> JumpLaw<T> {
    pub fn exponential(rate: T) -> Result<Self> {
        let law = JumpLaw::Exponential { rate };
        law.validate()?;
        Ok(law)
    }

    pub fn deterministic(size: T) -> Result<Self> {
        let law = JumpLaw::Deterministic { size };
        law.validate()?;
        Ok(law)
    }

    pub fn custom(law: impl JumpDistribution<T> + 'static) -> Self {
        JumpLaw::Custom(Arc::new(law))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::Exponential { rate } if !(rate.is_finite() && *rate > T::zero()) => {
                Err(Error::InvalidJumpLaw(format!("exponential rate must be positive, got {rate}")))
            }
            JumpLaw::Deterministic { size } if !(size.is_finite() && *size >= T::zero()) => {
                Err(Error::InvalidJumpLaw(format!("deterministic size must be nonnegative, got {size}")))
            }
            _ => Ok(()),
        }
    }

    /// `ĥ(r) = E[e^{-rJ}]` for real `r ≥ 0`.
    pub fn laplace(&self, r: T) -> T {
        match self {
            JumpLaw::Exponential { rate } => *rate / (*rate + r),
            JumpLaw::Deterministic { size } => (-r * *size).exp(),
            JumpLaw::Zero => T::one(),
            JumpLaw::Custom(law) => law.laplace(re(r)).re,
        }
    }

    /// Analytic continuation of [`JumpLaw::laplace`] to complex arguments.
    pub fn laplace_complex(&self, r: Complex<T>) -> Complex<T> {
        match self {
            JumpLaw::Exponential { rate } => re::<T>(*rate) / (r + *rate),
            JumpLaw::Deterministic { size } => (-r * *size).exp(),
            JumpLaw::Zero => re(T::one()),
            JumpLaw::Custom(law) => law.laplace(r),
        }
    }

    /// Directional characteristic function `h̃±(ω) = E[e^{±iωJ}]`.
    pub fn fourier(&self, omega: T, dir: Direction) -> Complex<T> {
        self.laplace_complex(im(-dir.sign::<T>() * omega))
    }

    pub fn mean(&self) -> T {
        match self {
            JumpLaw::Exponential { rate } => rate.recip(),
            JumpLaw::Deterministic { size } => *size,
            JumpLaw::Zero => T::zero(),
            JumpLaw::Custom(law) => law.mean(),
        }
    }

    /// `P{J = 0}`: jumps of size zero never displace the walker.
    pub fn zero_mass(&self) -> T {
        match self {
            JumpLaw::Exponential { .. } => T::zero(),
            JumpLaw::Deterministic { size } if size.is_zero() => T::one(),
            JumpLaw::Deterministic { .. } => T::zero(),
            JumpLaw::Zero => T::one(),
            JumpLaw::Custom(law) => law.zero_mass(),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> T {
        match self {
            JumpLaw::Exponential { rate } => T::lit(rng.sample::<f64, _>(Exp1)) / *rate,
            JumpLaw::Deterministic { size } => *size,
            JumpLaw::Zero => T::zero(),
            JumpLaw::Custom(law) => law.sample(rng),
        }
    }
}

/// Full parameter set of the alternating reset process.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T: Scalar = f64> {
    /// Λ, rate of the Poissonian resets.
    pub reset_rate: T,
    /// ρ, probability that a restart picks the rightward branch.
    pub direction_prob: T,
    pub speed_plus: T,
    pub speed_minus: T,
    pub jump_rate_plus: T,
    pub jump_rate_minus: T,
    pub jump_law_plus: JumpLaw<T>,
    pub jump_law_minus: JumpLaw<T>,
}

impl<T: Scalar> ModelParams<T> {
    /// Motionless template: zero speeds, no jumps. Fill the branches with
    /// [`ModelParams::with_plus`] and [`ModelParams::with_minus`].
    pub fn new(reset_rate: T, direction_prob: T) -> Self {
        ModelParams {
            reset_rate,
            direction_prob,
            speed_plus: T::zero(),
            speed_minus: T::zero(),
            jump_rate_plus: T::zero(),
            jump_rate_minus: T::zero(),
            jump_law_plus: JumpLaw::Zero,
            jump_law_minus: JumpLaw::Zero,
        }
    }

    pub fn with_plus(mut self, speed: T, jump_rate: T, law: JumpLaw<T>) -> Self {
        self.speed_plus = speed;
        self.jump_rate_plus = jump_rate;
        self.jump_law_plus = law;
        self
    }

    pub fn with_minus(mut self, speed: T, jump_rate: T, law: JumpLaw<T>) -> Self {
        self.speed_minus = speed;
        self.jump_rate_minus = jump_rate;
        self.jump_law_minus = law;
        self
    }

    /// Drift only, same speed both ways.
    pub fn pure_drift(reset_rate: T, direction_prob: T, speed: T) -> Self {
        Self::new(reset_rate, direction_prob).with_plus(speed, T::zero(), JumpLaw::Zero).with_minus(
            speed,
            T::zero(),
            JumpLaw::Zero,
        )
    }

    /// Exponential jumps of rate `gamma` at intensity `jump_rate`, no drift.
    pub fn exp_jumps(reset_rate: T, direction_prob: T, jump_rate: T, gamma: T) -> Self {
        let law = JumpLaw::Exponential { rate: gamma };
        Self::new(reset_rate, direction_prob).with_plus(T::zero(), jump_rate, law.clone()).with_minus(
            T::zero(),
            jump_rate,
            law,
        )
    }

    /// Exponential jumps rightwards, constant drift leftwards. This is the
    /// case with a closed-form stationary density.
    pub fn jumps_right_drift_left(reset_rate: T, direction_prob: T, jump_rate: T, gamma: T, speed: T) -> Self {
        Self::new(reset_rate, direction_prob)
            .with_plus(T::zero(), jump_rate, JumpLaw::Exponential { rate: gamma })
            .with_minus(speed, T::zero(), JumpLaw::Zero)
    }

    pub fn speed(&self, dir: Direction) -> T {
        match dir {
            Direction::Plus => self.speed_plus,
            Direction::Minus => self.speed_minus,
        }
    }

    pub fn jump_rate(&self, dir: Direction) -> T {
        match dir {
            Direction::Plus => self.jump_rate_plus,
            Direction::Minus => self.jump_rate_minus,
        }
    }

    pub fn jump_law(&self, dir: Direction) -> &JumpLaw<T> {
        match dir {
            Direction::Plus => &self.jump_law_plus,
            Direction::Minus => &self.jump_law_minus,
        }
    }

    /// Probability that a restart picks `dir`.
    pub fn direction_weight(&self, dir: Direction) -> T {
        match dir {
            Direction::Plus => self.direction_prob,
            Direction::Minus => T::one() - self.direction_prob,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &'static str, v: T| {
            if v.is_finite() && v >= T::zero() {
                Ok(())
            } else {
                Err(Error::Negative { name, value: v.as_f64() })
            }
        };
        nonneg("reset_rate", self.reset_rate)?;
        nonneg("speed_plus", self.speed_plus)?;
        nonneg("speed_minus", self.speed_minus)?;
        nonneg("jump_rate_plus", self.jump_rate_plus)?;
        nonneg("jump_rate_minus", self.jump_rate_minus)?;
        let rho = self.direction_prob;
        if !(rho >= T::zero() && rho <= T::one()) {
            return Err(Error::ProbabilityOutOfRange { name: "direction_prob", value: rho.as_f64() });
        }
        self.jump_law_plus.validate()?;
        self.jump_law_minus.validate()?;
        for dir in [Direction::Plus, Direction::Minus] {
            let reachable = self.direction_weight(dir) > T::zero();
            let moves = self.speed(dir) > T::zero() || self.jump_rate(dir) > T::zero();
            if reachable && !moves {
                return Err(Error::FrozenDirection(dir));
            }
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

/// Checks every parameter invariant and hands the parameters back untouched.
pub fn validate_params<T: Scalar>(p: ModelParams<T>) -> Result<ModelParams<T>> {
    p.validated()
}
