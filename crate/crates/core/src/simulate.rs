//! Event-driven exact Monte Carlo for the reset process.
//!
//! Within a stretch the next reset and the next jump are competing
//! exponential clocks, so the time to the next event is exponential with the
//! summed rate and its kind is picked in proportion to the rates. Nothing is
//! discretized in time; drift crossings of a level are solved analytically.
//!
//! Path `i` of a run with master seed `seed` always draws from
//! [`path_rng`]`(seed, i)`, and paths are grouped into fixed-size chunks whose
//! partial results are merged in index order. Results are therefore
//! bit-identical for any number of worker threads.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::analytic::{ExpJumps, PureDrift};
use crate::error::{Error, Result};
use crate::model::{Direction, ModelParams};

const CHUNK: u64 = 1024;

/// Cap used when no closed-form MFPT is available.
pub const FALLBACK_CAP: f64 = 1e4;

/// Snapshot time for stationary sampling, in units of `1/Λ`.
pub const STATIONARY_RELAXATION: f64 = 20.0;

/// Independent random stream for path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn exp_time<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    if rate > 0.0 {
        rng.sample::<f64, _>(Exp1) / rate
    } else {
        f64::INFINITY
    }
}

fn draw_direction<R: Rng>(p: &ModelParams, rng: &mut R) -> Direction {
    if rng.random::<f64>() < p.direction_prob {
        Direction::Plus
    } else {
        Direction::Minus
    }
}

/// Runs `f` over path indices `0..n` in fixed chunks and returns one
/// partial result per chunk, in chunk order.
fn chunked<A, F>(n: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<u64>) -> A + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks).into_par_iter().map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// Restart at the origin with the newly drawn direction.
    Reset(Direction),
    Jump(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Position right after the event.
    pub position: f64,
}

/// One trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub start_position: f64,
    pub initial_direction: Direction,
    pub horizon: f64,
    pub events: Vec<PathEvent>,
}

impl PathSample {
    fn segment_at(&self, t: f64) -> (f64, f64, Direction) {
        let (mut t0, mut x0, mut dir) = (0.0, self.start_position, self.initial_direction);
        for e in &self.events {
            if e.time > t {
                break;
            }
            t0 = e.time;
            x0 = e.position;
            if let EventKind::Reset(d) = e.kind {
                dir = d;
            }
        }
        (t0, x0, dir)
    }

    /// Position at time `t ∈ [0, horizon]` (right-continuous at events).
    pub fn position_at(&self, p: &ModelParams, t: f64) -> f64 {
        let (t0, x0, dir) = self.segment_at(t);
        x0 + dir.sign::<f64>() * p.speed(dir) * (t - t0)
    }

    pub fn direction_at(&self, t: f64) -> Direction {
        self.segment_at(t).2
    }

    pub fn final_position(&self, p: &ModelParams) -> f64 {
        self.position_at(p, self.horizon)
    }

    /// Checks ordering, reset positions, affine motion between events and
    /// sign consistency with the running direction.
    pub fn check_invariants(&self, p: &ModelParams) -> std::result::Result<(), String> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        if !self.initial_direction.admits(self.start_position) {
            return Err("start position opposes the initial direction".into());
        }
        let (mut t, mut x, mut dir) = (0.0, self.start_position, self.initial_direction);
        for (k, e) in self.events.iter().enumerate() {
            if !(e.time > t || (k == 0 && e.time >= t)) || e.time > self.horizon {
                return Err(format!("event {k} at {} out of order", e.time));
            }
            let before = x + dir.sign::<f64>() * p.speed(dir) * (e.time - t);
            if !dir.admits(before) {
                return Err(format!("event {k}: position {before} opposes direction {dir}"));
            }
            match e.kind {
                EventKind::Reset(d) => {
                    if e.position != 0.0 {
                        return Err(format!("event {k}: reset to {} instead of 0", e.position));
                    }
                    dir = d;
                }
                EventKind::Jump(size) => {
                    if size < 0.0 || !close(e.position, before + dir.sign::<f64>() * size) {
                        return Err(format!("event {k}: jump inconsistent with drift"));
                    }
                }
            }
            if !dir.admits(e.position) {
                return Err(format!("event {k}: position {} opposes direction {dir}", e.position));
            }
            t = e.time;
            x = e.position;
        }
        let end = x + dir.sign::<f64>() * p.speed(dir) * (self.horizon - t);
        if !dir.admits(end) {
            return Err("final position opposes direction".into());
        }
        Ok(())
    }
}

fn check_start(x: f64, dir: Direction) -> Result<()> {
    if x.is_finite() && dir.admits(x) {
        Ok(())
    } else {
        Err(Error::IncompatibleStart { position: x, direction: dir })
    }
}

/// Samples a full trajectory on `[0, horizon]`.
pub fn simulate_path<R: Rng>(
    p: &ModelParams,
    horizon: f64,
    start: (f64, Direction),
    rng: &mut R,
) -> Result<PathSample> {
    p.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::arg(format!("horizon must be positive, got {horizon}")));
    }
    let (mut x, mut dir) = start;
    check_start(x, dir)?;
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        let jump_rate = p.jump_rate(dir);
        let total = p.reset_rate + jump_rate;
        let next = t + exp_time(rng, total);
        if next > horizon {
            break;
        }
        x += dir.sign::<f64>() * p.speed(dir) * (next - t);
        t = next;
        let kind = if rng.random::<f64>() * total < p.reset_rate {
            dir = draw_direction(p, rng);
            x = 0.0;
            EventKind::Reset(dir)
        } else {
            let size = p.jump_law(dir).sample(rng);
            x += dir.sign::<f64>() * size;
            EventKind::Jump(size)
        };
        events.push(PathEvent { time: t, kind, position: x });
    }
    Ok(PathSample { start_position: start.0, initial_direction: start.1, horizon, events })
}

/// A draw of `X(t)` together with whether the walker sits exactly on the
/// reset point, i.e. has not moved since its last restart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionDraw {
    pub position: f64,
    pub at_origin: bool,
}

/// Draws `X(t)` for a walker started at the origin with direction drawn
/// from the restart law.
pub fn sample_position_flagged<R: Rng>(p: &ModelParams, t: f64, rng: &mut R) -> PositionDraw {
    let mut dir = draw_direction(p, rng);
    let (mut x, mut at_origin, mut now) = (0.0, true, 0.0);
    loop {
        let total = p.reset_rate + p.jump_rate(dir);
        let next = now + exp_time(rng, total);
        let stop = next.min(t);
        let speed = p.speed(dir);
        if speed > 0.0 && stop > now {
            x += dir.sign::<f64>() * speed * (stop - now);
            at_origin = false;
        }
        if next > t {
            return PositionDraw { position: x, at_origin };
        }
        now = next;
        if rng.random::<f64>() * total < p.reset_rate {
            dir = draw_direction(p, rng);
            x = 0.0;
            at_origin = true;
        } else {
            let size = p.jump_law(dir).sample(rng);
            if size > 0.0 {
                x += dir.sign::<f64>() * size;
                at_origin = false;
            }
        }
    }
}

pub fn sample_position<R: Rng>(p: &ModelParams, t: f64, rng: &mut R) -> f64 {
    sample_position_flagged(p, t, rng).position
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstPassageSample {
    Crossed(f64),
    /// No crossing before the cap.
    Censored(f64),
}

impl FirstPassageSample {
    pub fn time(self) -> f64 {
        match self {
            FirstPassageSample::Crossed(t) | FirstPassageSample::Censored(t) => t,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, FirstPassageSample::Censored(_))
    }
}

fn check_level_cap(level: f64, cap: f64) -> Result<()> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::arg(format!("level must be positive, got {level}")));
    }
    if !(cap > 0.0) {
        return Err(Error::arg(format!("censoring cap must be positive, got {cap}")));
    }
    Ok(())
}

fn first_passage_unchecked<R: Rng>(
    p: &ModelParams,
    level: f64,
    cap: f64,
    start: (f64, Direction),
    rng: &mut R,
) -> FirstPassageSample {
    let (mut x, mut dir) = start;
    let mut t = 0.0;
    loop {
        match dir {
            Direction::Plus => {
                let total = p.reset_rate + p.jump_rate_plus;
                let dt = exp_time(rng, total);
                if p.speed_plus > 0.0 {
                    let hit = t + (level - x) / p.speed_plus;
                    if hit <= t + dt {
                        return if hit <= cap {
                            FirstPassageSample::Crossed(hit)
                        } else {
                            FirstPassageSample::Censored(cap)
                        };
                    }
                }
                if t + dt > cap {
                    return FirstPassageSample::Censored(cap);
                }
                t += dt;
                x += p.speed_plus * dt;
                if rng.random::<f64>() * total < p.reset_rate {
                    x = 0.0;
                    dir = draw_direction(p, rng);
                } else {
                    let size = p.jump_law_plus.sample(rng);
                    if size > level - x {
                        return FirstPassageSample::Crossed(t);
                    }
                    x += size;
                }
            }
            // leftward motion never approaches the level; only the next
            // reset matters
            Direction::Minus => {
                t += exp_time(rng, p.reset_rate);
                if t > cap {
                    return FirstPassageSample::Censored(cap);
                }
                x = 0.0;
                dir = draw_direction(p, rng);
            }
        }
    }
}

/// First crossing of `level` from the origin with direction drawn from the
/// restart law.
pub fn sample_first_passage<R: Rng>(p: &ModelParams, level: f64, cap: f64, rng: &mut R) -> Result<FirstPassageSample> {
    p.validate()?;
    check_level_cap(level, cap)?;
    let dir = draw_direction(p, rng);
    Ok(first_passage_unchecked(p, level, cap, (0.0, dir), rng))
}

/// First crossing of `level` from a given position and direction.
pub fn sample_first_passage_from<R: Rng>(
    p: &ModelParams,
    level: f64,
    cap: f64,
    start: (f64, Direction),
    rng: &mut R,
) -> Result<FirstPassageSample> {
    p.validate()?;
    check_level_cap(level, cap)?;
    check_start(start.0, start.1)?;
    if start.1 == Direction::Plus && start.0 > level {
        return Err(Error::arg("start already above the level"));
    }
    Ok(first_passage_unchecked(p, level, cap, start, rng))
}

/// Unconditional closed-form MFPT from the origin when one applies.
pub fn closed_form_mfpt(p: &ModelParams, level: f64) -> Option<f64> {
    if let Ok(m) = PureDrift::from_params(p, level) {
        return Some(m.mfpt_unconditional());
    }
    if let Ok(m) = ExpJumps::from_params(p, level) {
        return Some(m.mfpt_unconditional());
    }
    None
}

/// 50 × the closed-form MFPT when available, [`FALLBACK_CAP`] otherwise.
pub fn default_censoring_cap(p: &ModelParams, level: f64) -> f64 {
    match closed_form_mfpt(p, level) {
        Some(t) if t.is_finite() => 50.0 * t,
        _ => FALLBACK_CAP,
    }
}

/// Welford accumulator, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, o: &RunningStats) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }

    /// Sample standard deviation (`n - 1` denominator).
    pub fn std_dev(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2.max(0.0) / (self.n - 1) as f64).sqrt()
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std_dev() / (self.n as f64).sqrt()
        }
    }
}

/// Monte Carlo estimate. `n` counts all runs; `mean` and `stderr` are over
/// the `n - censored` uncensored ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub censored: u64,
}

impl EstimateWithError {
    fn from_stats(s: &RunningStats, censored: u64) -> Self {
        EstimateWithError { mean: s.mean, stderr: s.stderr(), n: s.n + censored, censored }
    }

    /// Fraction estimate from `hits` successes among `n` Bernoulli trials.
    pub fn proportion(hits: u64, n: u64) -> Self {
        let p = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let stderr = if n < 2 { 0.0 } else { (p * (1.0 - p) / (n - 1) as f64).max(0.0).sqrt() };
        EstimateWithError { mean: p, stderr, n, censored: 0 }
    }

    /// Errors if any run was censored, as needed before comparing against
    /// an exact mean.
    pub fn require_uncensored(self) -> Result<Self> {
        if self.censored > 0 {
            Err(Error::Censored { censored: self.censored, n: self.n })
        } else {
            Ok(self)
        }
    }

    /// `|mean - target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

fn check_paths(n_paths: u64) -> Result<()> {
    if n_paths == 0 {
        Err(Error::arg("n_paths must be at least 1"))
    } else {
        Ok(())
    }
}

fn estimate_passage(
    p: &ModelParams,
    level: f64,
    start: Option<(f64, Direction)>,
    n_paths: u64,
    cap: f64,
    seed: u64,
) -> Result<EstimateWithError> {
    let parts = chunked(n_paths, |range| {
        let mut stats = RunningStats::default();
        let mut censored = 0;
        for i in range {
            let mut rng = path_rng(seed, i);
            let start = start.unwrap_or_else(|| (0.0, draw_direction(p, &mut rng)));
            match first_passage_unchecked(p, level, cap, start, &mut rng) {
                FirstPassageSample::Crossed(t) => stats.push(t),
                FirstPassageSample::Censored(_) => censored += 1,
            }
        }
        (stats, censored)
    });
    let mut stats = RunningStats::default();
    let mut censored = 0;
    for (s, c) in &parts {
        stats.merge(s);
        censored += c;
    }
    Ok(EstimateWithError::from_stats(&stats, censored))
}

/// MFPT estimate from the origin. `cap = None` uses [`default_censoring_cap`].
pub fn estimate_mfpt(
    p: &ModelParams,
    level: f64,
    n_paths: u64,
    cap: Option<f64>,
    seed: u64,
) -> Result<EstimateWithError> {
    p.validate()?;
    check_paths(n_paths)?;
    let cap = cap.unwrap_or_else(|| default_censoring_cap(p, level));
    check_level_cap(level, cap)?;
    estimate_passage(p, level, None, n_paths, cap, seed)
}

pub fn estimate_mfpt_from(
    p: &ModelParams,
    level: f64,
    start: (f64, Direction),
    n_paths: u64,
    cap: f64,
    seed: u64,
) -> Result<EstimateWithError> {
    p.validate()?;
    check_paths(n_paths)?;
    check_level_cap(level, cap)?;
    check_start(start.0, start.1)?;
    estimate_passage(p, level, Some(start), n_paths, cap, seed)
}

/// Survival probability `P{T > t}` from the origin at every `t` of a sorted
/// grid.
pub fn estimate_survival(
    p: &ModelParams,
    level: f64,
    t_grid: &[f64],
    n_paths: u64,
    seed: u64,
) -> Result<Vec<(f64, EstimateWithError)>> {
    p.validate()?;
    check_paths(n_paths)?;
    if t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::arg("time grid must be sorted, finite and nonnegative"));
    }
    let cap = t_grid.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    check_level_cap(level, cap)?;
    let parts = chunked(n_paths, |range| {
        let mut alive = vec![0u64; t_grid.len()];
        for i in range {
            let mut rng = path_rng(seed, i);
            let start = (0.0, draw_direction(p, &mut rng));
            let sample = first_passage_unchecked(p, level, cap, start, &mut rng);
            for (k, &t) in t_grid.iter().enumerate() {
                let survives = match sample {
                    FirstPassageSample::Crossed(tc) => tc > t,
                    FirstPassageSample::Censored(_) => true,
                };
                if !survives {
                    break;
                }
                alive[k] += 1;
            }
        }
        alive
    });
    let mut alive = vec![0u64; t_grid.len()];
    for part in &parts {
        for (a, b) in alive.iter_mut().zip(part) {
            *a += b;
        }
    }
    Ok(t_grid.iter().zip(&alive).map(|(&t, &a)| (t, EstimateWithError::proportion(a, n_paths))).collect())
}

/// Equal-width bins on `[lo, hi)` plus under/overflow counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 {
            return Err(Error::arg("histogram needs lo < hi and at least one bin"));
        }
        Ok(Histogram { lo, hi, counts: vec![0; bins], underflow: 0, overflow: 0 })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            self.underflow += 1;
        } else if x >= self.hi {
            self.overflow += 1;
        } else {
            let last = self.counts.len() - 1;
            let i = ((x - self.lo) / self.width()) as usize;
            self.counts[i.min(last)] += 1;
        }
    }

    fn merge(&mut self, o: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        self.underflow += o.underflow;
        self.overflow += o.overflow;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryEstimate {
    /// Samples away from the origin.
    pub histogram: Histogram,
    /// Fraction of samples sitting exactly at the reset point.
    pub atom: EstimateWithError,
    pub n: u64,
}

/// Histogram of `X(t_snapshot)` from independent walkers started at the
/// origin; `t_snapshot = None` picks `20/Λ`, and shorter snapshots are
/// rejected.
pub fn estimate_stationary(
    p: &ModelParams,
    n_samples: u64,
    t_snapshot: Option<f64>,
    bins: (f64, f64, usize),
    seed: u64,
) -> Result<StationaryEstimate> {
    p.validate()?;
    check_paths(n_samples)?;
    if p.reset_rate <= 0.0 {
        return Err(Error::NoStationaryState);
    }
    let min_t = STATIONARY_RELAXATION / p.reset_rate;
    let t = t_snapshot.unwrap_or(min_t);
    if !(t >= min_t && t.is_finite()) {
        return Err(Error::arg(format!("snapshot time {t} shorter than the relaxation time {min_t}")));
    }
    let empty = Histogram::new(bins.0, bins.1, bins.2)?;
    let parts = chunked(n_samples, |range| {
        let mut hist = empty.clone();
        let mut atoms = 0u64;
        for i in range {
            let draw = sample_position_flagged(p, t, &mut path_rng(seed, i));
            if draw.at_origin {
                atoms += 1;
            } else {
                hist.add(draw.position);
            }
        }
        (hist, atoms)
    });
    let mut histogram = empty;
    let mut atoms = 0;
    for (h, a) in &parts {
        histogram.merge(h);
        atoms += a;
    }
    Ok(StationaryEstimate { histogram, atom: EstimateWithError::proportion(atoms, n_samples), n: n_samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub mean: Complex<f64>,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n: u64,
}

impl ComplexEstimate {
    pub fn within(&self, target: Complex<f64>, k: f64) -> bool {
        (self.mean.re - target.re).abs() <= k * self.stderr_re && (self.mean.im - target.im).abs() <= k * self.stderr_im
    }
}

/// Empirical `E[e^{iωX(t)}]` for walkers started at the origin.
pub fn estimate_char_function(
    p: &ModelParams,
    omega: f64,
    t: f64,
    n_samples: u64,
    seed: u64,
) -> Result<ComplexEstimate> {
    p.validate()?;
    check_paths(n_samples)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::arg(format!("time must be nonnegative, got {t}")));
    }
    let parts = chunked(n_samples, |range| {
        let (mut c, mut s) = (RunningStats::default(), RunningStats::default());
        for i in range {
            let x = sample_position(p, t, &mut path_rng(seed, i));
            let (sin, cos) = (omega * x).sin_cos();
            c.push(cos);
            s.push(sin);
        }
        (c, s)
    });
    let (mut c, mut s) = (RunningStats::default(), RunningStats::default());
    for (pc, ps) in &parts {
        c.merge(pc);
        s.merge(ps);
    }
    Ok(ComplexEstimate {
        mean: Complex::new(c.mean, s.mean),
        stderr_re: c.stderr(),
        stderr_im: s.stderr(),
        n: n_samples,
    })
}
