//! Presets for the MFPT-versus-reset-rate figures.
//!
//! Reset rates are in units of `Γ/ℓ` for the drift figure and of `λ` for the
//! jump figures; `ℓ = 1` throughout, so times come out in `ℓ/Γ` or `1/λ`.
//! The direction-probability grids and rate ranges are our own choices.

use std::fmt;
use std::str::FromStr;

use resetwalk::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Drift only.
    Fig2,
    /// Exponential jumps with `γℓ = 4`: an optimum for every `ρ < 1`.
    Fig4,
    /// Exponential jumps with `γℓ = 1/2`: an optimum only above `ρ ≈ 0.824`.
    Fig6,
}

pub struct Preset {
    pub model: ModelParams,
    pub level: f64,
    pub rhos: Vec<f64>,
    pub reset_rates: Vec<f64>,
}

/// `n` points spaced evenly in `ln x` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo * (step * k as f64).exp() }).collect()
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fig2, Figure::Fig4, Figure::Fig6];

    pub fn preset(self) -> Preset {
        match self {
            Figure::Fig2 => Preset {
                model: ModelParams::pure_drift(1.0, 0.5, 1.0),
                level: 1.0,
                rhos: vec![0.25, 0.5, 0.75, 1.0],
                reset_rates: log_grid(0.05, 5.0, 21),
            },
            Figure::Fig4 => Preset {
                model: ModelParams::exp_jumps(1.0, 0.5, 1.0, 4.0),
                level: 1.0,
                rhos: vec![0.25, 0.5, 0.75, 0.9],
                reset_rates: log_grid(0.05, 5.0, 21),
            },
            Figure::Fig6 => Preset {
                model: ModelParams::exp_jumps(1.0, 0.5, 1.0, 0.5),
                level: 1.0,
                rhos: vec![0.25, 0.5, 0.75, 0.9],
                reset_rates: log_grid(0.05, 20.0, 25),
            },
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig2 => "fig2",
            Figure::Fig4 => "fig4",
            Figure::Fig6 => "fig6",
        })
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected fig2, fig4 or fig6)"))
    }
}
