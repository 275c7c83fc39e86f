//! Runs experiments and writes one CSV per curve.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use resetwalk::analytic::{stationary_cf, ExpDriftStationary, ExpJumps, PureDrift};
use resetwalk::inversion::{survival_exp_jumps, survival_general, survival_pure_drift, FirstPassageSolver};
use resetwalk::optimize::{
    default_bracket, minimize_mfpt_numeric, optimal_rate_exp_jumps, optimal_rate_pure_drift, OptimumReport,
};
use resetwalk::simulate::{
    closed_form_mfpt, estimate_char_function, estimate_mfpt, estimate_stationary, estimate_survival, EstimateWithError,
    STATIONARY_RELAXATION,
};
use resetwalk::{Direction, JumpLaw, ModelParams};

use crate::config::{ExperimentConfig, Kind};
use crate::error::CliError;

/// Agreement band in standard errors used in run summaries.
pub const BAND: f64 = 4.0;

pub struct Row {
    pub x: f64,
    pub analytic: Option<f64>,
    pub mc: EstimateWithError,
}

pub struct Curve {
    pub name: String,
    pub x_label: &'static str,
    pub rows: Vec<Row>,
}

fn number(v: f64) -> String {
    format!("{v}")
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},analytic,mc_mean,mc_stderr,n,censored\n", self.x_label);
        for r in &self.rows {
            let analytic = r.analytic.map(number).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                number(r.x),
                analytic,
                number(r.mc.mean),
                number(r.mc.stderr),
                r.mc.n,
                r.mc.censored
            );
        }
        out
    }

    /// `(agreeing, compared, censored)` over rows with an analytic value;
    /// censored rows are left out of the comparison.
    pub fn agreement(&self, band: f64) -> (usize, usize, usize) {
        let censored = self.rows.iter().filter(|r| r.mc.censored > 0).count();
        let compared: Vec<_> = self.rows.iter().filter(|r| r.mc.censored == 0 && r.analytic.is_some()).collect();
        let hits = compared.iter().filter(|r| r.mc.within(r.analytic.unwrap_or(f64::NAN), band)).count();
        (hits, compared.len(), censored)
    }
}

fn point_seed(master: u64, curve: usize, point: usize) -> u64 {
    master.wrapping_add(((curve as u64) << 32) | point as u64)
}

/// Fifty times the larger of the MFPT and the mean time between resets. The
/// second term matters at slow resetting, where rare excursions away from the
/// level last about `1/Λ` and would otherwise hit the cap at 10^6 paths.
fn censoring_cap(exact: f64, reset_rate: f64) -> Option<f64> {
    if !exact.is_finite() {
        return None;
    }
    let between_resets = if reset_rate > 0.0 { 1.0 / reset_rate } else { 0.0 };
    Some(50.0 * exact.max(between_resets))
}

/// Exact MFPT from the origin: closed form when available, numerical
/// inversion otherwise.
pub fn analytic_mfpt(p: &ModelParams, level: f64) -> Result<f64, CliError> {
    match closed_form_mfpt(p, level) {
        Some(t) => Ok(t),
        None => Ok(FirstPassageSolver::default().mfpt_unconditional(p, level)?),
    }
}

pub fn mfpt_curve(cfg: &ExperimentConfig, rho: f64, curve: usize, name: String) -> Result<Curve, CliError> {
    let mut rows = Vec::with_capacity(cfg.reset_rates.len());
    for (i, &lam) in cfg.reset_rates.iter().enumerate() {
        let p = cfg.model_at(lam, rho);
        let exact = analytic_mfpt(&p, cfg.level)?;
        let cap = censoring_cap(exact, lam);
        let mc = estimate_mfpt(&p, cfg.level, cfg.n_paths, cap, point_seed(cfg.seed, curve, i))?;
        log::info!("{name}: reset_rate {lam} analytic {exact} mc {} ± {}", mc.mean, mc.stderr);
        rows.push(Row { x: lam, analytic: Some(exact), mc });
    }
    Ok(Curve { name, x_label: "reset_rate", rows })
}

fn survival_exact(p: &ModelParams, level: f64, t: f64) -> Result<f64, CliError> {
    let rho = p.direction_prob;
    let one = |dir: Direction| -> Result<f64, CliError> {
        let v = if let Ok(m) = PureDrift::from_params(p, level) {
            survival_pure_drift(&m, 0.0, dir, t)?
        } else if let Ok(m) = ExpJumps::from_params(p, level) {
            survival_exp_jumps(&m, 0.0, dir, t)?
        } else {
            survival_general(p, level, 0.0, dir, t)?
        };
        Ok(v)
    };
    let mut v = 0.0;
    if rho > 0.0 {
        v += rho * one(Direction::Plus)?;
    }
    if rho < 1.0 {
        v += (1.0 - rho) * one(Direction::Minus)?;
    }
    Ok(v)
}

fn survival_curve(cfg: &ExperimentConfig, p: &ModelParams, seed: u64, name: String) -> Result<Curve, CliError> {
    let mc = estimate_survival(p, cfg.level, &cfg.times, cfg.n_paths, seed)?;
    let rows = mc
        .into_iter()
        .map(|(t, mc)| Ok(Row { x: t, analytic: Some(survival_exact(p, cfg.level, t)?), mc }))
        .collect::<Result<_, CliError>>()?;
    Ok(Curve { name, x_label: "t", rows })
}

fn stationary_curves(cfg: &ExperimentConfig, p: &ModelParams, seed: u64, stem: &str) -> Result<Vec<Curve>, CliError> {
    let est = estimate_stationary(p, cfg.n_paths, cfg.snapshot_time, cfg.bins, seed)?;
    let exact = ExpDriftStationary::from_params(p).ok();
    let h = &est.histogram;
    let w = h.width();
    let n = est.n;
    let rows = (0..h.counts.len())
        .map(|i| {
            let (a, b) = h.edges(i);
            let share = EstimateWithError::proportion(h.counts[i], n);
            let mc = EstimateWithError { mean: share.mean / w, stderr: share.stderr / w, ..share };
            Row { x: 0.5 * (a + b), analytic: exact.map(|law| law.continuous_mass(a, b) / w), mc }
        })
        .collect();
    let mut curves = vec![
        Curve { name: stem.to_string(), x_label: "x", rows },
        Curve {
            name: format!("{stem}_atom"),
            x_label: "x",
            rows: vec![Row { x: 0.0, analytic: exact.map(|law| law.atom()), mc: est.atom }],
        },
    ];
    if !cfg.omegas.is_empty() {
        let t = cfg.snapshot_time.unwrap_or(STATIONARY_RELAXATION / p.reset_rate);
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for (k, &omega) in cfg.omegas.iter().enumerate() {
            let target = stationary_cf(p, omega)?;
            let mc = estimate_char_function(p, omega, t, cfg.n_paths, seed.wrapping_add(1 + k as u64))?;
            let part = |mean: f64, stderr: f64| EstimateWithError { mean, stderr, n: mc.n, censored: 0 };
            re.push(Row { x: omega, analytic: Some(target.re), mc: part(mc.mean.re, mc.stderr_re) });
            im.push(Row { x: omega, analytic: Some(target.im), mc: part(mc.mean.im, mc.stderr_im) });
        }
        curves.push(Curve { name: format!("{stem}_cf_re"), x_label: "omega", rows: re });
        curves.push(Curve { name: format!("{stem}_cf_im"), x_label: "omega", rows: im });
    }
    Ok(curves)
}

fn closed_form_optimum(p: &ModelParams, level: f64) -> Option<OptimumReport> {
    let rho = p.direction_prob;
    if PureDrift::from_params(p, level).is_ok() {
        return optimal_rate_pure_drift(p.speed_plus, level, rho).ok();
    }
    if ExpJumps::from_params(p, level).is_ok() {
        if let JumpLaw::Exponential { rate } = p.jump_law_plus {
            return optimal_rate_exp_jumps(p.jump_rate_plus, rate, level, rho).ok();
        }
    }
    None
}

fn optimize_table(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let mut out = String::from(
        "rho,closed_lambda_star,closed_mfpt_star,closed_regime,numeric_lambda_star,numeric_mfpt_star,numeric_regime,numeric_residual\n",
    );
    let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
    for &rho in &cfg.rhos {
        let p = cfg.model_at(cfg.model.reset_rate, rho);
        let bracket = match cfg.reset_rates.as_slice() {
            [lo, .., hi] => (*lo, *hi),
            _ => default_bracket(&p, cfg.level),
        };
        let closed = closed_form_optimum(&p, cfg.level);
        let numeric = minimize_mfpt_numeric(&p, cfg.level, bracket, 1e-8)?;
        println!(
            "rho {rho}: numeric {:?} at {:?}{}",
            numeric.regime,
            numeric.lambda_star,
            closed.as_ref().map(|c| format!(", closed form {:?} at {:?}", c.regime, c.lambda_star)).unwrap_or_default()
        );
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:?},{}",
            number(rho),
            opt(closed.as_ref().and_then(|c| c.lambda_star)),
            opt(closed.as_ref().map(|c| c.mfpt_star)),
            closed.as_ref().map(|c| format!("{:?}", c.regime)).unwrap_or_default(),
            opt(numeric.lambda_star),
            number(numeric.mfpt_star),
            numeric.regime,
            number(numeric.residual)
        );
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(format!("{name}.csv"));
    fs::write(&path, body).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn grid_minimum(curve: &Curve) -> &'static str {
    let vals: Vec<f64> = curve.rows.iter().filter_map(|r| r.analytic).collect();
    let Some(arg) = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])) else {
        return "none";
    };
    if arg == 0 {
        "at the lowest rate"
    } else if arg + 1 == vals.len() {
        "at the highest rate"
    } else {
        "interior"
    }
}

/// Executes `cfg`, writes its CSV files and prints a summary. MFPT rows
/// with censored runs are reported as a numerical failure after all files
/// are written.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output).map_err(|e| CliError::io(format!("cannot create {}", cfg.output.display()), e))?;
    let mut curves = Vec::new();
    let mut mfpt = false;
    match cfg.kind {
        Kind::MfptCurve | Kind::Figure(_) => {
            mfpt = true;
            let prefix = match cfg.kind {
                Kind::Figure(f) => f.to_string(),
                _ => "mfpt".to_string(),
            };
            for (c, &rho) in cfg.rhos.iter().enumerate() {
                curves.push(mfpt_curve(cfg, rho, c, format!("{prefix}_rho{rho}"))?);
            }
        }
        Kind::SurvivalCurve | Kind::Stationary => {
            let mut c = 0;
            for &rho in &cfg.rhos {
                for &lam in &cfg.reset_rates {
                    let p = cfg.model_at(lam, rho);
                    let seed = point_seed(cfg.seed, c, 0);
                    if cfg.kind == Kind::SurvivalCurve {
                        curves.push(survival_curve(cfg, &p, seed, format!("survival_rho{rho}_rate{lam}"))?);
                    } else {
                        curves.extend(stationary_curves(cfg, &p, seed, &format!("stationary_rho{rho}_rate{lam}"))?);
                    }
                    c += 1;
                }
            }
        }
        Kind::Optimize => {
            let table = optimize_table(cfg)?;
            write(&cfg.output, "optimize", &table)?;
            println!("wrote {}", cfg.output.join("optimize.csv").display());
            return Ok(());
        }
    }

    let mut censored_rows = 0;
    for curve in &curves {
        write(&cfg.output, &curve.name, &curve.to_csv())?;
        let (hits, compared, censored) = curve.agreement(BAND);
        censored_rows += censored;
        let mut line = format!("{}: {hits}/{compared} points within {BAND} stderr", curve.name);
        if censored > 0 {
            let _ = write!(line, ", {censored} censored row(s) excluded");
        }
        if mfpt {
            let _ = write!(line, ", analytic minimum {}", grid_minimum(curve));
        }
        println!("{line}");
    }
    if mfpt && censored_rows > 0 {
        return Err(CliError::Numerical(format!(
            "{censored_rows} MFPT row(s) contain censored paths; the censoring cap is too short for this model"
        )));
    }
    Ok(())
}
