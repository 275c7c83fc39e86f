//! Flat TOML experiment files.
//!
//! ```toml
//! schema = 1
//! kind = "mfpt-curve"
//! reset_rates = [0.1, 0.5, 1.0, 2.0]
//! rhos = [0.5, 0.9]
//! speed_plus = 1.0
//! jump_rate_plus = 0.5
//! jump_law_plus = { kind = "exp", gamma = 2.0 }
//! n_paths = 100000
//! seed = 7
//! output = "out"
//! ```
//!
//! Omitted model keys default to unit speeds, no jumps, `reset_rate = 1`,
//! `direction_prob = 1/2` and `level = 1`. Every semantic error is reported
//! against the line of the offending key.

use std::ops::Range;
use std::path::PathBuf;

use resetwalk::{JumpLaw, ModelParams};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;
use crate::figures::Figure;

pub const SCHEMA: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    MfptCurve,
    SurvivalCurve,
    Stationary,
    Optimize,
    Figure(Figure),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Model for one grid point; `reset_rate` and `direction_prob` are
    /// overwritten from the grids.
    pub model: ModelParams,
    pub level: f64,
    pub reset_rates: Vec<f64>,
    pub rhos: Vec<f64>,
    pub times: Vec<f64>,
    pub omegas: Vec<f64>,
    pub n_paths: u64,
    pub seed: u64,
    pub output: PathBuf,
    pub bins: (f64, f64, usize),
    pub snapshot_time: Option<f64>,
}

impl ExperimentConfig {
    /// Model at one `(Λ, ρ)` grid point.
    pub fn model_at(&self, reset_rate: f64, rho: f64) -> ModelParams {
        ModelParams { reset_rate, direction_prob: rho, ..self.model.clone() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    schema: Option<Spanned<i64>>,
    kind: Option<Spanned<String>>,
    figure: Option<Spanned<String>>,

    reset_rate: Option<Spanned<f64>>,
    direction_prob: Option<Spanned<f64>>,
    speed_plus: Option<Spanned<f64>>,
    speed_minus: Option<Spanned<f64>>,
    jump_rate_plus: Option<Spanned<f64>>,
    jump_rate_minus: Option<Spanned<f64>>,
    jump_law_plus: Option<Spanned<LawEntry>>,
    jump_law_minus: Option<Spanned<LawEntry>>,
    jump_param_plus: Option<Spanned<f64>>,
    jump_param_minus: Option<Spanned<f64>>,
    level: Option<Spanned<f64>>,

    reset_rates: Option<Spanned<Vec<f64>>>,
    rhos: Option<Spanned<Vec<f64>>>,
    times: Option<Spanned<Vec<f64>>>,
    omegas: Option<Spanned<Vec<f64>>>,

    n_paths: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    output: Option<Spanned<String>>,
    bins: Option<Spanned<i64>>,
    bin_lo: Option<Spanned<f64>>,
    bin_hi: Option<Spanned<f64>>,
    snapshot_time: Option<Spanned<f64>>,
}

/// A jump law is either a bare name with its parameter in the matching
/// `jump_param` key, or an inline table such as `{ kind = "exp", gamma = 2.0 }`
/// or `{ kind = "deterministic", size = 0.5 }`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LawEntry {
    Name(String),
    Table(LawTable),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawTable {
    kind: String,
    gamma: Option<f64>,
    size: Option<f64>,
}

struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, span: &Range<usize>, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}:{}: {msg}", self.name, self.line(span)))
    }

    fn at<T>(&self, v: &Spanned<T>, msg: impl std::fmt::Display) -> CliError {
        self.err(&v.span(), msg)
    }
}

fn value<T: Clone>(v: &Option<Spanned<T>>, default: T) -> T {
    v.as_ref().map(|s| s.get_ref().clone()).unwrap_or(default)
}

fn jump_law(
    src: &Source,
    entry: &Option<Spanned<LawEntry>>,
    param: &Option<Spanned<f64>>,
) -> Result<JumpLaw, CliError> {
    let Some(entry) = entry else {
        if let Some(p) = param {
            return Err(src.at(p, "jump parameter given without a jump law"));
        }
        return Ok(JumpLaw::Zero);
    };
    let (name, inline) = match entry.get_ref() {
        LawEntry::Name(n) => (n.as_str(), None),
        LawEntry::Table(t) => {
            if let Some(p) = param {
                return Err(src.at(p, "jump parameter given twice (inline table and jump_param key)"));
            }
            (t.kind.as_str(), Some(t))
        }
    };
    let need = |what: &str| -> Result<f64, CliError> {
        let found = match inline {
            Some(t) if what == "rate" => t.gamma,
            Some(t) => t.size,
            None => param.as_ref().map(|p| *p.get_ref()),
        };
        let hint = if inline.is_some() {
            if what == "rate" {
                "a `gamma` field"
            } else {
                "a `size` field"
            }
        } else {
            "the matching jump_param key"
        };
        found.ok_or_else(|| src.at(entry, format!("jump law `{name}` needs a {what} in {hint}")))
    };
    let law = match name {
        "zero" => Ok(JumpLaw::Zero),
        "exp" | "exponential" => JumpLaw::exponential(need("rate")?),
        "deterministic" => JumpLaw::deterministic(need("size")?),
        other => {
            return Err(
                src.at(entry, format!("unknown jump law `{other}` (expected zero, exponential or deterministic)"))
            )
        }
    };
    let span = param.as_ref().map(|p| p.span()).unwrap_or(entry.span());
    law.map_err(|e| src.err(&span, e))
}

fn grid(src: &Source, v: &Option<Spanned<Vec<f64>>>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
    let Some(v) = v else { return Ok(None) };
    let g = v.get_ref();
    if g.is_empty() {
        return Err(src.at(v, format!("{key} must not be empty")));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(src.at(v, format!("{key} must contain finite numbers")));
    }
    if g.windows(2).any(|w| w[0] >= w[1]) {
        return Err(src.at(v, format!("{key} must be strictly increasing")));
    }
    Ok(Some(g.clone()))
}

fn parse_kind(src: &Source, raw: &Raw) -> Result<Kind, CliError> {
    let Some(kind) = &raw.kind else {
        return Err(src.err(&(0..0), "missing `kind` (mfpt-curve, survival-curve, stationary, optimize or figure)"));
    };
    let k = match kind.get_ref().as_str() {
        "mfpt-curve" => Kind::MfptCurve,
        "survival-curve" => Kind::SurvivalCurve,
        "stationary" => Kind::Stationary,
        "optimize" => Kind::Optimize,
        "figure" => {
            let Some(fig) = &raw.figure else {
                return Err(src.at(kind, "kind = \"figure\" needs a `figure` key (fig2, fig4 or fig6)"));
            };
            let f = fig.get_ref().parse::<Figure>().map_err(|e| src.at(fig, e))?;
            Kind::Figure(f)
        }
        other => return Err(src.at(kind, format!("unknown kind `{other}`"))),
    };
    if let (Some(fig), false) = (&raw.figure, matches!(k, Kind::Figure(_))) {
        return Err(src.at(fig, "`figure` is only valid with kind = \"figure\""));
    }
    Ok(k)
}

/// Parses and validates an experiment file. `name` labels error messages.
pub fn parse(name: &str, text: &str) -> Result<ExperimentConfig, CliError> {
    let src = Source { name, text };
    let raw: Raw = toml::from_str(text).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        src.err(&span, e.message().trim())
    })?;

    match &raw.schema {
        None => return Err(src.err(&(0..0), format!("missing `schema = {SCHEMA}`"))),
        Some(s) if *s.get_ref() != SCHEMA => {
            return Err(src.at(s, format!("unsupported schema {} (this build reads schema {SCHEMA})", s.get_ref())))
        }
        Some(_) => {}
    }
    let kind = parse_kind(&src, &raw)?;

    let model_keys = [
        raw.reset_rate.as_ref().map(|s| s.span()),
        raw.direction_prob.as_ref().map(|s| s.span()),
        raw.speed_plus.as_ref().map(|s| s.span()),
        raw.speed_minus.as_ref().map(|s| s.span()),
        raw.jump_rate_plus.as_ref().map(|s| s.span()),
        raw.jump_rate_minus.as_ref().map(|s| s.span()),
        raw.jump_law_plus.as_ref().map(|s| s.span()),
        raw.jump_law_minus.as_ref().map(|s| s.span()),
        raw.jump_param_plus.as_ref().map(|s| s.span()),
        raw.jump_param_minus.as_ref().map(|s| s.span()),
        raw.level.as_ref().map(|s| s.span()),
    ];
    let first_model_key = model_keys.iter().flatten().min_by_key(|s| s.start).cloned();

    let n_paths = match &raw.n_paths {
        Some(n) if *n.get_ref() < 1 => return Err(src.at(n, "n_paths must be at least 1")),
        Some(n) => *n.get_ref() as u64,
        None => 100_000,
    };
    let seed = match &raw.seed {
        Some(s) if *s.get_ref() < 0 => return Err(src.at(s, "seed must be nonnegative")),
        Some(s) => *s.get_ref() as u64,
        None => 1,
    };
    let output = PathBuf::from(value(&raw.output, "out".to_string()));
    let reset_rates = grid(&src, &raw.reset_rates, "reset_rates")?;
    let rhos = grid(&src, &raw.rhos, "rhos")?;
    let times = grid(&src, &raw.times, "times")?;
    let omegas = grid(&src, &raw.omegas, "omegas")?;

    if let Kind::Figure(fig) = kind {
        if let Some(span) = first_model_key {
            return Err(src.err(
                &span,
                format!("model keys are fixed by the {fig} preset; only grids, n_paths, seed and output may be set"),
            ));
        }
        let preset = fig.preset();
        return Ok(ExperimentConfig {
            kind,
            model: preset.model,
            level: preset.level,
            reset_rates: reset_rates.unwrap_or(preset.reset_rates),
            rhos: rhos.unwrap_or(preset.rhos),
            times: Vec::new(),
            omegas: Vec::new(),
            n_paths,
            seed,
            output,
            bins: (0.0, 0.0, 0),
            snapshot_time: None,
        });
    }

    let law_plus = jump_law(&src, &raw.jump_law_plus, &raw.jump_param_plus)?;
    let law_minus = jump_law(&src, &raw.jump_law_minus, &raw.jump_param_minus)?;
    let reset_rate = value(&raw.reset_rate, 1.0);
    let rho = value(&raw.direction_prob, 0.5);
    let model = ModelParams::new(reset_rate, rho)
        .with_plus(value(&raw.speed_plus, 1.0), value(&raw.jump_rate_plus, 0.0), law_plus)
        .with_minus(value(&raw.speed_minus, 1.0), value(&raw.jump_rate_minus, 0.0), law_minus);
    let level = value(&raw.level, 1.0);
    let anchor = first_model_key.unwrap_or(0..0);
    if !(level > 0.0 && level.is_finite()) {
        let span = raw.level.as_ref().map(|s| s.span()).unwrap_or(anchor.clone());
        return Err(src.err(&span, format!("level must be positive, got {level}")));
    }

    let reset_rates = reset_rates.unwrap_or_else(|| vec![reset_rate]);
    let rhos = rhos.unwrap_or_else(|| vec![rho]);
    let grid_span = |v: &Option<Spanned<Vec<f64>>>| v.as_ref().map(|s| s.span()).unwrap_or(anchor.clone());
    for &lam in &reset_rates {
        for &r in &rhos {
            let p = ModelParams { reset_rate: lam, direction_prob: r, ..model.clone() };
            if let Err(e) = p.validate() {
                let span = if raw.rhos.is_some() { grid_span(&raw.rhos) } else { grid_span(&raw.reset_rates) };
                return Err(src.err(&span, format!("invalid model at reset_rate = {lam}, direction_prob = {r}: {e}")));
            }
        }
    }

    let needs_crossing = matches!(kind, Kind::MfptCurve | Kind::SurvivalCurve | Kind::Optimize);
    if needs_crossing {
        if let Some(&r) = rhos.iter().find(|&&r| r <= 0.0) {
            return Err(src.err(
                &grid_span(&raw.rhos),
                format!("direction_prob = {r} never crosses the level; use values in (0, 1]"),
            ));
        }
        if model.speed_plus == 0.0 && (model.jump_rate_plus == 0.0 || model.jump_law_plus.mean() == 0.0) {
            return Err(src.err(&anchor, "the rightward direction never moves, so the level is never crossed"));
        }
    }

    let times = match (kind, times) {
        (Kind::SurvivalCurve, None) => {
            return Err(src.err(&(0..0), "survival-curve needs a `times` grid"));
        }
        (Kind::SurvivalCurve, Some(t)) if t[0] <= 0.0 => {
            return Err(src.err(&grid_span(&raw.times), "times must be positive"));
        }
        (_, t) => t.unwrap_or_default(),
    };

    let mut bins = (value(&raw.bin_lo, -10.0), value(&raw.bin_hi, 10.0), 200usize);
    if let Some(b) = &raw.bins {
        if *b.get_ref() < 1 {
            return Err(src.at(b, "bins must be at least 1"));
        }
        bins.2 = *b.get_ref() as usize;
    }
    if !(bins.0 < bins.1) {
        let span = raw.bin_hi.as_ref().or(raw.bin_lo.as_ref()).map(|s| s.span()).unwrap_or(0..0);
        return Err(src.err(&span, "bin_lo must be below bin_hi"));
    }
    let snapshot_time = raw.snapshot_time.as_ref().map(|s| *s.get_ref());
    if kind == Kind::Stationary {
        if let Some(&lam) = reset_rates.iter().find(|&&l| l <= 0.0) {
            return Err(src.err(&grid_span(&raw.reset_rates), format!("reset_rate = {lam} has no stationary state")));
        }
        if let (Some(s), Some(t)) = (&raw.snapshot_time, snapshot_time) {
            let slowest = reset_rates[0];
            let min_t = resetwalk::simulate::STATIONARY_RELAXATION / slowest;
            if !(t >= min_t) {
                return Err(src.at(
                    s,
                    format!("snapshot_time must be at least {min_t} (relaxation time at reset_rate = {slowest})"),
                ));
            }
        }
    }

    Ok(ExperimentConfig {
        kind,
        model,
        level,
        reset_rates,
        rhos,
        times,
        omegas: omegas.unwrap_or_default(),
        n_paths,
        seed,
        output,
        bins,
        snapshot_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(text: &str) -> String {
        match parse("exp.toml", text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_curve() {
        let c = parse("x", "schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\nreset_rates = [0.5, 1.0]\n").unwrap();
        assert_eq!(c.kind, Kind::MfptCurve);
        assert_eq!(c.reset_rates, vec![0.5, 1.0]);
        assert_eq!(c.rhos, vec![0.5]);
        assert_eq!(c.model.speed_plus, 1.0);
        assert_eq!(c.n_paths, 100_000);
    }

    #[test]
    fn jump_laws() {
        let c = parse(
            "x",
            "schema = 1\nkind = \"mfpt-curve\"\njump_rate_plus = 1\njump_law_plus = \"exponential\"\njump_param_plus = 4\n",
        )
        .unwrap();
        assert_eq!(c.model.jump_law_plus, JumpLaw::Exponential { rate: 4.0 });
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\njump_rate_plus = 1\njump_law_plus = \"exponential\"\n")
            .starts_with("exp.toml:4:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\njump_law_plus = \"levy\"\n")
            .starts_with("exp.toml:4:"));
    }

    #[test]
    fn inline_jump_laws() {
        let c = parse(
            "x",
            "schema = 1\nkind = \"mfpt-curve\"\njump_rate_plus = 1\njump_law_plus = { kind = \"exp\", gamma = 2.0 }\n\
             jump_rate_minus = 1\njump_law_minus = { kind = \"deterministic\", size = 0.5 }\n",
        )
        .unwrap();
        assert_eq!(c.model.jump_law_plus, JumpLaw::Exponential { rate: 2.0 });
        assert_eq!(c.model.jump_law_minus, JumpLaw::Deterministic { size: 0.5 });
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\njump_rate_plus = 1\njump_law_plus = { kind = \"exp\" }\n")
            .starts_with("exp.toml:4:"));
        assert!(message(
            "schema = 1\nkind = \"mfpt-curve\"\njump_rate_plus = 1\njump_law_plus = { kind = \"exp\", gamma = 2.0 }\njump_param_plus = 3\n"
        )
        .starts_with("exp.toml:5:"));
    }

    #[test]
    fn errors_name_the_line() {
        assert!(message("schema = 2\nkind = \"optimize\"\n").starts_with("exp.toml:1:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\nn_paths = 0\n").starts_with("exp.toml:4:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\n\nreset_rates = [2.0, 1.0]\n")
            .starts_with("exp.toml:5:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\nbogus = 3\n").starts_with("exp.toml:4:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = \"fast\"\n").starts_with("exp.toml:3:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 1\nrhos = [0.5, 1.5]\n")
            .starts_with("exp.toml:4:"));
        assert!(message("schema = 1\nkind = \"mfpt-curve\"\nspeed_plus = 0\n").starts_with("exp.toml:3:"));
        assert!(message("kind = \"optimize\"\n").contains("schema"));
    }

    #[test]
    fn figures_fix_the_model() {
        let c = parse("x", "schema = 1\nkind = \"figure\"\nfigure = \"fig4\"\nn_paths = 10\n").unwrap();
        assert_eq!(c.kind, Kind::Figure(Figure::Fig4));
        assert_eq!(c.model.jump_law_plus, JumpLaw::Exponential { rate: 4.0 });
        assert!(
            message("schema = 1\nkind = \"figure\"\nfigure = \"fig4\"\nspeed_plus = 1\n").starts_with("exp.toml:4:")
        );
        assert!(message("schema = 1\nkind = \"figure\"\nfigure = \"fig9\"\n").starts_with("exp.toml:3:"));
    }

    #[test]
    fn survival_needs_times() {
        assert!(message("schema = 1\nkind = \"survival-curve\"\nspeed_plus = 1\n").contains("times"));
        let c = parse("x", "schema = 1\nkind = \"survival-curve\"\nspeed_plus = 1\ntimes = [0.5, 1, 2]\n").unwrap();
        assert_eq!(c.times, vec![0.5, 1.0, 2.0]);
    }
}
