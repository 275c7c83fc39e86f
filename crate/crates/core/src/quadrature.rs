//! Composite Gauss–Legendre quadrature.
//!
//! Used as an independent oracle for transforms and normalizations; nothing
//! in the analytic or inversion paths depends on it.

use std::sync::OnceLock;

const ORDER: usize = 20;

fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER).try_into().expect("rule size"))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_a^b f` with `panels` equal Gauss–Legendre panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for &(x, w) in rule() {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// `∫_a^∞ f` for integrands decaying on the length scale `scale`; panels of
/// width `scale` are added until the tail is negligible.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64) -> f64 {
    let mut total = 0.0;
    let mut quiet = 0;
    let mut lo = a;
    for _ in 0..100_000 {
        let part = integrate(&mut f, lo, lo + scale, 1);
        total += part;
        lo += scale;
        if part.abs() <= 1e-17 * total.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    total
}
