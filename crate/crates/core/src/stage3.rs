//! Third-stage experimental model: health multiplies consumption utility.
//! The allocation first-order condition is an implicit equation in x,
//! solved by bracket scanning plus bisection; among multiple roots the
//! utility-maximizing one is selected.

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_max};
use crate::params::Stage3Params;

/// Number of scan intervals on (SCAN_EPS, 1 - SCAN_EPS).
pub const SCAN_INTERVALS: usize = 10_000;
/// Exclusion margin at the domain boundaries.
pub const SCAN_EPS: f64 = 1e-6;
/// Bisection bracket-width tolerance for root refinement.
pub const ROOT_XTOL: f64 = 1e-13;

/// One FOC root with the implied fertility, consumption, and utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCandidate {
    pub x: f64,
    pub n: f64,
    pub c: f64,
    pub utility: f64,
}

/// Solver output: the utility-maximizing root plus all candidates found.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage3Solution {
    pub x_star: f64,
    pub n_star: f64,
    pub utility_value: f64,
    pub root_candidates: Vec<RootCandidate>,
    /// Whether the implied fertility satisfies n >= 1. Reported as a flag,
    /// not enforced.
    pub n_at_least_one: bool,
}

/// Compact production `y = A * x^(1-alpha) * (1-x)^alpha`.
pub fn production3(p: &Stage3Params, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("allocation x = {x} outside (0, 1)")));
    }
    Ok(p.a_tfp * x.powf(1.0 - p.alpha) * (1.0 - x).powf(p.alpha))
}

/// Rearranged first-order condition
/// `G(x) = ln[A ((1-x)/x)^alpha x^2 / (x + gamma/(1-gamma))] - alpha/(1-x) + 1`.
/// Roots of G are stationary points of utility along the fertility rule.
pub fn foc_residual3(p: &Stage3Params, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("allocation x = {x} outside (0, 1)")));
    }
    let k = p.gamma / (1.0 - p.gamma);
    let inside = p.a_tfp * ((1.0 - x) / x).powf(p.alpha) * x * x / (x + k);
    Ok(inside.ln() - p.alpha / (1.0 - x) + 1.0)
}

/// Fertility implied by the consumption/fertility FOCs:
/// `n = 1 / (p * (((1-gamma)/gamma) * x + 1))`; strictly decreasing in x.
pub fn fertility3(p: &Stage3Params, x: f64) -> f64 {
    1.0 / (p.p * ((1.0 - p.gamma) / p.gamma * x + 1.0))
}

/// Utility at allocation x with (c, n) implied by the FOCs under the
/// binding budget: `u = (1-gamma) * x * ln(c) + gamma * ln(n)`.
pub fn utility3(p: &Stage3Params, x: f64) -> Result<f64> {
    let n = fertility3(p, x);
    let y = production3(p, x)?;
    let c = y * (1.0 - p.p * n);
    Ok((1.0 - p.gamma) * x * c.ln() + p.gamma * n.ln())
}

/// Same first-order condition parameterized by fertility instead of
/// allocation (substituting x(n) from the fertility rule); vanishes at the
/// solution together with [`foc_residual3`].
pub fn foc_residual3_n(p: &Stage3Params, n: f64) -> Result<f64> {
    let q = p.p * n;
    if !(q > p.gamma && q < 1.0) {
        return Err(Error::domain(format!(
            "p*n = {q} outside (gamma, 1) = ({}, 1)",
            p.gamma
        )));
    }
    let g = p.gamma;
    let a = p.alpha;
    let inside = p.a_tfp * (q - g).powf(a) * g.powf(1.0 - a) * (1.0 - q).powf(2.0 - a)
        / ((1.0 - g) * q);
    Ok(inside.ln() - a * (1.0 - g) * q / (q - g) + 1.0)
}

/// Scans G for sign changes on (SCAN_EPS, 1 - SCAN_EPS), refines each
/// bracket by bisection, and returns the utility-maximizing root. Errors
/// with `NoRoot` (reporting max G and its location) when G never changes
/// sign.
pub fn solve_health_investment3(p: &Stage3Params) -> Result<Stage3Solution> {
    let roots = find_roots(p)?;
    if roots.is_empty() {
        let (at, max_residual) = max_residual(p);
        return Err(Error::NoRoot { max_residual, at });
    }
    let mut candidates = Vec::with_capacity(roots.len());
    for x in roots {
        let n = fertility3(p, x);
        let y = production3(p, x)?;
        let c = y * (1.0 - p.p * n);
        let utility = (1.0 - p.gamma) * x * c.ln() + p.gamma * n.ln();
        candidates.push(RootCandidate { x, n, c, utility });
    }
    let best = candidates
        .iter()
        .copied()
        .max_by(|a, b| a.utility.total_cmp(&b.utility))
        .expect("non-empty");
    Ok(Stage3Solution {
        x_star: best.x,
        n_star: best.n,
        utility_value: best.utility,
        root_candidates: candidates,
        n_at_least_one: best.n >= 1.0,
    })
}

/// All FOC roots in scan order (increasing x).
pub fn find_roots(p: &Stage3Params) -> Result<Vec<f64>> {
    let lo = SCAN_EPS;
    let hi = 1.0 - SCAN_EPS;
    let h = (hi - lo) / SCAN_INTERVALS as f64;
    let g = |x: f64| foc_residual3(p, x).expect("scan stays inside (0, 1)");
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut g_prev = g(lo);
    for i in 1..=SCAN_INTERVALS {
        let x = lo + i as f64 * h;
        let gx = g(x);
        if g_prev == 0.0 {
            roots.push(x_prev);
        } else if g_prev.signum() != gx.signum() && gx != 0.0 {
            let root = bisect(g, x_prev, x, ROOT_XTOL, 200).expect("bracketed sign change");
            roots.push(root);
        }
        x_prev = x;
        g_prev = gx;
    }
    if g_prev == 0.0 {
        roots.push(x_prev);
    }
    Ok(roots)
}

/// Location and value of the maximum of G, for NoRoot reporting.
fn max_residual(p: &Stage3Params) -> (f64, f64) {
    let lo = SCAN_EPS;
    let hi = 1.0 - SCAN_EPS;
    let h = (hi - lo) / SCAN_INTERVALS as f64;
    let g = |x: f64| foc_residual3(p, x).expect("scan stays inside (0, 1)");
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=SCAN_INTERVALS {
        let v = g(lo + i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + best_i.saturating_sub(1) as f64 * h;
    let b = lo + (best_i + 1).min(SCAN_INTERVALS) as f64 * h;
    let (at, val) = golden_max(g, a, b, 1e-12);
    (at, val)
}

/// Which parameter a comparative-statics sweep perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage3SweepParam {
    Gamma,
    Alpha,
}

impl std::str::FromStr for Stage3SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Stage3SweepParam::Gamma),
            "alpha" => Ok(Stage3SweepParam::Alpha),
            other => Err(Error::config(format!(
                "stage3 comparative statics supports gamma|alpha, got `{other}`"
            ))),
        }
    }
}

fn perturbed(p: &Stage3Params, which: Stage3SweepParam, dv: f64) -> Result<Stage3Params> {
    let mut q = *p;
    match which {
        Stage3SweepParam::Gamma => q.gamma += dv,
        Stage3SweepParam::Alpha => q.alpha += dv,
    }
    q.validate()
}

/// Central finite difference of x* with respect to `gamma` or `alpha`.
/// Errors with `Perturbation` if the FOC root count changes across the
/// step, in which case the derivative is undefined.
pub fn comparative_statics3(p: &Stage3Params, which: Stage3SweepParam, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("step h = {h} must be > 0")));
    }
    let lo = solve_health_investment3(&perturbed(p, which, -h)?)?;
    let hi = solve_health_investment3(&perturbed(p, which, h)?)?;
    if lo.root_candidates.len() != hi.root_candidates.len() {
        return Err(Error::Perturbation(format!(
            "root count changed from {} to {} across the step",
            lo.root_candidates.len(),
            hi.root_candidates.len()
        )));
    }
    Ok((hi.x_star - lo.x_star) / (2.0 * h))
}
