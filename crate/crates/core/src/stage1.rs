//! First-stage ancient economy: labor allocation between health and
//! physical production, output under environmental adversity, fertility
//! under a survival constraint, the health-productivity ratchet, and the
//! population threshold separating growth from decline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Stage1Params;

/// Which branch of the fertility rule produced the policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FertilityRegime {
    /// Income above `y_hat`: unconstrained interior optimum `gamma / p`.
    Interior,
    /// Income in `[c_hat, y_hat)`: survival constraint binds.
    SurvivalBinding,
    /// Income below `c_hat`: no surviving children.
    Extinction,
}

impl FertilityRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            FertilityRegime::Interior => "interior",
            FertilityRegime::SurvivalBinding => "survival-binding",
            FertilityRegime::Extinction => "extinction",
        }
    }
}

/// Optimal-policy bundle for one period of the first-stage economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage1Policy {
    pub x_star: f64,
    pub y_star: f64,
    pub n_star: f64,
    pub regime: FertilityRegime,
}

/// Per-capita output `(phi*lambda*x - a) * (1-x)^alpha * L^(alpha-1)`.
/// May be <= 0 when `x <= a / (phi*lambda)`.
pub fn output_per_capita(p: &Stage1Params, lambda: f64, a: f64, big_l: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!("allocation x = {x} outside [0, 1)")));
    }
    if big_l <= 0.0 {
        return Err(Error::domain(format!("population L = {big_l} must be > 0")));
    }
    if lambda <= 0.0 {
        return Err(Error::domain(format!("lambda = {lambda} must be > 0")));
    }
    Ok((p.phi * lambda * x - a) * (1.0 - x).powf(p.alpha) * big_l.powf(p.alpha - 1.0))
}

/// Output-maximizing labor allocation
/// `x* = (phi*lambda + alpha*a) / ((1+alpha) * phi*lambda)`,
/// the solution of the first-order condition
/// `phi*lambda*(1-x) = alpha*(phi*lambda*x - a)`.
pub fn optimal_labor_allocation(p: &Stage1Params, lambda: f64, a: f64) -> Result<f64> {
    let tech = p.phi * lambda;
    if lambda <= 0.0 {
        return Err(Error::domain(format!("lambda = {lambda} must be > 0")));
    }
    if !(a >= 0.0 && a < tech) {
        return Err(Error::domain(format!(
            "adversity a = {a} must satisfy 0 <= a < phi*lambda = {tech}"
        )));
    }
    let x = (tech + p.alpha * a) / ((1.0 + p.alpha) * tech);
    debug_assert!(x > a / tech && x < 1.0);
    Ok(x)
}

/// Output at the optimal allocation:
/// `(alpha/(phi*lambda))^alpha * ((phi*lambda - a)/(1+alpha))^(1+alpha) * L^(alpha-1)`.
pub fn optimal_output(p: &Stage1Params, lambda: f64, a: f64, big_l: f64) -> Result<f64> {
    // Reuse the allocation check so the domain error message is uniform.
    optimal_labor_allocation(p, lambda, a)?;
    if big_l <= 0.0 {
        return Err(Error::domain(format!("population L = {big_l} must be > 0")));
    }
    let tech = p.phi * lambda;
    let y = (p.alpha / tech).powf(p.alpha)
        * ((tech - a) / (1.0 + p.alpha)).powf(1.0 + p.alpha)
        * big_l.powf(p.alpha - 1.0);
    Ok(y)
}

/// Children per adult as a function of income, plus the branch taken.
pub fn fertility(p: &Stage1Params, y: f64) -> Result<(f64, FertilityRegime)> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::domain(format!("income y = {y} must be > 0")));
    }
    if y >= p.y_hat() {
        Ok((p.gamma / p.p, FertilityRegime::Interior))
    } else if y >= p.c_hat {
        Ok(((1.0 - p.c_hat / y) / p.p, FertilityRegime::SurvivalBinding))
    } else {
        Ok((0.0, FertilityRegime::Extinction))
    }
}

/// Population level `g` at which fertility equals one. Above `g` the
/// population shrinks, below it grows.
pub fn population_threshold_g(p: &Stage1Params, lambda: f64, a: f64) -> Result<f64> {
    // Fertility is bounded above by gamma/p, so for gamma < p it never
    // reaches 1 at any population level.
    if p.gamma < p.p {
        return Err(Error::NoThreshold);
    }
    optimal_labor_allocation(p, lambda, a)?;
    let tech = p.phi * lambda;
    let unit_output =
        (p.alpha / tech).powf(p.alpha) * ((tech - a) / (1.0 + p.alpha)).powf(1.0 + p.alpha);
    let g = (p.c_hat / ((1.0 - p.p) * unit_output)).powf(1.0 / (p.alpha - 1.0));
    Ok(g)
}

/// Ratchet gain `M(d) = mu + kappa * ln(1 + max(d, 0))`; strictly positive,
/// increasing, and concave in `d >= 0`.
pub fn ratchet_gain(p: &Stage1Params, d: f64) -> f64 {
    p.mu + p.kappa * d.max(0.0).ln_1p()
}

/// Health-productivity law of motion: unchanged unless adversity worsened
/// (`a_t > a_prev`), in which case `lambda` rises by `M(x_t - x_prev)`.
pub fn update_health_productivity(
    p: &Stage1Params,
    lambda_t: f64,
    a_t: f64,
    a_prev: f64,
    x_t: f64,
    x_prev: f64,
) -> f64 {
    debug_assert!(lambda_t > 0.0);
    if a_t <= a_prev {
        lambda_t
    } else {
        lambda_t + ratchet_gain(p, x_t - x_prev)
    }
}

/// Population law of motion `L_{t+1} = n* L_t`.
pub fn step_population(n_star: f64, big_l: f64) -> f64 {
    debug_assert!(big_l > 0.0 && n_star >= 0.0);
    n_star * big_l
}

/// Full one-period policy: allocation, output, fertility, regime.
pub fn solve(p: &Stage1Params, lambda: f64, a: f64, big_l: f64) -> Result<Stage1Policy> {
    let x_star = optimal_labor_allocation(p, lambda, a)?;
    let y_star = optimal_output(p, lambda, a, big_l)?;
    let (n_star, regime) = fertility(p, y_star)?;
    Ok(Stage1Policy {
        x_star,
        y_star,
        n_star,
        regime,
    })
}
