//! Second-stage economy: health enters a Cobb-Douglas composite input and
//! utility directly. Closed-form policies, mortality-adjusted population
//! dynamics, the steady state, and the growth-maximizing population level.

use crate::error::{Error, Result};
use crate::numeric::golden_max;
use crate::params::Stage2Params;

/// Optimal policy at a given population level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage2Policy {
    pub x_star: f64,
    pub n_star: f64,
    pub c_star: f64,
    pub y: f64,
}

/// Steady-state description for a given mortality rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage2Steady {
    /// Population where fertility equals mortality.
    pub l_tilde: f64,
    /// Population maximizing the absolute increment `(n*(L) - delta) * L`.
    pub l_tilde_prime: f64,
    /// Linearization factor `1 - delta*(1 - alpha)` of the population map at
    /// `l_tilde`; stability holds when it lies in (0, 1).
    pub factor: f64,
    pub stable: bool,
}

/// Per-capita output `[(phi*lambda*x)^beta * (1-x)^(1-beta)]^alpha * L^(alpha-1)`.
pub fn output_per_capita2(p: &Stage2Params, x: f64, big_l: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("allocation x = {x} outside (0, 1)")));
    }
    if big_l <= 0.0 {
        return Err(Error::domain(format!("population L = {big_l} must be > 0")));
    }
    let composite =
        (p.phi * p.lambda_fixed * x).powf(p.beta) * (1.0 - x).powf(1.0 - p.beta);
    Ok(composite.powf(p.alpha) * big_l.powf(p.alpha - 1.0))
}

/// Health allocation `x* = (alpha*beta + 1 - gamma) / (alpha + 1 - gamma)`,
/// independent of population and of phi.
pub fn optimal_allocation2(p: &Stage2Params) -> f64 {
    (p.alpha * p.beta + 1.0 - p.gamma) / (p.alpha + 1.0 - p.gamma)
}

/// Closed-form policy: `n* = gamma*y/p`, `c* = (1-gamma)*y`; the budget
/// `c + p*n = y` binds exactly.
pub fn optimal_policy2(p: &Stage2Params, big_l: f64) -> Result<Stage2Policy> {
    let x_star = optimal_allocation2(p);
    let y = output_per_capita2(p, x_star, big_l)?;
    let n_star = p.gamma * y / p.p;
    let c_star = p.p * n_star * (1.0 - p.gamma) / p.gamma;
    Ok(Stage2Policy {
        x_star,
        n_star,
        c_star,
        y,
    })
}

/// Child mortality `clamp(delta0 + delta1*a, delta_min, delta_max)`;
/// non-decreasing in adversity.
pub fn mortality(p: &Stage2Params, a: f64) -> f64 {
    (p.delta0 + p.delta1 * a).clamp(p.delta_min, p.delta_max)
}

/// Population law of motion `L_{t+1} = (1 + n*(L_t) - delta) * L_t`.
pub fn step_population2(p: &Stage2Params, big_l: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 1)")));
    }
    let pol = optimal_policy2(p, big_l)?;
    let next = (1.0 + pol.n_star - delta) * big_l;
    // n* >= 0 and delta < 1 make the factor positive.
    debug_assert!(next > 0.0);
    Ok(next)
}

/// Steady-state population from the closed form (fertility = mortality)
/// plus the numerically located increment-maximizing level.
pub fn steady_state(p: &Stage2Params, delta: f64) -> Result<Stage2Steady> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 1)")));
    }
    let x_star = optimal_allocation2(p);
    let composite = ((p.lambda_fixed * p.phi * x_star).powf(p.beta)
        * (1.0 - x_star).powf(1.0 - p.beta))
    .powf(p.alpha);
    let l_tilde = (delta * p.p / (p.gamma * composite)).powf(1.0 / (p.alpha - 1.0));
    // (n*(L) - delta) * L is single-peaked with its peak strictly below
    // l_tilde, so [eps, l_tilde] brackets the maximizer.
    let increment = |l: f64| {
        let n = p.gamma * composite * l.powf(p.alpha - 1.0) / p.p;
        (n - delta) * l
    };
    let (l_tilde_prime, _) = golden_max(increment, l_tilde * 1e-9, l_tilde, l_tilde * 1e-11);
    let factor = 1.0 - delta * (1.0 - p.alpha);
    Ok(Stage2Steady {
        l_tilde,
        l_tilde_prime,
        factor,
        stable: factor > 0.0 && factor < 1.0,
    })
}
