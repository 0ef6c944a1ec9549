//! Validated parameter records for the three model stages.
//!
//! Each record is immutable after validation and is the single source of
//! truth for admissible parameter ranges. Open ranges are enforced strictly
//! because several closed forms divide by `(alpha - 1)` or `(1 - gamma)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(ok: bool, field: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Range(field))
    }
}

fn finite(v: f64, field: &'static str) -> Result<()> {
    check(v.is_finite(), field)
}

fn open_unit(v: f64, field: &'static str) -> Result<()> {
    finite(v, field)?;
    check(v > 0.0 && v < 1.0, field)
}

fn positive(v: f64, field: &'static str) -> Result<()> {
    finite(v, field)?;
    check(v > 0.0, field)
}

/// First-stage (ancient economy) parameters.
///
/// `mu` and `kappa` parameterize the productivity ratchet gain
/// `M(d) = mu + kappa * ln(1 + max(d, 0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage1Params {
    /// Health-production coefficient, > 0.
    pub phi: f64,
    /// Labor output elasticity, in (0, 1).
    pub alpha: f64,
    /// Child preference weight, in (0, 1).
    pub gamma: f64,
    /// Child-rearing output fraction, in (0, 1).
    pub p: f64,
    /// Survival consumption level, > 0.
    pub c_hat: f64,
    /// Ratchet intercept, > 0.
    pub mu: f64,
    /// Ratchet slope, >= 0.
    pub kappa: f64,
    #[serde(skip)]
    y_hat: f64,
}

impl Stage1Params {
    pub fn new(
        phi: f64,
        alpha: f64,
        gamma: f64,
        p: f64,
        c_hat: f64,
        mu: f64,
        kappa: f64,
    ) -> Result<Self> {
        Stage1Params {
            phi,
            alpha,
            gamma,
            p,
            c_hat,
            mu,
            kappa,
            y_hat: 0.0,
        }
        .validate()
    }

    /// Checks every range invariant and caches `y_hat = c_hat / (1 - gamma)`.
    /// Idempotent. Returns `Error::Range` naming the first offending field.
    pub fn validate(mut self) -> Result<Self> {
        positive(self.phi, "phi")?;
        open_unit(self.alpha, "alpha")?;
        open_unit(self.gamma, "gamma")?;
        open_unit(self.p, "p")?;
        positive(self.c_hat, "c_hat")?;
        positive(self.mu, "mu")?;
        finite(self.kappa, "kappa")?;
        check(self.kappa >= 0.0, "kappa")?;
        let y_hat = self.c_hat / (1.0 - self.gamma);
        check(y_hat.is_finite() && y_hat > self.c_hat, "c_hat")?;
        self.y_hat = y_hat;
        Ok(self)
    }

    /// Income level at which the survival constraint stops binding.
    pub fn y_hat(&self) -> f64 {
        debug_assert!(self.y_hat > 0.0, "Stage1Params used before validation");
        self.y_hat
    }

    /// The worked reference parameterization used throughout docs and the CLI.
    pub fn baseline() -> Self {
        Stage1Params::new(1.0, 0.5, 0.4, 0.2, 0.5, 0.05, 0.5).expect("baseline is valid")
    }
}

/// Second-stage parameters: health enters a Cobb-Douglas composite and
/// utility; child mortality is an affine, clamped function of adversity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage2Params {
    /// Health-production coefficient, > 0.
    pub phi: f64,
    /// Output elasticity of the composite input, in (0, 1).
    pub alpha: f64,
    /// Health share inside the composite, in (0, 1).
    pub beta: f64,
    /// Child preference weight, in (0, 1).
    pub gamma: f64,
    /// Child-rearing cost per child, in (0, 1).
    pub p: f64,
    /// Health productivity, normalized to 1 in this stage.
    #[serde(default = "one")]
    pub lambda_fixed: f64,
    /// Mortality intercept.
    pub delta0: f64,
    /// Mortality slope in adversity, >= 0.
    pub delta1: f64,
    /// Lower mortality clamp, in (0, 1).
    pub delta_min: f64,
    /// Upper mortality clamp, in (0, 1), >= delta_min.
    pub delta_max: f64,
}

fn one() -> f64 {
    1.0
}

impl Stage2Params {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        phi: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        p: f64,
        lambda_fixed: f64,
        delta0: f64,
        delta1: f64,
        delta_min: f64,
        delta_max: f64,
    ) -> Result<Self> {
        Stage2Params {
            phi,
            alpha,
            beta,
            gamma,
            p,
            lambda_fixed,
            delta0,
            delta1,
            delta_min,
            delta_max,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self> {
        positive(self.phi, "phi")?;
        open_unit(self.alpha, "alpha")?;
        open_unit(self.beta, "beta")?;
        open_unit(self.gamma, "gamma")?;
        open_unit(self.p, "p")?;
        positive(self.lambda_fixed, "lambda_fixed")?;
        finite(self.delta0, "delta0")?;
        finite(self.delta1, "delta1")?;
        check(self.delta1 >= 0.0, "delta1")?;
        open_unit(self.delta_min, "delta_min")?;
        open_unit(self.delta_max, "delta_max")?;
        check(self.delta_min <= self.delta_max, "delta_max")?;
        Ok(self)
    }

    pub fn baseline() -> Self {
        Stage2Params::new(1.0, 0.5, 0.5, 0.4, 0.2, 1.0, 0.3, 0.4, 0.05, 0.95)
            .expect("baseline is valid")
    }
}

/// Third-stage (appendix experimental model) parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage3Params {
    /// Total factor productivity, > 0.
    #[serde(rename = "A")]
    pub a_tfp: f64,
    /// Physical-labor output elasticity, in (0, 1).
    pub alpha: f64,
    /// Child preference weight, in (0, 1).
    pub gamma: f64,
    /// Child-rearing income fraction per child, in (0, 1).
    pub p: f64,
}

impl Stage3Params {
    pub fn new(a_tfp: f64, alpha: f64, gamma: f64, p: f64) -> Result<Self> {
        Stage3Params {
            a_tfp,
            alpha,
            gamma,
            p,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self> {
        positive(self.a_tfp, "A")?;
        open_unit(self.alpha, "alpha")?;
        open_unit(self.gamma, "gamma")?;
        open_unit(self.p, "p")?;
        Ok(self)
    }

    pub fn baseline() -> Self {
        // exp(2): large enough TFP for the FOC to have interior roots.
        Stage3Params::new(7.389, 0.5, 0.5, 0.25).expect("baseline is valid")
    }
}
