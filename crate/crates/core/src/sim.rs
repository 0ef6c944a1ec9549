//! Time-stepping engine for the stage-1 and stage-2 economies under
//! realized adversity paths, with per-period regime classification.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::params::{Stage1Params, Stage2Params};
use crate::shocks::{AdversityPath, RNG_ID};
use crate::stage1::{self, FertilityRegime};
use crate::stage2;

/// Scenario classification of the population relative to the threshold g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// L > g: fertility below one, population shrinking.
    Scenario1,
    /// L < g: fertility above one, population growing.
    Scenario2,
    /// |L - g| within relative 1e-12 of g.
    Boundary,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Scenario1 => "scenario-1",
            Scenario::Scenario2 => "scenario-2",
            Scenario::Boundary => "boundary",
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// Income fell below survival consumption; fertility hit zero.
    Extinction,
    /// Adversity reached phi*lambda mid-run, so no positive-output
    /// allocation exists. Clamping would fabricate dynamics, so we stop.
    AdversityExceedsTechnology,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Extinction => "extinction",
            Termination::AdversityExceedsTechnology => "adversity-exceeds-technology",
        }
    }
}

/// One period's full state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRecord {
    pub t: usize,
    pub a: f64,
    pub lambda: f64,
    pub x_star: f64,
    pub y_star: f64,
    pub n_star: f64,
    pub big_l: f64,
    /// Stage-1 fertility branch; `None` for stage-2 records.
    pub regime: Option<FertilityRegime>,
    /// Stage-1 position relative to the threshold g; `None` when the
    /// threshold does not exist (gamma < p) or for stage-2 records.
    pub scenario: Option<Scenario>,
    /// Stage-2 child mortality.
    pub delta: Option<f64>,
    /// Stage-2 steady-state target for the period's mortality.
    pub l_tilde: Option<f64>,
}

/// Which stage produced a series (parameters echoed for reproducibility).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesParams {
    Stage1(Stage1Params),
    Stage2(Stage2Params),
}

/// An ordered trajectory plus the metadata needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSeries {
    pub records: Vec<SimRecord>,
    pub params: SeriesParams,
    pub seed: u64,
    pub shock_kind: String,
    pub termination: Termination,
}

/// Classifies a population level against the threshold g.
pub fn classify_regime(big_l: f64, g: f64) -> Scenario {
    debug_assert!(g > 0.0);
    if (big_l - g).abs() / g <= 1e-12 {
        Scenario::Boundary
    } else if big_l > g {
        Scenario::Scenario1
    } else {
        Scenario::Scenario2
    }
}

/// Runs the first-stage economy over a realized adversity path.
///
/// Per period: closed-form allocation and output, fertility with its
/// regime, scenario classification against the recomputed threshold, then
/// the productivity ratchet (lags seeded with the period-0 values) and the
/// population update. Halts early on extinction or when adversity reaches
/// `phi * lambda`.
pub fn run_stage1(
    p: &Stage1Params,
    path: &AdversityPath,
    l0: f64,
    lambda0: f64,
) -> Result<SimSeries> {
    if path.values.len() < 2 {
        return Err(Error::config("adversity path must cover at least 1 period"));
    }
    if !(l0 > 0.0 && l0.is_finite()) {
        return Err(Error::domain(format!("L0 = {l0} must be > 0")));
    }
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::domain(format!("lambda0 = {lambda0} must be > 0")));
    }
    if path.values[0] >= p.phi * lambda0 {
        return Err(Error::domain(format!(
            "a_0 = {} must be below phi*lambda0 = {}",
            path.values[0],
            p.phi * lambda0
        )));
    }

    let mut records = Vec::with_capacity(path.values.len());
    let mut lambda = lambda0;
    let mut big_l = l0;
    let mut termination = Termination::Completed;
    // Lags seeded with period-0 values: no ratchet fires at t = 1 unless
    // a_1 > a_0.
    let mut a_prev = path.values[0];
    let mut x_prev = f64::NAN;

    for (t, &a) in path.values.iter().enumerate() {
        if a >= p.phi * lambda {
            termination = Termination::AdversityExceedsTechnology;
            break;
        }
        let x = stage1::optimal_labor_allocation(p, lambda, a)?;
        let y = stage1::optimal_output(p, lambda, a, big_l)?;
        let (n, regime) = stage1::fertility(p, y)?;
        let scenario = match stage1::population_threshold_g(p, lambda, a) {
            Ok(g) => Some(classify_regime(big_l, g)),
            Err(Error::NoThreshold) => None,
            Err(e) => return Err(e),
        };
        records.push(SimRecord {
            t,
            a,
            lambda,
            x_star: x,
            y_star: y,
            n_star: n,
            big_l,
            regime: Some(regime),
            scenario,
            delta: None,
            l_tilde: None,
        });
        if n == 0.0 {
            termination = Termination::Extinction;
            break;
        }
        if t == 0 {
            x_prev = x;
        }
        lambda = stage1::update_health_productivity(p, lambda, a, a_prev, x, x_prev);
        big_l = stage1::step_population(n, big_l);
        a_prev = a;
        x_prev = x;
    }

    Ok(SimSeries {
        records,
        params: SeriesParams::Stage1(*p),
        seed: path.seed,
        shock_kind: path.config.kind.as_str().to_string(),
        termination,
    })
}

/// Runs the second-stage economy: per-period mortality from adversity,
/// closed-form policy, and the mortality-adjusted population update. Each
/// record carries the steady-state target for the period's mortality.
pub fn run_stage2(p: &Stage2Params, path: &AdversityPath, l0: f64) -> Result<SimSeries> {
    if path.values.len() < 2 {
        return Err(Error::config("adversity path must cover at least 1 period"));
    }
    if !(l0 > 0.0 && l0.is_finite()) {
        return Err(Error::domain(format!("L0 = {l0} must be > 0")));
    }
    let mut records = Vec::with_capacity(path.values.len());
    let mut big_l = l0;
    for (t, &a) in path.values.iter().enumerate() {
        let delta = stage2::mortality(p, a);
        let pol = stage2::optimal_policy2(p, big_l)?;
        let steady = stage2::steady_state(p, delta)?;
        records.push(SimRecord {
            t,
            a,
            lambda: p.lambda_fixed,
            x_star: pol.x_star,
            y_star: pol.y,
            n_star: pol.n_star,
            big_l,
            regime: None,
            scenario: None,
            delta: Some(delta),
            l_tilde: Some(steady.l_tilde),
        });
        big_l = stage2::step_population2(p, big_l, delta)?;
    }
    Ok(SimSeries {
        records,
        params: SeriesParams::Stage2(*p),
        seed: path.seed,
        shock_kind: path.config.kind.as_str().to_string(),
        termination: Termination::Completed,
    })
}

impl SimSeries {
    fn is_stage2(&self) -> bool {
        matches!(self.params, SeriesParams::Stage2(_))
    }

    fn params_hash(&self) -> String {
        let text = match &self.params {
            SeriesParams::Stage1(p) => toml::to_string(p).expect("serializable"),
            SeriesParams::Stage2(p) => toml::to_string(p).expect("serializable"),
        };
        hex16(&text)
    }

    /// CSV with comment-prefixed metadata lines (seed, RNG, params hash,
    /// data hash), a header row, and one record per row. Numbers use the
    /// shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut body = String::new();
        if self.is_stage2() {
            body.push_str("t,a,lambda,x,y,n,L,regime,delta\n");
        } else {
            body.push_str("t,a,lambda,x,y,n,L,regime\n");
        }
        for r in &self.records {
            let regime = match (r.regime, r.scenario) {
                (Some(f), Some(s)) => format!("{}:{}", f.as_str(), s.as_str()),
                (Some(f), None) => format!("{}:no-threshold", f.as_str()),
                (None, _) => {
                    // stage 2: position relative to the steady-state target
                    let lt = r.l_tilde.unwrap_or(f64::NAN);
                    if (r.big_l - lt).abs() / lt <= 1e-12 {
                        "at-steady".to_string()
                    } else if r.big_l > lt {
                        "above-steady".to_string()
                    } else {
                        "below-steady".to_string()
                    }
                }
            };
            body.push_str(&format!(
                "{},{},{},{},{},{},{},{}",
                r.t, r.a, r.lambda, r.x_star, r.y_star, r.n_star, r.big_l, regime
            ));
            if self.is_stage2() {
                body.push_str(&format!(",{}", r.delta.unwrap_or(f64::NAN)));
            }
            body.push('\n');
        }
        format!(
            "# seed={} rng={} kind={} termination={}\n# params_sha256={} data_sha256={}\n{}",
            self.seed,
            RNG_ID,
            self.shock_kind,
            self.termination.as_str(),
            self.params_hash(),
            hex16(&body),
            body
        )
    }
}

fn hex16(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
