//! Deterministic, seeded environmental-adversity processes.
//!
//! Three generators are provided: a constant level, i.i.d. uniform draws,
//! and a mean-reverting AR(1). All draws come from a ChaCha12 stream cipher
//! RNG with explicit 64-bit seeding, so identical configurations produce
//! bit-identical paths on every platform. Emitted adversity is clamped at 0
//! from below.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the pseudo-random algorithm, recorded in output metadata.
pub const RNG_ID: &str = "chacha12";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShockKind {
    Constant,
    IidUniform,
    Ar1,
}

impl ShockKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShockKind::Constant => "constant",
            ShockKind::IidUniform => "iid-uniform",
            ShockKind::Ar1 => "ar1",
        }
    }
}

impl std::str::FromStr for ShockKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(ShockKind::Constant),
            "iid-uniform" => Ok(ShockKind::IidUniform),
            "ar1" => Ok(ShockKind::Ar1),
            other => Err(Error::config(format!("unknown shock kind `{other}`"))),
        }
    }
}

/// Configuration of the adversity process. Fields irrelevant to the chosen
/// `kind` are ignored by generation but still validated for finiteness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockProcessConfig {
    pub kind: ShockKind,
    /// Level for `constant`.
    #[serde(default)]
    pub a_const: f64,
    /// Support bounds for `iid-uniform`, 0 <= a_lo <= a_hi.
    #[serde(default)]
    pub a_lo: f64,
    #[serde(default)]
    pub a_hi: f64,
    /// AR(1) persistence, in [0, 1).
    #[serde(default)]
    pub rho: f64,
    /// AR(1) long-run mean.
    #[serde(default)]
    pub a_bar: f64,
    /// AR(1) innovation scale, >= 0.
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ShockProcessConfig {
    pub fn constant(a_const: f64) -> Self {
        ShockProcessConfig {
            kind: ShockKind::Constant,
            a_const,
            a_lo: 0.0,
            a_hi: 0.0,
            rho: 0.0,
            a_bar: 0.0,
            sigma: 0.0,
            seed: 0,
        }
    }

    pub fn iid_uniform(a_lo: f64, a_hi: f64, seed: u64) -> Self {
        ShockProcessConfig {
            kind: ShockKind::IidUniform,
            a_const: 0.0,
            a_lo,
            a_hi,
            rho: 0.0,
            a_bar: 0.0,
            sigma: 0.0,
            seed,
        }
    }

    pub fn ar1(rho: f64, a_bar: f64, sigma: f64, seed: u64) -> Self {
        ShockProcessConfig {
            kind: ShockKind::Ar1,
            a_const: 0.0,
            a_lo: 0.0,
            a_hi: 0.0,
            rho,
            a_bar,
            sigma,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::config(msg.to_string()));
        if ![self.a_const, self.a_lo, self.a_hi, self.rho, self.a_bar, self.sigma]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("shock config contains non-finite values");
        }
        match self.kind {
            ShockKind::Constant => {
                if self.a_const < 0.0 {
                    return bad("a_const must be >= 0");
                }
            }
            ShockKind::IidUniform => {
                if !(0.0 <= self.a_lo && self.a_lo <= self.a_hi) {
                    return bad("iid-uniform requires 0 <= a_lo <= a_hi");
                }
            }
            ShockKind::Ar1 => {
                if !(0.0..1.0).contains(&self.rho) {
                    return bad("ar1 requires rho in [0, 1)");
                }
                if self.a_bar < 0.0 {
                    return bad("ar1 requires a_bar >= 0");
                }
                if self.sigma < 0.0 {
                    return bad("ar1 requires sigma >= 0");
                }
            }
        }
        Ok(())
    }
}

/// A realized adversity sequence of length `T + 1` together with the
/// configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversityPath {
    pub values: Vec<f64>,
    pub seed: u64,
    pub config: ShockProcessConfig,
}

impl AdversityPath {
    /// Number of simulation periods the path supports (`len - 1`).
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// Serializes as single-column CSV with a metadata header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# kind={} seed={} rng={}\n",
            self.config.kind.as_str(),
            self.seed,
            RNG_ID
        ));
        out.push_str("a\n");
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    /// Reads a path previously written by [`AdversityPath::to_csv`],
    /// enabling replay of exact histories.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut kind = ShockKind::Constant;
        let mut seed = 0u64;
        let mut values = Vec::new();
        let mut saw_header = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for token in meta.split_whitespace() {
                    if let Some(v) = token.strip_prefix("kind=") {
                        kind = v.parse()?;
                    } else if let Some(v) = token.strip_prefix("seed=") {
                        seed = v
                            .parse()
                            .map_err(|_| Error::config("bad seed in path metadata"))?;
                    }
                }
                continue;
            }
            if !saw_header {
                if line != "a" {
                    return Err(Error::config("expected `a` header in adversity CSV"));
                }
                saw_header = true;
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::config(format!("bad adversity value `{line}`")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config("adversity values must be finite and >= 0"));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::config("adversity CSV contains no values"));
        }
        let mut config = ShockProcessConfig::constant(0.0);
        config.kind = kind;
        config.seed = seed;
        Ok(AdversityPath {
            values,
            seed,
            config,
        })
    }
}

/// Generates a length `T + 1` adversity path. Deterministic in `(cfg, t)`.
pub fn generate_path(cfg: &ShockProcessConfig, t: usize) -> Result<AdversityPath> {
    if t < 1 {
        return Err(Error::config("period count T must be >= 1"));
    }
    cfg.validate()?;
    let n = t + 1;
    let mut values = Vec::with_capacity(n);
    match cfg.kind {
        ShockKind::Constant => values.resize(n, cfg.a_const),
        ShockKind::IidUniform => {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            for _ in 0..n {
                values.push(rng.random_range(cfg.a_lo..=cfg.a_hi));
            }
        }
        ShockKind::Ar1 => {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            let mut a = cfg.a_bar.max(0.0);
            values.push(a);
            for _ in 1..n {
                let z: f64 = StandardNormal.sample(&mut rng);
                a = (cfg.a_bar + cfg.rho * (a - cfg.a_bar) + cfg.sigma * z).max(0.0);
                values.push(a);
            }
        }
    }
    debug_assert!(values.iter().all(|v| *v >= 0.0));
    Ok(AdversityPath {
        values,
        seed: cfg.seed,
        config: *cfg,
    })
}
