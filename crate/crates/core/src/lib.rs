//! Deterministic solvers, simulators, and verification oracles for a family
//! of overlapping-generations economies in which parents split labor between
//! production and child health.
//!
//! Three model variants are covered:
//!
//! * **Stage 1** — health spending shields children from environmental
//!   adversity; closed-form policies, a population viability threshold, and a
//!   ratcheting health-productivity rule.
//! * **Stage 2** — health spending enters production directly and adult
//!   mortality is exogenous; closed-form policies and steady-state analysis.
//! * **Stage 3** — health investment raises child survival through a
//!   first-order condition with no closed form; root scanning plus utility
//!   ranking selects the optimum.
//!
//! Every closed form is cross-checked by independent brute-force oracles in
//! [`oracle`]. All randomness flows through a seeded, named generator
//! ([`shocks::RNG_ID`]) so that runs are bit-reproducible.

pub mod cli;
pub mod config;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod shocks;
pub mod sim;
pub mod stage1;
pub mod stage2;
pub mod stage3;
pub mod svg;

pub use error::{Error, Result};
pub use params::{Stage1Params, Stage2Params, Stage3Params};
