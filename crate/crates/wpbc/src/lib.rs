//! Link-level simulation and analytic models for wirelessly powered
//! backscatter communication (WPBC) with multi-antenna energy beamforming.
//!
//! A reader with M transmit and R receive antennas powers K single-antenna
//! tags over the air and reads them back through their reflections. Each
//! block splits into a channel-estimation slot (pilots, LS estimation of
//! the composite backscatter channel) and a joint energy/data slot
//! (weighted energy beamforming down, MRC detection up). The crate covers:
//!
//! - channel synthesis: path loss, flat Rayleigh draws, orthonormal pilots
//!   ([`channel`]);
//! - LS backscatter-channel estimation and its error laws ([`estimation`]);
//! - closed-form incident power and harvest rate with two-sided envelopes
//!   ([`energy`], [`specfun`]);
//! - instantaneous SINR, Monte Carlo ergodic rate, closed-form rate and its
//!   fully-bounded lower envelope ([`detection`]);
//! - max-min rate and max-min energy allocation over weights, CE time, and
//!   pilot power ([`optimizer`]);
//! - reproducible experiment sweeps with CSV output ([`harness`]).
//!
//! Every Monte Carlo path derives per-trial random streams from a master
//! seed ([`seeding`]), so results are bit-identical across thread counts.
//!
//! ```
//! use wpbc::harness::scenario::paper_default;
//! use wpbc::optimizer::{solve_maxmin_rate, GridSpec};
//!
//! let spec = paper_default();
//! let result = solve_maxmin_rate(&spec.config, &GridSpec::default()).unwrap();
//! assert!(result.feasible);
//! assert!(result.objective > 0.0);
//! ```

pub mod channel;
pub mod config;
pub mod detection;
pub mod energy;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod optimizer;
pub mod seeding;
pub mod specfun;

pub use error::{Error, Result};
