//! Scenario constants: array sizes, powers, noise levels, and tag profiles.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Long-term parameters of a single backscatter tag.
#[derive(Debug, Clone, PartialEq)]
pub struct TagProfile {
    /// Reader–tag distance in meters, when the path loss was derived from one.
    pub distance: Option<f64>,
    /// Long-term path loss β of the reader–tag link (linear power gain).
    pub path_loss: f64,
    /// Complex reflection coefficient δ with 0 < |δ| < 1. The reflected
    /// power fraction is |δ|; the harvested fraction is 1 − |δ|.
    pub reflection: Complex64,
}

impl TagProfile {
    pub fn new(path_loss: f64, reflection: Complex64) -> Self {
        Self {
            distance: None,
            path_loss,
            reflection,
        }
    }

    /// Build a profile from a distance using the long-term fading model.
    pub fn from_distance(distance: f64, reflection: Complex64) -> Result<Self> {
        let path_loss = crate::channel::path_loss_from_distance(distance)?;
        Ok(Self {
            distance: Some(distance),
            path_loss,
            reflection,
        })
    }

    /// |δ|, the reflected power fraction.
    pub fn refl_mag(&self) -> f64 {
        self.reflection.norm()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.path_loss > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tag path_loss must be > 0, got {}",
                self.path_loss
            )));
        }
        let mag = self.refl_mag();
        if !(mag > 0.0 && mag < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tag reflection magnitude must lie in (0,1), got {mag}"
            )));
        }
        Ok(())
    }
}

/// Full scenario description shared by every module.
///
/// All powers are in watts. Scenario files may use dBm; conversion happens
/// on load (see [`crate::harness::scenario`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas M.
    pub m_tx: usize,
    /// Receive antennas R (the closed-form rates require R ≥ 2).
    pub r_rx: usize,
    /// Block length T in symbol periods.
    pub block_len: usize,
    /// Average transmit power w over the block, watts.
    pub avg_tx_power: f64,
    /// Reader noise power σ² during channel estimation, watts.
    pub ce_noise_power: f64,
    /// Reader noise power σ̃² during data detection, watts.
    pub rx_noise_power: f64,
    /// Tag-side noise power σ_k²; carried for completeness. Noise energy is
    /// not harvestable and the uplink reflects only the beamformed carrier,
    /// so it enters no power computation.
    pub tag_noise_power: f64,
    /// Rectifier efficiency η ∈ (0, 1].
    pub rectifier_eff: f64,
    /// Circuit power consumption rate ρ, watts; a tag needs a harvest rate
    /// of at least ρ to stay active.
    pub circuit_power: f64,
    /// Truncation level τ > 0 for inverse channel moments.
    pub trunc_threshold: f64,
    /// Per-tag profiles; the tag count K is `tags.len()`.
    pub tags: Vec<TagProfile>,
}

impl SystemConfig {
    /// Number of tags K.
    pub fn k_tags(&self) -> usize {
        self.tags.len()
    }

    /// Default truncation threshold: 0.01 · min_k β_k. β-relative so the
    /// truncation stays mild at any path-loss scale.
    pub fn default_trunc_threshold(tags: &[TagProfile]) -> f64 {
        0.01 * tags
            .iter()
            .map(|t| t.path_loss)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_tx < 1 {
            return Err(Error::InvalidConfig("m_tx must be ≥ 1".into()));
        }
        if self.r_rx < 2 {
            return Err(Error::InvalidConfig(format!(
                "r_rx must be ≥ 2 (closed-form rates need a second receive antenna), got {}",
                self.r_rx
            )));
        }
        if self.block_len < 1 {
            return Err(Error::InvalidConfig("block_len must be ≥ 1".into()));
        }
        if self.tags.is_empty() {
            return Err(Error::InvalidConfig("at least one tag is required".into()));
        }
        for (name, v) in [
            ("avg_tx_power", self.avg_tx_power),
            ("ce_noise_power", self.ce_noise_power),
            ("rx_noise_power", self.rx_noise_power),
            ("tag_noise_power", self.tag_noise_power),
            ("circuit_power", self.circuit_power),
            ("trunc_threshold", self.trunc_threshold),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.rectifier_eff > 0.0 && self.rectifier_eff <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rectifier_eff must lie in (0,1], got {}",
                self.rectifier_eff
            )));
        }
        for (k, tag) in self.tags.iter().enumerate() {
            tag.validate()
                .map_err(|e| Error::InvalidConfig(format!("tag {k}: {e}")))?;
        }
        Ok(())
    }
}

/// x dBm → watts: 10^((x − 30)/10).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// watts → dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
