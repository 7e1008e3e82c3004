//! Energy beamforming from estimated backscatter CSI: incident power per
//! realization, its analytic expectation, the two-sided envelope, and the
//! energy-harvesting rate.

use ndarray::{Array1, ArrayView1};
use num_complex::Complex64;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::estimation::ChannelEstimate;
use crate::specfun::{phi_from_c, BoundPair};

/// One block's resource split: beam weights ζ, CE time α, pilot power p_ce,
/// and the derived data power p = (wT − αp_ce)/(T − α).
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceAllocation {
    /// Beam energy weights ζ, one per tag; nonnegative, summing to 1.
    pub weights: Vec<f64>,
    /// CE slot length α in symbol periods.
    pub ce_time: f64,
    /// Pilot power p_ce, watts.
    pub pilot_power: f64,
    /// Data-slot carrier power p, watts.
    pub data_power: f64,
}

impl ResourceAllocation {
    /// Validate the weights and the time/power budget, then derive the data
    /// power for the block.
    pub fn new(
        weights: Vec<f64>,
        ce_time: f64,
        pilot_power: f64,
        config: &SystemConfig,
    ) -> Result<Self> {
        if weights.len() != config.k_tags() {
            return Err(Error::InvalidConfig(format!(
                "{} weights for {} tags",
                weights.len(),
                config.k_tags()
            )));
        }
        if weights.iter().any(|&z| z < 0.0) {
            return Err(Error::InvalidConfig("weights must be nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        if !(0.0..=config.block_len as f64).contains(&ce_time) {
            return Err(Error::InvalidConfig(format!(
                "ce_time must lie in [0, T], got {ce_time}"
            )));
        }
        let data_power = derive_data_power(
            config.avg_tx_power,
            config.block_len,
            ce_time,
            pilot_power,
        )?;
        Ok(Self {
            weights,
            ce_time,
            pilot_power,
            data_power,
        })
    }
}

/// Data-slot power p = (wT − αp_ce)/(T − α).
pub fn derive_data_power(
    avg_tx_power: f64,
    block_len: usize,
    ce_time: f64,
    pilot_power: f64,
) -> Result<f64> {
    let t = block_len as f64;
    if ce_time >= t {
        return Err(Error::Infeasible(format!(
            "CE slot α = {ce_time} leaves no data slot in a block of T = {t}"
        )));
    }
    if ce_time < 0.0 {
        return Err(Error::Infeasible(format!("negative CE time {ce_time}")));
    }
    let budget = avg_tx_power * t - ce_time * pilot_power;
    if budget <= 0.0 {
        return Err(Error::Infeasible(format!(
            "pilot energy α·p_ce = {} exhausts the block budget wT = {}",
            ce_time * pilot_power,
            avg_tx_power * t
        )));
    }
    Ok(budget / (t - ce_time))
}

/// The transmit steering vector Φ = Σ_k √ζ_k · ĥ*_{kr}/‖ĥ_{kr}‖.
///
/// Per-tag components are unit vectors; the sum itself is not renormalized,
/// so ‖Φ‖ can exceed 1 when estimate rows are correlated across tags. The
/// instantaneous transmit power is E|u|²·‖Φ‖².
#[derive(Debug, Clone)]
pub struct Beamformer {
    pub steering: Array1<Complex64>,
}

/// Weighted sum of conjugated, normalized estimate rows. Tags with zero
/// weight contribute nothing; a zero-norm row only matters (and errors)
/// when its weight is positive.
pub fn build_beamformer(
    estimates: &[ChannelEstimate],
    weights: &[f64],
    rx_row: usize,
) -> Result<Beamformer> {
    if estimates.len() != weights.len() {
        return Err(Error::InvalidConfig(format!(
            "{} estimates for {} weights",
            estimates.len(),
            weights.len()
        )));
    }
    let m = estimates
        .first()
        .map(|e| e.bs_estimate.ncols())
        .ok_or_else(|| Error::InvalidConfig("no estimates supplied".into()))?;
    let mut steering = Array1::zeros(m);
    for (est, &zeta) in estimates.iter().zip(weights) {
        if zeta == 0.0 {
            continue;
        }
        if rx_row >= est.bs_estimate.nrows() {
            return Err(Error::IndexOutOfRange(format!(
                "rx_row {rx_row} out of range for {} receive antennas",
                est.bs_estimate.nrows()
            )));
        }
        let row = est.bs_estimate.row(rx_row);
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateEstimate(format!(
                "estimate row {rx_row} of tag {} has zero norm",
                est.tag_index
            )));
        }
        let scale = zeta.sqrt() / norm;
        for (s, z) in steering.iter_mut().zip(row.iter()) {
            *s += z.conj() * scale;
        }
    }
    Ok(Beamformer { steering })
}

/// Per-realization incident power p·|Φᵀh^f|² at a tag with forward vector
/// `fwd` (plain transpose product, no conjugation).
pub fn incident_power_instant(
    bf: &Beamformer,
    fwd: ArrayView1<'_, Complex64>,
    data_power: f64,
) -> f64 {
    let dot: Complex64 = bf
        .steering
        .iter()
        .zip(fwd.iter())
        .map(|(phi, h)| phi * h)
        .sum();
    data_power * dot.norm_sqr()
}

/// The estimation-quality parameter c = Kσ²/(β²·α·p_ce·|δ|) for one tag.
pub(crate) fn estimation_c(config: &SystemConfig, alpha: f64, pilot_power: f64, tag: usize) -> f64 {
    let beta = config.tags[tag].path_loss;
    let refl = config.tags[tag].refl_mag();
    config.k_tags() as f64 * config.ce_noise_power / (beta * beta * alpha * pilot_power * refl)
}

/// Envelope factors (L₁, L₂) of the beamforming gain: with c′ = 1/c,
/// L₁ = 1 − ln(1+c′)/c′ and L₂ = 1 − ln(1+2c′)/(2c′); 0 < L₁ < 1−φ < L₂ < 1.
pub(crate) fn bound_factors(c_prime: f64) -> (f64, f64) {
    debug_assert!(c_prime > 0.0);
    let l = |x: f64| {
        if x < 1e-4 {
            // 1 − ln(1+x)/x expanded: x/2 − x²/3 + x³/4
            x / 2.0 - x * x / 3.0 + x * x * x / 4.0
        } else {
            1.0 - x.ln_1p() / x
        }
    };
    (l(c_prime), l(2.0 * c_prime))
}

/// Expected incident power p·β_k·[ζ_k(M−1)(1−φ) + 1], the mean over
/// channels and CE noise of `incident_power_instant`.
pub fn incident_power_analytic(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    tag: usize,
) -> f64 {
    let beta = config.tags[tag].path_loss;
    let zeta = alloc.weights[tag];
    let m = config.m_tx as f64;
    let phi = phi_from_c(estimation_c(config, alloc.ce_time, alloc.pilot_power, tag));
    alloc.data_power * beta * (zeta * (m - 1.0) * (1.0 - phi) + 1.0)
}

/// Two-sided envelope on the expected incident power:
/// pβ[ζ(M−1)L₁+1] < analytic < pβ[ζ(M−1)L₂+1], collapsing at ζ(M−1) = 0.
pub fn incident_power_bounds(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    tag: usize,
) -> BoundPair {
    let beta = config.tags[tag].path_loss;
    let zeta = alloc.weights[tag];
    let m = config.m_tx as f64;
    let c = estimation_c(config, alloc.ce_time, alloc.pilot_power, tag);
    let (l1, l2) = bound_factors(1.0 / c);
    let p_beta = alloc.data_power * beta;
    BoundPair {
        lower: p_beta * (zeta * (m - 1.0) * l1 + 1.0),
        upper: p_beta * (zeta * (m - 1.0) * l2 + 1.0),
    }
}

/// Instantaneous energy-harvesting rate η(1−|δ|)·P_I of an activated tag;
/// the rectifier is linear in the incident power.
pub fn harvest_rate(incident: f64, reflection: Complex64, rectifier_eff: f64) -> f64 {
    debug_assert!(incident >= 0.0);
    rectifier_eff * (1.0 - reflection.norm()) * incident
}
