//! Channel-estimation slot: pilot reflection, noisy reception, and the
//! least-squares backscatter-channel estimate with its error statistics.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{sample_cn, ChannelRealization, PilotBlock};
use crate::error::{Error, Result};

/// LS estimate of one tag's R×M backscatter channel.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    /// Ĥ_k, shape R×M. Row r is the estimate seen at receive antenna r;
    /// column m is the estimate excited by transmit antenna m.
    pub bs_estimate: Array2<Complex64>,
    /// Pilot length D used to form the estimate.
    pub ce_rows_used: usize,
    /// Pilot power p_ce used to form the estimate.
    pub pilot_power: f64,
    /// Which tag this estimate belongs to.
    pub tag_index: usize,
}

impl ChannelEstimate {
    /// Column m of the estimate (length R), the MRC direction for antenna m.
    pub fn tx_column(&self, m: usize) -> Array1<Complex64> {
        self.bs_estimate.column(m).to_owned()
    }
}

/// Received CE-slot signal for one tag: √δ_k·H_k·pilotsᵀ + N with N
/// entries CN(0, σ²). The direct link is assumed perfectly cancelled.
pub fn simulate_ce_rx<R: Rng + ?Sized>(
    realization: &ChannelRealization,
    tag: usize,
    reflection: Complex64,
    pilots: &PilotBlock,
    ce_noise_power: f64,
    rng: &mut R,
) -> Array2<Complex64> {
    assert!(
        tag < realization.backward.nrows(),
        "tag index {tag} out of range"
    );
    let h = realization.backscatter_matrix(tag);
    let sqrt_delta = reflection.sqrt();
    let mut rx = h.dot(&pilots.pilots.t());
    rx.mapv_inplace(|z| z * sqrt_delta);
    if ce_noise_power > 0.0 {
        for z in rx.iter_mut() {
            *z += sample_cn(rng, ce_noise_power);
        }
    }
    rx
}

/// Least-squares estimate Ĥ = rx·δ^{−1/2}·G*·B^{−1/2}. With the pilot
/// block stored as G·B^{1/2}, this is rx·conj(pilots)/(√δ·D·p_ce).
pub fn ls_estimate(
    rx: &Array2<Complex64>,
    pilots: &PilotBlock,
    reflection: Complex64,
    tag_index: usize,
) -> Result<ChannelEstimate> {
    if reflection.norm() == 0.0 {
        return Err(Error::Domain(
            "LS estimate undefined for a zero reflection coefficient".into(),
        ));
    }
    if rx.ncols() != pilots.seq_len {
        return Err(Error::InvalidConfig(format!(
            "rx has {} columns but the pilot length is {}",
            rx.ncols(),
            pilots.seq_len
        )));
    }
    let d_pce = pilots.seq_len as f64 * pilots.pilot_power;
    let scale = (reflection.sqrt() * d_pce).inv();
    let mut est = rx.dot(&pilots.pilots.mapv(|z| z.conj()));
    est.mapv_inplace(|z| z * scale);
    Ok(ChannelEstimate {
        bs_estimate: est,
        ce_rows_used: pilots.seq_len,
        pilot_power: pilots.pilot_power,
        tag_index,
    })
}

/// Conditional LS error variance Kσ²/(|h|²·α·p_ce·|δ|).
///
/// Conditioning on a backward coefficient gives the forward-estimate error
/// variance and vice versa; the expression is symmetric in the conditioning
/// magnitude. A zero magnitude returns +∞ so downstream truncated
/// expectations handle it uniformly.
pub fn ce_error_variance(
    cond_mag_sq: f64,
    k_tags: usize,
    ce_noise_power: f64,
    alpha: f64,
    pilot_power: f64,
    reflection: Complex64,
) -> f64 {
    debug_assert!(alpha > 0.0 && pilot_power > 0.0 && ce_noise_power >= 0.0);
    if cond_mag_sq == 0.0 {
        return f64::INFINITY;
    }
    k_tags as f64 * ce_noise_power / (cond_mag_sq * alpha * pilot_power * reflection.norm())
}

/// The two conditional error-variance curves used by the link analysis.
#[derive(Debug, Clone, Copy)]
pub struct ErrorStats {
    pub k_tags: usize,
    pub ce_noise_power: f64,
    pub alpha: f64,
    pub pilot_power: f64,
    pub reflection: Complex64,
}

impl ErrorStats {
    /// σ²_e(h^b): forward-estimate error variance given |h_kr^b|².
    pub fn given_bwd(&self, bwd_mag_sq: f64) -> f64 {
        ce_error_variance(
            bwd_mag_sq,
            self.k_tags,
            self.ce_noise_power,
            self.alpha,
            self.pilot_power,
            self.reflection,
        )
    }

    /// σ²_ε(h^f): backward-estimate error variance given |h_mk^f|², the
    /// mirrored quantity entering the detection SINR.
    pub fn given_fwd(&self, fwd_mag_sq: f64) -> f64 {
        ce_error_variance(
            fwd_mag_sq,
            self.k_tags,
            self.ce_noise_power,
            self.alpha,
            self.pilot_power,
            self.reflection,
        )
    }
}

/// Row r of the estimate as a length-M vector. The beamformer consumes this
/// row directly; dividing out the unknown backward coefficient would require
/// information the reader does not have.
pub fn directional_fwd_estimate(est: &ChannelEstimate, rx_row: usize) -> Result<Array1<Complex64>> {
    if rx_row >= est.bs_estimate.nrows() {
        return Err(Error::IndexOutOfRange(format!(
            "rx_row {rx_row} out of range for {} receive antennas",
            est.bs_estimate.nrows()
        )));
    }
    Ok(est.bs_estimate.row(rx_row).to_owned())
}
