//! Path loss, flat Rayleigh channel draws, and orthonormal pilot blocks.

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Numerator of the long-term fading model β = 0.0086/(4π d²).
const PATH_LOSS_COEFF: f64 = 0.0086;

/// Long-term path loss at distance `d` meters: 0.0086/(4π d²).
pub fn path_loss_from_distance(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "path loss requires a positive distance, got {d}"
        )));
    }
    Ok(PATH_LOSS_COEFF / (4.0 * std::f64::consts::PI * d * d))
}

/// One joint draw of the forward and backward fading matrices.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// M×K forward matrix H^f; column k is the reader→tag-k vector h_k^f.
    pub forward: Array2<Complex64>,
    /// K×R backward matrix; row k is the tag-k→reader vector h_k^b.
    pub backward: Array2<Complex64>,
}

impl ChannelRealization {
    /// h_k^f, length M.
    pub fn forward_col(&self, tag: usize) -> ArrayView1<'_, Complex64> {
        self.forward.column(tag)
    }

    /// h_k^b, length R.
    pub fn backward_row(&self, tag: usize) -> ArrayView1<'_, Complex64> {
        self.backward.row(tag)
    }

    /// The R×M backscatter matrix H_k = h_k^b h_k^{fT}, built on demand.
    pub fn backscatter_matrix(&self, tag: usize) -> Array2<Complex64> {
        let fwd = self.forward_col(tag);
        let bwd = self.backward_row(tag);
        Array2::from_shape_fn((bwd.len(), fwd.len()), |(r, m)| bwd[r] * fwd[m])
    }
}

/// Circularly symmetric complex Gaussian with E|z|² = `variance`
/// (real and imaginary parts each N(0, variance/2)).
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    if variance == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draw one flat-fading realization: every coefficient of tag k, forward and
/// backward, is an independent CN(0, β_k) variate.
pub fn sample_channels<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let m = config.m_tx;
    let r = config.r_rx;
    let k_tags = config.k_tags();
    let mut forward = Array2::zeros((m, k_tags));
    let mut backward = Array2::zeros((k_tags, r));
    for (k, tag) in config.tags.iter().enumerate() {
        let beta = tag.path_loss;
        for i in 0..m {
            forward[(i, k)] = sample_cn(rng, beta);
        }
        for j in 0..r {
            backward[(k, j)] = sample_cn(rng, beta);
        }
    }
    ChannelRealization { forward, backward }
}

/// Orthogonal pilot block transmitted during the CE slot.
#[derive(Debug, Clone)]
pub struct PilotBlock {
    /// D×M matrix G·B^{1/2}; `pilotsᴴ·pilots = D·p_ce·I_M`.
    pub pilots: Array2<Complex64>,
    /// Pilot sequence length D.
    pub seq_len: usize,
    /// Per-antenna pilot power p_ce, watts.
    pub pilot_power: f64,
}

/// Build a D×M pilot block from the first M columns of the D-point DFT
/// matrix scaled to satisfy pilotsᴴ·pilots = D·p_ce·I_M exactly.
pub fn make_pilots(m_tx: usize, seq_len: usize, pilot_power: f64) -> Result<PilotBlock> {
    if m_tx == 0 {
        return Err(Error::InvalidConfig("m_tx must be ≥ 1".into()));
    }
    if seq_len < m_tx {
        return Err(Error::InvalidConfig(format!(
            "pilot length D = {seq_len} must be at least the antenna count M = {m_tx}"
        )));
    }
    if !(pilot_power > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "pilot power must be > 0, got {pilot_power}"
        )));
    }
    let d = seq_len as f64;
    // G = first M columns of the unitary DFT; B^{1/2} = √(D·p_ce)·I.
    let scale = (d * pilot_power).sqrt() / d.sqrt();
    let pilots = Array2::from_shape_fn((seq_len, m_tx), |(row, col)| {
        let angle = -2.0 * std::f64::consts::PI * (row as f64) * (col as f64) / d;
        Complex64::from_polar(scale, angle)
    });
    Ok(PilotBlock {
        pilots,
        seq_len,
        pilot_power,
    })
}
