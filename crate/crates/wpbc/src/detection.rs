//! MRC detection of the backscattered uplink: instantaneous SINR, the
//! Monte Carlo ergodic rate, the closed-form achievable rate, and its
//! fully-bounded lower envelope.

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{make_pilots, sample_cn, sample_channels, PilotBlock};
use crate::config::SystemConfig;
use crate::energy::{
    bound_factors, build_beamformer, derive_data_power, estimation_c, harvest_rate,
    incident_power_analytic, incident_power_bounds, incident_power_instant, Beamformer,
    ResourceAllocation,
};
use crate::error::{Error, Result};
use crate::estimation::{ce_error_variance, ls_estimate, simulate_ce_rx, ChannelEstimate};
use crate::seeding::derive_stream;
use crate::specfun::{phi_from_c, truncated_inverse_moment, BoundPair};

/// Unit-norm MRC detector: column `tx_col` of the estimate, normalized.
pub fn mrc_detector(est: &ChannelEstimate, tx_col: usize) -> Result<Array1<Complex64>> {
    if tx_col >= est.bs_estimate.ncols() {
        return Err(Error::IndexOutOfRange(format!(
            "tx_col {tx_col} out of range for {} transmit antennas",
            est.bs_estimate.ncols()
        )));
    }
    let col = est.bs_estimate.column(tx_col);
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateEstimate(format!(
            "estimate column {tx_col} of tag {} has zero norm",
            est.tag_index
        )));
    }
    Ok(col.mapv(|z| z / norm))
}

/// Instantaneous post-detection SINR of one tag:
/// p_k|qᴴĥ_k|² / (Σ_{i≠k} p_i|qᴴĥ_i|² + |qᴴq|·Σ_i p_i σ²_{ε,i} + |qᴴq|·σ̃²).
///
/// The |qᴴq| factor is kept for non-normalized detectors even though the
/// MRC path always supplies a unit vector.
pub fn sinr_instant(
    detector: &Array1<Complex64>,
    est_bwd: &[Array1<Complex64>],
    reflect_powers: &[f64],
    err_vars: &[f64],
    rx_noise_power: f64,
    tag: usize,
) -> f64 {
    let herm = |v: &Array1<Complex64>| -> f64 {
        detector
            .iter()
            .zip(v.iter())
            .map(|(q, h)| q.conj() * h)
            .sum::<Complex64>()
            .norm_sqr()
    };
    let qq: f64 = detector.iter().map(|z| z.norm_sqr()).sum();
    let num = reflect_powers[tag] * herm(&est_bwd[tag]);
    let mut den = qq * rx_noise_power;
    for i in 0..est_bwd.len() {
        if i != tag {
            den += reflect_powers[i] * herm(&est_bwd[i]);
        }
        den += qq * reflect_powers[i] * err_vars[i];
    }
    if den == 0.0 {
        return 0.0;
    }
    num / den
}

// ---------------------------------------------------------------------------
// Analytic rate machinery shared by the public closed forms and the
// optimizer's inner solvers.
// ---------------------------------------------------------------------------

/// c0 + c1·ζ.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Affine {
    pub c0: f64,
    pub c1: f64,
}

impl Affine {
    pub(crate) fn at(&self, z: f64) -> f64 {
        self.c0 + self.c1 * z
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TagRateCoeffs {
    /// |δ|.
    pub refl: f64,
    /// β.
    pub beta: f64,
    /// Incident power entering the tag's own signal term, vs its ζ.
    pub sig: Affine,
    /// Incident power entering interference and self-error terms, vs its ζ.
    pub intf: Affine,
    /// Inverse-moment error coefficient multiplying the reflect power.
    pub err_t: f64,
    /// Signal-expectation factor of the SINR denominator.
    pub denom_factor: f64,
}

/// Per-(α, p_ce) analytic SINR model: every per-tag rate is an
/// affine-over-affine function of that tag's own weight.
#[derive(Debug, Clone)]
pub(crate) struct RateModel {
    pub r_gain: f64,
    pub rx_noise: f64,
    pub tags: Vec<TagRateCoeffs>,
}

impl RateModel {
    /// Fully-bounded flavor: envelope incident powers (lower for the signal,
    /// upper for interference), logarithmic Γ replacements, L₂ signal factor.
    pub(crate) fn lower(config: &SystemConfig, alpha: f64, p_ce: f64) -> Result<Self> {
        Self::build(config, alpha, p_ce, Flavor::Lower)
    }

    /// Closed-form flavor: exact expected powers, exact Γ terms, (1−φ).
    pub(crate) fn closed(config: &SystemConfig, alpha: f64, p_ce: f64) -> Result<Self> {
        Self::build(config, alpha, p_ce, Flavor::Closed)
    }

    /// Perfect-CSI limit: no CE slot, exact powers, no error terms.
    pub(crate) fn perfect(config: &SystemConfig) -> Result<Self> {
        check_r(config)?;
        let m = config.m_tx as f64;
        let w = config.avg_tx_power;
        let tags = config
            .tags
            .iter()
            .map(|t| {
                let pb = w * t.path_loss;
                TagRateCoeffs {
                    refl: t.refl_mag(),
                    beta: t.path_loss,
                    sig: Affine { c0: pb, c1: pb * (m - 1.0) },
                    intf: Affine { c0: pb, c1: pb * (m - 1.0) },
                    err_t: 0.0,
                    denom_factor: 1.0,
                }
            })
            .collect();
        Ok(Self {
            r_gain: config.r_rx as f64 - 1.0,
            rx_noise: config.rx_noise_power,
            tags,
        })
    }

    /// Omnidirectional transmission with CE kept for detection: incident
    /// powers pinned at p·β (no array gain), error terms as in `lower`.
    pub(crate) fn omni(config: &SystemConfig, alpha: f64, p_ce: f64) -> Result<Self> {
        let mut model = Self::build(config, alpha, p_ce, Flavor::Lower)?;
        for t in &mut model.tags {
            t.sig.c1 = 0.0;
            t.intf.c1 = 0.0;
        }
        Ok(model)
    }

    fn build(config: &SystemConfig, alpha: f64, p_ce: f64, flavor: Flavor) -> Result<Self> {
        check_r(config)?;
        if !(alpha > 0.0 && p_ce > 0.0) {
            return Err(Error::Domain(format!(
                "analytic rates need a CE slot: α = {alpha}, p_ce = {p_ce}"
            )));
        }
        let tau = config.trunc_threshold;
        if !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "truncation threshold must be > 0, got {tau}"
            )));
        }
        let p = derive_data_power(config.avg_tx_power, config.block_len, alpha, p_ce)?;
        let m = config.m_tx as f64;
        let k_sigma = config.k_tags() as f64 * config.ce_noise_power;
        let tags = config
            .tags
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let beta = t.path_loss;
                let refl = t.refl_mag();
                let pb = p * beta;
                let c = estimation_c(config, alpha, p_ce, k);
                let err_scale = k_sigma / (alpha * p_ce * refl);
                Ok(match flavor {
                    Flavor::Closed => {
                        let phi = phi_from_c(c);
                        let gain = Affine {
                            c0: pb,
                            c1: pb * (m - 1.0) * (1.0 - phi),
                        };
                        TagRateCoeffs {
                            refl,
                            beta,
                            sig: gain,
                            intf: gain,
                            err_t: err_scale * truncated_inverse_moment(beta, tau)?,
                            denom_factor: 1.0 - phi,
                        }
                    }
                    Flavor::Lower => {
                        let (l1, l2) = bound_factors(1.0 / c);
                        TagRateCoeffs {
                            refl,
                            beta,
                            sig: Affine { c0: pb, c1: pb * (m - 1.0) * l1 },
                            intf: Affine { c0: pb, c1: pb * (m - 1.0) * l2 },
                            // Γ(0, τ/β)/β replaced by its logarithmic upper
                            // envelope e^{−τ/β}·ln(1+β/τ)/β.
                            err_t: err_scale * (-tau / beta).exp() * (beta / tau).ln_1p() / beta,
                            denom_factor: l2,
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            r_gain: config.r_rx as f64 - 1.0,
            rx_noise: config.rx_noise_power,
            tags,
        })
    }

    /// Contribution of tag i to every other tag's SINR denominator.
    fn cross_term(&self, i: usize, zeta_i: f64) -> f64 {
        let t = &self.tags[i];
        t.refl * t.intf.at(zeta_i) * (t.beta + 2.0 * t.err_t)
    }

    pub(crate) fn sinr(&self, weights: &[f64], tag: usize) -> f64 {
        let own = &self.tags[tag];
        let mut den = self.rx_noise;
        for i in 0..self.tags.len() {
            if i != tag {
                den += self.cross_term(i, weights[i]);
            }
        }
        den += own.refl * own.intf.at(weights[tag]) * own.err_t;
        den *= own.denom_factor;
        let num = own.refl * own.sig.at(weights[tag]) * self.r_gain * own.beta;
        num / den
    }

    pub(crate) fn rate(&self, weights: &[f64], tag: usize) -> f64 {
        (1.0 + self.sinr(weights, tag)).log2()
    }

    /// Smallest own weight at which the tag reaches `target` bits/s/Hz given
    /// the other weights, or None when even ζ = 1 falls short. The rate is
    /// affine-over-affine in the own weight, so the root is closed-form.
    pub(crate) fn min_zeta_for_rate(
        &self,
        weights: &[f64],
        tag: usize,
        target: f64,
    ) -> Option<f64> {
        let gamma = (target.exp2() - 1.0).max(0.0);
        if gamma == 0.0 {
            return Some(0.0);
        }
        let own = &self.tags[tag];
        let mut cross = self.rx_noise;
        for i in 0..self.tags.len() {
            if i != tag {
                cross += self.cross_term(i, weights[i]);
            }
        }
        let a = own.refl * self.r_gain * own.beta * own.sig.c1;
        let b = own.refl * self.r_gain * own.beta * own.sig.c0;
        let e = own.refl * own.err_t;
        let ec1 = gamma * own.denom_factor * e * own.intf.c1;
        let ec0 = gamma * own.denom_factor * (cross + e * own.intf.c0);
        let rhs = ec0 - b;
        if rhs <= 0.0 {
            return Some(0.0);
        }
        let coef = a - ec1;
        if coef <= 0.0 {
            return None;
        }
        let z = rhs / coef;
        (z <= 1.0).then_some(z)
    }

    /// Incident power behind the tag's signal term as a function of its own
    /// weight (the lower envelope power in the `lower` flavor).
    pub(crate) fn signal_power_affine(&self, tag: usize) -> Affine {
        self.tags[tag].sig
    }
}

enum Flavor {
    Closed,
    Lower,
}

fn check_r(config: &SystemConfig) -> Result<()> {
    if config.r_rx < 2 {
        return Err(Error::Domain(format!(
            "closed-form rates require R ≥ 2, got {}",
            config.r_rx
        )));
    }
    Ok(())
}

/// Ergodic achievable rate R̃ = log₂(1 + γ̃) with the exact expected powers
/// and Γ terms; a lower bound on the Monte Carlo ergodic rate.
pub fn rate_closed_form(config: &SystemConfig, alloc: &ResourceAllocation, tag: usize) -> Result<f64> {
    let model = RateModel::closed(config, alloc.ce_time, alloc.pilot_power)?;
    Ok(model.rate(&alloc.weights, tag))
}

/// Fully-bounded rate log₂(1 + γ̃_L): envelope powers and logarithmic Γ
/// replacements throughout; never exceeds `rate_closed_form`.
pub fn rate_lower_bound(config: &SystemConfig, alloc: &ResourceAllocation, tag: usize) -> Result<f64> {
    let model = RateModel::lower(config, alloc.ce_time, alloc.pilot_power)?;
    Ok(model.rate(&alloc.weights, tag))
}

// ---------------------------------------------------------------------------
// Monte Carlo ergodic rate
// ---------------------------------------------------------------------------

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// Options for the ergodic-rate Monte Carlo.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub trials: usize,
    pub master_seed: u64,
    /// Match-analytic mode: resample forward coefficients below the
    /// truncation threshold (so the draw matches the truncated inverse
    /// moments) and hold reflect powers at their analytic means (the
    /// quantities the closed forms condition on). Unflagged runs draw
    /// untruncated channels and recompute reflect powers per realization.
    pub tau_matched: bool,
    /// Receive-antenna row feeding the beamformer.
    pub rx_row: usize,
    /// Transmit-antenna column feeding the MRC detector.
    pub tx_col: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            trials: 10_000,
            master_seed: 0,
            tau_matched: false,
            rx_row: 0,
            tx_col: 0,
        }
    }
}

const MC_RATE_DOMAIN: u64 = 0x4d43_5241_5445;

/// Sample mean of log₂(1 + γ) over joint draws of channels and CE noise,
/// with per-realization reflect powers. Per-trial streams are derived from
/// the master seed, so the estimate is independent of thread count.
pub fn ergodic_rate_mc(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    tag: usize,
    opts: &McOptions,
) -> Result<McEstimate> {
    if tag >= config.k_tags() {
        return Err(Error::IndexOutOfRange(format!("tag {tag}")));
    }
    Ok(ergodic_rates_mc(config, alloc, opts)?.swap_remove(tag))
}

/// Monte Carlo ergodic rate of every tag from shared joint draws.
pub fn ergodic_rates_mc(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    opts: &McOptions,
) -> Result<Vec<McEstimate>> {
    if opts.trials == 0 {
        return Err(Error::InvalidConfig("trials must be ≥ 1".into()));
    }
    let pilots = pilots_for(config, alloc)?;
    let pinned: Option<Vec<f64>> = opts.tau_matched.then(|| {
        (0..config.k_tags())
            .map(|i| config.tags[i].refl_mag() * incident_power_analytic(config, alloc, i))
            .collect()
    });
    let per_trial: Vec<Vec<f64>> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(opts.master_seed, &[MC_RATE_DOMAIN, t as u64]);
            estimated_rates_trial(
                config,
                alloc,
                &pilots,
                false,
                opts.tau_matched,
                pinned.as_deref(),
                opts.rx_row,
                opts.tx_col,
                &mut rng,
            )
        })
        .collect();
    Ok(summarize_per_tag(&per_trial, config.k_tags()))
}

/// Pilot block implied by an allocation: D = ⌊α/K⌋ symbol periods per tag.
pub(crate) fn pilots_for(config: &SystemConfig, alloc: &ResourceAllocation) -> Result<PilotBlock> {
    let d = (alloc.ce_time / config.k_tags() as f64).floor() as usize;
    if d < config.m_tx {
        return Err(Error::Infeasible(format!(
            "CE slot α = {} gives pilot length D = {d} < M = {}",
            alloc.ce_time, config.m_tx
        )));
    }
    make_pilots(config.m_tx, d, alloc.pilot_power)
}

pub(crate) fn summarize(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n.max(2) - 1) as f64;
    McEstimate {
        mean,
        std_err: (var / n as f64).sqrt(),
        trials: n,
    }
}

/// Column-wise summary of a trials × tags table.
pub(crate) fn summarize_per_tag(per_trial: &[Vec<f64>], k_tags: usize) -> Vec<McEstimate> {
    (0..k_tags)
        .map(|k| {
            let col: Vec<f64> = per_trial.iter().map(|row| row[k]).collect();
            summarize(&col)
        })
        .collect()
}

/// One estimated-CSI trial: CE for every tag, beamform (or transmit
/// isotropically), detect each tag with MRC. Returns log₂(1 + γ_k) per tag.
/// `pinned_reflect` holds the reflect powers fixed (match-analytic mode);
/// otherwise they are recomputed from this realization's incident powers.
#[allow(clippy::too_many_arguments)]
pub(crate) fn estimated_rates_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    pilots: &PilotBlock,
    omni: bool,
    tau_matched: bool,
    pinned_reflect: Option<&[f64]>,
    rx_row: usize,
    tx_col: usize,
    rng: &mut R,
) -> Vec<f64> {
    let k_tags = config.k_tags();
    let mut real = sample_channels(config, rng);
    if tau_matched {
        let tau = config.trunc_threshold;
        for i in 0..k_tags {
            let beta = config.tags[i].path_loss;
            if beta == 0.0 {
                continue;
            }
            while real.forward[(tx_col, i)].norm_sqr() < tau {
                real.forward[(tx_col, i)] = sample_cn(rng, beta);
            }
        }
    }
    let ests: Vec<ChannelEstimate> = (0..k_tags)
        .map(|i| {
            let refl = config.tags[i].reflection;
            let rx = simulate_ce_rx(&real, i, refl, pilots, config.ce_noise_power, rng);
            ls_estimate(&rx, pilots, refl, i).expect("validated reflection")
        })
        .collect();
    let bf = if omni {
        let m = config.m_tx;
        Beamformer {
            steering: Array1::from_elem(m, Complex64::new(1.0 / (m as f64).sqrt(), 0.0)),
        }
    } else {
        match build_beamformer(&ests, &alloc.weights, rx_row) {
            Ok(bf) => bf,
            // zero-norm estimate row: a measure-zero draw, rate 0
            Err(_) => return vec![0.0; k_tags],
        }
    };
    let reflect: Vec<f64> = match pinned_reflect {
        Some(p) => p.to_vec(),
        None => (0..k_tags)
            .map(|i| {
                config.tags[i].refl_mag()
                    * incident_power_instant(&bf, real.forward_col(i), alloc.data_power)
            })
            .collect(),
    };
    let mut est_bwd = Vec::with_capacity(k_tags);
    let mut err = Vec::with_capacity(k_tags);
    for i in 0..k_tags {
        let h_f = real.forward[(tx_col, i)];
        if h_f.norm_sqr() == 0.0 {
            return vec![0.0; k_tags];
        }
        est_bwd.push(ests[i].tx_column(tx_col).mapv(|z| z / h_f));
        err.push(ce_error_variance(
            h_f.norm_sqr(),
            k_tags,
            config.ce_noise_power,
            alloc.ce_time,
            alloc.pilot_power,
            config.tags[i].reflection,
        ));
    }
    (0..k_tags)
        .map(|tag| match mrc_detector(&ests[tag], tx_col) {
            Ok(q) => {
                let gamma =
                    sinr_instant(&q, &est_bwd, &reflect, &err, config.rx_noise_power, tag);
                (1.0 + gamma).log2()
            }
            Err(_) => 0.0,
        })
        .collect()
}

/// One perfect-CSI trial: no CE slot, beamformer from the true forward
/// channels, detectors from the true backward channels, no error terms.
pub(crate) fn perfect_rates_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    weights: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let k_tags = config.k_tags();
    let real = sample_channels(config, rng);
    let mut steering = Array1::zeros(config.m_tx);
    for (i, &zeta) in weights.iter().enumerate() {
        if zeta == 0.0 {
            continue;
        }
        let col = real.forward_col(i);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return vec![0.0; k_tags];
        }
        let scale = zeta.sqrt() / norm;
        for (s, z) in steering.iter_mut().zip(col.iter()) {
            *s += z.conj() * scale;
        }
    }
    let bf = Beamformer { steering };
    let reflect: Vec<f64> = (0..k_tags)
        .map(|i| {
            config.tags[i].refl_mag()
                * incident_power_instant(&bf, real.forward_col(i), config.avg_tx_power)
        })
        .collect();
    let est_bwd: Vec<Array1<Complex64>> =
        (0..k_tags).map(|i| real.backward_row(i).to_owned()).collect();
    let err = vec![0.0; k_tags];
    (0..k_tags)
        .map(|tag| {
            let q_raw = &est_bwd[tag];
            let norm = q_raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let q = q_raw.mapv(|z| z / norm);
            let gamma = sinr_instant(&q, &est_bwd, &reflect, &err, config.rx_noise_power, tag);
            (1.0 + gamma).log2()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Per-tag link report
// ---------------------------------------------------------------------------

/// Everything the analysis knows about one tag under one allocation.
#[derive(Debug, Clone)]
pub struct LinkReport {
    pub tag: usize,
    pub incident_power: f64,
    pub incident_bounds: BoundPair,
    /// η(1−|δ|)·P_I^L, the harvest rate backing the activation constraint.
    pub harvest_rate_lower: f64,
    /// p_k = |δ|·P_I (analytic mean; the Monte Carlo path recomputes the
    /// reflect power per realization, which is why the two rates differ).
    pub reflect_power: f64,
    pub sinr_closed: f64,
    pub sinr_lower: f64,
    pub rate_closed: f64,
    pub rate_lower: f64,
    pub rate_empirical: Option<McEstimate>,
}

impl LinkReport {
    pub fn evaluate(
        config: &SystemConfig,
        alloc: &ResourceAllocation,
        tag: usize,
    ) -> Result<Self> {
        if tag >= config.k_tags() {
            return Err(Error::IndexOutOfRange(format!("tag {tag}")));
        }
        let incident = incident_power_analytic(config, alloc, tag);
        let bounds = incident_power_bounds(config, alloc, tag);
        let profile = &config.tags[tag];
        let closed = RateModel::closed(config, alloc.ce_time, alloc.pilot_power)?;
        let lower = RateModel::lower(config, alloc.ce_time, alloc.pilot_power)?;
        let sinr_closed = closed.sinr(&alloc.weights, tag);
        let sinr_lower = lower.sinr(&alloc.weights, tag);
        Ok(Self {
            tag,
            incident_power: incident,
            incident_bounds: bounds,
            harvest_rate_lower: harvest_rate(bounds.lower, profile.reflection, config.rectifier_eff),
            reflect_power: profile.refl_mag() * incident,
            sinr_closed,
            sinr_lower,
            rate_closed: (1.0 + sinr_closed).log2(),
            rate_lower: (1.0 + sinr_lower).log2(),
            rate_empirical: None,
        })
    }

    /// Attach a Monte Carlo ergodic-rate estimate.
    pub fn with_empirical(mut self, mc: McEstimate) -> Self {
        self.rate_empirical = Some(mc);
        self
    }
}
