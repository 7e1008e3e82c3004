//! Cross-module Monte Carlo validation: the SINR-denominator decomposition
//! against its closed-form bracket, and the full-array beamforming gain
//! under perfect CSI.

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use wpbc::channel::{make_pilots, sample_channels, sample_cn};
use wpbc::config::{SystemConfig, TagProfile};
use wpbc::detection::{mrc_detector, sinr_instant};
use wpbc::energy::{incident_power_analytic, incident_power_instant, Beamformer, ResourceAllocation};
use wpbc::estimation::{ce_error_variance, ls_estimate, simulate_ce_rx};
use wpbc::harness::scenario::paper_default;
use wpbc::seeding::derive_stream;
use wpbc::specfun::truncated_inverse_moment;

/// The expected denominator of the closed-form SINR decomposes per tag into
/// interference, estimation-error, and noise pieces. Check the Monte Carlo
/// mean of the instantaneous denominator against that bracket, with fixed
/// reflect powers and truncated forward draws.
#[test]
fn denominator_decomposition_matches_bracket() {
    let spec = paper_default();
    let cfg = &spec.config;
    let alloc = ResourceAllocation::new(vec![0.5, 0.5], 32.0, 0.5, cfg).unwrap();
    let tau = cfg.trunc_threshold;
    let k_tags = cfg.k_tags();
    let tag = 0usize;
    let tx_col = 0usize;

    let reflect: Vec<f64> = (0..k_tags)
        .map(|i| cfg.tags[i].refl_mag() * incident_power_analytic(cfg, &alloc, i))
        .collect();
    let d = (alloc.ce_time as usize) / k_tags;
    let pilots = make_pilots(cfg.m_tx, d, alloc.pilot_power).unwrap();

    let trials = 200_000usize;
    let sums: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(97, &[t as u64]);
            let mut real = sample_channels(cfg, &mut rng);
            for i in 0..k_tags {
                while real.forward[(tx_col, i)].norm_sqr() < tau {
                    real.forward[(tx_col, i)] = sample_cn(&mut rng, cfg.tags[i].path_loss);
                }
            }
            let ests: Vec<_> = (0..k_tags)
                .map(|i| {
                    let rx = simulate_ce_rx(
                        &real,
                        i,
                        cfg.tags[i].reflection,
                        &pilots,
                        cfg.ce_noise_power,
                        &mut rng,
                    );
                    ls_estimate(&rx, &pilots, cfg.tags[i].reflection, i).unwrap()
                })
                .collect();
            let q = mrc_detector(&ests[tag], tx_col).unwrap();
            let mut den = cfg.rx_noise_power;
            for i in 0..k_tags {
                let h_f = real.forward[(tx_col, i)];
                let est_bwd = ests[i].tx_column(tx_col).mapv(|z| z / h_f);
                if i != tag {
                    let dot: Complex64 = q
                        .iter()
                        .zip(est_bwd.iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    den += reflect[i] * dot.norm_sqr();
                }
                den += reflect[i]
                    * ce_error_variance(
                        h_f.norm_sqr(),
                        k_tags,
                        cfg.ce_noise_power,
                        alloc.ce_time,
                        alloc.pilot_power,
                        cfg.tags[i].reflection,
                    );
            }
            (den, den * den)
        })
        .collect();
    let n = trials as f64;
    let (sum, sum_sq) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean).max(0.0) / n).sqrt();

    let t_terms: Vec<f64> = (0..k_tags)
        .map(|i| {
            cfg.k_tags() as f64 * cfg.ce_noise_power
                / (alloc.ce_time * alloc.pilot_power * cfg.tags[i].refl_mag())
                * truncated_inverse_moment(cfg.tags[i].path_loss, tau).unwrap()
        })
        .collect();
    let mut bracket = cfg.rx_noise_power;
    for i in 0..k_tags {
        if i != tag {
            bracket += reflect[i] * (cfg.tags[i].path_loss + t_terms[i]);
        }
        bracket += reflect[i] * t_terms[i];
    }
    assert!(
        (mean - bracket).abs() <= 3.0 * se,
        "MC denominator {mean:.6e} vs bracket {bracket:.6e} (3σ = {:.2e})",
        3.0 * se
    );
}

/// With perfect forward CSI and a single tag, MRT attains the full array
/// gain: the expected incident power is w·β·M.
#[test]
fn perfect_csi_full_array_gain() {
    for &m in &[4usize, 16] {
        let beta = 3e-5;
        let tags = vec![TagProfile::new(beta, Complex64::new(0.3, 0.4))];
        let cfg = SystemConfig {
            m_tx: m,
            r_rx: 2,
            block_len: 200,
            avg_tx_power: 1.0,
            ce_noise_power: 1e-12,
            rx_noise_power: 1e-9,
            tag_noise_power: 1e-12,
            rectifier_eff: 0.65,
            circuit_power: 1e-9,
            trunc_threshold: 0.01 * beta,
            tags,
        };
        let trials = 100_000usize;
        let vals: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = derive_stream(55 + m as u64, &[t as u64]);
                let real = sample_channels(&cfg, &mut rng);
                let col = real.forward_col(0);
                let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let bf = Beamformer {
                    steering: col.mapv(|z| z.conj() / norm),
                };
                incident_power_instant(&bf, real.forward_col(0), cfg.avg_tx_power)
            })
            .collect();
        let n = trials as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let want = cfg.avg_tx_power * beta * m as f64;
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "M={m}: MC {mean:.6e} vs wβM {want:.6e} (3σ = {:.2e})",
            3.0 * se
        );
    }
}

/// Direct quadrature of ∫_τ^∞ (1/(βx))e^(−x/β) dx against the closed form
/// Γ(0, τ/β)/β. Substituting x = τ·eᵗ turns the integrand into
/// (1/β)·e^(−τeᵗ/β), smooth over a finite window.
#[test]
fn truncated_inverse_moment_matches_quadrature() {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }
    for &(beta, tau) in &[(1.0f64, 0.5f64), (2e-5, 2e-7), (0.3, 1.2)] {
        let t_max = (745.0 * beta / tau).ln();
        let integrand = |t: f64| (1.0 / beta) * (-tau * t.exp() / beta).exp();
        let quad = simpson(&integrand, 0.0, t_max, 400_000);
        let closed = truncated_inverse_moment(beta, tau).unwrap();
        assert!(
            ((quad - closed) / closed).abs() <= 1e-9,
            "β={beta} τ={tau}: quadrature {quad:.12e} vs closed {closed:.12e}"
        );
    }
}

/// The q_k-orthogonal projection of the detector keeps the SINR invariant
/// under a common phase; cheap end-to-end smoke of the detection chain on
/// real draws rather than synthetic vectors.
#[test]
fn detection_chain_phase_invariance_on_real_draws() {
    let spec = paper_default();
    let cfg = &spec.config;
    let alloc = ResourceAllocation::new(vec![0.5, 0.5], 32.0, 0.5, cfg).unwrap();
    let d = (alloc.ce_time as usize) / cfg.k_tags();
    let pilots = make_pilots(cfg.m_tx, d, alloc.pilot_power).unwrap();
    let mut rng = derive_stream(123, &[0]);
    let real = sample_channels(cfg, &mut rng);
    let ests: Vec<_> = (0..cfg.k_tags())
        .map(|i| {
            let rx = simulate_ce_rx(
                &real,
                i,
                cfg.tags[i].reflection,
                &pilots,
                cfg.ce_noise_power,
                &mut rng,
            );
            ls_estimate(&rx, &pilots, cfg.tags[i].reflection, i).unwrap()
        })
        .collect();
    let q = mrc_detector(&ests[0], 0).unwrap();
    let est_bwd: Vec<Array1<Complex64>> = (0..cfg.k_tags())
        .map(|i| {
            let h_f = real.forward[(0, i)];
            ests[i].tx_column(0).mapv(|z| z / h_f)
        })
        .collect();
    let reflect = vec![1e-5, 2e-5];
    let errs = vec![1e-7, 2e-7];
    let base = sinr_instant(&q, &est_bwd, &reflect, &errs, cfg.rx_noise_power, 0);
    let rotated = q.mapv(|z| z * Complex64::from_polar(1.0, 0.777));
    let turned = sinr_instant(&rotated, &est_bwd, &reflect, &errs, cfg.rx_noise_power, 0);
    assert!((base - turned).abs() <= 1e-12 * base);
}
