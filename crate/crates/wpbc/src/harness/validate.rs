//! Self-contained oracle and invariant checks behind `wpbc validate`:
//! each check prints one PASS/FAIL line and the command exits nonzero on
//! any failure. These are quick diagnostics; the full acceptance suite
//! lives in the crate's integration tests.

use ndarray::Array2;
use num_complex::Complex64;

use crate::channel::{make_pilots, sample_channels, sample_cn};
use crate::config::{SystemConfig, TagProfile};
use crate::detection::{ergodic_rates_mc, rate_closed_form, rate_lower_bound, McOptions};
use crate::energy::{
    build_beamformer, incident_power_analytic, incident_power_bounds, incident_power_instant,
    ResourceAllocation,
};
use crate::estimation::{ce_error_variance, ls_estimate, simulate_ce_rx};
use crate::harness::scenario::paper_default;
use crate::harness::{render_csv, run_sweep, Scheme};
use crate::optimizer::GridSpec;
use crate::seeding::derive_stream;
use crate::specfun::{gamma0, gamma0_bounds};

/// Result of one named validation check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Self { name, pass, detail }
    }
}

/// Run every check. `trials` scales the Monte Carlo sample sizes.
pub fn run_validation(trials: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_gamma_envelope(),
        check_gamma_derivative(),
        check_pilot_orthonormality(),
        check_ls_error_variance(trials, seed),
        check_incident_power(trials, seed),
        check_inverse_chisquare(trials.max(100_000), seed),
        check_jensen(trials, seed),
        check_rate_bound_chain(),
        check_sweep_determinism(seed),
    ]
}

fn check_gamma_envelope() -> CheckOutcome {
    let mut worst = f64::INFINITY;
    for i in 0..=200 {
        let x = 10f64.powf(-6.0 + 7.7 * i as f64 / 200.0);
        let v = gamma0(x).expect("x > 0");
        let b = gamma0_bounds(x).expect("x > 0");
        if !(b.lower < v && v < b.upper) {
            return CheckOutcome::new(
                "gamma0-envelope",
                false,
                format!("bracket violated at x = {x}"),
            );
        }
        worst = worst.min((v - b.lower).min(b.upper - v) / v);
    }
    CheckOutcome::new(
        "gamma0-envelope",
        true,
        format!("strict on 201 log points, min margin {worst:.2e} rel"),
    )
}

fn check_gamma_derivative() -> CheckOutcome {
    let mut worst = 0.0f64;
    for &x in &[0.05, 0.4, 1.2, 4.0, 15.0] {
        let h = x * 1e-5;
        let num = (gamma0(x + h).unwrap() - gamma0(x - h).unwrap()) / (2.0 * h);
        let exact = -(-x).exp() / x;
        worst = worst.max(((num - exact) / exact).abs());
    }
    CheckOutcome::new(
        "gamma0-derivative",
        worst < 1e-6,
        format!("max finite-difference error {worst:.2e} rel"),
    )
}

fn check_pilot_orthonormality() -> CheckOutcome {
    let mut worst = 0.0f64;
    for m in 1..=6 {
        for d in m..=m + 4 {
            let block = make_pilots(m, d, 0.7).unwrap();
            let gram = block.pilots.t().mapv(|z| z.conj()).dot(&block.pilots);
            let scale = d as f64 * 0.7;
            for i in 0..m {
                for j in 0..m {
                    let want = if i == j { scale } else { 0.0 };
                    worst = worst.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm() / scale);
                }
            }
        }
    }
    CheckOutcome::new(
        "pilot-orthonormality",
        worst < 1e-10,
        format!("max Gram deviation {worst:.2e} rel over M ∈ 1..6"),
    )
}

fn check_ls_error_variance(trials: usize, seed: u64) -> CheckOutcome {
    // Fixed backward coefficient, Monte Carlo over CE noise; the scaled
    // forward-estimate error variance must match Kσ²/(|h|²αp_ce|δ|).
    let k_tags = 2usize;
    let m = 2usize;
    let d = 10usize;
    let alpha = (k_tags * d) as f64;
    let p_ce = 0.5;
    let sigma_sq = 1e-12;
    let delta = Complex64::new(0.3, 0.4);
    let h_b = Complex64::new(3e-3, -2e-3);
    let h_f = [Complex64::new(4e-3, 1e-3), Complex64::new(-2e-3, 3e-3)];
    let pilots = make_pilots(m, d, p_ce).unwrap();
    let mut rng = derive_stream(seed, &[101]);
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    let real = crate::channel::ChannelRealization {
        forward: Array2::from_shape_fn((m, 1), |(i, _)| h_f[i]),
        backward: Array2::from_shape_fn((1, 1), |_| h_b),
    };
    for _ in 0..trials {
        let rx = simulate_ce_rx(&real, 0, delta, &pilots, sigma_sq, &mut rng);
        let est = ls_estimate(&rx, &pilots, delta, 0).unwrap();
        for i in 0..m {
            let err = est.bs_estimate[(0, i)] / h_b - h_f[i];
            sum_sq += err.norm_sqr();
            count += 1;
        }
    }
    let got = sum_sq / count as f64;
    let want = ce_error_variance(h_b.norm_sqr(), k_tags, sigma_sq, alpha, p_ce, delta);
    let se = want / (count as f64).sqrt();
    let pass = (got - want).abs() < 3.0 * se;
    CheckOutcome::new(
        "ls-error-variance",
        pass,
        format!("MC {got:.4e} vs analytic {want:.4e} (3σ = {:.1e})", 3.0 * se),
    )
}

fn check_incident_power(trials: usize, seed: u64) -> CheckOutcome {
    let tags = vec![
        TagProfile::new(1.0, Complex64::new(0.5, 0.0)),
        TagProfile::new(1.0, Complex64::new(0.5, 0.0)),
    ];
    let config = SystemConfig {
        m_tx: 8,
        r_rx: 2,
        block_len: 200,
        avg_tx_power: 1.0,
        ce_noise_power: 1.0,
        rx_noise_power: 1e-9,
        tag_noise_power: 1e-9,
        rectifier_eff: 0.65,
        circuit_power: 1e-9,
        trunc_threshold: 0.01,
        tags,
    };
    // c′ = β²αp_ce|δ|/(Kσ²) = 1 at αp_ce = 4
    let alloc = ResourceAllocation {
        weights: vec![0.5, 0.5],
        ce_time: 16.0,
        pilot_power: 0.25,
        data_power: 1.0,
    };
    let pilots = make_pilots(config.m_tx, 8, alloc.pilot_power).unwrap();
    let mut rng = derive_stream(seed, &[202]);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let real = sample_channels(&config, &mut rng);
        let ests: Vec<_> = (0..2)
            .map(|i| {
                let rx = simulate_ce_rx(
                    &real,
                    i,
                    config.tags[i].reflection,
                    &pilots,
                    config.ce_noise_power,
                    &mut rng,
                );
                ls_estimate(&rx, &pilots, config.tags[i].reflection, i).unwrap()
            })
            .collect();
        let bf = build_beamformer(&ests, &alloc.weights, 0).unwrap();
        let v = incident_power_instant(&bf, real.forward_col(0), alloc.data_power);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / trials as f64;
    let se = ((sum_sq / trials as f64 - mean * mean) / trials as f64).sqrt();
    let want = incident_power_analytic(&config, &alloc, 0);
    let bounds = incident_power_bounds(&config, &alloc, 0);
    let pass =
        (mean - want).abs() < 3.0 * se && bounds.lower < want && want < bounds.upper;
    CheckOutcome::new(
        "incident-power-mc",
        pass,
        format!(
            "MC {mean:.4} vs analytic {want:.4} (3σ = {:.1e}), envelope ({:.4}, {:.4})",
            3.0 * se,
            bounds.lower,
            bounds.upper
        ),
    )
}

fn check_inverse_chisquare(trials: usize, seed: u64) -> CheckOutcome {
    let r = 5usize;
    let mut rng = derive_stream(seed, &[303]);
    let mut sum = 0.0;
    for _ in 0..trials {
        let z: f64 = (0..r)
            .map(|_| sample_cn(&mut rng, 2.0).norm_sqr())
            .sum();
        sum += 1.0 / z;
    }
    let got = sum / trials as f64;
    let want = 1.0 / (2.0 * (r as f64 - 1.0));
    let rel = ((got - want) / want).abs();
    CheckOutcome::new(
        "inverse-chisquare",
        rel < 0.01,
        format!("sampled {got:.5} vs 1/(2(R−1)) = {want:.5} ({rel:.2e} rel)"),
    )
}

fn check_jensen(trials: usize, seed: u64) -> CheckOutcome {
    let mut spec = paper_default();
    spec.config.m_tx = 4;
    spec.config.r_rx = 4;
    let alloc = ResourceAllocation::new(vec![0.5, 0.5], 16.0, 0.5, &spec.config).unwrap();
    let opts = McOptions {
        trials,
        master_seed: seed,
        tau_matched: true,
        ..Default::default()
    };
    let mc = ergodic_rates_mc(&spec.config, &alloc, &opts).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for tag in 0..2 {
        let closed = rate_closed_form(&spec.config, &alloc, tag).unwrap();
        let lower = rate_lower_bound(&spec.config, &alloc, tag).unwrap();
        if mc[tag].mean < closed - 3.0 * mc[tag].std_err || lower > closed {
            pass = false;
        }
        detail.push_str(&format!(
            "tag{tag}: mc {:.3} ≥ closed {:.3} ≥ lower {:.3}; ",
            mc[tag].mean, closed, lower
        ));
    }
    CheckOutcome::new("jensen-rate-chain", pass, detail)
}

fn check_rate_bound_chain() -> CheckOutcome {
    let spec = paper_default();
    let mut worst = f64::INFINITY;
    for ai in 0..10 {
        let alpha = (16 + 18 * ai) as f64;
        for pi in 0..10 {
            let p_ce = 0.02 * 1.8f64.powi(pi);
            if alpha * p_ce >= 200.0 {
                continue;
            }
            let alloc =
                ResourceAllocation::new(vec![0.5, 0.5], alpha, p_ce, &spec.config).unwrap();
            for tag in 0..2 {
                let lo = rate_lower_bound(&spec.config, &alloc, tag).unwrap();
                let hi = rate_closed_form(&spec.config, &alloc, tag).unwrap();
                if lo > hi {
                    return CheckOutcome::new(
                        "rate-bound-chain",
                        false,
                        format!("violated at α={alpha}, p_ce={p_ce}, tag={tag}"),
                    );
                }
                worst = worst.min(hi - lo);
            }
        }
    }
    CheckOutcome::new(
        "rate-bound-chain",
        true,
        format!("lower ≤ closed on the grid, min gap {worst:.2e} bits"),
    )
}

fn check_sweep_determinism(seed: u64) -> CheckOutcome {
    let mut spec = paper_default();
    spec.values = vec![4.0];
    spec.schemes = vec![Scheme::Proposed];
    spec.mc_trials = 500;
    spec.master_seed = seed;
    spec.grid = GridSpec {
        alpha_points: 4,
        pce_points: 5,
        refine: false,
        ..GridSpec::default()
    };
    let a = render_csv(&run_sweep(&spec).unwrap()).unwrap();
    let b = render_csv(&run_sweep(&spec).unwrap()).unwrap();
    CheckOutcome::new(
        "sweep-determinism",
        a == b,
        format!("{} CSV bytes, repeated run identical: {}", a.len(), a == b),
    )
}
