//! Backscatter channel estimation: the LS round trip without noise, and
//! the conditional error variance against its analytic law.
//!
//! Run with: `cargo run --release --example ls_estimation`

use num_complex::Complex64;
use wpbc::channel::{make_pilots, sample_channels};
use wpbc::estimation::{ce_error_variance, ls_estimate, simulate_ce_rx};
use wpbc::harness::scenario::paper_default;
use wpbc::seeding::derive_stream;

fn main() {
    let spec = paper_default();
    let cfg = &spec.config;
    let delta = cfg.tags[0].reflection;
    let pilots = make_pilots(cfg.m_tx, 16, 0.5).unwrap();
    let mut rng = derive_stream(7, &[0]);

    // Noiseless round trip: the estimate reproduces the true matrix.
    let real = sample_channels(cfg, &mut rng);
    let rx = simulate_ce_rx(&real, 0, delta, &pilots, 0.0, &mut rng);
    let est = ls_estimate(&rx, &pilots, delta, 0).unwrap();
    let truth = real.backscatter_matrix(0);
    let worst = est
        .bs_estimate
        .iter()
        .zip(truth.iter())
        .map(|(e, t)| (e - t).norm() / t.norm().max(1e-30))
        .fold(0.0f64, f64::max);
    println!("noiseless LS round trip: max relative deviation {worst:.2e}");

    // Conditional error variance: Monte Carlo over CE noise at a pinned
    // backward coefficient.
    let h_b = Complex64::new(3e-3, -2e-3);
    let pinned = wpbc::channel::ChannelRealization {
        forward: real.forward.clone(),
        backward: ndarray::Array2::from_elem((cfg.k_tags(), cfg.r_rx), h_b),
    };
    let trials = 50_000;
    let alpha = (cfg.k_tags() * pilots.seq_len) as f64;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for _ in 0..trials {
        let rx = simulate_ce_rx(&pinned, 0, delta, &pilots, cfg.ce_noise_power, &mut rng);
        let est = ls_estimate(&rx, &pilots, delta, 0).unwrap();
        for m in 0..cfg.m_tx {
            let err = est.bs_estimate[(0, m)] / h_b - pinned.forward[(m, 0)];
            sum_sq += err.norm_sqr();
            count += 1;
        }
    }
    let sample_var = sum_sq / count as f64;
    let analytic = ce_error_variance(
        h_b.norm_sqr(),
        cfg.k_tags(),
        cfg.ce_noise_power,
        alpha,
        pilots.pilot_power,
        delta,
    );
    println!(
        "conditional error variance over {trials} trials: {sample_var:.4e} vs analytic {analytic:.4e} ({:.2}% off)",
        100.0 * (sample_var / analytic - 1.0).abs()
    );
}
