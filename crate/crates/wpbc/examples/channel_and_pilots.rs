//! Channel synthesis basics: the long-term fading model, one Rayleigh
//! draw's empirical moments, and pilot-block orthogonality.
//!
//! Run with: `cargo run --release --example channel_and_pilots`

use wpbc::channel::{make_pilots, path_loss_from_distance, sample_channels};
use wpbc::harness::scenario::paper_default;
use wpbc::seeding::derive_stream;

fn main() {
    for d in [2.0, 4.0, 6.0, 10.0] {
        let beta = path_loss_from_distance(d).unwrap();
        println!("path loss at {d:>4} m: β = {beta:.4e}");
    }

    let spec = paper_default();
    let mut rng = derive_stream(42, &[0]);
    let mut sum_sq = vec![0.0f64; spec.config.k_tags()];
    let n_draws = 20_000;
    for _ in 0..n_draws {
        let real = sample_channels(&spec.config, &mut rng);
        for k in 0..spec.config.k_tags() {
            sum_sq[k] += real.forward[(0, k)].norm_sqr();
        }
    }
    println!("\nempirical E|h|² over {n_draws} draws (target β):");
    for (k, tag) in spec.config.tags.iter().enumerate() {
        println!(
            "  tag {k}: {:.4e} vs β = {:.4e}",
            sum_sq[k] / n_draws as f64,
            tag.path_loss
        );
    }

    let pilots = make_pilots(4, 8, 0.5).unwrap();
    let gram = pilots.pilots.t().mapv(|z| z.conj()).dot(&pilots.pilots);
    println!("\npilot Gram matrix (D = 8, M = 4, p_ce = 0.5; target 4·I):");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:6.3}", gram[(i, j)].re)).collect();
        println!("  [{}]", row.join(" "));
    }
}
