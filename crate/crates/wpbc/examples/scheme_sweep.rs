//! A small receive-antenna sweep comparing the three schemes, with the CSV
//! the `wpbc sweep` subcommand would write printed to stdout.
//!
//! Run with: `cargo run --release --example scheme_sweep`

use wpbc::harness::scenario::paper_default;
use wpbc::harness::{render_csv, run_sweep, Scheme, SweepAxis};
use wpbc::optimizer::GridSpec;

fn main() {
    let mut spec = paper_default();
    spec.axis = SweepAxis::RRx;
    spec.values = vec![2.0, 4.0, 8.0];
    spec.schemes = vec![Scheme::PerfectCsi, Scheme::Proposed, Scheme::Omni];
    spec.mc_trials = 4000;
    spec.master_seed = 1;
    spec.grid = GridSpec {
        alpha_points: 8,
        pce_points: 12,
        ..GridSpec::default()
    };

    let rows = run_sweep(&spec).unwrap();
    println!(
        "{:>5} {:>13} {:>10} {:>10} {:>9}",
        "R", "scheme", "min rate", "σ(mc)", "feasible"
    );
    for row in &rows {
        println!(
            "{:>5} {:>13} {:>10.4} {:>10.4} {:>9}",
            row.axis_value,
            row.scheme.name(),
            row.min_rate,
            row.rate_ses.iter().cloned().fold(0.0f64, f64::max),
            row.feasible
        );
    }

    println!("\nCSV:\n{}", render_csv(&rows).unwrap());
}
