//! The scalar machinery behind the closed forms: Γ(0,x) inside its
//! logarithmic envelope, and the estimation-quality factor φ.
//!
//! Run with: `cargo run --release --example special_functions`

use wpbc::specfun::{gamma0, gamma0_bounds, inv_chisquare_mean, phi_from_c, truncated_inverse_moment};

fn main() {
    println!("{:>10}  {:>12}  {:>12}  {:>12}", "x", "lower", "Γ(0,x)", "upper");
    for &x in &[0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let v = gamma0(x).unwrap();
        let b = gamma0_bounds(x).unwrap();
        println!("{x:>10.2}  {:>12.5e}  {v:>12.5e}  {:>12.5e}", b.lower, b.upper);
    }

    println!("\nφ(c) = c·eᶜ·Γ(0,c), the array-gain fraction lost to estimation noise:");
    for &c in &[1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e4] {
        println!("  c = {c:>8.0e}: φ = {:.6}", phi_from_c(c));
    }

    println!("\ntruncated inverse moments E{{1/|h|²; |h|² ≥ τ}} = Γ(0, τ/β)/β:");
    for &(beta, tau) in &[(1.0, 0.01), (1.0, 1.0), (2e-5, 2e-7)] {
        println!(
            "  β = {beta:.1e}, τ = {tau:.1e}: {:.5e}",
            truncated_inverse_moment(beta, tau).unwrap()
        );
    }

    println!("\ninverse chi-square means 1/(2(R−1)):");
    for &r in &[2usize, 4, 8, 16] {
        println!("  R = {r:>2}: {:.5}", inv_chisquare_mean(r).unwrap());
    }
}
