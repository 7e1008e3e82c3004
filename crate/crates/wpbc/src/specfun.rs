//! Special functions behind the analytic link expressions.
//!
//! Everything here is real scalar math: the exponential integral E₁
//! (written `Γ(0,x)` in the energy/rate derivations), its logarithmic
//! envelope, the scaled expectation `φ`, the truncated inverse moment of
//! an exponential variate, and the mean of an inverse chi-square. These
//! are the primitives the closed-form harvest and rate expressions are
//! assembled from.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A lower/upper envelope around a scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    pub fn contains_strict(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Γ(0,x) = E₁(x) = ∫ₓ^∞ u⁻¹e⁻ᵘ du for x > 0.
///
/// Power series below x = 1, modified-Lentz continued fraction above;
/// relative error stays below 1e-12 across [1e-8, 700].
pub fn gamma0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma0 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * e1_cf_scaled(x))
    }
}

/// eˣ · Γ(0,x), stable for arbitrarily large x (the plain value underflows
/// past x ≈ 745 while the scaled product stays O(1/x)).
pub fn gamma0_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "gamma0_scaled requires x > 0, got {x}"
        )));
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_cf_scaled(x))
    }
}

/// Logarithmic envelope of Γ(0,x):
/// ½e⁻ˣln(1 + 2/x) < Γ(0,x) < e⁻ˣln(1 + 1/x) for all x > 0.
pub fn gamma0_bounds(x: f64) -> Result<BoundPair> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "gamma0_bounds requires x > 0, got {x}"
        )));
    }
    let lower = 0.5 * (-x).exp() * (2.0 / x).ln_1p();
    let upper = (-x).exp() * (1.0 / x).ln_1p();
    // ln(1+2/x) < 2·ln(1+1/x) holds for every x > 0, so the order is fixed.
    debug_assert!(lower < upper);
    Ok(BoundPair { lower, upper })
}

/// φ = c·eᶜ·Γ(0,c) for the channel-estimation quality parameter
/// c = Kσ²/(β²·α·p_ce·|δ|).
///
/// φ ∈ (0,1): it is the residual fraction of array gain lost to estimation
/// noise — 0 under perfect estimation, 1 when the estimate is pure noise.
pub fn phi(
    beta: f64,
    alpha: f64,
    pilot_power: f64,
    refl_mag: f64,
    k_tags: usize,
    ce_noise_power: f64,
) -> f64 {
    debug_assert!(beta > 0.0 && alpha > 0.0 && pilot_power > 0.0 && refl_mag > 0.0);
    let c = k_tags as f64 * ce_noise_power / (beta * beta * alpha * pilot_power * refl_mag);
    phi_from_c(c)
}

/// φ as a function of c directly.
pub fn phi_from_c(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if c > 700.0 {
        // Asymptotic expansion of c·eᶜ·E₁(c); eᶜ alone would overflow.
        let inv = 1.0 / c;
        let mut acc = 0.0;
        let mut term = 1.0;
        for k in 0..=8 {
            acc += term;
            term *= -(k as f64 + 1.0) * inv;
        }
        return acc;
    }
    if c <= 1.0 {
        c * c.exp() * e1_series(c)
    } else {
        c * e1_cf_scaled(c)
    }
}

/// E{1/|h|² ; |h|² ≥ τ} = Γ(0, τ/β)/β for |h|² exponential with mean β.
///
/// The truncation keeps the moment finite; the expectation is restricted
/// (not renormalized), matching its use in the rate denominators.
pub fn truncated_inverse_moment(beta: f64, tau: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "truncated_inverse_moment requires beta > 0, got {beta}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::Domain(format!(
            "truncated_inverse_moment requires tau > 0, got {tau}"
        )));
    }
    Ok(gamma0(tau / beta)? / beta)
}

/// E{1/Z} = 1/(2(R−1)) for Z ~ χ²(2R); undefined below R = 2.
pub fn inv_chisquare_mean(r_rx: usize) -> Result<f64> {
    if r_rx < 2 {
        return Err(Error::Domain(format!(
            "inverse chi-square mean diverges for R < 2, got R = {r_rx}"
        )));
    }
    Ok(1.0 / (2.0 * (r_rx as f64 - 1.0)))
}

/// Convergent series E₁(x) = −γ − ln x + Σ (−1)^{k+1} xᵏ/(k·k!), x ≤ 1.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0; // xᵏ/k! carried without the sign
    for k in 1..=40u32 {
        pow *= x / f64::from(k);
        let term = pow / f64::from(k);
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        if term < 1e-17 * sum.abs().max(1.0) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Modified Lentz evaluation of eˣ·E₁(x) via the standard continued
/// fraction; accurate for x ≥ 1.
fn e1_cf_scaled(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=300u32 {
        let a = -f64::from(i) * f64::from(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values computed with mpmath at 30 digits.
    #[test]
    fn gamma0_reference_values() {
        assert_relative_eq!(gamma0(1e-8).unwrap(), 17.843465089050833, max_relative = 1e-13);
        assert_relative_eq!(gamma0(1e-6).unwrap(), 13.23829589306249, max_relative = 1e-13);
        assert_relative_eq!(gamma0(0.01).unwrap(), 4.037929576538114, max_relative = 1e-13);
        assert_relative_eq!(gamma0(0.5).unwrap(), 0.5597735947761608, max_relative = 1e-13);
        assert_relative_eq!(gamma0(1.0).unwrap(), 0.21938393439552027, max_relative = 1e-13);
        assert_relative_eq!(gamma0(2.5).unwrap(), 0.024914917870269735, max_relative = 1e-13);
        assert_relative_eq!(gamma0(10.0).unwrap(), 4.156968929685324e-6, max_relative = 1e-13);
        assert_relative_eq!(gamma0(100.0).unwrap(), 3.683597761682032e-46, max_relative = 1e-13);
        assert_relative_eq!(gamma0(700.0).unwrap(), 1.4065187662340329e-307, max_relative = 1e-12);
    }

    #[test]
    fn gamma0_x50_inside_envelope() {
        let v = gamma0(50.0).unwrap();
        let lo = 0.5 * (-50.0f64).exp() * 1.04f64.ln();
        let hi = (-50.0f64).exp() * 1.02f64.ln();
        assert!(lo < v && v < hi, "{lo} < {v} < {hi}");
    }

    #[test]
    fn gamma0_rejects_nonpositive() {
        assert!(gamma0(0.0).is_err());
        assert!(gamma0(-1.0).is_err());
        assert!(gamma0_bounds(0.0).is_err());
    }

    #[test]
    fn bounds_at_one_match_formula() {
        let b = gamma0_bounds(1.0).unwrap();
        assert_relative_eq!(b.lower, 0.5 * (-1.0f64).exp() * 3.0f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(b.upper, (-1.0f64).exp() * 2.0f64.ln(), max_relative = 1e-15);
        assert!(b.contains_strict(gamma0(1.0).unwrap()));
    }

    #[test]
    fn bounds_bracket_on_log_grid() {
        for i in 0..=200 {
            let x = 10f64.powf(-6.0 + 7.7 * i as f64 / 200.0); // 1e-6 ..= ~50
            let v = gamma0(x).unwrap();
            let b = gamma0_bounds(x).unwrap();
            assert!(b.lower < v && v < b.upper, "x={x}: {} < {v} < {}", b.lower, b.upper);
        }
    }

    #[test]
    fn derivative_identity() {
        // d/dx E₁(x) = −e⁻ˣ/x, central finite differences.
        for &x in &[0.03, 0.3, 0.9, 1.5, 3.0, 8.0, 20.0] {
            let h = x * 1e-5;
            let num = (gamma0(x + h).unwrap() - gamma0(x - h).unwrap()) / (2.0 * h);
            let exact = -(-x).exp() / x;
            assert_relative_eq!(num, exact, max_relative = 1e-6);
        }
    }

    #[test]
    fn scaled_agrees_with_plain() {
        for &x in &[0.1, 0.99, 1.0, 1.01, 5.0, 50.0, 300.0] {
            let scaled = gamma0_scaled(x).unwrap();
            let plain = gamma0(x).unwrap();
            assert_relative_eq!(scaled, x.exp() * plain, max_relative = 1e-11);
        }
    }

    #[test]
    fn phi_reference_values() {
        assert_relative_eq!(phi_from_c(1.0), 0.5963473623231941, max_relative = 1e-12);
        assert_relative_eq!(phi_from_c(0.1), 0.20146425447084517, max_relative = 1e-12);
        assert_relative_eq!(phi_from_c(10.0), 0.9156333393978808, max_relative = 1e-12);
        assert_relative_eq!(phi_from_c(1000.0), 0.9990019940238807, max_relative = 1e-12);
    }

    #[test]
    fn phi_limits_and_range() {
        assert_eq!(phi_from_c(0.0), 0.0);
        assert!(phi_from_c(1e-12) < 1e-10);
        assert!(phi_from_c(1e9) < 1.0);
        assert!(phi_from_c(1e9) > 1.0 - 1e-8);
        let mut prev = 0.0;
        for i in 0..=120 {
            let c = 10f64.powf(-6.0 + 12.0 * i as f64 / 120.0);
            let p = phi_from_c(c);
            assert!(p > 0.0 && p < 1.0, "phi({c}) = {p} outside (0,1)");
            assert!(p > prev, "phi not increasing at c={c}");
            prev = p;
        }
    }

    #[test]
    fn phi_asymptotic_matches_cf_at_split() {
        // Continuity across the c = 700 switch to the asymptotic series
        // (dφ/dc ≈ 1/c² there, so a 2e-7 gap moves φ by only ~4e-13).
        let below = phi_from_c(700.0 - 1e-7);
        let above = phi_from_c(700.0 + 1e-7);
        assert_relative_eq!(below, above, max_relative = 1e-11);
    }

    #[test]
    fn phi_monotone_in_each_argument() {
        let base = phi(1.0, 20.0, 0.5, 0.5, 2, 1e-3);
        assert!(phi(1.0, 20.0, 0.5, 0.5, 4, 1e-3) > base); // K up
        assert!(phi(1.0, 20.0, 0.5, 0.5, 2, 2e-3) > base); // σ² up
        assert!(phi(2.0, 20.0, 0.5, 0.5, 2, 1e-3) < base); // β up
        assert!(phi(1.0, 40.0, 0.5, 0.5, 2, 1e-3) < base); // α up
        assert!(phi(1.0, 20.0, 1.0, 0.5, 2, 1e-3) < base); // p_ce up
        assert!(phi(1.0, 20.0, 0.5, 0.9, 2, 1e-3) < base); // |δ| up
    }

    #[test]
    fn truncated_inverse_moment_values() {
        assert_relative_eq!(
            truncated_inverse_moment(1.0, 1.0).unwrap(),
            0.21938393439552027,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            truncated_inverse_moment(2.0, 2.0).unwrap(),
            0.10969196719776014,
            max_relative = 1e-12
        );
        // decreasing in τ
        let a = truncated_inverse_moment(1.0, 0.5).unwrap();
        let b = truncated_inverse_moment(1.0, 1.5).unwrap();
        assert!(a > b);
        assert!(truncated_inverse_moment(0.0, 1.0).is_err());
        assert!(truncated_inverse_moment(1.0, 0.0).is_err());
    }

    #[test]
    fn inv_chisquare_mean_values() {
        assert_eq!(inv_chisquare_mean(2).unwrap(), 0.5);
        assert_eq!(inv_chisquare_mean(3).unwrap(), 0.25);
        assert_eq!(inv_chisquare_mean(11).unwrap(), 0.05);
        assert!(inv_chisquare_mean(1).is_err());
        assert!(inv_chisquare_mean(0).is_err());
    }
}
