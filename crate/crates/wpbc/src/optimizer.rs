//! Resource allocation: the max-min achievable-rate solver over
//! (ζ, α, p_ce) under per-tag activation constraints, the max-min
//! harvested-energy baseline, and the omnidirectional reference.

use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::detection::{Affine, RateModel};
use crate::energy::{derive_data_power, ResourceAllocation};
use crate::error::{Error, Result};

/// Search resolution for the outer (α, p_ce) grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Points on the CE-length axis (integer multiples of K within [K·M, T−1]).
    pub alpha_points: usize,
    /// Points on the logarithmic pilot-power axis.
    pub pce_points: usize,
    /// Lower end of the pilot-power grid as a fraction of w.
    pub pce_min_frac: f64,
    /// Upper end of the pilot-power grid as a fraction of w.
    pub pce_max_frac: f64,
    /// Re-grid once around the coarse optimum at 4× local density.
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            alpha_points: 16,
            pce_points: 32,
            pce_min_frac: 0.01,
            pce_max_frac: 50.0,
            refine: true,
        }
    }
}

/// Outcome of an allocation search.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub allocation: ResourceAllocation,
    /// Fully-bounded per-tag net rates (1 − α/T)·R̃_L at the allocation.
    pub per_tag_rates: Vec<f64>,
    /// Per-tag lower-envelope harvest rates at the chosen allocation
    /// (instantaneous, the quantity the activation constraint checks).
    pub per_tag_energy: Vec<f64>,
    /// min over tags of the scheme's net objective (rate or energy).
    pub objective: f64,
    pub feasible: bool,
    /// Outer grid points examined.
    pub grid_points: usize,
    /// Inner-solver iterations summed over the search.
    pub iterations: usize,
}

/// Weights and achieved floor returned by the inner equal-rate solver.
/// Rates are net throughputs: the per-use bounded rate scaled by the data
/// slot's share (1 − α/T) of the block. Without that factor the search
/// degenerates to α → T−1, cramming the block's energy into a sliver data
/// slot — an allocation that "beats" even perfect CSI on paper while
/// transmitting almost nothing.
#[derive(Debug, Clone)]
pub struct EqualRateSolution {
    pub weights: Vec<f64>,
    pub min_rate: f64,
    pub rates: Vec<f64>,
    pub energies: Vec<f64>,
    /// False when the activation constraints cannot all be met at this
    /// (α, p_ce); the weights then equalize harvest for violation reporting.
    pub feasible: bool,
    pub iterations: usize,
}

/// Fraction of the block left for data after the CE slot.
pub(crate) fn net_factor(config: &SystemConfig, alpha: f64) -> f64 {
    1.0 - alpha / config.block_len as f64
}

/// Harvest rate as an affine function of each tag's own weight, derived
/// from the model's signal-power envelope.
fn energy_affines(config: &SystemConfig, model: &RateModel) -> Vec<Affine> {
    config
        .tags
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let s = model.signal_power_affine(k);
            let f = config.rectifier_eff * (1.0 - t.refl_mag());
            Affine {
                c0: f * s.c0,
                c1: f * s.c1,
            }
        })
        .collect()
}

/// Smallest weights satisfying every activation constraint, or None when a
/// tag cannot reach ρ even at full weight.
fn energy_floors(config: &SystemConfig, energies: &[Affine]) -> Option<Vec<f64>> {
    let rho = config.circuit_power;
    let mut floors = Vec::with_capacity(energies.len());
    for e in energies {
        if e.at(1.0) < rho {
            return None;
        }
        let f = if e.c1 > 0.0 {
            ((rho - e.c0) / e.c1).max(0.0)
        } else {
            0.0
        };
        floors.push(f);
    }
    (floors.iter().sum::<f64>() <= 1.0).then_some(floors)
}

/// Equalize the fully-bounded rates across tags at a fixed (α, p_ce):
/// bisection on a common rate target, with each tag's minimal weight found
/// in closed form and the coupled floors iterated to their least fixed
/// point. Weights are rescaled to sum exactly to 1.
pub fn equal_rate_weights(config: &SystemConfig, alpha: f64, p_ce: f64) -> Result<EqualRateSolution> {
    let model = RateModel::lower(config, alpha, p_ce)?;
    Ok(equal_rate_inner(config, &model, net_factor(config, alpha)))
}

pub(crate) fn equal_rate_inner(
    config: &SystemConfig,
    model: &RateModel,
    net: f64,
) -> EqualRateSolution {
    let k_tags = config.k_tags();
    let energies = energy_affines(config, model);
    let mut iterations = 0usize;

    let Some(floors) = energy_floors(config, &energies) else {
        // No feasible weights: report the harvest-equalizing point, the
        // least-violating allocation for diagnostics.
        let (weights, _) = equalize_energy(&energies, k_tags);
        let rates: Vec<f64> = (0..k_tags).map(|k| net * model.rate(&weights, k)).collect();
        let evals: Vec<f64> = energies.iter().zip(&weights).map(|(e, &z)| e.at(z)).collect();
        let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
        return EqualRateSolution {
            weights,
            min_rate,
            rates,
            energies: evals,
            feasible: false,
            iterations: 0,
        };
    };

    // Least weights achieving a common target t, or None if t is unreachable.
    let mut solve_for = |target: f64| -> Option<Vec<f64>> {
        let mut z = floors.clone();
        for _ in 0..200 {
            iterations += 1;
            let mut next = Vec::with_capacity(k_tags);
            let mut moved = 0.0f64;
            for k in 0..k_tags {
                let need = model.min_zeta_for_rate(&z, k, target)?;
                let v = need.max(floors[k]);
                moved = moved.max(v - z[k]);
                next.push(v);
            }
            if next.iter().sum::<f64>() > 1.0 + 1e-9 {
                return None;
            }
            z = next;
            if moved < 1e-13 {
                break;
            }
        }
        Some(z)
    };

    // Upper bound: no tag can beat its own interference-free full-weight rate.
    let t_hi = (0..k_tags)
        .map(|k| {
            let mut w = vec![0.0; k_tags];
            w[k] = 1.0;
            model.rate(&w, k)
        })
        .fold(0.0f64, f64::max)
        + 1e-9;

    let mut lo = 0.0f64;
    let mut hi = t_hi;
    let mut best = floors.clone();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match solve_for(mid) {
            Some(z) => {
                best = z;
                lo = mid;
            }
            None => hi = mid,
        }
    }

    let sum: f64 = best.iter().sum();
    let weights: Vec<f64> = if sum > 0.0 {
        best.iter().map(|z| z / sum).collect()
    } else {
        vec![1.0 / k_tags as f64; k_tags]
    };
    let rates: Vec<f64> = (0..k_tags).map(|k| net * model.rate(&weights, k)).collect();
    let evals: Vec<f64> = energies.iter().zip(&weights).map(|(e, &z)| e.at(z)).collect();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    EqualRateSolution {
        weights,
        min_rate,
        rates,
        energies: evals,
        feasible: true,
        iterations,
    }
}

/// Weights equalizing the per-tag harvest rates (uniform when the harvest
/// is weight-independent), plus the resulting minimum harvest.
fn equalize_energy(energies: &[Affine], k_tags: usize) -> (Vec<f64>, f64) {
    let uniform = vec![1.0 / k_tags as f64; k_tags];
    if energies.iter().all(|e| e.c1 == 0.0) {
        let min_e = energies.iter().map(|e| e.c0).fold(f64::INFINITY, f64::min);
        return (uniform, min_e);
    }
    let weight_for = |target: f64| -> Vec<f64> {
        energies
            .iter()
            .map(|e| {
                if e.c1 > 0.0 {
                    ((target - e.c0) / e.c1).max(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    };
    let total = |target: f64| weight_for(target).iter().sum::<f64>();
    let mut lo = energies.iter().map(|e| e.c0).fold(f64::INFINITY, f64::min);
    let mut hi = energies
        .iter()
        .map(|e| e.at(1.0))
        .fold(0.0f64, f64::max)
        .max(lo * 2.0);
    let mut guard = 0;
    while total(hi) <= 1.0 && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if total(mid) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = weight_for(lo);
    let s: f64 = z.iter().sum();
    if s > 0.0 {
        for v in &mut z {
            *v /= s;
        }
    } else {
        z = uniform;
    }
    let min_e = energies
        .iter()
        .zip(&z)
        .map(|(e, &v)| e.at(v))
        .fold(f64::INFINITY, f64::min);
    (z, min_e)
}

#[derive(Debug, Clone)]
struct Candidate {
    alpha: f64,
    p_ce: f64,
    inner: EqualRateSolution,
    objective: f64,
}

/// Deterministic preference among candidates: larger objective, then
/// smaller α, then smaller p_ce, then lexicographically smaller weights.
fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.objective != b.objective {
        return a.objective > b.objective;
    }
    if a.alpha != b.alpha {
        return a.alpha < b.alpha;
    }
    if a.p_ce != b.p_ce {
        return a.p_ce < b.p_ce;
    }
    a.inner.weights < b.inner.weights
}

pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Integer CE lengths: multiples of K (so D = α/K is exact) between K·M
/// and T−1, at most `points` of them, endpoints included.
pub(crate) fn alpha_grid(config: &SystemConfig, points: usize) -> Result<Vec<f64>> {
    let k = config.k_tags();
    let lo = k * config.m_tx;
    let hi_raw = config.block_len.saturating_sub(1);
    if lo > hi_raw {
        return Err(Error::InvalidConfig(format!(
            "no admissible CE length: K·M = {lo} exceeds T−1 = {hi_raw}"
        )));
    }
    let count = (hi_raw - lo) / k + 1;
    let n = points.max(2).min(count);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let idx = if n == 1 {
            0
        } else {
            (i * (count - 1)) / (n - 1)
        };
        let alpha = lo + idx * k;
        if out.last() != Some(&(alpha as f64)) {
            out.push(alpha as f64);
        }
    }
    Ok(out)
}

/// All multiples of K inside [lo, hi]; used by the refinement pass.
fn alpha_fill(config: &SystemConfig, lo: f64, hi: f64) -> Vec<f64> {
    let k = config.k_tags();
    let mut out = Vec::new();
    let mut a = (lo as usize).max(k * config.m_tx);
    a = a.div_ceil(k) * k;
    let hi = (hi as usize).min(config.block_len - 1);
    while a <= hi {
        out.push(a as f64);
        a += k;
        if out.len() > 512 {
            break;
        }
    }
    out
}

fn log_subdivide(lo: f64, hi: f64, per_interval: usize) -> Vec<f64> {
    log_grid(lo, hi, per_interval + 1)
}

enum Objective {
    MinRate,
    MinEnergy,
}

fn inner_for(
    config: &SystemConfig,
    alpha: f64,
    p_ce: f64,
    objective: &Objective,
) -> Option<Candidate> {
    let budget = config.avg_tx_power * config.block_len as f64;
    if alpha * p_ce >= budget {
        return None;
    }
    let model = RateModel::lower(config, alpha, p_ce).ok()?;
    let net = net_factor(config, alpha);
    let inner = match objective {
        Objective::MinRate => equal_rate_inner(config, &model, net),
        Objective::MinEnergy => {
            let energies = energy_affines(config, &model);
            let (weights, min_e) = equalize_energy(&energies, config.k_tags());
            let rates: Vec<f64> =
                (0..config.k_tags()).map(|k| net * model.rate(&weights, k)).collect();
            let evals: Vec<f64> = energies.iter().zip(&weights).map(|(e, &z)| e.at(z)).collect();
            EqualRateSolution {
                weights,
                min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
                rates,
                energies: evals,
                feasible: min_e >= config.circuit_power,
                iterations: 0,
            }
        }
    };
    let objective_value = match objective {
        // Both objectives count only what the data slot delivers: the
        // harvested-energy baseline likewise accrues energy over T − α.
        Objective::MinRate => inner.min_rate,
        Objective::MinEnergy => {
            net * inner
                .energies
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
    };
    Some(Candidate {
        alpha,
        p_ce,
        inner,
        objective: objective_value,
    })
}

fn search(config: &SystemConfig, grid: &GridSpec, objective: Objective) -> Result<OptimizationResult> {
    config.validate()?;
    let alphas = alpha_grid(config, grid.alpha_points)?;
    let w = config.avg_tx_power;
    let pces = log_grid(w * grid.pce_min_frac, w * grid.pce_max_frac, grid.pce_points);

    let evaluate_grid = |alphas: &[f64], pces: &[f64]| -> Vec<Candidate> {
        let points: Vec<(f64, f64)> = alphas
            .iter()
            .flat_map(|&a| pces.iter().map(move |&p| (a, p)))
            .collect();
        points
            .into_par_iter()
            .filter_map(|(a, p)| inner_for(config, a, p, &objective))
            .collect()
    };

    let mut cands = evaluate_grid(&alphas, &pces);
    let mut grid_points = cands.len();

    let pick_best = |cands: &[Candidate]| -> Option<Candidate> {
        let mut best: Option<&Candidate> = None;
        for c in cands.iter().filter(|c| c.inner.feasible) {
            if best.is_none_or(|b| better(c, b)) {
                best = Some(c);
            }
        }
        best.cloned()
    };

    let mut best = pick_best(&cands);

    if let (Some(b), true) = (&best, grid.refine) {
        // One refinement level: re-grid the two coarse cells around the
        // optimum at 4× density on both axes.
        let ai = alphas.iter().position(|&a| a == b.alpha).unwrap_or(0);
        let a_lo = alphas[ai.saturating_sub(1)];
        let a_hi = alphas[(ai + 1).min(alphas.len() - 1)];
        let mut fine_alphas = alpha_fill(config, a_lo, a_hi);
        if fine_alphas.len() > 4 * 8 {
            // keep the lattice aligned with a 4× subdivision of the span
            let stride = fine_alphas.len() / 32 + 1;
            fine_alphas = fine_alphas.into_iter().step_by(stride).collect();
        }
        let pi = pces.iter().position(|&p| p == b.p_ce).unwrap_or(0);
        let p_lo = pces[pi.saturating_sub(1)];
        let p_hi = pces[(pi + 1).min(pces.len() - 1)];
        let fine_pces = log_subdivide(p_lo, p_hi, 8);
        let fine = evaluate_grid(&fine_alphas, &fine_pces);
        grid_points += fine.len();
        cands.extend(fine);
        best = pick_best(&cands);
    }

    let iterations: usize = cands.iter().map(|c| c.inner.iterations).sum();

    let chosen = match best {
        Some(b) => b,
        None => {
            // Nothing satisfies the activation constraints anywhere on the
            // grid: surface the least-violating point.
            let mut least: Option<&Candidate> = None;
            for c in &cands {
                let viol = |c: &Candidate| {
                    c.inner
                        .energies
                        .iter()
                        .map(|&e| (config.circuit_power - e).max(0.0))
                        .fold(0.0f64, f64::max)
                };
                if least.is_none_or(|l| viol(c) < viol(l)) {
                    least = Some(c);
                }
            }
            least
                .cloned()
                .ok_or_else(|| Error::Infeasible("empty allocation search grid".into()))?
        }
    };

    let feasible = chosen.inner.feasible;
    let allocation =
        ResourceAllocation::new(chosen.inner.weights.clone(), chosen.alpha, chosen.p_ce, config)?;
    Ok(OptimizationResult {
        allocation,
        per_tag_rates: chosen.inner.rates,
        per_tag_energy: chosen.inner.energies,
        objective: chosen.objective,
        feasible,
        grid_points,
        iterations,
    })
}

/// Maximize the minimum fully-bounded rate over (ζ, α, p_ce) subject to
/// per-tag activation (harvest ≥ ρ), Σζ = 1, ζ ≥ 0, and the block budget.
pub fn solve_maxmin_rate(config: &SystemConfig, grid: &GridSpec) -> Result<OptimizationResult> {
    search(config, grid, Objective::MinRate)
}

/// Baseline: maximize the minimum lower-envelope harvest rate over the same
/// variables, with no rate constraint; rates are evaluated at the optimum.
pub fn solve_maxmin_energy(config: &SystemConfig, grid: &GridSpec) -> Result<OptimizationResult> {
    search(config, grid, Objective::MinEnergy)
}

/// Per-tag report of the omnidirectional reference at a fixed (α, p_ce).
#[derive(Debug, Clone)]
pub struct OmniReport {
    pub allocation: ResourceAllocation,
    /// p·β_k: isotropic transmission has no array gain, so the expected
    /// incident power is independent of M.
    pub per_tag_incident: Vec<f64>,
    pub per_tag_harvest: Vec<f64>,
    pub per_tag_rates: Vec<f64>,
    /// Tags whose harvest rate clears the circuit consumption ρ.
    pub active: Vec<bool>,
    pub feasible: bool,
}

/// Omnidirectional transmission: Φ is the uniform vector, CE is still
/// performed for detection, and the weights play no role.
pub fn omni_allocation(config: &SystemConfig, alpha: f64, p_ce: f64) -> Result<OmniReport> {
    config.validate()?;
    let model = RateModel::omni(config, alpha, p_ce)?;
    let p = derive_data_power(config.avg_tx_power, config.block_len, alpha, p_ce)?;
    let k_tags = config.k_tags();
    let uniform = vec![1.0 / k_tags as f64; k_tags];
    let incident: Vec<f64> = config.tags.iter().map(|t| p * t.path_loss).collect();
    let harvest: Vec<f64> = config
        .tags
        .iter()
        .zip(&incident)
        .map(|(t, &pi)| crate::energy::harvest_rate(pi, t.reflection, config.rectifier_eff))
        .collect();
    let rates: Vec<f64> = (0..k_tags).map(|k| model.rate(&uniform, k)).collect();
    let active: Vec<bool> = harvest.iter().map(|&h| h >= config.circuit_power).collect();
    let feasible = active.iter().all(|&a| a);
    Ok(OmniReport {
        allocation: ResourceAllocation::new(uniform, alpha, p_ce, config)?,
        per_tag_incident: incident,
        per_tag_harvest: harvest,
        per_tag_rates: rates,
        active,
        feasible,
    })
}

/// Re-check every constraint of a result against a config; used by tests
/// and the validation harness.
pub fn check_constraints(config: &SystemConfig, res: &OptimizationResult) -> Result<()> {
    let alloc = &res.allocation;
    let sum: f64 = alloc.weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("weights sum to {sum}")));
    }
    if alloc.weights.iter().any(|&z| z < 0.0) {
        return Err(Error::Infeasible("negative weight".into()));
    }
    if alloc.ce_time < 0.0 || alloc.ce_time > config.block_len as f64 {
        return Err(Error::Infeasible(format!("α = {}", alloc.ce_time)));
    }
    if alloc.ce_time * alloc.pilot_power >= config.avg_tx_power * config.block_len as f64 {
        return Err(Error::Infeasible("pilot energy exceeds the block budget".into()));
    }
    if res.feasible {
        for (k, &e) in res.per_tag_energy.iter().enumerate() {
            if e < config.circuit_power - 1e-15 {
                return Err(Error::Infeasible(format!(
                    "tag {k} harvest {e} below ρ = {}",
                    config.circuit_power
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    use crate::config::TagProfile;
    use crate::detection::rate_lower_bound;

    fn config(m: usize, r: usize, distances: &[f64]) -> SystemConfig {
        let tags: Vec<TagProfile> = distances
            .iter()
            .map(|&d| TagProfile::from_distance(d, Complex64::new(0.3, 0.4)).unwrap())
            .collect();
        SystemConfig {
            m_tx: m,
            r_rx: r,
            block_len: 200,
            avg_tx_power: 1.0,
            ce_noise_power: 1e-12,
            rx_noise_power: 1e-9,
            tag_noise_power: 1e-12,
            rectifier_eff: 0.65,
            circuit_power: 8.9e-6,
            trunc_threshold: SystemConfig::default_trunc_threshold(&tags),
            tags,
        }
    }

    fn coarse_grid() -> GridSpec {
        GridSpec {
            alpha_points: 8,
            pce_points: 12,
            refine: true,
            ..Default::default()
        }
    }

    #[test]
    fn symmetric_tags_split_evenly() {
        let cfg = config(8, 8, &[5.0, 5.0]);
        let res = solve_maxmin_rate(&cfg, &coarse_grid()).unwrap();
        assert!(res.feasible);
        assert_relative_eq!(res.allocation.weights[0], 0.5, epsilon = 1e-6);
        assert_relative_eq!(res.allocation.weights[1], 0.5, epsilon = 1e-6);
        let (r0, r1) = (res.per_tag_rates[0], res.per_tag_rates[1]);
        assert!((r0 - r1).abs() <= 1e-4 * r0.abs().max(r1.abs()));
    }

    #[test]
    fn single_tag_gets_all_weight() {
        let cfg = config(4, 4, &[5.0]);
        let res = solve_maxmin_rate(&cfg, &coarse_grid()).unwrap();
        assert!(res.feasible);
        assert_eq!(res.allocation.weights, vec![1.0]);
        assert!(res.objective > 0.0);
    }

    #[test]
    fn asymmetric_tags_equalize_rates_with_more_weight_on_far_tag() {
        let cfg = config(8, 8, &[4.0, 6.0]);
        let res = solve_maxmin_rate(&cfg, &coarse_grid()).unwrap();
        assert!(res.feasible);
        let rel = (res.per_tag_rates[0] - res.per_tag_rates[1]).abs()
            / res.per_tag_rates[0].max(res.per_tag_rates[1]);
        assert!(rel <= 1e-3, "rates {:?}", res.per_tag_rates);
        // the nearer, stronger tag needs less beam weight for the same rate
        assert!(
            res.allocation.weights[0] < res.allocation.weights[1],
            "weights {:?}",
            res.allocation.weights
        );
        check_constraints(&cfg, &res).unwrap();
    }

    #[test]
    fn equal_rate_weights_reports_binding_energy() {
        // Huge circuit power: nothing can activate.
        let mut cfg = config(4, 4, &[4.0, 6.0]);
        cfg.circuit_power = 1.0;
        let sol = equal_rate_weights(&cfg, 16.0, 0.5).unwrap();
        assert!(!sol.feasible);
        // the reported point equalizes harvest for violation diagnostics
        let rel = (sol.energies[0] - sol.energies[1]).abs() / sol.energies[0];
        assert!(rel < 1e-4, "energies {:?}", sol.energies);
    }

    #[test]
    fn infeasible_search_flags_and_attaches_least_violation() {
        let mut cfg = config(4, 4, &[4.0, 6.0]);
        cfg.circuit_power = 1.0;
        let res = solve_maxmin_rate(&cfg, &coarse_grid()).unwrap();
        assert!(!res.feasible);
        assert!(res.per_tag_energy.iter().all(|&e| e < cfg.circuit_power));
    }

    #[test]
    fn maxmin_energy_equalizes_harvest() {
        let cfg = config(8, 8, &[4.0, 6.0]);
        let res = solve_maxmin_energy(&cfg, &coarse_grid()).unwrap();
        assert!(res.feasible);
        let rel = (res.per_tag_energy[0] - res.per_tag_energy[1]).abs()
            / res.per_tag_energy[0].max(res.per_tag_energy[1]);
        assert!(rel <= 1e-4, "energies {:?}", res.per_tag_energy);
        check_constraints(&cfg, &res).unwrap();
    }

    #[test]
    fn maxmin_energy_identical_tags_split_evenly() {
        let cfg = config(8, 8, &[5.0, 5.0]);
        let res = solve_maxmin_energy(&cfg, &coarse_grid()).unwrap();
        assert_relative_eq!(res.allocation.weights[0], 0.5, epsilon = 1e-6);
        assert_relative_eq!(res.per_tag_energy[0], res.per_tag_energy[1], max_relative = 1e-9);
    }

    #[test]
    fn single_antenna_urges_uniform_weights() {
        let mut cfg = config(1, 4, &[4.0, 6.0]);
        // with M = 1 no beam gain exists; keep activation satisfiable
        cfg.circuit_power = 1e-9;
        let res = solve_maxmin_energy(&cfg, &coarse_grid()).unwrap();
        assert_eq!(res.allocation.weights, vec![0.5, 0.5]);
        let res = solve_maxmin_rate(&cfg, &coarse_grid()).unwrap();
        assert_eq!(res.allocation.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn omni_reference_is_isotropic() {
        let cfg2 = config(2, 4, &[4.0, 6.0]);
        let cfg64 = config(64, 4, &[4.0, 6.0]);
        let a = omni_allocation(&cfg2, 16.0, 0.5).unwrap();
        let b = omni_allocation(&cfg64, 160.0, 0.5).unwrap();
        // same p at both α? different α → different p; compare per unit p:
        let p_a = a.allocation.data_power;
        let p_b = b.allocation.data_power;
        for k in 0..2 {
            assert_relative_eq!(
                a.per_tag_incident[k] / p_a,
                b.per_tag_incident[k] / p_b,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                a.per_tag_incident[k],
                p_a * cfg2.tags[k].path_loss,
                max_relative = 1e-12
            );
        }
        // far tag cannot activate from isotropic transmission at w = 1 W
        assert!(!a.active[1]);
        assert!(!a.feasible);
    }

    #[test]
    fn objective_monotone_in_power_and_antennas() {
        let base = config(4, 4, &[4.0, 6.0]);
        let res1 = solve_maxmin_rate(&base, &coarse_grid()).unwrap();

        let mut richer = base.clone();
        richer.avg_tx_power = 2.0;
        let res2 = solve_maxmin_rate(&richer, &coarse_grid()).unwrap();
        assert!(res2.objective >= res1.objective - 1e-9);

        let mut wider = base.clone();
        wider.m_tx = 16;
        let res3 = solve_maxmin_rate(&wider, &coarse_grid()).unwrap();
        assert!(res3.objective >= res1.objective - 1e-9);
    }

    #[test]
    fn solver_matches_coarse_brute_force() {
        // Small independent sweep: fixed (α, p_ce) pairs, dense ζ line search.
        let cfg = config(4, 4, &[4.0, 6.0]);
        let grid = GridSpec {
            alpha_points: 6,
            pce_points: 8,
            refine: false,
            ..Default::default()
        };
        let res = solve_maxmin_rate(&cfg, &grid).unwrap();

        let alphas = alpha_grid(&cfg, 6).unwrap();
        let pces = log_grid(0.01, 50.0, 8);
        let mut brute = f64::NEG_INFINITY;
        for &a in &alphas {
            for &p in &pces {
                if a * p >= 200.0 {
                    continue;
                }
                for i in 0..=400 {
                    let z0 = i as f64 / 400.0;
                    let weights = vec![z0, 1.0 - z0];
                    let alloc = match ResourceAllocation::new(weights, a, p, &cfg) {
                        Ok(al) => al,
                        Err(_) => continue,
                    };
                    let e_ok = (0..2).all(|k| {
                        let b = crate::energy::incident_power_bounds(&cfg, &alloc, k);
                        crate::energy::harvest_rate(
                            b.lower,
                            cfg.tags[k].reflection,
                            cfg.rectifier_eff,
                        ) >= cfg.circuit_power
                    });
                    if !e_ok {
                        continue;
                    }
                    let r = (1.0 - a / 200.0)
                        * (0..2)
                            .map(|k| rate_lower_bound(&cfg, &alloc, k).unwrap())
                            .fold(f64::INFINITY, f64::min);
                    brute = brute.max(r);
                }
            }
        }
        assert!(
            (res.objective - brute).abs() <= 2e-3,
            "solver {} vs brute {}",
            res.objective,
            brute
        );
    }
}
