//! Experiment engine: scheme allocators, Monte Carlo sweeps over an axis,
//! and deterministic CSV output.

pub mod scenario;
pub mod validate;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::detection::{
    estimated_rates_trial, perfect_rates_trial, pilots_for, summarize_per_tag, McEstimate,
    RateModel,
};
use crate::energy::ResourceAllocation;
use crate::error::{Error, Result};
use crate::optimizer::{
    alpha_grid, equal_rate_inner, log_grid, net_factor, omni_allocation, solve_maxmin_energy,
    solve_maxmin_rate, GridSpec,
};
use crate::seeding::{derive_seed, derive_stream};

/// Allocation/evaluation schemes the sweeps compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Max-min rate with estimated BS-CSI (the design under study).
    Proposed,
    /// Genie bound: no CE slot, true channels everywhere.
    PerfectCsi,
    /// Isotropic transmission; CE kept for detection only.
    Omni,
    /// Existing design: max-min harvested energy, rate ignored.
    MaxMinEnergy,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Proposed,
        Scheme::PerfectCsi,
        Scheme::Omni,
        Scheme::MaxMinEnergy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::PerfectCsi => "perfect-csi",
            Scheme::Omni => "omni",
            Scheme::MaxMinEnergy => "maxmin-energy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| {
                Error::Scenario(format!(
                    "unknown scheme `{s}` (expected one of proposed, perfect-csi, omni, maxmin-energy)"
                ))
            })
    }

    fn id(&self) -> u64 {
        match self {
            Scheme::Proposed => 1,
            Scheme::PerfectCsi => 2,
            Scheme::Omni => 3,
            Scheme::MaxMinEnergy => 4,
        }
    }
}

/// Which scenario constant a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    MTx,
    RRx,
    TxPower,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::MTx => "m_tx",
            SweepAxis::RRx => "r_rx",
            SweepAxis::TxPower => "tx_power",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "m_tx" => Ok(SweepAxis::MTx),
            "r_rx" => Ok(SweepAxis::RRx),
            "tx_power" => Ok(SweepAxis::TxPower),
            other => Err(Error::Scenario(format!(
                "unknown sweep axis `{other}` (expected m_tx, r_rx, or tx_power)"
            ))),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub config: SystemConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub mc_trials: usize,
    pub master_seed: u64,
    pub out_path: Option<PathBuf>,
    pub grid: GridSpec,
    pub rx_row: usize,
    pub tx_col: usize,
    /// Resample forward draws below τ in the Monte Carlo rate estimates.
    pub tau_matched: bool,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.values.is_empty() {
            return Err(Error::Scenario("sweep.values must be nonempty".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Scenario("run.schemes must be nonempty".into()));
        }
        if self.mc_trials < 1 {
            return Err(Error::Scenario("run.mc_trials must be ≥ 1".into()));
        }
        for &v in &self.values {
            apply_axis(&self.config, self.axis, v)?;
        }
        Ok(())
    }
}

/// One (axis value × scheme) outcome.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: Scheme,
    /// Per-tag Monte Carlo ergodic rates, bits/s/Hz.
    pub rates: Vec<f64>,
    pub rate_ses: Vec<f64>,
    pub min_rate: f64,
    /// Per-tag analytic harvest rates, watts (lower envelope for estimated
    /// CSI, exact for perfect CSI and omni).
    pub harvests: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub p_ce: f64,
    pub feasible: bool,
}

/// Fork the base config with one axis value substituted.
pub fn apply_axis(config: &SystemConfig, axis: SweepAxis, value: f64) -> Result<SystemConfig> {
    let mut cfg = config.clone();
    match axis {
        SweepAxis::MTx | SweepAxis::RRx => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Scenario(format!(
                    "{} sweep values must be positive integers, got {value}",
                    axis.name()
                )));
            }
            if axis == SweepAxis::MTx {
                cfg.m_tx = value as usize;
            } else {
                cfg.r_rx = value as usize;
            }
        }
        SweepAxis::TxPower => {
            if !(value > 0.0) {
                return Err(Error::Scenario(format!(
                    "tx_power sweep values must be > 0 W, got {value}"
                )));
            }
            cfg.avg_tx_power = value;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run every (axis value × scheme) point. Infeasible points become rows
/// flagged infeasible rather than aborting the sweep. Deterministic for a
/// fixed master seed, independent of thread count.
pub fn run_sweep(spec: &ScenarioSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.values.len() * spec.schemes.len());
    for (ai, &value) in spec.values.iter().enumerate() {
        let cfg = apply_axis(&spec.config, spec.axis, value)?;
        for &scheme in &spec.schemes {
            let seed = derive_seed(spec.master_seed, &[ai as u64, scheme.id()]);
            let row = run_scheme_point(&cfg, scheme, spec, value, seed)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

fn run_scheme_point(
    config: &SystemConfig,
    scheme: Scheme,
    spec: &ScenarioSpec,
    axis_value: f64,
    seed: u64,
) -> Result<SweepRow> {
    match scheme {
        Scheme::Proposed | Scheme::MaxMinEnergy => {
            let res = if scheme == Scheme::Proposed {
                solve_maxmin_rate(config, &spec.grid)?
            } else {
                solve_maxmin_energy(config, &spec.grid)?
            };
            let net = net_factor(config, res.allocation.ce_time);
            let mc = mc_rates_estimated(config, &res.allocation, false, spec, seed)?;
            Ok(SweepRow {
                axis_value,
                scheme,
                min_rate: net * min_of(&mc, |e| e.mean),
                rates: mc.iter().map(|e| net * e.mean).collect(),
                rate_ses: mc.iter().map(|e| net * e.std_err).collect(),
                harvests: res.per_tag_energy,
                weights: res.allocation.weights.clone(),
                alpha: res.allocation.ce_time,
                p_ce: res.allocation.pilot_power,
                feasible: res.feasible,
            })
        }
        Scheme::Omni => {
            let (alpha, p_ce) = best_omni_point(config, &spec.grid)?;
            let report = omni_allocation(config, alpha, p_ce)?;
            let net = net_factor(config, alpha);
            let mc = mc_rates_estimated(config, &report.allocation, true, spec, seed)?;
            Ok(SweepRow {
                axis_value,
                scheme,
                min_rate: net * min_of(&mc, |e| e.mean),
                rates: mc.iter().map(|e| net * e.mean).collect(),
                rate_ses: mc.iter().map(|e| net * e.std_err).collect(),
                harvests: report.per_tag_harvest,
                weights: report.allocation.weights.clone(),
                alpha,
                p_ce,
                feasible: report.feasible,
            })
        }
        Scheme::PerfectCsi => run_perfect_csi(config, spec, axis_value, seed),
    }
}

/// Genie reference: the CE slot is removed (α = 0, p = w), the beamformer
/// uses true forward channels, detection uses true backward channels, and
/// the error-variance terms are exactly zero. Weights come from the same
/// max-min machinery run on the perfect-CSI rate model.
pub fn run_perfect_csi(
    config: &SystemConfig,
    spec: &ScenarioSpec,
    axis_value: f64,
    seed: u64,
) -> Result<SweepRow> {
    let model = RateModel::perfect(config)?;
    let inner = equal_rate_inner(config, &model, 1.0);
    let per_trial: Vec<Vec<f64>> = (0..spec.mc_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(seed, &[t as u64]);
            perfect_rates_trial(config, &inner.weights, &mut rng)
        })
        .collect();
    let mc = summarize_per_tag(&per_trial, config.k_tags());
    Ok(SweepRow {
        axis_value,
        scheme: Scheme::PerfectCsi,
        min_rate: min_of(&mc, |e| e.mean),
        rates: mc.iter().map(|e| e.mean).collect(),
        rate_ses: mc.iter().map(|e| e.std_err).collect(),
        harvests: inner.energies,
        weights: inner.weights,
        alpha: 0.0,
        p_ce: 0.0,
        feasible: inner.feasible,
    })
}

fn mc_rates_estimated(
    config: &SystemConfig,
    alloc: &ResourceAllocation,
    omni: bool,
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let pilots = pilots_for(config, alloc)?;
    let pinned: Option<Vec<f64>> = spec.tau_matched.then(|| {
        (0..config.k_tags())
            .map(|i| {
                config.tags[i].refl_mag()
                    * crate::energy::incident_power_analytic(config, alloc, i)
            })
            .collect()
    });
    let per_trial: Vec<Vec<f64>> = (0..spec.mc_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(seed, &[t as u64]);
            estimated_rates_trial(
                config,
                alloc,
                &pilots,
                omni,
                spec.tau_matched,
                pinned.as_deref(),
                spec.rx_row,
                spec.tx_col,
                &mut rng,
            )
        })
        .collect();
    Ok(summarize_per_tag(&per_trial, config.k_tags()))
}

fn min_of(mc: &[McEstimate], f: impl Fn(&McEstimate) -> f64) -> f64 {
    mc.iter().map(f).fold(f64::INFINITY, f64::min)
}

/// Omni has no weights to tune; pick the (α, p_ce) maximizing the minimum
/// analytic rate over the same outer grid the other schemes use.
fn best_omni_point(config: &SystemConfig, grid: &GridSpec) -> Result<(f64, f64)> {
    let alphas = alpha_grid(config, grid.alpha_points)?;
    let pces = log_grid(
        config.avg_tx_power * grid.pce_min_frac,
        config.avg_tx_power * grid.pce_max_frac,
        grid.pce_points,
    );
    let budget = config.avg_tx_power * config.block_len as f64;
    let uniform = vec![1.0 / config.k_tags() as f64; config.k_tags()];
    let mut best: Option<(f64, f64, f64)> = None;
    for &a in &alphas {
        for &p in &pces {
            if a * p >= budget {
                continue;
            }
            let Ok(model) = RateModel::omni(config, a, p) else {
                continue;
            };
            let obj = net_factor(config, a)
                * (0..config.k_tags())
                    .map(|k| model.rate(&uniform, k))
                    .fold(f64::INFINITY, f64::min);
            let better = match best {
                None => true,
                Some((bo, ba, bp)) => {
                    obj > bo || (obj == bo && (a < ba || (a == ba && p < bp)))
                }
            };
            if better {
                best = Some((obj, a, p));
            }
        }
    }
    best.map(|(_, a, p)| (a, p))
        .ok_or_else(|| Error::Infeasible("no admissible omni (α, p_ce) point".into()))
}

/// Render rows in the sweep CSV schema:
/// `axis,scheme,tag,rate_bits,rate_se,harvest_w,zeta,alpha,p_ce,feasible`,
/// one line per (row × tag).
pub fn render_csv(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Scenario("no sweep rows to emit".into()));
    }
    let mut out = String::new();
    out.push_str("axis,scheme,tag,rate_bits,rate_se,harvest_w,zeta,alpha,p_ce,feasible\n");
    for row in rows {
        for tag in 0..row.rates.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                row.axis_value,
                row.scheme.name(),
                tag,
                row.rates[tag],
                row.rate_ses[tag],
                row.harvests[tag],
                row.weights[tag],
                row.alpha,
                row.p_ce,
                row.feasible
            )
            .expect("writing to String cannot fail");
        }
    }
    Ok(out)
}

/// Write the CSV to disk.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let text = render_csv(rows)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use scenario::paper_default;

    fn tiny_spec() -> ScenarioSpec {
        let mut spec = paper_default();
        spec.values = vec![2.0, 4.0];
        spec.schemes = vec![Scheme::Proposed, Scheme::Omni];
        spec.mc_trials = 200;
        spec.grid = GridSpec {
            alpha_points: 5,
            pce_points: 6,
            refine: false,
            ..GridSpec::default()
        };
        spec
    }

    #[test]
    fn sweep_produces_ordered_rows() {
        let spec = tiny_spec();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].axis_value, 2.0);
        assert_eq!(rows[0].scheme, Scheme::Proposed);
        assert_eq!(rows[1].scheme, Scheme::Omni);
        assert_eq!(rows[2].axis_value, 4.0);
        for row in &rows {
            assert_eq!(row.rates.len(), 2);
            assert!(row.min_rate >= 0.0);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = tiny_spec();
        let a = render_csv(&run_sweep(&spec).unwrap()).unwrap();
        let b = render_csv(&run_sweep(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_schema_and_row_count() {
        let spec = tiny_spec();
        let rows = run_sweep(&spec).unwrap();
        let text = render_csv(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "axis,scheme,tag,rate_bits,rate_se,harvest_w,zeta,alpha,p_ce,feasible"
        );
        // 2 axis values × 2 schemes × 2 tags
        assert_eq!(lines.count(), 8);
        assert!(render_csv(&[]).is_err());
    }

    #[test]
    fn scheme_and_axis_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::parse(s.name()).unwrap(), s);
        }
        assert!(Scheme::parse("nope").is_err());
        for a in [SweepAxis::MTx, SweepAxis::RRx, SweepAxis::TxPower] {
            assert_eq!(SweepAxis::parse(a.name()).unwrap(), a);
        }
        assert!(SweepAxis::parse("q").is_err());
    }

    #[test]
    fn proposed_min_rate_grows_with_rx_antennas() {
        let mut spec = tiny_spec();
        spec.axis = SweepAxis::RRx;
        spec.values = vec![2.0, 8.0];
        spec.schemes = vec![Scheme::Proposed];
        spec.mc_trials = 500;
        let rows = run_sweep(&spec).unwrap();
        assert!(rows[1].min_rate > rows[0].min_rate, "{rows:?}");
    }

    #[test]
    fn axis_application_validates() {
        let cfg = paper_default().config;
        assert!(apply_axis(&cfg, SweepAxis::MTx, 2.5).is_err());
        assert!(apply_axis(&cfg, SweepAxis::RRx, 1.0).is_err()); // R ≥ 2
        assert!(apply_axis(&cfg, SweepAxis::TxPower, 0.0).is_err());
        let bigger = apply_axis(&cfg, SweepAxis::MTx, 16.0).unwrap();
        assert_eq!(bigger.m_tx, 16);
    }
}
