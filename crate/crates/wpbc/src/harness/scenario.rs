//! Scenario-file ingestion: a sectioned TOML document with per-module
//! tables, dBm→watt conversion on load, and a built-in default preset.
//!
//! Schema (all powers either `*_w` in watts or `*_dbm` in dBm, not both):
//!
//! ```toml
//! preset = "paper-default"   # optional; fills unspecified fields
//!
//! [system]
//! m_tx = 8
//! r_rx = 8
//! block_len = 200
//! avg_tx_power_w = 1.0
//! ce_noise_dbm = -90.0
//! rx_noise_dbm = -60.0
//! tag_noise_dbm = -90.0      # optional, defaults to the CE noise
//! rectifier_eff = 0.65
//! circuit_power_w = 8.9e-6
//! trunc_threshold = 1.9e-7   # optional, defaults to 0.01·min β
//!
//! [[tags]]
//! distance_m = 4.0           # or path_loss = ...
//! reflection = [0.3, 0.4]
//!
//! [sweep]
//! axis = "r_rx"              # m_tx | r_rx | tx_power
//! values = [2, 4, 8, 16]
//!
//! [run]
//! schemes = ["proposed", "perfect-csi", "omni"]
//! mc_trials = 10000
//! master_seed = 1
//! out = "sweep.csv"
//! rx_row = 0                 # optional
//! tx_col = 0                 # optional
//! tau_matched = false        # optional
//!
//! [grid]                     # optional solver resolution
//! alpha_points = 16
//! pce_points = 32
//! pce_min_frac = 0.01
//! pce_max_frac = 50.0
//! refine = true
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::config::{dbm_to_watts, SystemConfig, TagProfile};
use crate::error::{Error, Result};
use crate::harness::{Scheme, ScenarioSpec, SweepAxis};
use crate::optimizer::GridSpec;

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    preset: Option<String>,
    system: Option<RawSystem>,
    #[serde(default)]
    tags: Vec<RawTag>,
    sweep: Option<RawSweep>,
    run: Option<RawRun>,
    grid: Option<RawGrid>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    m_tx: Option<usize>,
    r_rx: Option<usize>,
    block_len: Option<usize>,
    avg_tx_power_w: Option<f64>,
    avg_tx_power_dbm: Option<f64>,
    ce_noise_w: Option<f64>,
    ce_noise_dbm: Option<f64>,
    rx_noise_w: Option<f64>,
    rx_noise_dbm: Option<f64>,
    tag_noise_w: Option<f64>,
    tag_noise_dbm: Option<f64>,
    rectifier_eff: Option<f64>,
    circuit_power_w: Option<f64>,
    trunc_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTag {
    distance_m: Option<f64>,
    path_loss: Option<f64>,
    reflection: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRun {
    schemes: Option<Vec<String>>,
    mc_trials: Option<usize>,
    master_seed: Option<u64>,
    out: Option<String>,
    rx_row: Option<usize>,
    tx_col: Option<usize>,
    tau_matched: Option<bool>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    alpha_points: Option<usize>,
    pce_points: Option<usize>,
    pce_min_frac: Option<f64>,
    pce_max_frac: Option<f64>,
    refine: Option<bool>,
}

/// Load and fully validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Parse a scenario document from text.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| Error::Scenario(format!("scenario parse error: {e}")))?;
    assemble(raw)
}

fn power_field(
    watts: Option<f64>,
    dbm: Option<f64>,
    default: Option<f64>,
    name: &str,
) -> Result<f64> {
    match (watts, dbm) {
        (Some(_), Some(_)) => Err(Error::Scenario(format!(
            "specify either system.{name}_w or system.{name}_dbm, not both"
        ))),
        (Some(w), None) => Ok(w),
        (None, Some(d)) => Ok(dbm_to_watts(d)),
        (None, None) => default.ok_or_else(|| {
            Error::Scenario(format!(
                "missing required field: system.{name}_w (or system.{name}_dbm)"
            ))
        }),
    }
}

fn required<T>(value: Option<T>, default: Option<T>, name: &str) -> Result<T> {
    value
        .or(default)
        .ok_or_else(|| Error::Scenario(format!("missing required field: {name}")))
}

fn assemble(raw: RawScenario) -> Result<ScenarioSpec> {
    let preset = match raw.preset.as_deref() {
        None => false,
        Some("paper-default") => true,
        Some(other) => {
            return Err(Error::Scenario(format!(
                "unknown preset `{other}` (expected \"paper-default\")"
            )))
        }
    };
    let def = preset.then(paper_default);
    let d = |f: fn(&ScenarioSpec) -> f64| def.as_ref().map(f);

    let sys = raw.system.unwrap_or_default();
    let m_tx = required(sys.m_tx, def.as_ref().map(|s| s.config.m_tx), "system.m_tx")?;
    let r_rx = required(sys.r_rx, def.as_ref().map(|s| s.config.r_rx), "system.r_rx")?;
    let block_len = required(
        sys.block_len,
        def.as_ref().map(|s| s.config.block_len),
        "system.block_len",
    )?;
    let avg_tx_power = power_field(
        sys.avg_tx_power_w,
        sys.avg_tx_power_dbm,
        d(|s| s.config.avg_tx_power),
        "avg_tx_power",
    )?;
    let ce_noise_power = power_field(
        sys.ce_noise_w,
        sys.ce_noise_dbm,
        d(|s| s.config.ce_noise_power),
        "ce_noise",
    )?;
    let rx_noise_power = power_field(
        sys.rx_noise_w,
        sys.rx_noise_dbm,
        d(|s| s.config.rx_noise_power),
        "rx_noise",
    )?;
    let tag_noise_power = power_field(
        sys.tag_noise_w,
        sys.tag_noise_dbm,
        Some(d(|s| s.config.tag_noise_power).unwrap_or(ce_noise_power)),
        "tag_noise",
    )?;
    let rectifier_eff = required(
        sys.rectifier_eff,
        d(|s| s.config.rectifier_eff),
        "system.rectifier_eff",
    )?;
    let circuit_power = required(
        sys.circuit_power_w,
        d(|s| s.config.circuit_power),
        "system.circuit_power_w",
    )?;

    let tags: Vec<TagProfile> = if raw.tags.is_empty() {
        def.as_ref()
            .map(|s| s.config.tags.clone())
            .ok_or_else(|| Error::Scenario("missing required section: [[tags]]".into()))?
    } else {
        raw.tags
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let reflection = Complex64::new(t.reflection[0], t.reflection[1]);
                match (t.distance_m, t.path_loss) {
                    (Some(_), Some(_)) => Err(Error::Scenario(format!(
                        "tags[{i}]: specify either distance_m or path_loss, not both"
                    ))),
                    (Some(dm), None) => TagProfile::from_distance(dm, reflection),
                    (None, Some(pl)) => Ok(TagProfile::new(pl, reflection)),
                    (None, None) => Err(Error::Scenario(format!(
                        "tags[{i}]: missing required field: distance_m (or path_loss)"
                    ))),
                }
            })
            .collect::<Result<_>>()?
    };

    let trunc_threshold = sys
        .trunc_threshold
        .unwrap_or_else(|| SystemConfig::default_trunc_threshold(&tags));

    let config = SystemConfig {
        m_tx,
        r_rx,
        block_len,
        avg_tx_power,
        ce_noise_power,
        rx_noise_power,
        tag_noise_power,
        rectifier_eff,
        circuit_power,
        trunc_threshold,
        tags,
    };

    let (axis, values) = match raw.sweep {
        Some(s) => (SweepAxis::parse(&s.axis)?, s.values),
        None => {
            let d = def
                .as_ref()
                .ok_or_else(|| Error::Scenario("missing required section: [sweep]".into()))?;
            (d.axis, d.values.clone())
        }
    };

    let run = raw.run.unwrap_or_default();
    let schemes = match run.schemes {
        Some(names) => names
            .iter()
            .map(|n| Scheme::parse(n))
            .collect::<Result<Vec<_>>>()?,
        None => def
            .as_ref()
            .map(|s| s.schemes.clone())
            .unwrap_or_else(|| vec![Scheme::Proposed, Scheme::PerfectCsi, Scheme::Omni]),
    };

    let g = raw.grid.unwrap_or_default();
    let base_grid = GridSpec::default();
    let grid = GridSpec {
        alpha_points: g.alpha_points.unwrap_or(base_grid.alpha_points),
        pce_points: g.pce_points.unwrap_or(base_grid.pce_points),
        pce_min_frac: g.pce_min_frac.unwrap_or(base_grid.pce_min_frac),
        pce_max_frac: g.pce_max_frac.unwrap_or(base_grid.pce_max_frac),
        refine: g.refine.unwrap_or(base_grid.refine),
    };

    let spec = ScenarioSpec {
        config,
        axis,
        values,
        schemes,
        mc_trials: run.mc_trials.unwrap_or(10_000),
        master_seed: run.master_seed.unwrap_or(1),
        out_path: run.out.map(PathBuf::from),
        grid,
        rx_row: run.rx_row.unwrap_or(0),
        tx_col: run.tx_col.unwrap_or(0),
        tau_matched: run.tau_matched.unwrap_or(false),
    };
    spec.validate()?;
    Ok(spec)
}

/// The default two-tag scenario: T = 200 symbol periods, detection noise
/// −60 dBm, CE noise −90 dBm, η = 0.65, ρ = 8.9 μW, tags at 4 m and 6 m
/// with δ = 0.3 + 0.4i, an 8×8 reader at 1 W average transmit power.
pub fn paper_default() -> ScenarioSpec {
    let tags = vec![
        TagProfile::from_distance(4.0, Complex64::new(0.3, 0.4)).expect("positive distance"),
        TagProfile::from_distance(6.0, Complex64::new(0.3, 0.4)).expect("positive distance"),
    ];
    let trunc_threshold = SystemConfig::default_trunc_threshold(&tags);
    let config = SystemConfig {
        m_tx: 8,
        r_rx: 8,
        block_len: 200,
        avg_tx_power: 1.0,
        ce_noise_power: dbm_to_watts(-90.0),
        rx_noise_power: dbm_to_watts(-60.0),
        tag_noise_power: dbm_to_watts(-90.0),
        rectifier_eff: 0.65,
        circuit_power: 8.9e-6,
        trunc_threshold,
        tags,
    };
    ScenarioSpec {
        config,
        axis: SweepAxis::RRx,
        values: vec![2.0, 4.0, 8.0, 16.0],
        schemes: vec![Scheme::Proposed, Scheme::PerfectCsi, Scheme::Omni],
        mc_trials: 10_000,
        master_seed: 1,
        out_path: None,
        grid: GridSpec::default(),
        rx_row: 0,
        tx_col: 0,
        tau_matched: false,
    }
}

/// The default scenario rendered as an explicit TOML document, for
/// `wpbc preset`.
pub fn preset_toml() -> String {
    concat!(
        "# Default two-tag WPBC scenario.\n",
        "# All fields shown explicitly; powers may use *_w or *_dbm forms.\n",
        "\n",
        "[system]\n",
        "m_tx = 8\n",
        "r_rx = 8\n",
        "block_len = 200\n",
        "avg_tx_power_w = 1.0\n",
        "ce_noise_dbm = -90.0\n",
        "rx_noise_dbm = -60.0\n",
        "tag_noise_dbm = -90.0\n",
        "rectifier_eff = 0.65\n",
        "circuit_power_w = 8.9e-6\n",
        "\n",
        "[[tags]]\n",
        "distance_m = 4.0\n",
        "reflection = [0.3, 0.4]\n",
        "\n",
        "[[tags]]\n",
        "distance_m = 6.0\n",
        "reflection = [0.3, 0.4]\n",
        "\n",
        "[sweep]\n",
        "axis = \"r_rx\"\n",
        "values = [2, 4, 8, 16]\n",
        "\n",
        "[run]\n",
        "schemes = [\"proposed\", \"perfect-csi\", \"omni\"]\n",
        "mc_trials = 10000\n",
        "master_seed = 1\n",
        "out = \"sweep.csv\"\n",
    )
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn paper_default_values() {
        let spec = paper_default();
        let c = &spec.config;
        assert_eq!(c.block_len, 200);
        assert_relative_eq!(c.rx_noise_power, 1e-9, max_relative = 1e-12);
        assert_relative_eq!(c.ce_noise_power, 1e-12, max_relative = 1e-12);
        assert_relative_eq!(c.rectifier_eff, 0.65);
        assert_relative_eq!(c.circuit_power, 8.9e-6);
        assert_eq!(c.tags[0].distance, Some(4.0));
        assert_eq!(c.tags[1].distance, Some(6.0));
        assert_eq!(c.tags[0].reflection, Complex64::new(0.3, 0.4));
        assert_relative_eq!(c.tags[0].path_loss, 4.27728909559e-5, max_relative = 1e-10);
        assert_relative_eq!(c.tags[1].path_loss, 1.90101737582e-5, max_relative = 1e-10);
        spec.validate().unwrap();
    }

    #[test]
    fn preset_toml_round_trips() {
        let spec = parse_scenario(&preset_toml()).unwrap();
        let def = paper_default();
        assert_eq!(spec.config, def.config);
        assert_eq!(spec.values, def.values);
        assert_eq!(spec.schemes, def.schemes);
        assert_eq!(spec.out_path, Some(PathBuf::from("sweep.csv")));
    }

    #[test]
    fn preset_reference_fills_missing_fields() {
        let spec = parse_scenario("preset = \"paper-default\"\n").unwrap();
        assert_eq!(spec.config, paper_default().config);

        // explicit fields win over the preset
        let spec = parse_scenario(
            "preset = \"paper-default\"\n[system]\nm_tx = 4\n",
        )
        .unwrap();
        assert_eq!(spec.config.m_tx, 4);
        assert_eq!(spec.config.r_rx, 8);
    }

    #[test]
    fn missing_field_error_names_it() {
        let err = parse_scenario(
            "[system]\nm_tx = 8\nr_rx = 8\nblock_len = 200\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("avg_tx_power"), "{err}");

        let err = parse_scenario("").unwrap_err();
        assert!(err.to_string().contains("m_tx"), "{err}");
    }

    #[test]
    fn rejects_conflicting_power_forms() {
        let err = parse_scenario(
            "preset = \"paper-default\"\n[system]\navg_tx_power_w = 1.0\navg_tx_power_dbm = 30.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("not both"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(parse_scenario("preset = \"paper-default\"\nbogus = 1\n").is_err());
        let err = parse_scenario(
            "preset = \"paper-default\"\n[sweep]\naxis = \"speed\"\nvalues = [1]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");
    }

    #[test]
    fn dbm_fields_convert() {
        let spec = parse_scenario(
            "preset = \"paper-default\"\n[system]\navg_tx_power_dbm = 30.0\n",
        )
        .unwrap();
        assert_relative_eq!(spec.config.avg_tx_power, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn tag_table_parses_both_forms() {
        let text = r#"
preset = "paper-default"
[[tags]]
path_loss = 2.5e-5
reflection = [0.2, 0.1]
[[tags]]
distance_m = 5.0
reflection = [0.3, 0.4]
"#;
        let spec = parse_scenario(text).unwrap();
        assert_eq!(spec.config.tags.len(), 2);
        assert_relative_eq!(spec.config.tags[0].path_loss, 2.5e-5);
        assert_eq!(spec.config.tags[1].distance, Some(5.0));

        let bad = r#"
preset = "paper-default"
[[tags]]
reflection = [0.2, 0.1]
"#;
        let err = parse_scenario(bad).unwrap_err();
        assert!(err.to_string().contains("distance_m"), "{err}");
    }
}
