//! Built-in configs for the evaluation figures.
//!
//! Where a figure leaves a parameter open the choice below follows the
//! nearest figure that does state it (radii and power split from fig2,
//! Case I/II rate pairs). Power grids are chosen so each curve spans its
//! transition from outage to no outage under the bare `d^alpha` model.

use std::f64::consts::PI;

use crate::analytics::DEFAULT_CHEBYSHEV_NODES;
use crate::geometry::MIN_RADIUS_RATIO;
use crate::interference::DEFAULT_WINDOW_M;
use crate::schemes::Scheme;

use super::config::{
    ConfigError, ExperimentConfig, InterferenceSettings, Sweep, DEFAULT_BANDWIDTH_HZ, DEFAULT_NOISE_PSD_DBM_PER_HZ,
    DEFAULT_SEED, DEFAULT_TRIALS,
};

pub const PRESET_NAMES: [&str; 8] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

const CASE_I: [f64; 4] = [1.5, 0.5, 0.5, 0.5];
const CASE_II: [f64; 4] = [2.0, 1.0, 1.0, 1.0];

/// Interferer intensity `1 / (pi 200^2)` per m^2.
fn interferer_intensity() -> f64 {
    1.0 / (PI * 200.0 * 200.0)
}

fn power_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

fn interference(power_dbm: Option<f64>) -> Option<InterferenceSettings> {
    Some(InterferenceSettings {
        power_dbm,
        intensity_per_m2: interferer_intensity(),
        window_m: DEFAULT_WINDOW_M,
        shared_positions: false,
    })
}

fn base(l: f64, r0: f64, rj: f64, alpha: f64, rates: [f64; 4], power_dbm: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        side_length_m: l,
        big_radius_m: r0,
        near_radii_m: [rj; 3],
        path_loss_exponent: alpha,
        beta0_sq: 0.8,
        rates_bpcu: rates,
        power_dbm,
        noise_psd_dbm_per_hz: DEFAULT_NOISE_PSD_DBM_PER_HZ,
        bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
        interference: None,
        schemes: vec![Scheme::NNoma],
        trials: DEFAULT_TRIALS,
        seed: DEFAULT_SEED,
        chebyshev_nodes: DEFAULT_CHEBYSHEV_NODES,
        sweep: None,
    }
}

/// Config of figure `name` (`fig2` .. `fig9`).
pub fn figure_preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let config = match name {
        // N-NOMA vs OMA, sum rate and outage; fig3 plots the cell-edge rate
        // loss from the same runs.
        "fig2" | "fig3" => ExperimentConfig {
            schemes: vec![Scheme::NNoma, Scheme::Oma],
            sweep: Some(Sweep::Rates(vec![CASE_I, CASE_II])),
            ..base(400.0, 250.0, 10.0, 3.0, CASE_II, power_grid(-40.0, 30.0, 2.5))
        },
        "fig4" => ExperimentConfig {
            schemes: vec![Scheme::NNoma, Scheme::NomaNoComp, Scheme::NomaBestBs],
            ..base(400.0, 250.0, 10.0, 3.0, CASE_II, power_grid(-40.0, 30.0, 2.5))
        },
        "fig5" => ExperimentConfig {
            sweep: Some(Sweep::Rates(vec![CASE_I, CASE_II])),
            ..base(600.0, 400.0, 10.0, 3.0, CASE_II, power_grid(-30.0, 40.0, 2.5))
        },
        "fig6" => {
            let l0 = 300.0;
            ExperimentConfig {
                sweep: Some(Sweep::SideLength(vec![300.0, 400.0, 500.0, 600.0])),
                ..base(l0, 1.1 * MIN_RADIUS_RATIO * l0, 10.0, 3.0, CASE_II, power_grid(-40.0, 30.0, 2.5))
            }
        }
        "fig7" => ExperimentConfig {
            interference: interference(None),
            sweep: Some(Sweep::InterferencePower(vec![None, Some(6.0), Some(16.0)])),
            ..base(300.0, 200.0, 20.0, 4.0, [0.5; 4], power_grid(-60.0, 20.0, 2.5))
        },
        "fig8" => ExperimentConfig {
            interference: interference(Some(6.0)),
            sweep: Some(Sweep::NearRadius(vec![10.0, 20.0, 30.0, 40.0])),
            ..base(400.0, 250.0, 10.0, 3.0, [0.5; 4], power_grid(-40.0, 30.0, 2.5))
        },
        "fig9" => {
            let grid: Vec<f64> = (1..=24).map(|i| f64::from(i) / 100.0).collect();
            ExperimentConfig {
                interference: interference(Some(6.0)),
                sweep: Some(Sweep::Beta1Sq(grid)),
                ..base(600.0, 400.0, 30.0, 3.0, CASE_II, vec![10.0, 20.0])
            }
        }
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            let c = figure_preset(name).unwrap();
            assert!(!c.variants().unwrap().is_empty(), "{name}");
        }
        assert!(matches!(figure_preset("fig10"), Err(ConfigError::UnknownPreset(_))));
    }

    #[test]
    fn fig7_parameters() {
        let c = figure_preset("fig7").unwrap();
        assert_eq!((c.side_length_m, c.big_radius_m, c.near_radii_m), (300.0, 200.0, [20.0; 3]));
        assert_eq!(c.path_loss_exponent, 4.0);
        assert_eq!(c.rates_bpcu, [0.5; 4]);
        assert_eq!(c.beta0_sq, 0.8);
        let lambda = c.interference.as_ref().unwrap().intensity_per_m2;
        assert!((lambda * PI * 200.0 * 200.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig9_parameters() {
        let c = figure_preset("fig9").unwrap();
        assert_eq!((c.side_length_m, c.big_radius_m, c.near_radii_m), (600.0, 400.0, [30.0; 3]));
        assert_eq!(c.rates_bpcu, CASE_II);
        assert_eq!(c.path_loss_exponent, 3.0);
        assert_eq!(c.interference.as_ref().unwrap().power_dbm, Some(6.0));
        let Some(Sweep::Beta1Sq(grid)) = &c.sweep else { panic!() };
        assert!(grid.iter().any(|&b| b < 1.0 / 7.0) && grid.iter().any(|&b| b > 1.0 / 7.0));
    }

    #[test]
    fn fig6_keeps_ratio() {
        let c = figure_preset("fig6").unwrap();
        for v in c.variants().unwrap() {
            let k = v.layout.radius_ratio();
            assert!((k - 1.1 * MIN_RADIUS_RATIO).abs() < 1e-12);
        }
    }

    #[test]
    fn presets_survive_toml_round_trip() {
        for name in PRESET_NAMES {
            let c = figure_preset(name).unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap(), c, "{name}");
        }
    }
}
