//! Experiment harness: config files, figure presets, Monte Carlo sweeps and
//! CSV output.

mod config;
mod output;
mod presets;
mod sweep;

pub use config::{
    load_config, ConfigError, ExperimentConfig, InterferenceSettings, InterfererPower, Sweep, Variant,
    DEFAULT_BANDWIDTH_HZ, DEFAULT_NOISE_PSD_DBM_PER_HZ, DEFAULT_SEED, DEFAULT_TRIALS,
};
pub use output::{emit_csv, format_sig, parse_csv, read_csv, write_csv, CsvRow, CSV_HEADER};
pub use presets::{figure_preset, PRESET_NAMES};
pub use sweep::{
    analytic_overlay, count_outages, rate_loss_rows, run_experiment, run_outage_sweep, run_sum_rate_sweep, run_trial,
    OutageEstimate, OutagePoint, OutageTable, SumRateRow, TrialSetup,
};

/// `10^(dBm / 10)` milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Thermal noise power in mW for a PSD in dBm/Hz over `bandwidth_hz`.
pub fn noise_power_mw(psd_dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_mw(psd_dbm_per_hz + 10.0 * bandwidth_hz.log10())
}
