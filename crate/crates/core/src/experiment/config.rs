//! Experiment configuration files.
//!
//! A config is a flat TOML document: scalars and lists only, no tables.
//! Units are part of the key names. At most one `sweep_*` key may be given;
//! it adds an outer sweep over that parameter on top of the power sweep.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::DEFAULT_CHEBYSHEV_NODES;
use crate::error::Error as ModelError;
use crate::geometry::NetworkLayout;
use crate::interference::{InterferenceConfig, DEFAULT_WINDOW_M};
use crate::schemes::{Scheme, SchemeConfig};

use super::{dbm_to_mw, noise_power_mw};

pub const DEFAULT_NOISE_PSD_DBM_PER_HZ: f64 = -170.0;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 1e7;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse config: {0}")]
    Parse(String),

    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("unknown preset {0:?} (expected one of fig2 .. fig9)")]
    UnknownPreset(String),
}

impl ConfigError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid { field: field.into(), message: message.into() }
    }

    fn from_model(field: &str, err: ModelError) -> Self {
        match &err {
            ModelError::OutOfRange { .. } if field.starts_with("sweep_") => Self::invalid(field, err.to_string()),
            ModelError::OutOfRange { name, .. } => Self::invalid(config_key(name), err.to_string()),
            ModelError::PowerSplit { .. } => Self::invalid(field, err.to_string()),
            ModelError::Index { .. } => Self::invalid(field, err.to_string()),
        }
    }

    /// Whether the config itself was rejected, as opposed to an I/O failure.
    pub fn is_rejection(&self) -> bool {
        !matches!(self, Self::Io { .. })
    }
}

/// Config key for a model parameter name, so rejections point at the file.
fn config_key(model_name: &str) -> &str {
    match model_name {
        "side_length_l" => "side_length_m",
        "big_radius_R0" => "big_radius_m",
        "near_radius_Rj" => "near_radii_m",
        "alpha" => "path_loss_exponent",
        "interference_intensity" => "interference_intensity_per_m2",
        other => other,
    }
}

/// Transmit power of the interferers; `None` means no interference.
pub type InterfererPower = Option<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSettings {
    pub power_dbm: InterfererPower,
    pub intensity_per_m2: f64,
    pub window_m: f64,
    /// All four users see the same interferer positions.
    pub shared_positions: bool,
}

/// The optional outer sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// `beta1^2` values; `beta0^2 = 1 - beta1^2`.
    Beta1Sq(Vec<f64>),
    /// Side lengths; `R0` scales along so `R0 / l` stays fixed.
    SideLength(Vec<f64>),
    /// Radius applied to all three near-user discs.
    NearRadius(Vec<f64>),
    InterferencePower(Vec<InterfererPower>),
    Rates(Vec<[f64; 4]>),
}

impl Sweep {
    pub fn key(&self) -> &'static str {
        match self {
            Sweep::Beta1Sq(_) => "sweep_beta1_sq",
            Sweep::SideLength(_) => "sweep_side_length_m",
            Sweep::NearRadius(_) => "sweep_near_radius_m",
            Sweep::InterferencePower(_) => "sweep_interference_power_dbm",
            Sweep::Rates(_) => "sweep_rates_bpcu",
        }
    }

    /// Short parameter name written to the CSV.
    pub fn param(&self) -> &'static str {
        self.key().trim_start_matches("sweep_")
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Beta1Sq(v) | Sweep::SideLength(v) | Sweep::NearRadius(v) => v.len(),
            Sweep::InterferencePower(v) => v.len(),
            Sweep::Rates(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub side_length_m: f64,
    pub big_radius_m: f64,
    pub near_radii_m: [f64; 3],
    pub path_loss_exponent: f64,
    pub beta0_sq: f64,
    pub rates_bpcu: [f64; 4],
    /// Per-BS transmit powers `P_s`.
    pub power_dbm: Vec<f64>,
    pub noise_psd_dbm_per_hz: f64,
    pub bandwidth_hz: f64,
    pub interference: Option<InterferenceSettings>,
    pub schemes: Vec<Scheme>,
    pub trials: u64,
    pub seed: u64,
    pub chebyshev_nodes: usize,
    pub sweep: Option<Sweep>,
}

/// One fully resolved parameter set of the outer sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    /// Sweep value as written to the CSV; empty without a sweep.
    pub label: String,
    pub layout: NetworkLayout,
    pub beta0_sq: f64,
    pub beta1_sq: f64,
    pub rates: [f64; 4],
    pub interference: Option<InterferenceSettings>,
}

impl Variant {
    pub fn scheme_config(&self, snr: f64) -> crate::Result<SchemeConfig> {
        SchemeConfig::with_split(self.beta0_sq, self.beta1_sq, self.rates, snr)
    }

    /// Interferer process at per-BS power `power_dbm`, if interference is on.
    pub fn interference_config(&self, power_dbm: f64) -> crate::Result<Option<InterferenceConfig>> {
        let Some(settings) = &self.interference else {
            return Ok(None);
        };
        let Some(pi_dbm) = settings.power_dbm else {
            return Ok(None);
        };
        let ratio = dbm_to_mw(pi_dbm) / dbm_to_mw(power_dbm);
        InterferenceConfig::new(settings.intensity_per_m2, ratio, settings.window_m).map(Some)
    }
}

impl ExperimentConfig {
    /// `rho = P_s / sigma^2`.
    pub fn snr(&self, power_dbm: f64) -> f64 {
        dbm_to_mw(power_dbm) / noise_power_mw(self.noise_psd_dbm_per_hz, self.bandwidth_hz)
    }

    pub fn noise_power_mw(&self) -> f64 {
        noise_power_mw(self.noise_psd_dbm_per_hz, self.bandwidth_hz)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let config = raw.resolve()?;
        config.validate()?;
        Ok(config)
    }

    /// Writes the config back out in the file format.
    pub fn to_toml_string(&self) -> String {
        let raw = RawConfig::from(self);
        toml::to_string(&raw).expect("flat config always serializes")
    }

    /// All sweep variants, in order. A config without a sweep has one.
    pub fn variants(&self) -> Result<Vec<Variant>, ConfigError> {
        let layout = |l: f64, r0: f64, rj: [f64; 3], field: &str| {
            NetworkLayout::new(l, r0, rj).map_err(|e| ConfigError::from_model(field, e))
        };
        let base_layout = layout(self.side_length_m, self.big_radius_m, self.near_radii_m, "side_length_m")?;
        let base = Variant {
            label: String::new(),
            layout: base_layout,
            beta0_sq: self.beta0_sq,
            beta1_sq: 1.0 - self.beta0_sq,
            rates: self.rates_bpcu,
            interference: self.interference.clone(),
        };
        let Some(sweep) = &self.sweep else {
            return Ok(vec![base]);
        };
        let mut out = Vec::with_capacity(sweep.len());
        match sweep {
            Sweep::Beta1Sq(values) => {
                for &b1 in values {
                    if !(0.0..1.0).contains(&b1) {
                        return Err(ConfigError::invalid(sweep.key(), format!("beta1^2 = {b1} outside [0, 1)")));
                    }
                    out.push(Variant { label: fmt_value(b1), beta0_sq: 1.0 - b1, beta1_sq: b1, ..base.clone() });
                }
            }
            Sweep::SideLength(values) => {
                let ratio = self.big_radius_m / self.side_length_m;
                for &l in values {
                    out.push(Variant {
                        label: fmt_value(l),
                        layout: layout(l, ratio * l, self.near_radii_m, sweep.key())?,
                        ..base.clone()
                    });
                }
            }
            Sweep::NearRadius(values) => {
                for &r in values {
                    out.push(Variant {
                        label: fmt_value(r),
                        layout: layout(self.side_length_m, self.big_radius_m, [r; 3], sweep.key())?,
                        ..base.clone()
                    });
                }
            }
            Sweep::InterferencePower(values) => {
                let settings = self
                    .interference
                    .clone()
                    .ok_or_else(|| ConfigError::invalid(sweep.key(), "requires interference_intensity_per_m2"))?;
                for &p in values {
                    out.push(Variant {
                        label: p.map_or_else(|| "off".to_string(), fmt_value),
                        interference: Some(InterferenceSettings { power_dbm: p, ..settings.clone() }),
                        ..base.clone()
                    });
                }
            }
            Sweep::Rates(values) => {
                for rates in values {
                    out.push(Variant { label: rates.map(fmt_value).join("/"), rates: *rates, ..base.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Checks every invariant the simulator and the analytics rely on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let alpha = self.path_loss_exponent;
        if !(alpha >= 2.0) || !alpha.is_finite() {
            return Err(ConfigError::invalid("path_loss_exponent", format!("alpha = {alpha}, expected alpha >= 2")));
        }
        if !(0.0 < self.beta0_sq && self.beta0_sq <= 1.0) {
            return Err(ConfigError::invalid("beta0_sq", format!("{} outside (0, 1]", self.beta0_sq)));
        }
        if self.power_dbm.is_empty() {
            return Err(ConfigError::invalid("power_dbm_list", "must list at least one power"));
        }
        if let Some(p) = self.power_dbm.iter().find(|p| !p.is_finite()) {
            return Err(ConfigError::invalid("power_dbm_list", format!("{p} is not a finite power")));
        }
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(ConfigError::invalid(
                "bandwidth_hz",
                format!("{} is not a positive bandwidth", self.bandwidth_hz),
            ));
        }
        if !self.noise_psd_dbm_per_hz.is_finite() {
            return Err(ConfigError::invalid("noise_psd_dbm_per_hz", "must be finite"));
        }
        if self.trials == 0 {
            return Err(ConfigError::invalid("trials", "must be at least 1"));
        }
        if self.chebyshev_nodes == 0 {
            return Err(ConfigError::invalid("gauss_chebyshev_nodes", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::invalid("schemes", "must list at least one scheme"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(ConfigError::invalid("schemes", format!("{s} listed twice")));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(ConfigError::invalid(sweep.key(), "must list at least one value"));
            }
        }
        for variant in self.variants()? {
            let field = match &self.sweep {
                Some(Sweep::Beta1Sq(_)) => "sweep_beta1_sq",
                Some(Sweep::Rates(_)) => "sweep_rates_bpcu",
                _ => "beta0_sq",
            };
            for &p in &self.power_dbm {
                variant.scheme_config(self.snr(p)).map_err(|e| ConfigError::from_model(field, e))?;
                variant.interference_config(p).map_err(|e| ConfigError::from_model("interference_power_dbm", e))?;
            }
        }
        Ok(())
    }

    /// Human-readable one-line summary for logs.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "l = {} m, R0 = {} m, R_j = {:?} m, alpha = {}, beta0^2 = {}, rates = {:?}, {} powers, {} trials",
            self.side_length_m,
            self.big_radius_m,
            self.near_radii_m,
            self.path_loss_exponent,
            self.beta0_sq,
            self.rates_bpcu,
            self.power_dbm.len(),
            self.trials
        );
        if let Some(sweep) = &self.sweep {
            let _ = write!(s, ", sweeping {} over {} values", sweep.param(), sweep.len());
        }
        s
    }
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    ExperimentConfig::from_toml_str(&text)
}

/// Compact decimal form used for sweep labels.
pub(crate) fn fmt_value(v: f64) -> String {
    super::output::format_sig(v, 8)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrThree {
    One(f64),
    Three(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum PowerSetting {
    Dbm(f64),
    Off(OffKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OffKeyword {
    Off,
}

impl PowerSetting {
    fn resolve(self) -> InterfererPower {
        match self {
            PowerSetting::Dbm(p) => Some(p),
            PowerSetting::Off(_) => None,
        }
    }

    fn from_power(p: InterfererPower) -> Self {
        p.map_or(PowerSetting::Off(OffKeyword::Off), PowerSetting::Dbm)
    }
}

fn default_noise() -> f64 {
    DEFAULT_NOISE_PSD_DBM_PER_HZ
}
fn default_bandwidth() -> f64 {
    DEFAULT_BANDWIDTH_HZ
}
fn default_schemes() -> Vec<String> {
    vec![Scheme::NNoma.name().to_string()]
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_nodes() -> usize {
    DEFAULT_CHEBYSHEV_NODES
}

/// On-disk representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    side_length_m: f64,
    big_radius_m: f64,
    near_radii_m: OneOrThree,
    path_loss_exponent: f64,
    beta0_sq: f64,
    rates_bpcu: Vec<f64>,
    power_dbm_list: Vec<f64>,
    #[serde(default = "default_noise")]
    noise_psd_dbm_per_hz: f64,
    #[serde(default = "default_bandwidth")]
    bandwidth_hz: f64,
    #[serde(default = "default_schemes")]
    schemes: Vec<String>,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_nodes")]
    gauss_chebyshev_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interference_power_dbm: Option<PowerSetting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interference_intensity_per_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interference_window_m: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    share_interferer_positions: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep_beta1_sq: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep_side_length_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep_near_radius_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep_interference_power_dbm: Option<Vec<PowerSetting>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep_rates_bpcu: Option<Vec<Vec<f64>>>,
}

fn four_rates(field: &str, rates: &[f64]) -> Result<[f64; 4], ConfigError> {
    <[f64; 4]>::try_from(rates)
        .map_err(|_| ConfigError::invalid(field, format!("expected 4 rates (r0..r3), got {}", rates.len())))
}

impl RawConfig {
    fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let near_radii_m = match self.near_radii_m {
            OneOrThree::One(r) => [r; 3],
            OneOrThree::Three(v) => <[f64; 3]>::try_from(v.as_slice())
                .map_err(|_| ConfigError::invalid("near_radii_m", format!("expected 1 or 3 radii, got {}", v.len())))?,
        };
        let rates_bpcu = four_rates("rates_bpcu", &self.rates_bpcu)?;
        let schemes = self
            .schemes
            .iter()
            .map(|s| s.parse::<Scheme>().map_err(|e| ConfigError::invalid("schemes", e)))
            .collect::<Result<Vec<_>, _>>()?;

        let wants_interference = self.interference_power_dbm.is_some() || self.sweep_interference_power_dbm.is_some();
        let interference = match (wants_interference, self.interference_intensity_per_m2) {
            (false, None) => None,
            (false, Some(_)) => {
                return Err(ConfigError::invalid(
                    "interference_power_dbm",
                    "interference_intensity_per_m2 is set but no interferer power is given",
                ))
            }
            (true, None) => {
                return Err(ConfigError::invalid(
                    "interference_intensity_per_m2",
                    "required when an interferer power is given",
                ))
            }
            (true, Some(intensity)) => {
                if !(intensity >= 0.0) || !intensity.is_finite() {
                    return Err(ConfigError::invalid(
                        "interference_intensity_per_m2",
                        format!("{intensity}, expected lambda_I >= 0"),
                    ));
                }
                Some(InterferenceSettings {
                    power_dbm: self.interference_power_dbm.and_then(PowerSetting::resolve),
                    intensity_per_m2: intensity,
                    window_m: self.interference_window_m.unwrap_or(DEFAULT_WINDOW_M),
                    shared_positions: self.share_interferer_positions,
                })
            }
        };
        if let Some(settings) = &interference {
            if !(settings.window_m > 0.0) || !settings.window_m.is_finite() {
                return Err(ConfigError::invalid(
                    "interference_window_m",
                    format!("{}, expected > 0", settings.window_m),
                ));
            }
        }

        let mut sweeps = Vec::new();
        if let Some(v) = self.sweep_beta1_sq {
            sweeps.push(Sweep::Beta1Sq(v));
        }
        if let Some(v) = self.sweep_side_length_m {
            sweeps.push(Sweep::SideLength(v));
        }
        if let Some(v) = self.sweep_near_radius_m {
            sweeps.push(Sweep::NearRadius(v));
        }
        if let Some(v) = self.sweep_interference_power_dbm {
            sweeps.push(Sweep::InterferencePower(v.into_iter().map(PowerSetting::resolve).collect()));
        }
        if let Some(v) = self.sweep_rates_bpcu {
            let cases = v.iter().map(|r| four_rates("sweep_rates_bpcu", r)).collect::<Result<Vec<_>, _>>()?;
            sweeps.push(Sweep::Rates(cases));
        }
        if sweeps.len() > 1 {
            let keys: Vec<_> = sweeps.iter().map(Sweep::key).collect();
            return Err(ConfigError::invalid(keys[1], format!("only one sweep key allowed, got {}", keys.join(", "))));
        }

        Ok(ExperimentConfig {
            side_length_m: self.side_length_m,
            big_radius_m: self.big_radius_m,
            near_radii_m,
            path_loss_exponent: self.path_loss_exponent,
            beta0_sq: self.beta0_sq,
            rates_bpcu,
            power_dbm: self.power_dbm_list,
            noise_psd_dbm_per_hz: self.noise_psd_dbm_per_hz,
            bandwidth_hz: self.bandwidth_hz,
            interference,
            schemes,
            trials: self.trials,
            seed: self.seed,
            chebyshev_nodes: self.gauss_chebyshev_nodes,
            sweep: sweeps.pop(),
        })
    }
}

impl From<&ExperimentConfig> for RawConfig {
    fn from(c: &ExperimentConfig) -> Self {
        let [r1, r2, r3] = c.near_radii_m;
        let near_radii_m =
            if r1 == r2 && r2 == r3 { OneOrThree::One(r1) } else { OneOrThree::Three(c.near_radii_m.to_vec()) };
        let mut raw = RawConfig {
            side_length_m: c.side_length_m,
            big_radius_m: c.big_radius_m,
            near_radii_m,
            path_loss_exponent: c.path_loss_exponent,
            beta0_sq: c.beta0_sq,
            rates_bpcu: c.rates_bpcu.to_vec(),
            power_dbm_list: c.power_dbm.clone(),
            noise_psd_dbm_per_hz: c.noise_psd_dbm_per_hz,
            bandwidth_hz: c.bandwidth_hz,
            schemes: c.schemes.iter().map(|s| s.name().to_string()).collect(),
            trials: c.trials,
            seed: c.seed,
            gauss_chebyshev_nodes: c.chebyshev_nodes,
            interference_power_dbm: None,
            interference_intensity_per_m2: None,
            interference_window_m: None,
            share_interferer_positions: false,
            sweep_beta1_sq: None,
            sweep_side_length_m: None,
            sweep_near_radius_m: None,
            sweep_interference_power_dbm: None,
            sweep_rates_bpcu: None,
        };
        if let Some(i) = &c.interference {
            let swept = matches!(c.sweep, Some(Sweep::InterferencePower(_)));
            if !swept {
                raw.interference_power_dbm = Some(PowerSetting::from_power(i.power_dbm));
            }
            raw.interference_intensity_per_m2 = Some(i.intensity_per_m2);
            raw.interference_window_m = Some(i.window_m);
            raw.share_interferer_positions = i.shared_positions;
        }
        match &c.sweep {
            None => {}
            Some(Sweep::Beta1Sq(v)) => raw.sweep_beta1_sq = Some(v.clone()),
            Some(Sweep::SideLength(v)) => raw.sweep_side_length_m = Some(v.clone()),
            Some(Sweep::NearRadius(v)) => raw.sweep_near_radius_m = Some(v.clone()),
            Some(Sweep::InterferencePower(v)) => {
                raw.sweep_interference_power_dbm = Some(v.iter().copied().map(PowerSetting::from_power).collect())
            }
            Some(Sweep::Rates(v)) => raw.sweep_rates_bpcu = Some(v.iter().map(|r| r.to_vec()).collect()),
        }
        raw
    }
}
