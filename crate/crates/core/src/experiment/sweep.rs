//! Monte Carlo sweeps over (sweep variant, power, scheme).
//!
//! Trial `t` at power index `p` of scheme `s` always draws from the stream
//! keyed by `(seed, s, p)` at stream `t`. The sweep variant is deliberately
//! not part of the key, so variants that differ only in a parameter (power
//! split, radii, interferer power) see common random numbers.

use rand::Rng;
use rayon::prelude::*;

use crate::analytics::{
    p0_noma_analytic, p0_oma_analytic, pj_noma_analytic, pj_noma_interference_analytic, AnalyticOutage,
};
use crate::channel::realize_channel;
use crate::geometry::{sample_placement, NetworkLayout, MIN_RADIUS_RATIO};
use crate::interference::{sample_interference, user_interference, InterferenceConfig};
use crate::schemes::{noma_trial, oma_trial, single_bs_noma_trial, Scheme, SchemeConfig, ServingBs};
use crate::stream::StreamKey;

use super::config::{ConfigError, ExperimentConfig, Variant};
use super::output::{table_rows, CsvRow};

/// Monte Carlo estimate of one outage probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: u64,
    /// Half width of the 95% normal-approximation interval.
    pub ci_half_width: f64,
    pub analytic: Option<AnalyticOutage>,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, analytic: Option<AnalyticOutage>) -> Self {
        assert!(trials > 0 && outages <= trials, "{outages} outages in {trials} trials");
        let p_hat = outages as f64 / trials as f64;
        Self { p_hat, trials, ci_half_width: 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(), analytic }
    }
}

/// Everything one trial needs.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub layout: NetworkLayout,
    pub scheme: Scheme,
    pub cfg: SchemeConfig,
    pub alpha: f64,
    pub interference: Option<InterferenceConfig>,
    pub shared_positions: bool,
}

/// Draws placement, fading and interference, and returns the outage flags of
/// users 0..=3. Users the scheme does not serve are reported as `false`.
pub fn run_trial<R: Rng + ?Sized>(setup: &TrialSetup, rng: &mut R) -> [bool; 4] {
    let placement = sample_placement(&setup.layout, rng);
    let ch = realize_channel(&setup.layout, placement, setup.alpha, rng).expect("exponent validated at setup");
    let alpha = setup.alpha;

    if setup.scheme == Scheme::NNoma {
        let interference = match &setup.interference {
            Some(ic) => {
                let users =
                    [placement.cell_edge, placement.near_users[0], placement.near_users[1], placement.near_users[2]];
                user_interference(ic, &users, alpha, setup.shared_positions, rng).expect("exponent validated at setup")
            }
            None => [0.0; 4],
        };
        return noma_trial(&ch, &setup.cfg, &interference).outage;
    }

    let i0 = match &setup.interference {
        Some(ic) if ic.intensity > 0.0 && ic.power_ratio > 0.0 => sample_interference(ic, alpha, rng),
        _ => 0.0,
    };
    let outage = match setup.scheme {
        Scheme::Oma => oma_trial(&ch, &setup.cfg, i0),
        Scheme::NomaNoComp => {
            let bs = rng.random_range(1..=3);
            single_bs_noma_trial(&ch, &setup.cfg, ServingBs::Fixed(bs), i0)
        }
        Scheme::NomaBestBs => single_bs_noma_trial(&ch, &setup.cfg, ServingBs::Best, i0),
        Scheme::NNoma => unreachable!(),
    };
    [outage, false, false, false]
}

/// Outage counts per user over trials `0..trials` of the stream `key`.
/// The result does not depend on the number of worker threads.
pub fn count_outages(setup: &TrialSetup, key: StreamKey, trials: u64) -> [u64; 4] {
    (0..trials)
        .into_par_iter()
        .fold(
            || [0u64; 4],
            |mut acc, t| {
                let flags = run_trial(setup, &mut key.trial_rng(t));
                for (a, f) in acc.iter_mut().zip(flags) {
                    *a += u64::from(f);
                }
                acc
            },
        )
        .reduce(|| [0u64; 4], |a, b| std::array::from_fn(|i| a[i] + b[i]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutagePoint {
    /// Index into [`OutageTable::variants`].
    pub variant: usize,
    pub power_index: usize,
    pub power_dbm: f64,
    pub scheme: Scheme,
    pub user: usize,
    pub estimate: OutageEstimate,
    pub regime_note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageTable {
    /// Name of the swept parameter, if any.
    pub sweep_param: Option<&'static str>,
    pub variants: Vec<Variant>,
    /// Ordered by variant, power, scheme (config order), user.
    pub points: Vec<OutagePoint>,
}

impl OutageTable {
    pub fn get(&self, variant: usize, power_index: usize, scheme: Scheme, user: usize) -> Option<&OutagePoint> {
        self.points
            .iter()
            .find(|p| p.variant == variant && p.power_index == power_index && p.scheme == scheme && p.user == user)
    }

    /// Points of one (variant, scheme, user) curve in power order.
    pub fn curve(&self, variant: usize, scheme: Scheme, user: usize) -> Vec<&OutagePoint> {
        self.points.iter().filter(|p| p.variant == variant && p.scheme == scheme && p.user == user).collect()
    }
}

fn interference_active(ic: &Option<InterferenceConfig>) -> bool {
    ic.as_ref().is_some_and(|c| c.intensity > 0.0 && c.power_ratio > 0.0)
}

/// Closed-form value for one curve point, when one applies, and the note
/// explaining which approximation (or why none) was used.
pub fn analytic_overlay(
    config: &ExperimentConfig,
    variant: &Variant,
    scheme: Scheme,
    user: usize,
    cfg: &SchemeConfig,
    interference: &Option<InterferenceConfig>,
) -> (Option<AnalyticOutage>, String) {
    let alpha = config.path_loss_exponent;
    let layout = &variant.layout;
    let with_interference = interference_active(interference);
    let result = match (scheme, user) {
        (Scheme::NNoma, 0) if with_interference => return (None, "no closed form under interference".into()),
        (Scheme::NNoma, 0) => p0_noma_analytic(layout, cfg, alpha),
        (Scheme::NNoma, j) if with_interference => {
            if alpha <= 2.0 {
                return (None, "interference closed form needs alpha > 2".into());
            }
            let ic = interference.as_ref().expect("checked above");
            pj_noma_interference_analytic(layout, cfg, ic, alpha, j, config.chebyshev_nodes)
        }
        (Scheme::NNoma, j) => pj_noma_analytic(layout, cfg, alpha, j),
        (Scheme::Oma, _) if with_interference => return (None, "no closed form under interference".into()),
        (Scheme::Oma, _) => p0_oma_analytic(layout.side_length(), alpha, cfg.thresholds()[0], cfg.snr).map(|mut a| {
            if layout.radius_ratio() > 1.2 * MIN_RADIUS_RATIO {
                a.regime_note.push_str("; R0/l outside the centroid regime");
            }
            a
        }),
        (Scheme::NomaNoComp | Scheme::NomaBestBs, _) => {
            let excess = 3.0 * cfg.beta0_sq + cfg.beta1_sq;
            return (None, format!("serving BS transmits {} P_s", super::format_sig(excess, 4)));
        }
    };
    match result {
        Ok(a) => {
            let note = a.regime_note.clone();
            (Some(a), note)
        }
        Err(e) => (None, format!("analytic unavailable: {e}")),
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, ConfigError> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::Invalid { field: "threads".into(), message: e.to_string() })?;
            Ok(pool.install(job))
        }
    }
}

/// Runs every (variant, power, scheme) point of the config.
/// `threads = None` uses the global rayon pool.
pub fn run_outage_sweep(config: &ExperimentConfig, threads: Option<usize>) -> Result<OutageTable, ConfigError> {
    config.validate()?;
    let variants = config.variants()?;
    let mut jobs = Vec::new();
    for (vi, variant) in variants.iter().enumerate() {
        for (pi, &power_dbm) in config.power_dbm.iter().enumerate() {
            let snr = config.snr(power_dbm);
            let cfg = variant
                .scheme_config(snr)
                .map_err(|e| ConfigError::Invalid { field: "beta0_sq".into(), message: e.to_string() })?;
            let interference = variant
                .interference_config(power_dbm)
                .map_err(|e| ConfigError::Invalid { field: "interference_power_dbm".into(), message: e.to_string() })?;
            for &scheme in &config.schemes {
                jobs.push((vi, pi, power_dbm, scheme, cfg, interference));
            }
        }
    }

    let points = with_pool(threads, || {
        let mut points = Vec::new();
        for (vi, pi, power_dbm, scheme, cfg, interference) in jobs {
            let variant = &variants[vi];
            let setup = TrialSetup {
                layout: variant.layout.clone(),
                scheme,
                cfg,
                alpha: config.path_loss_exponent,
                interference: interference.filter(|ic| ic.intensity > 0.0 && ic.power_ratio > 0.0),
                shared_positions: variant.interference.as_ref().is_some_and(|s| s.shared_positions),
            };
            let key = StreamKey::new(config.seed, scheme.tag(), pi as u64);
            let counts = count_outages(&setup, key, config.trials);
            log::debug!("variant {vi} power {power_dbm} dBm {scheme}: outage counts {counts:?} of {}", config.trials);
            for &user in scheme.users() {
                let (analytic, regime_note) = analytic_overlay(config, variant, scheme, user, &cfg, &interference);
                points.push(OutagePoint {
                    variant: vi,
                    power_index: pi,
                    power_dbm,
                    scheme,
                    user,
                    estimate: OutageEstimate::from_counts(counts[user], config.trials, analytic),
                    regime_note,
                });
            }
        }
        points
    })?;

    Ok(OutageTable { sweep_param: config.sweep.as_ref().map(|s| s.param()), variants, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateRow {
    pub variant: usize,
    pub power_index: usize,
    pub power_dbm: f64,
    pub scheme: Scheme,
    /// `(user, P_out)` for each served user.
    pub per_user_outage: Vec<(usize, f64)>,
    pub outage_sum_rate: f64,
}

/// `sum_j (1 - P_j) r_j` over the users each scheme serves, from the MC estimates.
pub fn sum_rate_rows(table: &OutageTable) -> Vec<SumRateRow> {
    let mut rows: Vec<SumRateRow> = Vec::new();
    for p in &table.points {
        let rate = table.variants[p.variant].rates[p.user];
        let same = rows.last().is_some_and(|r: &SumRateRow| {
            r.variant == p.variant && r.power_index == p.power_index && r.scheme == p.scheme
        });
        if !same {
            rows.push(SumRateRow {
                variant: p.variant,
                power_index: p.power_index,
                power_dbm: p.power_dbm,
                scheme: p.scheme,
                per_user_outage: Vec::new(),
                outage_sum_rate: 0.0,
            });
        }
        let row = rows.last_mut().expect("pushed above");
        row.per_user_outage.push((p.user, p.estimate.p_hat));
        row.outage_sum_rate += (1.0 - p.estimate.p_hat) * rate;
    }
    rows
}

pub fn run_sum_rate_sweep(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<SumRateRow>, ConfigError> {
    Ok(sum_rate_rows(&run_outage_sweep(config, threads)?))
}

/// Cell-edge rate given up by N-NOMA relative to OMA,
/// `(1 - P~0) r0 - (1 - P0) r0`, per (variant, power index). Empty unless
/// both schemes were run.
pub fn rate_loss_rows(table: &OutageTable) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for p in table.points.iter().filter(|p| p.scheme == Scheme::Oma) {
        if let Some(n) = table.get(p.variant, p.power_index, Scheme::NNoma, 0) {
            let r0 = table.variants[p.variant].rates[0];
            out.push((p.variant, p.power_index, (n.estimate.p_hat - p.estimate.p_hat) * r0));
        }
    }
    out
}

/// Full run: sweep, sum rates and CSV rows.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<CsvRow>, ConfigError> {
    let table = run_outage_sweep(config, threads)?;
    Ok(table_rows(&table))
}
