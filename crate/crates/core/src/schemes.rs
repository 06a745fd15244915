//! Per-trial SINRs and outage events.
//!
//! All powers are normalized by the per-BS transmit power `P_s`: noise enters
//! as `1 / rho` and interference `I_j` is already divided by `P_s`. A user is in
//! outage when its SINR is strictly below the threshold `eta = 2^r - 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{out_of_range, Error, Result};

/// Power split, target rates and transmit SNR shared by every scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub beta0_sq: f64,
    pub beta1_sq: f64,
    /// Target rates `r_0..r_3` in bits per channel use.
    pub rates: [f64; 4],
    /// `rho = P_s / sigma^2`.
    pub snr: f64,
}

impl SchemeConfig {
    /// Builds a config with `beta1^2 = 1 - beta0^2`.
    pub fn new(beta0_sq: f64, rates: [f64; 4], snr: f64) -> Result<Self> {
        if !(beta0_sq > 0.0 && beta0_sq <= 1.0) {
            return Err(out_of_range("beta0_sq", beta0_sq, "0 < beta0^2 <= 1"));
        }
        Self::with_split(beta0_sq, 1.0 - beta0_sq, rates, snr)
    }

    pub fn with_split(beta0_sq: f64, beta1_sq: f64, rates: [f64; 4], snr: f64) -> Result<Self> {
        if !(beta0_sq > 0.0 && beta0_sq <= 1.0) {
            return Err(out_of_range("beta0_sq", beta0_sq, "0 < beta0^2 <= 1"));
        }
        if !(0.0..1.0).contains(&beta1_sq) {
            return Err(out_of_range("beta1_sq", beta1_sq, "0 <= beta1^2 < 1"));
        }
        if (beta0_sq + beta1_sq - 1.0).abs() > 1e-12 {
            return Err(out_of_range("beta1_sq", beta1_sq, format!("beta0^2 + beta1^2 = 1 (beta0^2 = {beta0_sq})")));
        }
        for &r in &rates {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(out_of_range("rates_bpcu", r, "r_j >= 0"));
            }
        }
        if !(snr > 0.0) || snr.is_nan() {
            return Err(out_of_range("transmit_snr", snr, "rho > 0"));
        }
        let cfg = Self { beta0_sq, beta1_sq, rates, snr };
        let eta0 = cfg.thresholds()[0];
        if !(cfg.cell_edge_margin() > 0.0) {
            return Err(Error::PowerSplit { beta0_sq, beta1_sq, eta0 });
        }
        Ok(cfg)
    }

    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        Self::with_split(self.beta0_sq, self.beta1_sq, self.rates, snr)
    }

    /// `eta_j = 2^{r_j} - 1`.
    pub fn thresholds(&self) -> [f64; 4] {
        thresholds(&self.rates)
    }

    /// `beta0^2 - beta1^2 eta0`, positive for every accepted config.
    pub fn cell_edge_margin(&self) -> f64 {
        self.beta0_sq - self.beta1_sq * (self.rates[0].exp2() - 1.0)
    }

    pub fn noise(&self) -> f64 {
        1.0 / self.snr
    }
}

/// `eta_j = 2^{r_j} - 1` for each rate.
pub fn thresholds(rates: &[f64; 4]) -> [f64; 4] {
    rates.map(|r| r.exp2() - 1.0)
}

/// User 0 after distributed analog beamforming: the three BS contributions
/// add in magnitude.
pub fn sinr_cell_edge(ch: &ChannelRealization, cfg: &SchemeConfig, i0: f64) -> f64 {
    let mut amp = 0.0;
    let mut power = 0.0;
    for i in 0..3 {
        let p = ch.power(i, 0);
        amp += p.sqrt();
        power += p;
    }
    amp * amp * cfg.beta0_sq / (power * cfg.beta1_sq + i0 + cfg.noise())
}

fn check_near_user(j: usize) {
    assert!((1..=3).contains(&j), "near user index must be 1, 2 or 3, got {j}");
}

/// `h~_ij = exp(-i arg h_i0) h_ij`: the channel seen by user `j` once BS `i`
/// has co-phased its beam toward user 0.
#[inline]
fn rotated(ch: &ChannelRealization, i: usize, j: usize) -> Complex64 {
    let h0 = ch.gains[i][0];
    let n = h0.norm();
    if n > 0.0 {
        ch.gains[i][j] * (h0.conj() / n)
    } else {
        ch.gains[i][j]
    }
}

/// Near user `j` (1..=3) decoding the cell-edge message first.
///
/// # Panics
/// If `j` is not 1, 2 or 3.
pub fn sinr_near_sic(ch: &ChannelRealization, j: usize, cfg: &SchemeConfig, ij: f64) -> f64 {
    check_near_user(j);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = 0.0;
    for i in 0..3 {
        sum += rotated(ch, i, j);
        power += ch.power(i, j);
    }
    sum.norm_sqr() * cfg.beta0_sq / (power * cfg.beta1_sq + ij + cfg.noise())
}

/// Near user `j` (1..=3) decoding its own message after SIC; the other BSs'
/// near-user messages remain as interference.
///
/// # Panics
/// If `j` is not 1, 2 or 3.
pub fn sinr_near_own(ch: &ChannelRealization, j: usize, cfg: &SchemeConfig, ij: f64) -> f64 {
    check_near_user(j);
    let own = ch.power(j - 1, j);
    let cross: f64 = (0..3).filter(|&i| i != j - 1).map(|i| ch.power(i, j)).sum();
    own * cfg.beta1_sq / (cross * cfg.beta1_sq + ij + cfg.noise())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub sinr_cell_edge: f64,
    /// SIC stage SINR at near users 1..=3.
    pub sinr_sic: [f64; 3],
    pub sinr_near_own: [f64; 3],
    /// `outage[j]` for user `j`.
    pub outage: [bool; 4],
}

/// One N-NOMA trial. `interference[j]` is the normalized interference at user `j`.
pub fn noma_trial(ch: &ChannelRealization, cfg: &SchemeConfig, interference: &[f64; 4]) -> TrialOutcome {
    let eta = cfg.thresholds();
    let sinr_cell_edge = sinr_cell_edge(ch, cfg, interference[0]);
    let sinr_sic = [1, 2, 3].map(|j| sinr_near_sic(ch, j, cfg, interference[j]));
    let sinr_near_own = [1, 2, 3].map(|j| sinr_near_own(ch, j, cfg, interference[j]));
    let mut outage = [sinr_cell_edge < eta[0], false, false, false];
    for j in 1..=3 {
        outage[j] = sinr_sic[j - 1] < eta[0] || sinr_near_own[j - 1] < eta[j];
    }
    TrialOutcome { sinr_cell_edge, sinr_sic, sinr_near_own, outage }
}

/// SNR of the OMA benchmark: the three BSs serve user 0 alone with digital
/// beamforming over a third of the resource, total power `3 P_s`.
pub fn oma_sinr(ch: &ChannelRealization, cfg: &SchemeConfig, i0: f64) -> f64 {
    let power: f64 = (0..3).map(|i| ch.power(i, 0)).sum();
    3.0 * power / (i0 + cfg.noise())
}

/// Outage of user 0 under OMA: `log2(1 + SNR) < r_0`.
pub fn oma_trial(ch: &ChannelRealization, cfg: &SchemeConfig, i0: f64) -> bool {
    (1.0 + oma_sinr(ch, cfg, i0)).log2() < cfg.rates[0]
}

/// Serving-BS rule for the single-BS NOMA benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingBs {
    /// BS `i` (1-based) serves user 0.
    Fixed(usize),
    /// The BS with the strongest channel to user 0.
    Best,
}

fn serving_index(ch: &ChannelRealization, mode: ServingBs) -> usize {
    match mode {
        ServingBs::Fixed(i) => {
            assert!((1..=3).contains(&i), "serving BS must be 1, 2 or 3, got {i}");
            i - 1
        }
        ServingBs::Best => (0..3).max_by(|&a, &b| ch.power(a, 0).total_cmp(&ch.power(b, 0))).unwrap_or(0),
    }
}

/// SINR of user 0 when a single BS serves it by NOMA at power `3 beta0^2 P_s`
/// and the other two BSs transmit to their own users at `P_s`.
pub fn single_bs_sinr(ch: &ChannelRealization, cfg: &SchemeConfig, mode: ServingBs, i0: f64) -> f64 {
    let b = serving_index(ch, mode);
    let served = ch.power(b, 0);
    let others: f64 = (0..3).filter(|&i| i != b).map(|i| ch.power(i, 0)).sum();
    3.0 * cfg.beta0_sq * served / (cfg.beta1_sq * served + others + i0 + cfg.noise())
}

pub fn single_bs_noma_trial(ch: &ChannelRealization, cfg: &SchemeConfig, mode: ServingBs, i0: f64) -> bool {
    single_bs_sinr(ch, cfg, mode, i0) < cfg.thresholds()[0]
}

/// Schemes known to the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    NNoma,
    Oma,
    /// Single-BS NOMA, serving BS drawn uniformly per trial.
    NomaNoComp,
    /// Single-BS NOMA with best-BS selection.
    NomaBestBs,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::NNoma, Scheme::Oma, Scheme::NomaNoComp, Scheme::NomaBestBs];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::NNoma => "n-noma",
            Scheme::Oma => "oma",
            Scheme::NomaNoComp => "noma-no-comp",
            Scheme::NomaBestBs => "noma-best-bs",
        }
    }

    /// Users the scheme serves.
    pub fn users(self) -> &'static [usize] {
        match self {
            Scheme::NNoma => &[0, 1, 2, 3],
            _ => &[0],
        }
    }

    /// Stream tag; part of the per-trial RNG key.
    pub fn tag(self) -> u64 {
        match self {
            Scheme::NNoma => 1,
            Scheme::Oma => 2,
            Scheme::NomaNoComp => 3,
            Scheme::NomaBestBs => 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s.trim())
            .ok_or_else(|| format!("unknown scheme {s:?} (expected n-noma, oma, noma-no-comp or noma-best-bs)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{realize_channel, sample_complex_gaussian};
    use crate::geometry::{sample_placement, NetworkLayout, UserPlacement};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn channel(gains: [[Complex64; 4]; 3]) -> ChannelRealization {
        ChannelRealization::from_gains(gains, UserPlacement::default())
    }

    fn cfg(beta0_sq: f64, rates: [f64; 4], snr: f64) -> SchemeConfig {
        SchemeConfig::new(beta0_sq, rates, snr).unwrap()
    }

    #[test]
    fn thresholds_from_rates() {
        assert_eq!(thresholds(&[1.0, 2.0, 0.0, 0.5]), [1.0, 3.0, 0.0, 2f64.sqrt() - 1.0]);
    }

    #[test]
    fn standing_assumption_rejected() {
        let err = SchemeConfig::new(0.5, [2.0, 1.0, 1.0, 1.0], 1.0).unwrap_err();
        assert!(matches!(err, Error::PowerSplit { .. }));
        assert!(SchemeConfig::new(0.75, [2.0, 1.0, 1.0, 1.0], 1.0).is_err());
        assert!(SchemeConfig::new(0.8, [2.0, 1.0, 1.0, 1.0], 1.0).is_ok());
        assert!(SchemeConfig::with_split(0.8, 0.3, [1.0; 4], 1.0).is_err());
        assert!(SchemeConfig::new(0.8, [1.0; 4], 0.0).is_err());
    }

    #[test]
    fn cell_edge_examples() {
        let h = 0.37;
        let ch = channel([[real(h); 4]; 3]);
        let c = cfg(1.0, [1.0; 4], 5.0);
        assert!((sinr_cell_edge(&ch, &c, 0.0) - 9.0 * h * h * 5.0).abs() < 1e-12);

        let ch = channel([[real(1.0); 4]; 3]);
        let c = cfg(0.8, [1.0; 4], 1.0);
        assert!((sinr_cell_edge(&ch, &c, 0.0) - 4.5).abs() < 1e-12);
        assert!(sinr_cell_edge(&ch, &c, 1e300) < 1e-290);
    }

    #[test]
    fn near_sic_examples() {
        let mut g = [[real(0.0); 4]; 3];
        g[1][2] = Complex64::new(0.6, -0.8);
        for row in &mut g {
            row[0] = real(1.0);
        }
        let c = cfg(1.0, [1.0; 4], 3.0);
        assert!((sinr_near_sic(&channel(g), 2, &c, 0.0) - 3.0).abs() < 1e-12);

        let mut g = [[real(1.0); 4]; 3];
        // arbitrary phases toward user 0, chosen so the rotated gains are all 1
        for (i, row) in g.iter_mut().enumerate() {
            let phase = Complex64::from_polar(1.0, 0.7 * i as f64 + 0.2);
            row[0] = phase * 2.0;
            row[1] = phase;
        }
        let c = cfg(0.8, [1.0; 4], 1.0);
        assert!((sinr_near_sic(&channel(g), 1, &c, 0.0) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn near_own_examples() {
        let mut g = [[real(0.0); 4]; 3];
        g[0][1] = real(2.0);
        let c = cfg(0.8, [1.0; 4], 10.0);
        assert!((sinr_near_own(&channel(g), 1, &c, 0.0) - 4.0 * 0.2 * 10.0).abs() < 1e-12);

        let c1 = cfg(1.0, [0.0; 4], 10.0);
        assert_eq!(sinr_near_own(&channel(g), 1, &c1, 0.0), 0.0);

        let mut g = [[real(1.0); 4]; 3];
        g[2][3] = real(2.0);
        let c = cfg(0.8, [1.0; 4], 10.0);
        assert!((sinr_near_own(&channel(g), 3, &c, 0.0) - 1.6).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "near user index")]
    fn near_user_zero_panics() {
        let c = cfg(0.8, [1.0; 4], 1.0);
        sinr_near_own(&channel([[real(1.0); 4]; 3]), 0, &c, 0.0);
    }

    #[test]
    fn boundary_is_not_outage() {
        // amplitudes 1, 1/2, 1/2 add to 2; beta1 = 0 and rho = 1/4 give SINR0 = 1 = eta0 for r0 = 1
        let mut g = [[real(0.5); 4]; 3];
        g[0][0] = real(1.0);
        let c = cfg(1.0, [1.0, 0.0, 0.0, 0.0], 0.25);
        let out = noma_trial(&channel(g), &c, &[0.0; 4]);
        assert_eq!(out.sinr_cell_edge, 1.0);
        assert!(!out.outage[0]);
    }

    #[test]
    fn sic_failure_means_outage() {
        // strong own path, SIC stage SINR starved by interference only at the SIC stage threshold
        let mut g = [[real(0.0); 4]; 3];
        for row in &mut g {
            row[0] = real(1.0);
        }
        g[0][1] = real(1.0);
        let c = cfg(0.9, [3.0, 0.1, 0.1, 0.1], 10.0);
        let out = noma_trial(&channel(g), &c, &[0.0; 4]);
        assert!(out.sinr_sic[0] < 7.0);
        assert!(out.sinr_near_own[0] > c.thresholds()[1]);
        assert!(out.outage[1]);
    }

    #[test]
    fn oma_boundary() {
        let mut g = [[real(0.0); 4]; 3];
        g[0][0] = real(1.0);
        let c = cfg(0.8, [2.0, 1.0, 1.0, 1.0], 1.0);
        assert_eq!(oma_sinr(&channel(g), &c, 0.0), 3.0);
        assert!(!oma_trial(&channel(g), &c, 0.0));
        let weak = cfg(0.8, [2.0, 1.0, 1.0, 1.0], 0.99);
        assert!(oma_trial(&channel(g), &weak, 0.0));
    }

    #[test]
    fn single_bs_examples() {
        let mut g = [[real(0.0); 4]; 3];
        g[1][0] = real(0.5);
        let c = cfg(1.0, [1.0; 4], 4.0);
        let expected = 3.0 * 4.0 * 0.25;
        assert!((single_bs_sinr(&channel(g), &c, ServingBs::Best, 0.0) - expected).abs() < 1e-12);
        assert!((single_bs_sinr(&channel(g), &c, ServingBs::Fixed(2), 0.0) - expected).abs() < 1e-12);

        let c = cfg(0.8, [1.0; 4], 4.0);
        let eq = channel([[Complex64::new(0.3, 0.4); 4]; 3]);
        for b in 1..=3 {
            assert_eq!(
                single_bs_sinr(&eq, &c, ServingBs::Fixed(b), 0.0),
                single_bs_sinr(&eq, &c, ServingBs::Best, 0.0)
            );
        }
    }

    #[test]
    fn best_bs_beats_random_bs_with_common_numbers() {
        let layout = NetworkLayout::new(400.0, 250.0, [10.0; 3]).unwrap();
        let c = cfg(0.8, [1.0, 1.0, 1.0, 1.0], 1e9);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (mut best, mut fixed) = (0u32, 0u32);
        for _ in 0..50_000 {
            let placement = sample_placement(&layout, &mut rng);
            let ch = realize_channel(&layout, placement, 3.0, &mut rng).unwrap();
            let b = single_bs_sinr(&ch, &c, ServingBs::Best, 0.0);
            let f = single_bs_sinr(&ch, &c, ServingBs::Fixed(1), 0.0);
            assert!(b >= f);
            best += u32::from(b < c.thresholds()[0]);
            fixed += u32::from(f < c.thresholds()[0]);
        }
        assert!(best < fixed, "{best} vs {fixed}");
    }

    #[test]
    fn isolated_cell_sic_matches_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c = cfg(0.8, [2.0, 1.0, 1.0, 1.0], 1e3);
        for _ in 0..1000 {
            let mut g: [[Complex64; 4]; 3] =
                std::array::from_fn(|_| std::array::from_fn(|_| sample_complex_gaussian(&mut rng)));
            for j in 1..=3 {
                for (i, row) in g.iter_mut().enumerate() {
                    if i != j - 1 {
                        row[j] = real(0.0);
                    }
                }
            }
            let ch = channel(g);
            for j in 1..=3 {
                let p = ch.power(j - 1, j);
                let approx = p * c.beta0_sq / (p * c.beta1_sq + c.noise());
                let exact = sinr_near_sic(&ch, j, &c, 0.0);
                assert!((exact - approx).abs() <= 1e-12 * approx.max(1.0));
            }
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("noma".parse::<Scheme>().is_err());
    }

    fn gains_strategy() -> impl Strategy<Value = [[Complex64; 4]; 3]> {
        prop::array::uniform3(prop::array::uniform4(
            (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im)),
        ))
    }

    proptest! {
        #[test]
        fn beamforming_never_hurts(g in gains_strategy(), snr in 0.01f64..1e6) {
            let ch = channel(g);
            let c = cfg(1.0, [1.0; 4], snr);
            let amp: f64 = (0..3).map(|i| ch.power(i, 0).sqrt()).sum();
            let power: f64 = (0..3).map(|i| ch.power(i, 0)).sum();
            let sinr = sinr_cell_edge(&ch, &c, 0.0);
            prop_assert!((sinr - snr * amp * amp).abs() <= 1e-9 * sinr.max(1e-300));
            prop_assert!(amp * amp >= power * (1.0 - 1e-12));
        }

        #[test]
        fn outage_non_increasing_in_snr(
            g in gains_strategy(),
            interference in prop::array::uniform4(0.0f64..0.5),
            snr in 0.01f64..1e4,
            factor in 1.0f64..100.0,
            beta0_sq in 0.8f64..1.0,
        ) {
            let lo = cfg(beta0_sq, [2.0, 1.0, 0.5, 1.5], snr);
            let hi = cfg(beta0_sq, [2.0, 1.0, 0.5, 1.5], snr * factor);
            let ch = channel(g);
            let a = noma_trial(&ch, &lo, &interference);
            let b = noma_trial(&ch, &hi, &interference);
            for j in 0..4 {
                prop_assert!(!b.outage[j] || a.outage[j]);
            }
            prop_assert!(!oma_trial(&ch, &hi, interference[0]) || oma_trial(&ch, &lo, interference[0]));
            for mode in [ServingBs::Best, ServingBs::Fixed(1)] {
                prop_assert!(!single_bs_noma_trial(&ch, &hi, mode, interference[0]) || single_bs_noma_trial(&ch, &lo, mode, interference[0]));
            }
        }
    }
}
