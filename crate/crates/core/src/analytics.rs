//! Closed-form outage approximations and the Monte Carlo oracle used to check
//! them.
//!
//! Every approximation is a high-SNR or small-disc asymptotic, so raw values
//! can leave `[0, 1]` at low SNR. [`AnalyticOutage`] keeps the raw number next
//! to the clamped one and a note on which approximation produced it.

use std::f64::consts::PI;

use rand::Rng;

use crate::channel::{check_exponent, floored_path_loss};
use crate::error::{out_of_range, Error, Result};
use crate::geometry::{lambda_of_k, NetworkLayout, Point2D, MIN_RADIUS_RATIO};
use crate::interference::InterferenceConfig;
use crate::quadrature::{chebyshev_nodes, GaussLegendre};
use crate::schemes::SchemeConfig;
use crate::special::{beta_function, lower_incomplete_gamma, regularized_lower_gamma};

/// Default number of Chebyshev nodes for the interference-limited near-user
/// expression.
pub const DEFAULT_CHEBYSHEV_NODES: usize = 1600;

/// Below this `beta1^2` the closed form for `kappa` cancels catastrophically
/// and the defining double integral is evaluated by quadrature instead.
const KAPPA_CLOSED_FORM_MIN_BETA1_SQ: f64 = 1e-2;

/// `R0 / l` above which the center approximation of `E[L10 L20 L30]` is used
/// outside the regime it was derived for.
const CENTER_APPROX_MAX_RATIO: f64 = 1.2 * MIN_RADIUS_RATIO;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticOutage {
    /// Probability clamped to `[0, 1]`.
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    pub regime_note: String,
}

impl AnalyticOutage {
    fn new(raw: f64, note: impl Into<String>) -> Self {
        let mut regime_note = note.into();
        let value = if raw.is_nan() { raw } else { raw.clamp(0.0, 1.0) };
        if value != raw && !raw.is_nan() {
            if !regime_note.is_empty() {
                regime_note.push_str("; ");
            }
            regime_note.push_str(&format!("clamped from {raw:.4e}"));
        }
        Self { value, raw, regime_note }
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.raw
    }
}

/// Coefficients of the cell-edge outage integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Upper limit of the dominant integration branch.
    pub phi: f64,
    /// Upper limit of the neglected second branch.
    pub phi1: f64,
}

impl Lemma1Coefficients {
    pub fn new(cfg: &SchemeConfig) -> Self {
        let (b0, b1) = (cfg.beta0_sq, cfg.beta1_sq);
        let eta0 = cfg.thresholds()[0];
        let rho = cfg.snr;
        let a = b0 * b1 * eta0 - b1 * b1 * eta0 * eta0;
        let b = 3.0 * b0 * b1 * eta0 - b1 * b1 * eta0 * eta0;
        let c = (b0 - b1 * eta0) * eta0 / rho;
        let d = 2.0 * b0 * b0 + 3.0 * b0 * b1 * eta0 - b1 * b1 * eta0 * eta0;
        let phi = (eta0 / (rho * (2.0 * b0 - b1 * eta0))).sqrt();
        let phi1 = (eta0 / (rho * (2.0 * b0 - 2.0 * b1 * eta0))).sqrt();
        Self { a, b, c, d, phi, phi1 }
    }

    /// `X(u, v)`, the bound on the third Rayleigh amplitude inside the outage
    /// region, in the rotated coordinates `u`, `v`.
    pub fn x_bound(&self, cfg: &SchemeConfig, u: f64, v: f64) -> f64 {
        let margin = cfg.cell_edge_margin();
        ((self.a * u * u + self.b * v * v + self.c).sqrt() - 2f64.sqrt() * cfg.beta0_sq * v) / margin
    }

    fn f(&self, beta0_sq: f64, v: f64) -> f64 {
        let Self { a, b, c, .. } = *self;
        let sa = a.sqrt();
        let w = ((a + b) * v * v + c).sqrt();
        let t1 = -c.powi(3) * (2.0 * a - b) * (sa * v / w).atanh() / (b * b);
        let t2 = -sa * v * w * (b * (b - 2.0 * a) * v.powi(4) + 2.0 * b * c * v * v + c * c) / b;
        let log_arg = (w + sa * v) / (b * v * v + c).sqrt();
        assert!(log_arg > 0.0, "log argument must be positive");
        let t3 = v * v * (b * (4.0 * a + b) * v.powi(4) + 3.0 * (2.0 * a + b) * c * v * v + 3.0 * c * c) * log_arg.ln();
        let log_arg2 = (a + b).sqrt() * w + a * v + b * v;
        assert!(log_arg2 > 0.0, "log argument must be positive");
        let t4 = 2.0 * a.powf(1.5) * c.powi(3) * log_arg2.ln() / (b * b * (a + b).sqrt());
        2.0 * 2f64.sqrt() * beta0_sq / (48.0 * a.powf(1.5)) * (t1 + t2 + t3 + t4)
    }

    fn g(&self, v: f64) -> f64 {
        2.0 / 15.0 * (self.a * v.powi(6) / 6.0 + 5.0 * self.c * v.powi(4) / 4.0 + 5.0 * self.d * v.powi(6) / 6.0)
    }
}

fn check_margin(cfg: &SchemeConfig) -> Result<()> {
    if cfg.cell_edge_margin() > 0.0 {
        Ok(())
    } else {
        Err(Error::PowerSplit { beta0_sq: cfg.beta0_sq, beta1_sq: cfg.beta1_sq, eta0: cfg.thresholds()[0] })
    }
}

/// `4 * Q`, with `Q` the integral of `X(u, v)^2 (v^2 - u^2)` over
/// `0 < u < v < phi`, by tensor Gauss-Legendre after `u = v t`.
fn kappa_by_quadrature(cfg: &SchemeConfig, k: &Lemma1Coefficients) -> f64 {
    let rule = GaussLegendre::new(48);
    let q = rule.integrate(0.0, k.phi, |v| {
        let inner = rule.integrate(0.0, 1.0, |t| {
            let x = k.x_bound(cfg, v * t, v);
            x * x * (1.0 - t * t)
        });
        inner * v.powi(3)
    });
    4.0 * q
}

/// The SNR- and power-split-dependent factor of the cell-edge outage,
/// `P0 ~ kappa * E[L10 L20 L30]`.
pub fn kappa(cfg: &SchemeConfig) -> Result<f64> {
    check_margin(cfg)?;
    let eta0 = cfg.thresholds()[0];
    if eta0 == 0.0 {
        return Ok(0.0);
    }
    if cfg.beta1_sq == 0.0 {
        // pure beamforming: the integral reduces to phi^6 / 45
        return Ok(eta0.powi(3) / (90.0 * cfg.snr.powi(3) * cfg.beta0_sq.powi(3)));
    }
    let k = Lemma1Coefficients::new(cfg);
    if cfg.beta1_sq < KAPPA_CLOSED_FORM_MIN_BETA1_SQ {
        return Ok(kappa_by_quadrature(cfg, &k));
    }
    let margin = cfg.cell_edge_margin();
    let value = 4.0 * (k.g(k.phi) - k.f(cfg.beta0_sq, k.phi) + k.f(cfg.beta0_sq, 0.0)) / (margin * margin);
    Ok(value)
}

/// Which expression produced an expected path-loss product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathlossBranch {
    /// Exact lens average, `alpha = 2`.
    ExactSquare,
    /// `(l / sqrt 3)^{3 alpha}`: user 0 close to the centroid.
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedPathloss {
    pub value: f64,
    pub branch: PathlossBranch,
    /// `R0 / l` is outside the range where the centroid form was derived.
    pub outside_regime: bool,
}

impl ExpectedPathloss {
    pub fn note(&self) -> &'static str {
        match (self.branch, self.outside_regime) {
            (PathlossBranch::ExactSquare, _) => "exact lens average (alpha = 2)",
            (PathlossBranch::Centroid, false) => "centroid approximation of the path-loss product",
            (PathlossBranch::Centroid, true) => {
                "centroid approximation of the path-loss product; R0/l beyond 1.2/sqrt(3)"
            }
        }
    }
}

/// `E[L10 L20 L30]` for user 0 uniform on the lens.
pub fn expected_pathloss_product(side_length: f64, big_radius: f64, alpha: f64) -> Result<ExpectedPathloss> {
    check_exponent(alpha)?;
    if !(side_length > 0.0) || !side_length.is_finite() {
        return Err(out_of_range("side_length_l", side_length, "l > 0"));
    }
    let k = big_radius / side_length;
    let lam = lambda_of_k(k)?;
    if alpha == 2.0 {
        return Ok(ExpectedPathloss {
            value: lam * side_length.powi(6),
            branch: PathlossBranch::ExactSquare,
            outside_regime: false,
        });
    }
    Ok(ExpectedPathloss {
        value: 3f64.powf(-1.5 * alpha) * side_length.powf(3.0 * alpha),
        branch: PathlossBranch::Centroid,
        outside_regime: k > CENTER_APPROX_MAX_RATIO,
    })
}

/// High-SNR N-NOMA outage of the cell-edge user.
pub fn p0_noma_analytic(layout: &NetworkLayout, cfg: &SchemeConfig, alpha: f64) -> Result<AnalyticOutage> {
    let kap = kappa(cfg)?;
    let el = expected_pathloss_product(layout.side_length(), layout.big_radius(), alpha)?;
    Ok(AnalyticOutage::new(kap * el.value, format!("high-snr; {}", el.note())))
}

/// OMA outage of the cell-edge user placed at the centroid: the three
/// channel powers are i.i.d. exponential, so the SNR is Erlang-3 and
/// `P = 1 - e^{-x} (1 + x + x^2 / 2)` with `x = eta0 l^alpha 3^{-alpha/2 - 1} / rho`.
pub fn p0_oma_analytic(side_length: f64, alpha: f64, eta0: f64, rho: f64) -> Result<AnalyticOutage> {
    check_exponent(alpha)?;
    if !(side_length > 0.0) {
        return Err(out_of_range("side_length_l", side_length, "l > 0"));
    }
    if !(eta0 >= 0.0) {
        return Err(out_of_range("eta0", eta0, "eta0 >= 0"));
    }
    if !(rho > 0.0) {
        return Err(out_of_range("transmit_snr", rho, "rho > 0"));
    }
    let x = eta0 * side_length.powf(alpha) * 3f64.powf(-alpha / 2.0 - 1.0) / rho;
    // series branch of P(3, x) keeps full relative accuracy as x -> 0
    let raw = regularized_lower_gamma(3.0, x)?;
    Ok(AnalyticOutage::new(raw, "user 0 at the centroid"))
}

/// `M_j = max(eta0 / (beta0^2 - beta1^2 eta0), eta_j / beta1^2)`.
pub fn near_user_threshold(cfg: &SchemeConfig, j: usize) -> Result<f64> {
    check_near_index(j)?;
    check_margin(cfg)?;
    let eta = cfg.thresholds();
    let sic = eta[0] / cfg.cell_edge_margin();
    let own = if eta[j] == 0.0 {
        0.0
    } else if cfg.beta1_sq == 0.0 {
        f64::INFINITY
    } else {
        eta[j] / cfg.beta1_sq
    };
    Ok(sic.max(own))
}

/// The `beta1^2` at which the near-user outage switches from decreasing to
/// increasing: `eta_j / (eta0 + eta_j + eta0 eta_j)`.
pub fn near_user_optimal_beta1_sq(eta0: f64, eta_j: f64) -> f64 {
    eta_j / (eta0 + eta_j + eta0 * eta_j)
}

fn check_near_index(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(Error::Index { what: "near user", index: j, expected: "1, 2 or 3" })
    }
}

fn near_radius_note(layout: &NetworkLayout, j: usize) -> String {
    let rj = layout.near_radii()[j - 1];
    let mut note = String::from("small-disc approximation");
    if rj > layout.side_length() / 10.0 {
        note.push_str("; R_j > l/10");
    }
    note
}

/// Interference-free outage of near user `j` (1..=3), neglecting the other
/// BSs' channels to user `j` except through the mean cross path loss `l^alpha`.
pub fn pj_noma_analytic(layout: &NetworkLayout, cfg: &SchemeConfig, alpha: f64, j: usize) -> Result<AnalyticOutage> {
    check_exponent(alpha)?;
    let m = near_user_threshold(cfg, j)?;
    if m.is_infinite() {
        return Ok(AnalyticOutage::new(1.0, "no power left for the near user"));
    }
    if m == 0.0 {
        return Ok(AnalyticOutage::new(0.0, "zero target rates"));
    }
    let rj = layout.near_radii()[j - 1];
    let l = layout.side_length();
    let rho = cfg.snr;
    let delta = 2.0 / alpha;
    let x = m * rj.powf(alpha) / rho;
    let first = 2.0 * rho.powf(delta) * m * lower_incomplete_gamma(delta, x)?;
    let second =
        4.0 * cfg.beta1_sq * m * rho.powf(delta + 1.0) / l.powf(alpha) * lower_incomplete_gamma(delta + 1.0, x)?;
    let raw = 1.0 - (first - second) / (alpha * m.powf(delta + 1.0) * rj * rj);
    Ok(AnalyticOutage::new(raw, near_radius_note(layout, j)))
}

/// Near-user outage under Poisson interference, by `nodes`-point
/// Gauss-Chebyshev quadrature of
/// `1 - (2 / R_j^2) int_0^{R_j} f(x) dx` with
/// `f(x) = (x - 2 beta1^2 M_j x^{alpha+1} / l^alpha) exp(-M_j x^alpha / rho - c_I x^2)`,
/// `c_I = 2 pi lambda_I (M_j rho_I)^{2/alpha} B(2/alpha, 1 - 2/alpha) / alpha`.
pub fn pj_noma_interference_analytic(
    layout: &NetworkLayout,
    cfg: &SchemeConfig,
    interference: &InterferenceConfig,
    alpha: f64,
    j: usize,
    nodes: usize,
) -> Result<AnalyticOutage> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(out_of_range("alpha", alpha, "alpha > 2"));
    }
    if nodes == 0 {
        return Err(out_of_range("gauss_chebyshev_nodes", 0.0, "N >= 1"));
    }
    let m = near_user_threshold(cfg, j)?;
    if m.is_infinite() {
        return Ok(AnalyticOutage::new(1.0, "no power left for the near user"));
    }
    let rj = layout.near_radii()[j - 1];
    let l = layout.side_length();
    let delta = 2.0 / alpha;
    let field = if interference.intensity == 0.0 || interference.power_ratio == 0.0 {
        0.0
    } else {
        2.0 * PI
            * interference.intensity
            * (m * interference.power_ratio).powf(delta)
            * beta_function(delta, 1.0 - delta)?
            / alpha
    };
    let cross = 2.0 * cfg.beta1_sq * m / l.powf(alpha);
    let f = |x: f64| (x - cross * x.powf(alpha + 1.0)) * (-m / cfg.snr * x.powf(alpha) - field * x * x).exp();
    let sum: f64 =
        chebyshev_nodes(nodes).map(|theta| (1.0 - theta * theta).sqrt() * f(rj * theta / 2.0 + rj / 2.0)).sum();
    let raw = 1.0 - PI / (nodes as f64 * rj) * sum;
    Ok(AnalyticOutage::new(raw, format!("{}; {nodes}-node Gauss-Chebyshev", near_radius_note(layout, j))))
}

/// Direct Monte Carlo of the cell-edge outage event
/// `rho beta0^2 (sum_i |h_i0|)^2 < eta0 (rho beta1^2 sum_i |h_i0|^2 + 1)`.
///
/// Shares no sampling code with the simulator: user 0 is drawn in polar
/// coordinates around BS 1 and kept if it falls inside the other two discs,
/// and the Rayleigh amplitudes come from inverse-CDF exponential powers.
pub fn brute_force_p0_oracle<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    cfg: &SchemeConfig,
    alpha: f64,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    check_exponent(alpha)?;
    if trials < 10_000 {
        return Err(out_of_range("trials", trials as f64, "trials >= 10^4"));
    }
    let bs = *layout.bs_positions();
    let r0 = layout.big_radius();
    let eta0 = cfg.thresholds()[0];
    let mut outages = 0u64;
    for _ in 0..trials {
        let p = if layout.is_degenerate() {
            Point2D::ORIGIN
        } else {
            loop {
                let r = r0 * rng.random::<f64>().sqrt();
                let t = 2.0 * PI * rng.random::<f64>();
                let p = Point2D::new(bs[0].x + r * t.cos(), bs[0].y + r * t.sin());
                if p.distance(&bs[1]) <= r0 && p.distance(&bs[2]) <= r0 {
                    break p;
                }
            }
        };
        let mut amp = 0.0;
        let mut power = 0.0;
        for b in &bs {
            let fade_power = -(1.0 - rng.random::<f64>()).ln();
            let h2 = fade_power / floored_path_loss(p.distance(b), alpha);
            amp += h2.sqrt();
            power += h2;
        }
        let lhs = cfg.snr * cfg.beta0_sq * amp * amp;
        let rhs = eta0 * (cfg.snr * cfg.beta1_sq * power + 1.0);
        if lhs < rhs {
            outages += 1;
        }
    }
    Ok(outages as f64 / trials as f64)
}
