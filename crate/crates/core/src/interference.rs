//! Co-channel interference from a homogeneous Poisson field of interferers.
//!
//! Powers are normalized by the serving transmit power, so an interferer at
//! distance `d` with fade `g` contributes `rho_I |g|^2 / d^alpha`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::channel::{check_exponent, floored_path_loss_sq, sample_complex_gaussian};
use crate::error::{out_of_range, Result};
use crate::geometry::{sample_in_disc, Point2D};
use crate::special::beta_function;

/// Radius of the sampling window around each user.
pub const DEFAULT_WINDOW_M: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceConfig {
    /// Interferers per square meter.
    pub intensity: f64,
    /// `P_I / P_s`.
    pub power_ratio: f64,
    pub window_radius: f64,
}

impl InterferenceConfig {
    pub fn new(intensity: f64, power_ratio: f64, window_radius: f64) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(out_of_range("interference_intensity", intensity, "lambda_I >= 0"));
        }
        if !(power_ratio >= 0.0) || !power_ratio.is_finite() {
            return Err(out_of_range("interference_power_ratio", power_ratio, "rho_I >= 0"));
        }
        if !(window_radius > 0.0) || !window_radius.is_finite() {
            return Err(out_of_range("interference_window_m", window_radius, "window radius > 0"));
        }
        Ok(Self { intensity, power_ratio, window_radius })
    }

    /// Expected number of points in the window.
    pub fn mean_count(&self) -> f64 {
        self.intensity * PI * self.window_radius * self.window_radius
    }

    pub fn with_power_ratio(self, power_ratio: f64) -> Result<Self> {
        Self::new(self.intensity, power_ratio, self.window_radius)
    }

    pub fn with_window(self, window_radius: f64) -> Result<Self> {
        Self::new(self.intensity, self.power_ratio, window_radius)
    }
}

/// One realization of the interferer process on a disc window.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterferenceField {
    pub positions: Vec<Point2D>,
    pub fades: Vec<Complex64>,
}

impl InterferenceField {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Redraws every fade, keeping positions.
    pub fn refade<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for g in &mut self.fades {
            *g = sample_complex_gaussian(rng);
        }
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(mean).expect("finite positive Poisson mean");
    poisson.sample(rng) as usize
}

/// Samples the process on the disc of radius `window_radius` around `center`.
pub fn sample_ppp<R: Rng + ?Sized>(config: &InterferenceConfig, center: Point2D, rng: &mut R) -> InterferenceField {
    sample_ppp_in_disc(config.intensity, center, config.window_radius, rng)
}

fn sample_ppp_in_disc<R: Rng + ?Sized>(intensity: f64, center: Point2D, radius: f64, rng: &mut R) -> InterferenceField {
    let count = poisson_count(intensity * PI * radius * radius, rng);
    let mut positions = Vec::with_capacity(count);
    let mut fades = Vec::with_capacity(count);
    for _ in 0..count {
        positions.push(sample_in_disc(center, radius, rng));
        fades.push(sample_complex_gaussian(rng));
    }
    InterferenceField { positions, fades }
}

/// Interference at a user from a fresh field on the window centered on it.
///
/// Same law as [`sample_ppp`] followed by [`interference_power`], but summed
/// on the fly from offsets relative to the user: positions by rejection from
/// the bounding square and exponential fading powers, nothing allocated.
pub fn sample_interference<R: Rng + ?Sized>(config: &InterferenceConfig, alpha: f64, rng: &mut R) -> f64 {
    let radius = config.window_radius;
    let count = poisson_count(config.mean_count(), rng);
    let r2 = radius * radius;
    let mut sum = 0.0;
    for _ in 0..count {
        let (dx, dy) = loop {
            let dx = radius * (2.0 * rng.random::<f64>() - 1.0);
            let dy = radius * (2.0 * rng.random::<f64>() - 1.0);
            if dx * dx + dy * dy <= r2 {
                break (dx, dy);
            }
        };
        let power: f64 = rng.sample(Exp1);
        sum += power / floored_path_loss_sq(dx * dx + dy * dy, alpha);
    }
    sum * config.power_ratio
}

/// `I = rho_I * sum_k |g_k|^2 / max(d_k, d_min)^alpha`.
pub fn interference_power(field: &InterferenceField, user: Point2D, alpha: f64, rho_i: f64) -> f64 {
    debug_assert_eq!(field.positions.len(), field.fades.len());
    let sum: f64 = field
        .positions
        .iter()
        .zip(&field.fades)
        .map(|(p, g)| {
            let (dx, dy) = (p.x - user.x, p.y - user.y);
            g.norm_sqr() / floored_path_loss_sq(dx * dx + dy * dy, alpha)
        })
        .sum();
    sum * rho_i
}

/// `E[exp(-s I)]` for the unbounded process:
/// `exp(-2 pi lambda_I (s rho_I)^(2/alpha) / alpha * B(2/alpha, 1 - 2/alpha))`.
pub fn laplace_transform_analytic(s: f64, config: &InterferenceConfig, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(out_of_range("alpha", alpha, "alpha > 2 (the transform diverges otherwise)"));
    }
    if !(s >= 0.0) {
        return Err(out_of_range("s", s, "s >= 0"));
    }
    if s == 0.0 || config.intensity == 0.0 || config.power_ratio == 0.0 {
        return Ok(1.0);
    }
    let delta = 2.0 / alpha;
    let exponent =
        2.0 * PI * config.intensity * (s * config.power_ratio).powf(delta) / alpha * beta_function(delta, 1.0 - delta)?;
    Ok((-exponent).exp())
}

/// Aggregate interference seen by each of the four users in one trial.
///
/// With `shared_positions` false every user gets its own field centered on
/// it. Otherwise a single set of positions is drawn on a disc around the
/// origin large enough to cover every user's window, and each user sees its
/// own independent fades from those points.
pub fn user_interference<R: Rng + ?Sized>(
    config: &InterferenceConfig,
    users: &[Point2D; 4],
    alpha: f64,
    shared_positions: bool,
    rng: &mut R,
) -> Result<[f64; 4]> {
    check_exponent(alpha)?;
    if config.intensity == 0.0 || config.power_ratio == 0.0 {
        return Ok([0.0; 4]);
    }
    let mut out = [0.0; 4];
    if shared_positions {
        let reach = users.iter().map(Point2D::norm).fold(0.0, f64::max);
        let mut field = sample_ppp_in_disc(config.intensity, Point2D::ORIGIN, config.window_radius + reach, rng);
        for (slot, user) in out.iter_mut().zip(users) {
            field.refade(rng);
            *slot = interference_power(&field, *user, alpha, config.power_ratio);
        }
    } else {
        for slot in out.iter_mut() {
            *slot = sample_interference(config, alpha, rng);
        }
    }
    Ok(out)
}
