//! Rayleigh fading composed with bare distance path loss,
//! `h_ij = g_ij / sqrt(d_ij^alpha)` with `g_ij ~ CN(0, 1)`.

use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{out_of_range, Result};
use crate::geometry::{distances, DistanceMatrix, NetworkLayout, UserPlacement};

/// Distances below this are clamped before applying `d^alpha`.
pub const MIN_DISTANCE_M: f64 = 1.0;

static FLOOR_WARNED: AtomicBool = AtomicBool::new(false);

/// Circularly symmetric complex Gaussian with unit total variance.
#[inline]
pub fn sample_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn check_exponent(alpha: f64) -> Result<()> {
    if alpha >= 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(out_of_range("alpha", alpha, "alpha >= 2"))
    }
}

/// `max(d, MIN_DISTANCE_M)^alpha`; no validation.
#[inline]
pub(crate) fn floored_path_loss(d: f64, alpha: f64) -> f64 {
    if d < MIN_DISTANCE_M && !FLOOR_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!("distance {d} m below the {MIN_DISTANCE_M} m floor; path loss clamped");
    }
    d.max(MIN_DISTANCE_M).powf(alpha)
}

/// Same as [`floored_path_loss`] from the squared distance, with exact fast
/// paths for the common integer exponents.
#[inline]
pub(crate) fn floored_path_loss_sq(d2: f64, alpha: f64) -> f64 {
    const MIN_SQ: f64 = MIN_DISTANCE_M * MIN_DISTANCE_M;
    if d2 < MIN_SQ && !FLOOR_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!("distance {} m below the {MIN_DISTANCE_M} m floor; path loss clamped", d2.sqrt());
    }
    let d2 = d2.max(MIN_SQ);
    if alpha == 2.0 {
        d2
    } else if alpha == 3.0 {
        d2 * d2.sqrt()
    } else if alpha == 4.0 {
        d2 * d2
    } else {
        d2.powf(0.5 * alpha)
    }
}

/// Path loss `L = d^alpha`.
pub fn path_loss(d: f64, alpha: f64) -> Result<f64> {
    check_exponent(alpha)?;
    if !(d >= 0.0) {
        return Err(out_of_range("distance", d, "d >= 0"));
    }
    Ok(floored_path_loss(d, alpha))
}

/// One draw of all twelve BS-to-user channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `gains[i][j]` is `h_ij` from BS `i + 1` to user `j`.
    pub gains: [[Complex64; 4]; 3],
    /// `path_loss[i][j] = d_ij^alpha` (after the distance floor).
    pub path_loss: [[f64; 4]; 3],
    pub distances: DistanceMatrix,
    pub placement: UserPlacement,
}

impl ChannelRealization {
    /// Builds a realization from explicit small-scale fades `g_ij`.
    pub fn from_fades(
        layout: &NetworkLayout,
        placement: UserPlacement,
        alpha: f64,
        fades: [[Complex64; 4]; 3],
    ) -> Result<Self> {
        check_exponent(alpha)?;
        let distances = distances(layout, &placement);
        let path_loss = distances.map(|row| row.map(|d| floored_path_loss(d, alpha)));
        let gains = std::array::from_fn(|i| std::array::from_fn(|j| fades[i][j] / path_loss[i][j].sqrt()));
        Ok(Self { gains, path_loss, distances, placement })
    }

    /// Builds a realization directly from gain magnitudes/phases, bypassing
    /// geometry. Path losses are set to `1 / |h|^2` where nonzero.
    pub fn from_gains(gains: [[Complex64; 4]; 3], placement: UserPlacement) -> Self {
        let path_loss = gains.map(|row| {
            row.map(|h| {
                let p = h.norm_sqr();
                if p > 0.0 {
                    1.0 / p
                } else {
                    f64::INFINITY
                }
            })
        });
        Self { gains, path_loss, distances: [[f64::NAN; 4]; 3], placement }
    }

    /// `|h_ij|^2` for BS `i + 1`, user `j`.
    #[inline]
    pub fn power(&self, i: usize, j: usize) -> f64 {
        self.gains[i][j].norm_sqr()
    }
}

/// Draws fresh i.i.d. `CN(0,1)` fades for the given placement.
pub fn realize_channel<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    placement: UserPlacement,
    alpha: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let fades = std::array::from_fn(|_| std::array::from_fn(|_| sample_complex_gaussian(rng)));
    ChannelRealization::from_fades(layout, placement, alpha, fades)
}
