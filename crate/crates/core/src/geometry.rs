//! Network layout: three BSs on an equilateral triangle, the lens region `A`
//! where the cell-edge user lives, and the discs holding the near users.
//!
//! Coordinates put the triangle's centroid at the origin and BS 1 on the
//! positive y-axis; BS 2 and BS 3 follow counter-clockwise. BS `i` (1-based)
//! is stored at index `i - 1`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use rand::Rng;

use crate::error::{out_of_range, Error, Result};
use crate::quadrature::GaussLegendre;

pub(crate) const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Smallest admissible `R0 / l`: the three discs meet only at the centroid.
pub const MIN_RADIUS_RATIO: f64 = SQRT_3 / 3.0;
/// Largest admissible `R0 / l`.
pub const MAX_RADIUS_RATIO: f64 = SQRT_3 / 2.0;

/// Relative slack when checking the admissible `R0` range.
const RANGE_SLACK: f64 = 1e-12;

/// Below this distance from the lower end of the `k` range the closed forms
/// for `lambda(k)` and the lens area lose digits to cancellation; a polar
/// quadrature over the lens is used instead.
const CLOSED_FORM_MIN_OFFSET: f64 = 3e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotation about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Vertices of the equilateral triangle of side `l`, centroid at the origin.
pub fn bs_positions(side_length: f64) -> Result<[Point2D; 3]> {
    if !(side_length > 0.0) || !side_length.is_finite() {
        return Err(out_of_range("side_length_l", side_length, "l > 0"));
    }
    let circumradius = side_length / SQRT_3;
    Ok([0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|offset| Point2D::from_polar(circumradius, PI / 2.0 + offset)))
}

fn check_radius_ratio(side_length: f64, big_radius: f64) -> Result<f64> {
    let lo = MIN_RADIUS_RATIO * side_length;
    let hi = MAX_RADIUS_RATIO * side_length;
    if !(big_radius >= lo * (1.0 - RANGE_SLACK) && big_radius <= hi * (1.0 + RANGE_SLACK)) {
        return Err(out_of_range(
            "big_radius_R0",
            big_radius,
            format!("sqrt(3)/3 * l <= R0 <= sqrt(3)/2 * l, i.e. [{lo}, {hi}] for l = {side_length}"),
        ));
    }
    Ok(big_radius.clamp(lo, hi))
}

/// Area `S_A` of the intersection of the three discs of radius `R0`.
pub fn intersection_area(side_length: f64, big_radius: f64) -> Result<f64> {
    if !(side_length > 0.0) {
        return Err(out_of_range("side_length_l", side_length, "l > 0"));
    }
    let r0 = check_radius_ratio(side_length, big_radius)?;
    let k = r0 / side_length;
    if k - MIN_RADIUS_RATIO < CLOSED_FORM_MIN_OFFSET {
        return Ok(3.0 * LensQuadrature::new(side_length, r0).area_of_sector());
    }
    let asin_term = (side_length / (2.0 * r0)).clamp(-1.0, 1.0).asin();
    let angle = FRAC_PI_3 - asin_term;
    let area = 3.0 * r0 * r0 * angle - SQRT_3 * side_length * r0 * angle.sin();
    Ok(area.max(0.0))
}

/// `lambda(k) = E{L10 L20 L30} / l^6` for path-loss exponent 2, `k = R0 / l`.
pub fn lambda_of_k(k: f64) -> Result<f64> {
    if !(MIN_RADIUS_RATIO * (1.0 - RANGE_SLACK)..=MAX_RADIUS_RATIO * (1.0 + RANGE_SLACK)).contains(&k) {
        return Err(out_of_range("k", k, "sqrt(3)/3 <= k <= sqrt(3)/2"));
    }
    let k = k.clamp(MIN_RADIUS_RATIO, MAX_RADIUS_RATIO);
    if k - MIN_RADIUS_RATIO < CLOSED_FORM_MIN_OFFSET {
        return Ok(lens_pathloss_product_alpha2(1.0, k));
    }
    let asin_term = (1.0 / (2.0 * k)).clamp(-1.0, 1.0).asin();
    let k2 = k * k;
    let k4 = k2 * k2;
    let k6 = k4 * k2;
    let k8 = k4 * k4;
    let denom = 192.0 * k * (PI * k - 3.0 * k * asin_term - SQRT_3 * (asin_term + FRAC_PI_6).cos());
    let numer = 48.0 * PI * k8 - 3.0 * (4.0 - 1.0 / k2).max(0.0).sqrt() * (84.0 * k6 + 102.0 * k4 + 2.0 * k2 + 1.0) * k
        + SQRT_3
        + 192.0 * (SQRT_3 + PI) * k6
        + 24.0 * (3.0 * SQRT_3 + 4.0 * PI) * k4
        - 144.0 * (k4 + 4.0 * k2 + 2.0) * k4 * asin_term;
    Ok(numer / denom)
}

/// Mean of `(d10 d20 d30)^2` over the lens, evaluated by polar quadrature.
/// Stable for `R0` arbitrarily close to `l / sqrt 3`.
pub(crate) fn lens_pathloss_product_alpha2(side_length: f64, big_radius: f64) -> f64 {
    if big_radius <= MIN_RADIUS_RATIO * side_length * (1.0 + RANGE_SLACK) {
        return side_length.powi(6) / 27.0;
    }
    LensQuadrature::new(side_length, big_radius).mean(|d1, d2, d3| (d1 * d2 * d3).powi(2))
}

/// Polar coordinates about BS 1 over the sub-region `A1` of the lens (the part
/// where BS 1 is the farthest BS). `r` runs over `[l/sqrt3, R0]` and the
/// angle from the BS 1 -> centroid direction over `[-Theta(r), Theta(r)]`,
/// `Theta(r) = pi/3 - asin(l / 2r)`.
struct LensQuadrature {
    side_length: f64,
    r_min: f64,
    r_max: f64,
    rule: GaussLegendre,
}

impl LensQuadrature {
    const ORDER: usize = 32;

    fn new(side_length: f64, big_radius: f64) -> Self {
        Self {
            side_length,
            r_min: MIN_RADIUS_RATIO * side_length,
            r_max: big_radius,
            rule: GaussLegendre::new(Self::ORDER),
        }
    }

    fn half_angle(&self, r: f64) -> f64 {
        (FRAC_PI_3 - (self.side_length / (2.0 * r)).clamp(-1.0, 1.0).asin()).max(0.0)
    }

    fn area_of_sector(&self) -> f64 {
        self.rule.integrate(self.r_min, self.r_max, |r| 2.0 * self.half_angle(r) * r)
    }

    fn mean(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let l = self.side_length;
        let integral = self.rule.integrate(self.r_min, self.r_max, |r| {
            let theta_max = self.half_angle(r);
            let inner = self.rule.integrate(-1.0, 1.0, |t| {
                let theta = theta_max * t;
                let d2 = (l * l + r * r - 2.0 * l * r * (FRAC_PI_6 + theta).cos()).max(0.0).sqrt();
                let d3 = (l * l + r * r - 2.0 * l * r * (FRAC_PI_6 - theta).cos()).max(0.0).sqrt();
                f(r, d2, d3)
            });
            inner * theta_max * r
        });
        integral / self.area_of_sector()
    }
}

/// Geometry of the three-BS cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    side_length: f64,
    big_radius: f64,
    near_radii: [f64; 3],
    bs: [Point2D; 3],
}

impl NetworkLayout {
    pub fn new(side_length: f64, big_radius: f64, near_radii: [f64; 3]) -> Result<Self> {
        let bs = bs_positions(side_length)?;
        let big_radius = check_radius_ratio(side_length, big_radius)?;
        for &r in &near_radii {
            if !(r > 0.0) || !r.is_finite() {
                return Err(out_of_range("near_radius_Rj", r, "R_j > 0"));
            }
            if r > side_length / 10.0 {
                log::warn!(
                    "near radius {r} m exceeds l/10 = {} m; the l >> R_j approximations degrade",
                    side_length / 10.0
                );
            }
        }
        if big_radius <= MIN_RADIUS_RATIO * side_length * (1.0 + RANGE_SLACK) {
            log::warn!("R0 = sqrt(3)/3 * l: the lens degenerates to the centroid");
        }
        Ok(Self { side_length, big_radius, near_radii, bs })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn big_radius(&self) -> f64 {
        self.big_radius
    }

    /// `k = R0 / l`.
    pub fn radius_ratio(&self) -> f64 {
        self.big_radius / self.side_length
    }

    pub fn near_radii(&self) -> [f64; 3] {
        self.near_radii
    }

    /// Radius `R_j` of near user `j` (1-based).
    pub fn near_radius(&self, j: usize) -> Result<f64> {
        check_bs_index(j)?;
        Ok(self.near_radii[j - 1])
    }

    pub fn bs_positions(&self) -> &[Point2D; 3] {
        &self.bs
    }

    /// Position of BS `i` (1-based).
    pub fn bs(&self, i: usize) -> Result<Point2D> {
        check_bs_index(i)?;
        Ok(self.bs[i - 1])
    }

    /// Whether the lens has zero area.
    pub fn is_degenerate(&self) -> bool {
        self.big_radius <= MIN_RADIUS_RATIO * self.side_length * (1.0 + RANGE_SLACK)
    }

    /// Whether `p` lies within `R0` of all three BSs.
    pub fn in_lens(&self, p: &Point2D) -> bool {
        let r2 = self.big_radius * self.big_radius;
        self.bs.iter().all(|b| {
            let (dx, dy) = (p.x - b.x, p.y - b.y);
            dx * dx + dy * dy <= r2
        })
    }

    /// Axis-aligned bounding box `(min, max)` of the lens.
    pub fn lens_bounding_box(&self) -> (Point2D, Point2D) {
        let l = self.side_length;
        let r0 = self.big_radius;
        let slack = 1.0 + 1e-12;
        let mut candidates = Vec::with_capacity(15);
        // corners: pairwise circle intersections on the ray towards the third BS
        let corner = ((r0 * r0 - l * l / 4.0).max(0.0).sqrt() - l / (2.0 * SQRT_3)).max(0.0);
        for b in &self.bs {
            let u = b.norm();
            candidates.push(Point2D::new(b.x / u * corner, b.y / u * corner));
        }
        for b in &self.bs {
            for (dx, dy) in [(r0, 0.0), (-r0, 0.0), (0.0, r0), (0.0, -r0)] {
                let p = b.offset(dx, dy);
                let inside = self.bs.iter().all(|c| p.distance(c) <= r0 * slack);
                if inside {
                    candidates.push(p);
                }
            }
        }
        let mut lo = Point2D::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2D::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in candidates {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Same layout with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.side_length * factor, self.big_radius * factor, self.near_radii.map(|r| r * factor))
    }
}

fn check_bs_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::Index { what: "BS", index: i, expected: "1, 2 or 3" })
    }
}

/// Positions of the four users: index 0 of the distance matrix is the
/// cell-edge user, near user `j` is served by BS `j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UserPlacement {
    pub cell_edge: Point2D,
    pub near_users: [Point2D; 3],
}

/// `d[i][j]`: distance from BS `i + 1` to user `j`.
pub type DistanceMatrix = [[f64; 4]; 3];

/// Uniform point on the lens by rejection from its bounding box.
pub fn sample_cell_edge<R: Rng + ?Sized>(layout: &NetworkLayout, rng: &mut R) -> Point2D {
    if layout.is_degenerate() {
        return Point2D::ORIGIN;
    }
    let (lo, hi) = layout.lens_bounding_box();
    loop {
        let p = Point2D::new(lo.x + (hi.x - lo.x) * rng.random::<f64>(), lo.y + (hi.y - lo.y) * rng.random::<f64>());
        if layout.in_lens(&p) {
            return p;
        }
    }
}

/// Uniform point on the disc of `radius` around `center`.
pub fn sample_in_disc<R: Rng + ?Sized>(center: Point2D, radius: f64, rng: &mut R) -> Point2D {
    let r = radius * rng.random::<f64>().sqrt();
    let angle = 2.0 * PI * rng.random::<f64>();
    let offset = Point2D::from_polar(r, angle);
    center.offset(offset.x, offset.y)
}

/// Uniform point in disc `D_i` around BS `bs_index` (1-based).
pub fn sample_near_user<R: Rng + ?Sized>(layout: &NetworkLayout, bs_index: usize, rng: &mut R) -> Result<Point2D> {
    let center = layout.bs(bs_index)?;
    Ok(sample_in_disc(center, layout.near_radii[bs_index - 1], rng))
}

pub fn sample_placement<R: Rng + ?Sized>(layout: &NetworkLayout, rng: &mut R) -> UserPlacement {
    let cell_edge = sample_cell_edge(layout, rng);
    let near_users = std::array::from_fn(|i| sample_in_disc(layout.bs[i], layout.near_radii[i], rng));
    UserPlacement { cell_edge, near_users }
}

pub fn distances(layout: &NetworkLayout, placement: &UserPlacement) -> DistanceMatrix {
    std::array::from_fn(|i| {
        let b = layout.bs[i];
        [
            b.distance(&placement.cell_edge),
            b.distance(&placement.near_users[0]),
            b.distance(&placement.near_users[1]),
            b.distance(&placement.near_users[2]),
        ]
    })
}
