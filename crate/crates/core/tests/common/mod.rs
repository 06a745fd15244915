//! Independent numerical oracles for the integration tests. Nothing here
//! calls into the crate's own quadrature or special functions.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `gamma(s, x)` for `s > 0`, after `t = u^(1/s)` removes the endpoint singularity.
pub fn lower_gamma_oracle(s: f64, x: f64) -> f64 {
    let top = x.powf(s);
    adaptive_simpson(|u| (-u.powf(1.0 / s)).exp(), 0.0, top, 1e-13) / s
}

/// `B(p, q)`, split at 1/2 with power substitutions at both ends.
pub fn beta_oracle(p: f64, q: f64) -> f64 {
    let half = 0.5f64;
    let left = adaptive_simpson(|u| (1.0 - u.powf(1.0 / p)).powf(q - 1.0), 0.0, half.powf(p), 1e-13) / p;
    let right = adaptive_simpson(|w| (1.0 - w.powf(1.0 / q)).powf(p - 1.0), 0.0, half.powf(q), 1e-13) / q;
    left + right
}

/// Outage volume of the cell-edge event near the origin of amplitude space:
/// `8 * int y1 y2 y3` over `{y >= 0 : b0 (y1+y2+y3)^2 < eta0 (b1 |y|^2 + 1/rho)}`.
///
/// The `y3` integral is done in closed form (`Y3^2 / 2`, with `Y3` the root
/// of the boundary quadratic); the remaining two by nested adaptive Simpson.
pub fn kappa_oracle(beta0_sq: f64, beta1_sq: f64, eta0: f64, rho: f64) -> f64 {
    let m = beta0_sq - eta0 * beta1_sq;
    assert!(m > 0.0);
    let noise = eta0 / rho;
    // the region's extent along one axis
    let y_max = (noise / m).sqrt();
    let y3_of = |y1: f64, y2: f64| {
        let s = y1 + y2;
        let q = y1 * y1 + y2 * y2;
        let c = beta0_sq * s * s - eta0 * beta1_sq * q - noise;
        if c >= 0.0 {
            return 0.0;
        }
        let disc = beta0_sq * beta0_sq * s * s - m * c;
        (disc.sqrt() - beta0_sq * s) / m
    };
    // upper limit in y2 for given y1: boundary of c < 0 with y3 = 0
    let y2_max = |y1: f64| {
        // m y2^2 + 2 b0 y1 y2 + (m y1^2 - noise) = 0
        let disc = beta0_sq * beta0_sq * y1 * y1 - m * (m * y1 * y1 - noise);
        ((disc.max(0.0)).sqrt() - beta0_sq * y1).max(0.0) / m
    };
    let scale = y_max.powi(6);
    let outer = adaptive_simpson(
        |y1| {
            let top = y2_max(y1);
            y1 * adaptive_simpson(
                |y2| {
                    let y3 = y3_of(y1, y2);
                    y2 * y3 * y3 / 2.0
                },
                0.0,
                top,
                1e-10 * scale,
            )
        },
        0.0,
        y_max,
        1e-9 * scale,
    );
    8.0 * outer
}

/// The dominant-branch integral behind the closed form:
/// `4 int_0^phi int_0^v X(u, v)^2 (v^2 - u^2) du dv`, where `u, v` are the
/// first two amplitudes rotated by 45 degrees, `X` is the third amplitude on
/// the outage boundary and `phi` is where `X` vanishes on the `u = 0` line.
pub fn kappa_appendix_oracle(beta0_sq: f64, beta1_sq: f64, eta0: f64, rho: f64) -> f64 {
    let m = beta0_sq - eta0 * beta1_sq;
    let noise = eta0 / rho;
    let x_of = |u: f64, v: f64| {
        let s = 2f64.sqrt() * v;
        let q = u * u + v * v;
        let c = beta0_sq * s * s - eta0 * beta1_sq * q - noise;
        let disc = beta0_sq * beta0_sq * s * s - m * c;
        ((disc.sqrt() - beta0_sq * s) / m).max(0.0)
    };
    let phi = (noise / (2.0 * beta0_sq - beta1_sq * eta0)).sqrt();
    let scale = phi.powi(6);
    4.0 * adaptive_simpson(
        |v| {
            adaptive_simpson(
                |u| {
                    let x = x_of(u, v);
                    x * x * (v * v - u * u)
                },
                0.0,
                v,
                1e-11 * scale,
            )
        },
        0.0,
        phi,
        1e-10 * scale,
    )
}

/// Uniform point of the three-disc intersection: polar draw in the disc of
/// BS 1 and rejection against the other two.
pub fn lens_point<R: Rng>(l: f64, r0: f64, rng: &mut R) -> (f64, f64) {
    let bs = bs_positions(l);
    loop {
        let r = r0 * rng.random::<f64>().sqrt();
        let t = 2.0 * PI * rng.random::<f64>();
        let (x, y) = (bs[0].0 + r * t.cos(), bs[0].1 + r * t.sin());
        if bs[1..].iter().all(|b| (x - b.0).hypot(y - b.1) <= r0) {
            return (x, y);
        }
    }
}

/// BS coordinates: centroid at the origin, BS 1 straight up.
pub fn bs_positions(l: f64) -> [(f64, f64); 3] {
    let r = l / 3f64.sqrt();
    std::array::from_fn(|i| {
        let a = PI / 2.0 + 2.0 * PI * i as f64 / 3.0;
        (r * a.cos(), r * a.sin())
    })
}

/// Standard normal upper tail, for sign-test p-values and z checks.
pub fn binomial_upper_tail(n: u64, k: u64) -> f64 {
    // P(X >= k), X ~ Bin(n, 1/2)
    let mut total = 0.0;
    for i in k..=n {
        total += (ln_choose(n, i) - n as f64 * 2f64.ln()).exp();
    }
    total
}

fn ln_choose(n: u64, k: u64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}
