//! Gamma-family special functions used by the outage expressions, with the
//! domain checks the analytics rely on.

use statrs::function::beta::ln_beta;
pub use statrs::function::gamma::{gamma, ln_gamma};
use statrs::function::gamma::{gamma_li, gamma_lr};

use crate::error::{out_of_range, Result};

fn check_s_x(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(out_of_range("s", s, "s > 0"));
    }
    if !(x >= 0.0) {
        return Err(out_of_range("x", x, "x >= 0"));
    }
    Ok(())
}

/// Lower incomplete gamma function `gamma(s, x) = int_0^x t^(s-1) e^(-t) dt`.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_s_x(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(gamma(s));
    }
    Ok(gamma_li(s, x))
}

/// Regularized lower incomplete gamma `P(s, x) = gamma(s, x) / Gamma(s)`.
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    check_s_x(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_lr(s, x))
}

/// Euler Beta function `B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q)`.
pub fn beta_function(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(out_of_range("p", p, "p > 0"));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(out_of_range("q", q, "q > 0"));
    }
    Ok(ln_beta(p, q).exp())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma(5.0), 24.0) < 1e-14);
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.0 / 3.0), 2.678_938_534_707_747_6) < 1e-14);
        assert!(rel(gamma(0.1), 9.513_507_698_668_732) < 1e-13);
    }

    #[test]
    fn s_one_is_exponential_cdf() {
        let v = lower_incomplete_gamma(1.0, 2.0).unwrap();
        assert!(rel(v, 1.0 - (-2.0f64).exp()) < 1e-12);
        assert!(rel(v, 0.864_664_716_763_387_3) < 1e-12);
    }

    #[test]
    fn large_x_tends_to_complete_gamma() {
        let v = lower_incomplete_gamma(0.5, 1e3).unwrap();
        assert!(rel(v, 1.772_453_850_905_516) < 1e-12);
        let v = lower_incomplete_gamma(0.5, f64::INFINITY).unwrap();
        assert!(rel(v, PI.sqrt()) < 1e-14);
    }

    #[test]
    fn frozen_reference_value() {
        // mpmath, 25 digits
        let v = lower_incomplete_gamma(2.0 / 3.0, 1.7).unwrap();
        assert!(rel(v, 1.219_838_006_292_680_4) < 1e-12);
    }

    #[test]
    fn regularized_matches_unregularized() {
        for &(s, x) in &[(0.5, 0.3), (2.0, 5.0), (3.0, 1e-3), (1.5, 40.0)] {
            let a = regularized_lower_gamma(s, x).unwrap();
            let b = lower_incomplete_gamma(s, x).unwrap() / gamma(s);
            assert!(rel(a, b) < 1e-12, "({s}, {x})");
        }
    }

    #[test]
    fn small_x_erlang_three() {
        // P(3, x) = 1 - e^-x (1 + x + x^2/2) ~ x^3 / 6
        let x = 1e-6;
        let p = regularized_lower_gamma(3.0, x).unwrap();
        assert!(rel(p, x.powi(3) / 6.0 * (1.0 - 0.75 * x)) < 1e-9);
    }

    #[test]
    fn zero_x() {
        assert_eq!(lower_incomplete_gamma(0.5, 0.0).unwrap(), 0.0);
        assert_eq!(regularized_lower_gamma(3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(-1.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(1.0, -1.0).is_err());
        assert!(lower_incomplete_gamma(f64::NAN, 1.0).is_err());
        assert!(beta_function(0.0, 1.0).is_err());
        assert!(beta_function(1.0, -0.5).is_err());
    }

    #[test]
    fn beta_identities() {
        assert!(rel(beta_function(0.5, 0.5).unwrap(), PI) < 1e-14);
        // B(2/3, 1/3) = Gamma(2/3) Gamma(1/3) = 2 pi / sqrt 3
        let b = beta_function(2.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!(rel(b, 2.0 * PI / 3f64.sqrt()) < 1e-13);
        assert!(rel(beta_function(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-14);
    }
}
