//! Special functions (thin wrappers over `statrs`).

use statrs::function::{beta, gamma};

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// `Γ(x)` for `x > 0`.
#[inline]
pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

#[inline]
pub fn digamma(x: f64) -> f64 {
    gamma::digamma(x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma::gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma::gamma_ur(a, x)
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta::beta_reg(a, b, x)
    }
}

#[inline]
pub fn ln_beta(a: f64, b: f64) -> f64 {
    beta::ln_beta(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn duplication_formula() {
        for y in [0.75, 1.5, 3.25] {
            let lhs = ln_gamma(2.0 * y);
            let rhs = -0.5 * (2.0 * PI).ln()
                + (2.0 * y - 0.5) * 2f64.ln()
                + ln_gamma(y)
                + ln_gamma(y + 0.5);
            assert!(((lhs - rhs).exp() - 1.0).abs() < 1e-12, "y = {y}");
        }
    }

    #[test]
    fn incomplete_gamma_edges() {
        assert_eq!(gamma_q(1.5, 0.0), 1.0);
        assert!((gamma_p(1.0, 2f64.ln()) - 0.5).abs() < 1e-14);
        assert!((gamma_p(1.5, 3.0) + gamma_q(1.5, 3.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_symmetry() {
        let (a, b, x) = (0.75, 0.25, 0.3);
        assert!((beta_reg(a, b, x) + beta_reg(b, a, 1.0 - x) - 1.0).abs() < 1e-13);
        assert!((ln_beta(0.75, 0.25) - (PI * 2f64.sqrt()).ln()).abs() < 1e-13);
    }
}
