//! Moment identities behind the `z = 1/4` limit laws.

use crate::error::{Error, Result};
use crate::fixedpoint::{mellin, MellinLaw};
use crate::numeric::special::ln_gamma;

use super::gof::{TestKind, TestReport, Verdict};

/// Relative tolerance for closed-form moment identities.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn check_s(s: f64) -> Result<()> {
    if !(s > -0.75) || !s.is_finite() {
        return Err(Error::Domain(format!("moment order s = {s} must exceed -3/4")));
    }
    Ok(())
}

fn report(suite: &str, s: f64, lhs: f64, rhs: f64) -> TestReport {
    let rel = relative(lhs, rhs);
    let mut r = TestReport::new(suite, TestKind::Moment);
    r.statistic = rel;
    r.stat("s", s).stat("lhs", lhs).stat("rhs", rhs).stat("relative_error", rel);
    r.tol("relative", MOMENT_TOLERANCE);
    r.verdict = Verdict::from_bool(rel <= MOMENT_TOLERANCE);
    r
}

/// `E γ_{3/2}^{2s}` against `4^s E β_{3/4,1/4}^s E γ_1^s E γ_{5/4}^s`.
pub fn moment_check_yor(s: f64) -> Result<TestReport> {
    check_s(s)?;
    let lhs = mellin(MellinLaw::Gamma { a: 1.5 }, 2.0 * s)?;
    let rhs = 4f64.powf(s)
        * mellin(MellinLaw::Beta { a: 0.75, b: 0.25 }, s)?
        * mellin(MellinLaw::Gamma { a: 1.0 }, s)?
        * mellin(MellinLaw::Gamma { a: 1.25 }, s)?;
    Ok(report("yor", s, lhs, rhs))
}

/// `E A^s` for `A = M^{BST}_∞(1/4)^{−2}` in two forms:
/// `2^{2s} Γ(2s + 3/2) / (Γ(3/2) π^s Γ(s + 1))` against
/// `(16/π)^s E β_{3/4,1/4}^s E γ_{5/4}^s`.
pub fn mellin_chain(s: f64) -> Result<TestReport> {
    check_s(s)?;
    let pi = std::f64::consts::PI;
    let lhs = (2.0 * s * 2f64.ln() + ln_gamma(2.0 * s + 1.5) - ln_gamma(1.5) - s * pi.ln() - ln_gamma(s + 1.0)).exp();
    let rhs = (16.0 / pi).powf(s)
        * mellin(MellinLaw::Beta { a: 0.75, b: 0.25 }, s)?
        * mellin(MellinLaw::Gamma { a: 1.25 }, s)?;
    Ok(report("mellin_chain", s, lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_sides_agree() {
        for s in [0.0, 0.5, 1.0, 2.0, -0.5, 3.7] {
            assert!(moment_check_yor(s).unwrap().passed(), "yor s = {s}");
            assert!(mellin_chain(s).unwrap().passed(), "chain s = {s}");
        }
    }

    #[test]
    fn first_moment_is_fifteen_quarters() {
        let r = moment_check_yor(1.0).unwrap();
        assert!((r.statistics["lhs"] - 3.75).abs() < 1e-13);
        assert!((r.statistics["rhs"] - 3.75).abs() < 1e-13);
        let z = moment_check_yor(0.0).unwrap();
        assert_eq!(z.statistics["lhs"], 1.0);
        assert_eq!(z.statistics["rhs"], 1.0);
    }

    #[test]
    fn domain() {
        assert!(matches!(moment_check_yor(-0.75), Err(Error::Domain(_))));
        assert!(matches!(mellin_chain(-1.0), Err(Error::Domain(_))));
    }
}
