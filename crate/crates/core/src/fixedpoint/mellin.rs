//! Mellin transforms `E X^s` of gamma and beta laws.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::special::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum MellinLaw {
    Gamma { a: f64 },
    Beta { a: f64, b: f64 },
}

/// `E γ_a^s = Γ(s + a)/Γ(a)` and `E β_{a,b}^s = Γ(a + s)Γ(a + b)/(Γ(a)Γ(a + b + s))`, for `s > −a`.
pub fn mellin(law: MellinLaw, s: f64) -> Result<f64> {
    match law {
        MellinLaw::Gamma { a } => {
            check(a, s)?;
            Ok((ln_gamma(s + a) - ln_gamma(a)).exp())
        }
        MellinLaw::Beta { a, b } => {
            check(a, s)?;
            if !(b > 0.0) {
                return Err(Error::Domain(format!("beta parameter b = {b} must be positive")));
            }
            Ok((ln_gamma(a + s) + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(a + b + s)).exp())
        }
    }
}

fn check(a: f64, s: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("shape a = {a} must be positive")));
    }
    if !(s > -a) {
        return Err(Error::Domain(format!("Mellin argument s = {s} must exceed -a = {}", -a)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((mellin(MellinLaw::Gamma { a: 1.0 }, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let m = mellin(MellinLaw::Gamma { a: 1.5 }, 2.0).unwrap();
        assert!((m - 3.75).abs() < 1e-13, "{m}");
        assert!((mellin(MellinLaw::Beta { a: 0.75, b: 0.25 }, 1.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(mellin(MellinLaw::Gamma { a: 1.5 }, -1.5).is_err());
        assert!((mellin(MellinLaw::Beta { a: 2.0, b: 3.0 }, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
