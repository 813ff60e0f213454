//! The parameter `z`, its criticality region and derived constants.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Distance from a critical root within which `z` is classified critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Subcritical,
    Supercritical,
    CriticalMinus,
    CriticalPlus,
}

impl Region {
    pub fn is_critical(self) -> bool {
        matches!(self, Region::CriticalMinus | Region::CriticalPlus)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Subcritical => "subcritical",
            Region::Supercritical => "supercritical",
            Region::CriticalMinus => "critical_minus",
            Region::CriticalPlus => "critical_plus",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamZ {
    pub z: f64,
    /// `θ = 1 − 2z`.
    pub theta: f64,
    pub region: Region,
    /// `α(z) = z^{1/(2z−1)}`; `None` at `z = 1/2`.
    pub alpha: Option<f64>,
    /// `K_0 = 2/|2z − 1|`, populated for critical `z`.
    pub k0: Option<f64>,
}

impl ParamZ {
    pub fn alpha_defined(&self) -> bool {
        self.alpha.is_some()
    }
}

/// `f(z) = 2z ln z − 2z + 1`, whose two positive roots are the critical points.
#[inline]
pub fn critical_function(z: f64) -> f64 {
    2.0 * z * z.ln() - 2.0 * z + 1.0
}

fn root(mut lo: f64, mut hi: f64, tolerance: f64) -> f64 {
    // f' = 2 ln z vanishes only at z = 1, outside both brackets.
    let mut flo = critical_function(lo);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        let fm = critical_function(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..100 {
        let step = critical_function(z) / (2.0 * z.ln());
        z -= step;
        if step.abs() <= tolerance * 1e-3 {
            break;
        }
    }
    z
}

/// `(z_c^-, z_c^+)`, the roots of `2z ln z − 2z + 1 = 0` below and above 1/2.
pub fn critical_points(tolerance: f64) -> Result<(f64, f64)> {
    if !(tolerance > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    Ok((root(0.01, 0.5, tolerance), root(1.5, 3.0, tolerance)))
}

/// Critical points at full precision, computed once.
pub fn critical() -> (f64, f64) {
    static CELL: OnceLock<(f64, f64)> = OnceLock::new();
    *CELL.get_or_init(|| critical_points(1e-15).expect("positive tolerance"))
}

pub fn z_c_minus() -> f64 {
    critical().0
}

pub fn z_c_plus() -> f64 {
    critical().1
}

/// `α(z) = z^{1/(2z−1)}`, undefined at `z = 1/2`.
pub fn alpha_of(z: f64) -> Option<f64> {
    if z == 0.5 {
        None
    } else {
        Some((z.ln() / (2.0 * z - 1.0)).exp())
    }
}

/// `α_c = e^{1/c}` with `c = 2 z_c^+`.
pub fn alpha_critical() -> f64 {
    (1.0 / (2.0 * z_c_plus())).exp()
}

pub fn classify(z: f64) -> Result<ParamZ> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("z must be positive and finite, got {z}")));
    }
    let (lo, hi) = critical();
    let region = if (z - lo).abs() <= CRITICAL_TOLERANCE {
        Region::CriticalMinus
    } else if (z - hi).abs() <= CRITICAL_TOLERANCE {
        Region::CriticalPlus
    } else if z > lo && z < hi {
        Region::Supercritical
    } else {
        Region::Subcritical
    };
    Ok(ParamZ {
        z,
        theta: 1.0 - 2.0 * z,
        region,
        alpha: alpha_of(z),
        k0: region
            .is_critical()
            .then(|| 2.0 / (2.0 * z - 1.0).abs()),
    })
}
