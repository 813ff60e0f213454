//! Residuals of candidate solutions in the `j`-form and the `φ`-form.

use super::smoothing::Kernel;
use super::solution::{Form, LaplaceSolution, Param};
use crate::error::{Error, Result};
use crate::martingale::ParamZ;
use crate::numeric::quadrature::{gauss_legendre, Rule};

/// Upper end of the explicit `φ`-form integration; beyond it a power-law tail is added.
const PHI_UPPER: f64 = 1e10;

/// `sup_x |LHS − RHS|` over the candidate's grid, for the equation its form names.
pub fn check_integral_equation(candidate: &LaplaceSolution, z: &ParamZ) -> Result<f64> {
    match candidate.form() {
        Form::J => Ok(j_residual(candidate, z.z)),
        Form::Phi => {
            let alpha = match candidate.param() {
                Param::Alpha(a) => a,
                Param::Z(_) => z
                    .alpha
                    .ok_or_else(|| Error::Domain("alpha is undefined at z = 1/2".into()))?,
            };
            Ok(phi_residual(candidate, alpha))
        }
        Form::Psi => Err(Error::Precondition(
            "convolution candidates are checked with check_psi_convolution".into(),
        )),
    }
}

fn j_residual(candidate: &LaplaceSolution, z: f64) -> f64 {
    let kernel = Kernel::new(z);
    candidate
        .points()
        .iter()
        .zip(candidate.values())
        .map(|(&x, &v)| {
            if x <= 0.0 {
                return (v - 1.0).abs();
            }
            let rhs = kernel.apply(x.ln(), |t| candidate.eval_extended(t.exp()));
            (v - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// `α^{-2} ∫_x^∞ φ(y/α)^2 dy`.
pub fn phi_rhs(f: &dyn Fn(f64) -> f64, alpha: f64, x: f64) -> f64 {
    let gl = gauss_legendre(16);
    let g = |y: f64| {
        let v = f(y / alpha);
        v * v
    };
    let mut total = 0.0;
    let mut start = x;
    if x <= 0.0 {
        // Linear panels up to 1, then logarithmic ones.
        let panels = 8;
        for i in 0..panels {
            let a = x + (1.0 - x) * i as f64 / panels as f64;
            let b = x + (1.0 - x) * (i + 1) as f64 / panels as f64;
            total += gl.mapped(a, b).integrate(g);
        }
        start = 1.0;
    }
    let (la, lb) = (start.ln(), PHI_UPPER.max(start * 10.0).ln());
    let panels = ((lb - la) / 0.25).ceil().max(1.0) as usize;
    let width = (lb - la) / panels as f64;
    let unit: Rule = gl;
    for i in 0..panels {
        let a = la + width * i as f64;
        let r = unit.mapped(a, a + width);
        total += r.integrate(|t| {
            let y = t.exp();
            y * g(y)
        });
    }
    // Power-law tail g(y) ≈ g(Y)(Y/y)^q.
    let y1 = lb.exp();
    let y0 = (lb - width).exp();
    let (g0, g1) = (g(y0), g(y1));
    if g1 > 0.0 && g0 > 0.0 {
        let q = (g0 / g1).ln() / (y1 / y0).ln();
        if q > 1.0 {
            total += g1 * y1 / (q - 1.0);
        }
    }
    total / (alpha * alpha)
}

fn phi_residual(candidate: &LaplaceSolution, alpha: f64) -> f64 {
    let f = |y: f64| candidate.eval_extended(y);
    candidate
        .points()
        .iter()
        .zip(candidate.values())
        .map(|(&x, &v)| (v - phi_rhs(&f, alpha, x)).abs())
        .fold(0.0, f64::max)
}
