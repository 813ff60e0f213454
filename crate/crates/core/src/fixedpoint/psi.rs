//! The convolution equation `y ψ(y/α) = ∫_0^y ψ(w) ψ(y − w) dw`.

use super::solution::{Form, Grid, LaplaceSolution, Normalization, Param};
use crate::error::{Error, Result};
use crate::numeric::special::ln_gamma;

/// Relative residual `sup |LHS − RHS| / sup |LHS|` of the convolution identity,
/// with the integral by the trapezoidal rule on the candidate's uniform grid.
///
/// Dividing by the size of the left side makes the residual invariant under
/// the rescaling `ψ ↦ ψ(·/κ)` applied together with its grid.
pub fn check_psi_convolution(psi: &LaplaceSolution, alpha: f64) -> Result<f64> {
    let Grid::Linear { lo, hi, n } = psi.grid() else {
        return Err(Error::Precondition("ψ must be sampled on a uniform grid".into()));
    };
    if lo != 0.0 {
        return Err(Error::Precondition("ψ grid must start at 0".into()));
    }
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let v = psi.values();
    let ys = psi.points();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..n {
        let lhs = ys[k] * psi.eval(ys[k] / alpha)?;
        let rhs = if k == 0 {
            0.0
        } else {
            let inner: f64 = (0..=k).map(|i| v[i] * v[k - i]).sum();
            h * (inner - 0.5 * (v[0] * v[k] + v[k] * v[0]))
        };
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `ψ(w) = j^BST(z, (κw)^{2z−1}/Γ(2z))` on a uniform grid over `[0, y_max]`.
pub fn psi_from_bst_transform(
    j_bst: impl Fn(f64) -> f64,
    z: f64,
    kappa: f64,
    alpha: f64,
    y_max: f64,
    n: usize,
) -> Result<LaplaceSolution> {
    let grid = Grid::linear(0.0, y_max, n)?;
    let (e, lg) = (2.0 * z - 1.0, ln_gamma(2.0 * z));
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&w| {
            if w == 0.0 {
                // The argument diverges for z < 1/2 and vanishes for z > 1/2.
                if e < 0.0 { 0.0 } else { j_bst(0.0) }
            } else {
                j_bst((e * (kappa * w).ln() - lg).exp())
            }
        })
        .collect();
    LaplaceSolution::from_table(
        grid,
        values,
        Form::Psi,
        Param::Alpha(alpha),
        Normalization::EntireSeries,
        None,
    )
}

/// `ψ^κ(u) = ψ(u/κ)` resampled with its grid stretched by `κ`.
pub fn rescale_psi(psi: &LaplaceSolution, kappa: f64) -> Result<LaplaceSolution> {
    let Grid::Linear { lo, hi, n } = psi.grid() else {
        return Err(Error::Precondition("ψ must be sampled on a uniform grid".into()));
    };
    let grid = Grid::linear(lo * kappa, hi * kappa, n)?;
    LaplaceSolution::from_table(
        grid,
        psi.values().to_vec(),
        Form::Psi,
        psi.param(),
        psi.normalization(),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_solves_the_equation() {
        // ψ ≡ 1: y · 1 = ∫_0^y 1 dw for every α.
        let g = Grid::linear(0.0, 3.0, 61).unwrap();
        let one = LaplaceSolution::from_table(g, vec![1.0; 61], Form::Psi, Param::Alpha(16.0), Normalization::EntireSeries, None)
            .unwrap();
        assert!(check_psi_convolution(&one, 16.0).unwrap() < 1e-14);
        assert!(check_psi_convolution(&one, 2.0).unwrap() < 1e-14);
    }

    #[test]
    fn residual_is_scale_invariant() {
        let g = Grid::linear(0.0, 2.0, 201).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|y| y * (-y).exp()).collect();
        let psi = LaplaceSolution::from_table(g, vals, Form::Psi, Param::Alpha(16.0), Normalization::EntireSeries, None)
            .unwrap();
        let r = check_psi_convolution(&psi, 16.0).unwrap();
        assert!(r > 1e-3);
        for kappa in [0.25, 4.0, 7.5] {
            let scaled = rescale_psi(&psi, kappa).unwrap();
            let rk = check_psi_convolution(&scaled, 16.0).unwrap();
            assert!((rk - r).abs() < 1e-10, "kappa = {kappa}");
        }
    }
}
