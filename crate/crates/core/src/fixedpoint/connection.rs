//! `j(z, x) = ∫_0^∞ j^BST(z, x η^{2z−1}/Γ(2z)) e^{−η} dη` and empirical transforms.

use super::solution::{Form, Grid, LaplaceSolution, Normalization, Param};
use crate::error::{Error, Result};
use crate::martingale::ParamZ;
use crate::numeric::quadrature::gauss_laguerre;
use crate::numeric::special::ln_gamma;
use crate::numeric::NeumaierSum;

pub const LAGUERRE_NODES: usize = 64;

pub fn laplace_connection(j_bst: &LaplaceSolution, z: &ParamZ, x: f64) -> Result<f64> {
    laplace_connection_with(j_bst, z, x, LAGUERRE_NODES)
}

pub fn laplace_connection_with(
    j_bst: &LaplaceSolution,
    z: &ParamZ,
    x: f64,
    nodes: usize,
) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let rule = gauss_laguerre(nodes);
    let (e, lg) = (2.0 * z.z - 1.0, ln_gamma(2.0 * z.z));
    let mut acc = NeumaierSum::new();
    for (&eta, &w) in rule.nodes.iter().zip(&rule.weights) {
        let arg = (x.ln() + e * eta.ln() - lg).exp();
        let v = j_bst.eval(arg).map_err(|err| match err {
            Error::Extrapolation { x, lo, hi } => Error::Range(format!(
                "connection needs j_bst at {x}, outside its grid [{lo}, {hi}]"
            )),
            other => other,
        })?;
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// `s ↦ mean(e^{−s X_i})` tabulated on `grid`.
pub fn empirical_laplace(samples: &[f64], grid: Grid, param: Param) -> Result<LaplaceSolution> {
    if samples.is_empty() {
        return Err(Error::Precondition("no samples".into()));
    }
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&s| {
            let acc: NeumaierSum = samples.iter().map(|&m| (-s * m).exp()).collect();
            acc.value() / samples.len() as f64
        })
        .collect();
    LaplaceSolution::from_table(grid, values, Form::J, param, Normalization::SlopeOne, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::classify;

    #[test]
    fn trivial_cases() {
        let g = Grid::log(1e-8, 1e4, 300).unwrap();
        let e = LaplaceSolution::closed_form(g, |x| (-x).exp(), Form::J, Param::Z(0.5), Normalization::SlopeOne);
        let half = classify(0.5).unwrap();
        assert_eq!(laplace_connection(&e, &half, 0.0).unwrap(), 1.0);
        for x in [0.1, 1.0, 3.0] {
            assert!((laplace_connection(&e, &half, x).unwrap() - (-x).exp()).abs() < 1e-12);
        }
        // M^BST(1) ≡ 1 gives j^BST(1, x) = e^{-x}, and then j(1, x) = 1/(1 + x).
        let one = classify(1.0).unwrap();
        for x in [0.1, 1.0, 3.0] {
            let v = laplace_connection(&e, &one, x).unwrap();
            assert!((v - 1.0 / (1.0 + x)).abs() < 1e-10, "x = {x}: {v}");
        }
    }

    #[test]
    fn grid_coverage_is_checked() {
        let g = Grid::log(1e-2, 1.0, 50).unwrap();
        let s = LaplaceSolution::from_table(
            g,
            g.points().iter().map(|x| (-x).exp()).collect(),
            Form::J,
            Param::Z(1.0),
            Normalization::SlopeOne,
            None,
        )
        .unwrap();
        assert!(matches!(
            laplace_connection(&s, &classify(1.0).unwrap(), 5.0),
            Err(Error::Range(_))
        ));
    }
}
