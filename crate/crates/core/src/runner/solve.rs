//! `solve`: fixed points of the smoothing equation and the pantograph equation.

use serde::Serialize;

use super::config::{Equation, ExperimentConfig, GridSpec, Spacing};
use super::Artifacts;
use crate::error::Result;
use crate::fixedpoint::{
    check_integral_equation, default_grid, j_half, j_one, j_quarter, natural_normalization,
    solve_pantograph, solve_smoothing_j_with, z_of_alpha, Grid, LaplaceSolution, SolverOptions, MAX_ORDER,
};
use crate::martingale::classify;

#[derive(Serialize)]
struct ClosedFormCheck {
    name: &'static str,
    max_abs_error: f64,
}

#[derive(Serialize)]
struct SolveSummary {
    equation: Equation,
    z: Option<f64>,
    alpha: Option<f64>,
    normalization: &'static str,
    grid: Grid,
    xmax: f64,
    rows: usize,
    residual: Option<f64>,
    sweeps: Option<usize>,
    slope_readout: Option<f64>,
    asymptotic_constant: Option<f64>,
    series_radius: Option<f64>,
    closed_form: Option<ClosedFormCheck>,
}

fn closed_form_error(sol: &LaplaceSolution, xmax: f64, name: &'static str, f: fn(f64) -> f64) -> ClosedFormCheck {
    let max_abs_error = sol
        .points()
        .iter()
        .zip(sol.values())
        .filter(|(x, _)| **x <= xmax)
        .map(|(&x, &v)| (v - f(x)).abs())
        .fold(0.0, f64::max);
    ClosedFormCheck { name, max_abs_error }
}

fn quarter_exp(x: f64) -> f64 {
    (-x / 4.0).exp()
}

pub(super) fn solve(c: &ExperimentConfig) -> Result<Artifacts> {
    let equation = c.equation.unwrap_or(Equation::Smoothing);
    let (sol, summary) = match equation {
        Equation::Smoothing => {
            let z = c.z.expect("validated");
            let p = classify(z)?;
            let grid = c.grid_or(default_grid())?;
            let opts = c.solver.map(|s| s.apply(SolverOptions::default())).unwrap_or_default();
            let sol = solve_smoothing_j_with(&p, grid, natural_normalization(&p), opts)?;
            let xmax = c.xmax.unwrap_or(grid.hi());
            let closed = match z {
                _ if z == 1.0 => Some(closed_form_error(&sol, xmax, "1/(1+x)", j_one)),
                _ if z == 0.5 => Some(closed_form_error(&sol, xmax, "exp(-x)", j_half)),
                _ if z == 0.25 => Some(closed_form_error(&sol, xmax, "(1+sqrt(2x))exp(-sqrt(2x))", j_quarter)),
                _ => None,
            };
            let summary = SolveSummary {
                equation,
                z: Some(z),
                alpha: p.alpha,
                normalization: sol.normalization().name(),
                grid,
                xmax,
                rows: sol.points().iter().filter(|&&x| x <= xmax).count(),
                residual: sol.residual,
                sweeps: sol.sweeps,
                slope_readout: sol.slope_readout,
                asymptotic_constant: sol.asymptotic_constant,
                series_radius: None,
                closed_form: closed,
            };
            (sol, summary)
        }
        Equation::Pantograph => {
            let alpha = c.pantograph_alpha()?;
            let xmax = c.xmax.unwrap_or(20.0);
            let order = c.order.unwrap_or(MAX_ORDER);
            let grid = c
                .grid
                .unwrap_or(GridSpec {
                    spacing: Spacing::Linear,
                    lo: 0.0,
                    hi: xmax,
                    n: 1001,
                })
                .to_grid()?;
            let pan = solve_pantograph(alpha, order, xmax)?;
            let radius = pan.series().radius();
            let z = z_of_alpha(alpha);
            let mut sol = pan.to_solution(grid);
            let residual = check_integral_equation(&sol, &classify(z.unwrap_or(1.0))?)?;
            sol.residual = Some(residual);
            let closed = (alpha == 2.0).then(|| closed_form_error(&sol, xmax, "exp(-x/4)", quarter_exp));
            let summary = SolveSummary {
                equation,
                z,
                alpha: Some(alpha),
                normalization: sol.normalization().name(),
                grid,
                xmax,
                rows: sol.points().len(),
                residual: Some(residual),
                sweeps: None,
                slope_readout: None,
                asymptotic_constant: sol.asymptotic_constant,
                series_radius: Some(radius),
                closed_form: closed,
            };
            (sol, summary)
        }
    };
    let mut csv = Vec::new();
    sol.write_csv_upto(summary.xmax, &mut csv)?;
    let mut art = Artifacts::default();
    art.add("solution.csv", csv);
    art.add("solution.json", serde_json::to_string_pretty(&summary)? + "\n");
    Ok(art)
}
