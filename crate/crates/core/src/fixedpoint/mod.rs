//! Functional equations of the martingale limits: the smoothing fixed point,
//! the pantograph equation, the convolution equation, the Laplace
//! connection between `j` and `j^BST`, and Mellin transforms.

mod connection;
mod equation;
mod mellin;
mod pantograph;
mod psi;
mod smoothing;
mod solution;

pub use connection::{empirical_laplace, laplace_connection, laplace_connection_with, LAGUERRE_NODES};
pub use equation::{check_integral_equation, phi_rhs};
pub use mellin::{mellin, MellinLaw};
pub use pantograph::{solve_pantograph, solve_phi_series, z_of_alpha, Pantograph, PhiSeries, MAX_ORDER};
pub use psi::{check_psi_convolution, psi_from_bst_transform, rescale_psi};
pub use smoothing::{
    correction_exponent, default_grid, natural_normalization, solve_smoothing_j,
    solve_smoothing_j_with, Kernel, SolverOptions,
};
pub use solution::{Form, Grid, LaplaceSolution, Normalization, Param, SmallX};

/// `j(1, x) = 1/(1 + x)`.
pub fn j_one(x: f64) -> f64 {
    1.0 / (1.0 + x)
}

/// `j(1/2, x) = e^{−x}`.
pub fn j_half(x: f64) -> f64 {
    (-x).exp()
}

/// `j(1/4, x) = (1 + √(2x)) e^{−√(2x)}`.
pub fn j_quarter(x: f64) -> f64 {
    let s = (2.0 * x).sqrt();
    (1.0 + s) * (-s).exp()
}

/// `φ̄(x) = (1 + x^{1/4}) e^{−x^{1/4}} / x`, a solution of the `φ`-form at `α = 16`.
pub fn phi_bar(x: f64) -> f64 {
    let q = x.sqrt().sqrt();
    (1.0 + q) * (-q).exp() / x
}
