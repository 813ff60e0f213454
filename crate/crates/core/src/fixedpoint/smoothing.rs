//! Fixed points of `J(x) = ∫_0^1 J(z x u^{2z−1})^2 du` with `J(0) = 1`.

use super::solution::{Form, Grid, LaplaceSolution, Normalization, Param, SmallX};
use crate::error::{Error, Result};
use crate::martingale::{critical, ParamZ, Region, CRITICAL_TOLERANCE};
use crate::numeric::interp::MonotoneCubic;
use crate::numeric::quadrature::composite;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop when successive sweeps differ by less than this in sup norm.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Weight of the new iterate during the first `damped_sweeps` sweeps.
    pub damping: f64,
    pub damped_sweeps: usize,
    /// Number of smallest abscissae used by the normalization fit.
    pub fit_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_sweeps: 2000,
            damping: 0.5,
            damped_sweeps: 10,
            fit_points: 10,
        }
    }
}

/// `[1e-6, 1e3]`, 2000 points uniform in `ln x`.
pub fn default_grid() -> Grid {
    Grid::Log {
        lo: 1e-6,
        hi: 1e3,
        n: 2000,
    }
}

/// Quadrature for `∫_0^1 g(u^{2z−1}) du`, stored as `(ln multiplier, weight)`.
///
/// For `z < 1/2` the variable `v = u^{2z}` removes the endpoint singularity.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub z: f64,
    pub log_mult: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Kernel {
    pub fn new(z: f64) -> Self {
        if z == 0.5 {
            // The integrand does not depend on u.
            return Kernel {
                z,
                log_mult: vec![0.0],
                weights: vec![1.0],
            };
        }
        // Panels [4^{-k-1}, 4^{-k}] keep power-law integrands resolved to rounding.
        let mut breaks = vec![0.0];
        breaks.extend((1..=23).rev().map(|k| 4f64.powi(-k)));
        breaks.push(1.0);
        let rule = composite(&breaks, 16);
        let e = 2.0 * z - 1.0;
        let (log_mult, weights) = if z < 0.5 {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&v, &w)| {
                    let lv = v.ln();
                    (e / (2.0 * z) * lv, w * (-e / (2.0 * z) * lv).exp() / (2.0 * z))
                })
                .unzip()
        } else {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&u, &w)| (e * u.ln(), w))
                .unzip()
        };
        Kernel {
            z,
            log_mult,
            weights,
        }
    }

    /// `∫_0^1 J(z x u^{2z−1})^2 du` for `J` given as a function of `ln x`.
    #[inline]
    pub fn apply(&self, lx: f64, j_of_log: impl Fn(f64) -> f64) -> f64 {
        let base = self.z.ln() + lx;
        self.log_mult
            .iter()
            .zip(&self.weights)
            .map(|(&lm, &w)| {
                let v = j_of_log(base + lm);
                w * v * v
            })
            .sum()
    }
}

/// The root in `(1, 2)` of `2 z^p = (2z − 1) p + 1`, or 2 when there is none.
/// It is the exponent of the first correction in `1 − J(x) = x − b x^p + …`.
pub fn correction_exponent(z: f64) -> f64 {
    let f = |p: f64| 2.0 * z.powf(p) - (2.0 * z - 1.0) * p - 1.0;
    let (mut lo, mut hi) = (1.0 + 1e-9, 2.0);
    if f(lo) * f(hi) >= 0.0 {
        return 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (f(lo) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A tabulated iterate in `ln x`, continued below the grid by the small-`x`
/// model and above it by a power law.
struct Iterate {
    interp: MonotoneCubic,
    small: SmallX,
    t_lo: f64,
    t_hi: f64,
    ly_hi: f64,
    slope: f64,
}

impl Iterate {
    fn new(t0: f64, h: f64, xs: &[f64], y: &[f64], critical: bool, p: f64, k: usize) -> Self {
        let n = y.len();
        let small = SmallX::fit(&xs[..k], &y[..k], critical, p);
        let (a, b) = (y[n - 2].max(1e-300).ln(), y[n - 1].max(1e-300).ln());
        Iterate {
            interp: MonotoneCubic::new(t0, h, y.to_vec()),
            small,
            t_lo: t0,
            t_hi: t0 + h * (n - 1) as f64,
            ly_hi: b,
            slope: ((b - a) / h).min(0.0),
        }
    }

    #[inline]
    fn at(&self, t: f64) -> f64 {
        if t < self.t_lo {
            self.small.value(t.exp()).clamp(0.0, 1.0)
        } else if t > self.t_hi {
            (self.ly_hi + self.slope * (t - self.t_hi)).exp()
        } else {
            self.interp.eval(t)
        }
    }
}

fn check_region(z: &ParamZ, mode: Normalization) -> Result<(bool, f64)> {
    let (lo, hi) = critical();
    if z.z < lo - CRITICAL_TOLERANCE || z.z > hi + CRITICAL_TOLERANCE {
        return Err(Error::Domain(format!(
            "z = {} lies outside [z_c^-, z_c^+]; only the constant solution exists",
            z.z
        )));
    }
    match (z.region, mode) {
        (Region::CriticalMinus | Region::CriticalPlus, Normalization::CriticalK0) => {
            Ok((true, z.k0.expect("critical z has K_0")))
        }
        (Region::Supercritical, Normalization::SlopeOne) => Ok((false, 1.0)),
        (r, m) => Err(Error::Precondition(format!(
            "normalization {} does not apply to a {r} parameter",
            m.name()
        ))),
    }
}

/// The normalization that matches the region of `z`.
pub fn natural_normalization(z: &ParamZ) -> Normalization {
    if z.region.is_critical() {
        Normalization::CriticalK0
    } else {
        Normalization::SlopeOne
    }
}

pub fn solve_smoothing_j(z: &ParamZ, grid: Grid, mode: Normalization) -> Result<LaplaceSolution> {
    solve_smoothing_j_with(z, grid, mode, SolverOptions::default())
}

pub fn solve_smoothing_j_with(
    z: &ParamZ,
    grid: Grid,
    mode: Normalization,
    opts: SolverOptions,
) -> Result<LaplaceSolution> {
    let Grid::Log { .. } = grid else {
        return Err(Error::Precondition("the smoothing solver needs a log grid".into()));
    };
    let (critical, target) = check_region(z, mode)?;
    let xs = grid.points();
    let n = xs.len();
    let k = opts.fit_points.min(n);
    let (t0, h) = grid.spacing();
    let lxs: Vec<f64> = (0..n).map(|i| t0 + h * i as f64).collect();
    let p = if critical { 2.0 } else { correction_exponent(z.z) };
    let kernel = Kernel::new(z.z);

    let mut j: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
    let mut sweeps = 0;
    let mut change = f64::INFINITY;
    while sweeps < opts.max_sweeps {
        let cur = Iterate::new(t0, h, &xs, &j, critical, p, k);
        let raw: Vec<f64> = lxs.iter().map(|&lx| kernel.apply(lx, |t| cur.at(t))).collect();
        // Pin the scale: rescale x so that the fitted slope constant hits its target.
        let next = Iterate::new(t0, h, &xs, &raw, critical, p, k);
        let ln_kappa = (target / next.small.leading()).ln();
        let w = if sweeps < opts.damped_sweeps { opts.damping } else { 1.0 };
        change = 0.0;
        for (i, &lx) in lxs.iter().enumerate() {
            let v = w * next.at(lx + ln_kappa) + (1.0 - w) * j[i];
            change = f64::max(change, (v - j[i]).abs());
            j[i] = v;
        }
        sweeps += 1;
        if !change.is_finite() {
            break;
        }
        if change < opts.tolerance {
            break;
        }
    }
    if !(change < opts.tolerance) {
        return Err(Error::Iteration {
            sweeps,
            last_change: change,
        });
    }
    let fin = Iterate::new(t0, h, &xs, &j, critical, p, k);
    let residual = lxs
        .iter()
        .zip(&j)
        .map(|(&lx, &v)| (kernel.apply(lx, |t| fin.at(t)) - v).abs())
        .fold(0.0, f64::max);
    let readout = if critical {
        let m = xs.iter().take_while(|&&x| x <= 1e-3).count().max(k);
        SmallX::fit(&xs[..m], &j[..m], true, 2.0).leading()
    } else {
        fin.small.leading()
    };
    let mut sol = LaplaceSolution::from_table(
        grid,
        j,
        Form::J,
        Param::Z(z.z),
        mode,
        Some(fin.small),
    )?;
    sol.residual = Some(residual);
    sol.sweeps = Some(sweeps);
    sol.slope_readout = Some(readout);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::classify;

    #[test]
    fn kernel_integrates_the_one_step_identity() {
        // z ∫ (u^{2z−1} + (1−u)^{2z−1}) du = 1, i.e. 2z ∫ u^{2z−1} du = 1.
        for z in [0.2, 0.25, 0.5, 1.0, 2.0] {
            let k = Kernel::new(z);
            let s: f64 = k
                .log_mult
                .iter()
                .zip(&k.weights)
                .map(|(&lm, &w)| w * lm.exp())
                .sum();
            assert!((2.0 * z * s - 1.0).abs() < 1e-10, "z = {z}: {s}");
            let total: f64 = k.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correction_exponents() {
        assert_eq!(correction_exponent(1.0), 2.0);
        let p = correction_exponent(0.25);
        assert!(p > 1.0 && p < 2.0);
        assert!((2.0 * 0.25f64.powf(p) + 0.5 * p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outside_the_region() {
        let z = classify(0.125).unwrap();
        assert!(matches!(
            solve_smoothing_j(&z, default_grid(), Normalization::SlopeOne),
            Err(Error::Domain(_))
        ));
        let z = classify(1.0).unwrap();
        assert!(matches!(
            solve_smoothing_j(&z, default_grid(), Normalization::CriticalK0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn half_is_exponential() {
        let z = classify(0.5).unwrap();
        let s = solve_smoothing_j(&z, default_grid(), Normalization::SlopeOne).unwrap();
        for (x, v) in s.points().iter().zip(s.values()) {
            assert!((v - (-x).exp()).abs() < 1e-6, "x = {x}: {v} vs {}", (-x).exp());
        }
    }

    fn max_error(s: &LaplaceSolution, f: impl Fn(f64) -> f64) -> f64 {
        s.points()
            .iter()
            .zip(s.values())
            .map(|(&x, &v)| (v - f(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn closed_forms() {
        let one = solve_smoothing_j(&classify(1.0).unwrap(), default_grid(), Normalization::SlopeOne).unwrap();
        let e1 = max_error(&one, |x| 1.0 / (1.0 + x));
        let q = solve_smoothing_j(&classify(0.25).unwrap(), default_grid(), Normalization::SlopeOne).unwrap();
        let s2 = |x: f64| (2.0 * x).sqrt();
        let e4 = max_error(&q, |x| (1.0 + s2(x)) * (-s2(x)).exp());
        eprintln!("z=1: {e1:e} ({:?} sweeps), z=1/4: {e4:e} ({:?} sweeps)", one.sweeps, q.sweeps);
        assert!(e1 < 1e-6);
        assert!(e4 < 1e-4);
    }

    #[test]
    fn critical_slope() {
        let z = classify(crate::martingale::z_c_plus()).unwrap();
        let s = solve_smoothing_j(&z, default_grid(), Normalization::CriticalK0).unwrap();
        let k0 = z.k0.unwrap();
        let r = s.slope_readout.unwrap();
        eprintln!("critical: readout {r} vs {k0}, residual {:?}", s.residual);
        assert!((r - k0).abs() < 0.05 * k0);
    }
}
