//! The retarded equation `Φ'(x) = −α^{-2} Φ(x/α)^2`, `Φ(0) = 1`.

use std::sync::Arc;

use super::solution::{Form, Grid, LaplaceSolution, Normalization, Param};
use crate::error::{Error, Result};
use crate::martingale::{alpha_critical, alpha_of, z_c_plus};
use crate::numeric::quadrature::gauss_legendre;

pub const MAX_ORDER: usize = 200;

/// Truncated power series of `Φ` with its empirically reliable radius.
#[derive(Clone, Debug)]
pub struct PhiSeries {
    alpha: f64,
    coeffs: Vec<f64>,
    radius: f64,
}

/// Coefficients `a_0 = 1`, `a_{k+1} = −α^{−(k+2)}/(k+1) Σ_{i+j=k} a_i a_j`.
pub fn solve_phi_series(alpha: f64, order: usize) -> Result<PhiSeries> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Range(format!("order must be in 1..={MAX_ORDER}, got {order}")));
    }
    let mut a = vec![1.0];
    let mut pow = alpha; // α^{k+1}
    for k in 0..order {
        pow *= alpha;
        let conv: f64 = (0..=k).map(|i| a[i] * a[k - i]).sum();
        a.push(-conv / (pow * (k + 1) as f64));
    }
    let mut s = PhiSeries {
        alpha,
        coeffs: a,
        radius: 0.0,
    };
    s.radius = s.find_radius();
    Ok(s)
}

impl PhiSeries {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest `x` with `Σ |a_k| x^k ≤ 100` and `|a_N| x^N < 1e-14`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn reliable(&self, x: f64) -> bool {
        let mut p = 1.0;
        let mut total = 0.0;
        let mut last = 0.0;
        for &c in &self.coeffs {
            last = c.abs() * p;
            total += last;
            p *= x;
        }
        total <= 100.0 && last < 1e-14
    }

    fn find_radius(&self) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.reliable(hi) && hi < 1e6 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.reliable(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Horner evaluation without the radius check, with the size of the last term.
    pub fn eval_unchecked(&self, x: f64) -> (f64, f64) {
        let v = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let n = self.coeffs.len() - 1;
        (v, (self.coeffs[n] * x.powi(n as i32)).abs())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.abs() > self.radius {
            return Err(Error::Truncation {
                x,
                radius: self.radius,
            });
        }
        Ok(self.eval_unchecked(x).0)
    }
}

/// `Φ` on `[0, x_max]`: the series near the origin, then forward stepping of
/// `Φ(x + h) = Φ(x) − α^{-2} ∫_x^{x+h} Φ(s/α)^2 ds` on a geometric grid.
#[derive(Clone, Debug)]
pub struct Pantograph {
    series: PhiSeries,
    xs: Vec<f64>,
    vals: Vec<f64>,
    switch: f64,
}

pub const STEP_RATIO: f64 = 1.0005;

pub fn solve_pantograph(alpha: f64, order: usize, x_max: f64) -> Result<Pantograph> {
    let series = solve_phi_series(alpha, order)?;
    let switch = 0.5 * series.radius();
    let n0 = 2000;
    let mut xs: Vec<f64> = (0..=n0).map(|i| switch * i as f64 / n0 as f64).collect();
    let mut vals: Vec<f64> = xs.iter().map(|&x| series.eval_unchecked(x).0).collect();
    let gl = gauss_legendre(6);
    let a2 = alpha * alpha;
    let mut x = switch;
    while x < x_max {
        let xn = x * STEP_RATIO;
        let (m, hh) = (0.5 * (x + xn), 0.5 * (xn - x));
        let integral: f64 = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&t, &w)| {
                let v = lagrange4(&xs, &vals, (m + hh * t) / alpha);
                w * v * v
            })
            .sum::<f64>()
            * hh;
        let v = vals[vals.len() - 1] - integral / a2;
        xs.push(xn);
        vals.push(v);
        x = xn;
    }
    Ok(Pantograph {
        series,
        xs,
        vals,
        switch,
    })
}

/// Cubic interpolation through the four table nodes around `s`.
fn lagrange4(xs: &[f64], ys: &[f64], s: f64) -> f64 {
    let n = xs.len();
    let i = xs.partition_point(|&x| x <= s);
    let start = i.saturating_sub(2).min(n - 4);
    let (x, y) = (&xs[start..start + 4], &ys[start..start + 4]);
    let mut total = 0.0;
    for k in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != k {
                l *= (s - x[m]) / (x[k] - x[m]);
            }
        }
        total += l * y[k];
    }
    total
}

/// `z > 1/2` with `α(z) = α`, for `1 < α ≤ α_c`.
pub fn z_of_alpha(alpha: f64) -> Option<f64> {
    let ac = alpha_critical();
    if !(alpha > 1.0 && alpha <= ac * (1.0 + 1e-12)) {
        return None;
    }
    let (mut lo, mut hi) = (1.0, z_c_plus());
    if alpha >= ac {
        return Some(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if alpha_of(mid).expect("z != 1/2") < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

impl Pantograph {
    pub fn alpha(&self) -> f64 {
        self.series.alpha
    }

    pub fn series(&self) -> &PhiSeries {
        &self.series
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// `Φ(x)` for `0 ≤ x ≤ x_max`; beyond, continued as `Φ(x_max) x_max / x`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.switch {
            self.series.eval_unchecked(x).0
        } else if x <= self.x_max() {
            lagrange4(&self.xs, &self.vals, x)
        } else {
            let n = self.xs.len() - 1;
            self.vals[n] * self.xs[n] / x
        }
    }

    /// `(x, Φ(x))` table from the stepping.
    pub fn table(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.vals)
    }

    /// Measured `K_1 = lim (1 − xΦ)/x^{1−2z}` for `1 < α < α_c`, or
    /// `K_2 = lim (1 − xΦ)/(x^{1−2z} ln x)` at `α = α_c`, read as the mean of
    /// the ratio over `x ∈ [lo, hi]`.
    pub fn asymptotic_constant(&self, lo: f64, hi: f64) -> Option<f64> {
        let z = z_of_alpha(self.alpha())?;
        let critical = (self.alpha() - alpha_critical()).abs() < 1e-12;
        let e = 1.0 - 2.0 * z;
        let mut total = 0.0;
        let mut count = 0usize;
        for (&x, &v) in self.xs.iter().zip(&self.vals) {
            if x >= lo && x <= hi {
                let mut r = (1.0 - x * v) / x.powf(e);
                if critical {
                    r /= x.ln();
                }
                total += r;
                count += 1;
            }
        }
        (count > 0).then(|| total / count as f64)
    }

    /// The solution as a tabulated-for-output, evaluated-exactly function.
    pub fn to_solution(self, grid: Grid) -> LaplaceSolution {
        let alpha = self.alpha();
        let k = self.asymptotic_constant(5.0, 20.0);
        let shared = Arc::new(self);
        let mut s = LaplaceSolution::closed_form(
            grid,
            move |x| shared.eval(x),
            Form::Phi,
            Param::Alpha(alpha),
            Normalization::EntireSeries,
        );
        s.asymptotic_constant = k;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_coefficients() {
        let s = solve_phi_series(2.0, 50).unwrap();
        assert_eq!(s.coeffs()[0], 1.0);
        assert_eq!(s.coeffs()[1], -0.25);
        for (k, &c) in s.coeffs().iter().enumerate().take(20) {
            let exact = (-0.25f64).powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>();
            assert!((c - exact).abs() <= 1e-15 * exact.abs().max(1e-300), "k = {k}");
        }
    }

    #[test]
    fn domain_and_order() {
        assert!(matches!(solve_phi_series(1.0, 10), Err(Error::Domain(_))));
        assert!(matches!(solve_phi_series(2.0, 201), Err(Error::Range(_))));
        let s = solve_phi_series(alpha_critical(), 200).unwrap();
        assert!(matches!(s.eval(s.radius() * 1.5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn alpha_two_is_exponential() {
        let s = solve_phi_series(2.0, 200).unwrap();
        assert!(s.radius() > 5.0);
        for i in 0..=500 {
            let x = i as f64 * 0.01;
            assert!((s.eval(x).unwrap() - (-x / 4.0).exp()).abs() < 1e-12);
        }
        let p = solve_pantograph(2.0, 200, 60.0).unwrap();
        for x in [10.0, 25.0, 50.0] {
            let e = (-x / 4.0f64).exp();
            assert!((p.eval(x) - e).abs() < 1e-10 * e.max(1e-3), "x = {x}");
        }
    }

    #[test]
    fn z_of_alpha_inverts() {
        let z = z_of_alpha(1.2).unwrap();
        assert!((alpha_of(z).unwrap() - 1.2).abs() < 1e-12);
        assert!(z_of_alpha(2.0).is_none());
    }
}
