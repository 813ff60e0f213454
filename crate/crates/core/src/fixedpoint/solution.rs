//! Tabulated (or closed-form) decreasing functions: Laplace transforms `j`,
//! the `φ`/`Φ` and the convolution density `ψ`.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::interp::MonotoneCubic;

/// Abscissae, uniform in `ln x` or in `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "spacing", rename_all = "snake_case")]
pub enum Grid {
    Log { lo: f64, hi: f64, n: usize },
    Linear { lo: f64, hi: f64, n: usize },
}

impl Grid {
    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 3) {
            return Err(Error::Precondition(format!(
                "log grid needs 0 < lo < hi and n >= 3, got [{lo}, {hi}] n={n}"
            )));
        }
        Ok(Grid::Log { lo, hi, n })
    }

    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && n >= 3) {
            return Err(Error::Precondition(format!(
                "linear grid needs 0 <= lo < hi and n >= 3, got [{lo}, {hi}] n={n}"
            )));
        }
        Ok(Grid::Linear { lo, hi, n })
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Log { n, .. } | Grid::Linear { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self) -> f64 {
        match *self {
            Grid::Log { lo, .. } | Grid::Linear { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            Grid::Log { hi, .. } | Grid::Linear { hi, .. } => hi,
        }
    }

    /// Interpolation coordinate of `x` (`ln x` or `x`).
    #[inline]
    pub fn coord(&self, x: f64) -> f64 {
        match self {
            Grid::Log { .. } => x.ln(),
            Grid::Linear { .. } => x,
        }
    }

    /// `(first coordinate, step)`.
    pub fn spacing(&self) -> (f64, f64) {
        match *self {
            Grid::Log { lo, hi, n } => (lo.ln(), (hi.ln() - lo.ln()) / (n - 1) as f64),
            Grid::Linear { lo, hi, n } => (lo, (hi - lo) / (n - 1) as f64),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let (t0, h) = self.spacing();
        let n = self.len();
        (0..n)
            .map(|i| {
                let x = match self {
                    Grid::Log { .. } => (t0 + h * i as f64).exp(),
                    Grid::Linear { .. } => t0 + h * i as f64,
                };
                // Pin the endpoints exactly.
                if i == 0 {
                    self.lo()
                } else if i == n - 1 {
                    self.hi()
                } else {
                    x
                }
            })
            .collect()
    }
}

/// Which functional equation the function is meant to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `J(x) = ∫_0^1 J(z x u^{2z−1})^2 du`.
    J,
    /// `φ(x) = α^{-2} ∫_x^∞ φ(y/α)^2 dy`.
    Phi,
    /// `y ψ(y/α) = ∫_0^y ψ(w) ψ(y − w) dw`.
    Psi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Z(f64),
    Alpha(f64),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Z(z) => write!(f, "z={z}"),
            Param::Alpha(a) => write!(f, "alpha={a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `(1 − J(x))/x → 1` as `x → 0`.
    SlopeOne,
    /// `(1 − J(x))/(x |ln x|) → K_0` as `x → 0`.
    CriticalK0,
    /// Entire solution pinned by its value at the origin.
    EntireSeries,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::SlopeOne => "slope_one",
            Normalization::CriticalK0 => "critical_K0",
            Normalization::EntireSeries => "entire_series",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "slope_one" => Ok(Normalization::SlopeOne),
            "critical_K0" => Ok(Normalization::CriticalK0),
            "entire_series" => Ok(Normalization::EntireSeries),
            _ => Err(Error::Format(format!("unknown normalization {s:?}"))),
        }
    }
}

/// Model of `(1 − J(x))/x` used below the smallest abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SmallX {
    /// `K + b x^{p−1}`.
    Power { k: f64, b: f64, p: f64 },
    /// `K |ln x| + c`.
    Critical { k: f64, c: f64 },
}

impl SmallX {
    /// `(1 − J(x))/x` under the model.
    #[inline]
    pub fn ratio(&self, x: f64) -> f64 {
        match *self {
            SmallX::Power { k, b, p } => k + b * x.powf(p - 1.0),
            SmallX::Critical { k, c } => k * x.ln().abs() + c,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        1.0 - x * self.ratio(x)
    }

    pub fn leading(&self) -> f64 {
        match *self {
            SmallX::Power { k, .. } | SmallX::Critical { k, .. } => k,
        }
    }

    /// Least-squares fit of `(1 − J)/x` on the given points.
    pub fn fit(xs: &[f64], js: &[f64], critical: bool, p: f64) -> Self {
        let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &j) in xs.iter().zip(js) {
            let r = (1.0 - j) / x;
            let (f1, f2) = if critical {
                (x.ln().abs(), 1.0)
            } else {
                (1.0, x.powf(p - 1.0))
            };
            s11 += f1 * f1;
            s12 += f1 * f2;
            s22 += f2 * f2;
            r1 += f1 * r;
            r2 += f2 * r;
        }
        let det = s11 * s22 - s12 * s12;
        let (a, b) = if det.abs() > 1e-300 {
            ((r1 * s22 - r2 * s12) / det, (s11 * r2 - s12 * r1) / det)
        } else {
            (r1 / s11, 0.0)
        };
        if critical {
            SmallX::Critical { k: a, c: b }
        } else {
            SmallX::Power { k: a, b, p }
        }
    }
}

type ClosedFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Table {
        interp: MonotoneCubic,
        small: Option<SmallX>,
    },
    Closed(ClosedFn),
}

/// A function of one positive variable on a grid, tagged with the equation
/// it solves and the normalization that pins its scale.
#[derive(Clone)]
pub struct LaplaceSolution {
    grid: Grid,
    points: Vec<f64>,
    values: Vec<f64>,
    form: Form,
    param: Param,
    normalization: Normalization,
    eval: Evaluator,
    /// Fixed-point residual recorded by the producer.
    pub residual: Option<f64>,
    /// Sweeps used by the iterative solver.
    pub sweeps: Option<usize>,
    /// Measured small-`x` slope constant (the fitted `K`).
    pub slope_readout: Option<f64>,
    /// Measured large-`x` constant of `1 − xφ(x)` (`K_1` or `K_2`).
    pub asymptotic_constant: Option<f64>,
}

impl fmt::Debug for LaplaceSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceSolution")
            .field("grid", &self.grid)
            .field("form", &self.form)
            .field("param", &self.param)
            .field("normalization", &self.normalization)
            .field("residual", &self.residual)
            .finish()
    }
}

impl LaplaceSolution {
    /// A tabulated function; `small` models `(1 − J)/x` below the grid.
    pub fn from_table(
        grid: Grid,
        values: Vec<f64>,
        form: Form,
        param: Param,
        normalization: Normalization,
        small: Option<SmallX>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite value in table".into()));
        }
        let (t0, h) = grid.spacing();
        let interp = MonotoneCubic::new(t0, h, values.clone());
        Ok(LaplaceSolution {
            points: grid.points(),
            grid,
            values,
            form,
            param,
            normalization,
            eval: Evaluator::Table { interp, small },
            residual: None,
            sweeps: None,
            slope_readout: None,
            asymptotic_constant: None,
        })
    }

    /// A closed-form function, tabulated on `grid` for output but evaluated exactly.
    pub fn closed_form(
        grid: Grid,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        form: Form,
        param: Param,
        normalization: Normalization,
    ) -> Self {
        let points = grid.points();
        let values = points.iter().map(|&x| f(x)).collect();
        LaplaceSolution {
            grid,
            points,
            values,
            form,
            param,
            normalization,
            eval: Evaluator::Closed(Arc::new(f)),
            residual: None,
            sweeps: None,
            slope_readout: None,
            asymptotic_constant: None,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn param(&self) -> Param {
        self.param
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.eval, Evaluator::Closed(_))
    }

    pub fn small_x_model(&self) -> Option<SmallX> {
        match &self.eval {
            Evaluator::Table { small, .. } => *small,
            Evaluator::Closed(_) => None,
        }
    }

    /// Value at `x`. Closed forms evaluate anywhere; tables accept the grid
    /// range plus the small-`x` model below it, and reject anything above.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match &self.eval {
            Evaluator::Closed(f) => Ok(f(x)),
            Evaluator::Table { interp, small } => {
                let (lo, hi) = (self.grid.lo(), self.grid.hi());
                if x > hi * (1.0 + 1e-12) || x.is_nan() {
                    return Err(Error::Extrapolation { x, lo, hi });
                }
                if x < lo {
                    return match (small, self.grid) {
                        (_, Grid::Log { .. }) if x <= 0.0 => Ok(1.0),
                        (Some(m), Grid::Log { .. }) => Ok(m.value(x)),
                        _ => Err(Error::Extrapolation { x, lo, hi }),
                    };
                }
                Ok(interp.eval(self.grid.coord(x)))
            }
        }
    }

    /// Like [`eval`](Self::eval), but continues tables above the grid with
    /// the power law through the last two nodes.
    pub fn eval_extended(&self, x: f64) -> f64 {
        match &self.eval {
            Evaluator::Closed(f) => f(x),
            Evaluator::Table { .. } => {
                if x > self.grid.hi() {
                    self.tail(x)
                } else {
                    self.eval(x).unwrap_or(1.0)
                }
            }
        }
    }

    fn tail(&self, x: f64) -> f64 {
        let n = self.values.len();
        let (y0, y1) = (self.values[n - 2].max(1e-300), self.values[n - 1].max(1e-300));
        let (c0, c1) = (self.grid.coord(self.points[n - 2]), self.grid.coord(self.points[n - 1]));
        let slope = ((y1.ln() - y0.ln()) / (c1 - c0)).min(0.0);
        (y1.ln() + slope * (self.grid.coord(x) - c1)).exp()
    }

    /// Values never increase along the grid (within `tol`).
    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// Second divided differences are nonnegative (within `tol`).
    pub fn is_convex(&self, tol: f64) -> bool {
        let (x, y) = (&self.points, &self.values);
        (1..x.len() - 1).all(|i| {
            let d1 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            let d2 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
            (d2 - d1) / (x[i + 1] - x[i - 1]) >= -tol
        })
    }

    /// Two-column CSV with a commented header line.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        self.write_csv_upto(f64::INFINITY, w)
    }

    /// Like [`write_csv`](Self::write_csv), keeping only abscissae up to `x_max`.
    pub fn write_csv_upto(&self, x_max: f64, mut w: impl Write) -> Result<()> {
        let residual = self
            .residual
            .map(|r| format!("{r:e}"))
            .unwrap_or_else(|| "na".into());
        let form = match self.form {
            Form::J => "j",
            Form::Phi => "phi",
            Form::Psi => "psi",
        };
        let mut out = format!(
            "# {} form={form} normalization={} residual={residual}\nabscissa,value\n",
            self.param,
            self.normalization.name(),
        );
        for (x, v) in self.points.iter().zip(&self.values).filter(|(x, _)| **x <= x_max) {
            out.push_str(&format!("{x:.17e},{v:.17e}\n"));
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv). The grid
    /// spacing is recovered from the abscissae.
    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty solution file".into()))??;
        let mut param = None;
        let mut form = Form::J;
        let mut norm = Normalization::SlopeOne;
        let mut residual = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            let (k, v) = tok.split_once('=').unwrap_or((tok, ""));
            let num = || v.parse::<f64>().map_err(|_| Error::Format(format!("bad header value {tok}")));
            match k {
                "z" => param = Some(Param::Z(num()?)),
                "alpha" => param = Some(Param::Alpha(num()?)),
                "form" => {
                    form = match v {
                        "j" => Form::J,
                        "phi" => Form::Phi,
                        "psi" => Form::Psi,
                        _ => return Err(Error::Format(format!("unknown form {v}"))),
                    }
                }
                "normalization" => norm = Normalization::parse(v)?,
                "residual" => residual = v.parse::<f64>().ok(),
                _ => {}
            }
        }
        let param = param.ok_or_else(|| Error::Format("header lacks z or alpha".into()))?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for line in lines {
            let line = line?;
            if line.starts_with("abscissa") || line.trim().is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad row {line:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad number {s:?}")))
            };
            xs.push(parse(a)?);
            ys.push(parse(b)?);
        }
        if xs.len() < 3 {
            return Err(Error::Format("need at least three rows".into()));
        }
        let n = xs.len();
        let (lo, hi) = (xs[0], xs[n - 1]);
        let lin = Grid::linear(lo, hi, n)?;
        let grid = if lo > 0.0 {
            let lg = Grid::log(lo, hi, n)?;
            let mid = lg.points()[n / 2];
            if (mid - xs[n / 2]).abs() <= 1e-9 * mid {
                lg
            } else {
                lin
            }
        } else {
            lin
        };
        let small = match (grid, form) {
            (Grid::Log { .. }, Form::J) => {
                let k = 10.min(n);
                let critical = norm == Normalization::CriticalK0;
                Some(SmallX::fit(&xs[..k], &ys[..k], critical, 2.0))
            }
            _ => None,
        };
        let mut s = LaplaceSolution::from_table(grid, ys, form, param, norm, small)?;
        s.residual = residual;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = Grid::log(1e-6, 1e3, 10).unwrap();
        let p = g.points();
        assert_eq!(p[0], 1e-6);
        assert_eq!(p[9], 1e3);
        assert!((p[1] / p[0] - 10.0).abs() < 1e-12);
        assert!(Grid::log(0.0, 1.0, 10).is_err());
        let l = Grid::linear(0.0, 2.0, 5).unwrap();
        assert_eq!(l.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn table_evaluation() {
        let g = Grid::log(1e-6, 1e3, 800).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|x| 1.0 / (1.0 + x)).collect();
        let pts = g.points();
        let small = SmallX::fit(&pts[..10], &vals[..10], false, 2.0);
        let s = LaplaceSolution::from_table(g, vals, Form::J, Param::Z(1.0), Normalization::SlopeOne, Some(small))
            .unwrap();
        for x in [1e-9, 1e-6, 0.37, 5.0, 999.0] {
            assert!((s.eval(x).unwrap() - 1.0 / (1.0 + x)).abs() < 1e-6, "x = {x}");
        }
        assert!(matches!(s.eval(2e3), Err(Error::Extrapolation { .. })));
        assert!((s.eval_extended(2e3) - 1.0 / 2001.0).abs() < 1e-6);
        assert!(s.is_non_increasing(0.0));
        assert!(s.is_convex(1e-12));
        assert!((small.leading() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::log(1e-3, 10.0, 50).unwrap();
        let mut s = LaplaceSolution::closed_form(g, |x| (-x).exp(), Form::J, Param::Z(0.5), Normalization::SlopeOne);
        s.residual = Some(1.5e-11);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# z=0.5 form=j normalization=slope_one residual=1.5e-11\n"));
        let back = LaplaceSolution::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.grid(), g);
        assert_eq!(back.values(), s.values());
        assert_eq!(back.residual, Some(1.5e-11));
    }
}
