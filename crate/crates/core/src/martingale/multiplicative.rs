//! Multiplicative martingales `∏ j(y · weight)` along a line of the Yule tree.

use super::value::{Index, Kind, MartingaleValue};
use super::ParamZ;
use crate::error::{Error, Result};
use crate::fixedpoint::LaplaceSolution;
use crate::numeric::NeumaierSum;
use crate::yule::YulePath;

/// A stopping line of the Yule tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Line {
    Generation(u8),
    Time(f64),
}

/// `𝒫_g(y) = ∏_{|u|=g} j(y z^g e^{(1−2z)S^u})` or
/// `𝒫(t)(y) = ∏_{u alive at t} j(y z^{|u|} e^{(1−2z)t})`.
///
/// Arguments below the grid of `j` use its small-`x` model; arguments above
/// it are an extrapolation error.
pub fn multiplicative_martingale(
    path: &YulePath,
    line: Line,
    y: f64,
    j: &LaplaceSolution,
    z: &ParamZ,
) -> Result<MartingaleValue> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("y must be positive, got {y}")));
    }
    let (lz, th) = (z.z.ln(), 1.0 - 2.0 * z.z);
    let mut log_prod = NeumaierSum::new();
    let mut push = |arg: f64| -> Result<()> {
        let v = j.eval(arg)?;
        if !(v > 0.0) {
            return Err(Error::Range(format!("j({arg}) = {v} is not positive")));
        }
        log_prod.add(v.min(1.0).ln());
        Ok(())
    };
    let index = match line {
        Line::Generation(g) => {
            for s in path.generation_births(g)? {
                push(y * (f64::from(g) * lz + th * s).exp())?;
            }
            Index::Generation(u32::from(g))
        }
        Line::Time(t) => {
            for (d, &c) in path.alive_profile(t)?.iter().enumerate() {
                if c > 0 {
                    let v = j.eval(y * (d as f64 * lz + th * t).exp())?;
                    if !(v > 0.0) {
                        return Err(Error::Range(format!("j value {v} is not positive")));
                    }
                    log_prod.add(c as f64 * v.min(1.0).ln());
                }
            }
            Index::Time(t)
        }
    };
    Ok(MartingaleValue {
        kind: Kind::Mult,
        index,
        z: *z,
        log_abs: log_prod.value(),
        sign: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{Form, Grid, LaplaceSolution, Normalization, Param};
    use crate::martingale::classify;
    use crate::yule::{simulate_yule, Stop};

    #[test]
    fn root_line_and_half() {
        let g = Grid::log(1e-6, 1e3, 100).unwrap();
        let e = LaplaceSolution::closed_form(g, |x| (-x).exp(), Form::J, Param::Z(0.5), Normalization::SlopeOne);
        let p = simulate_yule(3, Stop::Generation(8)).unwrap();
        let half = classify(0.5).unwrap();
        let v0 = multiplicative_martingale(&p, Line::Generation(0), 1.3, &e, &half).unwrap();
        assert!((v0.value() - (-1.3f64).exp()).abs() < 1e-15);
        let v0t = multiplicative_martingale(&p, Line::Time(0.0), 1.3, &e, &half).unwrap();
        assert!((v0t.value() - (-1.3f64).exp()).abs() < 1e-15);
        for g in 1..=8 {
            let v = multiplicative_martingale(&p, Line::Generation(g), 0.7, &e, &half).unwrap();
            assert!((v.value() - (-0.7f64).exp()).abs() < 1e-14);
        }
    }
}
